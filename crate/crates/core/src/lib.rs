//! Third-order tensor algebra under the t-product and multilinear
//! time-invariant systems `dX/dt = A*X + B*U` built on it.
//!
//! Everything numeric is generic over [`scalar::Real`] (`f32` or `f64`);
//! the aliases at the crate root fix `f64`.
//!
//! ```
//! use mlti::{Tensor, System};
//!
//! let a = Tensor::from_real_slices(&[
//!     vec![vec![-6.0, 5.0], vec![-10.0, 0.0]],
//!     vec![vec![0.0, 2.0], vec![8.0, 2.0]],
//! ]).unwrap();
//! let b = Tensor::from_real_slices(&vec![vec![vec![1.0], vec![1.0]]; 2]).unwrap();
//! let sys = System::new(a, b).unwrap();
//! assert!(mlti::stability(&sys).unwrap().stable);
//! ```

pub mod cli;
pub mod control;
pub mod error;
pub mod matfun;
pub mod scalar;
pub mod spectral;
pub mod system;
pub mod tensor;
pub mod tfunc;

pub use control::{
    closed_loop, closed_loop_with, ctrb_check, ctrb_check_with, ctrb_tensor, design_feedback,
    BMode, ControllabilityMode, ControllabilityReport, FeedbackGain,
};
pub use error::{Error, Result};
pub use matfun::DenseMatrix;
pub use scalar::Real;
pub use spectral::{
    eigentuples, from_spectral, teig, to_spectral, tubal_rank, Assembly, Eigentuple, SpectralForm,
    TEig,
};
pub use system::{
    simulate, stability, zero_input_solution, InputSignal, MltiSystem, StabilityReport, TimeGrid,
    Trajectory,
};
pub use tensor::{
    bcirc, fold, identity_tensor, matvec_unfold, tadjoint, tinv, tprod, ttranspose, Tensor3,
    TubalScalar,
};
pub use tfunc::{texp, tfun, tfun_apply, TensorFunction};

pub type C64 = num_complex::Complex<f64>;
pub type Tensor = Tensor3<f64>;
pub type Tube = TubalScalar<f64>;
pub type Matrix = DenseMatrix<f64>;
pub type System = MltiSystem<f64>;
pub type Gain = FeedbackGain<f64>;
