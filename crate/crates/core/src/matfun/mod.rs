//! Dense matrix kernels used by the tensor layer.

mod dense;
pub mod eig;
pub mod expm;
pub mod lu;
pub mod place;
pub mod svd;

pub use dense::DenseMatrix;
pub use eig::{eig, eigenvalues, schur, sort_eigenvalues, Eigen};
pub use expm::expm;
pub use lu::{inverse, inverse_with_rcond, rcond, solve, Lu};
pub use place::{kalman_matrix, place_single_input};
pub use svd::{rank, singular_values, RANK_TOL};
