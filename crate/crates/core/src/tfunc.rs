//! Functions of tensors, evaluated slice by slice in the DFT domain:
//! `f(A)` has spectral slices `f(D_i)`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matfun::{self, DenseMatrix};
use crate::scalar::Real;
use crate::spectral::{from_spectral, to_spectral};
use crate::tensor::Tensor3;

type Evaluator<T> = dyn Fn(&DenseMatrix<T>) -> Result<DenseMatrix<T>> + Send + Sync;

/// A scalar function lifted to square matrices.
#[derive(Clone)]
pub struct TensorFunction<T: Real> {
    name: String,
    real_coefficients: bool,
    evaluator: Arc<Evaluator<T>>,
}

impl<T: Real> TensorFunction<T> {
    /// A user-supplied matrix function. `real_coefficients` asserts that
    /// `f(conj(M)) = conj(f(M))`, which keeps images of real tensors real.
    pub fn custom(
        name: impl Into<String>,
        real_coefficients: bool,
        f: impl Fn(&DenseMatrix<T>) -> Result<DenseMatrix<T>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            real_coefficients,
            evaluator: Arc::new(f),
        }
    }

    pub fn identity() -> Self {
        Self::custom("identity", true, |m| Ok(m.clone()))
    }

    /// `M -> exp(t M)`.
    pub fn exp(t: T) -> Self {
        Self::custom(format!("exp({t}*)"), true, move |m| {
            matfun::expm(&m.scale_real(t))
        })
    }

    /// `M -> sum_k coeffs[k] M^k`, lowest degree first.
    pub fn polynomial(coeffs: &[T]) -> Self {
        let cs: Vec<Complex<T>> = coeffs.iter().map(|&x| Complex::new(x, T::zero())).collect();
        Self::polynomial_complex_inner(cs, true)
    }

    /// Polynomial with complex coefficients, lowest degree first.
    pub fn polynomial_complex(coeffs: &[Complex<T>]) -> Self {
        let real = coeffs.iter().all(|z| z.im == T::zero());
        Self::polynomial_complex_inner(coeffs.to_vec(), real)
    }

    fn polynomial_complex_inner(coeffs: Vec<Complex<T>>, real: bool) -> Self {
        Self::custom("polynomial", real, move |m| {
            if !m.is_square() {
                return Err(Error::NotSquare {
                    rows: m.rows(),
                    cols: m.cols(),
                });
            }
            let ident = DenseMatrix::identity(m.rows());
            let mut acc = DenseMatrix::zeros(m.rows(), m.cols());
            for &cf in coeffs.iter().rev() {
                acc = &(&acc * m) + &ident.scale(cf);
            }
            Ok(acc)
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn has_real_coefficients(&self) -> bool {
        self.real_coefficients
    }

    pub fn eval(&self, m: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        (self.evaluator)(m)
    }
}

impl<T: Real> fmt::Debug for TensorFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TensorFunction")
            .field("name", &self.name)
            .field("real_coefficients", &self.real_coefficients)
            .finish()
    }
}

fn check_square<T: Real>(a: &Tensor3<T>) -> Result<()> {
    if a.rows() != a.cols() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    Ok(())
}

fn spectral_image<T: Real>(
    a: &Tensor3<T>,
    f: &TensorFunction<T>,
) -> Result<crate::spectral::SpectralForm<T>> {
    check_square(a)?;
    to_spectral(a).map_slices(f.real_coefficients, |i, d| {
        let out = f.eval(d).map_err(|e| Error::EvaluatorFailure {
            function: f.name.clone(),
            slice: i + 1,
            source: Box::new(e),
        })?;
        if out.shape() != d.shape() {
            return Err(Error::EvaluatorFailure {
                function: f.name.clone(),
                slice: i + 1,
                source: Box::new(Error::ShapeMismatch("evaluator changed the shape".into())),
            });
        }
        Ok(out)
    })
}

/// `f(A)`.
pub fn tfun<T: Real>(a: &Tensor3<T>, f: &TensorFunction<T>) -> Result<Tensor3<T>> {
    from_spectral(&spectral_image(a, f)?)?.ensure_finite("tensor function")
}

/// The tensor exponential `exp(A t)`.
pub fn texp<T: Real>(a: &Tensor3<T>, t: T) -> Result<Tensor3<T>> {
    check_square(a)?;
    let s = to_spectral(a).map_slices(true, |_, d| matfun::expm(&d.scale_real(t)))?;
    from_spectral(&s)?.ensure_finite("tensor exponential")
}

/// `f(A) * B` without forming `f(A)` in the tube domain.
pub fn tfun_apply<T: Real>(
    a: &Tensor3<T>,
    f: &TensorFunction<T>,
    b: &Tensor3<T>,
) -> Result<Tensor3<T>> {
    if a.rows() != b.rows() || a.tubes() != b.tubes() {
        return Err(Error::ShapeMismatch(format!(
            "cannot apply a function of a {}x{}x{} tensor to {}x{}x{}",
            a.rows(),
            a.cols(),
            a.tubes(),
            b.rows(),
            b.cols(),
            b.tubes()
        )));
    }
    let fa = spectral_image(a, f)?;
    from_spectral(&fa.product(&to_spectral(b))?)?.ensure_finite("tensor function action")
}
