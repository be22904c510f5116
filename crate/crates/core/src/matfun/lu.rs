use num_complex::Complex;

use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::{czero, Real};

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu<T: Real> {
    lu: DenseMatrix<T>,
    perm: Vec<usize>,
    singular: bool,
}

impl<T: Real> Lu<T> {
    pub fn new(a: &DenseMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut singular = false;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -T::one()), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pmax == T::zero() {
                singular = true;
                continue;
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f == czero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] = lu[(i, j)] - f * u;
                }
            }
        }
        Ok(Self { lu, perm, singular })
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// Solves `A X = B` for a block of right-hand sides.
    pub fn solve(&self, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        let n = self.lu.rows();
        if b.rows() != n {
            return Err(Error::ShapeMismatch(format!(
                "right-hand side has {} rows, expected {n}",
                b.rows()
            )));
        }
        if self.singular {
            return Err(Error::SingularMatrix { rcond: 0.0 });
        }
        let m = b.cols();
        let mut x = DenseMatrix::from_fn(n, m, |i, j| b[(self.perm[i], j)]);
        for j in 0..m {
            for i in 0..n {
                let mut s = x[(i, j)];
                for k in 0..i {
                    s = s - self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, j)];
                for k in i + 1..n {
                    s = s - self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<DenseMatrix<T>> {
        self.solve(&DenseMatrix::identity(self.lu.rows()))
    }

    pub fn determinant(&self) -> Complex<T> {
        let n = self.lu.rows();
        let mut det = Complex::new(T::one(), T::zero());
        for i in 0..n {
            det = det * self.lu[(i, i)];
        }
        // parity of the permutation
        let mut seen = vec![false; n];
        let mut odd = false;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.perm[i];
                len += 1;
            }
            if len % 2 == 0 {
                odd = !odd;
            }
        }
        if odd {
            -det
        } else {
            det
        }
    }
}

/// Inverse together with the exact 1-norm reciprocal condition number
/// `1 / (||A||_1 ||A^-1||_1)`. Singular input yields `rcond = 0`.
pub fn inverse_with_rcond<T: Real>(a: &DenseMatrix<T>) -> Result<(Option<DenseMatrix<T>>, T)> {
    let lu = Lu::new(a)?;
    if lu.is_singular() {
        return Ok((None, T::zero()));
    }
    let inv = lu.inverse()?;
    let denom = a.norm1() * inv.norm1();
    if !inv.is_finite() || !denom.is_finite() || denom == T::zero() {
        return Ok((None, T::zero()));
    }
    Ok((Some(inv), T::one() / denom))
}

/// Reciprocal 1-norm condition number.
pub fn rcond<T: Real>(a: &DenseMatrix<T>) -> Result<T> {
    Ok(inverse_with_rcond(a)?.1)
}

/// Solves `A X = B`.
pub fn solve<T: Real>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    Lu::new(a)?.solve(b)
}

/// Inverse of a nonsingular matrix.
pub fn inverse<T: Real>(a: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    Lu::new(a)?.inverse()
}
