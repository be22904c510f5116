use num_complex::Complex;

use super::DenseMatrix;
use crate::scalar::{czero, Real};

/// Default relative tolerance for numerical rank.
pub const RANK_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 80;

/// Singular values in descending order, by one-sided (Hestenes) Jacobi.
pub fn singular_values<T: Real>(m: &DenseMatrix<T>) -> Vec<T> {
    // Orthogonalize the columns of a tall matrix.
    let work = if m.rows() >= m.cols() {
        m.clone()
    } else {
        m.adjoint()
    };
    let (rows, cols) = work.shape();
    let mut columns: Vec<Vec<Complex<T>>> = (0..cols).map(|j| work.column(j)).collect();
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: T = columns[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: T = columns[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex<T> = columns[p]
                    .iter()
                    .zip(&columns[q])
                    .map(|(x, y)| x.conj() * y)
                    .fold(czero(), |a, b| a + b);
                let g = gamma.norm();
                if g == T::zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (T::lit(2.0) * g);
                let t = num_traits::Float::signum(zeta) / (zeta.magnitude() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let x = columns[p][i];
                    let y = columns[q][i] * phase.conj();
                    columns[p][i] = x * c - y * s;
                    columns[q][i] = (x * s + y * c) * phase;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<T> = columns
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Number of singular values above `tol * sigma_max`.
pub fn rank<T: Real>(m: &DenseMatrix<T>, tol: T) -> usize {
    let sv = singular_values(m);
    let Some(&smax) = sv.first() else {
        return 0;
    };
    if smax == T::zero() {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * smax).count()
}
