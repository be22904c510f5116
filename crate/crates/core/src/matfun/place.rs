//! Single-input eigenvalue placement by Ackermann's formula.

use num_complex::Complex;

use super::svd::{rank, RANK_TOL};
use super::{lu, DenseMatrix};
use crate::error::{Error, Result};
use crate::scalar::{cone, czero, Real};

/// Tolerance (relative to the largest requested magnitude) used when
/// pairing requested eigenvalues with their conjugates.
pub const CONJUGATE_TOL: f64 = 1e-9;

/// Kalman controllability matrix `[b, a b, ..., a^(n-1) b]`.
pub fn kalman_matrix<T: Real>(a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if b.rows() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "input matrix has {} rows, dynamics has {}",
            b.rows(),
            a.rows()
        )));
    }
    let mut blocks = Vec::with_capacity(a.rows());
    let mut cur = b.clone();
    for _ in 0..a.rows() {
        let next = a * &cur;
        blocks.push(cur);
        cur = next;
    }
    DenseMatrix::hstack(&blocks)
}

/// Monic polynomial coefficients (highest degree first) with the given roots.
pub fn poly_from_roots<T: Real>(roots: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut coeffs = vec![cone::<T>()];
    for &r in roots {
        let mut next = vec![czero(); coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i] = next[i] + c;
            next[i + 1] = next[i + 1] - c * r;
        }
        coeffs = next;
    }
    coeffs
}

/// True when every value has a conjugate partner in the list (multiset sense).
pub fn is_conjugate_closed<T: Real>(values: &[Complex<T>]) -> bool {
    multiset_matches(values, &values.iter().map(|z| z.conj()).collect::<Vec<_>>())
}

/// Multiset equality of two complex lists within [`CONJUGATE_TOL`].
pub fn multiset_matches<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let scale = a
        .iter()
        .chain(b)
        .map(|z| z.norm())
        .fold(T::one(), T::max);
    let tol = T::lit(CONJUGATE_TOL) * scale;
    let mut used = vec![false; b.len()];
    'outer: for x in a {
        for (j, y) in b.iter().enumerate() {
            if !used[j] && (x - y).norm() <= tol {
                used[j] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Row gain `k` such that `eig(a - b k)` equals `desired`.
pub fn place_single_input<T: Real>(
    a: &DenseMatrix<T>,
    b: &DenseMatrix<T>,
    desired: &[Complex<T>],
) -> Result<DenseMatrix<T>> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if b.cols() != 1 {
        return Err(Error::Unsupported(format!(
            "pole placement supports a single input only, got {} input columns",
            b.cols()
        )));
    }
    if b.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "input column has {} rows, dynamics is {n}x{n}",
            b.rows()
        )));
    }
    if desired.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} eigenvalues requested for a {n}x{n} system",
            desired.len()
        )));
    }
    let real_pair = a.is_real() && b.is_real();
    if real_pair && !is_conjugate_closed(desired) {
        return Err(Error::NotConjugateClosed);
    }

    let ctrb = kalman_matrix(a, b)?;
    let r = rank(&ctrb, T::lit(RANK_TOL));
    if r < n {
        return Err(Error::Uncontrollable {
            slice: None,
            rank: r,
            required: n,
        });
    }

    let mut coeffs = poly_from_roots(desired);
    if real_pair {
        for z in &mut coeffs {
            z.im = T::zero();
        }
    }
    // phi(a) by Horner
    let ident = DenseMatrix::identity(n);
    let mut phi = ident.clone();
    for &cf in &coeffs[1..] {
        phi = &(&phi * a) + &ident.scale(cf);
    }
    // row e_n^T C^-1 from C^T w = e_n
    let mut en = DenseMatrix::zeros(n, 1);
    en[(n - 1, 0)] = cone();
    let w = lu::solve(&ctrb.transpose(), &en)?;
    let mut k = &w.transpose() * &phi;
    if real_pair {
        k.discard_imaginary();
    }
    Ok(k)
}
