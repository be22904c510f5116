//! General complex eigendecomposition.
//!
//! Householder reduction to upper Hessenberg form followed by single-shift
//! implicit QR sweeps (Wilkinson shifts, occasional exceptional shifts) to a
//! complex Schur form `A = Q T Q^H`. Eigenvectors come from back substitution
//! on `T` and are mapped back through `Q`.

use std::cmp::Ordering;

use num_complex::Complex;

use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::{cone, czero, Real};

/// Relative width under which two real parts count as tied for ordering.
pub const ORDER_TIE_TOL: f64 = 1e-9;

/// Eigenvalues with matching unit-norm eigenvectors (as columns).
#[derive(Clone, Debug)]
pub struct Eigen<T: Real> {
    pub values: Vec<Complex<T>>,
    pub vectors: DenseMatrix<T>,
}

/// Computes eigenvalues and eigenvectors, ordered by [`sort_eigenvalues`].
pub fn eig<T: Real>(m: &DenseMatrix<T>) -> Result<Eigen<T>> {
    let (t, q) = schur(m)?;
    let n = t.rows();
    let values: Vec<Complex<T>> = (0..n).map(|i| t[(i, i)]).collect();
    let y = triangular_eigenvectors(&t);
    let mut vectors = &q * &y;
    for j in 0..n {
        let norm = (0..n).map(|i| vectors[(i, j)].norm_sqr()).sum::<T>().sqrt();
        if norm > T::zero() {
            for i in 0..n {
                vectors[(i, j)] = vectors[(i, j)] / norm;
            }
        }
    }
    let order = eigenvalue_order(&values);
    let sorted_values = order.iter().map(|&k| values[k]).collect();
    let sorted_vectors = DenseMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    Ok(Eigen {
        values: sorted_values,
        vectors: sorted_vectors,
    })
}

/// Eigenvalues only, ordered by [`sort_eigenvalues`].
pub fn eigenvalues<T: Real>(m: &DenseMatrix<T>) -> Result<Vec<Complex<T>>> {
    let (t, _) = schur(m)?;
    let mut values: Vec<Complex<T>> = (0..t.rows()).map(|i| t[(i, i)]).collect();
    sort_eigenvalues(&mut values);
    Ok(values)
}

/// Sorts by descending real part, ties broken by descending imaginary part.
/// Real parts within [`ORDER_TIE_TOL`] (relative) of their neighbour are tied,
/// so a conjugate pair always lists the positive imaginary part first.
pub fn sort_eigenvalues<T: Real>(values: &mut [Complex<T>]) {
    let order = eigenvalue_order(values);
    let sorted: Vec<Complex<T>> = order.iter().map(|&k| values[k]).collect();
    values.copy_from_slice(&sorted);
}

fn eigenvalue_order<T: Real>(values: &[Complex<T>]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        values[b]
            .re
            .partial_cmp(&values[a].re)
            .unwrap_or(Ordering::Equal)
    });
    let tol = T::lit(ORDER_TIE_TOL);
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() {
            let prev = values[idx[end - 1]];
            let cur = values[idx[end]];
            let scale = prev.norm().max(cur.norm());
            if (prev.re - cur.re).magnitude() <= tol * scale {
                end += 1;
            } else {
                break;
            }
        }
        idx[start..end].sort_by(|&a, &b| {
            values[b]
                .im
                .partial_cmp(&values[a].im)
                .unwrap_or(Ordering::Equal)
        });
        start = end;
    }
    idx
}

/// Complex Schur decomposition `m = q t q^H` with `t` upper triangular.
pub fn schur<T: Real>(m: &DenseMatrix<T>) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("eig input"));
    }
    let (mut h, mut q) = hessenberg(m);
    qr_iterate(&mut h, &mut q)?;
    Ok((h, q))
}

/// Householder reduction `m = q h q^H`.
pub fn hessenberg<T: Real>(m: &DenseMatrix<T>) -> (DenseMatrix<T>, DenseMatrix<T>) {
    let n = m.rows();
    let mut h = m.clone();
    let mut q = DenseMatrix::identity(n);
    if n < 3 {
        return (h, q);
    }
    let two = T::lit(2.0);
    for k in 0..n - 2 {
        let x: Vec<Complex<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if xnorm == T::zero() {
            continue;
        }
        let phase = if x[0].norm() == T::zero() {
            cone()
        } else {
            x[0] / x[0].norm()
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] = v[0] - alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if vnorm == T::zero() {
            continue;
        }
        for z in &mut v {
            *z = *z / vnorm;
        }
        // H <- P H with P = I - 2 v v^H acting on rows k+1..n
        for j in 0..n {
            let mut s = czero();
            for (r, vi) in v.iter().enumerate() {
                s = s + vi.conj() * h[(k + 1 + r, j)];
            }
            let s = s * two;
            for (r, vi) in v.iter().enumerate() {
                h[(k + 1 + r, j)] = h[(k + 1 + r, j)] - *vi * s;
            }
        }
        // H <- H P, Q <- Q P acting on columns k+1..n
        for mat in [&mut h, &mut q] {
            for i in 0..n {
                let mut s = czero();
                for (r, vi) in v.iter().enumerate() {
                    s = s + mat[(i, k + 1 + r)] * *vi;
                }
                let s = s * two;
                for (r, vi) in v.iter().enumerate() {
                    mat[(i, k + 1 + r)] = mat[(i, k + 1 + r)] - s * vi.conj();
                }
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = czero();
        }
    }
    (h, q)
}

/// Unitary `G = [[c, s], [-conj(s), c]]` (c real) with `G [x; y] = [r; 0]`.
fn givens<T: Real>(x: Complex<T>, y: Complex<T>) -> (T, Complex<T>) {
    let nx = x.norm();
    let ny = y.norm();
    if ny == T::zero() {
        return (T::one(), czero());
    }
    if nx == T::zero() {
        return (T::zero(), cone());
    }
    let norm = nx.hypot(ny);
    let c = nx / norm;
    let s = (x / nx) * y.conj() / norm;
    (c, s)
}

fn wilkinson_shift<T: Real>(h: &DenseMatrix<T>, hi: usize) -> Complex<T> {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let cc = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let half = T::lit(0.5);
    let p = (a - d) * half;
    let bc = b * cc;
    let disc = (p * p + bc).sqrt();
    let plus = p + disc;
    let minus = p - disc;
    let denom = if plus.norm() >= minus.norm() { plus } else { minus };
    if denom.norm() == T::zero() {
        d
    } else {
        d - bc / denom
    }
}

fn qr_iterate<T: Real>(h: &mut DenseMatrix<T>, q: &mut DenseMatrix<T>) -> Result<()> {
    let n = h.rows();
    if n < 2 {
        return Ok(());
    }
    let eps = T::epsilon();
    let hnorm = h.frobenius_norm();
    let max_iter = 30 * n.max(10);
    let mut hi = n - 1;
    let mut iter = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if s == T::zero() {
                s = hnorm;
            }
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = czero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > max_iter {
            return Err(Error::ConvergenceFailure { iterations: iter });
        }
        let mu = if iter % 10 == 0 {
            h[(hi, hi)] + Complex::new(T::lit(0.75) * h[(hi, hi - 1)].re.magnitude(), T::zero())
        } else {
            wilkinson_shift(h, hi)
        };
        let mut x = h[(l, l)] - mu;
        let mut y = h[(l + 1, l)];
        for k in l..hi {
            let (c, s) = givens(x, y);
            let col0 = if k > l { k - 1 } else { l };
            for j in col0..n {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = -s.conj() * a + b * c;
            }
            if k > l {
                h[(k + 1, k - 1)] = czero();
            }
            let row1 = (k + 2).min(hi);
            for i in 0..=row1 {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * s.conj();
                h[(i, k + 1)] = -a * s + b * c;
            }
            for i in 0..n {
                let a = q[(i, k)];
                let b = q[(i, k + 1)];
                q[(i, k)] = a * c + b * s.conj();
                q[(i, k + 1)] = -a * s + b * c;
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = czero();
        }
    }
    Ok(())
}

/// Columns `y_k` with `(t - t_kk I) y_k = 0`, `y_k[k] = 1`, zero below `k`.
fn triangular_eigenvectors<T: Real>(t: &DenseMatrix<T>) -> DenseMatrix<T> {
    let n = t.rows();
    let small = T::epsilon() * t.frobenius_norm().max(T::min_positive_value());
    let mut y = DenseMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = cone();
        for j in (0..k).rev() {
            let mut s: Complex<T> = czero();
            for m in j + 1..=k {
                s = s + t[(j, m)] * y[(m, k)];
            }
            let mut d = t[(j, j)] - lambda;
            if d.norm() < small {
                d = Complex::new(small, T::zero());
            }
            y[(j, k)] = -s / d;
        }
    }
    y
}
