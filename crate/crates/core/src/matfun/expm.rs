//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13, selected from the 1-norm.

use super::{lu, DenseMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// `exp(m)` for a square matrix.
pub fn expm<T: Real>(m: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.is_finite() {
        return Err(Error::Overflow);
    }
    let n = m.rows();
    let norm = m.norm1().to_f64_lossy();
    let ident = DenseMatrix::identity(n);
    if norm == 0.0 {
        return Ok(ident);
    }

    for (theta, coeffs) in [
        (THETA_3, &B3[..]),
        (THETA_5, &B5[..]),
        (THETA_7, &B7[..]),
        (THETA_9, &B9[..]),
    ] {
        if norm <= theta {
            return finish(low_order(m, coeffs), 0);
        }
    }

    let squarings = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    if squarings > 1000 {
        return Err(Error::Overflow);
    }
    let scaled = m.scale_real(T::lit(2f64.powi(-squarings)));
    finish(degree13(&scaled), squarings as u32)
}

fn finish<T: Real>(
    (u, v): (DenseMatrix<T>, DenseMatrix<T>),
    squarings: u32,
) -> Result<DenseMatrix<T>> {
    let p = &v + &u;
    let q = &v - &u;
    let mut r = lu::solve(&q, &p).map_err(|_| Error::Overflow)?;
    for _ in 0..squarings {
        r = &r * &r;
        if !r.is_finite() {
            return Err(Error::Overflow);
        }
    }
    if !r.is_finite() {
        return Err(Error::Overflow);
    }
    Ok(r)
}

/// Returns the odd part `u` and even part `v` of the Padé numerator.
fn low_order<T: Real>(a: &DenseMatrix<T>, b: &[f64]) -> (DenseMatrix<T>, DenseMatrix<T>) {
    let n = a.rows();
    let a2 = a * a;
    let mut powers = vec![DenseMatrix::identity(n), a2.clone()];
    while powers.len() * 2 < b.len() {
        let next = powers.last().unwrap() * &a2;
        powers.push(next);
    }
    let mut odd = DenseMatrix::zeros(n, n);
    let mut even = DenseMatrix::zeros(n, n);
    for (k, pk) in powers.iter().enumerate() {
        if 2 * k + 1 < b.len() {
            odd = &odd + &pk.scale_real(T::lit(b[2 * k + 1]));
        }
        if 2 * k < b.len() {
            even = &even + &pk.scale_real(T::lit(b[2 * k]));
        }
    }
    (a * &odd, even)
}

fn degree13<T: Real>(a: &DenseMatrix<T>) -> (DenseMatrix<T>, DenseMatrix<T>) {
    let n = a.rows();
    let b = |i: usize| T::lit(B13[i]);
    let ident = DenseMatrix::identity(n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let inner_u = &(&a6.scale_real(b(13)) + &a4.scale_real(b(11))) + &a2.scale_real(b(9));
    let u_sum = &(&(&(&a6 * &inner_u) + &a6.scale_real(b(7))) + &a4.scale_real(b(5)))
        + &(&a2.scale_real(b(3)) + &ident.scale_real(b(1)));
    let u = a * &u_sum;

    let inner_v = &(&a6.scale_real(b(12)) + &a4.scale_real(b(10))) + &a2.scale_real(b(8));
    let v = &(&(&(&a6 * &inner_v) + &a6.scale_real(b(6))) + &a4.scale_real(b(4)))
        + &(&a2.scale_real(b(2)) + &ident.scale_real(b(0)));
    (u, v)
}
