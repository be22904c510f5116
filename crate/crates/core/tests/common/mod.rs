//! Independent reference computations for the integration tests. Nothing
//! here calls the library's numeric kernels: matrices are plain row-major
//! `Vec<C64>` and every routine is the textbook definition.
#![allow(dead_code)]

use std::f64::consts::PI;

use mlti::{Tensor, C64};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Dense complex square or rectangular matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct M {
    pub r: usize,
    pub c: usize,
    pub d: Vec<C64>,
}

impl M {
    pub fn zeros(r: usize, c: usize) -> Self {
        Self { r, c, d: vec![C64::new(0.0, 0.0); r * c] }
    }

    pub fn eye(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.d[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_real(r: usize, c: usize, v: &[f64]) -> Self {
        assert_eq!(v.len(), r * c);
        Self { r, c, d: v.iter().map(|&x| C64::new(x, 0.0)).collect() }
    }

    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.d[i * self.c + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.d[i * self.c + j] = v;
    }

    pub fn mul(&self, o: &M) -> M {
        assert_eq!(self.c, o.r);
        let mut out = M::zeros(self.r, o.c);
        for i in 0..self.r {
            for k in 0..self.c {
                let a = self.at(i, k);
                for j in 0..o.c {
                    out.d[i * o.c + j] += a * o.at(k, j);
                }
            }
        }
        out
    }

    pub fn add(&self, o: &M) -> M {
        M { r: self.r, c: self.c, d: self.d.iter().zip(&o.d).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &M) -> M {
        M { r: self.r, c: self.c, d: self.d.iter().zip(&o.d).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: C64) -> M {
        M { r: self.r, c: self.c, d: self.d.iter().map(|a| a * s).collect() }
    }

    pub fn transpose(&self) -> M {
        let mut out = M::zeros(self.c, self.r);
        for i in 0..self.r {
            for j in 0..self.c {
                out.set(j, i, self.at(i, j));
            }
        }
        out
    }

    pub fn adjoint(&self) -> M {
        let mut t = self.transpose();
        t.d.iter_mut().for_each(|z| *z = z.conj());
        t
    }

    pub fn fro(&self) -> f64 {
        self.d.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn norm1(&self) -> f64 {
        (0..self.c)
            .map(|j| (0..self.r).map(|i| self.at(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn block(&self, i0: usize, j0: usize, r: usize, c: usize) -> M {
        let mut out = M::zeros(r, c);
        for i in 0..r {
            for j in 0..c {
                out.set(i, j, self.at(i0 + i, j0 + j));
            }
        }
        out
    }

    pub fn set_block(&mut self, i0: usize, j0: usize, b: &M) {
        for i in 0..b.r {
            for j in 0..b.c {
                self.set(i0 + i, j0 + j, b.at(i, j));
            }
        }
    }
}

pub fn rel_err(a: &M, b: &M) -> f64 {
    a.sub(b).fro() / b.fro().max(f64::MIN_POSITIVE)
}

/// Frontal slice `k` of a library tensor as an oracle matrix.
pub fn slice(t: &Tensor, k: usize) -> M {
    let mut m = M::zeros(t.rows(), t.cols());
    for i in 0..t.rows() {
        for j in 0..t.cols() {
            m.set(i, j, t.get(i, j, k));
        }
    }
    m
}

pub fn slices(t: &Tensor) -> Vec<M> {
    (0..t.tubes()).map(|k| slice(t, k)).collect()
}

pub fn tensor_of(slices: &[M]) -> Tensor {
    let (r, c) = (slices[0].r, slices[0].c);
    Tensor::from_fn(r, c, slices.len(), |i, j, k| slices[k].at(i, j)).unwrap()
}

/// Block circulant matrix straight from the definition: block `(i, j)` is
/// slice `(i - j) mod n`.
pub fn bcirc(t: &Tensor) -> M {
    let (r, c, n) = t.shape();
    let s = slices(t);
    let mut out = M::zeros(r * n, c * n);
    for i in 0..n {
        for j in 0..n {
            out.set_block(i * r, j * c, &s[(i + n - j) % n]);
        }
    }
    out
}

/// Stacked frontal slices.
pub fn matvec(t: &Tensor) -> M {
    let (r, c, n) = t.shape();
    let mut out = M::zeros(r * n, c);
    for (k, s) in slices(t).iter().enumerate() {
        out.set_block(k * r, 0, s);
    }
    out
}

pub fn fold(m: &M, rows: usize) -> Tensor {
    let n = m.r / rows;
    tensor_of(&(0..n).map(|k| m.block(k * rows, 0, rows, m.c)).collect::<Vec<_>>())
}

/// `fold(bcirc(a) matvec(b))`.
pub fn tprod(a: &Tensor, b: &Tensor) -> Tensor {
    fold(&bcirc(a).mul(&matvec(b)), a.rows())
}

/// Unnormalized DFT matrix `F[j][k] = w^(jk)`, `w = exp(-2 pi i / n)`.
pub fn dft_matrix(n: usize) -> M {
    let mut f = M::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let ang = -2.0 * PI * ((j * k) % n) as f64 / n as f64;
            f.set(j, k, C64::from_polar(1.0, ang));
        }
    }
    f
}

pub fn kron(a: &M, b: &M) -> M {
    let mut out = M::zeros(a.r * b.r, a.c * b.c);
    for i in 0..a.r {
        for j in 0..a.c {
            out.set_block(i * b.r, j * b.c, &b.scale(a.at(i, j)));
        }
    }
    out
}

/// Diagonal blocks of `(F kron I) bcirc(t) (F^-1 kron I)`.
pub fn spectral_blocks(t: &Tensor) -> Vec<M> {
    let (r, c, n) = t.shape();
    let f = dft_matrix(n);
    let finv = f.adjoint().scale(C64::new(1.0 / n as f64, 0.0));
    let big = kron(&f, &M::eye(r)).mul(&bcirc(t)).mul(&kron(&finv, &M::eye(c)));
    (0..n).map(|i| big.block(i * r, i * c, r, c)).collect()
}

pub fn naive_dft(x: &[C64]) -> Vec<C64> {
    let n = x.len();
    (0..n)
        .map(|j| {
            (0..n)
                .map(|k| x[k] * C64::from_polar(1.0, -2.0 * PI * ((j * k) % n) as f64 / n as f64))
                .sum()
        })
        .collect()
}

pub fn naive_idft(x: &[C64]) -> Vec<C64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            (0..n)
                .map(|j| x[j] * C64::from_polar(1.0, 2.0 * PI * ((j * k) % n) as f64 / n as f64))
                .sum::<C64>()
                / n as f64
        })
        .collect()
}

/// Tensor whose DFT-domain slices are `d`.
pub fn from_blocks(d: &[M]) -> Tensor {
    let n = d.len();
    let (r, c) = (d[0].r, d[0].c);
    let mut out = vec![M::zeros(r, c); n];
    for i in 0..r {
        for j in 0..c {
            let tube: Vec<C64> = d.iter().map(|m| m.at(i, j)).collect();
            for (k, v) in naive_idft(&tube).into_iter().enumerate() {
                out[k].set(i, j, v);
            }
        }
    }
    tensor_of(&out)
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn inv(a: &M) -> M {
    let n = a.r;
    let mut m = a.clone();
    let mut x = M::eye(n);
    for col in 0..n {
        let p = (col..n)
            .max_by(|&i, &j| m.at(i, col).norm().total_cmp(&m.at(j, col).norm()))
            .unwrap();
        assert!(m.at(p, col).norm() > 1e-300, "oracle inverse: singular");
        for j in 0..n {
            m.d.swap(col * n + j, p * n + j);
            x.d.swap(col * n + j, p * n + j);
        }
        let piv = m.at(col, col);
        for j in 0..n {
            m.d[col * n + j] /= piv;
            x.d[col * n + j] /= piv;
        }
        for i in 0..n {
            if i != col {
                let f = m.at(i, col);
                for j in 0..n {
                    let (mv, xv) = (m.at(col, j), x.at(col, j));
                    m.d[i * n + j] -= f * mv;
                    x.d[i * n + j] -= f * xv;
                }
            }
        }
    }
    x
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(a: &M) -> C64 {
    let n = a.r;
    let mut m = a.clone();
    let mut d = C64::new(1.0, 0.0);
    for col in 0..n {
        let p = (col..n)
            .max_by(|&i, &j| m.at(i, col).norm().total_cmp(&m.at(j, col).norm()))
            .unwrap();
        if m.at(p, col).norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if p != col {
            for j in 0..n {
                m.d.swap(col * n + j, p * n + j);
            }
            d = -d;
        }
        let piv = m.at(col, col);
        d *= piv;
        for i in col + 1..n {
            let f = m.at(i, col) / piv;
            for j in col..n {
                let v = m.at(col, j);
                m.d[i * n + j] -= f * v;
            }
        }
    }
    d
}

/// Checks that `roots` is the spectrum of `a` by comparing `det(zI - a)`
/// with `prod(z - root)` at `2n + 1` points on a circle enclosing both
/// sets. Two monic degree-`n` polynomials agreeing at more than `n` points
/// are equal. Returns the worst relative discrepancy.
pub fn charpoly_mismatch(a: &M, roots: &[C64]) -> f64 {
    let n = a.r;
    assert_eq!(roots.len(), n);
    let radius = 1.5 * roots.iter().map(|z| z.norm()).fold(a.norm1(), f64::max) + 1.0;
    let mut worst: f64 = 0.0;
    for k in 0..(2 * n + 1) {
        let z = C64::from_polar(radius, 2.0 * PI * (k as f64 + 0.37) / (2 * n + 1) as f64);
        let lhs = det(&M::eye(n).scale(z).sub(a));
        let rhs: C64 = roots.iter().map(|r| z - r).product();
        worst = worst.max((lhs - rhs).norm() / rhs.norm());
    }
    worst
}

/// Largest pairing distance after greedy nearest matching.
pub fn spectrum_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

/// Matrix exponential by Taylor series with scaling and squaring.
pub fn expm_taylor(a: &M) -> M {
    let norm = a.norm1();
    let s = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
    let scaled = a.scale(C64::new(0.5f64.powi(s), 0.0));
    let mut term = M::eye(a.r);
    let mut sum = M::eye(a.r);
    for k in 1..30 {
        term = term.mul(&scaled).scale(C64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term);
    }
    for _ in 0..s {
        sum = sum.mul(&sum);
    }
    sum
}

/// Classical RK4 for `x' = a x + g` with fixed step, returning `x(t)`.
pub fn rk4(a: &M, g: &M, x0: &M, t: f64, h: f64) -> M {
    let steps = (t / h).round() as usize;
    let n = a.r;
    // flat real arithmetic keeps the oracle fast in debug builds
    let ar: Vec<f64> = a.d.iter().map(|z| z.re).collect();
    let gr: Vec<f64> = g.d.iter().map(|z| z.re).collect();
    let mut x: Vec<f64> = x0.d.iter().map(|z| z.re).collect();
    let f = |x: &[f64], out: &mut [f64]| {
        for i in 0..n {
            let mut s = gr[i];
            let row = &ar[i * n..(i + 1) * n];
            for j in 0..n {
                s += row[j] * x[j];
            }
            out[i] = s;
        }
    };
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for _ in 0..steps {
        f(&x, &mut k1);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        f(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        f(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + h * k3[i];
        }
        f(&tmp, &mut k4);
        for i in 0..n {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    M::from_real(n, 1, &x)
}

/// Rank by Gaussian elimination with full pivoting and relative cutoff.
pub fn rank(a: &M, tol: f64) -> usize {
    let mut m = a.clone();
    let scale = m.d.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let (r, c) = (m.r, m.c);
    let mut rank = 0;
    let mut used_cols = vec![false; c];
    for row in 0..r {
        let mut best = (0, 0, 0.0);
        for i in row..r {
            for j in 0..c {
                if !used_cols[j] && m.at(i, j).norm() > best.2 {
                    best = (i, j, m.at(i, j).norm());
                }
            }
        }
        if best.2 <= tol * scale {
            break;
        }
        let (p, q, _) = best;
        for j in 0..c {
            m.d.swap(row * c + j, p * c + j);
        }
        used_cols[q] = true;
        let piv = m.at(row, q);
        for i in row + 1..r {
            let f = m.at(i, q) / piv;
            for j in 0..c {
                let v = m.at(row, j);
                m.d[i * c + j] -= f * v;
            }
        }
        rank += 1;
    }
    rank
}

pub fn normal(r: &mut StdRng) -> f64 {
    // Box-Muller
    let u1: f64 = r.gen_range(f64::EPSILON..1.0);
    let u2: f64 = r.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

pub fn random_tensor(r: &mut StdRng, rows: usize, cols: usize, tubes: usize) -> Tensor {
    let data: Vec<f64> = (0..rows * cols * tubes).map(|_| normal(r)).collect();
    Tensor::from_real(rows, cols, tubes, &data).unwrap()
}

pub fn random_complex_tensor(r: &mut StdRng, rows: usize, cols: usize, tubes: usize) -> Tensor {
    Tensor::from_fn(rows, cols, tubes, |_, _, _| C64::new(normal(r), normal(r))).unwrap()
}

pub fn random_matrix(r: &mut StdRng, rows: usize, cols: usize) -> M {
    M::from_real(rows, cols, &(0..rows * cols).map(|_| normal(r)).collect::<Vec<_>>())
}

/// Well-conditioned eigenvector matrix: identity plus a small perturbation.
fn near_identity(r: &mut StdRng, n: usize, complex: bool) -> M {
    let mut v = M::eye(n);
    for z in v.d.iter_mut() {
        *z += C64::new(0.3 * normal(r), if complex { 0.3 * normal(r) } else { 0.0 });
    }
    v
}

/// A real tensor built from prescribed DFT-domain spectra.
pub struct KnownSpectrum {
    pub tensor: Tensor,
    /// Eigenvalues of DFT-domain slice `i`, unordered.
    pub spectra: Vec<Vec<C64>>,
}

impl KnownSpectrum {
    pub fn abscissa(&self) -> f64 {
        self.spectra.iter().flatten().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Random real `n x n x l` tensor whose slices `D_i = V_i L_i V_i^-1` have
/// eigenvalues with real parts in `[re_lo, re_hi]`; one eigenvalue sits at
/// `re_hi` exactly when `pin_top` holds.
pub fn known_spectrum(
    r: &mut StdRng,
    n: usize,
    l: usize,
    re_lo: f64,
    re_hi: f64,
    pin_top: bool,
) -> KnownSpectrum {
    let mut blocks: Vec<Option<M>> = vec![None; l];
    let mut spectra: Vec<Vec<C64>> = vec![Vec::new(); l];
    for i in 0..l {
        let p = (l - i) % l;
        if p < i {
            let d = blocks[p].clone().unwrap();
            let mut dc = d.clone();
            dc.d.iter_mut().for_each(|z| *z = z.conj());
            blocks[i] = Some(dc);
            spectra[i] = spectra[p].iter().map(|z| z.conj()).collect();
            continue;
        }
        let self_paired = p == i;
        let vals: Vec<C64> = (0..n)
            .map(|_| {
                let re = r.gen_range(re_lo..=re_hi);
                let im = if self_paired { 0.0 } else { r.gen_range(-3.0..3.0) };
                C64::new(re, im)
            })
            .collect();
        let v = near_identity(r, n, !self_paired);
        let mut lam = M::zeros(n, n);
        for (j, z) in vals.iter().enumerate() {
            lam.set(j, j, *z);
        }
        blocks[i] = Some(v.mul(&lam).mul(&inv(&v)));
        spectra[i] = vals;
    }
    if pin_top {
        // shift slice 0 so its top eigenvalue lands exactly at re_hi; the
        // other slices are already bounded by re_hi
        let top = spectra[0].iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let shift = re_hi - top;
        let d0 = blocks[0].take().unwrap();
        blocks[0] = Some(d0.add(&M::eye(n).scale(C64::new(shift, 0.0))));
        spectra[0].iter_mut().for_each(|z| z.re += shift);
    }
    let blocks: Vec<M> = blocks.into_iter().map(Option::unwrap).collect();
    let t = from_blocks(&blocks);
    // drop the rounding-level imaginary parts of a conjugate-symmetric IDFT
    let re: Vec<f64> = (0..t.tubes())
        .flat_map(|k| {
            let t = &t;
            (0..t.rows()).flat_map(move |i| (0..t.cols()).map(move |j| (i, j, k)))
        })
        .map(|(i, j, k)| {
            let z = t.get(i, j, k);
            assert!(z.im.abs() < 1e-10, "oracle construction is not real");
            z.re
        })
        .collect();
    KnownSpectrum {
        tensor: Tensor::from_real(n, n, l, &re).unwrap(),
        spectra,
    }
}

/// Reference system with dynamics `[[-6,5],[-10,0]] | [[0,2],[8,2]]` and
/// equal input slices `[1;1]`.
pub fn reference_a() -> Tensor {
    Tensor::from_real_slices(&[
        vec![vec![-6.0, 5.0], vec![-10.0, 0.0]],
        vec![vec![0.0, 2.0], vec![8.0, 2.0]],
    ])
    .unwrap()
}

pub fn reference_b() -> Tensor {
    Tensor::from_real_slices(&[vec![vec![1.0], vec![1.0]], vec![vec![1.0], vec![1.0]]]).unwrap()
}

pub fn reference_system() -> mlti::System {
    mlti::System::new(reference_a(), reference_b()).unwrap()
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn tensor_rel(a: &Tensor, b: &Tensor) -> f64 {
    let (sa, sb) = (slices(a), slices(b));
    let num: f64 = sa.iter().zip(&sb).map(|(x, y)| x.sub(y).fro().powi(2)).sum::<f64>().sqrt();
    let den: f64 = sb.iter().map(|y| y.fro().powi(2)).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}
