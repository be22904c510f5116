//! Third-order tensors and the t-product algebra.
//!
//! A [`Tensor3`] is stored frontal-slice-major: slice `k` occupies a
//! contiguous `rows x cols` row-major block. Tubes are strided.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matfun::{self, DenseMatrix};
use crate::scalar::{cone, czero, is_finite_c, Real};
use crate::spectral;

/// Tube count at and above which [`tprod`] goes through the DFT domain.
pub const DEFAULT_FFT_CROSSOVER: usize = 16;

/// Reciprocal condition below which a spectral slice is treated as singular.
pub const SINGULAR_RCOND: f64 = 1e-12;

/// Dense `rows x cols x tubes` array of complex entries. A tensor whose
/// imaginary parts are all exactly zero reports [`Tensor3::is_real`].
#[derive(Clone, PartialEq)]
pub struct Tensor3<T> {
    rows: usize,
    cols: usize,
    tubes: usize,
    data: Vec<Complex<T>>,
    real: bool,
}

impl<T: Real> Tensor3<T> {
    /// Builds a tensor from frontal-slice-major complex data.
    pub fn new(rows: usize, cols: usize, tubes: usize, data: Vec<Complex<T>>) -> Result<Self> {
        check_dims(rows, cols, tubes)?;
        if data.len() != rows * cols * tubes {
            return Err(Error::ShapeMismatch(format!(
                "{} entries supplied for a {rows}x{cols}x{tubes} tensor",
                data.len()
            )));
        }
        if !data.iter().all(|&z| is_finite_c(z)) {
            return Err(Error::NonFinite("tensor construction"));
        }
        let real = data.iter().all(|z| z.im == T::zero());
        Ok(Self {
            rows,
            cols,
            tubes,
            data,
            real,
        })
    }

    /// Builds a real tensor from frontal-slice-major data.
    pub fn from_real(rows: usize, cols: usize, tubes: usize, data: &[T]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            tubes,
            data.iter().map(|&x| Complex::new(x, T::zero())).collect(),
        )
    }

    /// Stacks equally sized matrices as frontal slices 1..n.
    pub fn from_slices(slices: &[DenseMatrix<T>]) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| Error::ShapeMismatch("no frontal slices".into()))?;
        let (rows, cols) = first.shape();
        if slices.iter().any(|s| s.shape() != (rows, cols)) {
            return Err(Error::ShapeMismatch("frontal slices differ in shape".into()));
        }
        let mut data = Vec::with_capacity(rows * cols * slices.len());
        for s in slices {
            data.extend_from_slice(s.as_slice());
        }
        Self::new(rows, cols, slices.len(), data)
    }

    /// Builds a real tensor from per-slice lists of rows.
    pub fn from_real_slices(slices: &[Vec<Vec<T>>]) -> Result<Self> {
        let mats: Vec<DenseMatrix<T>> = slices
            .iter()
            .map(|rows| {
                let c = rows.first().map_or(0, Vec::len);
                if rows.iter().any(|r| r.len() != c) {
                    return Err(Error::ShapeMismatch("ragged frontal slice".into()));
                }
                let flat: Vec<T> = rows.iter().flatten().copied().collect();
                DenseMatrix::from_real(rows.len(), c, &flat)
            })
            .collect::<Result<_>>()?;
        Self::from_slices(&mats)
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        tubes: usize,
        mut f: impl FnMut(usize, usize, usize) -> Complex<T>,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols * tubes);
        for k in 0..tubes {
            for r in 0..rows {
                for c in 0..cols {
                    data.push(f(r, c, k));
                }
            }
        }
        Self::new(rows, cols, tubes, data)
    }

    /// Zero tensor. Panics when a dimension is zero.
    pub fn zeros(rows: usize, cols: usize, tubes: usize) -> Self {
        check_dims(rows, cols, tubes).expect("tensor dimensions must be positive");
        Self {
            rows,
            cols,
            tubes,
            data: vec![czero(); rows * cols * tubes],
            real: true,
        }
    }

    /// Identity tensor: first frontal slice `I_m`, the rest zero.
    pub fn identity(m: usize, tubes: usize) -> Self {
        let mut t = Self::zeros(m, m, tubes);
        for i in 0..m {
            t.data[i * m + i] = cone();
        }
        t
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn tubes(&self) -> usize {
        self.tubes
    }

    /// `(rows, cols, tubes)`.
    #[inline]
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.rows, self.cols, self.tubes)
    }

    #[inline]
    pub fn is_real(&self) -> bool {
        self.real
    }

    #[inline]
    fn offset(&self, r: usize, c: usize, k: usize) -> usize {
        k * self.rows * self.cols + r * self.cols + c
    }

    /// Entry `(row, col, tube)`, zero-based.
    #[inline]
    pub fn get(&self, r: usize, c: usize, k: usize) -> Complex<T> {
        self.data[self.offset(r, c, k)]
    }

    /// Frontal-slice-major entries.
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    /// Real parts of frontal-slice-major entries.
    pub fn real_parts(&self) -> Vec<T> {
        self.data.iter().map(|z| z.re).collect()
    }

    /// Frontal slice `k` (zero-based).
    pub fn frontal_slice(&self, k: usize) -> DenseMatrix<T> {
        let n = self.rows * self.cols;
        DenseMatrix::from_vec(self.rows, self.cols, self.data[k * n..(k + 1) * n].to_vec())
            .expect("slice shape")
    }

    pub fn frontal_slices(&self) -> Vec<DenseMatrix<T>> {
        (0..self.tubes).map(|k| self.frontal_slice(k)).collect()
    }

    /// Lateral slice `j` as a `rows x 1 x tubes` tensor.
    pub fn lateral_slice(&self, j: usize) -> Self {
        assert!(j < self.cols, "lateral slice out of range");
        let data = (0..self.tubes)
            .flat_map(|k| (0..self.rows).map(move |r| (r, k)))
            .map(|(r, k)| self.get(r, j, k))
            .collect();
        Self::with_data(self.rows, 1, self.tubes, data)
    }

    /// Tube `(r, c)` as a tubal scalar.
    pub fn tube(&self, r: usize, c: usize) -> TubalScalar<T> {
        TubalScalar::from_complex((0..self.tubes).map(|k| self.get(r, c, k)).collect())
            .expect("non-empty tube")
    }

    /// Lateral concatenation `[t_1, t_2, ...]` along the column mode.
    pub fn concat_lateral(parts: &[Self]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::ShapeMismatch("nothing to concatenate".into()))?;
        let (rows, _, tubes) = first.shape();
        if parts.iter().any(|p| p.rows != rows || p.tubes != tubes) {
            return Err(Error::ShapeMismatch(
                "lateral concatenation needs equal rows and tubes".into(),
            ));
        }
        let slices: Vec<DenseMatrix<T>> = (0..tubes)
            .map(|k| {
                let blocks: Vec<_> = parts.iter().map(|p| p.frontal_slice(k)).collect();
                DenseMatrix::hstack(&blocks)
            })
            .collect::<Result<_>>()?;
        Self::from_slices(&slices)
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Frobenius norm of the imaginary parts.
    pub fn imaginary_norm(&self) -> T {
        self.data.iter().map(|z| z.im * z.im).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::with_data(
            self.rows,
            self.cols,
            self.tubes,
            self.data.iter().map(|&z| z * s).collect(),
        )
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self::with_data(
            self.rows,
            self.cols,
            self.tubes,
            self.data.iter().map(|z| z.conj()).collect(),
        )
    }

    /// `||self - other||_F / max(||other||_F, tiny)`.
    pub fn relative_error(&self, other: &Self) -> T {
        let diff = (self - other).frobenius_norm();
        let denom = other.frobenius_norm();
        if denom == T::zero() {
            diff
        } else {
            diff / denom
        }
    }

    /// Assembles from raw data, recomputing the realness flag.
    pub(crate) fn with_data(rows: usize, cols: usize, tubes: usize, data: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(data.len(), rows * cols * tubes);
        let real = data.iter().all(|z| z.im == T::zero());
        Self {
            rows,
            cols,
            tubes,
            data,
            real,
        }
    }

    pub(crate) fn ensure_finite(self, op: &'static str) -> Result<Self> {
        if self.data.iter().all(|&z| is_finite_c(z)) {
            Ok(self)
        } else {
            Err(Error::NonFinite(op))
        }
    }

    /// Drops imaginary parts, marking the tensor real.
    pub(crate) fn into_real_part(mut self) -> Self {
        for z in &mut self.data {
            z.im = T::zero();
        }
        self.real = true;
        self
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        assert_eq!(self.shape(), rhs.shape(), "elementwise shape mismatch");
        Self::with_data(
            self.rows,
            self.cols,
            self.tubes,
            self.data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }
}

fn check_dims(rows: usize, cols: usize, tubes: usize) -> Result<()> {
    if rows == 0 || cols == 0 || tubes == 0 {
        return Err(Error::ShapeMismatch(format!(
            "tensor dimensions must be positive, got {rows}x{cols}x{tubes}"
        )));
    }
    Ok(())
}

/// Entrywise sum; panics on shape mismatch.
impl<T: Real> Add for &Tensor3<T> {
    type Output = Tensor3<T>;

    fn add(self, rhs: Self) -> Tensor3<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

/// Entrywise difference; panics on shape mismatch.
impl<T: Real> Sub for &Tensor3<T> {
    type Output = Tensor3<T>;

    fn sub(self, rhs: Self) -> Tensor3<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<T: Real> Neg for &Tensor3<T> {
    type Output = Tensor3<T>;

    fn neg(self) -> Tensor3<T> {
        self.scale_real(-T::one())
    }
}

impl<T: Real> fmt::Debug for Tensor3<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "Tensor3 {}x{}x{} ({})",
            self.rows,
            self.cols,
            self.tubes,
            if self.real { "real" } else { "complex" }
        )?;
        for k in 0..self.tubes {
            writeln!(f, "slice {}: {:?}", k + 1, self.frontal_slice(k))?;
        }
        Ok(())
    }
}

/// A `1 x 1 x n` tube; the scalar of the t-product ring.
#[derive(Clone, Debug, PartialEq)]
pub struct TubalScalar<T> {
    data: Vec<Complex<T>>,
}

impl<T: Real> TubalScalar<T> {
    pub fn from_complex(data: Vec<Complex<T>>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::ShapeMismatch("tubal scalar must be non-empty".into()));
        }
        Ok(Self { data })
    }

    pub fn from_real(data: &[T]) -> Result<Self> {
        Self::from_complex(data.iter().map(|&x| Complex::new(x, T::zero())).collect())
    }

    pub fn zero(tubes: usize) -> Self {
        assert!(tubes > 0, "tube length must be positive");
        Self {
            data: vec![czero(); tubes],
        }
    }

    /// Multiplicative identity `e_1 = (1, 0, ..., 0)`.
    pub fn unit(tubes: usize) -> Self {
        let mut t = Self::zero(tubes);
        t.data[0] = cone();
        t
    }

    pub fn tubes(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == T::zero())
    }
}

impl<T: Real> From<TubalScalar<T>> for Tensor3<T> {
    fn from(t: TubalScalar<T>) -> Self {
        let n = t.data.len();
        Tensor3::with_data(1, 1, n, t.data)
    }
}

impl<T: Real> TryFrom<Tensor3<T>> for TubalScalar<T> {
    type Error = Error;

    fn try_from(t: Tensor3<T>) -> Result<Self> {
        if t.rows != 1 || t.cols != 1 {
            return Err(Error::ShapeMismatch(format!(
                "a {}x{}x{} tensor is not a tubal scalar",
                t.rows, t.cols, t.tubes
            )));
        }
        Ok(Self { data: t.data })
    }
}

/// Block circulant matrix of a tensor, `(rows * tubes) x (cols * tubes)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockCirculant<T: Real> {
    block_rows: usize,
    block_cols: usize,
    tubes: usize,
    matrix: DenseMatrix<T>,
}

impl<T: Real> BlockCirculant<T> {
    pub fn block_rows(&self) -> usize {
        self.block_rows
    }

    pub fn block_cols(&self) -> usize {
        self.block_cols
    }

    pub fn tubes(&self) -> usize {
        self.tubes
    }

    /// Block `(i, j)`, zero-based.
    pub fn block(&self, i: usize, j: usize) -> DenseMatrix<T> {
        self.matrix.block(
            i * self.block_rows,
            j * self.block_cols,
            self.block_rows,
            self.block_cols,
        )
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix<T> {
        self.matrix
    }
}

/// Block circulant expansion: block `(i, j)` is frontal slice `(i - j) mod n`.
pub fn bcirc<T: Real>(t: &Tensor3<T>) -> BlockCirculant<T> {
    let (l, m, n) = t.shape();
    let mut matrix = DenseMatrix::zeros(l * n, m * n);
    let slices = t.frontal_slices();
    for i in 0..n {
        for j in 0..n {
            matrix.set_block(i * l, j * m, &slices[(i + n - j) % n]);
        }
    }
    BlockCirculant {
        block_rows: l,
        block_cols: m,
        tubes: n,
        matrix,
    }
}

/// Stacks the frontal slices into a `(rows * tubes) x cols` block column.
pub fn matvec_unfold<T: Real>(t: &Tensor3<T>) -> DenseMatrix<T> {
    DenseMatrix::from_vec(t.rows * t.tubes, t.cols, t.data.clone()).expect("unfold shape")
}

/// Inverse of [`matvec_unfold`].
pub fn fold<T: Real>(m: &DenseMatrix<T>, rows: usize, tubes: usize) -> Result<Tensor3<T>> {
    if rows == 0 || tubes == 0 || m.rows() != rows * tubes {
        return Err(Error::ShapeMismatch(format!(
            "cannot fold a {}x{} matrix into {rows} rows by {tubes} tubes",
            m.rows(),
            m.cols()
        )));
    }
    Tensor3::new(rows, m.cols(), tubes, m.as_slice().to_vec())
}

fn check_product_shapes<T: Real>(a: &Tensor3<T>, b: &Tensor3<T>) -> Result<()> {
    if a.cols != b.rows || a.tubes != b.tubes {
        return Err(Error::ShapeMismatch(format!(
            "t-product of {}x{}x{} and {}x{}x{}",
            a.rows, a.cols, a.tubes, b.rows, b.cols, b.tubes
        )));
    }
    Ok(())
}

/// The t-product `a * b`, using the default DFT crossover.
pub fn tprod<T: Real>(a: &Tensor3<T>, b: &Tensor3<T>) -> Result<Tensor3<T>> {
    tprod_with(a, b, DEFAULT_FFT_CROSSOVER)
}

/// The t-product with an explicit crossover: tube counts at or above
/// `fft_crossover` multiply slice-wise in the DFT domain, smaller ones use
/// direct circular convolution of frontal slices.
pub fn tprod_with<T: Real>(
    a: &Tensor3<T>,
    b: &Tensor3<T>,
    fft_crossover: usize,
) -> Result<Tensor3<T>> {
    check_product_shapes(a, b)?;
    let out = if a.tubes >= fft_crossover {
        let sa = spectral::to_spectral(a);
        let sb = spectral::to_spectral(b);
        spectral::from_spectral(&sa.product(&sb)?)?
    } else {
        circular_convolution(a, b)
    };
    out.ensure_finite("t-product")
}

fn circular_convolution<T: Real>(a: &Tensor3<T>, b: &Tensor3<T>) -> Tensor3<T> {
    let n = a.tubes;
    let sa = a.frontal_slices();
    let sb = b.frontal_slices();
    let slices: Vec<DenseMatrix<T>> = (0..n)
        .map(|k| {
            let mut acc = DenseMatrix::zeros(a.rows, b.cols);
            for j in 0..n {
                acc = &acc + &(&sa[j] * &sb[(k + n - j) % n]);
            }
            acc
        })
        .collect();
    Tensor3::from_slices(&slices).expect("convolution shape")
}

/// Tensor transpose: every frontal slice transposed, slices 2..n reversed.
pub fn ttranspose<T: Real>(t: &Tensor3<T>) -> Tensor3<T> {
    let n = t.tubes;
    let slices: Vec<DenseMatrix<T>> = (0..n)
        .map(|k| t.frontal_slice((n - k) % n).transpose())
        .collect();
    Tensor3::from_slices(&slices).expect("transpose shape")
}

/// Conjugate tensor transpose.
pub fn tadjoint<T: Real>(t: &Tensor3<T>) -> Tensor3<T> {
    ttranspose(t).conj()
}

/// Identity tensor, `m x m x tubes`.
pub fn identity_tensor<T: Real>(m: usize, tubes: usize) -> Tensor3<T> {
    Tensor3::identity(m, tubes)
}

/// Tensor inverse with the default singularity threshold.
pub fn tinv<T: Real>(a: &Tensor3<T>) -> Result<Tensor3<T>> {
    tinv_with(a, T::lit(SINGULAR_RCOND))
}

/// Tensor inverse by per-slice inversion in the DFT domain. A slice whose
/// reciprocal condition falls below `min_rcond` is reported as singular.
pub fn tinv_with<T: Real>(a: &Tensor3<T>, min_rcond: T) -> Result<Tensor3<T>> {
    if a.rows != a.cols {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let s = spectral::to_spectral(a);
    let inverted = s.try_map(|i, d| {
        let (inv, rc) = matfun::inverse_with_rcond(d)?;
        match inv {
            Some(inv) if rc >= min_rcond => Ok(inv),
            _ => Err(Error::SingularTensor {
                slice: i + 1,
                rcond: rc.to_f64_lossy(),
            }),
        }
    })?;
    spectral::from_spectral(&inverted)?.ensure_finite("tensor inverse")
}

/// Product in the ring of tubal scalars (circular convolution).
pub fn tubal_mult<T: Real>(a: &TubalScalar<T>, b: &TubalScalar<T>) -> Result<TubalScalar<T>> {
    if a.tubes() != b.tubes() {
        return Err(Error::ShapeMismatch(format!(
            "tubal scalars of length {} and {}",
            a.tubes(),
            b.tubes()
        )));
    }
    let prod = tprod(&a.clone().into(), &b.clone().into())?;
    TubalScalar::try_from(prod)
}
