//! The DFT-domain view of a tensor and everything built on it: the
//! block diagonalization of `bcirc`, the t-eigendecomposition,
//! eigentuples and tubal rank.
//!
//! Forward transforms along the tube mode are unnormalized with
//! `omega = exp(-2 pi i / n)`; inverse transforms carry the `1/n`.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::matfun::{self, DenseMatrix};
use crate::scalar::Real;
use crate::tensor::{Tensor3, TubalScalar};

pub use crate::matfun::eig::{sort_eigenvalues, ORDER_TIE_TOL};

/// Imaginary residue (relative to the result norm) tolerated when realizing
/// the inverse transform of conjugate-symmetric data.
pub const REAL_RESIDUE_TOL: f64 = 1e-9;

/// Relative mismatch under which slices `i` and `n - i` count as conjugates.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Eigenvector reciprocal condition below which a slice is defective.
pub const DEFECTIVE_RCOND: f64 = 1e-10;

/// Default relative threshold for nonzero Fourier coefficients.
pub const TUBAL_RANK_TOL: f64 = 1e-10;

/// How per-slice factors are turned back into a tensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Assembly {
    /// Inverse DFT with the `1/n` factor; exact inverse of [`to_spectral`].
    NormalizedIdft,
    /// Unnormalized forward transform of the slice sequence (the sum and
    /// difference rule for two tubes). Kept to reproduce published gains.
    PaperCompat,
}

/// Index of the slice conjugate to slice `i` for a real source, zero-based.
#[inline]
pub fn conjugate_partner(i: usize, tubes: usize) -> usize {
    (tubes - i) % tubes
}

/// Transforms every tube of frontal-slice-major data in place.
fn transform_tubes<T: Real>(data: &mut [Complex<T>], plane: usize, tubes: usize, inverse: bool) {
    if tubes == 1 {
        return;
    }
    let mut planner = FftPlanner::<T>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(tubes)
    } else {
        planner.plan_fft_forward(tubes)
    };
    let mut buf = vec![Complex::new(T::zero(), T::zero()); tubes];
    let scale = T::one() / T::of_usize(tubes);
    for p in 0..plane {
        for k in 0..tubes {
            buf[k] = data[k * plane + p];
        }
        fft.process(&mut buf);
        for k in 0..tubes {
            data[k * plane + p] = if inverse { buf[k] * scale } else { buf[k] };
        }
    }
}

/// Unnormalized forward DFT of a sequence.
pub fn dft<T: Real>(x: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut v = x.to_vec();
    transform_tubes(&mut v, 1, x.len(), false);
    v
}

/// Inverse DFT (with `1/n`) of a sequence.
pub fn idft<T: Real>(x: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut v = x.to_vec();
    transform_tubes(&mut v, 1, x.len(), true);
    v
}

/// Ordered DFT-domain slices `D_1..D_n` of a tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralForm<T: Real> {
    rows: usize,
    cols: usize,
    slices: Vec<DenseMatrix<T>>,
    hermitian: bool,
}

impl<T: Real> SpectralForm<T> {
    /// Wraps explicit slices. Conjugate symmetry (`D_{n-i} = conj(D_i)`) is
    /// detected within [`HERMITIAN_TOL`]; when present, inverse transforms
    /// produce real tensors.
    pub fn from_slices(slices: Vec<DenseMatrix<T>>) -> Result<Self> {
        let first = slices
            .first()
            .ok_or_else(|| Error::ShapeMismatch("no spectral slices".into()))?;
        let (rows, cols) = first.shape();
        if rows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch("empty spectral slice".into()));
        }
        if slices.iter().any(|s| s.shape() != (rows, cols)) {
            return Err(Error::ShapeMismatch("spectral slices differ in shape".into()));
        }
        let hermitian = is_conjugate_symmetric(&slices);
        Ok(Self {
            rows,
            cols,
            slices,
            hermitian,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn tubes(&self) -> usize {
        self.slices.len()
    }

    pub fn slices(&self) -> &[DenseMatrix<T>] {
        &self.slices
    }

    pub fn slice(&self, i: usize) -> &DenseMatrix<T> {
        &self.slices[i]
    }

    pub fn into_slices(self) -> Vec<DenseMatrix<T>> {
        self.slices
    }

    /// Whether the slice sequence is conjugate symmetric, i.e. the spectrum
    /// of a real tensor.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Slice-wise product; the spectral image of the t-product.
    pub fn product(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows || self.tubes() != rhs.tubes() {
            return Err(Error::ShapeMismatch(format!(
                "spectral product of {}x{}x{} and {}x{}x{}",
                self.rows,
                self.cols,
                self.tubes(),
                rhs.rows,
                rhs.cols,
                rhs.tubes()
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: rhs.cols,
            slices: self
                .slices
                .iter()
                .zip(&rhs.slices)
                .map(|(a, b)| a * b)
                .collect(),
            hermitian: self.hermitian && rhs.hermitian,
        })
    }

    /// Maps every slice. `preserves_symmetry` declares that `f` commutes
    /// with conjugation (a real-coefficient function), so a real source
    /// keeps a real image.
    pub fn map_slices(
        &self,
        preserves_symmetry: bool,
        mut f: impl FnMut(usize, &DenseMatrix<T>) -> Result<DenseMatrix<T>>,
    ) -> Result<Self> {
        let slices: Vec<DenseMatrix<T>> = self
            .slices
            .iter()
            .enumerate()
            .map(|(i, d)| f(i, d))
            .collect::<Result<_>>()?;
        let (rows, cols) = slices[0].shape();
        if slices.iter().any(|s| s.shape() != (rows, cols)) {
            return Err(Error::ShapeMismatch("mapped slices differ in shape".into()));
        }
        Ok(Self {
            rows,
            cols,
            slices,
            hermitian: self.hermitian && preserves_symmetry,
        })
    }

    pub(crate) fn try_map(
        &self,
        f: impl FnMut(usize, &DenseMatrix<T>) -> Result<DenseMatrix<T>>,
    ) -> Result<Self> {
        self.map_slices(true, f)
    }

    /// Assembles a tensor from the slices under the given convention.
    pub fn assemble(&self, assembly: Assembly) -> Result<Tensor3<T>> {
        match assembly {
            Assembly::NormalizedIdft => from_spectral(self),
            Assembly::PaperCompat => {
                let mut data = stack(&self.slices);
                transform_tubes(&mut data, self.rows * self.cols, self.tubes(), false);
                let t = Tensor3::new(self.rows, self.cols, self.tubes(), data)?;
                if self.hermitian {
                    realize(t)
                } else {
                    Ok(t)
                }
            }
        }
    }
}

fn stack<T: Real>(slices: &[DenseMatrix<T>]) -> Vec<Complex<T>> {
    let mut data = Vec::with_capacity(slices.iter().map(|s| s.as_slice().len()).sum());
    for s in slices {
        data.extend_from_slice(s.as_slice());
    }
    data
}

fn is_conjugate_symmetric<T: Real>(slices: &[DenseMatrix<T>]) -> bool {
    let n = slices.len();
    let scale = slices
        .iter()
        .map(|s| s.max_abs())
        .fold(T::zero(), T::max);
    let tol = T::lit(HERMITIAN_TOL) * scale;
    (0..n).all(|i| {
        let j = conjugate_partner(i, n);
        slices[i]
            .as_slice()
            .iter()
            .zip(slices[j].as_slice())
            .all(|(a, b)| (a - b.conj()).norm() <= tol)
    })
}

/// Drops the imaginary part of a tensor known to be real up to rounding.
pub fn realize<T: Real>(t: Tensor3<T>) -> Result<Tensor3<T>> {
    if t.is_real() {
        return Ok(t);
    }
    let residue = t.imaginary_norm();
    let norm = t.frobenius_norm();
    if residue > T::lit(REAL_RESIDUE_TOL) * norm {
        return Err(Error::Consistency {
            residue: residue.to_f64_lossy(),
            norm: norm.to_f64_lossy(),
        });
    }
    Ok(t.into_real_part())
}

/// Forward DFT along tubes; slice `i` equals `sum_k T^(k) omega^(i k)`.
pub fn to_spectral<T: Real>(t: &Tensor3<T>) -> SpectralForm<T> {
    let (rows, cols, tubes) = t.shape();
    let plane = rows * cols;
    let mut data = t.as_slice().to_vec();
    transform_tubes(&mut data, plane, tubes, false);
    let slices = data
        .chunks(plane)
        .map(|c| DenseMatrix::from_vec(rows, cols, c.to_vec()).expect("slice shape"))
        .collect();
    SpectralForm {
        rows,
        cols,
        slices,
        hermitian: t.is_real(),
    }
}

/// Inverse DFT along tubes. Conjugate-symmetric input yields a real tensor
/// once the rounding residue is checked and dropped.
pub fn from_spectral<T: Real>(s: &SpectralForm<T>) -> Result<Tensor3<T>> {
    let mut data = stack(&s.slices);
    transform_tubes(&mut data, s.rows * s.cols, s.tubes(), true);
    let t = Tensor3::new(s.rows, s.cols, s.tubes(), data)?;
    if s.hermitian {
        realize(t)
    } else {
        Ok(t)
    }
}

/// The t-eigendecomposition `A = P * D * P^-1`.
#[derive(Clone, Debug)]
pub struct TEig<T: Real> {
    /// Eigenmatrix tensor; lateral slice `j` is the `j`-th eigenmatrix.
    pub p: Tensor3<T>,
    /// f-diagonal tensor; diagonal tube `j` is the `j`-th eigentuple.
    pub d: Tensor3<T>,
    pub pinv: Tensor3<T>,
    /// Row `i` holds the ordered eigenvalues of spectral slice `D_i`.
    pub per_slice_eigenvalues: Vec<Vec<Complex<T>>>,
}

impl<T: Real> TEig<T> {
    pub fn eigentuples(&self) -> Vec<Eigentuple<T>> {
        eigentuples(self)
    }

    /// `P * D * P^-1`.
    pub fn reconstruct(&self) -> Result<Tensor3<T>> {
        let pd = crate::tensor::tprod(&self.p, &self.d)?;
        crate::tensor::tprod(&pd, &self.pinv)
    }
}

/// Computes the t-eigendecomposition of a square-faced tensor.
pub fn teig<T: Real>(a: &Tensor3<T>) -> Result<TEig<T>> {
    if a.rows() != a.cols() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let s = to_spectral(a);
    let mut ps = Vec::with_capacity(s.tubes());
    let mut ds = Vec::with_capacity(s.tubes());
    let mut pinvs = Vec::with_capacity(s.tubes());
    let mut values = Vec::with_capacity(s.tubes());
    for (i, slice) in s.slices().iter().enumerate() {
        let e = matfun::eig(slice)?;
        let (inv, rc) = matfun::inverse_with_rcond(&e.vectors)?;
        let inv = match inv {
            Some(inv) if rc >= T::lit(DEFECTIVE_RCOND) => inv,
            _ => {
                return Err(Error::DefectiveSlice {
                    slice: i + 1,
                    rcond: rc.to_f64_lossy(),
                })
            }
        };
        ds.push(DenseMatrix::diagonal(&e.values));
        values.push(e.values);
        ps.push(e.vectors);
        pinvs.push(inv);
    }
    let assemble = |slices: Vec<DenseMatrix<T>>| -> Result<Tensor3<T>> {
        from_spectral(&SpectralForm::from_slices(slices)?)
    };
    Ok(TEig {
        p: assemble(ps)?,
        d: assemble(ds)?,
        pinv: assemble(pinvs)?,
        per_slice_eigenvalues: values,
    })
}

/// A tubal eigenvalue together with its Fourier image.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigentuple<T: Real> {
    pub tube: TubalScalar<T>,
    /// `k`-th eigenvalue of each spectral slice, slice order.
    pub spectrum: Vec<Complex<T>>,
}

impl<T: Real> Eigentuple<T> {
    pub fn from_spectrum(spectrum: Vec<Complex<T>>) -> Result<Self> {
        let tube = TubalScalar::from_complex(idft(&spectrum))?;
        Ok(Self { tube, spectrum })
    }
}

/// Eigentuples `d_k = IDFT(lambda_k^1, ..., lambda_k^n)` from the ordered
/// per-slice eigenvalues.
pub fn eigentuples<T: Real>(e: &TEig<T>) -> Vec<Eigentuple<T>> {
    eigentuples_from_table(&e.per_slice_eigenvalues)
}

/// Same as [`eigentuples`] from a per-slice eigenvalue table.
pub fn eigentuples_from_table<T: Real>(table: &[Vec<Complex<T>>]) -> Vec<Eigentuple<T>> {
    let n = table.first().map_or(0, Vec::len);
    (0..n)
        .map(|k| {
            let spectrum = table.iter().map(|row| row[k]).collect();
            Eigentuple::from_spectrum(spectrum).expect("non-empty spectrum")
        })
        .collect()
}

/// Number of Fourier coefficients above `TUBAL_RANK_TOL` times the largest.
pub fn tubal_rank<T: Real>(a: &TubalScalar<T>) -> usize {
    tubal_rank_with(a, T::lit(TUBAL_RANK_TOL))
}

pub fn tubal_rank_with<T: Real>(a: &TubalScalar<T>, tol: T) -> usize {
    let coeffs = dft(a.as_slice());
    let mags: Vec<T> = coeffs.iter().map(|z| z.norm()).collect();
    let max = mags.iter().copied().fold(T::zero(), T::max);
    if max == T::zero() {
        return 0;
    }
    mags.iter().filter(|&&m| m > tol * max).count()
}
