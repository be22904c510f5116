//! Multilinear time-invariant systems `dX/dt = A * X + B * U`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matfun::{self, DenseMatrix};
use crate::scalar::Real;
use crate::spectral::{eigentuples_from_table, to_spectral, Eigentuple};
use crate::tensor::{bcirc, fold, matvec_unfold, Tensor3};
use crate::tfunc::{tfun_apply, TensorFunction};

/// Dynamics tensor `a` (`n x n x l`) with input map `b` (`n x q x l`).
#[derive(Clone, Debug, PartialEq)]
pub struct MltiSystem<T: Real> {
    a: Tensor3<T>,
    b: Tensor3<T>,
}

impl<T: Real> MltiSystem<T> {
    pub fn new(a: Tensor3<T>, b: Tensor3<T>) -> Result<Self> {
        if a.rows() != a.cols() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        if a.rows() != b.rows() || a.tubes() != b.tubes() {
            return Err(Error::ShapeMismatch(format!(
                "input tensor {}x{}x{} does not fit dynamics {}x{}x{}",
                b.rows(),
                b.cols(),
                b.tubes(),
                a.rows(),
                a.cols(),
                a.tubes()
            )));
        }
        Ok(Self { a, b })
    }

    /// An unforced system with a single zero input column.
    pub fn autonomous(a: Tensor3<T>) -> Result<Self> {
        let b = Tensor3::zeros(a.rows(), 1, a.tubes());
        Self::new(a, b)
    }

    pub fn a(&self) -> &Tensor3<T> {
        &self.a
    }

    pub fn b(&self) -> &Tensor3<T> {
        &self.b
    }

    /// First-mode dimension `n`.
    pub fn states(&self) -> usize {
        self.a.rows()
    }

    /// Input width `q`.
    pub fn inputs(&self) -> usize {
        self.b.cols()
    }

    /// Tube length `l`.
    pub fn tubes(&self) -> usize {
        self.a.tubes()
    }

    pub fn is_real(&self) -> bool {
        self.a.is_real() && self.b.is_real()
    }

    fn check_state(&self, x: &Tensor3<T>) -> Result<()> {
        if x.rows() != self.states() || x.tubes() != self.tubes() {
            return Err(Error::ShapeMismatch(format!(
                "state {}x{}x{} does not fit a system with {} states and {} tubes",
                x.rows(),
                x.cols(),
                x.tubes(),
                self.states(),
                self.tubes()
            )));
        }
        Ok(())
    }
}

/// Piecewise-constant input samples `U(t_k)`, each `q x s x l`.
#[derive(Clone, Debug, PartialEq)]
pub enum InputSignal<T: Real> {
    Zero,
    Constant(Tensor3<T>),
    /// One sample per grid point; sample `k` is held on `[t_k, t_{k+1})`.
    Samples(Vec<Tensor3<T>>),
}

/// Strictly increasing sample times starting at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid<T: Real> {
    times: Vec<T>,
}

impl<T: Real> TimeGrid<T> {
    pub fn new(times: Vec<T>) -> Result<Self> {
        if times.first() != Some(&T::zero()) {
            return Err(Error::NonMonotoneGrid { index: 0 });
        }
        for (i, w) in times.windows(2).enumerate() {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::NonMonotoneGrid { index: i + 1 });
            }
        }
        Ok(Self { times })
    }

    /// `0, h, 2h, ...` up to `t_final`; the last interval is shortened when
    /// `t_final` is not a multiple of `step`.
    pub fn uniform(t_final: T, step: T) -> Result<Self> {
        if !(step > T::zero()) || !(t_final >= T::zero()) || !t_final.is_finite() {
            return Err(Error::NonMonotoneGrid { index: 1 });
        }
        let steps = (t_final / step).to_f64_lossy();
        let whole = steps.round();
        let mut times = vec![T::zero()];
        if (steps - whole).abs() <= 1e-9 * steps.max(1.0) {
            let count = whole as usize;
            times.extend((1..=count).map(|k| T::of_usize(k) * step));
            if let Some(last) = times.last_mut() {
                if count > 0 {
                    *last = t_final;
                }
            }
        } else {
            let count = steps.floor() as usize;
            times.extend((1..=count).map(|k| T::of_usize(k) * step));
            times.push(t_final);
        }
        Self::new(times)
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// States sampled on a time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T: Real> {
    pub times: Vec<T>,
    pub states: Vec<Tensor3<T>>,
    pub inputs: Option<Vec<Tensor3<T>>>,
}

impl<T: Real> Trajectory<T> {
    /// Frobenius norm of every snapshot.
    pub fn norms(&self) -> Vec<T> {
        self.states.iter().map(Tensor3::frobenius_norm).collect()
    }

    pub fn final_state(&self) -> &Tensor3<T> {
        self.states.last().expect("trajectory has at least one sample")
    }
}

/// `exp(A t) * x0`.
pub fn zero_input_solution<T: Real>(
    sys: &MltiSystem<T>,
    x0: &Tensor3<T>,
    t: T,
) -> Result<Tensor3<T>> {
    sys.check_state(x0)?;
    if t == T::zero() {
        return Ok(x0.clone());
    }
    tfun_apply(&sys.a, &TensorFunction::exp(t), x0)
}

/// Exact zero-order-hold step of length `h` on the expanded state
/// `MatVec(X)`: `x+ = phi x + gamma MatVec(U)`.
struct HoldStep<T: Real> {
    h: T,
    phi: DenseMatrix<T>,
    gamma: DenseMatrix<T>,
}

impl<T: Real> HoldStep<T> {
    fn new(a_c: &DenseMatrix<T>, b_c: &DenseMatrix<T>, h: T) -> Result<Self> {
        let n = a_c.rows();
        let m = b_c.cols();
        let mut aug = DenseMatrix::zeros(n + m, n + m);
        aug.set_block(0, 0, &a_c.scale_real(h));
        aug.set_block(0, n, &b_c.scale_real(h));
        let e = matfun::expm(&aug)?;
        Ok(Self {
            h,
            phi: e.block(0, 0, n, n),
            gamma: e.block(0, n, n, m),
        })
    }

    fn matches(&self, h: T) -> bool {
        (self.h - h).magnitude() <= T::lit(1e-12) * h
    }
}

/// Simulates the forced response on `grid`, holding each input sample
/// constant until the next grid point.
pub fn simulate<T: Real>(
    sys: &MltiSystem<T>,
    x0: &Tensor3<T>,
    input: &InputSignal<T>,
    grid: &TimeGrid<T>,
) -> Result<Trajectory<T>> {
    sys.check_state(x0)?;
    let s = x0.cols();
    let (q, l) = (sys.inputs(), sys.tubes());
    let check_input = |u: &Tensor3<T>| -> Result<()> {
        if u.shape() != (q, s, l) {
            return Err(Error::ShapeMismatch(format!(
                "input sample {}x{}x{} should be {q}x{s}x{l}",
                u.rows(),
                u.cols(),
                u.tubes()
            )));
        }
        Ok(())
    };
    let sample = |k: usize| -> Option<&Tensor3<T>> {
        match input {
            InputSignal::Zero => None,
            InputSignal::Constant(u) => Some(u),
            InputSignal::Samples(v) => Some(&v[k]),
        }
    };
    match input {
        InputSignal::Zero => {}
        InputSignal::Constant(u) => check_input(u)?,
        InputSignal::Samples(v) => {
            if v.len() != grid.len() {
                return Err(Error::ShapeMismatch(format!(
                    "{} input samples for {} grid points",
                    v.len(),
                    grid.len()
                )));
            }
            v.iter().try_for_each(check_input)?;
        }
    }

    let a_c = bcirc(&sys.a).into_matrix();
    let b_c = bcirc(&sys.b).into_matrix();
    let n = sys.states();
    let mut step: Option<HoldStep<T>> = None;
    let mut x = matvec_unfold(x0);
    let mut states = vec![x0.clone()];
    for (k, w) in grid.times().windows(2).enumerate() {
        let h = w[1] - w[0];
        if !step.as_ref().is_some_and(|st| st.matches(h)) {
            step = Some(HoldStep::new(&a_c, &b_c, h)?);
        }
        let st = step.as_ref().expect("step prepared");
        let mut next = &st.phi * &x;
        if let Some(u) = sample(k) {
            next = &next + &(&st.gamma * &matvec_unfold(u));
        }
        x = next;
        let mut snapshot = fold(&x, n, l)?;
        if sys.is_real() && x0.is_real() && input_is_real(input) {
            snapshot = crate::spectral::realize(snapshot)?;
        }
        states.push(snapshot.ensure_finite("simulation")?);
    }
    let inputs = match input {
        InputSignal::Zero => None,
        InputSignal::Constant(u) => Some(vec![u.clone(); grid.len()]),
        InputSignal::Samples(v) => Some(v.clone()),
    };
    Ok(Trajectory {
        times: grid.times().to_vec(),
        states,
        inputs,
    })
}

fn input_is_real<T: Real>(input: &InputSignal<T>) -> bool {
    match input {
        InputSignal::Zero => true,
        InputSignal::Constant(u) => u.is_real(),
        InputSignal::Samples(v) => v.iter().all(Tensor3::is_real),
    }
}

/// Spectral stability summary of the dynamics tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport<T: Real> {
    pub stable: bool,
    /// Row `i`: ordered eigenvalues of spectral slice `D_i`.
    pub per_slice_spectra: Vec<Vec<Complex<T>>>,
    /// Spectral abscissa, the largest real part over all slices.
    pub max_real_part: T,
    /// `-max_real_part`; positive exactly when stable.
    pub decay_rate: T,
    pub eigentuples: Vec<Eigentuple<T>>,
}

/// Exponential stability holds iff every eigenvalue of every `D_i` has
/// negative real part.
pub fn stability<T: Real>(sys: &MltiSystem<T>) -> Result<StabilityReport<T>> {
    stability_of(&sys.a)
}

/// [`stability`] for a bare dynamics tensor.
pub fn stability_of<T: Real>(a: &Tensor3<T>) -> Result<StabilityReport<T>> {
    if a.rows() != a.cols() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let spectra: Vec<Vec<Complex<T>>> = to_spectral(a)
        .slices()
        .iter()
        .map(matfun::eigenvalues)
        .collect::<Result<_>>()?;
    let max_real_part = spectra
        .iter()
        .flatten()
        .map(|z| z.re)
        .fold(T::neg_infinity(), T::max);
    Ok(StabilityReport {
        stable: max_real_part < T::zero(),
        eigentuples: eigentuples_from_table(&spectra),
        per_slice_spectra: spectra,
        max_real_part,
        decay_rate: -max_real_part,
    })
}
