//! The JSON system definition read by every subcommand.

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::control::BMode;
use crate::spectral::Assembly;
use crate::system::{InputSignal, MltiSystem};
use crate::tensor::Tensor3;

pub const SCHEMA_VERSION: u32 = 1;

/// A real tensor as `{shape: [rows, cols, tubes], slices: [[row, ...], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorSpec {
    pub shape: [usize; 3],
    pub slices: Vec<Vec<Vec<f64>>>,
}

impl TensorSpec {
    pub fn from_tensor(t: &Tensor3<f64>) -> Result<Self, CliError> {
        if !t.is_real() {
            return Err(CliError::Parse("only real tensors can be written".into()));
        }
        let slices = (0..t.tubes())
            .map(|k| {
                (0..t.rows())
                    .map(|r| (0..t.cols()).map(|c| t.get(r, c, k).re).collect())
                    .collect()
            })
            .collect();
        Ok(Self {
            shape: [t.rows(), t.cols(), t.tubes()],
            slices,
        })
    }

    /// Converts to a tensor, naming `field` in any error.
    pub fn to_tensor(&self, field: &str) -> Result<Tensor3<f64>, CliError> {
        let [rows, cols, tubes] = self.shape;
        let bad = |msg: String| CliError::Parse(format!("{field}: {msg}"));
        if rows == 0 || cols == 0 || tubes == 0 {
            return Err(bad(format!("shape {:?} has a zero dimension", self.shape)));
        }
        if self.slices.len() != tubes {
            return Err(bad(format!(
                "{} slices given, shape says {tubes}",
                self.slices.len()
            )));
        }
        for (k, s) in self.slices.iter().enumerate() {
            if s.len() != rows || s.iter().any(|row| row.len() != cols) {
                return Err(bad(format!("slice {} is not {rows}x{cols}", k + 1)));
            }
        }
        Tensor3::from_real_slices(&self.slices).map_err(|e| bad(e.to_string()))
    }
}

/// Requested closed-loop spectra and the design conventions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct DesignSpec {
    /// Per slice, `n` eigenvalues as `[re, im]`.
    pub desired: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_mode: Option<BModeName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assembly: Option<AssemblyName>,
}

impl DesignSpec {
    pub fn desired_spectra(&self) -> Vec<Vec<Complex<f64>>> {
        self.desired
            .iter()
            .map(|s| s.iter().map(|&[re, im]| Complex::new(re, im)).collect())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BModeName {
    Spectral,
    FirstBlock,
}

impl From<BModeName> for BMode {
    fn from(m: BModeName) -> Self {
        match m {
            BModeName::Spectral => BMode::Spectral,
            BModeName::FirstBlock => BMode::FirstBlock,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AssemblyName {
    NormalizedIdft,
    PaperCompat,
}

impl From<AssemblyName> for Assembly {
    fn from(m: AssemblyName) -> Self {
        match m {
            AssemblyName::NormalizedIdft => Assembly::NormalizedIdft,
            AssemblyName::PaperCompat => Assembly::PaperCompat,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputSpec {
    #[default]
    Zero,
    Constant(TensorSpec),
    /// One sample per grid point.
    Samples(Vec<TensorSpec>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct SimulateSpec {
    pub t_final: f64,
    pub step: f64,
    #[serde(default)]
    pub input: InputSpec,
    /// Simulate `A - B*K` instead of the open loop.
    #[serde(default)]
    pub closed_loop: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub schema: u32,
    pub a: TensorSpec,
    pub b: TensorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<TensorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<TensorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSpec>,
}

impl SystemFile {
    pub fn new(sys: &MltiSystem<f64>) -> Result<Self, CliError> {
        Ok(Self {
            schema: SCHEMA_VERSION,
            a: TensorSpec::from_tensor(sys.a())?,
            b: TensorSpec::from_tensor(sys.b())?,
            x0: None,
            k: None,
            design: None,
            simulate: None,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let file: Self = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        if file.schema != SCHEMA_VERSION {
            return Err(CliError::Parse(format!(
                "schema: version {} is not supported (expected {SCHEMA_VERSION})",
                file.schema
            )));
        }
        file.validate()?;
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("system file serializes");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json()).map_err(|e| CliError::io(path, e))
    }

    fn validate(&self) -> Result<(), CliError> {
        let sys = self.system()?;
        let (n, q, l) = (sys.states(), sys.inputs(), sys.tubes());
        if let Some(x0) = &self.x0 {
            let x = x0.to_tensor("x0")?;
            if x.rows() != n || x.tubes() != l {
                return Err(CliError::Parse(format!(
                    "x0: shape {:?} does not match {n} states and {l} tubes",
                    x0.shape
                )));
            }
        }
        if let Some(k) = &self.k {
            let kt = k.to_tensor("k")?;
            if kt.shape() != (q, n, l) {
                return Err(CliError::Parse(format!(
                    "k: shape {:?} should be [{q}, {n}, {l}]",
                    k.shape
                )));
            }
        }
        if let Some(d) = &self.design {
            if d.desired.len() != l {
                return Err(CliError::Parse(format!(
                    "design.desired: {} slices given, system has {l}",
                    d.desired.len()
                )));
            }
            for (i, s) in d.desired.iter().enumerate() {
                if s.len() != n {
                    return Err(CliError::Parse(format!(
                        "design.desired[{i}]: {} eigenvalues given, expected {n}",
                        s.len()
                    )));
                }
                if s.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(CliError::Parse(format!(
                        "design.desired[{i}]: non-finite eigenvalue"
                    )));
                }
            }
        }
        if let Some(sim) = &self.simulate {
            if !(sim.t_final.is_finite() && sim.t_final >= 0.0) {
                return Err(CliError::Parse("simulate.tFinal: must be finite and >= 0".into()));
            }
            if !(sim.step.is_finite() && sim.step > 0.0) {
                return Err(CliError::Parse("simulate.step: must be finite and > 0".into()));
            }
            match &sim.input {
                InputSpec::Zero => {}
                InputSpec::Constant(u) => {
                    u.to_tensor("simulate.input.constant")?;
                }
                InputSpec::Samples(v) => {
                    for (i, u) in v.iter().enumerate() {
                        u.to_tensor(&format!("simulate.input.samples[{i}]"))?;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn system(&self) -> Result<MltiSystem<f64>, CliError> {
        let a = self.a.to_tensor("a")?;
        let b = self.b.to_tensor("b")?;
        if a.rows() != a.cols() {
            return Err(CliError::Parse(format!(
                "a: dynamics tensor not square (shape {:?})",
                self.a.shape
            )));
        }
        if b.rows() != a.rows() || b.tubes() != a.tubes() {
            return Err(CliError::Parse(format!(
                "b: shape {:?} does not match a {:?}",
                self.b.shape, self.a.shape
            )));
        }
        MltiSystem::new(a, b).map_err(|e| CliError::Parse(e.to_string()))
    }

    /// Initial state; a zero `n x 1 x l` tensor when absent.
    pub fn initial_state(&self) -> Result<Tensor3<f64>, CliError> {
        match &self.x0 {
            Some(x) => x.to_tensor("x0"),
            None => Ok(Tensor3::zeros(self.a.shape[0], 1, self.a.shape[2])),
        }
    }

    pub fn gain(&self) -> Result<Option<Tensor3<f64>>, CliError> {
        self.k.as_ref().map(|k| k.to_tensor("k")).transpose()
    }
}

impl InputSpec {
    pub fn to_signal(&self) -> Result<InputSignal<f64>, CliError> {
        Ok(match self {
            InputSpec::Zero => InputSignal::Zero,
            InputSpec::Constant(u) => InputSignal::Constant(u.to_tensor("simulate.input.constant")?),
            InputSpec::Samples(v) => InputSignal::Samples(
                v.iter()
                    .enumerate()
                    .map(|(i, u)| u.to_tensor(&format!("simulate.input.samples[{i}]")))
                    .collect::<Result<_, _>>()?,
            ),
        })
    }
}
