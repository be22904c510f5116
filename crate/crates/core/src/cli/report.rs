//! Report documents. Every float is written with 15 significant digits in
//! lowercase scientific notation so repeated runs are byte-identical.

use std::io;

use num_complex::Complex;
use serde::Serialize;
use serde_json::Value;

use crate::control::{ControllabilityReport, FeedbackGain, SliceControllability};
use crate::spectral::Eigentuple;
use crate::tensor::Tensor3;

/// Formats a float as `d.dddddddddddddde[-]x`; `-0` is written as `0`.
pub fn fmt_f64(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.14e}")
}

/// Serializes `value` as indented JSON with fixed float formatting. Arrays
/// of scalars stay on one line.
pub fn to_report_json<S: Serialize>(value: &S) -> io::Result<String> {
    let v = serde_json::to_value(value).map_err(io::Error::other)?;
    let mut out = String::new();
    write_value(&mut out, &v, 0)?;
    out.push('\n');
    Ok(out)
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(out: &mut String, v: &Value, indent: usize) -> io::Result<()> {
    let pad = |out: &mut String, n: usize| out.extend(std::iter::repeat_n(' ', 2 * n));
    match v {
        // optional fields are skipped, so a null can only come from a
        // non-finite float
        Value::Null => {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                "non-finite number in report",
            ))
        }
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => out.push_str(&fmt_f64(x)),
            _ => out.push_str(&n.to_string()),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, x, indent)?;
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, x, indent + 1)?;
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, x, indent + 1)?;
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
    Ok(())
}

pub type Pair = [f64; 2];

pub fn pair(z: Complex<f64>) -> Pair {
    [z.re, z.im]
}

pub fn pairs(zs: &[Complex<f64>]) -> Vec<Pair> {
    zs.iter().copied().map(pair).collect()
}

/// A tensor with complex entries, slice by slice, each entry `[re, im]`.
#[derive(Clone, Debug, Serialize)]
pub struct TensorOut {
    pub shape: [usize; 3],
    pub slices: Vec<Vec<Vec<Pair>>>,
}

impl From<&Tensor3<f64>> for TensorOut {
    fn from(t: &Tensor3<f64>) -> Self {
        Self {
            shape: [t.rows(), t.cols(), t.tubes()],
            slices: (0..t.tubes())
                .map(|k| {
                    (0..t.rows())
                        .map(|r| (0..t.cols()).map(|c| pair(t.get(r, c, k))).collect())
                        .collect()
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SystemSummary {
    pub states: usize,
    pub inputs: usize,
    pub tubes: usize,
    pub real: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SliceSpectrum {
    pub slice: usize,
    pub eigenvalues: Vec<Pair>,
}

pub fn slice_spectra(table: &[Vec<Complex<f64>>]) -> Vec<SliceSpectrum> {
    table
        .iter()
        .enumerate()
        .map(|(i, s)| SliceSpectrum {
            slice: i + 1,
            eigenvalues: pairs(s),
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct EigentupleOut {
    pub index: usize,
    pub tube: Vec<Pair>,
    pub spectrum: Vec<Pair>,
}

pub fn eigentuple_views(ets: &[Eigentuple<f64>]) -> Vec<EigentupleOut> {
    ets.iter()
        .enumerate()
        .map(|(j, e)| EigentupleOut {
            index: j + 1,
            tube: pairs(e.tube.as_slice()),
            spectrum: pairs(&e.spectrum),
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StabilityOut {
    pub stable: bool,
    pub spectral_abscissa: f64,
    pub alpha: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SliceCtrbOut {
    pub slice: usize,
    pub rank: usize,
    pub controllable: bool,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CtrbOut {
    pub mode: &'static str,
    pub rank: usize,
    pub required: usize,
    pub controllable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_slice: Option<Vec<SliceCtrbOut>>,
}

impl From<&ControllabilityReport> for CtrbOut {
    fn from(r: &ControllabilityReport) -> Self {
        Self {
            mode: r.mode.label(),
            rank: r.rank,
            required: r.required,
            controllable: r.controllable,
            per_slice: r.per_slice.as_ref().map(|v| {
                v.iter()
                    .map(|s: &SliceControllability| SliceCtrbOut {
                        slice: s.slice,
                        rank: s.rank,
                        controllable: s.controllable,
                    })
                    .collect()
            }),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalyzeDiagnostics {
    /// `||P*D*P^-1 - A||_F / ||A||_F`.
    pub reconstruction_error: f64,
    /// Imaginary part left in the reconstruction before truncation.
    pub reconstruction_imaginary_residue: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalyzeReport {
    pub command: &'static str,
    pub system: SystemSummary,
    pub spectra: Vec<SliceSpectrum>,
    pub eigentuples: Vec<EigentupleOut>,
    pub stability: StabilityOut,
    pub controllability: Vec<CtrbOut>,
    pub diagnostics: AnalyzeDiagnostics,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DesignOut {
    pub b_mode: &'static str,
    pub assembly: &'static str,
    pub paper_compat: bool,
    #[serde(flatten)]
    pub outcome: DesignOutcome,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase", untagged)]
pub enum DesignOutcome {
    Ok(Box<DesignResult>),
    Failed { error: String },
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DesignResult {
    /// `K_i`, each a `q x n` matrix of `[re, im]` entries.
    pub per_slice_gains: Vec<Vec<Vec<Pair>>>,
    pub k: TensorOut,
    /// Imaginary part of the assembled gain before truncation.
    pub gain_imaginary_residue: f64,
    pub desired_spectra: Vec<SliceSpectrum>,
    pub closed_loop_spectra: Vec<SliceSpectrum>,
    /// Largest distance between a requested and an achieved eigenvalue
    /// after optimal matching within each slice.
    pub max_placement_error: f64,
    pub placement_exact: bool,
    pub closed_loop_stable: bool,
}

impl DesignResult {
    pub fn gains_of(g: &FeedbackGain<f64>) -> Vec<Vec<Vec<Pair>>> {
        g.per_slice_gains
            .iter()
            .map(|m| (0..m.rows()).map(|r| pairs(m.row(r))).collect())
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PlaceReport {
    pub command: &'static str,
    pub system: SystemSummary,
    pub open_loop_spectra: Vec<SliceSpectrum>,
    pub chosen: DesignOut,
    pub sound: DesignOut,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SimulateReport {
    pub command: &'static str,
    pub system: SystemSummary,
    pub closed_loop: bool,
    pub grid_points: usize,
    pub t_final: f64,
    pub initial_norm: f64,
    pub final_norm: f64,
    pub peak_norm: f64,
}
