use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex;

use super::file::{AssemblyName, BModeName, SystemFile};
use super::report::{
    eigentuple_views, fmt_f64, slice_spectra, to_report_json, AnalyzeDiagnostics, AnalyzeReport,
    CtrbOut, DesignOut, DesignOutcome, DesignResult, PlaceReport, SimulateReport, StabilityOut,
    SystemSummary,
};
use super::CliError;
use crate::control::{
    closed_loop, closed_loop_with, ctrb_check_with, design_feedback, spectrum_mismatch, BMode,
    ControllabilityMode, FeedbackGain,
};
use crate::matfun::RANK_TOL;
use crate::spectral::{teig, Assembly};
use crate::system::{simulate as run_simulation, stability, stability_of, MltiSystem, TimeGrid, Trajectory};
use crate::tensor::Tensor3;

/// Closed-loop eigenvalues within this distance of the request count as
/// placed exactly.
pub const PLACEMENT_TOL: f64 = 1e-6;

/// Settings shared by the subcommands; `None` falls back to the file.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub mode: Option<BModeName>,
    pub assembly: Option<AssemblyName>,
    pub step: Option<f64>,
    pub t_final: Option<f64>,
    pub tol: Option<f64>,
}

/// What a subcommand produced.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub written: Vec<PathBuf>,
    pub summary: String,
}

fn summary(sys: &MltiSystem<f64>) -> SystemSummary {
    SystemSummary {
        states: sys.states(),
        inputs: sys.inputs(),
        tubes: sys.tubes(),
        real: sys.is_real(),
    }
}

pub fn analyze(file: &SystemFile, opts: &Options) -> Result<AnalyzeReport, CliError> {
    let sys = file.system()?;
    let tol = opts.tol.unwrap_or(RANK_TOL);
    if !(tol > 0.0 && tol < 1.0) {
        return Err(CliError::Usage(format!("--tol {tol} must lie in (0, 1)")));
    }
    let st = stability(&sys)?;
    let te = teig(sys.a())?;
    let rebuilt = te.reconstruct()?;
    let residue = rebuilt.imaginary_norm() / sys.a().frobenius_norm().max(f64::MIN_POSITIVE);
    let controllability = ControllabilityMode::ALL
        .iter()
        .map(|&m| ctrb_check_with(&sys, m, tol).map(|r| CtrbOut::from(&r)))
        .collect::<Result<_, _>>()?;
    Ok(AnalyzeReport {
        command: "analyze",
        system: summary(&sys),
        spectra: slice_spectra(&te.per_slice_eigenvalues),
        eigentuples: eigentuple_views(&te.eigentuples()),
        stability: StabilityOut {
            stable: st.stable,
            spectral_abscissa: st.max_real_part,
            alpha: st.decay_rate,
        },
        controllability,
        diagnostics: AnalyzeDiagnostics {
            reconstruction_error: rebuilt.relative_error(sys.a()),
            reconstruction_imaginary_residue: residue,
        },
    })
}

fn design_choice(file: &SystemFile, opts: &Options) -> (BMode, Assembly) {
    let d = file.design.as_ref();
    let b = opts
        .mode
        .or(d.and_then(|d| d.b_mode))
        .unwrap_or(BModeName::Spectral);
    let a = opts
        .assembly
        .or(d.and_then(|d| d.assembly))
        .unwrap_or(AssemblyName::NormalizedIdft);
    (b.into(), a.into())
}

fn desired(file: &SystemFile) -> Result<Vec<Vec<Complex<f64>>>, CliError> {
    file.design
        .as_ref()
        .map(|d| d.desired_spectra())
        .ok_or_else(|| CliError::Parse("design: block missing".into()))
}

fn evaluate_gain(sys: &MltiSystem<f64>, g: &FeedbackGain<f64>) -> Result<DesignResult, CliError> {
    let cl = closed_loop(sys, g)?;
    let st = stability(&cl)?;
    let err = g
        .desired_spectra
        .iter()
        .zip(&st.per_slice_spectra)
        .map(|(w, got)| spectrum_mismatch(w, got))
        .fold(0.0, f64::max);
    Ok(DesignResult {
        per_slice_gains: DesignResult::gains_of(g),
        k: (&g.k).into(),
        gain_imaginary_residue: g.k.imaginary_norm(),
        desired_spectra: slice_spectra(&g.desired_spectra),
        closed_loop_spectra: slice_spectra(&st.per_slice_spectra),
        max_placement_error: err,
        placement_exact: err <= PLACEMENT_TOL,
        closed_loop_stable: st.stable,
    })
}

fn design_out(b_mode: BMode, assembly: Assembly, outcome: DesignOutcome) -> DesignOut {
    DesignOut {
        b_mode: b_mode.label(),
        assembly: assembly.label(),
        paper_compat: b_mode != BMode::Spectral || assembly != Assembly::NormalizedIdft,
        outcome,
    }
}

/// Runs the chosen design and the exact spectral design side by side. An
/// error in the chosen design is returned; one in the exact design is
/// recorded in the report.
pub fn place(
    file: &SystemFile,
    opts: &Options,
) -> Result<(PlaceReport, FeedbackGain<f64>), CliError> {
    let sys = file.system()?;
    let want = desired(file)?;
    let (b_mode, assembly) = design_choice(file, opts);
    let open = stability(&sys)?;

    let chosen = design_feedback(&sys, &want, b_mode, assembly)?;
    let chosen_out = design_out(
        b_mode,
        assembly,
        DesignOutcome::Ok(Box::new(evaluate_gain(&sys, &chosen)?)),
    );
    let (sb, sa) = (BMode::Spectral, Assembly::NormalizedIdft);
    let sound = match design_feedback(&sys, &want, sb, sa) {
        Ok(g) => DesignOutcome::Ok(Box::new(evaluate_gain(&sys, &g)?)),
        Err(e) => DesignOutcome::Failed {
            error: e.to_string(),
        },
    };
    let report = PlaceReport {
        command: "place",
        system: summary(&sys),
        open_loop_spectra: slice_spectra(&open.per_slice_spectra),
        chosen: chosen_out,
        sound: design_out(sb, sa, sound),
    };
    Ok((report, chosen))
}

/// Gain tensor for a closed-loop run: `k` from the file, else a fresh design.
fn loop_gain(file: &SystemFile, opts: &Options, sys: &MltiSystem<f64>) -> Result<Tensor3<f64>, CliError> {
    if let Some(k) = file.gain()? {
        return Ok(k);
    }
    if file.design.is_none() {
        return Err(CliError::Parse(
            "k: closed-loop simulation needs a gain tensor or a design block".into(),
        ));
    }
    let (b_mode, assembly) = design_choice(file, opts);
    Ok(design_feedback(sys, &desired(file)?, b_mode, assembly)?.k)
}

pub fn simulate(
    file: &SystemFile,
    opts: &Options,
) -> Result<(Trajectory<f64>, SimulateReport), CliError> {
    let open = file.system()?;
    let block = file.simulate.as_ref();
    let t_final = opts
        .t_final
        .or(block.map(|b| b.t_final))
        .ok_or_else(|| CliError::Parse("simulate.tFinal: missing (or pass --tfinal)".into()))?;
    let step = opts
        .step
        .or(block.map(|b| b.step))
        .ok_or_else(|| CliError::Parse("simulate.step: missing (or pass --step)".into()))?;
    if !(t_final.is_finite() && t_final >= 0.0 && step.is_finite() && step > 0.0) {
        return Err(CliError::Usage(format!(
            "need tFinal >= 0 and step > 0, got {t_final} and {step}"
        )));
    }
    let closed = block.is_some_and(|b| b.closed_loop);
    let sys = if closed {
        closed_loop_with(&open, &loop_gain(file, opts, &open)?)?
    } else {
        open
    };
    let input = match block {
        Some(b) => b.input.to_signal()?,
        None => crate::system::InputSignal::Zero,
    };
    let grid = TimeGrid::uniform(t_final, step)?;
    let traj = run_simulation(&sys, &file.initial_state()?, &input, &grid)?;
    let norms = traj.norms();
    let report = SimulateReport {
        command: "simulate",
        system: summary(&sys),
        closed_loop: closed,
        grid_points: traj.times.len(),
        t_final,
        initial_norm: norms[0],
        final_norm: *norms.last().expect("non-empty trajectory"),
        peak_norm: norms.iter().copied().fold(0.0, f64::max),
    };
    Ok((traj, report))
}

/// Column names `x_r_c_k` (one-based) in row-major `(r, c, k)` order.
pub fn state_columns(shape: (usize, usize, usize)) -> Vec<String> {
    let (rows, cols, tubes) = shape;
    let mut names = Vec::with_capacity(rows * cols * tubes);
    for r in 1..=rows {
        for c in 1..=cols {
            for k in 1..=tubes {
                names.push(format!("x_{r}_{c}_{k}"));
            }
        }
    }
    names
}

fn state_values(x: &Tensor3<f64>) -> impl Iterator<Item = f64> + '_ {
    let (rows, cols, tubes) = x.shape();
    (0..rows).flat_map(move |r| {
        (0..cols).flat_map(move |c| (0..tubes).map(move |k| x.get(r, c, k).re))
    })
}

pub fn trajectory_csv(traj: &Trajectory<f64>) -> String {
    let mut out = String::from("t");
    for name in state_columns(traj.states[0].shape()) {
        out.push(',');
        out.push_str(&name);
    }
    out.push('\n');
    for (t, x) in traj.times.iter().zip(&traj.states) {
        out.push_str(&fmt_f64(*t));
        for v in state_values(x) {
            out.push(',');
            out.push_str(&fmt_f64(v));
        }
        out.push('\n');
    }
    out
}

/// Whitespace-separated table with a `(t, value)` column pair per signal.
pub fn plot_data(traj: &Trajectory<f64>) -> String {
    let names = state_columns(traj.states[0].shape());
    let mut out = String::new();
    let header: Vec<String> = names.iter().map(|n| format!("t {n}")).collect();
    out.push_str(&header.join(" "));
    out.push('\n');
    for (t, x) in traj.times.iter().zip(&traj.states) {
        let t = fmt_f64(*t);
        let row: Vec<String> = state_values(x).map(|v| format!("{t} {}", fmt_f64(v))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "system".into())
}

fn write(dir: &Path, name: String, contents: &str, written: &mut Vec<PathBuf>) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    written.push(path);
    Ok(())
}

fn report_text<S: serde::Serialize>(r: &S) -> Result<String, CliError> {
    to_report_json(r).map_err(|e| CliError::Numerical(e.to_string()))
}

pub fn cmd_analyze(path: &Path, opts: &Options, out_dir: &Path) -> Result<Outcome, CliError> {
    let file = SystemFile::read(path)?;
    let report = analyze(&file, opts)?;
    let mut written = Vec::new();
    write(out_dir, format!("{}.analyze.json", stem(path)), &report_text(&report)?, &mut written)?;
    let s = &report.stability;
    let mut text = format!(
        "{}: spectral abscissa {}, alpha {}\n",
        if s.stable { "stable" } else { "unstable" },
        fmt_f64(s.spectral_abscissa),
        fmt_f64(s.alpha)
    );
    for c in &report.controllability {
        let _ = writeln!(
            text,
            "{}: rank {}/{} {}",
            c.mode,
            c.rank,
            c.required,
            if c.controllable { "controllable" } else { "not controllable" }
        );
    }
    Ok(Outcome {
        exit_code: if s.stable { 0 } else { 2 },
        written,
        summary: text,
    })
}

pub fn cmd_place(path: &Path, opts: &Options, out_dir: &Path) -> Result<Outcome, CliError> {
    let file = SystemFile::read(path)?;
    let (report, gain) = place(&file, opts)?;
    let mut written = Vec::new();
    let base = stem(path);
    write(out_dir, format!("{base}.place.json"), &report_text(&report)?, &mut written)?;
    let mut with_gain = file.clone();
    with_gain.k = Some(super::file::TensorSpec::from_tensor(&gain.k)?);
    write(out_dir, format!("{base}.gain.json"), &with_gain.to_json(), &mut written)?;
    let mut text = String::new();
    for (label, d) in [("chosen", &report.chosen), ("sound", &report.sound)] {
        let _ = write!(text, "{label} ({}, {}): ", d.b_mode, d.assembly);
        let _ = match &d.outcome {
            DesignOutcome::Ok(r) => writeln!(
                text,
                "max placement error {}{}",
                fmt_f64(r.max_placement_error),
                if r.placement_exact { "" } else { " (not exact)" }
            ),
            DesignOutcome::Failed { error } => writeln!(text, "failed: {error}"),
        };
    }
    Ok(Outcome {
        exit_code: 0,
        written,
        summary: text,
    })
}

pub fn cmd_simulate(path: &Path, opts: &Options, out_dir: &Path) -> Result<Outcome, CliError> {
    let file = SystemFile::read(path)?;
    let (traj, report) = simulate(&file, opts)?;
    let mut written = Vec::new();
    let base = stem(path);
    write(out_dir, format!("{base}.trajectory.csv"), &trajectory_csv(&traj), &mut written)?;
    write(out_dir, format!("{base}.plot.dat"), &plot_data(&traj), &mut written)?;
    write(out_dir, format!("{base}.simulate.json"), &report_text(&report)?, &mut written)?;
    Ok(Outcome {
        exit_code: 0,
        written,
        summary: format!(
            "{} points, |X(0)| = {}, |X(T)| = {}\n",
            report.grid_points,
            fmt_f64(report.initial_norm),
            fmt_f64(report.final_norm)
        ),
    })
}

pub fn cmd_info(path: Option<&Path>) -> Result<Outcome, CliError> {
    let mut text = format!(
        "mlti {}\nschema {}\nrank tolerance {}\nplacement tolerance {}\n",
        env!("CARGO_PKG_VERSION"),
        super::file::SCHEMA_VERSION,
        fmt_f64(RANK_TOL),
        fmt_f64(PLACEMENT_TOL)
    );
    if let Some(p) = path {
        let file = SystemFile::read(p)?;
        let sys = file.system()?;
        let st = stability_of(sys.a())?;
        let _ = writeln!(
            text,
            "{}: n = {}, q = {}, l = {}, {}",
            p.display(),
            sys.states(),
            sys.inputs(),
            sys.tubes(),
            if st.stable { "stable" } else { "unstable" }
        );
        let blocks: Vec<&str> = [
            ("x0", file.x0.is_some()),
            ("k", file.k.is_some()),
            ("design", file.design.is_some()),
            ("simulate", file.simulate.is_some()),
        ]
        .iter()
        .filter(|(_, present)| *present)
        .map(|(name, _)| *name)
        .collect();
        let _ = writeln!(text, "blocks: {}", if blocks.is_empty() { "none".to_string() } else { blocks.join(", ") });
    }
    Ok(Outcome {
        exit_code: 0,
        written: Vec::new(),
        summary: text,
    })
}
