//! Configuration-driven benchmark runs: uniform degree sweeps and an adaptive
//! degree-refinement loop, with CSV tables and a plain-text report.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use crate::benchmarks::{BenchmarkId, Manufactured};
use crate::error::{Error, Result};
use crate::estimator::{
    compute_indicators, effectivity, error_surrogate, Effectivity, EstimatorParams, EstimatorReport,
};
use crate::fem::{assemble, solve, FemSpace};
use crate::mesh::{DegreeMap, ParallelogramMesh};

/// Number of non-decreasing estimator steps tolerated by the adaptive loop.
pub const STAGNATION_WINDOW: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Uniform,
    Adaptive,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Mesh file; relative paths are resolved against the config's directory.
    pub mesh: PathBuf,
    pub benchmark: BenchmarkId,
    #[serde(default = "defaults::delta")]
    pub delta: f64,
    #[serde(default = "defaults::p0")]
    pub p0: usize,
    #[serde(default = "defaults::pmax")]
    pub pmax: usize,
    #[serde(default = "defaults::mode")]
    pub mode: Mode,
    #[serde(default = "defaults::theta")]
    pub theta: f64,
    #[serde(default = "defaults::output")]
    pub output: PathBuf,
    /// Extra Gauss points for load integrals.
    #[serde(default = "defaults::boost")]
    pub boost: usize,
    /// Adaptive runs stop once the estimator drops below this.
    #[serde(default = "defaults::eta_tol")]
    pub eta_tol: f64,
}

mod defaults {
    use super::Mode;
    use std::path::PathBuf;

    pub fn delta() -> f64 {
        0.1
    }
    pub fn p0() -> usize {
        2
    }
    pub fn pmax() -> usize {
        12
    }
    pub fn mode() -> Mode {
        Mode::Uniform
    }
    pub fn theta() -> f64 {
        0.5
    }
    pub fn output() -> PathBuf {
        PathBuf::from("out")
    }
    pub fn boost() -> usize {
        crate::fem::DEFAULT_BOOST
    }
    pub fn eta_tol() -> f64 {
        1e-8
    }
}

impl RunConfig {
    /// Parses `key = value` text, or JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file and resolves relative paths against its directory.
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if cfg.mesh.is_relative() {
            cfg.mesh = base.join(&cfg.mesh);
        }
        if cfg.output.is_relative() {
            cfg.output = base.join(&cfg.output);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p0 < 2 {
            return Err(Error::Config(format!(
                "p0 must be at least 2, got {}",
                self.p0
            )));
        }
        if self.pmax < self.p0 {
            return Err(Error::Config(format!(
                "pmax {} is below p0 {}",
                self.pmax, self.p0
            )));
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::Config(format!(
                "theta must lie in (0, 1], got {}",
                self.theta
            )));
        }
        if !(self.eta_tol >= 0.0) {
            return Err(Error::Config("eta_tol must be non-negative".into()));
        }
        EstimatorParams::with_delta(self.delta).map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    fn params(&self) -> EstimatorParams {
        EstimatorParams {
            delta: self.delta,
            ..EstimatorParams::default()
        }
    }
}

/// One solve-and-estimate step.
#[derive(Debug, Clone)]
pub struct Step {
    pub dofs: usize,
    pub energy_err: f64,
    pub tilde_err: f64,
    pub report: EstimatorReport,
    pub effectivity: Effectivity,
}

fn step(
    mesh: &Arc<ParallelogramMesh>,
    degrees: &DegreeMap,
    m: &dyn Manufactured,
    cfg: &RunConfig,
) -> Result<Step> {
    let space = FemSpace::new(mesh.clone(), degrees.clone())?;
    let f = |x: f64, y: f64| m.f(x, y);
    let sol = solve(&assemble(&space, &f, cfg.boost)?)?;
    let params = cfg.params();
    let report = compute_indicators(&sol, &f, &params)?;
    let err = error_surrogate(&sol, &|x, y| m.u(x, y), &|x, y| m.grad(x, y), &params)?;
    Ok(Step {
        dofs: sol.num_free(),
        energy_err: err.energy,
        tilde_err: err.tilde,
        effectivity: effectivity(report.eta, err.tilde),
        report,
    })
}

fn fmt_effectivity(e: Effectivity) -> String {
    match e {
        Effectivity::Value(v) => format!("{v:.16e}"),
        Effectivity::Degenerate => "degenerate".into(),
        Effectivity::Inconsistent => "inconsistent".into(),
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub p: usize,
    pub step: Step,
}

pub const SWEEP_HEADER: &str = "p,dofs,energy_err,tilde_err,eta,osc,effectivity";
pub const ADAPTIVE_HEADER: &str = "iter,pmax,dofs,tilde_err,eta,osc";

fn sweep_line(r: &SweepRow) -> String {
    let s = &r.step;
    format!(
        "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
        r.p,
        s.dofs,
        s.energy_err,
        s.tilde_err,
        s.report.eta,
        s.report.osc,
        fmt_effectivity(s.effectivity)
    )
}

fn load(cfg: &RunConfig) -> Result<(Arc<ParallelogramMesh>, Box<dyn Manufactured>)> {
    let mesh = Arc::new(ParallelogramMesh::from_path(&cfg.mesh)?);
    let m = cfg.benchmark.build(&mesh);
    Ok((mesh, m))
}

fn write_indicators(dir: &Path, report: &EstimatorReport) -> Result<()> {
    let mut el = Vec::new();
    report.write_elements_csv(&mut el)?;
    fs::write(dir.join("indicators_elements.csv"), el)?;
    let mut ed = Vec::new();
    report.write_edges_csv(&mut ed)?;
    fs::write(dir.join("indicators_edges.csv"), ed)?;
    Ok(())
}

/// Solves and estimates for `p = p0..=pmax` on uniform degrees and writes
/// `sweep.csv` and `report.txt` to the output directory. A failing solve
/// stops the sweep; the rows so far and a diagnostic line are still written.
pub fn run_uniform_sweep(cfg: &RunConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let (mesh, m) = load(cfg)?;
    fs::create_dir_all(&cfg.output)?;
    let mut rows = Vec::new();
    let mut csv = format!("{SWEEP_HEADER}\n");
    let mut failure = None;
    for p in cfg.p0..=cfg.pmax {
        match step(
            &mesh,
            &DegreeMap::uniform(mesh.num_elements(), p),
            m.as_ref(),
            cfg,
        ) {
            Ok(step) => {
                let row = SweepRow { p, step };
                writeln!(csv, "{}", sweep_line(&row)).unwrap();
                rows.push(row);
            }
            Err(e) => {
                writeln!(csv, "# failed at p={p}: {e}").unwrap();
                failure = Some(e);
                break;
            }
        }
    }
    fs::write(cfg.output.join("sweep.csv"), csv)?;
    if let Some(last) = rows.last() {
        write_indicators(&cfg.output, &last.step.report)?;
    }
    fs::write(
        cfg.output.join("report.txt"),
        sweep_report(cfg, &rows, failure.as_ref()),
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(rows),
    }
}

fn sweep_report(cfg: &RunConfig, rows: &[SweepRow], failure: Option<&Error>) -> String {
    let mut s = String::new();
    writeln!(s, "uniform degree sweep").unwrap();
    writeln!(s, "benchmark: {}", cfg.benchmark).unwrap();
    writeln!(s, "mesh: {}", cfg.mesh.display()).unwrap();
    writeln!(s, "delta: {} (beta = {})", cfg.delta, 0.5 + cfg.delta).unwrap();
    writeln!(s).unwrap();
    writeln!(
        s,
        "{:>3} {:>7} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "p", "dofs", "energy", "tilde", "eta", "osc", "eta/tilde"
    )
    .unwrap();
    for r in rows {
        let st = &r.step;
        let eff = st
            .effectivity
            .value()
            .map_or_else(|| fmt_effectivity(st.effectivity), |v| format!("{v:.4}"));
        writeln!(
            s,
            "{:>3} {:>7} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12}",
            r.p, st.dofs, st.energy_err, st.tilde_err, st.report.eta, st.report.osc, eff
        )
        .unwrap();
    }
    let effs: Vec<f64> = rows
        .iter()
        .filter_map(|r| r.step.effectivity.value())
        .collect();
    if let (Some(lo), Some(hi)) = (
        effs.iter().cloned().reduce(f64::min),
        effs.iter().cloned().reduce(f64::max),
    ) {
        writeln!(
            s,
            "\neffectivity range: [{lo:.4}, {hi:.4}], spread {:.3}",
            hi / lo
        )
        .unwrap();
    }
    if let Some(e) = failure {
        writeln!(s, "\nstopped early: {e}").unwrap();
    }
    s
}

#[derive(Debug, Clone)]
pub struct AdaptiveRow {
    pub iter: usize,
    pub pmax: usize,
    pub step: Step,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    MaxDegree,
    Stagnated,
}

#[derive(Debug, Clone)]
pub struct AdaptiveOutcome {
    pub rows: Vec<AdaptiveRow>,
    pub degrees: DegreeMap,
    pub stop: StopReason,
}

/// The smallest set of elements, taken by decreasing indicator, whose squared
/// indicators add up to `θ² η²`. Ties go to the lower element index.
pub fn dorfler_mark(etas: &[f64], theta: f64) -> Vec<usize> {
    let total: f64 = etas.iter().map(|e| e * e).sum();
    let mut order: Vec<usize> = (0..etas.len()).collect();
    order.sort_by(|&a, &b| etas[b].total_cmp(&etas[a]).then(a.cmp(&b)));
    let target = theta * theta * total;
    let mut acc = 0.0;
    let mut marked = Vec::new();
    for k in order {
        if acc >= target && !marked.is_empty() {
            break;
        }
        acc += etas[k] * etas[k];
        marked.push(k);
    }
    marked.sort_unstable();
    marked
}

/// Adaptive loop: solve, estimate, mark, raise marked degrees by one, smooth
/// to keep neighbouring degrees within one, repeat. Writes `adaptive.csv`,
/// `degrees.csv` and `report.txt`.
pub fn run_adaptive(cfg: &RunConfig) -> Result<AdaptiveOutcome> {
    cfg.validate()?;
    let (mesh, m) = load(cfg)?;
    fs::create_dir_all(&cfg.output)?;
    let mut degrees = DegreeMap::uniform(mesh.num_elements(), cfg.p0);
    let mut rows: Vec<AdaptiveRow> = Vec::new();
    let mut best_eta = f64::INFINITY;
    let mut since_best = 0;
    let stop = loop {
        let st = step(&mesh, &degrees, m.as_ref(), cfg)?;
        let eta = st.report.eta;
        let etas = st.report.element_etas();
        rows.push(AdaptiveRow {
            iter: rows.len(),
            pmax: degrees.max(),
            step: st,
        });
        if eta < best_eta {
            best_eta = eta;
            since_best = 0;
        } else {
            since_best += 1;
        }
        if eta <= cfg.eta_tol {
            break StopReason::Converged;
        }
        if degrees.max() >= cfg.pmax {
            break StopReason::MaxDegree;
        }
        if since_best >= STAGNATION_WINDOW {
            break StopReason::Stagnated;
        }
        for k in dorfler_mark(&etas, cfg.theta) {
            degrees.set(k, (degrees.get(k) + 1).min(cfg.pmax));
        }
        degrees.smooth(&mesh);
    };

    let mut csv = format!("{ADAPTIVE_HEADER}\n");
    for r in &rows {
        let s = &r.step;
        writeln!(
            csv,
            "{},{},{},{:.16e},{:.16e},{:.16e}",
            r.iter, r.pmax, s.dofs, s.tilde_err, s.report.eta, s.report.osc
        )
        .unwrap();
    }
    fs::write(cfg.output.join("adaptive.csv"), csv)?;
    let mut deg = String::from("element,p\n");
    for (k, p) in degrees.as_slice().iter().enumerate() {
        writeln!(deg, "{k},{p}").unwrap();
    }
    fs::write(cfg.output.join("degrees.csv"), deg)?;
    if let Some(last) = rows.last() {
        write_indicators(&cfg.output, &last.step.report)?;
    }
    fs::write(
        cfg.output.join("report.txt"),
        adaptive_report(cfg, &rows, &degrees, stop),
    )?;
    Ok(AdaptiveOutcome {
        rows,
        degrees,
        stop,
    })
}

fn adaptive_report(
    cfg: &RunConfig,
    rows: &[AdaptiveRow],
    degrees: &DegreeMap,
    stop: StopReason,
) -> String {
    let mut s = String::new();
    writeln!(s, "adaptive degree refinement").unwrap();
    writeln!(s, "benchmark: {}", cfg.benchmark).unwrap();
    writeln!(s, "mesh: {}", cfg.mesh.display()).unwrap();
    writeln!(
        s,
        "delta: {}, theta: {}, p0: {}, pmax: {}",
        cfg.delta, cfg.theta, cfg.p0, cfg.pmax
    )
    .unwrap();
    writeln!(
        s,
        "note: the loop is a heuristic; no convergence guarantee is claimed for it."
    )
    .unwrap();
    writeln!(s).unwrap();
    writeln!(
        s,
        "{:>4} {:>4} {:>7} {:>12} {:>12} {:>12}",
        "iter", "pmax", "dofs", "tilde", "eta", "osc"
    )
    .unwrap();
    for r in rows {
        let st = &r.step;
        writeln!(
            s,
            "{:>4} {:>4} {:>7} {:>12.4e} {:>12.4e} {:>12.4e}",
            r.iter, r.pmax, st.dofs, st.tilde_err, st.report.eta, st.report.osc
        )
        .unwrap();
    }
    let increases = rows
        .windows(2)
        .filter(|w| w[1].step.report.eta > w[0].step.report.eta)
        .count();
    if increases > 0 {
        writeln!(
            s,
            "\nwarning: the estimator increased in {increases} iteration(s)"
        )
        .unwrap();
    }
    let stop = match stop {
        StopReason::Converged => "estimator below tolerance",
        StopReason::MaxDegree => "maximum degree reached",
        StopReason::Stagnated => "stagnation",
    };
    writeln!(s, "\nstopped: {stop}").unwrap();
    writeln!(
        s,
        "final degrees: min {}, max {}",
        degrees.min(),
        degrees.max()
    )
    .unwrap();
    s
}

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Solver(_) | Error::NotPositiveDefinite { .. } => 3,
        _ => 2,
    }
}

/// Runs whichever mode the config selects and returns the exit status.
pub fn run(cfg: &RunConfig) -> Result<i32> {
    match cfg.mode {
        Mode::Uniform => run_uniform_sweep(cfg).map(|_| 0),
        Mode::Adaptive => run_adaptive(cfg).map(|o| {
            if o.stop == StopReason::Stagnated {
                4
            } else {
                0
            }
        }),
    }
}
