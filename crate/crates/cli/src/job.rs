//! Job configuration and the runners behind each subcommand.

use std::path::PathBuf;
use std::time::Instant;

use cuttail::chebexchange::{exchange_solve, ExchangeOptions};
use cuttail::cuttail::{cut_tail_closed_form, find_cut_tail, CutTailOptions, CutTailResult, Method, PredicateEval};
use cuttail::geometry2d::{cut_tail_geometric, GeometricOptions};
use cuttail::quasipoly::{build_basis, QuasiPolynomial};
use cuttail::switchsim::{bundled_system, worst_case_search, SearchResult, Segment, SwitchingSystem};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::input::{InputEcho, InputSource};
use crate::plot::{emit_plot_data, PlotKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    JsonLines,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    CutTail,
    Extremal { t: f64 },
    Verify2d,
    Simulate { dwell_min: f64, restarts: usize },
    Sweep { threads: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub eps: f64,
    pub time_tol: f64,
    pub value_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let d = CutTailOptions::default();
        Self { eps: d.eps, time_tol: d.time_tol, value_tol: d.value_tol }
    }
}

impl Tolerances {
    fn options(&self) -> CutTailOptions {
        CutTailOptions {
            eps: self.eps,
            time_tol: self.time_tol,
            value_tol: self.value_tol,
            exchange: ExchangeOptions::with_eps(self.eps),
            ..CutTailOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotRequest {
    pub dir: PathBuf,
    pub kind: PlotKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub command: Command,
    pub inputs: Vec<InputSource>,
    pub tolerances: Tolerances,
    pub format: OutputFormat,
    pub seed: u64,
    pub samples: Option<usize>,
    pub horizon: Option<f64>,
    pub plot: Option<PlotRequest>,
    pub timestamps: bool,
}

impl JobConfig {
    pub fn new(command: Command, inputs: Vec<InputSource>) -> Self {
        Self {
            command,
            inputs,
            tolerances: Tolerances::default(),
            format: OutputFormat::JsonLines,
            seed: 0,
            samples: None,
            horizon: None,
            plot: None,
            timestamps: true,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let t = &self.tolerances;
        for (name, v) in [("eps", t.eps), ("time-tol", t.time_tol), ("value-tol", t.value_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!("--{name} must be strictly positive, got {v}")));
            }
        }
        if let Some(h) = self.horizon {
            if !(h > 0.0 && h.is_finite()) {
                return Err(CliError::Usage(format!("--horizon must be positive, got {h}")));
            }
        }
        if self.samples.is_some_and(|n| n < 3) {
            return Err(CliError::Usage("--samples must be at least 3".into()));
        }
        let single = matches!(self.command, Command::CutTail | Command::Extremal { .. } | Command::Verify2d);
        if single && self.inputs.len() != 1 {
            return Err(CliError::Usage("exactly one of --matrix, --spectrum or --example is required".into()));
        }
        if matches!(self.command, Command::Sweep { .. }) && self.inputs.is_empty() {
            return Err(CliError::Usage("sweep needs at least one input".into()));
        }
        match self.command {
            Command::Extremal { t } if !(t > 0.0 && t.is_finite()) => {
                Err(CliError::Usage(format!("--t must be positive, got {t}")))
            }
            Command::Simulate { dwell_min, restarts } if !(dwell_min > 0.0) || restarts == 0 => {
                Err(CliError::Usage("--dwell-min must be positive and --restarts at least 1".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Certificate coefficients next to the basis functions they multiply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub basis: Vec<String>,
    pub coeffs: Vec<f64>,
}

impl From<&QuasiPolynomial> for Certificate {
    fn from(p: &QuasiPolynomial) -> Self {
        Self {
            basis: p.basis().functions().iter().map(ToString::to_string).collect(),
            coeffs: p.coeffs().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutTailReport {
    pub input: InputEcho,
    pub spectrum: String,
    pub dim_pa: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jordan: Option<String>,
    pub tolerances: Tolerances,
    pub t_cut: f64,
    pub bracket: (f64, f64),
    pub method: Method,
    pub degenerate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    pub predicate_log: Vec<PredicateEval>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub plots: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalReport {
    pub input: InputEcho,
    pub spectrum: String,
    pub t: f64,
    pub value: f64,
    pub bounds: (f64, f64),
    pub active_points: Vec<f64>,
    pub iterations: usize,
    pub certificate: Certificate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verify2dReport {
    pub input: InputEcho,
    pub spectrum: String,
    pub closed_form: f64,
    pub exchange: f64,
    pub geometric: f64,
    pub geometric_step: f64,
    pub geometric_monotone: bool,
    pub exchange_agrees: bool,
    pub geometric_agrees: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub plots: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    pub label: String,
    pub spectrum: String,
    pub t_cut: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawSummary {
    pub exponent: f64,
    pub total_time: f64,
    pub segments: Vec<Segment>,
}

impl From<&SearchResult> for LawSummary {
    fn from(r: &SearchResult) -> Self {
        Self { exponent: r.exponent, total_time: r.law.total_time(), segments: r.law.segments().to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub modes: Vec<ModeSummary>,
    pub dwell_min: f64,
    pub horizon: f64,
    pub seed: u64,
    pub restarts: usize,
    pub uncapped: LawSummary,
    pub capped: LawSummary,
    /// Uncapped minus capped exponent; an empirical probe, not a certificate.
    pub gap: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub input: InputEcho,
    pub message: String,
    pub exit_code: i32,
}

/// One output record. Every json-lines line deserializes back into this.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Report {
    CutTail(CutTailReport),
    Extremal(ExtremalReport),
    Verify2d(Verify2dReport),
    Simulate(SimulateReport),
    Error(ErrorReport),
}

/// Reports plus the exit code they imply.
pub struct Outcome {
    pub reports: Vec<Report>,
    pub exit_code: i32,
}

pub fn run(cfg: &JobConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let single = |r: Report| Outcome { reports: vec![r], exit_code: 0 };
    match &cfg.command {
        Command::CutTail => Ok(single(Report::CutTail(run_cut_tail(cfg, &cfg.inputs[0])?))),
        Command::Extremal { t } => Ok(single(Report::Extremal(run_extremal(cfg, &cfg.inputs[0], *t)?))),
        Command::Verify2d => {
            let r = run_verify2d(cfg, &cfg.inputs[0])?;
            let code = if r.exchange_agrees && r.geometric_agrees { 0 } else { 1 };
            Ok(Outcome { reports: vec![Report::Verify2d(r)], exit_code: code })
        }
        Command::Simulate { dwell_min, restarts } => {
            Ok(single(Report::Simulate(run_simulate(cfg, *dwell_min, *restarts)?)))
        }
        Command::Sweep { threads } => Ok(run_sweep(cfg, *threads)),
    }
}

fn elapsed(cfg: &JobConfig, start: Instant) -> Option<f64> {
    cfg.timestamps.then(|| start.elapsed().as_secs_f64())
}

pub fn run_cut_tail(cfg: &JobConfig, source: &InputSource) -> Result<CutTailReport, CliError> {
    let start = Instant::now();
    let input = source.resolve()?;
    input.spectrum.require_hurwitz()?;
    let res: CutTailResult = find_cut_tail(&input.spectrum, &cfg.tolerances.options())?;
    let closed_form = cut_tail_closed_form(&input.spectrum).ok().map(|r| r.t_cut);
    let plots = match &cfg.plot {
        Some(req) => emit_plot_data(&input, res.t_cut, cfg.horizon, cfg.samples, req)?,
        None => Vec::new(),
    };
    Ok(CutTailReport {
        spectrum: input.spectrum.to_string(),
        dim_pa: input.spectrum.dim_pa(),
        jordan: input.jordan,
        tolerances: cfg.tolerances,
        t_cut: res.t_cut,
        bracket: res.bracket,
        method: res.method,
        degenerate: res.degenerate,
        closed_form,
        certificate: res.certificate.as_ref().map(Certificate::from),
        predicate_log: res.predicate_evals,
        plots,
        input: input.echo,
        wall_time_s: elapsed(cfg, start),
    })
}

pub fn run_extremal(cfg: &JobConfig, source: &InputSource, t: f64) -> Result<ExtremalReport, CliError> {
    let start = Instant::now();
    let input = source.resolve()?;
    let basis = build_basis(&input.spectrum);
    let res = exchange_solve(&basis, t, &ExchangeOptions::with_eps(cfg.tolerances.eps))?;
    Ok(ExtremalReport {
        spectrum: input.spectrum.to_string(),
        t,
        value: res.value,
        bounds: res.bounds,
        active_points: res.active_points,
        iterations: res.iterations,
        certificate: Certificate::from(&res.certificate),
        input: input.echo,
        wall_time_s: elapsed(cfg, start),
    })
}

pub fn run_verify2d(cfg: &JobConfig, source: &InputSource) -> Result<Verify2dReport, CliError> {
    let start = Instant::now();
    let input = source.resolve()?;
    input.spectrum.require_hurwitz()?;
    if input.state_dim() != 2 || input.spectrum.dim_pa() != 2 {
        return Err(CliError::Usage(format!(
            "verify2d needs a two-dimensional system, got spectrum {}",
            input.spectrum
        )));
    }
    let closed = cut_tail_closed_form(&input.spectrum)?.t_cut;
    let exchange = find_cut_tail(&input.spectrum, &cfg.tolerances.options())?.t_cut;
    let mut gopts = GeometricOptions { horizon: cfg.horizon, ..GeometricOptions::default() };
    if let Some(n) = cfg.samples {
        gopts.samples = n;
    }
    let geo = cut_tail_geometric(&input.spectrum, &gopts)?;
    let plots = match &cfg.plot {
        Some(req) => emit_plot_data(&input, closed, cfg.horizon, cfg.samples, req)?,
        None => Vec::new(),
    };
    Ok(Verify2dReport {
        spectrum: input.spectrum.to_string(),
        closed_form: closed,
        exchange,
        geometric: geo.t_cut,
        geometric_step: geo.step,
        geometric_monotone: geo.monotone,
        exchange_agrees: (exchange - closed).abs() <= cfg.tolerances.time_tol.max(0.01),
        geometric_agrees: (geo.t_cut - closed).abs() <= (2.0 * geo.step).max(0.02),
        plots,
        input: input.echo,
        wall_time_s: elapsed(cfg, start),
    })
}

/// Default search horizon for the switching probe.
pub const SIMULATE_HORIZON: f64 = 60.0;

pub fn run_simulate(cfg: &JobConfig, dwell_min: f64, restarts: usize) -> Result<SimulateReport, CliError> {
    let start = Instant::now();
    let opts = cfg.tolerances.options();
    let sys = if cfg.inputs.is_empty() {
        bundled_system(dwell_min)?
    } else {
        let mut mats = Vec::with_capacity(cfg.inputs.len());
        for src in &cfg.inputs {
            let input = src.resolve()?;
            let m = input.matrix.clone().unwrap_or_else(|| input.spectrum.to_matrix());
            mats.push((input.label(), m));
        }
        let n = mats.len();
        SwitchingSystem::from_matrices(mats, vec![dwell_min; n], &opts)?
    };
    let horizon = cfg.horizon.unwrap_or(SIMULATE_HORIZON);
    let uncapped = worst_case_search(&sys, horizon, false, restarts, cfg.seed)?;
    let capped = worst_case_search(&sys, horizon, true, restarts, cfg.seed)?;
    Ok(SimulateReport {
        modes: sys
            .modes()
            .iter()
            .map(|m| ModeSummary { label: m.label.clone(), spectrum: m.spectrum.to_string(), t_cut: m.t_cut })
            .collect(),
        dwell_min,
        horizon,
        seed: cfg.seed,
        restarts,
        gap: uncapped.exponent - capped.exponent,
        uncapped: LawSummary::from(&uncapped),
        capped: LawSummary::from(&capped),
        wall_time_s: elapsed(cfg, start),
    })
}

fn echo_for(source: &InputSource) -> InputEcho {
    let (kind, path, name, spectrum) = match source {
        InputSource::MatrixFile(p) => ("matrix-file", Some(p.display().to_string()), None, None),
        InputSource::Example(n) => ("example", None, Some(n.clone()), None),
        InputSource::Spectrum(s) => ("spectrum", None, None, Some(s.clone())),
    };
    InputEcho { source: kind.into(), path, name, matrix: None, spectrum }
}

/// Runs `cut-tail` on every input, spreading jobs over `threads` workers.
/// Reports come back in input order; failed jobs become error records.
pub fn run_sweep(cfg: &JobConfig, threads: usize) -> Outcome {
    let jobs = &cfg.inputs;
    let workers = threads.clamp(1, jobs.len().max(1));
    let mut slots: Vec<Option<Report>> = vec![None; jobs.len()];
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    (w..jobs.len())
                        .step_by(workers)
                        .map(|i| {
                            let report = match run_cut_tail(cfg, &jobs[i]) {
                                Ok(r) => Report::CutTail(r),
                                Err(e) => Report::Error(ErrorReport {
                                    input: echo_for(&jobs[i]),
                                    message: e.to_string(),
                                    exit_code: e.exit_code(),
                                }),
                            };
                            (i, report)
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("sweep worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    let reports: Vec<Report> = slots.into_iter().map(|r| r.expect("every job reports")).collect();
    let codes = reports.iter().filter_map(|r| match r {
        Report::Error(e) => Some(e.exit_code),
        _ => None,
    });
    let exit_code = codes.fold(0, |acc, c| match (acc, c) {
        (1, _) | (_, 1) => 1,
        (a, c) => a.max(c),
    });
    Outcome { reports, exit_code }
}
