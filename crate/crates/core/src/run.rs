//! End-to-end runs: parse → assemble → solve → verify → report.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::heat_series::HeatSeries;
use crate::hhl::{solve_system, PipelineOptions, PipelineResult};
use crate::linsys::dump_matrix;
use crate::problem_file::parse_problem_file;
use crate::problems::{ProblemSolution, ProblemSpec};
use crate::report::{
    Backend, FluxSample, HhlSection, OutputFormat, ProbeResidual, SolveReport, Timings, UnknownValue, SCHEMA_VERSION,
};
use crate::specfun::EvalPoint;

/// Environment variable overriding [`DEFAULT_TOLERANCE`].
pub const TOLERANCE_ENV: &str = "STEFAN_HHL_TOLERANCE";
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Fractions of the time limit used when no probe times are given.
pub const DEFAULT_PROBE_FRACTIONS: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];

const PDE_POINTS_PER_PHASE: usize = 6;
const COINCIDENCE_TOL: f64 = 1e-12;
const IMAGINARY_WARNING: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem_file: PathBuf,
    pub backend: Backend,
    pub clock_qubits: Option<usize>,
    pub truncation: Option<usize>,
    pub collocation_count: Option<usize>,
    pub probe_times: Option<Vec<f64>>,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
    pub tolerance: f64,
    pub dump_matrix: Option<PathBuf>,
    pub dump_state: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(problem_file: impl Into<PathBuf>) -> Self {
        Self {
            problem_file: problem_file.into(),
            backend: Backend::Classical,
            clock_qubits: None,
            truncation: None,
            collocation_count: None,
            probe_times: None,
            output_path: None,
            output_format: OutputFormat::Json,
            tolerance: DEFAULT_TOLERANCE,
            dump_matrix: None,
            dump_state: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.backend.hhl() && self.clock_qubits.is_none() {
            return Err(Error::Config(format!(
                "backend {:?} needs --clock-qubits",
                self.backend
            )));
        }
        if self.dump_state.is_some() && !self.backend.hhl() {
            return Err(Error::Config("--dump-state needs an hhl backend".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Config(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if let Some(times) = &self.probe_times {
            if times.is_empty() {
                return Err(Error::Config("probe_times is empty".into()));
            }
        }
        Ok(())
    }
}

/// Reads [`TOLERANCE_ENV`], falling back to [`DEFAULT_TOLERANCE`].
pub fn tolerance_from_env() -> Result<f64> {
    match std::env::var(TOLERANCE_ENV) {
        Err(_) => Ok(DEFAULT_TOLERANCE),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
            _ => Err(Error::Config(format!(
                "{TOLERANCE_ENV}={s:?} is not a positive real number"
            ))),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Verified,
    ResidualFailure,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Verified => 0,
            RunStatus::ResidualFailure => 2,
        }
    }
}

/// Exit code for a run result: 0 verified, 2 residual failure, 1 error.
pub fn exit_code(r: &Result<RunOutcome>) -> i32 {
    match r {
        Ok(o) => o.status.exit_code(),
        Err(_) => 1,
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: SolveReport,
    pub rendered: String,
    pub status: RunStatus,
}

/// Everything a solve produces besides the report.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub matrix_dump: String,
    pub state_dump: Option<String>,
    pub classical: Option<ProblemSolution>,
    pub hhl: Option<ProblemSolution>,
}

/// Parses, solves, renders and (if configured) writes the report and dumps.
///
/// Output files are written through a temporary file and renamed, so an
/// error never leaves a partial report behind.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let start = Instant::now();
    let spec = parse_problem_file(&cfg.problem_file)?;
    let parse_ms = ms(start);
    let (mut report, artifacts) = solve_spec(spec, cfg)?;
    report.timings.parse_ms = parse_ms;
    report.timings.total_ms = ms(start);
    let rendered = report.render(cfg.output_format)?;
    if let Some(path) = &cfg.dump_matrix {
        write_atomic(path, &artifacts.matrix_dump)?;
    }
    if let (Some(path), Some(dump)) = (&cfg.dump_state, &artifacts.state_dump) {
        write_atomic(path, dump)?;
    }
    if let Some(path) = &cfg.output_path {
        write_atomic(path, &rendered)?;
    }
    let status = if report.verified {
        RunStatus::Verified
    } else {
        RunStatus::ResidualFailure
    };
    Ok(RunOutcome {
        report,
        rendered,
        status,
    })
}

/// Writes `contents` to `path` via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// Default probe times: fixed fractions of the problem's time limit (or of
/// 1 when the domain is unbounded).
pub fn default_probe_times(spec: &ProblemSpec) -> Vec<f64> {
    let limit = spec.time_limit();
    let limit = if limit.is_finite() { limit } else { 1.0 };
    DEFAULT_PROBE_FRACTIONS.iter().map(|f| f * limit).collect()
}

/// Applies the config overrides, solves with the requested backends and
/// verifies the result. No file I/O.
pub fn solve_spec(mut spec: ProblemSpec, cfg: &RunConfig) -> Result<(SolveReport, Artifacts)> {
    cfg.validate()?;
    let mut warnings = Vec::new();
    if let Some(n) = cfg.truncation {
        spec.set_truncation(n);
    }
    if let Some(k) = cfg.collocation_count {
        match &mut spec {
            ProblemSpec::TwoPhase(p) => p.collocation_count = k,
            _ => warnings.push(format!("collocation count ignored for kind {}", spec.kind())),
        }
    }
    spec.validate()?;

    let probes = cfg.probe_times.clone().unwrap_or_else(|| default_probe_times(&spec));
    let nodes = spec.collocation_times();
    for &t in &probes {
        if nodes
            .iter()
            .any(|&c| (c - t).abs() <= COINCIDENCE_TOL * c.abs().max(1.0))
        {
            warnings.push(format!("probe time {t} coincides with a collocation point"));
        }
    }

    let mut timings = Timings::default();
    let clock = Instant::now();
    let assembled = spec.assemble()?;
    timings.assemble_ms = ms(clock);
    warnings.extend(assembled.warnings.iter().cloned());
    let linear = assembled.to_linear_system()?;
    let matrix_dump = dump_matrix(linear.matrix());

    let mut classical = None;
    if cfg.backend.classical() {
        let clock = Instant::now();
        let sol = linear.classical_solve()?;
        timings.classical_ms = ms(clock);
        let x: Vec<f64> = sol.x.iter().map(|z| z.re).collect();
        classical = Some(x);
    }

    let mut hhl_run: Option<(Vec<f64>, PipelineResult)> = None;
    if cfg.backend.hhl() {
        let clock = Instant::now();
        let n_l = cfg.clock_qubits.expect("validated");
        let res = solve_system(&linear, &PipelineOptions::new(n_l))?;
        timings.hhl_ms = ms(clock);
        let norm = res.x.norm();
        let imag = res.x.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
        if imag > IMAGINARY_WARNING * norm.max(f64::MIN_POSITIVE) {
            warnings.push(format!(
                "hhl solution has imaginary parts up to {imag:.3e}; using real parts"
            ));
        }
        if let Some(w) = &res.embedding_warning {
            warnings.push(w.clone());
        }
        let x: Vec<f64> = res.x.iter().map(|z| z.re).collect();
        hhl_run = Some((x, res));
    }

    let clock = Instant::now();
    let classical_sol = classical.as_ref().map(|x| assembled.solution(x)).transpose()?;
    let hhl_sol = hhl_run.as_ref().map(|(x, _)| assembled.solution(x)).transpose()?;
    let primary = classical_sol
        .as_ref()
        .or(hhl_sol.as_ref())
        .expect("at least one backend");

    let boundary = spec.boundary_residuals(primary, &probes)?;
    let probe_residuals: Vec<ProbeResidual> = boundary
        .labels
        .iter()
        .zip(&boundary.points)
        .zip(&boundary.per_point)
        .map(|((label, pt), &value)| ProbeResidual {
            condition: label.split(" @ ").next().unwrap_or(label).to_string(),
            t: pt.t,
            value,
        })
        .collect();
    let pde_max_residual = pde_residual(&spec, primary, &probes)?;

    let flux = spec.flux_samples(primary, &probes)?;
    let flux_samples = (!flux.is_empty()).then(|| flux.into_iter().map(|(t, p)| FluxSample { t, p }).collect());

    let hhl = match (&hhl_run, &hhl_sol) {
        (Some((x, res)), Some(sol)) => Some(HhlSection {
            clock_qubits: res.layout.n_l,
            fidelity: res.fidelity,
            success_probability: res.hhl.success_probability,
            inversion_leakage: res.hhl.inversion_leakage,
            clock_residual: res.hhl.clock_residual,
            embedded: res.embedded,
            simulated_dim: res.simulated_dim,
            boundary_max_residual: spec.boundary_residuals(sol, &probes)?.max_residual,
            max_coefficient_gap: classical
                .as_ref()
                .map(|c| c.iter().zip(x).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))),
        }),
        _ => None,
    };
    timings.verify_ms = ms(clock);

    let labels = assembled.unknown_labels();
    let unknowns = labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| UnknownValue {
            label,
            classical: classical.as_ref().map(|x| x[i]),
            hhl: hhl_run.as_ref().map(|(x, _)| x[i]),
        })
        .collect();

    let verified = boundary.max_residual <= cfg.tolerance && pde_max_residual <= cfg.tolerance;
    let report = SolveReport {
        schema_version: SCHEMA_VERSION,
        problem_file: cfg.problem_file.display().to_string(),
        problem_kind: spec.kind(),
        backend: cfg.backend,
        truncation: spec.truncation(),
        dim: assembled.dim(),
        unknowns,
        condition_number: assembled
            .condition_number
            .is_finite()
            .then_some(assembled.condition_number),
        residual_tolerance: cfg.tolerance,
        pde_max_residual,
        boundary_max_residual: boundary.max_residual,
        verified,
        probe_residuals,
        hhl,
        flux_samples,
        warnings,
        timings,
    };
    let artifacts = Artifacts {
        matrix_dump,
        state_dump: hhl_run.as_ref().map(|(_, r)| r.final_state.dump()),
        classical: classical_sol,
        hhl: hhl_sol,
    };
    Ok((report, artifacts))
}

/// Normalized PDE residual of every phase on a grid spanning each phase's
/// region at the probe times.
pub fn pde_residual(spec: &ProblemSpec, sol: &ProblemSolution, probes: &[f64]) -> Result<f64> {
    let (boundary, far) = match spec {
        ProblemSpec::OnePhase(p) => (&p.boundary, None),
        ProblemSpec::Model(p) => (&p.boundary, None),
        ProblemSpec::TwoPhase(p) => (&p.boundary, p.far_field_cutoff),
    };
    let mut worst = 0.0f64;
    let mut check = |s: &HeatSeries, pts: Vec<EvalPoint>| -> Result<()> {
        if !pts.is_empty() {
            worst = worst.max(s.pde_residual(&pts)?.max_residual);
        }
        Ok(())
    };
    let n = PDE_POINTS_PER_PHASE;
    let mut inner = Vec::new();
    let mut outer = Vec::new();
    for &t in probes {
        let a = boundary.position(t);
        if a > 0.0 {
            for i in 1..=n {
                inner.push(EvalPoint::new(a * i as f64 / n as f64, t)?);
            }
        }
        let width = match far {
            Some(x) if x > a => x - a,
            _ => a.max(1.0),
        };
        for i in 0..n {
            let x = a + width * i as f64 / (n - 1) as f64;
            if x > 0.0 {
                outer.push(EvalPoint::new(x, t)?);
            }
        }
    }
    check(&sol.phase1, inner)?;
    if let Some(s2) = &sol.phase2 {
        check(s2, outer)?;
    }
    Ok(worst)
}
