//! Solve reports and their JSON / CSV renderings.
//!
//! Field order is fixed by the struct declarations below and recorded in
//! `schema/solve_report.schema.json`. `timings` is always last and is the
//! only field that varies between identical runs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::problems::ProblemKind;

pub const SCHEMA_VERSION: &str = "1.0.0";

/// The JSON schema shipped with the crate.
pub const SCHEMA: &str = include_str!("../schema/solve_report.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Classical,
    Hhl,
    Both,
}

impl Backend {
    pub fn classical(self) -> bool {
        matches!(self, Backend::Classical | Backend::Both)
    }

    pub fn hhl(self) -> bool {
        matches!(self, Backend::Hhl | Backend::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnknownValue {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classical: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hhl: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeResidual {
    pub condition: String,
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HhlSection {
    pub clock_qubits: usize,
    pub fidelity: f64,
    pub success_probability: f64,
    pub inversion_leakage: f64,
    pub clock_residual: f64,
    pub embedded: bool,
    pub simulated_dim: usize,
    pub boundary_max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_coefficient_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluxSample {
    pub t: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Timings {
    pub parse_ms: f64,
    pub assemble_ms: f64,
    pub classical_ms: f64,
    pub hhl_ms: f64,
    pub verify_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub schema_version: &'static str,
    pub problem_file: String,
    pub problem_kind: ProblemKind,
    pub backend: Backend,
    pub truncation: usize,
    pub dim: usize,
    pub unknowns: Vec<UnknownValue>,
    /// `null` when the assembled matrix is singular.
    pub condition_number: Option<f64>,
    pub residual_tolerance: f64,
    pub pde_max_residual: f64,
    pub boundary_max_residual: f64,
    pub verified: bool,
    pub probe_residuals: Vec<ProbeResidual>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hhl: Option<HhlSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flux_samples: Option<Vec<FluxSample>>,
    pub warnings: Vec<String>,
    pub timings: Timings,
}

impl SolveReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Report(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    /// `section,label,t,value,hhl_value`: one row per unknown, then one per
    /// probe-time residual.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::Report(e.to_string());
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        w.write_record(["section", "label", "t", "value", "hhl_value"])
            .map_err(err)?;
        for u in &self.unknowns {
            w.write_record(["unknown", &u.label, "", &opt(u.classical), &opt(u.hhl)])
                .map_err(err)?;
        }
        for r in &self.probe_residuals {
            w.write_record(["residual", &r.condition, &r.t.to_string(), &r.value.to_string(), ""])
                .map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Report(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Report(e.to_string()))
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }
}
