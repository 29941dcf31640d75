//! Inverse Stefan problems and their reduction to linear systems.
//!
//! Three problem kinds are supported:
//!
//! * [`OnePhaseISP`]: one phase on `0 < x < α√t`, assembled by matching
//!   powers of `t` in the boundary conditions.
//! * [`ModelProblemD0`]: the collapsing-domain model problem; its system is
//!   diagonal and the flux is reconstructed afterwards.
//! * [`TwoPhaseISP`]: two phases meeting at `x = α(t)`, assembled by
//!   collocation at Chebyshev–Gauss points in `(0, T_a)`.
//!
//! Every assembler returns an [`AssembledSystem`] whose rows and columns are
//! labelled, so a solution vector can be mapped back to heat series.

mod manufactured;
mod model;
mod one_phase;
mod two_phase;

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::heat_series::{Family, HeatSeries, ResidualReport, SeriesError};
use crate::linsys::{self, LinearSystem, LinsysError, Provenance};
use crate::specfun::{EvalPoint, SpecFunError};

pub use manufactured::{manufacture_model, manufacture_one_phase, manufacture_two_phase};
pub use model::reconstruct_flux;
pub use two_phase::chebyshev_points;

/// Condition numbers above this are flagged as numerically rank deficient.
pub const CONDITION_WARNING: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("system has {rows} equations for {unknowns} unknowns")]
    DimensionMismatch { rows: usize, unknowns: usize },
    #[error("system is structurally singular: {0}")]
    StructurallySingular(String),
    #[error("singular data: {0}")]
    SingularData(String),
    #[error("L_{n}^β(−α²/4a²) vanishes; A_{n} is undetermined")]
    ZeroLaguerre { n: usize },
    #[error("flux is unbounded at t = {0} (dα/dt blows up at the origin)")]
    FluxSingularity(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("solution has {got} entries, system has {expected} unknowns")]
    SolutionLength { expected: usize, got: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Linsys(#[from] LinsysError),
}

pub type Result<T> = std::result::Result<T, ProblemError>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> ProblemError {
    ProblemError::Invalid {
        field,
        reason: reason.into(),
    }
}

/// Motion of the phase boundary `x = α(t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeBoundary {
    /// `α(t) = c·√t`.
    SelfSimilar { coeff: f64 },
    /// `α(t) = Σ c_i t^i` with `c_0 = 0`.
    Polynomial { coeffs: Vec<f64> },
}

impl FreeBoundary {
    pub fn position(&self, t: f64) -> f64 {
        match self {
            FreeBoundary::SelfSimilar { coeff } => coeff * t.sqrt(),
            FreeBoundary::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
        }
    }

    /// `dα/dt`; requires `t > 0`.
    pub fn velocity(&self, t: f64) -> Result<f64> {
        if t <= 0.0 || !t.is_finite() {
            return Err(ProblemError::FluxSingularity(t));
        }
        Ok(match self {
            FreeBoundary::SelfSimilar { coeff } => coeff / (2.0 * t.sqrt()),
            FreeBoundary::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (i, c)| acc * t + i as f64 * c),
        })
    }

    pub fn self_similar_coeff(&self) -> Option<f64> {
        match self {
            FreeBoundary::SelfSimilar { coeff } => Some(*coeff),
            FreeBoundary::Polynomial { .. } => None,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            FreeBoundary::SelfSimilar { coeff } => {
                if !coeff.is_finite() || *coeff < 0.0 {
                    return Err(invalid("boundary", "self-similar coefficient must be finite and ≥ 0"));
                }
            }
            FreeBoundary::Polynomial { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(invalid(
                        "boundary",
                        "polynomial coefficients must be finite and nonempty",
                    ));
                }
                if coeffs[0] != 0.0 {
                    return Err(invalid("boundary", "α(0) must be 0"));
                }
            }
        }
        Ok(())
    }
}

/// Arc flux data for the one-phase problem.
#[derive(Debug, Clone, PartialEq)]
pub enum FluxSpec {
    /// Taylor coefficients `P^{(n)}(0)/n!`.
    Known(Vec<f64>),
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnePhaseISP {
    pub nu: f64,
    pub diffusivity: f64,
    pub melt_temp: f64,
    /// Taylor coefficients of the temperature imposed on `x = α(t)`.
    /// Empty means the constant `melt_temp`; otherwise entry 0 must equal it.
    pub boundary_temp: Vec<f64>,
    pub robin_beta: f64,
    pub robin_gamma: f64,
    pub latent_heat: f64,
    pub density: f64,
    pub conductivity: f64,
    pub boundary: FreeBoundary,
    pub flux: FluxSpec,
    pub truncation: usize,
    /// Lifts the `ν > 0`, `t ≤ 1` restriction.
    pub extended_domain: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelProblemD0 {
    pub nu: f64,
    pub diffusivity: f64,
    pub boundary: FreeBoundary,
    /// Taylor coefficients `f^{(n)}(0)/n!` of the boundary temperature.
    pub f_taylor: Vec<f64>,
    pub conductivity: f64,
    pub latent_heat: f64,
    pub density: f64,
    pub truncation: usize,
    pub extended_domain: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhaseISP {
    pub nu: f64,
    pub a1: f64,
    pub a2: f64,
    pub melt_temp: f64,
    pub robin_beta: f64,
    pub robin_gamma: f64,
    pub latent_heat: f64,
    pub density: f64,
    pub conductivity1: f64,
    pub conductivity2: f64,
    /// `f^{(2n)}(0)/(2n)!`, the even Taylor coefficients of `θ₂(x, 0)`.
    pub initial_profile_taylor: Vec<f64>,
    pub boundary: FreeBoundary,
    /// Cutoff `X` for the far-field row family `θ₂(X, t) = 0`.
    pub far_field_cutoff: Option<f64>,
    /// Number of collocation points (the first ones) carrying a far-field row.
    pub far_field_points: usize,
    pub collocation_count: usize,
    pub horizon: f64,
    /// Taylor terms of the unknown flux; derived from the row count if unset.
    pub flux_terms: Option<usize>,
    pub truncation: usize,
    pub extended_domain: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    OnePhase(OnePhaseISP),
    Model(ModelProblemD0),
    TwoPhase(TwoPhaseISP),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    OnePhase,
    Model,
    TwoPhase,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::OnePhase => "one_phase",
            ProblemKind::Model => "model",
            ProblemKind::TwoPhase => "two_phase",
        })
    }
}

impl ProblemSpec {
    pub fn kind(&self) -> ProblemKind {
        match self {
            ProblemSpec::OnePhase(_) => ProblemKind::OnePhase,
            ProblemSpec::Model(_) => ProblemKind::Model,
            ProblemSpec::TwoPhase(_) => ProblemKind::TwoPhase,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ProblemSpec::OnePhase(p) => p.validate(),
            ProblemSpec::Model(p) => p.validate(),
            ProblemSpec::TwoPhase(p) => p.validate(),
        }
    }

    pub fn assemble(&self) -> Result<AssembledSystem> {
        match self {
            ProblemSpec::OnePhase(p) => p.assemble(),
            ProblemSpec::Model(p) => p.assemble(),
            ProblemSpec::TwoPhase(p) => p.assemble(),
        }
    }

    pub fn boundary_residuals(&self, sol: &ProblemSolution, probe_times: &[f64]) -> Result<ResidualReport> {
        match self {
            ProblemSpec::OnePhase(p) => p.boundary_residuals(sol, probe_times),
            ProblemSpec::Model(p) => p.boundary_residuals(sol, probe_times),
            ProblemSpec::TwoPhase(p) => p.boundary_residuals(sol, probe_times),
        }
    }

    pub fn truncation(&self) -> usize {
        match self {
            ProblemSpec::OnePhase(p) => p.truncation,
            ProblemSpec::Model(p) => p.truncation,
            ProblemSpec::TwoPhase(p) => p.truncation,
        }
    }

    pub fn set_truncation(&mut self, n: usize) {
        match self {
            ProblemSpec::OnePhase(p) => p.truncation = n,
            ProblemSpec::Model(p) => p.truncation = n,
            ProblemSpec::TwoPhase(p) => p.truncation = n,
        }
    }

    /// Collocation times (two-phase only).
    pub fn collocation_times(&self) -> Vec<f64> {
        match self {
            ProblemSpec::TwoPhase(p) => chebyshev_points(p.collocation_count, p.horizon),
            _ => Vec::new(),
        }
    }

    /// Largest admissible probe time.
    pub fn time_limit(&self) -> f64 {
        match self {
            ProblemSpec::OnePhase(p) if !p.extended_domain => 1.0,
            ProblemSpec::Model(p) if !p.extended_domain => 1.0,
            ProblemSpec::TwoPhase(p) => p.horizon,
            _ => f64::INFINITY,
        }
    }

    /// `(t, P(t))` samples of the arc flux.
    pub fn flux_samples(&self, sol: &ProblemSolution, times: &[f64]) -> Result<Vec<(f64, f64)>> {
        let values = match (self, &sol.flux_taylor) {
            (ProblemSpec::Model(p), _) => reconstruct_flux(p, &sol.phase1, times)?,
            (_, Some(coeffs)) => times.iter().map(|&t| horner(coeffs, t)).collect(),
            (_, None) => return Ok(Vec::new()),
        };
        Ok(times.iter().copied().zip(values).collect())
    }
}

/// What a column of the assembled matrix stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Unknown {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    P(usize),
}

impl fmt::Display for Unknown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (s, n) = match self {
            Unknown::A(n) => ("A", n),
            Unknown::B(n) => ("B", n),
            Unknown::C(n) => ("C", n),
            Unknown::D(n) => ("D", n),
            Unknown::P(n) => ("P", n),
        };
        write!(f, "{s}_{n}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Flux,
    Isotherm,
    Isotherm1,
    Isotherm2,
    Stefan,
    InitialData,
    FarField,
    BoundaryTemperature,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Flux => "flux",
            Condition::Isotherm => "isotherm",
            Condition::Isotherm1 => "isotherm1",
            Condition::Isotherm2 => "isotherm2",
            Condition::Stefan => "stefan",
            Condition::InitialData => "initial",
            Condition::FarField => "far_field",
            Condition::BoundaryTemperature => "boundary_temp",
        })
    }
}

/// Where a row was taken.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowSite {
    /// Coefficient of `t^n`.
    Power(usize),
    /// Pointwise at time `t`.
    Point(f64),
    /// Coefficient of `x^{2n}` in the initial profile.
    InitialPower(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RowProvenance {
    pub condition: Condition,
    pub site: RowSite,
}

impl fmt::Display for RowProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.site {
            RowSite::Power(n) => write!(f, "{} t^{n}", self.condition),
            RowSite::Point(t) => write!(f, "{} @ t={t}", self.condition),
            RowSite::InitialPower(n) => write!(f, "{} x^{}", self.condition, 2 * n),
        }
    }
}

/// Parameters needed to turn a solution vector back into heat series.
#[derive(Debug, Clone, PartialEq)]
struct SolutionContext {
    nu: f64,
    a1: f64,
    a2: Option<f64>,
    truncation: usize,
    known_flux: Option<Vec<f64>>,
}

/// A square labelled system `M c = r`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssembledSystem {
    pub kind: ProblemKind,
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub unknowns: Vec<Unknown>,
    pub row_provenance: Vec<RowProvenance>,
    pub condition_number: f64,
    pub warnings: Vec<String>,
    context: SolutionContext,
}

impl AssembledSystem {
    fn build(
        kind: ProblemKind,
        unknowns: Vec<Unknown>,
        rows: Vec<(RowProvenance, Vec<f64>, f64)>,
        context: SolutionContext,
    ) -> Result<Self> {
        let m = unknowns.len();
        if rows.len() != m {
            return Err(ProblemError::DimensionMismatch {
                rows: rows.len(),
                unknowns: m,
            });
        }
        let mut matrix = DMatrix::zeros(m, m);
        let mut rhs = DVector::zeros(m);
        let mut row_provenance = Vec::with_capacity(m);
        for (i, (prov, coeffs, r)) in rows.into_iter().enumerate() {
            debug_assert_eq!(coeffs.len(), m);
            for (j, v) in coeffs.into_iter().enumerate() {
                if !v.is_finite() {
                    return Err(invalid("matrix", format!("non-finite entry in row '{prov}'")));
                }
                matrix[(i, j)] = v;
            }
            rhs[i] = r;
            row_provenance.push(prov);
        }
        let condition_number = if m == 0 {
            1.0
        } else {
            linsys::condition_number_real(&matrix)
        };
        let mut warnings = Vec::new();
        if !(condition_number <= CONDITION_WARNING) {
            warnings.push(format!(
                "condition number {condition_number:.3e} exceeds {CONDITION_WARNING:e}; system is numerically rank deficient"
            ));
        }
        Ok(Self {
            kind,
            matrix,
            rhs,
            unknowns,
            row_provenance,
            condition_number,
            warnings,
            context,
        })
    }

    pub fn dim(&self) -> usize {
        self.unknowns.len()
    }

    pub fn unknown_labels(&self) -> Vec<String> {
        self.unknowns.iter().map(ToString::to_string).collect()
    }

    pub fn row_labels(&self) -> Vec<String> {
        self.row_provenance.iter().map(ToString::to_string).collect()
    }

    pub fn to_linear_system(&self) -> Result<LinearSystem> {
        Ok(
            LinearSystem::from_real(&self.matrix, &self.rhs)?.with_provenance(Provenance {
                unknown_labels: self.unknown_labels(),
                row_labels: self.row_labels(),
            }),
        )
    }

    /// Maps a solution vector onto heat series and flux coefficients.
    pub fn solution(&self, x: &[f64]) -> Result<ProblemSolution> {
        if x.len() != self.dim() {
            return Err(ProblemError::SolutionLength {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let n1 = self.context.truncation + 1;
        let mut a = vec![0.0; n1];
        let mut b = vec![0.0; n1];
        let mut c = vec![0.0; n1];
        let mut d = vec![0.0; n1];
        let mut p = Vec::new();
        for (u, &v) in self.unknowns.iter().zip(x) {
            match *u {
                Unknown::A(n) => a[n] = v,
                Unknown::B(n) => b[n] = v,
                Unknown::C(n) => c[n] = v,
                Unknown::D(n) => d[n] = v,
                Unknown::P(n) => {
                    if p.len() <= n {
                        p.resize(n + 1, 0.0);
                    }
                    p[n] = v;
                }
            }
        }
        let phase1 = HeatSeries::new(self.context.a1, self.context.nu, a, b)?;
        let phase2 = match self.context.a2 {
            Some(a2) => Some(HeatSeries::new(a2, self.context.nu, c, d)?),
            None => None,
        };
        let flux_taylor = match (&self.context.known_flux, self.kind) {
            (Some(known), _) => Some(known.clone()),
            (None, ProblemKind::Model) => None,
            (None, _) => Some(p),
        };
        Ok(ProblemSolution {
            phase1,
            phase2,
            flux_taylor,
        })
    }

    /// Vector of unknowns matching `sol`, in column order.
    pub fn coefficients_of(&self, sol: &ProblemSolution) -> Vec<f64> {
        let get = |v: &[f64], n: usize| v.get(n).copied().unwrap_or(0.0);
        let empty = Vec::new();
        let flux = sol.flux_taylor.as_ref().unwrap_or(&empty);
        self.unknowns
            .iter()
            .map(|u| match *u {
                Unknown::A(n) => get(sol.phase1.coeffs_a(), n),
                Unknown::B(n) => get(sol.phase1.coeffs_b(), n),
                Unknown::C(n) => sol.phase2.as_ref().map_or(0.0, |s| get(s.coeffs_a(), n)),
                Unknown::D(n) => sol.phase2.as_ref().map_or(0.0, |s| get(s.coeffs_b(), n)),
                Unknown::P(n) => get(flux, n),
            })
            .collect()
    }

    /// `M c − r` for a candidate coefficient vector.
    pub fn row_residuals(&self, x: &[f64]) -> Vec<f64> {
        let x = DVector::from_column_slice(x);
        (&self.matrix * x - &self.rhs).iter().copied().collect()
    }
}

/// Heat series for each phase plus the flux polynomial when it is part of
/// the solution.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSolution {
    pub phase1: HeatSeries,
    pub phase2: Option<HeatSeries>,
    pub flux_taylor: Option<Vec<f64>>,
}

pub(crate) fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

pub(crate) fn check_finite(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, "must be finite"))
    }
}

pub(crate) fn check_all_finite(field: &'static str, v: &[f64]) -> Result<()> {
    v.iter().try_for_each(|&x| check_finite(field, x))
}

pub(crate) fn check_domain(nu: f64, diffusivity: f64, extended: bool) -> Result<()> {
    check_finite("nu", nu)?;
    if !(diffusivity > 0.0 && diffusivity.is_finite()) {
        return Err(invalid("diffusivity", "must be > 0"));
    }
    if !extended && nu <= 0.0 {
        return Err(invalid("nu", "must be > 0 (set extended_domain to allow ν ≤ 0)"));
    }
    Ok(())
}

pub(crate) fn check_taylor_len(field: &'static str, v: &[f64], truncation: usize) -> Result<()> {
    if v.len() > truncation + 1 {
        return Err(invalid(
            field,
            format!(
                "{} Taylor terms given but truncation allows {}",
                v.len(),
                truncation + 1
            ),
        ));
    }
    Ok(())
}

pub(crate) fn check_probe_times(times: &[f64]) -> Result<()> {
    if let Some(&t) = times.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(invalid("probe_times", format!("{t} is not a positive time")));
    }
    Ok(())
}

/// Unit-coefficient basis terms of a heat series.
pub(crate) struct Basis {
    zero: HeatSeries,
}

impl Basis {
    pub(crate) fn new(diffusivity: f64, nu: f64, truncation: usize) -> Result<Self> {
        Ok(Self {
            zero: HeatSeries::zero(diffusivity, nu, truncation)?,
        })
    }

    pub(crate) fn value(&self, family: Family, n: usize, x: f64, t: f64) -> Result<f64> {
        Ok(self.zero.term_value(family, n, &EvalPoint::new(x, t)?)?)
    }

    pub(crate) fn ddx(&self, family: Family, n: usize, x: f64, t: f64) -> Result<f64> {
        Ok(self.zero.term_jet(family, n, &EvalPoint::new(x, t)?)?.ddx)
    }

    pub(crate) fn coincide(&self) -> bool {
        self.zero.families_coincide()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_motion() {
        let s = FreeBoundary::SelfSimilar { coeff: 2.0 };
        assert_eq!(s.position(4.0), 4.0);
        assert_eq!(s.velocity(4.0).unwrap(), 0.5);
        assert!(matches!(s.velocity(0.0), Err(ProblemError::FluxSingularity(_))));
        let p = FreeBoundary::Polynomial {
            coeffs: vec![0.0, 1.0, 3.0],
        };
        assert_eq!(p.position(2.0), 14.0);
        assert_eq!(p.velocity(2.0).unwrap(), 13.0);
        assert!(FreeBoundary::Polynomial { coeffs: vec![1.0] }.validate().is_err());
    }

    #[test]
    fn provenance_labels() {
        let r = RowProvenance {
            condition: Condition::Stefan,
            site: RowSite::Power(2),
        };
        assert_eq!(r.to_string(), "stefan t^2");
        let r = RowProvenance {
            condition: Condition::InitialData,
            site: RowSite::InitialPower(1),
        };
        assert_eq!(r.to_string(), "initial x^2");
        assert_eq!(Unknown::D(3).to_string(), "D_3");
    }
}
