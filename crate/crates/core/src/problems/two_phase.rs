//! Two-phase inverse problem, assembled by collocation.
//!
//! Phase 1 (`A_n`, `B_n`, diffusivity `a₁`) occupies `0 < x < α(t)`, phase 2
//! (`C_n`, `D_n`, diffusivity `a₂`) lies beyond it. The unknown flux is
//! `P(t) = Σ_{m<n_p} P_m t^m`.
//!
//! Exact rows come from the initial profile. As `t → 0` at fixed `x` the
//! regular term of index `n` tends to `x^{2n}/n!` and the singular one to
//! `Γ(2−μ) x^{2n}/n!`, hence
//!
//! ```text
//! (C_n + Γ(2−μ) D_n) / n! = f^{(2n)}(0)/(2n)!,   n = 0..=N.
//! ```
//!
//! Pointwise rows at each collocation time `t_j`:
//!
//! * flux: `β θ₁(0, t_j) + γ ∂ₓθ₁(0, t_j) − P(t_j) = 0` (regular family),
//! * isotherms: `θ₁(α, t_j) = T_m`, `θ₂(α, t_j) = T_m`,
//! * Stefan: `−λ₁ ∂ₓθ₁ + λ₂ ∂ₓθ₂ = Lρ α'(t_j)` at `x = α(t_j)`,
//! * far field (optional, first few points): `θ₂(X, t_j) = 0`.
//!
//! Only the initial, isotherm-2 and far-field rows touch phase 2 alone, so a
//! nonsingular square system needs `k + far_field_points ≤ N + 1`; squareness
//! then fixes `n_p = 4k + far_field_points − 3(N + 1)`.

use std::f64::consts::PI;

use crate::heat_series::{mu_of, singular_family_initial_factor, Family, ResidualReport};
use crate::specfun::EvalPoint;

use super::{
    check_all_finite, check_domain, check_finite, check_probe_times, check_taylor_len, horner, invalid,
    AssembledSystem, Basis, Condition, ProblemError, ProblemKind, ProblemSolution, Result, RowProvenance, RowSite,
    SolutionContext, TwoPhaseISP, Unknown,
};

/// Chebyshev–Gauss points `T_a(1 + cos((2j−1)π/2k))/2`, ascending; all lie
/// strictly inside `(0, T_a)`.
pub fn chebyshev_points(k: usize, horizon: f64) -> Vec<f64> {
    let mut t: Vec<f64> = (1..=k)
        .map(|j| horizon * (1.0 + ((2 * j - 1) as f64 * PI / (2 * k) as f64).cos()) / 2.0)
        .collect();
    t.reverse();
    t
}

pub(super) struct Layout {
    pub(super) two_families: bool,
    pub(super) flux_terms: usize,
    pub(super) far_points: usize,
}

impl TwoPhaseISP {
    pub fn validate(&self) -> Result<()> {
        check_domain(self.nu, self.a1, self.extended_domain)?;
        if !(self.a2 > 0.0 && self.a2.is_finite()) {
            return Err(invalid("a2", "must be > 0"));
        }
        for (name, v) in [
            ("melt_temp", self.melt_temp),
            ("robin_beta", self.robin_beta),
            ("robin_gamma", self.robin_gamma),
            ("latent_heat", self.latent_heat),
            ("density", self.density),
            ("conductivity1", self.conductivity1),
            ("conductivity2", self.conductivity2),
        ] {
            check_finite(name, v)?;
        }
        self.boundary.validate()?;
        check_all_finite("initial_profile_taylor", &self.initial_profile_taylor)?;
        check_taylor_len("initial_profile_taylor", &self.initial_profile_taylor, self.truncation)?;
        if self.initial_profile_taylor.first() != Some(&self.melt_temp) {
            return Err(invalid(
                "initial_profile_taylor",
                "entry 0 must equal melt_temp (concordance f(0) = T_m)",
            ));
        }
        if self.collocation_count == 0 {
            return Err(invalid("collocation_count", "must be ≥ 1"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(invalid("horizon", "must be > 0"));
        }
        if !self.extended_domain && self.horizon > 1.0 {
            return Err(invalid("horizon", "must be ≤ 1 (set extended_domain)"));
        }
        if let Some(x) = self.far_field_cutoff {
            if !(x > 0.0 && x.is_finite()) {
                return Err(invalid("far_field_cutoff", "must be > 0"));
            }
            if self.far_field_points > self.collocation_count {
                return Err(invalid("far_field_points", "cannot exceed collocation_count"));
            }
        }
        Ok(())
    }

    pub(super) fn layout(&self, two_families: bool) -> Result<Layout> {
        let n1 = self.truncation + 1;
        let k = self.collocation_count;
        let far_points = if self.far_field_cutoff.is_some() {
            self.far_field_points
        } else {
            0
        };
        if !two_families && far_points > 0 {
            return Err(ProblemError::Unsupported(
                "far-field rows with coincident families (ν = 1) overdetermine phase 2".into(),
            ));
        }
        let (rows, coefficient_unknowns, phase2_rows) = if two_families {
            (n1 + 4 * k + far_points, 4 * n1, n1 + k + far_points)
        } else {
            (n1 + 2 * k, 2 * n1, n1)
        };
        let flux_terms = match self.flux_terms {
            Some(q) if coefficient_unknowns + q != rows => {
                return Err(ProblemError::DimensionMismatch {
                    rows,
                    unknowns: coefficient_unknowns + q,
                })
            }
            Some(q) => q,
            None => rows
                .checked_sub(coefficient_unknowns)
                .ok_or(ProblemError::DimensionMismatch {
                    rows,
                    unknowns: coefficient_unknowns,
                })?,
        };
        let phase2_unknowns = if two_families { 2 * n1 } else { n1 };
        if phase2_rows > phase2_unknowns {
            return Err(ProblemError::StructurallySingular(format!(
                "{phase2_rows} rows constrain only the {phase2_unknowns} phase-2 coefficients; \
                 need collocation_count + far_field_points ≤ N + 1"
            )));
        }
        if !two_families && k > n1 {
            return Err(ProblemError::StructurallySingular(format!(
                "{k} isotherm rows for {n1} phase-1 coefficients"
            )));
        }
        if flux_terms > k {
            return Err(ProblemError::StructurallySingular(format!(
                "{flux_terms} flux terms but only {k} flux rows"
            )));
        }
        Ok(Layout {
            two_families,
            flux_terms,
            far_points,
        })
    }

    /// Even Taylor coefficients of the initial profile, padded to `N + 1`.
    pub fn initial_data(&self) -> Vec<f64> {
        let mut f = self.initial_profile_taylor.clone();
        f.resize(self.truncation + 1, 0.0);
        f
    }

    pub fn collocation_times(&self) -> Vec<f64> {
        chebyshev_points(self.collocation_count, self.horizon)
    }

    pub fn assemble(&self) -> Result<AssembledSystem> {
        self.validate()?;
        let n1 = self.truncation + 1;
        let b1 = Basis::new(self.a1, self.nu, self.truncation)?;
        let b2 = Basis::new(self.a2, self.nu, self.truncation)?;
        let layout = self.layout(!b1.coincide())?;
        let two = layout.two_families;

        let mut unknowns: Vec<Unknown> = (0..n1).map(Unknown::A).collect();
        if two {
            unknowns.extend((0..n1).map(Unknown::B));
        }
        unknowns.extend((0..n1).map(Unknown::C));
        if two {
            unknowns.extend((0..n1).map(Unknown::D));
        }
        unknowns.extend((0..layout.flux_terms).map(Unknown::P));
        let m = unknowns.len();
        let col = |u: Unknown| unknowns.iter().position(|&v| v == u).expect("unknown present");

        let mut rows = Vec::with_capacity(m);
        let gamma_factor = if two {
            singular_family_initial_factor(mu_of(self.nu))?
        } else {
            0.0
        };
        let mut factorial = 1.0;
        for (n, &f) in self.initial_data().iter().enumerate() {
            if n > 0 {
                factorial *= n as f64;
            }
            let mut c = vec![0.0; m];
            c[col(Unknown::C(n))] = 1.0 / factorial;
            if two {
                c[col(Unknown::D(n))] = gamma_factor / factorial;
            }
            rows.push((
                RowProvenance {
                    condition: Condition::InitialData,
                    site: RowSite::InitialPower(n),
                },
                c,
                f,
            ));
        }

        let times = self.collocation_times();
        let at = |condition, t| RowProvenance {
            condition,
            site: RowSite::Point(t),
        };
        for &t in &times {
            let mut c = vec![0.0; m];
            for n in 0..n1 {
                c[col(Unknown::A(n))] = self.robin_beta * b1.value(Family::Regular, n, 0.0, t)?
                    + self.robin_gamma * b1.ddx(Family::Regular, n, 0.0, t)?;
            }
            let mut tp = 1.0;
            for q in 0..layout.flux_terms {
                c[col(Unknown::P(q))] = -tp;
                tp *= t;
            }
            rows.push((at(Condition::Flux, t), c, 0.0));
        }
        for &t in &times {
            let x = self.boundary.position(t);
            let mut c = vec![0.0; m];
            for n in 0..n1 {
                c[col(Unknown::A(n))] = b1.value(Family::Regular, n, x, t)?;
                if two {
                    c[col(Unknown::B(n))] = b1.value(Family::Singular, n, x, t)?;
                }
            }
            rows.push((at(Condition::Isotherm1, t), c, self.melt_temp));
        }
        if two {
            for &t in &times {
                let x = self.boundary.position(t);
                let mut c = vec![0.0; m];
                for n in 0..n1 {
                    c[col(Unknown::C(n))] = b2.value(Family::Regular, n, x, t)?;
                    c[col(Unknown::D(n))] = b2.value(Family::Singular, n, x, t)?;
                }
                rows.push((at(Condition::Isotherm2, t), c, self.melt_temp));
            }
            let lrho = self.latent_heat * self.density;
            for &t in &times {
                let x = self.boundary.position(t);
                let mut c = vec![0.0; m];
                for n in 0..n1 {
                    c[col(Unknown::A(n))] = -self.conductivity1 * b1.ddx(Family::Regular, n, x, t)?;
                    c[col(Unknown::B(n))] = -self.conductivity1 * b1.ddx(Family::Singular, n, x, t)?;
                    c[col(Unknown::C(n))] = self.conductivity2 * b2.ddx(Family::Regular, n, x, t)?;
                    c[col(Unknown::D(n))] = self.conductivity2 * b2.ddx(Family::Singular, n, x, t)?;
                }
                rows.push((at(Condition::Stefan, t), c, lrho * self.boundary.velocity(t)?));
            }
            if let Some(cutoff) = self.far_field_cutoff {
                for &t in times.iter().take(layout.far_points) {
                    let mut c = vec![0.0; m];
                    for n in 0..n1 {
                        c[col(Unknown::C(n))] = b2.value(Family::Regular, n, cutoff, t)?;
                        c[col(Unknown::D(n))] = b2.value(Family::Singular, n, cutoff, t)?;
                    }
                    rows.push((at(Condition::FarField, t), c, 0.0));
                }
            }
        }

        AssembledSystem::build(
            ProblemKind::TwoPhase,
            unknowns,
            rows,
            SolutionContext {
                nu: self.nu,
                a1: self.a1,
                a2: Some(self.a2),
                truncation: self.truncation,
                known_flux: None,
            },
        )
    }

    pub fn boundary_residuals(&self, sol: &ProblemSolution, probe_times: &[f64]) -> Result<ResidualReport> {
        check_probe_times(probe_times)?;
        if let Some(&t) = probe_times.iter().find(|&&t| t > self.horizon) {
            return Err(invalid("probe_times", format!("{t} lies beyond the horizon")));
        }
        let s1 = &sol.phase1;
        let s2 = sol
            .phase2
            .as_ref()
            .ok_or_else(|| invalid("solution", "two-phase solution needs a second phase"))?;
        let regular = s1.regular_part();
        let flux = sol.flux_taylor.clone().unwrap_or_default();
        let lrho = self.latent_heat * self.density;
        let mut points = Vec::new();
        let mut values = Vec::new();
        let mut labels = Vec::new();
        let mut push = |pt: EvalPoint, v: f64, label: String| {
            points.push(pt);
            values.push(v.abs());
            labels.push(label);
        };
        for &t in probe_times {
            let origin = EvalPoint::new(0.0, t)?;
            let lhs = self.robin_beta * regular.evaluate(&origin)? + self.robin_gamma * regular.ddx(&origin)?;
            push(origin, lhs - horner(&flux, t), format!("flux @ t={t}"));

            let at = EvalPoint::new(self.boundary.position(t), t)?;
            push(at, s1.evaluate(&at)? - self.melt_temp, format!("isotherm1 @ t={t}"));
            push(at, s2.evaluate(&at)? - self.melt_temp, format!("isotherm2 @ t={t}"));
            let stefan = -self.conductivity1 * s1.ddx(&at)? + self.conductivity2 * s2.ddx(&at)?
                - lrho * self.boundary.velocity(t)?;
            push(at, stefan, format!("stefan @ t={t}"));
            if let Some(cutoff) = self.far_field_cutoff {
                let far = EvalPoint::new(cutoff, t)?;
                push(far, s2.evaluate(&far)?, format!("far_field @ t={t}"));
            }
        }
        Ok(ResidualReport::new(points, values, labels))
    }
}
