//! One-phase inverse problem, assembled by matching powers of `t`.
//!
//! With `α(t) = α√t` every term of index `n` restricted to the boundary is a
//! pure power: `u_n(α√t, t) = t^n u_n(α, 1)` and
//! `∂ₓu_n(α√t, t) = t^{n−1/2} ∂ₓu_n(α, 1)`. Multiplying the Stefan condition
//! by `√t` therefore turns all three conditions into power series in `t`.
//!
//! Rows, for `n = 0..=N`:
//!
//! * flux: `β·u_n(0, 1)·A_n − P_n = 0` (regular family only; skipped when
//!   the flux is given),
//! * isotherm: `A_n u_n(α, 1) + B_n v_n(α, 1) = T_n`,
//! * Stefan: `λ(A_n ∂ₓu_n + B_n ∂ₓv_n)(α, 1) = Lρα/2` for `n = 0`, else `0`.
//!
//! At `ν = 1` the two families coincide, the `B_n` columns and the Stefan rows
//! are dropped, and the Stefan condition is only checked afterwards.

use crate::heat_series::{Family, ResidualReport};
use crate::specfun::EvalPoint;

use super::{
    check_all_finite, check_domain, check_finite, check_probe_times, check_taylor_len, horner, invalid,
    AssembledSystem, Basis, Condition, FluxSpec, OnePhaseISP, ProblemError, ProblemKind, ProblemSolution, Result,
    RowProvenance, RowSite, SolutionContext, Unknown,
};

impl OnePhaseISP {
    pub fn validate(&self) -> Result<()> {
        check_domain(self.nu, self.diffusivity, self.extended_domain)?;
        for (name, v) in [
            ("melt_temp", self.melt_temp),
            ("robin_beta", self.robin_beta),
            ("robin_gamma", self.robin_gamma),
            ("latent_heat", self.latent_heat),
            ("density", self.density),
            ("conductivity", self.conductivity),
        ] {
            check_finite(name, v)?;
        }
        self.boundary.validate()?;
        check_all_finite("boundary_temp", &self.boundary_temp)?;
        check_taylor_len("boundary_temp", &self.boundary_temp, self.truncation)?;
        if let Some(&t0) = self.boundary_temp.first() {
            if t0 != self.melt_temp {
                return Err(invalid("boundary_temp", "entry 0 must equal melt_temp (θ(0,0) = T_m)"));
            }
        }
        if let FluxSpec::Known(p) = &self.flux {
            check_all_finite("flux_taylor", p)?;
            check_taylor_len("flux_taylor", p, self.truncation)?;
        }
        Ok(())
    }

    /// Taylor coefficients of the boundary temperature, padded to `N + 1`.
    pub fn isotherm_data(&self) -> Vec<f64> {
        let mut v = if self.boundary_temp.is_empty() {
            vec![self.melt_temp]
        } else {
            self.boundary_temp.clone()
        };
        v.resize(self.truncation + 1, 0.0);
        v
    }

    pub fn assemble(&self) -> Result<AssembledSystem> {
        self.validate()?;
        let alpha = self
            .boundary
            .self_similar_coeff()
            .ok_or_else(|| ProblemError::Unsupported("one-phase power matching needs α(t) = α√t".into()))?;
        let iso = self.isotherm_data();
        if alpha == 0.0 && iso.iter().any(|&v| v != 0.0) {
            return Err(ProblemError::SingularData(
                "α = 0 pins the boundary at the origin but the boundary temperature is nonzero".into(),
            ));
        }
        let n1 = self.truncation + 1;
        let basis = Basis::new(self.diffusivity, self.nu, self.truncation)?;
        let two_families = !basis.coincide();
        let flux_unknown = matches!(self.flux, FluxSpec::Unknown);

        let mut unknowns: Vec<Unknown> = (0..n1).map(Unknown::A).collect();
        if two_families {
            unknowns.extend((0..n1).map(Unknown::B));
        }
        if flux_unknown {
            unknowns.extend((0..n1).map(Unknown::P));
        }
        let m = unknowns.len();
        let col = |u: Unknown| unknowns.iter().position(|&v| v == u).expect("unknown present");

        let mut rows = Vec::with_capacity(m);
        let row = |condition, n| RowProvenance {
            condition,
            site: RowSite::Power(n),
        };
        if flux_unknown {
            for n in 0..n1 {
                let mut c = vec![0.0; m];
                c[col(Unknown::A(n))] = self.robin_beta * basis.value(Family::Regular, n, 0.0, 1.0)?
                    + self.robin_gamma * basis.ddx(Family::Regular, n, 0.0, 1.0)?;
                c[col(Unknown::P(n))] = -1.0;
                rows.push((row(Condition::Flux, n), c, 0.0));
            }
        }
        for (n, &target) in iso.iter().enumerate() {
            let mut c = vec![0.0; m];
            c[col(Unknown::A(n))] = basis.value(Family::Regular, n, alpha, 1.0)?;
            if two_families {
                c[col(Unknown::B(n))] = basis.value(Family::Singular, n, alpha, 1.0)?;
            }
            rows.push((row(Condition::Isotherm, n), c, target));
        }
        if two_families {
            let lrho = self.latent_heat * self.density;
            for n in 0..n1 {
                let mut c = vec![0.0; m];
                c[col(Unknown::A(n))] = self.conductivity * basis.ddx(Family::Regular, n, alpha, 1.0)?;
                c[col(Unknown::B(n))] = self.conductivity * basis.ddx(Family::Singular, n, alpha, 1.0)?;
                let r = if n == 0 { lrho * alpha / 2.0 } else { 0.0 };
                rows.push((row(Condition::Stefan, n), c, r));
            }
        }

        let known_flux = match &self.flux {
            FluxSpec::Known(p) => Some(p.clone()),
            FluxSpec::Unknown => None,
        };
        AssembledSystem::build(
            ProblemKind::OnePhase,
            unknowns,
            rows,
            SolutionContext {
                nu: self.nu,
                a1: self.diffusivity,
                a2: None,
                truncation: self.truncation,
                known_flux,
            },
        )
    }

    /// Pointwise residuals of the flux, isotherm and Stefan conditions.
    pub fn boundary_residuals(&self, sol: &ProblemSolution, probe_times: &[f64]) -> Result<ResidualReport> {
        check_probe_times(probe_times)?;
        if !self.extended_domain {
            if let Some(&t) = probe_times.iter().find(|&&t| t > 1.0) {
                return Err(invalid("probe_times", format!("{t} > 1 (set extended_domain)")));
            }
        }
        let s = &sol.phase1;
        let regular = s.regular_part();
        let iso = self.isotherm_data();
        let lrho = self.latent_heat * self.density;
        let mut points = Vec::new();
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for &t in probe_times {
            if let Some(p) = &sol.flux_taylor {
                let origin = EvalPoint::new(0.0, t)?;
                let lhs = self.robin_beta * regular.evaluate(&origin)? + self.robin_gamma * regular.ddx(&origin)?;
                points.push(origin);
                values.push((lhs - horner(p, t)).abs());
                labels.push(format!("flux @ t={t}"));
            }
            let x = self.boundary.position(t);
            let at = EvalPoint::new(x, t)?;
            points.push(at);
            values.push((s.evaluate(&at)? - horner(&iso, t)).abs());
            labels.push(format!("isotherm @ t={t}"));

            points.push(at);
            let stefan = self.conductivity * s.ddx(&at)? - lrho * self.boundary.velocity(t)?;
            values.push(stefan.abs());
            labels.push(format!("stefan @ t={t}"));
        }
        Ok(ResidualReport::new(points, values, labels))
    }
}
