//! Collapsing-domain model problem: `θ(α(t), t) = f(t)` with `α(0) = f(0) = 0`.
//!
//! With `θ = Σ A_n (4a²t)^n L_n^β(−r²/4a²t)`, `β = (ν−1)/2`, and `α(t) = α√t`
//! the boundary condition reads `Σ f_n t^n = Σ A_n (4a²)^n L_n^β(−α²/4a²) t^n`,
//! so the system is diagonal. The flux then follows from the Stefan
//! condition, `P(t) = λθ_r(α(t), t) − Lρ α'(t)`.

use crate::heat_series::{HeatSeries, ResidualReport};
use crate::specfun::{laguerre, EvalPoint};

use super::{
    check_all_finite, check_domain, check_finite, check_probe_times, check_taylor_len, horner, invalid,
    AssembledSystem, Condition, ModelProblemD0, ProblemError, ProblemKind, ProblemSolution, Result, RowProvenance,
    RowSite, SolutionContext, Unknown,
};

impl ModelProblemD0 {
    pub fn validate(&self) -> Result<()> {
        check_domain(self.nu, self.diffusivity, self.extended_domain)?;
        for (name, v) in [
            ("conductivity", self.conductivity),
            ("latent_heat", self.latent_heat),
            ("density", self.density),
        ] {
            check_finite(name, v)?;
        }
        self.boundary.validate()?;
        check_all_finite("f_taylor", &self.f_taylor)?;
        check_taylor_len("f_taylor", &self.f_taylor, self.truncation)?;
        if self.f_taylor.first().is_some_and(|&f0| f0 != 0.0) {
            return Err(invalid(
                "f_taylor",
                "entry 0 must be 0 (concordance α(0) = θ(0,0) = f(0) = 0)",
            ));
        }
        Ok(())
    }

    /// Laguerre index `β = (ν−1)/2`.
    pub fn laguerre_index(&self) -> f64 {
        (self.nu - 1.0) / 2.0
    }

    /// Diagonal entry `(4a²)^n L_n^β(−α²/4a²)`.
    pub fn diagonal(&self, alpha: f64, n: usize) -> f64 {
        let s = 4.0 * self.diffusivity * self.diffusivity;
        s.powi(n as i32) * laguerre(n as u32, self.laguerre_index(), -alpha * alpha / s)
    }

    pub fn assemble(&self) -> Result<AssembledSystem> {
        self.validate()?;
        let alpha = self
            .boundary
            .self_similar_coeff()
            .ok_or_else(|| ProblemError::Unsupported("the model problem needs α(t) = α√t".into()))?;
        let n1 = self.truncation + 1;
        let mut f = self.f_taylor.clone();
        f.resize(n1, 0.0);
        let unknowns: Vec<Unknown> = (0..n1).map(Unknown::A).collect();
        let mut rows = Vec::with_capacity(n1);
        for (n, &fn_) in f.iter().enumerate() {
            let d = self.diagonal(alpha, n);
            if d == 0.0 {
                return Err(ProblemError::ZeroLaguerre { n });
            }
            let mut c = vec![0.0; n1];
            c[n] = d;
            rows.push((
                RowProvenance {
                    condition: Condition::BoundaryTemperature,
                    site: RowSite::Power(n),
                },
                c,
                fn_,
            ));
        }
        AssembledSystem::build(
            ProblemKind::Model,
            unknowns,
            rows,
            SolutionContext {
                nu: self.nu,
                a1: self.diffusivity,
                a2: None,
                truncation: self.truncation,
                known_flux: None,
            },
        )
    }

    pub fn boundary_residuals(&self, sol: &ProblemSolution, probe_times: &[f64]) -> Result<ResidualReport> {
        check_probe_times(probe_times)?;
        if !self.extended_domain {
            if let Some(&t) = probe_times.iter().find(|&&t| t > 1.0) {
                return Err(invalid("probe_times", format!("{t} > 1 (set extended_domain)")));
            }
        }
        let mut points = Vec::new();
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for &t in probe_times {
            let at = EvalPoint::new(self.boundary.position(t), t)?;
            points.push(at);
            values.push((sol.phase1.evaluate(&at)? - horner(&self.f_taylor, t)).abs());
            labels.push(format!("boundary_temp @ t={t}"));
        }
        Ok(ResidualReport::new(points, values, labels))
    }
}

/// `P(t) = λ ∂θ/∂r (α(t), t) − Lρ dα/dt` at each of `times`.
pub fn reconstruct_flux(p: &ModelProblemD0, s: &HeatSeries, times: &[f64]) -> Result<Vec<f64>> {
    let lrho = p.latent_heat * p.density;
    times
        .iter()
        .map(|&t| {
            let velocity = p.boundary.velocity(t)?;
            let at = EvalPoint::new(p.boundary.position(t), t)?;
            Ok(p.conductivity * s.ddx(&at)? - lrho * velocity)
        })
        .collect()
}
