//! Truncated special-function expansions of a temperature field.
//!
//! A [`HeatSeries`] is
//!
//! ```text
//! θ(x, t) = Σ_{n=0}^{N} (4a²t)^n [ A_n L_n^{μ−1}(−ζ) + B_n ζ^{1−μ} Φ(1−μ−n, 2−μ; −ζ) ]
//! ```
//!
//! with `ζ = x²/(4a²t)` and `μ = (ν+1)/2`. The `A` terms are the regular
//! family (`(μ)_n/n!` times `S1` of order `2n`), the `B` terms are exactly `S2`
//! of order `2n`. Every term solves the generalized heat equation, so any
//! choice of coefficients does too.
//!
//! When `μ = 1` (`ν = 1`) the two families coincide.

use serde::Serialize;
use thiserror::Error;

use crate::specfun::{self, basis_jet, laguerre, BasisKind, BasisParams, EvalPoint, Jet, SpecFunError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("coefficient vectors differ in length ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },
    #[error("a series needs at least one coefficient")]
    Empty,
    #[error("coefficient {label} is not finite")]
    NonFinite { label: String },
    #[error("series parameters differ (diffusivity or nu)")]
    Incompatible,
    #[error("residual grid must be nonempty with x > 0 at every point")]
    BadGrid,
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

pub type Result<T> = std::result::Result<T, SeriesError>;

/// Which coefficient family a term belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `A_n` (or `C_n`): Laguerre terms, regular at `x = 0`.
    Regular,
    /// `B_n` (or `D_n`): the `S2` family.
    Singular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatSeries {
    diffusivity: f64,
    nu: f64,
    mu: f64,
    coeffs_a: Vec<f64>,
    coeffs_b: Vec<f64>,
}

impl HeatSeries {
    pub fn new(diffusivity: f64, nu: f64, coeffs_a: Vec<f64>, coeffs_b: Vec<f64>) -> Result<Self> {
        BasisParams::new(0.0, nu, diffusivity)?;
        if coeffs_a.len() != coeffs_b.len() {
            return Err(SeriesError::LengthMismatch {
                a: coeffs_a.len(),
                b: coeffs_b.len(),
            });
        }
        if coeffs_a.is_empty() {
            return Err(SeriesError::Empty);
        }
        for (name, coeffs) in [("A", &coeffs_a), ("B", &coeffs_b)] {
            if let Some(n) = coeffs.iter().position(|c| !c.is_finite()) {
                return Err(SeriesError::NonFinite {
                    label: format!("{name}_{n}"),
                });
            }
        }
        Ok(Self {
            diffusivity,
            nu,
            mu: mu_of(nu),
            coeffs_a,
            coeffs_b,
        })
    }

    /// Series with only the regular family (`B ≡ 0`).
    pub fn regular(diffusivity: f64, nu: f64, coeffs_a: Vec<f64>) -> Result<Self> {
        let zeros = vec![0.0; coeffs_a.len()];
        Self::new(diffusivity, nu, coeffs_a, zeros)
    }

    /// Zero series of truncation order `n`.
    pub fn zero(diffusivity: f64, nu: f64, truncation: usize) -> Result<Self> {
        Self::new(diffusivity, nu, vec![0.0; truncation + 1], vec![0.0; truncation + 1])
    }

    /// The single term `family`, index `n`, with unit coefficient.
    pub fn unit_term(diffusivity: f64, nu: f64, truncation: usize, family: Family, n: usize) -> Result<Self> {
        let mut s = Self::zero(diffusivity, nu, truncation)?;
        match family {
            Family::Regular => s.coeffs_a[n] = 1.0,
            Family::Singular => s.coeffs_b[n] = 1.0,
        }
        Ok(s)
    }

    pub fn diffusivity(&self) -> f64 {
        self.diffusivity
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn truncation(&self) -> usize {
        self.coeffs_a.len() - 1
    }

    pub fn coeffs_a(&self) -> &[f64] {
        &self.coeffs_a
    }

    pub fn coeffs_b(&self) -> &[f64] {
        &self.coeffs_b
    }

    /// True when the `A` and `B` families are the same functions (`ν = 1`).
    pub fn families_coincide(&self) -> bool {
        self.mu == 1.0
    }

    /// Copy with the `B` family removed.
    pub fn regular_part(&self) -> HeatSeries {
        HeatSeries {
            coeffs_b: vec![0.0; self.coeffs_b.len()],
            ..self.clone()
        }
    }

    pub fn evaluate(&self, pt: &EvalPoint) -> Result<f64> {
        let mut acc = 0.0;
        for n in 0..self.coeffs_a.len() {
            if self.coeffs_a[n] != 0.0 {
                acc += self.coeffs_a[n] * self.term_value(Family::Regular, n, pt)?;
            }
            if self.coeffs_b[n] != 0.0 {
                acc += self.coeffs_b[n] * self.term_value(Family::Singular, n, pt)?;
            }
        }
        Ok(acc)
    }

    pub fn ddx(&self, pt: &EvalPoint) -> Result<f64> {
        Ok(self.jet(pt)?.ddx)
    }

    pub fn ddt(&self, pt: &EvalPoint) -> Result<f64> {
        Ok(self.jet(pt)?.ddt)
    }

    pub fn d2dx2(&self, pt: &EvalPoint) -> Result<f64> {
        Ok(self.jet(pt)?.d2dx2)
    }

    /// Value and derivatives of the whole series at `pt`.
    pub fn jet(&self, pt: &EvalPoint) -> Result<Jet> {
        let mut acc = Jet::default();
        for n in 0..self.coeffs_a.len() {
            if self.coeffs_a[n] != 0.0 {
                acc = acc + self.term_jet(Family::Regular, n, pt)?.scaled(self.coeffs_a[n]);
            }
            if self.coeffs_b[n] != 0.0 {
                acc = acc + self.term_jet(Family::Singular, n, pt)?.scaled(self.coeffs_b[n]);
            }
        }
        Ok(acc)
    }

    /// Value of one basis term with unit coefficient.
    pub fn term_value(&self, family: Family, n: usize, pt: &EvalPoint) -> Result<f64> {
        match family {
            Family::Regular => Ok(laguerre_term_jet(self.diffusivity, self.mu - 1.0, n, pt).value),
            Family::Singular => {
                let p = BasisParams::new(2.0 * n as f64, self.nu, self.diffusivity)?;
                Ok(specfun::s2_basis(&p, pt)?)
            }
        }
    }

    /// Jet of one basis term with unit coefficient.
    pub fn term_jet(&self, family: Family, n: usize, pt: &EvalPoint) -> Result<Jet> {
        match family {
            Family::Regular => Ok(laguerre_term_jet(self.diffusivity, self.mu - 1.0, n, pt)),
            Family::Singular => {
                let p = BasisParams::new(2.0 * n as f64, self.nu, self.diffusivity)?;
                Ok(basis_jet(BasisKind::S2, &p, pt)?)
            }
        }
    }

    /// Pointwise `|θ_t − a²(θ_xx + (ν/x)θ_x)| / max(1, |θ|)` on `grid`.
    pub fn pde_residual(&self, grid: &[EvalPoint]) -> Result<ResidualReport> {
        if grid.is_empty() || grid.iter().any(|p| p.x <= 0.0) {
            return Err(SeriesError::BadGrid);
        }
        let per_point = grid
            .iter()
            .map(|pt| {
                let jet = self.jet(pt)?;
                Ok(jet.heat_operator(self.diffusivity, self.nu, pt.x).abs() / jet.value.abs().max(1.0))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ResidualReport::new(grid.to_vec(), per_point, Vec::new()))
    }
}

impl std::ops::Add for &HeatSeries {
    type Output = Result<HeatSeries>;

    fn add(self, rhs: &HeatSeries) -> Result<HeatSeries> {
        if self.diffusivity != rhs.diffusivity || self.nu != rhs.nu {
            return Err(SeriesError::Incompatible);
        }
        let n = self.coeffs_a.len().max(rhs.coeffs_a.len());
        let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        let a = (0..n).map(|i| get(&self.coeffs_a, i) + get(&rhs.coeffs_a, i)).collect();
        let b = (0..n).map(|i| get(&self.coeffs_b, i) + get(&rhs.coeffs_b, i)).collect();
        HeatSeries::new(self.diffusivity, self.nu, a, b)
    }
}

pub fn mu_of(nu: f64) -> f64 {
    (nu + 1.0) / 2.0
}

/// `(4a²t)^n L_n^α(−x²/(4a²t))` and its derivatives, using
/// `d/dy L_n^α(y) = −L_{n−1}^{α+1}(y)`.
fn laguerre_term_jet(diffusivity: f64, alpha: f64, n: usize, pt: &EvalPoint) -> Jet {
    let (x, t) = (pt.x, pt.t);
    let a2 = diffusivity * diffusivity;
    let s = 4.0 * a2 * t;
    let y = -x * x / s;
    let lag = |k: isize, shift: f64| {
        if k < 0 {
            0.0
        } else {
            laguerre(k as u32, alpha + shift, y)
        }
    };
    let n_i = n as isize;
    let l0 = lag(n_i, 0.0);
    let l1 = lag(n_i - 1, 1.0);
    let l2 = lag(n_i - 2, 2.0);
    let sn = s.powi(n as i32);
    let sn1 = s.powi(n as i32 - 1);
    let sn2 = s.powi(n as i32 - 2);

    let value = sn * l0;
    let (ddx, d2dx2, ddt) = if n == 0 {
        (0.0, 0.0, 0.0)
    } else {
        (
            2.0 * x * sn1 * l1,
            2.0 * sn1 * l1 + if n >= 2 { 4.0 * x * x * sn2 * l2 } else { 0.0 },
            4.0 * a2 * sn1 * (n as f64 * l0 - x * x / s * l1),
        )
    };
    Jet { value, ddx, d2dx2, ddt }
}

/// Pointwise residuals with the points (and optional labels) they belong to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    pub points: Vec<EvalPoint>,
    pub per_point: Vec<f64>,
    /// Condition names for boundary residuals; empty for PDE residuals.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}

impl ResidualReport {
    pub fn new(points: Vec<EvalPoint>, per_point: Vec<f64>, labels: Vec<String>) -> Self {
        let max_residual = per_point.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        Self {
            max_residual,
            points,
            per_point,
            labels,
        }
    }

    pub fn empty() -> Self {
        Self::new(Vec::new(), Vec::new(), Vec::new())
    }
}

/// Large-ζ limit of the `B_n` term divided by `x^{2n}/n!`, i.e. `Γ(2−μ)`.
///
/// As `t → 0` at fixed `x > 0` the `A_n` term tends to `x^{2n}/n!` and the
/// `B_n` term to `Γ(2−μ) x^{2n}/n!`.
pub fn singular_family_initial_factor(mu: f64) -> std::result::Result<f64, SpecFunError> {
    specfun::gamma(2.0 - mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, t: f64) -> EvalPoint {
        EvalPoint::new(x, t).unwrap()
    }

    #[test]
    fn zero_series_is_zero() {
        let s = HeatSeries::zero(1.3, 0.7, 3).unwrap();
        let j = s.jet(&pt(0.4, 0.2)).unwrap();
        assert_eq!(j, Jet::default());
    }

    #[test]
    fn constant_series() {
        let s = HeatSeries::regular(0.8, 2.0, vec![7.5]).unwrap();
        for (x, t) in [(0.0, 0.1), (1.0, 1.0), (3.0, 0.01)] {
            assert_eq!(s.evaluate(&pt(x, t)).unwrap(), 7.5);
        }
    }

    #[test]
    fn linear_in_time_example() {
        // A_1 = 1, a = 1, ν = 1 gives θ = 4t + x²
        let s = HeatSeries::regular(1.0, 1.0, vec![0.0, 1.0]).unwrap();
        for (x, t) in [(0.0, 0.5), (0.7, 0.3), (2.0, 1.0)] {
            let j = s.jet(&pt(x, t)).unwrap();
            assert!((j.value - (4.0 * t + x * x)).abs() < 1e-14);
            assert!((j.ddx - 2.0 * x).abs() < 1e-14);
            assert!((j.d2dx2 - 2.0).abs() < 1e-14);
            assert!((j.ddt - 4.0).abs() < 1e-14);
        }
        let r = s.pde_residual(&[pt(0.5, 0.5), pt(1.0, 1.0)]).unwrap();
        assert!(r.max_residual < 1e-14);
    }

    #[test]
    fn regular_term_matches_scaled_s1() {
        // (4a²t)^n L_n^{μ−1}(−ζ) = ((μ)_n / n!) S1_{2n}
        let (a, nu) = (0.9, 2.4);
        let mu = mu_of(nu);
        let s = HeatSeries::zero(a, nu, 4).unwrap();
        for n in 0..=4usize {
            let factor = specfun::pochhammer(mu, n as u32) / (1..=n).product::<usize>().max(1) as f64;
            let p = BasisParams::new(2.0 * n as f64, nu, a).unwrap();
            let here = pt(0.8, 0.35);
            let want = basis_jet(BasisKind::S1, &p, &here).unwrap().scaled(factor);
            let got = s.term_jet(Family::Regular, n, &here).unwrap();
            for (g, w) in [
                (got.value, want.value),
                (got.ddx, want.ddx),
                (got.d2dx2, want.d2dx2),
                (got.ddt, want.ddt),
            ] {
                assert!((g - w).abs() <= 1e-12 * w.abs().max(1.0), "n={n}: {g} vs {w}");
            }
        }
    }

    #[test]
    fn corrupted_coefficient_fails_residual() {
        // Terms built for ν = 2 checked against the ν = 1 operator.
        let s = HeatSeries::new(1.0, 2.0, vec![0.3, 1.0, 0.2], vec![0.5, 0.1, 0.0]).unwrap();
        let grid = [pt(0.5, 0.5), pt(1.0, 1.0), pt(2.0, 0.3)];
        assert!(s.pde_residual(&grid).unwrap().max_residual < 1e-10);
        for p in &grid {
            let j = s.jet(p).unwrap();
            let r = j.heat_operator(1.0, 1.0, p.x).abs() / j.value.abs().max(1.0);
            assert!(r > 1e-3, "{r}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            HeatSeries::new(1.0, 1.0, vec![1.0], vec![]),
            Err(SeriesError::LengthMismatch { .. })
        ));
        assert!(matches!(
            HeatSeries::new(1.0, 1.0, vec![f64::NAN], vec![0.0]),
            Err(SeriesError::NonFinite { .. })
        ));
        assert!(HeatSeries::regular(-1.0, 1.0, vec![1.0]).is_err());
        let s = HeatSeries::regular(1.0, 1.0, vec![1.0]).unwrap();
        assert_eq!(s.pde_residual(&[pt(0.0, 1.0)]), Err(SeriesError::BadGrid));
        assert_eq!(s.pde_residual(&[]), Err(SeriesError::BadGrid));
    }

    #[test]
    fn singular_family_at_origin() {
        // ν = 1: ζ^{1−μ} = 1, term is finite at x = 0
        let s = HeatSeries::new(1.0, 1.0, vec![0.0, 0.0], vec![0.0, 1.0]).unwrap();
        assert!((s.evaluate(&pt(0.0, 0.5)).unwrap() - 2.0).abs() < 1e-14);
        // ν < 1: vanishes
        let s = HeatSeries::new(1.0, 0.5, vec![0.0], vec![1.0]).unwrap();
        assert_eq!(s.evaluate(&pt(0.0, 0.5)).unwrap(), 0.0);
        // ν > 1: singular
        let s = HeatSeries::new(1.0, 2.0, vec![0.0], vec![1.0]).unwrap();
        assert!(s.evaluate(&pt(0.0, 0.5)).is_err());
    }

    /// Lagrange extrapolation of samples `(t_i, v_i)` to `t = 0`.
    fn extrapolate_to_zero(samples: &[(f64, f64)]) -> f64 {
        samples
            .iter()
            .enumerate()
            .map(|(i, &(ti, vi))| {
                let w: f64 = samples
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, &(tj, _))| tj / (tj - ti))
                    .product();
                w * vi
            })
            .sum()
    }

    #[test]
    fn initial_limit_of_families() {
        // Both terms are polynomials of degree n in t up to e^{−ζ} corrections,
        // so extrapolating from ζ in [25, 40] recovers the t → 0 value.
        let (a, nu) = (0.7, 2.0);
        let mu = mu_of(nu);
        let gamma = singular_family_initial_factor(mu).unwrap();
        let x = 1.1f64;
        let s = HeatSeries::zero(a, nu, 2).unwrap();
        for n in 0..3usize {
            let nf = (1..=n).product::<usize>().max(1) as f64;
            let leading = x.powi(2 * n as i32) / nf;
            let times: Vec<f64> = [25.0, 30.0, 35.0, 40.0]
                .iter()
                .map(|zeta| x * x / (4.0 * a * a * zeta))
                .collect();
            for (family, want) in [(Family::Regular, leading), (Family::Singular, gamma * leading)] {
                let samples: Vec<(f64, f64)> = times
                    .iter()
                    .map(|&t| (t, s.term_value(family, n, &pt(x, t)).unwrap()))
                    .collect();
                let got = extrapolate_to_zero(&samples);
                assert!(
                    (got - want).abs() < 1e-9 * want.abs().max(1.0),
                    "{family:?} n={n}: {got} vs {want}"
                );
            }
        }
    }
}
