//! Special functions behind the heat-series bases.
//!
//! Everything here is real-valued and double precision. The two basis
//! families are
//!
//! ```text
//! S1(x, t) = (2a√t)^γ Φ(−γ/2, (ν+1)/2; −ζ)
//! S2(x, t) = (2a√t)^γ ζ^((1−ν)/2) Φ((1−ν−γ)/2, (3−ν)/2; −ζ)      ζ = x²/(4a²t)
//! ```
//!
//! and both satisfy `θ_t = a²(θ_xx + (ν/x) θ_x)` identically in `(x, t)`.
//! Derivatives are obtained by differentiating the Kummer function in closed
//! form, `dᵏ/dzᵏ Φ(a, b, z) = (a)_k / (b)_k · Φ(a+k, b+k, z)`.

use std::f64::consts::{E, PI};

use serde::Serialize;
use thiserror::Error;

/// Hard cap on the number of Kummer series terms.
pub const KUMMER_MAX_TERMS: usize = 500;

/// Relative size of the last term at which the Kummer series is considered converged.
pub const KUMMER_TERM_TOLERANCE: f64 = 1e-16;

/// Consecutive small terms required before the Kummer series stops.
const KUMMER_SMALL_RUN: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFunError {
    #[error("gamma function has a pole at z = {0}")]
    GammaPole(f64),
    #[error("Kummer parameter b = {b} is a pole for a = {a}")]
    ParameterPole { a: f64, b: f64 },
    #[error("Kummer series Φ({a}, {b}, {z}) did not converge within {terms} terms or overflowed")]
    NonConvergence { a: f64, b: f64, z: f64, terms: usize },
    #[error("basis is singular at x = 0 (x-exponent {exponent})")]
    SingularAtOrigin { exponent: f64 },
    #[error("evaluation time must be positive, got t = {0}")]
    NonPositiveTime(f64),
    #[error("evaluation point must have x >= 0, got x = {0}")]
    NegativeSpace(f64),
    #[error("invalid basis parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, SpecFunError>;

// Lanczos approximation, g = 10.900511, 11 terms.
const LANCZOS_G: f64 = 10.900511;
const LANCZOS_COEFFS: [f64; 11] = [
    2.485_740_891_387_535_655_46e-5,
    1.051_423_785_817_219_742_10,
    -3.456_870_972_220_162_354_69,
    4.512_277_094_668_948_237_00,
    -2.982_852_253_235_766_557_21,
    1.056_397_115_771_267_130_77,
    -1.954_287_731_916_458_695_83e-1,
    1.709_705_434_044_412_243_07e-2,
    -5.719_261_174_043_057_812_83e-4,
    4.633_994_733_599_056_367_08e-6,
    -2.719_949_084_886_077_039_10e-9,
];
// ln(2·√(e/π))
const LN_2_SQRT_E_OVER_PI: f64 = 0.620_782_237_635_245_222_345_518_445_781_647_212_251_852_647_9;
const LN_PI: f64 = 1.144_729_885_849_400_174_143_427_351_353_058_711_647_294_812_9;

/// `ln|Γ(z)|` together with the sign of `Γ(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LnGamma {
    pub ln_abs: f64,
    pub sign: f64,
}

impl LnGamma {
    pub fn value(&self) -> f64 {
        self.sign * self.ln_abs.exp()
    }
}

/// If `v` is a non-positive integer, returns `-v`.
pub(crate) fn non_positive_integer(v: f64) -> Option<u64> {
    if v <= 0.0 && v.fract() == 0.0 && v > -1e15 {
        Some((-v) as u64)
    } else {
        None
    }
}

fn lanczos_ln_gamma(x: f64) -> f64 {
    let s = LANCZOS_COEFFS
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_COEFFS[0], |acc, (i, c)| acc + c / (x + i as f64 - 1.0));
    s.ln() + LN_2_SQRT_E_OVER_PI + (x - 0.5) * ((x - 0.5 + LANCZOS_G) / E).ln()
}

/// Logarithm of the absolute value of the gamma function, with its sign.
///
/// Uses the Lanczos approximation for `z >= 0.5` and the reflection formula
/// below that.
pub fn ln_gamma(z: f64) -> Result<LnGamma> {
    if !z.is_finite() || non_positive_integer(z).is_some() {
        return Err(SpecFunError::GammaPole(z));
    }
    if z >= 0.5 {
        return Ok(LnGamma {
            ln_abs: lanczos_ln_gamma(z),
            sign: 1.0,
        });
    }
    // Γ(z)Γ(1−z) = π / sin(πz); reduce the argument of sin first.
    let sin_pz = (PI * (z % 2.0)).sin();
    Ok(LnGamma {
        ln_abs: LN_PI - sin_pz.abs().ln() - lanczos_ln_gamma(1.0 - z),
        sign: sin_pz.signum(),
    })
}

/// `Γ(z)`; overflows to infinity above `z ≈ 171.6`.
pub fn gamma(z: f64) -> Result<f64> {
    ln_gamma(z).map(|g| g.value())
}

/// Rising factorial `(β)_n = β(β+1)…(β+n−1)` as a running product.
pub fn pochhammer(beta: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (beta + k as f64))
}

/// Kummer's confluent hypergeometric function `Φ(a, b; z) = ₁F₁(a; b; z)`.
///
/// Terminating cases (`a = −n`) are summed exactly. Otherwise negative
/// arguments go through `Φ(a, b, z) = e^z Φ(b−a, b, −z)` so that the summed
/// series has terms of one sign.
pub fn kummer_phi(a: f64, b: f64, z: f64) -> Result<f64> {
    if z == 0.0 || a == 0.0 {
        return Ok(1.0);
    }
    if let Some(n) = non_positive_integer(a) {
        return kummer_terminating(a, b, z, n);
    }
    if non_positive_integer(b).is_some() {
        return Err(SpecFunError::ParameterPole { a, b });
    }
    if z < 0.0 {
        return Ok(z.exp() * kummer_phi(b - a, b, -z)?);
    }
    kummer_series(a, b, z)
}

fn kummer_terminating(a: f64, b: f64, z: f64, n: u64) -> Result<f64> {
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 0..n {
        let k = k as f64;
        let denom = b + k;
        if denom == 0.0 {
            return Err(SpecFunError::ParameterPole { a, b });
        }
        term *= (a + k) * z / (denom * (k + 1.0));
        sum += term;
    }
    Ok(sum)
}

fn kummer_series(a: f64, b: f64, z: f64) -> Result<f64> {
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut small_run = 0;
    for k in 0..KUMMER_MAX_TERMS {
        let k = k as f64;
        term *= (a + k) * z / ((b + k) * (k + 1.0));
        sum += term;
        if !sum.is_finite() {
            break;
        }
        if term.abs() <= KUMMER_TERM_TOLERANCE * sum.abs() {
            small_run += 1;
            if small_run == KUMMER_SMALL_RUN {
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
    }
    Err(SpecFunError::NonConvergence {
        a,
        b,
        z,
        terms: KUMMER_MAX_TERMS,
    })
}

/// `k`-th derivative of `Φ(a, b; z)` with respect to `z`.
pub fn kummer_phi_derivative(a: f64, b: f64, z: f64, order: u32) -> Result<f64> {
    if order == 0 {
        return kummer_phi(a, b, z);
    }
    let num = pochhammer(a, order);
    if num == 0.0 {
        return Ok(0.0);
    }
    let den = pochhammer(b, order);
    if den == 0.0 {
        return Err(SpecFunError::ParameterPole { a, b });
    }
    let k = order as f64;
    Ok(num / den * kummer_phi(a + k, b + k, z)?)
}

/// Generalized Laguerre polynomial `L_n^α(x)` by the three-term recurrence.
///
/// Equal to `((α+1)_n / n!) Φ(−n, α+1; x)`. Negative `n` is not representable;
/// callers that need `L_{−1} ≡ 0` handle it themselves.
pub fn laguerre(n: u32, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Which of the two basis families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BasisKind {
    S1,
    S2,
}

/// Parameters shared by both basis families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisParams {
    /// Exponent `γ` in `(2a√t)^γ`.
    pub gamma_order: f64,
    /// Geometry parameter `ν`.
    pub nu: f64,
    /// Diffusivity `a` (the equation carries `a²`).
    pub diffusivity: f64,
}

impl BasisParams {
    pub fn new(gamma_order: f64, nu: f64, diffusivity: f64) -> Result<Self> {
        if !(diffusivity > 0.0 && diffusivity.is_finite()) {
            return Err(SpecFunError::InvalidParams(format!(
                "diffusivity must be positive and finite, got {diffusivity}"
            )));
        }
        if !gamma_order.is_finite() || !nu.is_finite() {
            return Err(SpecFunError::InvalidParams("gamma_order and nu must be finite".into()));
        }
        Ok(Self {
            gamma_order,
            nu,
            diffusivity,
        })
    }
}

/// A point `(x, t)` with `x >= 0`, `t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalPoint {
    pub x: f64,
    pub t: f64,
}

impl EvalPoint {
    pub fn new(x: f64, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(SpecFunError::NonPositiveTime(t));
        }
        if !(x >= 0.0 && x.is_finite()) {
            return Err(SpecFunError::NegativeSpace(x));
        }
        Ok(Self { x, t })
    }
}

/// Value and the derivatives the heat operator needs, at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub value: f64,
    pub ddx: f64,
    pub d2dx2: f64,
    pub ddt: f64,
}

impl Jet {
    /// `θ_t − a²(θ_xx + (ν/x) θ_x)`.
    pub fn heat_operator(&self, diffusivity: f64, nu: f64, x: f64) -> f64 {
        let a2 = diffusivity * diffusivity;
        let radial = if nu == 0.0 { 0.0 } else { nu / x * self.ddx };
        self.ddt - a2 * (self.d2dx2 + radial)
    }

    pub fn scaled(self, c: f64) -> Jet {
        Jet {
            value: c * self.value,
            ddx: c * self.ddx,
            d2dx2: c * self.d2dx2,
            ddt: c * self.ddt,
        }
    }
}

impl std::ops::Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet {
            value: self.value + o.value,
            ddx: self.ddx + o.ddx,
            d2dx2: self.d2dx2 + o.d2dx2,
            ddt: self.ddt + o.ddt,
        }
    }
}

/// Both bases written as `scale · t^p · x^q · Φ(ka, kb; −κx²/t)`.
struct ProductForm {
    scale: f64,
    t_pow: f64,
    x_pow: f64,
    ka: f64,
    kb: f64,
    kappa: f64,
}

impl ProductForm {
    fn new(kind: BasisKind, p: &BasisParams) -> Self {
        let a = p.diffusivity;
        let g = p.gamma_order;
        let kappa = 1.0 / (4.0 * a * a);
        match kind {
            BasisKind::S1 => Self {
                scale: (2.0 * a).powf(g),
                t_pow: g / 2.0,
                x_pow: 0.0,
                ka: -g / 2.0,
                kb: (p.nu + 1.0) / 2.0,
                kappa,
            },
            BasisKind::S2 => {
                let e = (1.0 - p.nu) / 2.0;
                Self {
                    scale: (2.0 * a).powf(g - 2.0 * e),
                    t_pow: g / 2.0 - e,
                    x_pow: 2.0 * e,
                    ka: (1.0 - p.nu - g) / 2.0,
                    kb: (3.0 - p.nu) / 2.0,
                    kappa,
                }
            }
        }
    }

    /// `coef · x^e`, treating `0 · x^e` as zero even where `x^e` is singular.
    fn x_term(coef: f64, x: f64, e: f64) -> Result<f64> {
        if coef == 0.0 {
            return Ok(0.0);
        }
        if e == 0.0 {
            return Ok(coef);
        }
        if x == 0.0 {
            return if e > 0.0 {
                Ok(0.0)
            } else {
                Err(SpecFunError::SingularAtOrigin { exponent: e })
            };
        }
        Ok(coef * x.powf(e))
    }

    fn g(&self, zeta: f64, order: u32) -> Result<f64> {
        // g(ζ) = Φ(ka, kb; −ζ), so each ζ-derivative picks up a factor −1.
        let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok(sign * kummer_phi_derivative(self.ka, self.kb, -zeta, order)?)
    }

    fn value(&self, pt: &EvalPoint) -> Result<f64> {
        let (x, t) = (pt.x, pt.t);
        let zeta = self.kappa * x * x / t;
        let g = self.g(zeta, 0)?;
        Ok(self.scale * t.powf(self.t_pow) * Self::x_term(g, x, self.x_pow)?)
    }

    fn jet(&self, pt: &EvalPoint, want_xx: bool) -> Result<Jet> {
        let (x, t) = (pt.x, pt.t);
        let (q, k) = (self.x_pow, self.kappa);
        let zeta = k * x * x / t;
        let g0 = self.g(zeta, 0)?;
        let g1 = self.g(zeta, 1)?;
        let pre = self.scale * t.powf(self.t_pow);

        let value = pre * Self::x_term(g0, x, q)?;
        let ddx = pre * (Self::x_term(q * g0, x, q - 1.0)? + Self::x_term(2.0 * k * g1 / t, x, q + 1.0)?);
        let ddt = self.scale * t.powf(self.t_pow - 1.0) * Self::x_term(self.t_pow * g0 - zeta * g1, x, q)?;
        let d2dx2 = if want_xx {
            let g2 = self.g(zeta, 2)?;
            pre * (Self::x_term(q * (q - 1.0) * g0, x, q - 2.0)?
                + Self::x_term((4.0 * q + 2.0) * k * g1 / t, x, q)?
                + Self::x_term(4.0 * k * k * g2 / (t * t), x, q + 2.0)?)
        } else {
            0.0
        };
        Ok(Jet { value, ddx, d2dx2, ddt })
    }
}

pub fn s1_basis(p: &BasisParams, pt: &EvalPoint) -> Result<f64> {
    basis_value(BasisKind::S1, p, pt)
}

pub fn s2_basis(p: &BasisParams, pt: &EvalPoint) -> Result<f64> {
    basis_value(BasisKind::S2, p, pt)
}

pub fn basis_value(kind: BasisKind, p: &BasisParams, pt: &EvalPoint) -> Result<f64> {
    ProductForm::new(kind, p).value(pt)
}

/// Value, `∂x`, `∂xx` and `∂t` of a basis function in one pass.
pub fn basis_jet(kind: BasisKind, p: &BasisParams, pt: &EvalPoint) -> Result<Jet> {
    ProductForm::new(kind, p).jet(pt, true)
}

pub fn basis_ddx(kind: BasisKind, p: &BasisParams, pt: &EvalPoint) -> Result<f64> {
    Ok(ProductForm::new(kind, p).jet(pt, false)?.ddx)
}

pub fn basis_d2dx2(kind: BasisKind, p: &BasisParams, pt: &EvalPoint) -> Result<f64> {
    Ok(basis_jet(kind, p, pt)?.d2dx2)
}

pub fn basis_ddt(kind: BasisKind, p: &BasisParams, pt: &EvalPoint) -> Result<f64> {
    Ok(ProductForm::new(kind, p).jet(pt, false)?.ddt)
}

/// `Γ(μ) / Γ(μ + β/2)`, the normalization `z^{−β} Φ(−β/2, μ; −z²)` is meant
/// to approach for small `z`.
///
/// Taken literally that limit diverges for `β > 0` (the function tends to 1
/// while `z^{−β}` blows up); the ratio is what the heat-series code uses as
/// the large-argument constant, so that is what gets returned.
pub fn s1_small_z_limit(beta: f64, mu: f64) -> Result<f64> {
    let num = ln_gamma(mu)?;
    let den = ln_gamma(mu + beta / 2.0)?;
    Ok(num.sign * den.sign * (num.ln_abs - den.ln_abs).exp())
}
