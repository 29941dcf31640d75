//! Brute-force series oracles, summed in double-double.

use super::dd::Dd;

pub const ORACLE_TERMS: usize = 500;

/// Parameter grid for the Kummer oracle. For `z = −20` the largest
/// alternating term is about 4e7 against results as small as `e^−20`, which
/// double-double summation still resolves to ~16 digits. `a = b + 1` is
/// avoided: `Φ(b+1, b, −b)` vanishes exactly.
pub const KUMMER_GRID_A: &[f64] = &[-3.5, -1.25, -0.5, 0.25, 0.5, 1.0, 1.75, 2.75];
pub const KUMMER_GRID_B: &[f64] = &[0.5, 1.0, 1.5, 2.5, 4.0];
pub const KUMMER_GRID_Z: &[f64] = &[-20.0, -8.0, -3.0, -0.5, 0.5, 3.0, 12.0, 30.0];

/// Laguerre grid: degrees 0..=12, these orders, and `x` from −10 to 10 in
/// steps of 0.5. Errors are measured against `max(|L|, Σ|terms|)` because a
/// pure relative bound is meaningless next to a root.
pub const LAGUERRE_GRID_N: u32 = 12;
pub const LAGUERRE_GRID_ALPHA: &[f64] = &[-0.5, 0.0, 0.5, 1.0, 2.0];

pub fn laguerre_grid_x() -> impl Iterator<Item = f64> {
    (0..=40).map(|i| -10.0 + 0.5 * i as f64)
}

/// `Σ_{k<500} (a)_k z^k / ((b)_k k!)`, no transformations.
pub fn kummer_oracle(a: f64, b: f64, z: f64) -> Dd {
    let (a, b, z) = (Dd::from(a), Dd::from(b), Dd::from(z));
    let mut term = Dd::from(1.0);
    let mut sum = term;
    for k in 0..ORACLE_TERMS {
        let k = Dd::from(k as f64);
        term = term * (a + k) * z / ((b + k) * (k + Dd::from(1.0)));
        sum = sum + term;
        if term.hi == 0.0 {
            break;
        }
    }
    sum
}

/// Largest term magnitude in the Kummer series: the natural scale of the
/// rounding error for any direct summation.
pub fn kummer_term_scale(a: f64, b: f64, z: f64) -> f64 {
    let mut term: f64 = 1.0;
    let mut best: f64 = 1.0;
    for k in 0..ORACLE_TERMS {
        let k = k as f64;
        term *= (a + k) * z / ((b + k) * (k + 1.0));
        best = best.max(term.abs());
        if term == 0.0 {
            break;
        }
    }
    best
}

/// `L_n^α(x) = Σ_k (α+k+1)_{n−k}/(n−k)! · (−x)^k/k!`, and `Σ |terms|`.
pub fn laguerre_oracle(n: u32, alpha: f64, x: f64) -> (Dd, f64) {
    let mut sum = Dd::from(0.0);
    let mut abs_sum = 0.0;
    for k in 0..=n {
        let mut coef = Dd::from(1.0);
        for j in 0..(n - k) {
            coef = coef * Dd::from(alpha + (k + 1 + j) as f64) / Dd::from((j + 1) as f64);
        }
        let mut pw = Dd::from(1.0);
        for j in 0..k {
            pw = pw * Dd::from(-x) / Dd::from((j + 1) as f64);
        }
        let term = coef * pw;
        abs_sum += term.to_f64().abs();
        sum = sum + term;
    }
    (sum, abs_sum)
}
