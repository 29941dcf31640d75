//! Manufactured exact solutions.
//!
//! Each generator takes a problem template plus a few free coefficients,
//! chooses the remaining coefficients and the boundary data so that the
//! resulting problem is solved exactly, and returns both. Assembling and
//! solving the returned problem must reproduce the returned solution.

use crate::heat_series::{mu_of, singular_family_initial_factor, Family, HeatSeries};

use super::{Basis, FluxSpec, ModelProblemD0, OnePhaseISP, ProblemError, ProblemSolution, Result, TwoPhaseISP};

fn self_similar(coeff: Option<f64>) -> Result<f64> {
    match coeff {
        Some(a) if a > 0.0 => Ok(a),
        _ => Err(ProblemError::Unsupported(
            "manufactured solutions need α(t) = α√t with α > 0".into(),
        )),
    }
}

fn padded(v: &[f64], n1: usize) -> Result<Vec<f64>> {
    if v.len() > n1 {
        return Err(ProblemError::Invalid {
            field: "coeffs",
            reason: format!("{} coefficients for truncation {}", v.len(), n1 - 1),
        });
    }
    let mut out = v.to_vec();
    out.resize(n1, 0.0);
    Ok(out)
}

fn nonzero(v: f64, what: &str) -> Result<f64> {
    if v == 0.0 || !v.is_finite() {
        Err(ProblemError::SingularData(format!("{what} vanishes")))
    } else {
        Ok(v)
    }
}

/// One-phase problem solved by `A = coeffs_a`, `B_0 = b0`.
///
/// `B_n` for `n ≥ 1` cancels the Stefan condition at `t^n`; the latent heat is
/// set from the `t^0` Stefan balance, the boundary temperature from the
/// isotherm and the flux from the Robin condition. At `ν = 1` there is no
/// `B` family and the Stefan condition only holds if `A_n = 0` for `n ≥ 1`
/// or `λ = 0`.
pub fn manufacture_one_phase(
    template: &OnePhaseISP,
    coeffs_a: &[f64],
    b0: f64,
) -> Result<(OnePhaseISP, ProblemSolution)> {
    let alpha = self_similar(template.boundary.self_similar_coeff())?;
    let n1 = template.truncation + 1;
    let a = padded(coeffs_a, n1)?;
    let basis = Basis::new(template.diffusivity, template.nu, template.truncation)?;
    let two = !basis.coincide();
    let lambda = template.conductivity;

    let mut b = vec![0.0; n1];
    let mut lrho = 0.0;
    if two {
        b[0] = b0;
        for n in 1..n1 {
            let d_b = nonzero(basis.ddx(Family::Singular, n, alpha, 1.0)?, "∂ₓ of a singular term")?;
            b[n] = -a[n] * basis.ddx(Family::Regular, n, alpha, 1.0)? / d_b;
        }
        lrho = 2.0 * lambda * b0 * basis.ddx(Family::Singular, 0, alpha, 1.0)? / alpha;
    } else if lambda != 0.0 && a.iter().skip(1).any(|&v| v != 0.0) {
        return Err(ProblemError::SingularData(
            "with ν = 1 the Stefan condition forces A_n = 0 for n ≥ 1 unless λ = 0".into(),
        ));
    }

    let mut boundary_temp = Vec::with_capacity(n1);
    let mut flux = Vec::with_capacity(n1);
    for n in 0..n1 {
        let mut v = a[n] * basis.value(Family::Regular, n, alpha, 1.0)?;
        if two {
            v += b[n] * basis.value(Family::Singular, n, alpha, 1.0)?;
        }
        boundary_temp.push(v);
        flux.push(
            a[n] * (template.robin_beta * basis.value(Family::Regular, n, 0.0, 1.0)?
                + template.robin_gamma * basis.ddx(Family::Regular, n, 0.0, 1.0)?),
        );
    }

    let mut p = template.clone();
    p.melt_temp = boundary_temp[0];
    p.boundary_temp = boundary_temp;
    p.latent_heat = if lrho == 0.0 {
        0.0
    } else {
        lrho / nonzero(template.density, "density")?
    };
    if let FluxSpec::Known(_) = p.flux {
        p.flux = FluxSpec::Known(flux.clone());
    }
    let sol = ProblemSolution {
        phase1: HeatSeries::new(template.diffusivity, template.nu, a, b)?,
        phase2: None,
        flux_taylor: Some(flux),
    };
    Ok((p, sol))
}

/// Model problem whose boundary data is produced by `A = coeffs_a`
/// (`A_0` must be 0 for concordance).
pub fn manufacture_model(template: &ModelProblemD0, coeffs_a: &[f64]) -> Result<(ModelProblemD0, ProblemSolution)> {
    let alpha = self_similar(template.boundary.self_similar_coeff())?;
    let a = padded(coeffs_a, template.truncation + 1)?;
    if a[0] != 0.0 {
        return Err(ProblemError::Invalid {
            field: "coeffs",
            reason: "A_0 must be 0 so that f(0) = 0".into(),
        });
    }
    let mut p = template.clone();
    p.f_taylor = a
        .iter()
        .enumerate()
        .map(|(n, &v)| v * template.diagonal(alpha, n))
        .collect();
    let sol = ProblemSolution {
        phase1: HeatSeries::regular(template.diffusivity, template.nu, a)?,
        phase2: None,
        flux_taylor: None,
    };
    Ok((p, sol))
}

/// Two-phase problem solved by `A = coeffs_a` and the template's melt
/// temperature.
///
/// Per power `n` the isotherms fix `B_n` and `D_n` in terms of `A_n`, `C_n`;
/// for `n ≥ 1` the homogeneous Stefan balance fixes `C_n`. At `n = 0` the
/// concordance `f(0) = T_m` together with the phase-2 isotherm forces
/// `C_0 = T_m`, `D_0 = 0`, and the Stefan balance sets the latent heat.
///
/// Needs `α(t) = α√t`, `ν ≠ 1`, no far field and `collocation_count = N + 1`
/// so that the degree-`N` flux is representable.
pub fn manufacture_two_phase(template: &TwoPhaseISP, coeffs_a: &[f64]) -> Result<(TwoPhaseISP, ProblemSolution)> {
    let alpha = self_similar(template.boundary.self_similar_coeff())?;
    if template.far_field_cutoff.is_some() {
        return Err(ProblemError::Unsupported(
            "manufactured two-phase solutions do not satisfy a far-field condition".into(),
        ));
    }
    let n1 = template.truncation + 1;
    let a = padded(coeffs_a, n1)?;
    let b1 = Basis::new(template.a1, template.nu, template.truncation)?;
    let b2 = Basis::new(template.a2, template.nu, template.truncation)?;
    if b1.coincide() {
        return Err(ProblemError::Unsupported(
            "manufactured two-phase solutions need ν ≠ 1".into(),
        ));
    }
    let layout = template.layout(true)?;
    if layout.flux_terms < n1 {
        return Err(ProblemError::Unsupported(format!(
            "the manufactured flux has {n1} Taylor terms but the layout allows {}",
            layout.flux_terms
        )));
    }
    let tm = template.melt_temp;
    let (l1, l2) = (template.conductivity1, template.conductivity2);

    let mut b = vec![0.0; n1];
    let mut c = vec![0.0; n1];
    let mut d = vec![0.0; n1];
    let mut lrho = 0.0;
    for n in 0..n1 {
        let va1 = b1.value(Family::Regular, n, alpha, 1.0)?;
        let vb1 = nonzero(b1.value(Family::Singular, n, alpha, 1.0)?, "phase-1 singular term")?;
        let vc2 = b2.value(Family::Regular, n, alpha, 1.0)?;
        let vd2 = nonzero(b2.value(Family::Singular, n, alpha, 1.0)?, "phase-2 singular term")?;
        let da1 = b1.ddx(Family::Regular, n, alpha, 1.0)?;
        let db1 = b1.ddx(Family::Singular, n, alpha, 1.0)?;
        let dc2 = b2.ddx(Family::Regular, n, alpha, 1.0)?;
        let dd2 = b2.ddx(Family::Singular, n, alpha, 1.0)?;
        let target = if n == 0 { tm } else { 0.0 };
        b[n] = (target - a[n] * va1) / vb1;
        let phase1_flux = l1 * (a[n] * da1 + b[n] * db1);
        if n == 0 {
            c[0] = tm;
            lrho = 2.0 * (-phase1_flux + l2 * (c[0] * dc2 + d[0] * dd2)) / alpha;
        } else {
            let slope = nonzero(l2 * (dc2 - vc2 * dd2 / vd2), "phase-2 Stefan coefficient")?;
            c[n] = phase1_flux / slope;
            d[n] = -c[n] * vc2 / vd2;
        }
    }

    let gamma_factor = singular_family_initial_factor(mu_of(template.nu))?;
    let mut factorial = 1.0;
    let mut initial = Vec::with_capacity(n1);
    let mut flux = vec![0.0; layout.flux_terms];
    for n in 0..n1 {
        if n > 0 {
            factorial *= n as f64;
        }
        initial.push((c[n] + gamma_factor * d[n]) / factorial);
        flux[n] = a[n]
            * (template.robin_beta * b1.value(Family::Regular, n, 0.0, 1.0)?
                + template.robin_gamma * b1.ddx(Family::Regular, n, 0.0, 1.0)?);
    }

    let mut p = template.clone();
    p.initial_profile_taylor = initial;
    p.latent_heat = if lrho == 0.0 {
        0.0
    } else {
        lrho / nonzero(template.density, "density")?
    };
    let sol = ProblemSolution {
        phase1: HeatSeries::new(template.a1, template.nu, a, b)?,
        phase2: Some(HeatSeries::new(template.a2, template.nu, c, d)?),
        flux_taylor: Some(flux),
    };
    Ok((p, sol))
}
