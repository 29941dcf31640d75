mod common;

use common::dd::Dd;
use common::oracles::{
    kummer_oracle, kummer_term_scale, laguerre_grid_x, laguerre_oracle, KUMMER_GRID_A, KUMMER_GRID_B, KUMMER_GRID_Z,
    LAGUERRE_GRID_ALPHA, LAGUERRE_GRID_N,
};
use proptest::prelude::*;
use stefan_hhl::specfun::{
    basis_d2dx2, basis_ddt, basis_ddx, basis_jet, basis_value, gamma, kummer_phi, kummer_phi_derivative, laguerre,
    ln_gamma, pochhammer, s1_basis, s1_small_z_limit, s2_basis, BasisKind, BasisParams, EvalPoint,
};

fn rel(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn kummer_matches_double_double_series() {
    let mut worst: f64 = 0.0;
    for &a in KUMMER_GRID_A {
        for &b in KUMMER_GRID_B {
            for &z in KUMMER_GRID_Z {
                let want = kummer_oracle(a, b, z).to_f64();
                // The oracle itself is only trusted while cancellation leaves
                // it well below the tolerance.
                assert!(
                    1e-30 * kummer_term_scale(a, b, z) < 1e-13 * want.abs(),
                    "oracle too weak at {a}, {b}, {z}"
                );
                let got = kummer_phi(a, b, z).unwrap();
                let e = rel(got, want);
                assert!(e <= 1e-10, "Φ({a}, {b}, {z}) = {got}, oracle {want}, rel {e:e}");
                worst = worst.max(e);
            }
        }
    }
    assert!(worst < 1e-10);
}

#[test]
fn kummer_terminating_exact() {
    for n in 0..=12u32 {
        for &b in &[0.5, 1.0, 1.5, 2.25, 4.0] {
            for &z in &[-10.0, -3.0, -0.25, 0.5, 2.0, 7.5] {
                let a = -(n as f64);
                let want = kummer_oracle(a, b, z).to_f64();
                let got = kummer_phi(a, b, z).unwrap();
                // Scale by the largest term so cancellation near a root is not
                // charged to the evaluation.
                let scale = kummer_term_scale(a, b, z).max(want.abs());
                assert!((got - want).abs() <= 1e-12 * scale, "Φ({a}, {b}, {z}): {got} vs {want}");
            }
        }
    }
}

#[test]
fn laguerre_matches_explicit_sum() {
    for n in 0..=LAGUERRE_GRID_N {
        for &alpha in LAGUERRE_GRID_ALPHA {
            for x in laguerre_grid_x() {
                let (want, scale) = laguerre_oracle(n, alpha, x);
                let got = laguerre(n, alpha, x);
                let want = want.to_f64();
                assert!(
                    (got - want).abs() <= 1e-10 * scale.max(want.abs()),
                    "L_{n}^{alpha}({x}) = {got}, oracle {want}"
                );
            }
        }
    }
}

#[test]
fn laguerre_kummer_identity_and_recurrence() {
    for n in 1..=12u32 {
        for &alpha in &[-0.5, 0.0, 0.5, 1.0, 2.0] {
            for i in 0..=40 {
                let x = -10.0 + 0.5 * i as f64;
                let l = laguerre(n, alpha, x);
                let factor = pochhammer(alpha + 1.0, n) / pochhammer(1.0, n);
                let via_kummer = factor * kummer_phi(-(n as f64), alpha + 1.0, x).unwrap();
                assert!(
                    (l - via_kummer).abs() <= 1e-9 * (1.0 + l.abs()),
                    "n={n} α={alpha} x={x}"
                );

                let nf = n as f64;
                let lhs = (nf + 1.0) * laguerre(n + 1, alpha, x);
                let rhs = (2.0 * nf + 1.0 + alpha - x) * l - (nf + alpha) * laguerre(n - 1, alpha, x);
                assert!(
                    (lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()),
                    "recurrence n={n} α={alpha} x={x}"
                );
            }
        }
    }
}

#[test]
fn gamma_and_pochhammer_examples() {
    assert!(ln_gamma(1.0).unwrap().ln_abs.abs() < 1e-15);
    assert!(rel(ln_gamma(0.5).unwrap().ln_abs, 0.572_364_942_924_700_1) < 1e-14);
    assert!(rel(ln_gamma(5.0).unwrap().ln_abs, 24f64.ln()) < 1e-14);
    assert!(ln_gamma(0.0).is_err() && ln_gamma(-3.0).is_err());
    assert_eq!(pochhammer(3.0, 4), 360.0);
    assert_eq!(pochhammer(-2.0, 3), 0.0);
    assert!(rel(gamma(6.5).unwrap(), 287.885_277_815_044_4) < 1e-13);
}

#[test]
fn ln_gamma_matches_log_factorial() {
    let mut acc = Dd::from(0.0);
    for n in 1..=169u32 {
        // ln Γ(n+1) = Σ ln k
        acc = acc + Dd::from((n as f64).ln());
        // ln Γ vanishes at 1 and 2, so the error is relative to max(1, |ln Γ|).
        let got = ln_gamma(n as f64 + 1.0).unwrap().ln_abs;
        let want = acc.to_f64();
        assert!((got - want).abs() < 1e-12 * want.abs().max(1.0), "n={n}");
    }
}

#[test]
fn spot_values() {
    assert!(rel(kummer_phi(1.0, 1.0, 1.0).unwrap(), std::f64::consts::E) < 1e-15);
    assert!(rel(kummer_phi(-1.0, 1.5, 0.6).unwrap(), 1.0 - 0.6 / 1.5) < 1e-15);
    assert!(rel(laguerre(1, 0.5, 2.0), -0.5) < 1e-15);
    assert_eq!(laguerre(3, 0.0, 0.0), 1.0);

    let p = BasisParams::new(2.0, 1.0, 1.0).unwrap();
    let pt = EvalPoint::new(2.0, 1.0).unwrap();
    assert!(rel(s1_basis(&p, &pt).unwrap(), 8.0) < 1e-14);

    let p = BasisParams::new(0.0, 0.0, 1.0).unwrap();
    let pt = EvalPoint::new(1.0, 1.0).unwrap();
    // Φ(1/2, 3/2, −z) = √π erf(√z) / (2√z), z = 1/4.
    let want = 0.5 * std::f64::consts::PI.sqrt() * 0.520_499_877_813_046_5 / (2.0 * 0.5);
    assert!(rel(s2_basis(&p, &pt).unwrap(), want) < 1e-12);

    assert!(rel(s1_small_z_limit(1.0, 1.5).unwrap(), 0.886_226_925_452_758) < 1e-13);
    assert_eq!(s1_small_z_limit(0.0, 2.3).unwrap(), 1.0);
}

fn residual_scale(kind: BasisKind, p: &BasisParams, pt: &EvalPoint) -> (f64, f64) {
    let j = basis_jet(kind, p, pt).unwrap();
    let a2 = p.diffusivity * p.diffusivity;
    let radial = if p.nu == 0.0 { 0.0 } else { p.nu / pt.x * j.ddx };
    let r = j.heat_operator(p.diffusivity, p.nu, pt.x);
    let scale = [
        1.0,
        j.value.abs(),
        j.ddt.abs(),
        (a2 * j.d2dx2).abs(),
        (a2 * radial).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    (r.abs(), scale)
}

#[test]
fn both_bases_solve_the_heat_equation_on_a_grid() {
    for gamma_order in [0.0, 1.0, 2.0, 3.0, 4.0, -1.5, 2.7] {
        for nu in [0.0, 1.0, 2.0, 2.5, -0.5] {
            for a in [0.6, 1.0, 1.7] {
                let p = BasisParams::new(gamma_order, nu, a).unwrap();
                for i in 0..10 {
                    for j in 0..10 {
                        let pt = EvalPoint::new(0.1 + 0.49 * i as f64, 0.1 + 0.19 * j as f64).unwrap();
                        for kind in [BasisKind::S1, BasisKind::S2] {
                            let (r, scale) = residual_scale(kind, &p, &pt);
                            assert!(r <= 1e-8 * scale, "{kind:?} γ={gamma_order} ν={nu} a={a} {pt:?}: {r:e}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn two_term_closed_forms() {
    for nu in [0.0, 0.5, 2.0] {
        for a in [0.5, 1.3] {
            let p = BasisParams::new(2.0, nu, a).unwrap();
            let pt = EvalPoint::new(0.8, 0.7).unwrap();
            let s = 4.0 * a * a * pt.t + 2.0 * pt.x * pt.x / (nu + 1.0);
            assert!(rel(s1_basis(&p, &pt).unwrap(), s) < 1e-13);
            assert!(rel(basis_ddx(BasisKind::S1, &p, &pt).unwrap(), 4.0 * pt.x / (nu + 1.0)) < 1e-13);
            assert!(rel(basis_ddt(BasisKind::S1, &p, &pt).unwrap(), 4.0 * a * a) < 1e-13);
            assert!(rel(basis_d2dx2(BasisKind::S1, &p, &pt).unwrap(), 4.0 / (nu + 1.0)) < 1e-13);
        }
    }
}

fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

fn assert_fd(kind: BasisKind, p: &BasisParams, x: f64, t: f64) -> std::result::Result<(), TestCaseError> {
    let pt = EvalPoint::new(x, t).unwrap();
    let hx = 1e-5 * x.abs().max(1.0);
    let ht = 1e-5 * t.max(1.0);
    let fx = central(|x| basis_value(kind, p, &EvalPoint::new(x, t).unwrap()).unwrap(), x, hx);
    let ft = central(|t| basis_value(kind, p, &EvalPoint::new(x, t).unwrap()).unwrap(), t, ht);
    let fxx = central(|x| basis_ddx(kind, p, &EvalPoint::new(x, t).unwrap()).unwrap(), x, hx);
    let j = basis_jet(kind, p, &pt).unwrap();
    let scale = j.value.abs().max(1.0);
    prop_assert!(
        (j.ddx - fx).abs() <= 1e-6 * scale.max(j.ddx.abs()),
        "ddx {} vs {fx}",
        j.ddx
    );
    prop_assert!(
        (j.ddt - ft).abs() <= 1e-6 * scale.max(j.ddt.abs()),
        "ddt {} vs {ft}",
        j.ddt
    );
    prop_assert!(
        (j.d2dx2 - fxx).abs() <= 1e-6 * scale.max(j.d2dx2.abs()),
        "d2dx2 {} vs {fxx}",
        j.d2dx2
    );
    Ok(())
}

#[test]
fn finite_difference_reference_point() {
    let p = BasisParams::new(4.0, 2.0, 1.0).unwrap();
    for kind in [BasisKind::S1, BasisKind::S2] {
        assert_fd(kind, &p, 1.0, 1.0).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn derivatives_match_finite_differences(
        gamma_order in -2.0f64..5.0,
        nu in -1.0f64..3.0,
        a in 0.3f64..2.0,
        x in 0.2f64..4.0,
        t in 0.1f64..2.0,
        s2 in any::<bool>(),
    ) {
        let p = BasisParams::new(gamma_order, nu, a).unwrap();
        let kind = if s2 { BasisKind::S2 } else { BasisKind::S1 };
        assert_fd(kind, &p, x, t)?;
    }

    #[test]
    fn kummer_transformation_holds(a in -3.0f64..4.0, b in 0.2f64..5.0, z in -15.0f64..15.0) {
        let lhs = kummer_phi(a, b, z).unwrap();
        let rhs = z.exp() * kummer_phi(b - a, b, -z).unwrap();
        let scale = kummer_oracle(a, b, z).to_f64().abs().max(kummer_term_scale(a, b, z) * 1e-6);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale, "{lhs} vs {rhs}");
    }

    #[test]
    fn kummer_derivative_matches_difference(a in -2.0f64..3.0, b in 0.5f64..4.0, z in -5.0f64..5.0) {
        let h = 1e-5;
        let fd = (kummer_phi(a, b, z + h).unwrap() - kummer_phi(a, b, z - h).unwrap()) / (2.0 * h);
        let d = kummer_phi_derivative(a, b, z, 1).unwrap();
        prop_assert!((d - fd).abs() <= 1e-6 * d.abs().max(1.0));
    }

    #[test]
    fn laguerre_recurrence_random(n in 1u32..20, alpha in -0.9f64..4.0, x in -10.0f64..10.0) {
        let nf = n as f64;
        let lhs = (nf + 1.0) * laguerre(n + 1, alpha, x);
        let rhs = (2.0 * nf + 1.0 + alpha - x) * laguerre(n, alpha, x) - (nf + alpha) * laguerre(n - 1, alpha, x);
        let (_, scale) = laguerre_oracle(n + 1, alpha, x);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + scale * (nf + 1.0)));
    }
}
