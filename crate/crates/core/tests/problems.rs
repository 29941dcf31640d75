use stefan_hhl::heat_series::{HeatSeries, ResidualReport};
use stefan_hhl::linsys::LinearSystem;
use stefan_hhl::problems::{
    chebyshev_points, manufacture_model, manufacture_one_phase, manufacture_two_phase, reconstruct_flux,
    AssembledSystem, Condition, FluxSpec, FreeBoundary, ModelProblemD0, OnePhaseISP, ProblemError, ProblemSpec,
    RowSite, TwoPhaseISP, Unknown,
};
use stefan_hhl::specfun::{laguerre, EvalPoint};

fn solve(sys: &AssembledSystem) -> Vec<f64> {
    let x = LinearSystem::from_real(&sys.matrix, &sys.rhs)
        .unwrap()
        .classical_solve()
        .unwrap()
        .x;
    x.iter().map(|z| z.re).collect()
}

fn rel_err(got: &[f64], want: &[f64]) -> f64 {
    let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    got.iter().zip(want).fold(0.0f64, |m, (g, w)| m.max((g - w).abs())) / scale
}

fn one_phase(nu: f64, n: usize, flux: FluxSpec) -> OnePhaseISP {
    OnePhaseISP {
        nu,
        diffusivity: 0.9,
        melt_temp: 0.0,
        boundary_temp: Vec::new(),
        robin_beta: 1.3,
        robin_gamma: 0.4,
        latent_heat: 0.0,
        density: 2.0,
        conductivity: 1.7,
        boundary: FreeBoundary::SelfSimilar { coeff: 0.8 },
        flux,
        truncation: n,
        extended_domain: false,
    }
}

fn two_phase(nu: f64, n: usize, k: usize) -> TwoPhaseISP {
    TwoPhaseISP {
        nu,
        a1: 1.0,
        a2: 0.7,
        melt_temp: 1.5,
        robin_beta: 0.8,
        robin_gamma: 0.3,
        latent_heat: 0.0,
        density: 1.2,
        conductivity1: 1.0,
        conductivity2: 2.5,
        initial_profile_taylor: vec![1.5],
        boundary: FreeBoundary::SelfSimilar { coeff: 0.6 },
        far_field_cutoff: None,
        far_field_points: 0,
        collocation_count: k,
        horizon: 0.8,
        flux_terms: None,
        truncation: n,
        extended_domain: false,
    }
}

const PROBES: [f64; 4] = [0.13, 0.37, 0.61, 0.77];

#[test]
fn one_phase_round_trip() {
    for nu in [0.3, 0.5, 2.0, 2.5] {
        for n in 0..=2 {
            for known in [false, true] {
                let flux = if known {
                    FluxSpec::Known(Vec::new())
                } else {
                    FluxSpec::Unknown
                };
                let a: Vec<f64> = (0..=n).map(|i| 0.7 - 0.45 * i as f64).collect();
                let (p, truth) = manufacture_one_phase(&one_phase(nu, n, flux), &a, 0.9).unwrap();
                let sys = p.assemble().unwrap();
                let want = sys.coefficients_of(&truth);
                let got = solve(&sys);
                assert!(
                    rel_err(&got, &want) < 1e-8,
                    "ν={nu} N={n} known={known}: {got:?} vs {want:?}"
                );

                let sol = sys.solution(&got).unwrap();
                let spec = ProblemSpec::OnePhase(p);
                let report = spec.boundary_residuals(&sol, &PROBES).unwrap();
                assert!(report.max_residual < 1e-8, "ν={nu} N={n}: {report:?}");
            }
        }
    }
}

#[test]
fn one_phase_coincident_example() {
    // θ = 4t + x², a = 1, α = 2, ν = 1; with λ = 0 the Stefan balance is trivial.
    let mut template = one_phase(1.0, 1, FluxSpec::Unknown);
    template.diffusivity = 1.0;
    template.conductivity = 0.0;
    template.boundary = FreeBoundary::SelfSimilar { coeff: 2.0 };
    let (p, truth) = manufacture_one_phase(&template, &[0.0, 1.0], 0.0).unwrap();
    assert_eq!(p.boundary_temp, vec![0.0, 8.0]);
    let sys = p.assemble().unwrap();
    let iso1 = sys
        .row_provenance
        .iter()
        .position(|r| r.condition == Condition::Isotherm && r.site == RowSite::Power(1))
        .unwrap();
    let a1 = sys.unknowns.iter().position(|u| *u == Unknown::A(1)).unwrap();
    assert_eq!(sys.matrix[(iso1, a1)], 4.0 * laguerre(1, 0.0, -1.0));
    let got = solve(&sys);
    assert!(rel_err(&got, &sys.coefficients_of(&truth)) < 1e-10);
    assert!((got[a1] - 1.0).abs() < 1e-10);

    let with_conduction = {
        let mut t = template.clone();
        t.conductivity = 1.0;
        t
    };
    assert!(matches!(
        manufacture_one_phase(&with_conduction, &[0.0, 1.0], 0.0),
        Err(ProblemError::SingularData(_))
    ));
}

#[test]
fn one_phase_rhs_perturbation_moves_solution() {
    let (p, _) = manufacture_one_phase(&one_phase(0.5, 2, FluxSpec::Unknown), &[0.2, -0.1, 0.3], 0.5).unwrap();
    let sys = p.assemble().unwrap();
    let base = solve(&sys);
    let mut bumped = sys.clone();
    bumped.rhs[sys.dim() / 2] += 1e-3;
    let moved = solve(&bumped);
    let diff = base.iter().zip(&moved).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(diff > 1e-4, "diff {diff}");
}

#[test]
fn one_phase_zero_problem() {
    let p = one_phase(0.5, 0, FluxSpec::Known(vec![0.0]));
    let sys = p.assemble().unwrap();
    let x = solve(&sys);
    assert!(x.iter().all(|v| *v == 0.0));
    let report = ProblemSpec::OnePhase(p)
        .boundary_residuals(&sys.solution(&x).unwrap(), &PROBES)
        .unwrap();
    assert_eq!(report.max_residual, 0.0);
}

#[test]
fn residuals_grow_with_perturbation() {
    let (p, truth) = manufacture_one_phase(&one_phase(0.5, 2, FluxSpec::Unknown), &[0.4, 0.2, -0.3], 0.6).unwrap();
    let spec = ProblemSpec::OnePhase(p);
    let mut last = spec.boundary_residuals(&truth, &PROBES).unwrap().max_residual;
    for eps in [1e-6, 1e-5, 1e-4, 1e-3] {
        let mut a = truth.phase1.coeffs_a().to_vec();
        for v in a.iter_mut() {
            *v += eps;
        }
        let mut sol = truth.clone();
        sol.phase1 = HeatSeries::new(0.9, 0.5, a, truth.phase1.coeffs_b().to_vec()).unwrap();
        let r = spec.boundary_residuals(&sol, &PROBES).unwrap().max_residual;
        assert!(r > last, "eps {eps}: {r} ≤ {last}");
        last = r;
    }
}

fn model(nu: f64, f: Vec<f64>, n: usize) -> ModelProblemD0 {
    ModelProblemD0 {
        nu,
        diffusivity: 1.0,
        boundary: FreeBoundary::SelfSimilar { coeff: 2.0 },
        f_taylor: f,
        conductivity: 0.75,
        latent_heat: 3.0,
        density: 0.4,
        truncation: n,
        extended_domain: false,
    }
}

#[test]
fn model_linear_data() {
    let c1 = 2.7;
    let p = model(1.0, vec![0.0, c1], 4);
    let sys = p.assemble().unwrap();
    let x = solve(&sys);
    assert!((x[1] - c1 / 8.0).abs() <= 1e-12 * c1 / 8.0);
    assert!(x.iter().enumerate().all(|(i, v)| i == 1 || *v == 0.0));

    let sol = sys.solution(&x).unwrap();
    let times = [0.1, 0.3, 0.5, 0.7, 0.9];
    let got = reconstruct_flux(&p, &sol.phase1, &times).unwrap();
    let (lambda, lrho, alpha) = (p.conductivity, p.latent_heat * p.density, 2.0);
    for (t, g) in times.iter().zip(got) {
        let want = 2.0 * lambda * x[1] * alpha * t.sqrt() - lrho * alpha / (2.0 * t.sqrt());
        assert!((g - want).abs() < 1e-10, "t={t}: {g} vs {want}");
    }
}

#[test]
fn model_quadratic_data() {
    for nu in [0.5, 1.0, 2.0] {
        let p = model(nu, vec![0.0, 0.0, 1.0], 3);
        let x = solve(&p.assemble().unwrap());
        let beta = (nu - 1.0) / 2.0;
        // L_2^β(y) = ((β+1)(β+2) − 2(β+2)y + y²)/2 at y = −1.
        let l2 = ((beta + 1.0) * (beta + 2.0) + 2.0 * (beta + 2.0) + 1.0) / 2.0;
        let want = 1.0 / (16.0 * l2);
        assert!((x[2] - want).abs() < 1e-12 * want);
        assert!(x.iter().enumerate().all(|(i, v)| i == 2 || *v == 0.0));
    }
}

#[test]
fn model_zero_and_diagonal() {
    let x = solve(&model(1.0, vec![0.0], 3).assemble().unwrap());
    assert!(x.iter().all(|v| *v == 0.0));

    let f = vec![0.0, 0.3, -1.2, 0.8, 2.0];
    let p = model(2.5, f.clone(), 4);
    let sys = p.assemble().unwrap();
    for i in 0..5 {
        for j in 0..5 {
            assert!(i == j || sys.matrix[(i, j)] == 0.0);
        }
    }
    let x = solve(&sys);
    for n in 0..5 {
        let closed = f[n] / p.diagonal(2.0, n);
        assert!((x[n] - closed).abs() <= 1e-12 * closed.abs().max(1e-300));
    }
}

#[test]
fn model_round_trip() {
    let (p, truth) = manufacture_model(&model(0.7, Vec::new(), 3), &[0.0, 1.0, -0.5, 0.25]).unwrap();
    let sys = p.assemble().unwrap();
    let got = solve(&sys);
    assert!(rel_err(&got, &sys.coefficients_of(&truth)) < 1e-12);
    let spec = ProblemSpec::Model(p);
    assert!(spec.boundary_residuals(&truth, &PROBES).unwrap().max_residual < 1e-12);
}

#[test]
fn two_phase_round_trip() {
    for nu in [0.5, 2.0] {
        for (n, k) in [(0, 1), (1, 2), (2, 3)] {
            let a: Vec<f64> = (0..=n).map(|i| 0.9 + 0.35 * i as f64).collect();
            let (p, truth) = manufacture_two_phase(&two_phase(nu, n, k), &a).unwrap();
            let sys = p.assemble().unwrap();
            assert_eq!(sys.dim(), 4 * k + n + 1);
            let want = sys.coefficients_of(&truth);
            let got = solve(&sys);
            assert!(rel_err(&got, &want) < 1e-8, "ν={nu} N={n}: {got:?} vs {want:?}");

            let sol = sys.solution(&got).unwrap();
            let spec = ProblemSpec::TwoPhase(p.clone());
            let report = spec.boundary_residuals(&sol, &[0.05, 0.22, 0.48, 0.71]).unwrap();
            assert!(report.max_residual < 1e-8, "ν={nu} N={n}: {}", report.max_residual);

            for (i, r) in sys.row_provenance.iter().enumerate() {
                if r.condition == Condition::InitialData {
                    let res = sys.row_residuals(&want)[i];
                    assert!(res.abs() < 1e-14, "initial row {i}: {res}");
                }
            }
        }
    }
}

#[test]
fn two_phase_initial_profile_is_the_small_time_limit() {
    let (p, truth) = manufacture_two_phase(&two_phase(0.5, 2, 3), &[0.9, 1.2, -0.4]).unwrap();
    let s2 = truth.phase2.unwrap();
    let x: f64 = 0.35;
    let f: f64 = p
        .initial_data()
        .iter()
        .enumerate()
        .map(|(n, c)| c * x.powi(2 * n as i32))
        .sum();
    // θ₂(x, t) − f(x) is O(t); fit a line through small times and read off t = 0.
    let ts = [1.0e-3, 2.0e-3];
    let vals: Vec<f64> = ts
        .iter()
        .map(|&t| s2.evaluate(&EvalPoint::new(x, t).unwrap()).unwrap())
        .collect();
    let at_zero = 2.0 * vals[0] - vals[1];
    assert!((at_zero - f).abs() < 1e-4 * f.abs().max(1.0), "{at_zero} vs {f}");
}

#[test]
fn two_phase_counts() {
    let sys = two_phase(0.5, 2, 3).assemble().unwrap();
    assert_eq!(sys.dim(), 4 * 3 + 3);
    let pointwise: Vec<f64> = sys
        .row_provenance
        .iter()
        .filter_map(|r| match r.site {
            RowSite::Point(t) if r.condition == Condition::Stefan => Some(t),
            _ => None,
        })
        .collect();
    assert_eq!(pointwise, chebyshev_points(3, 0.8));

    assert!(matches!(
        two_phase(0.5, 1, 3).assemble(),
        Err(ProblemError::StructurallySingular(_))
    ));
}

#[test]
fn two_phase_degenerate_zero() {
    let mut p = two_phase(0.5, 1, 2);
    p.melt_temp = 0.0;
    p.initial_profile_taylor = vec![0.0];
    let sys = p.assemble().unwrap();
    assert!(solve(&sys).iter().all(|v| *v == 0.0));
}

#[test]
fn two_phase_coincident_families() {
    let mut p = two_phase(1.0, 1, 2);
    p.initial_profile_taylor = vec![1.5, 0.2];
    let sys = p.assemble().unwrap();
    assert!(!sys.unknowns.iter().any(|u| matches!(u, Unknown::B(_) | Unknown::D(_))));
    assert_eq!(sys.dim(), 2 + 2 + 2);
    let x = solve(&sys);
    let sol = sys.solution(&x).unwrap();
    let s2 = sol.phase2.as_ref().unwrap();
    assert!((s2.coeffs_a()[0] - 1.5).abs() < 1e-12 && (s2.coeffs_a()[1] - 0.2).abs() < 1e-12);
}

#[test]
fn two_phase_polynomial_boundary_collocates() {
    let mut p = two_phase(0.5, 2, 3);
    p.boundary = FreeBoundary::Polynomial {
        coeffs: vec![0.0, 0.9, -0.2],
    };
    let sys = p.assemble().unwrap();
    let x = solve(&sys);
    let sol = sys.solution(&x).unwrap();
    let spec = ProblemSpec::TwoPhase(p);
    let at_nodes = spec.boundary_residuals(&sol, &spec.collocation_times()).unwrap();
    assert!(at_nodes.max_residual < 1e-8, "{}", at_nodes.max_residual);
}

#[test]
fn provenance_is_total() {
    let systems = [
        ProblemSpec::OnePhase(one_phase(0.5, 2, FluxSpec::Unknown))
            .assemble()
            .unwrap(),
        ProblemSpec::Model(model(1.0, vec![0.0, 1.0], 2)).assemble().unwrap(),
        ProblemSpec::TwoPhase(two_phase(0.5, 2, 3)).assemble().unwrap(),
    ];
    for sys in systems {
        assert_eq!(sys.matrix.nrows(), sys.matrix.ncols());
        assert_eq!(sys.row_provenance.len(), sys.dim());
        assert_eq!(sys.unknown_labels().len(), sys.dim());
        let mut labels = sys.row_labels();
        labels.sort();
        labels.dedup();
        assert_eq!(labels.len(), sys.dim(), "row labels must be distinct");
    }
}

#[test]
fn empty_report_for_no_probes() {
    let p = one_phase(0.5, 0, FluxSpec::Unknown);
    let sys = p.assemble().unwrap();
    let sol = sys.solution(&vec![0.0; sys.dim()]).unwrap();
    let r: ResidualReport = ProblemSpec::OnePhase(p).boundary_residuals(&sol, &[]).unwrap();
    assert_eq!(r.max_residual, 0.0);
    assert!(r.per_point.is_empty());
}
