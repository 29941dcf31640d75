//! Regenerates the manufactured fixtures under `tests/fixtures/valid`.
//!
//! ```text
//! cargo run --example generate_fixtures
//! ```

use std::path::Path;

use stefan_hhl::problem_file::format_problem;
use stefan_hhl::problems::{
    manufacture_model, manufacture_one_phase, manufacture_two_phase, FluxSpec, FreeBoundary, ModelProblemD0,
    OnePhaseISP, ProblemSpec, TwoPhaseISP,
};

fn one_phase(nu: f64, truncation: usize, flux: FluxSpec) -> OnePhaseISP {
    OnePhaseISP {
        nu,
        diffusivity: 0.8,
        melt_temp: 0.0,
        boundary_temp: Vec::new(),
        robin_beta: 0.5,
        robin_gamma: 1.0,
        latent_heat: 1.0,
        density: 2.0,
        conductivity: 1.5,
        boundary: FreeBoundary::SelfSimilar { coeff: 0.9 },
        flux,
        truncation,
        extended_domain: false,
    }
}

fn two_phase(nu: f64, truncation: usize, collocation_count: usize) -> TwoPhaseISP {
    TwoPhaseISP {
        nu,
        a1: 1.0,
        a2: 0.7,
        melt_temp: 1.0,
        robin_beta: 0.0,
        robin_gamma: 1.0,
        latent_heat: 1.0,
        density: 1.0,
        conductivity1: 1.2,
        conductivity2: 0.9,
        initial_profile_taylor: vec![1.0],
        boundary: FreeBoundary::SelfSimilar { coeff: 0.6 },
        far_field_cutoff: None,
        far_field_points: 0,
        collocation_count,
        horizon: 1.0,
        flux_terms: None,
        truncation,
        extended_domain: false,
    }
}

fn write(dir: &Path, name: &str, header: &str, spec: &ProblemSpec) {
    let text = format!("# {header}\n{}", format_problem(spec));
    std::fs::write(dir.join(name), text).expect("write fixture");
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/valid");
    std::fs::create_dir_all(&dir).expect("fixture dir");

    let (p, _) = manufacture_one_phase(&one_phase(0.5, 2, FluxSpec::Unknown), &[1.0, -0.4, 0.25], 0.3).unwrap();
    write(
        &dir,
        "one_phase_unknown_flux.prob",
        "manufactured one-phase, flux recovered",
        &ProblemSpec::OnePhase(p),
    );

    let (p, _) = manufacture_one_phase(&one_phase(2.0, 1, FluxSpec::Known(Vec::new())), &[0.5, 0.75], -0.2).unwrap();
    write(
        &dir,
        "one_phase_known_flux.prob",
        "manufactured one-phase, flux given",
        &ProblemSpec::OnePhase(p),
    );

    let template = ModelProblemD0 {
        nu: 0.5,
        diffusivity: 1.0,
        boundary: FreeBoundary::SelfSimilar { coeff: 1.2 },
        f_taylor: Vec::new(),
        conductivity: 1.0,
        latent_heat: 2.0,
        density: 1.0,
        truncation: 1,
        extended_domain: false,
    };
    let (p, _) = manufacture_model(&template, &[0.0, 0.6]).unwrap();
    write(&dir, "model.prob", "manufactured model problem", &ProblemSpec::Model(p));

    let (p, _) = manufacture_two_phase(&two_phase(0.5, 1, 2), &[0.4, -0.3]).unwrap();
    write(
        &dir,
        "two_phase_n1.prob",
        "manufactured two-phase, N = 1, k = 2",
        &ProblemSpec::TwoPhase(p),
    );

    let (p, _) = manufacture_two_phase(&two_phase(2.0, 2, 3), &[0.8, 0.2, -0.1]).unwrap();
    write(
        &dir,
        "two_phase_n2.prob",
        "manufactured two-phase, N = 2, k = 3",
        &ProblemSpec::TwoPhase(p),
    );
}
