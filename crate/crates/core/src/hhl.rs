//! Statevector simulation of the HHL linear-system algorithm.
//!
//! Registers: one ancilla qubit, an `n_b`-qubit solution register and an
//! `n_l`-qubit clock. Amplitude index is `anc + 2·(b + 2^{n_b}·clock)`.
//!
//! Stages:
//!
//! 1. load `|b⟩` into the solution register,
//! 2. phase estimation with `U = e^{iMt}` (Hadamards on the clock,
//!    `U^c` controlled on clock value `c`, inverse QFT on the clock),
//! 3. ancilla rotation `|0⟩ ↦ √(1−C²/λ̃²)|0⟩ + (C/λ̃)|1⟩` per clock value,
//! 4. inverse phase estimation, then post-selection on ancilla `1`.
//!
//! `U^c` is applied through an exact eigendecomposition of `M`. The clock is
//! read in two's complement, so clock value `k` stands for
//! `λ̃ = 2π·k_signed/(2^{n_l} t)`. Clock value `0` cannot be inverted; its
//! probability mass is reported as inversion leakage.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::Serialize;
use thiserror::Error;

use crate::linsys::{self, LinearSystem, LinsysError, SpectralScaling};

/// Desk-scale cap on `n_b + n_l + 1`.
pub const MAX_QUBITS: usize = 24;
/// Allowed drift of `‖state‖₂` from 1.
pub const NORM_TOL: f64 = 1e-10;
/// Amplitudes at or below this are omitted from state dumps.
pub const DUMP_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HhlError {
    #[error("register layout needs n_b ≥ 1 and n_l ≥ 1, got n_b = {n_b}, n_l = {n_l}")]
    BadLayout { n_b: usize, n_l: usize },
    #[error("{total} qubits exceed the cap of {MAX_QUBITS}")]
    TooManyQubits { total: usize },
    #[error("vector of length {got} does not fit a register of dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("cannot load the zero vector")]
    ZeroVector,
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("eigenvalue {lambda} has phase {phase} outside [−1/2, 1/2) for t = {t}")]
    SpectrumOutOfBand { lambda: f64, phase: f64, t: f64 },
    #[error("inversion constant C = {c} exceeds the smallest representable |λ̃| = {min_lambda}")]
    CTooLarge { c: f64, min_lambda: f64 },
    #[error("post-selection succeeds with probability 0")]
    ZeroSuccess,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Linsys(#[from] LinsysError),
}

pub type Result<T> = std::result::Result<T, HhlError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegisterLayout {
    pub n_b: usize,
    pub n_l: usize,
}

impl RegisterLayout {
    pub fn new(n_b: usize, n_l: usize) -> Result<Self> {
        if n_b == 0 || n_l == 0 {
            return Err(HhlError::BadLayout { n_b, n_l });
        }
        let total = n_b + n_l + 1;
        if total > MAX_QUBITS {
            return Err(HhlError::TooManyQubits { total });
        }
        Ok(Self { n_b, n_l })
    }

    pub fn total_qubits(&self) -> usize {
        self.n_b + self.n_l + 1
    }

    pub fn solution_dim(&self) -> usize {
        1 << self.n_b
    }

    pub fn clock_dim(&self) -> usize {
        1 << self.n_l
    }

    pub fn len(&self) -> usize {
        1 << self.total_qubits()
    }

    /// Always false: even zero qubits hold one amplitude.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, ancilla: usize, b: usize, clock: usize) -> usize {
        ancilla + 2 * (b + self.solution_dim() * clock)
    }

    /// `(ancilla, b, clock)` of an amplitude index.
    pub fn split(&self, index: usize) -> (usize, usize, usize) {
        let rest = index >> 1;
        (index & 1, rest % self.solution_dim(), rest / self.solution_dim())
    }

    /// Two's-complement reading of a clock value.
    pub fn signed_clock(&self, clock: usize) -> i64 {
        let n = self.clock_dim() as i64;
        let k = clock as i64;
        if k >= n / 2 {
            k - n
        } else {
            k
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    layout: RegisterLayout,
}

impl StateVector {
    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, ancilla: usize, b: usize, clock: usize) -> Complex64 {
        self.amplitudes[self.layout.index(ancilla, b, clock)]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Probability of each clock value.
    pub fn clock_distribution(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.layout.clock_dim()];
        for (i, z) in self.amplitudes.iter().enumerate() {
            p[self.layout.split(i).2] += z.norm_sqr();
        }
        p
    }

    /// Probability that the ancilla reads 1.
    pub fn ancilla_one_probability(&self) -> f64 {
        self.amplitudes.iter().skip(1).step_by(2).map(|z| z.norm_sqr()).sum()
    }

    /// Applies `f` to every clock column (fixed ancilla and solution index).
    fn map_clock_columns(&mut self, mut f: impl FnMut(&mut [Complex64])) {
        let l = self.layout;
        let mut col = vec![Complex64::new(0.0, 0.0); l.clock_dim()];
        for anc in 0..2 {
            for b in 0..l.solution_dim() {
                for (c, slot) in col.iter_mut().enumerate() {
                    *slot = self.amplitudes[l.index(anc, b, c)];
                }
                f(&mut col);
                for (c, v) in col.iter().enumerate() {
                    self.amplitudes[l.index(anc, b, c)] = *v;
                }
            }
        }
    }

    /// Applies `f(clock, column)` to every solution-register column.
    fn map_solution_columns(&mut self, mut f: impl FnMut(usize, &mut DVector<Complex64>)) {
        let l = self.layout;
        let mut col = DVector::zeros(l.solution_dim());
        for anc in 0..2 {
            for c in 0..l.clock_dim() {
                for b in 0..l.solution_dim() {
                    col[b] = self.amplitudes[l.index(anc, b, c)];
                }
                f(c, &mut col);
                for b in 0..l.solution_dim() {
                    self.amplitudes[l.index(anc, b, c)] = col[b];
                }
            }
        }
    }

    /// `index re im` lines for amplitudes above [`DUMP_THRESHOLD`].
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, z) in self.amplitudes.iter().enumerate() {
            if z.norm() > DUMP_THRESHOLD {
                out.push_str(&format!("{i} {:e} {:e}\n", z.re, z.im));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Mode {
    /// Project the ancilla onto `|1⟩` analytically.
    ExactPostselect,
    /// Draw `shots` measurements of the final state from a seeded generator.
    Sampled { shots: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HHLConfig {
    pub evolution_time: f64,
    pub inversion_constant: f64,
    pub mode: Mode,
}

impl HHLConfig {
    /// `t = 2π(2^{n_l−1} − 1)/(2^{n_l} λ_max)` maps `λ_max` onto the largest
    /// positive clock value; `C = 2π/(2^{n_l} t)` is the smallest nonzero
    /// `|λ̃|`.
    pub fn for_spectrum(n_l: usize, lambda_max: f64) -> Result<Self> {
        if n_l < 2 {
            return Err(HhlError::InvalidConfig(
                "the default evolution time needs n_l ≥ 2 (one sign bit plus one magnitude bit)".into(),
            ));
        }
        if !(lambda_max > 0.0 && lambda_max.is_finite()) {
            return Err(HhlError::InvalidConfig(format!(
                "spectral bound {lambda_max} must be > 0"
            )));
        }
        let n = (1u64 << n_l) as f64;
        let t = 2.0 * PI * (n / 2.0 - 1.0) / (n * lambda_max);
        Ok(Self {
            evolution_time: t,
            inversion_constant: 2.0 * PI / (n * t),
            mode: Mode::ExactPostselect,
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.evolution_time > 0.0 && self.evolution_time.is_finite()) {
            return Err(HhlError::InvalidConfig("evolution time must be > 0".into()));
        }
        if !(self.inversion_constant > 0.0 && self.inversion_constant.is_finite()) {
            return Err(HhlError::InvalidConfig("inversion constant must be > 0".into()));
        }
        if let Mode::Sampled { shots: 0, .. } = self.mode {
            return Err(HhlError::InvalidConfig("sampled mode needs shots > 0".into()));
        }
        Ok(())
    }

    /// Eigenvalue represented by a clock value.
    pub fn clock_eigenvalue(&self, layout: &RegisterLayout, clock: usize) -> f64 {
        2.0 * PI * layout.signed_clock(clock) as f64 / (layout.clock_dim() as f64 * self.evolution_time)
    }
}

/// `U^c = V diag(e^{iλct}) V†` for a Hermitian `M`.
struct Evolution {
    vectors: DMatrix<Complex64>,
    adjoint: DMatrix<Complex64>,
    values: Vec<f64>,
    t: f64,
}

impl Evolution {
    fn new(sys: &LinearSystem, t: f64) -> Result<Self> {
        if !sys.is_hermitian() {
            return Err(HhlError::NotHermitian);
        }
        let eig = SymmetricEigen::new(sys.matrix().clone());
        let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        for &lambda in &values {
            let phase = lambda * t / (2.0 * PI);
            if !(-0.5..0.5).contains(&phase) {
                return Err(HhlError::SpectrumOutOfBand { lambda, phase, t });
            }
        }
        Ok(Self {
            adjoint: eig.eigenvectors.adjoint(),
            vectors: eig.eigenvectors,
            values,
            t,
        })
    }

    fn apply_power(&self, v: &mut DVector<Complex64>, power: f64) {
        let mut w = &self.adjoint * &*v;
        for (wi, &lambda) in w.iter_mut().zip(&self.values) {
            *wi *= Complex64::from_polar(1.0, lambda * power * self.t);
        }
        *v = &self.vectors * w;
    }
}

fn walsh_hadamard(col: &mut [Complex64]) {
    let n = col.len();
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for i in start..start + h {
                let (x, y) = (col[i], col[i + h]);
                col[i] = x + y;
                col[i + h] = x - y;
            }
        }
        h *= 2;
    }
    let s = 1.0 / (n as f64).sqrt();
    col.iter_mut().for_each(|z| *z *= s);
}

/// Loads `b/‖b‖` into the solution register; clock and ancilla start in `|0⟩`.
pub fn prepare_state(b: &DVector<Complex64>, layout: RegisterLayout) -> Result<StateVector> {
    if b.len() != layout.solution_dim() {
        return Err(HhlError::DimensionMismatch {
            expected: layout.solution_dim(),
            got: b.len(),
        });
    }
    let norm = b.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(HhlError::ZeroVector);
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); layout.len()];
    for (j, v) in b.iter().enumerate() {
        amplitudes[layout.index(0, j, 0)] = v / norm;
    }
    Ok(StateVector { amplitudes, layout })
}

fn check_dims(state: &StateVector, sys: &LinearSystem) -> Result<()> {
    if sys.dim() != state.layout.solution_dim() {
        return Err(HhlError::DimensionMismatch {
            expected: state.layout.solution_dim(),
            got: sys.dim(),
        });
    }
    Ok(())
}

/// Phase estimation of `U = e^{iMt}` on the clock register.
pub fn qpe(mut state: StateVector, sys: &LinearSystem, cfg: &HHLConfig) -> Result<StateVector> {
    cfg.validate()?;
    check_dims(&state, sys)?;
    let evo = Evolution::new(sys, cfg.evolution_time)?;
    state.map_clock_columns(walsh_hadamard);
    state.map_solution_columns(|c, v| evo.apply_power(v, c as f64));
    let n = state.layout.clock_dim();
    let fft = FftPlanner::new().plan_fft_forward(n);
    let s = 1.0 / (n as f64).sqrt();
    state.map_clock_columns(|col| {
        fft.process(col);
        col.iter_mut().for_each(|z| *z *= s);
    });
    Ok(state)
}

/// Inverse of [`qpe`].
pub fn inverse_qpe(mut state: StateVector, sys: &LinearSystem, cfg: &HHLConfig) -> Result<StateVector> {
    cfg.validate()?;
    check_dims(&state, sys)?;
    let evo = Evolution::new(sys, cfg.evolution_time)?;
    let n = state.layout.clock_dim();
    let ifft = FftPlanner::new().plan_fft_inverse(n);
    let s = 1.0 / (n as f64).sqrt();
    state.map_clock_columns(|col| {
        ifft.process(col);
        col.iter_mut().for_each(|z| *z *= s);
    });
    state.map_solution_columns(|c, v| evo.apply_power(v, -(c as f64)));
    state.map_clock_columns(walsh_hadamard);
    Ok(state)
}

/// Rotated state plus the probability mass left on clock value 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Inverted {
    pub state: StateVector,
    pub leakage: f64,
}

/// Ancilla rotation conditioned on the clock register.
pub fn eigenvalue_inversion(mut state: StateVector, cfg: &HHLConfig) -> Result<Inverted> {
    cfg.validate()?;
    let l = state.layout;
    let min_lambda = 2.0 * PI / (l.clock_dim() as f64 * cfg.evolution_time);
    if cfg.inversion_constant > min_lambda * (1.0 + 1e-12) {
        return Err(HhlError::CTooLarge {
            c: cfg.inversion_constant,
            min_lambda,
        });
    }
    let mut leakage = 0.0;
    for clock in 0..l.clock_dim() {
        if l.signed_clock(clock) == 0 {
            for b in 0..l.solution_dim() {
                leakage += (0..2).map(|a| state.amplitude(a, b, clock).norm_sqr()).sum::<f64>();
            }
            continue;
        }
        let r = (cfg.inversion_constant / cfg.clock_eigenvalue(&l, clock)).clamp(-1.0, 1.0);
        let c = (1.0 - r * r).sqrt();
        for b in 0..l.solution_dim() {
            let (i0, i1) = (l.index(0, b, clock), l.index(1, b, clock));
            let (z0, z1) = (state.amplitudes[i0], state.amplitudes[i1]);
            state.amplitudes[i0] = z0 * c - z1 * r;
            state.amplitudes[i1] = z0 * r + z1 * c;
        }
    }
    Ok(Inverted { state, leakage })
}

/// Outcome of post-selecting the ancilla on `|1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct PostSelected {
    /// Normalized solution-register amplitudes at clock value 0.
    pub solution: DVector<Complex64>,
    pub success_probability: f64,
    /// `1 − P(clock = 0 | ancilla = 1)`; zero when the clock disentangles.
    pub clock_residual: f64,
    pub state: StateVector,
}

/// Inverse phase estimation followed by post-selection on ancilla `1`.
pub fn uncompute_and_postselect(state: StateVector, sys: &LinearSystem, cfg: &HHLConfig) -> Result<PostSelected> {
    let state = inverse_qpe(state, sys, cfg)?;
    let success = state.ancilla_one_probability();
    if !(success > 0.0) {
        return Err(HhlError::ZeroSuccess);
    }
    let l = state.layout;
    let raw = DVector::from_fn(l.solution_dim(), |b, _| state.amplitude(1, b, 0));
    let kept = raw.norm_squared();
    if !(kept > 0.0) {
        return Err(HhlError::ZeroSuccess);
    }
    Ok(PostSelected {
        solution: raw.unscale(kept.sqrt()),
        success_probability: success,
        clock_residual: (1.0 - kept / success).max(0.0),
        state,
    })
}

/// `|⟨u/‖u‖, v/‖v‖⟩|²`.
pub fn fidelity(u: &DVector<Complex64>, v: &DVector<Complex64>) -> Result<f64> {
    if u.len() != v.len() {
        return Err(HhlError::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return Err(HhlError::ZeroVector);
    }
    Ok((u.dotc(v).norm() / (nu * nv)).powi(2).min(1.0))
}

/// `⟨x|M|x⟩` for Hermitian `M`.
pub fn observable_expectation(x: &DVector<Complex64>, sys: &LinearSystem) -> Result<f64> {
    if !sys.is_hermitian() {
        return Err(HhlError::NotHermitian);
    }
    if x.len() != sys.dim() {
        return Err(HhlError::DimensionMismatch {
            expected: sys.dim(),
            got: x.len(),
        });
    }
    let v = x.dotc(&(sys.matrix() * x));
    debug_assert!(v.im.abs() <= 1e-10 * v.re.abs().max(1.0) * x.norm_squared().max(1.0));
    Ok(v.re)
}

/// Measurement statistics from sampled mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledStats {
    pub shots: u64,
    pub successes: u64,
    pub estimated_success_probability: f64,
    /// `(Σ_j √(p̂_j q_j))²` between the sampled solution-register histogram
    /// (ancilla 1, clock 0) and `|x_j|²` of the classical solution.
    pub distribution_fidelity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HHLResult {
    pub solution: DVector<Complex64>,
    pub success_probability: f64,
    pub fidelity_vs_classical: f64,
    pub observable_value: Option<f64>,
    pub inversion_leakage: f64,
    pub clock_residual: f64,
    pub sampled: Option<SampledStats>,
}

/// Runs the full algorithm on a Hermitian system of dimension `2^{n_b}`.
pub fn hhl_solve(sys: &LinearSystem, layout: RegisterLayout, cfg: &HHLConfig) -> Result<HHLResult> {
    Ok(hhl_run(sys, layout, cfg)?.0)
}

fn hhl_run(sys: &LinearSystem, layout: RegisterLayout, cfg: &HHLConfig) -> Result<(HHLResult, StateVector)> {
    if !sys.is_hermitian() {
        return Err(HhlError::NotHermitian);
    }
    let state = prepare_state(sys.rhs(), layout)?;
    let state = qpe(state, sys, cfg)?;
    let Inverted { state, leakage } = eigenvalue_inversion(state, cfg)?;
    let post = uncompute_and_postselect(state, sys, cfg)?;
    let classical = sys.classical_solve()?.x;
    let fid = fidelity(&post.solution, &classical)?;
    let observable_value = Some(observable_expectation(&post.solution, sys)?);
    let sampled = match cfg.mode {
        Mode::ExactPostselect => None,
        Mode::Sampled { shots, seed } => Some(sample(&post.state, &classical, shots, seed)),
    };
    Ok((
        HHLResult {
            solution: post.solution,
            success_probability: post.success_probability,
            fidelity_vs_classical: fid,
            observable_value,
            inversion_leakage: leakage,
            clock_residual: post.clock_residual,
            sampled,
        },
        post.state,
    ))
}

fn sample(state: &StateVector, classical: &DVector<Complex64>, shots: u64, seed: u64) -> SampledStats {
    let l = state.layout;
    let weights: Vec<f64> = state.amplitudes.iter().map(|z| z.norm_sqr()).collect();
    let dist = WeightedIndex::new(&weights).expect("normalized state has positive weight");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut successes = 0;
    let mut hist = vec![0u64; l.solution_dim()];
    for _ in 0..shots {
        let (anc, b, clock) = l.split(dist.sample(&mut rng));
        if anc == 1 {
            successes += 1;
            if clock == 0 {
                hist[b] += 1;
            }
        }
    }
    let kept: u64 = hist.iter().sum();
    let distribution_fidelity = (kept > 0).then(|| {
        let norm = classical.norm_squared();
        hist.iter()
            .zip(classical.iter())
            .map(|(&h, x)| (h as f64 / kept as f64 * x.norm_sqr() / norm).sqrt())
            .sum::<f64>()
            .powi(2)
    });
    SampledStats {
        shots,
        successes,
        estimated_success_probability: successes as f64 / shots as f64,
        distribution_fidelity,
    }
}

/// Options for [`solve_system`]; unset values take the defaults of
/// [`HHLConfig::for_spectrum`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions {
    pub clock_qubits: usize,
    pub evolution_time: Option<f64>,
    pub inversion_constant: Option<f64>,
    pub mode: Mode,
}

impl PipelineOptions {
    pub fn new(clock_qubits: usize) -> Self {
        Self {
            clock_qubits,
            evolution_time: None,
            inversion_constant: None,
            mode: Mode::ExactPostselect,
        }
    }
}

/// HHL applied to an arbitrary square system.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    /// Solution of the original system, rescaled by least squares.
    pub x: DVector<Complex64>,
    /// Fidelity of `x` against the classical solution of the original system.
    pub fidelity: f64,
    /// Result on the embedded, padded and scaled system that was simulated.
    pub hhl: HHLResult,
    pub embedded: bool,
    pub simulated_dim: usize,
    pub layout: RegisterLayout,
    pub config: HHLConfig,
    pub scaling: SpectralScaling,
    pub embedding_warning: Option<String>,
    pub final_state: StateVector,
}

/// Embeds (if not Hermitian), pads, scales and runs HHL, then maps the
/// normalized output back to a solution of `sys`.
///
/// The output of HHL is a direction only; its magnitude and phase are fixed
/// by `α = ⟨Mx̂, b⟩/‖Mx̂‖²`.
pub fn solve_system(sys: &LinearSystem, opts: &PipelineOptions) -> Result<PipelineResult> {
    let m = sys.dim();
    let embedded = !sys.is_hermitian();
    let herm = if embedded { sys.hermitian_embed() } else { sys.clone() };
    // A single amplitude still needs one qubit.
    let padded = herm.pad_to(herm.dim().next_power_of_two().max(2));
    let (scaled, scaling) = padded.scale_spectrum()?;
    let n_b = padded.dim().trailing_zeros() as usize;
    let layout = RegisterLayout::new(n_b, opts.clock_qubits)?;
    let extent = scaled.eigenvalues()?.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    let mut config = HHLConfig::for_spectrum(opts.clock_qubits, extent)?;
    if let Some(t) = opts.evolution_time {
        config.evolution_time = t;
        config.inversion_constant = 2.0 * PI / (layout.clock_dim() as f64 * t);
    }
    if let Some(c) = opts.inversion_constant {
        config.inversion_constant = c;
    }
    config.mode = opts.mode;

    let (hhl, final_state) = hhl_run(&scaled, layout, &config)?;
    let y = linsys::restrict(&hhl.solution, herm.dim());
    let (direction, embedding_warning) = if embedded {
        let ex = linsys::extract_embedded(&y);
        (ex.x, ex.warning)
    } else {
        (linsys::restrict(&y, m), None)
    };
    let mx = sys.matrix() * &direction;
    let denom = mx.norm_squared();
    let x = if denom > 0.0 {
        direction * (mx.dotc(sys.rhs()) / denom)
    } else {
        direction
    };
    let classical = sys.classical_solve()?.x;
    let fid = if x.norm() > 0.0 { fidelity(&x, &classical)? } else { 0.0 };
    Ok(PipelineResult {
        x,
        fidelity: fid,
        hhl,
        embedded,
        simulated_dim: scaled.dim(),
        layout,
        config,
        scaling,
        embedding_warning,
        final_state,
    })
}
