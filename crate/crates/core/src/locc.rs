//! Twirling an arbitrary `2 ⊗ d` state onto the two-parameter family using
//! convex mixtures of bilateral unitaries `U ⊗ U`.
//!
//! A qubit unitary is identified with the qudit unitary that acts the same
//! way on `span{|0⟩,|1⟩}` and trivially on the other levels, so every stage
//! is implementable with local operations and shared randomness. Mixtures
//! are applied exactly, as channels, rather than sampled.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;
use thiserror::Error;

use crate::family::{build_state, nearest_member, TwoParamState};
use crate::opcore::{tensor, Bell, ComplexMatrix, DensityMatrix};
use crate::random::{random_g2d, seeded_rng};

/// Residual at which the twirl output counts as a family member.
pub const TWIRL_TOL: f64 = 1e-10;
/// Maximum number of passes through the stage list.
pub const MAX_PASSES: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoccError {
    #[error("level k = {k} out of range: requires 2 <= k <= {max}")]
    LevelOutOfRange { k: usize, max: usize },
    #[error("twirling requires a 2 x d system with d >= 3, got d = {d}")]
    UnsupportedDimension { d: usize },
    #[error("twirl did not reach the family after {passes} passes: residual {residual:e}")]
    DidNotConverge { passes: usize, residual: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnitaryKind {
    /// `|j⟩ ↦ e^{iθj}|j⟩`.
    Phase(f64),
    /// `|j⟩ ↦ (−1)^{δ_{jk}}|j⟩`.
    LevelSign(usize),
    /// `|0⟩ ↔ |1⟩`.
    Swap01,
    /// `|j⟩ ↦ |j+1⟩` cyclically on levels `2..d`, applied `power` times.
    Cycle(usize),
    /// Hadamard on `span{|0⟩,|1⟩}`.
    Hadamard,
}

/// A bilateral unitary `U_A ⊗ U_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalUnitary {
    pub kind: UnitaryKind,
    pub matrix_a: ComplexMatrix,
    pub matrix_b: ComplexMatrix,
}

impl LocalUnitary {
    pub fn full(&self) -> ComplexMatrix {
        tensor(&self.matrix_a, &self.matrix_b)
    }

    /// `(U_A⊗U_B) ρ (U_A⊗U_B)†`.
    pub fn conjugate(&self, rho: &DensityMatrix) -> DensityMatrix {
        let u = self.full();
        let m = &u * rho.matrix() * u.adjoint();
        DensityMatrix::new_unchecked(m, rho.dim_a(), rho.dim_b())
    }
}

fn phases(n: usize, theta: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex64::from_polar(1.0, theta * r as f64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

pub fn u_theta(theta: f64, d: usize) -> LocalUnitary {
    LocalUnitary {
        kind: UnitaryKind::Phase(theta),
        matrix_a: phases(2, theta),
        matrix_b: phases(d, theta),
    }
}

/// Sign flip of qudit level `k`; it acts trivially on the qubit.
pub fn u_level(k: usize, d: usize) -> Result<LocalUnitary, LoccError> {
    if k < 2 || k >= d {
        return Err(LoccError::LevelOutOfRange {
            k,
            max: d.saturating_sub(1),
        });
    }
    let mut matrix_b = ComplexMatrix::identity(d, d);
    matrix_b[(k, k)] = Complex64::new(-1.0, 0.0);
    Ok(LocalUnitary {
        kind: UnitaryKind::LevelSign(k),
        matrix_a: ComplexMatrix::identity(2, 2),
        matrix_b,
    })
}

fn swap_matrix(n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(n, n);
    m.swap_rows(0, 1);
    m
}

pub fn swap01(d: usize) -> LocalUnitary {
    LocalUnitary {
        kind: UnitaryKind::Swap01,
        matrix_a: swap_matrix(2),
        matrix_b: swap_matrix(d),
    }
}

/// `T^power` with `T: |2⟩ ↦ |3⟩ ↦ … ↦ |d−1⟩ ↦ |2⟩`, fixing `|0⟩, |1⟩`.
pub fn cycle_t(d: usize, power: usize) -> LocalUnitary {
    let len = d.saturating_sub(2).max(1);
    let mut matrix_b = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        let image = if j < 2 { j } else { 2 + (j - 2 + power) % len };
        matrix_b[(image, j)] = Complex64::new(1.0, 0.0);
    }
    LocalUnitary {
        kind: UnitaryKind::Cycle(power),
        matrix_a: ComplexMatrix::identity(2, 2),
        matrix_b,
    }
}

fn hadamard_matrix(n: usize) -> ComplexMatrix {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let mut m = ComplexMatrix::identity(n, n);
    m[(0, 0)] = h;
    m[(0, 1)] = h;
    m[(1, 0)] = h;
    m[(1, 1)] = -h;
    m
}

pub fn hadamard(d: usize) -> LocalUnitary {
    LocalUnitary {
        kind: UnitaryKind::Hadamard,
        matrix_a: hadamard_matrix(2),
        matrix_b: hadamard_matrix(d),
    }
}

/// `w·UρU† + (1−w)·ρ`.
fn mix(rho: &DensityMatrix, u: &LocalUnitary, weight: f64) -> DensityMatrix {
    let rotated = u.conjugate(rho);
    let m = rotated.matrix() * Complex64::new(weight, 0.0)
        + rho.matrix() * Complex64::new(1.0 - weight, 0.0);
    DensityMatrix::new_unchecked(m, rho.dim_a(), rho.dim_b())
}

/// `½(U_θ⊗U_θ)ρ(U_θ⊗U_θ)† + ½ρ`.
pub fn phase_mix(rho: &DensityMatrix, theta: f64) -> DensityMatrix {
    mix(rho, &u_theta(theta, rho.dim_b()), 0.5)
}

/// `½(I⊗U_k)ρ(I⊗U_k)† + ½ρ`: removes coherences between level `k` and the rest.
pub fn level_sign_mix(rho: &DensityMatrix, k: usize) -> Result<DensityMatrix, LoccError> {
    Ok(mix(rho, &u_level(k, rho.dim_b())?, 0.5))
}

pub fn swap_mix(rho: &DensityMatrix) -> DensityMatrix {
    mix(rho, &swap01(rho.dim_b()), 0.5)
}

/// Uniform average over `I ⊗ T^j`, `j = 0..d−2`.
pub fn t_twirl(rho: &DensityMatrix) -> DensityMatrix {
    let d = rho.dim_b();
    let terms = d.saturating_sub(2).max(1);
    let mut acc = ComplexMatrix::zeros(2 * d, 2 * d);
    for j in 0..terms {
        acc += cycle_t(d, j).conjugate(rho).matrix();
    }
    DensityMatrix::new_unchecked(acc / Complex64::new(terms as f64, 0.0), 2, d)
}

/// `⅔(H⊗H)ρ(H⊗H) + ⅓ρ`.
pub fn hadamard_mix(rho: &DensityMatrix) -> DensityMatrix {
    mix(rho, &hadamard(rho.dim_b()), 2.0 / 3.0)
}

/// Diagonal weights `a_j`, `b`, `c₊`, `c₋` of the state reached after the
/// phase, sign and swap stages of the first pass.
#[derive(Debug, Clone, PartialEq)]
pub struct StageWeights {
    /// `a_j` for `j = 2..d`, read from `⟨0 j|ρ|0 j⟩`.
    pub a: Vec<f64>,
    /// Common weight of `φ⁺` and `φ⁻`.
    pub b: f64,
    pub c_plus: f64,
    pub c_minus: f64,
}

impl StageWeights {
    fn read(rho: &DensityMatrix) -> Self {
        let d = rho.dim_b();
        let m = rho.matrix();
        Self {
            a: (2..d).map(|j| m[(j, j)].re).collect(),
            b: rho.expectation(&Bell::PhiPlus.vector(d)),
            c_plus: rho.expectation(&Bell::PsiPlus.vector(d)),
            c_minus: rho.expectation(&Bell::PsiMinus.vector(d)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageSnapshot {
    pub pass: usize,
    pub label: String,
    pub state: DensityMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwirlOptions {
    pub tolerance: f64,
    pub max_passes: usize,
    /// Record the state after every stage.
    pub snapshots: bool,
}

impl Default for TwirlOptions {
    fn default() -> Self {
        Self {
            tolerance: TWIRL_TOL,
            max_passes: MAX_PASSES,
            snapshots: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwirlReport {
    pub output: DensityMatrix,
    /// Total weight on `|i j⟩` (j ≥ 2) divided by `2d − 4`.
    pub alpha: f64,
    /// `⟨ψ⁻|ρ|ψ⁻⟩`, unchanged by every stage.
    pub gamma: f64,
    pub weights: StageWeights,
    /// Frobenius distance from `ρ_{α,γ}`.
    pub residual: f64,
    pub passes: usize,
    pub stages: Vec<StageSnapshot>,
}

impl TwirlReport {
    pub fn parameters(&self) -> Option<TwoParamState> {
        TwoParamState::new(self.output.dim_b(), self.alpha, self.gamma).ok()
    }
}

struct Pass<'a> {
    index: usize,
    snapshots: Option<&'a mut Vec<StageSnapshot>>,
}

impl Pass<'_> {
    fn record(&mut self, label: impl Into<String>, rho: &DensityMatrix) {
        if let Some(s) = self.snapshots.as_deref_mut() {
            s.push(StageSnapshot {
                pass: self.index,
                label: label.into(),
                state: rho.clone(),
            });
        }
    }
}

/// One pass through the stage list; returns the output and the weights seen
/// right after the swap stage.
fn run_pass(rho: &DensityMatrix, pass: &mut Pass<'_>) -> (DensityMatrix, StageWeights) {
    let d = rho.dim_b();
    let mut rho = phase_mix(rho, PI);
    pass.record("phase(pi)", &rho);
    for k in 2..d {
        rho = level_sign_mix(&rho, k).expect("k in 2..d");
        pass.record(format!("level_sign({k})"), &rho);
    }
    rho = phase_mix(&rho, FRAC_PI_2);
    pass.record("phase(pi/2)", &rho);
    rho = swap_mix(&rho);
    pass.record("swap01", &rho);
    let weights = StageWeights::read(&rho);
    rho = t_twirl(&rho);
    pass.record("t_twirl", &rho);
    rho = hadamard_mix(&rho);
    pass.record("hadamard", &rho);
    (rho, weights)
}

pub fn twirl(rho: &DensityMatrix) -> Result<TwirlReport, LoccError> {
    twirl_with(rho, &TwirlOptions::default())
}

/// Runs the stage list twice, then keeps repeating it (up to
/// `max_passes`) until the state is within `tolerance` of the family.
pub fn twirl_with(rho: &DensityMatrix, options: &TwirlOptions) -> Result<TwirlReport, LoccError> {
    let d = rho.dim_b();
    if d < 3 {
        return Err(LoccError::UnsupportedDimension { d });
    }
    let mut stages = Vec::new();
    let mut state = rho.clone();
    let mut first_weights = None;
    let mut passes = 0;
    let mut nearest;
    loop {
        let mut pass = Pass {
            index: passes,
            snapshots: options.snapshots.then_some(&mut stages),
        };
        let (next, weights) = run_pass(&state, &mut pass);
        state = next;
        first_weights.get_or_insert(weights);
        passes += 1;
        if passes < 2 {
            continue;
        }
        // Every stage preserves trace and positivity, so the candidate
        // parameters are always in range.
        nearest = nearest_member(&state).expect("twirled state has in-range parameters");
        if nearest.1 <= options.tolerance || passes >= options.max_passes.max(2) {
            break;
        }
    }
    let (params, residual) = nearest;
    if residual > options.tolerance {
        return Err(LoccError::DidNotConverge { passes, residual });
    }
    Ok(TwirlReport {
        output: state,
        alpha: params.alpha(),
        gamma: params.gamma(),
        weights: first_weights.expect("at least one pass"),
        residual,
        passes,
        stages,
    })
}

/// Largest `‖ρ − (U⊗U)ρ(U⊗U)†‖_F` over `trials` random `U ∈ G(2, d)`.
pub fn invariance_defect(rho: &DensityMatrix, trials: usize, seed: u64) -> f64 {
    let d = rho.dim_b();
    let mut rng = seeded_rng(seed);
    (0..trials)
        .map(|_| {
            let (u_a, u_b) = random_g2d(&mut rng, d);
            let u = tensor(&u_a, &u_b);
            (rho.matrix() - &u * rho.matrix() * u.adjoint()).norm()
        })
        .fold(0.0, f64::max)
}

pub fn check_family_invariance(s: &TwoParamState, trials: usize, seed: u64) -> f64 {
    invariance_defect(&build_state(s), trials, seed)
}
