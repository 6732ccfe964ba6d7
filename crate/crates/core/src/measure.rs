//! Projective measurements on the qubit and the classical correlation / discord
//! they induce, for arbitrary `2 ⊗ d` states.
//!
//! A von Neumann measurement of the qubit is `A_i = V Π_i V†` with
//! `V = t·I + i(y·σ) ∈ SU(2)`. Measuring outcome `i` leaves the qudit in
//! `ρ_i = tr_A[(A_i⊗I) ρ (A_i⊗I)] / p_i`. The classical correlation is the
//! supremum over `V` of `S(ρ^B) − Σ p_i S(ρ_i)` and the discord is the gap to
//! the mutual information.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::family::TwoParamState;
use crate::opcore::{
    self, partial_trace_a, tensor, trace_out_a, ComplexMatrix, DensityMatrix, Spectrum,
};
use crate::random::seeded_rng;
use crate::simplex;

/// Outcomes with probability at or below this contribute nothing.
pub const DEGENERATE_PROBABILITY: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("measurement axis is not normalized: t² + |y|² = {norm_sq}")]
    AxisNotNormalized { norm_sq: f64 },
}

/// Coefficients of `V = t·I + i(y₁σ₁ + y₂σ₂ + y₃σ₃)` with `t² + |y|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementAxis {
    t: f64,
    y: [f64; 3],
}

impl MeasurementAxis {
    pub fn new(t: f64, y1: f64, y2: f64, y3: f64) -> Result<Self, MeasureError> {
        let norm_sq = t * t + y1 * y1 + y2 * y2 + y3 * y3;
        // Written so that NaN is rejected too.
        let normalized = (norm_sq - 1.0).abs() <= 1e-12;
        if !normalized {
            return Err(MeasureError::AxisNotNormalized { norm_sq });
        }
        Ok(Self { t, y: [y1, y2, y3] })
    }

    /// Rescales any nonzero 4-vector onto the unit sphere.
    pub fn normalized(t: f64, y1: f64, y2: f64, y3: f64) -> Result<Self, MeasureError> {
        let norm = (t * t + y1 * y1 + y2 * y2 + y3 * y3).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(MeasureError::AxisNotNormalized {
                norm_sq: norm * norm,
            });
        }
        Ok(Self {
            t: t / norm,
            y: [y1 / norm, y2 / norm, y3 / norm],
        })
    }

    /// `V = I`: the computational basis.
    pub fn identity() -> Self {
        Self {
            t: 1.0,
            y: [0.0; 3],
        }
    }

    /// The axis whose outcome-0 projector is onto the Bloch vector at polar
    /// angle `theta`, azimuth `phi`.
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        let a = Complex64::new(c, 0.0);
        let b = Complex64::from_polar(s, phi);
        // V = [[a, -b*], [b, a*]]
        Self {
            t: a.re,
            y: [b.im, -b.re, a.im],
        }
    }

    /// Uniform on SU(2): a normalized 4-vector of standard normals.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let v: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
            if let Ok(axis) = Self::normalized(v[0], v[1], v[2], v[3]) {
                return axis;
            }
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> [f64; 3] {
        self.y
    }

    /// The 2×2 unitary `V`.
    pub fn su2(&self) -> ComplexMatrix {
        let [y1, y2, y3] = self.y;
        ComplexMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(self.t, y3),
                Complex64::new(y2, y1),
                Complex64::new(-y2, y1),
                Complex64::new(self.t, -y3),
            ],
        )
    }

    /// `V|0⟩`, the state selected by outcome 0.
    fn outcome_zero(&self) -> [Complex64; 2] {
        let [y1, y2, y3] = self.y;
        [Complex64::new(self.t, y3), Complex64::new(-y2, y1)]
    }

    /// Bloch vector of `V|0⟩`.
    pub fn bloch_vector(&self) -> [f64; 3] {
        let [a, b] = self.outcome_zero();
        let coherence = a.conj() * b;
        [
            2.0 * coherence.re,
            2.0 * coherence.im,
            a.norm_sqr() - b.norm_sqr(),
        ]
    }
}

/// `A_i = V Π_i V†` for `i = 0, 1`.
pub fn projectors(axis: &MeasurementAxis) -> [ComplexMatrix; 2] {
    let v = axis.su2();
    std::array::from_fn(|i| {
        let col = v.column(i);
        col * col.adjoint()
    })
}

/// One measurement outcome on the qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub probability: f64,
    /// Post-measurement qudit state; `None` when the outcome is degenerate.
    pub state: Option<ComplexMatrix>,
}

impl Branch {
    pub fn is_degenerate(&self) -> bool {
        self.state.is_none()
    }

    /// `p·S(ρ_i)`, zero for degenerate outcomes.
    pub fn weighted_entropy(&self) -> f64 {
        match &self.state {
            Some(m) => self.probability * entropy_of(m),
            None => 0.0,
        }
    }
}

/// `{(p_i, ρ_i)}` left on the qudit after measuring the qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalEnsemble {
    pub branches: [Branch; 2],
}

impl ConditionalEnsemble {
    pub fn has_degenerate_outcome(&self) -> bool {
        self.branches.iter().any(Branch::is_degenerate)
    }
}

fn entropy_of(m: &ComplexMatrix) -> f64 {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    Spectrum::new(h.symmetric_eigenvalues().iter().copied().collect()).entropy_bits()
}

pub fn conditional_ensemble(rho: &DensityMatrix, axis: &MeasurementAxis) -> ConditionalEnsemble {
    let d = rho.dim_b();
    let id_b = ComplexMatrix::identity(d, d);
    let branches = projectors(axis).map(|a| {
        let lifted = tensor(&a, &id_b);
        let collapsed = &lifted * rho.matrix() * &lifted;
        let probability = collapsed.trace().re;
        let state = (probability > DEGENERATE_PROBABILITY)
            .then(|| trace_out_a(&collapsed, 2, d) / Complex64::new(probability, 0.0));
        Branch { probability, state }
    });
    ConditionalEnsemble { branches }
}

/// `Σ p_i S(ρ_i)` in bits.
pub fn conditional_entropy(rho: &DensityMatrix, axis: &MeasurementAxis) -> f64 {
    conditional_ensemble(rho, axis)
        .branches
        .iter()
        .map(Branch::weighted_entropy)
        .sum()
}

/// `S(ρ^B) − Σ p_i S(ρ_i)` in bits.
pub fn measured_mutual_information(rho: &DensityMatrix, axis: &MeasurementAxis) -> f64 {
    entropy_of(&partial_trace_a(rho)) - conditional_entropy(rho, axis)
}

/// Grid-plus-simplex search over measurement directions.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Grid points in the polar angle, poles included.
    pub polar_steps: usize,
    /// Grid points in the azimuth over `[0, 2π)`.
    pub azimuthal_steps: usize,
    pub simplex_tol: f64,
    pub max_iterations: usize,
    /// Extra simplex runs started from seeded random directions.
    pub random_restarts: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            polar_steps: 64,
            azimuthal_steps: 128,
            simplex_tol: 1e-10,
            max_iterations: 500,
            random_restarts: 0,
            seed: 0,
        }
    }
}

/// Best measurement found and the measured mutual information it attains.
///
/// For states outside the two-parameter family this is a lower bound on the
/// true classical correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalCorrelation {
    pub value: f64,
    pub axis: MeasurementAxis,
    pub theta: f64,
    pub phi: f64,
}

/// Measured mutual information as a function of the Bloch direction only,
/// using the qubit-block decomposition `ρ = Σ_{ab} |a⟩⟨b| ⊗ ρ_{ab}`.
struct DirectionObjective {
    blocks: [[ComplexMatrix; 2]; 2],
    rho_b: ComplexMatrix,
    entropy_b: f64,
}

impl DirectionObjective {
    fn new(rho: &DensityMatrix) -> Self {
        let d = rho.dim_b();
        let m = rho.matrix();
        let blocks = std::array::from_fn(|a| {
            std::array::from_fn(|b| m.view((a * d, b * d), (d, d)).into_owned())
        });
        let rho_b = partial_trace_a(rho);
        let entropy_b = entropy_of(&rho_b);
        Self {
            blocks,
            rho_b,
            entropy_b,
        }
    }

    fn eval(&self, theta: f64, phi: f64) -> f64 {
        let (s, c) = (theta / 2.0).sin_cos();
        let n = [Complex64::new(c, 0.0), Complex64::from_polar(s, phi)];
        // ⟨n|ρ|n⟩ restricted to the qudit; the orthogonal outcome is the rest of ρ^B.
        let mut zero = ComplexMatrix::zeros(self.rho_b.nrows(), self.rho_b.ncols());
        for a in 0..2 {
            for b in 0..2 {
                zero += &self.blocks[a][b] * (n[a].conj() * n[b]);
            }
        }
        let one = &self.rho_b - &zero;
        self.entropy_b - unnormalized_entropy(&zero) - unnormalized_entropy(&one)
    }
}

/// `p·S(M/p)` for an unnormalized positive operator `M` with trace `p`.
fn unnormalized_entropy(m: &ComplexMatrix) -> f64 {
    let p = m.trace().re;
    if p <= DEGENERATE_PROBABILITY {
        return 0.0;
    }
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let spectrum: Vec<f64> = h.symmetric_eigenvalues().iter().map(|l| l / p).collect();
    p * opcore::shannon_bits(&spectrum)
}

/// Maximizes the measured mutual information over qubit measurements.
pub fn classical_correlation_numeric(
    rho: &DensityMatrix,
    config: &OptimizerConfig,
) -> ClassicalCorrelation {
    let objective = DirectionObjective::new(rho);
    let polar = config.polar_steps.max(2);
    let azimuthal = config.azimuthal_steps.max(1);
    let dtheta = PI / (polar - 1) as f64;
    let dphi = 2.0 * PI / azimuthal as f64;

    let values: Vec<f64> = (0..polar * azimuthal)
        .into_par_iter()
        .map(|k| {
            objective.eval(
                (k / azimuthal) as f64 * dtheta,
                (k % azimuthal) as f64 * dphi,
            )
        })
        .collect();
    // First maximum in grid order, so ties resolve deterministically.
    let (best_k, mut best_value) =
        values
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc },
            );
    let mut best = [
        (best_k / azimuthal) as f64 * dtheta,
        (best_k % azimuthal) as f64 * dphi,
    ];

    let mut starts = vec![best];
    let mut rng = seeded_rng(config.seed);
    for _ in 0..config.random_restarts {
        let [x, y, z] = MeasurementAxis::random(&mut rng).bloch_vector();
        starts.push([z.clamp(-1.0, 1.0).acos(), y.atan2(x)]);
    }
    for start in starts {
        let refined = simplex::minimize(
            |p| -objective.eval(p[0], p[1]),
            &start,
            dtheta.min(dphi),
            config.simplex_tol,
            config.max_iterations,
        );
        if -refined.value > best_value {
            best_value = -refined.value;
            best = [refined.point[0], refined.point[1]];
        }
    }

    ClassicalCorrelation {
        value: best_value,
        axis: MeasurementAxis::from_bloch(best[0], best[1]),
        theta: best[0],
        phi: best[1],
    }
}

/// Numeric mutual information, classical correlation and discord of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscordEstimate {
    pub mutual_info: f64,
    pub classical: ClassicalCorrelation,
    pub discord: f64,
}

pub fn discord_numeric(rho: &DensityMatrix, config: &OptimizerConfig) -> DiscordEstimate {
    let mutual_info = opcore::mutual_information(rho);
    let classical = classical_correlation_numeric(rho, config);
    DiscordEstimate {
        mutual_info,
        classical,
        discord: mutual_info - classical.value,
    }
}

/// `{2α × (d−2), 2β, β+γ}`: spectrum of either conditional qudit state of a
/// family member, whatever the measurement.
pub fn reference_conditional_spectrum(s: &TwoParamState) -> Spectrum {
    let mut values = vec![2.0 * s.alpha(); s.d() - 2];
    values.push(2.0 * s.beta());
    values.push(s.beta() + s.gamma());
    Spectrum::new(values)
}

/// Largest L∞ gap between a conditional spectrum and the reference, over
/// `samples` seeded random measurements and both outcomes.
pub fn ensemble_spectrum_spread(s: &TwoParamState, samples: usize, seed: u64) -> f64 {
    let rho = crate::family::build_state(s);
    let reference = reference_conditional_spectrum(s);
    let mut rng = seeded_rng(seed);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let axis = MeasurementAxis::random(&mut rng);
        for branch in conditional_ensemble(&rho, &axis).branches {
            let state = branch.state.expect("family outcomes have probability 1/2");
            let spectrum =
                opcore::hermitian_spectrum(&state).expect("conditional state is Hermitian");
            worst = worst.max(spectrum.linf_distance(&reference));
        }
    }
    worst
}
