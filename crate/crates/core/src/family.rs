//! The two-parameter family
//!
//! ```text
//! ρ_{α,γ} = α Σ_{i∈{0,1}, j≥2} |i j⟩⟨i j| + β (|φ⁺⟩⟨φ⁺| + |φ⁻⟩⟨φ⁻| + |ψ⁺⟩⟨ψ⁺|) + γ |ψ⁻⟩⟨ψ⁻|
//! ```
//!
//! on `2 ⊗ d` (d ≥ 3), with `β = (1 − 2(d−2)α − γ)/3` fixed by the trace, and
//! closed forms for its entropies, correlations and negativity. At `α = 0`
//! the family reduces to a two-qubit Werner state embedded in the qudit.

use num_complex::Complex64;
use thiserror::Error;

use crate::opcore::{basis_ket, Bell, ComplexMatrix, DensityMatrix, Spectrum};

/// Slack allowed on the parameter bounds, so grid endpoints like α = 1/2 survive rounding.
pub const RANGE_SLACK: f64 = 1e-12;
/// Default Frobenius tolerance for [`classify_family`].
pub const CLASSIFY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error("parameter {parameter} = {value} out of range: requires {bound}")]
    ParameterOutOfRange {
        parameter: &'static str,
        value: f64,
        bound: String,
    },
    #[error("state is not in the two-parameter family: residual {residual:e}")]
    NotInFamily { residual: f64 },
}

/// Parameters `(d, α, γ)` of a family member. `β` is always derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoParamState {
    d: usize,
    alpha: f64,
    gamma: f64,
}

impl TwoParamState {
    pub fn new(d: usize, alpha: f64, gamma: f64) -> Result<Self, FamilyError> {
        if d < 3 {
            return Err(FamilyError::ParameterOutOfRange {
                parameter: "d",
                value: d as f64,
                bound: "d >= 3".into(),
            });
        }
        let alpha_max = 1.0 / (2.0 * (d - 2) as f64);
        if !(alpha.is_finite() && (-RANGE_SLACK..=alpha_max + RANGE_SLACK).contains(&alpha)) {
            return Err(FamilyError::ParameterOutOfRange {
                parameter: "alpha",
                value: alpha,
                bound: format!("0 <= alpha <= 1/(2(d-2)) = {alpha_max}"),
            });
        }
        if !(gamma.is_finite() && (-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&gamma)) {
            return Err(FamilyError::ParameterOutOfRange {
                parameter: "gamma",
                value: gamma,
                bound: "0 <= gamma <= 1".into(),
            });
        }
        let s = Self { d, alpha, gamma };
        if s.beta() < -RANGE_SLACK {
            return Err(FamilyError::ParameterOutOfRange {
                parameter: "beta",
                value: s.beta(),
                bound: "beta = (1 - 2(d-2)alpha - gamma)/3 >= 0".into(),
            });
        }
        Ok(s)
    }

    /// Member with the given `α` and `β`; `γ = 1 − 3β − 2(d−2)α`.
    pub fn from_alpha_beta(d: usize, alpha: f64, beta: f64) -> Result<Self, FamilyError> {
        let gamma = 1.0 - 3.0 * beta - 2.0 * d.saturating_sub(2) as f64 * alpha;
        Self::new(d, alpha, gamma)
    }

    /// Member with the given `β` and `γ`; `α = (1 − 3β − γ)/(2(d−2))`.
    pub fn from_beta_gamma(d: usize, beta: f64, gamma: f64) -> Result<Self, FamilyError> {
        let alpha = (1.0 - 3.0 * beta - gamma) / (2.0 * d.saturating_sub(2).max(1) as f64);
        Self::new(d, alpha, gamma)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn beta(&self) -> f64 {
        (1.0 - 2.0 * self.qudit_levels() * self.alpha - self.gamma) / 3.0
    }

    // d − 2, the number of qudit levels outside span{|0⟩,|1⟩}.
    fn qudit_levels(&self) -> f64 {
        (self.d - 2) as f64
    }
}

/// `w·log₂(x)` with non-positive weights contributing 0.
fn wlog2(w: f64, x: f64) -> f64 {
    if w > 0.0 {
        w * x.log2()
    } else {
        0.0
    }
}

pub fn build_state(s: &TwoParamState) -> DensityMatrix {
    let d = s.d;
    let n = 2 * d;
    let c = |x: f64| Complex64::new(x, 0.0);
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..2 {
        for j in 2..d {
            let k = basis_ket(d, i, j);
            m += (&k * k.adjoint()) * c(s.alpha);
        }
    }
    for bell in [Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus] {
        m += bell.projector(d) * c(s.beta());
    }
    m += Bell::PsiMinus.projector(d) * c(s.gamma);
    DensityMatrix::new_unchecked(m, 2, d)
}

/// `{α × 2(d−2), β × 3, γ}`.
pub fn family_spectrum(s: &TwoParamState) -> Spectrum {
    let mut values = vec![s.alpha; 2 * (s.d - 2)];
    values.extend([s.beta(); 3]);
    values.push(s.gamma);
    Spectrum::new(values)
}

/// Spectrum of `ρ^B`: `{(3β+γ)/2 × 2, 2α × (d−2)}`.
pub fn marginal_b_spectrum(s: &TwoParamState) -> Spectrum {
    let half = (3.0 * s.beta() + s.gamma) / 2.0;
    let mut values = vec![half, half];
    values.extend(std::iter::repeat_n(2.0 * s.alpha, s.d - 2));
    Spectrum::new(values)
}

/// `S(ρ^B)` in bits.
pub fn entropy_b(s: &TwoParamState) -> f64 {
    let w = 3.0 * s.beta() + s.gamma;
    -2.0 * s.qudit_levels() * wlog2(s.alpha, 2.0 * s.alpha) - wlog2(w, w / 2.0)
}

/// Conditional entropy after any von Neumann measurement of the qubit, in bits.
pub fn conditional_entropy_closed(s: &TwoParamState) -> f64 {
    let (b, g) = (s.beta(), s.gamma);
    -2.0 * s.qudit_levels() * wlog2(s.alpha, 2.0 * s.alpha)
        - 2.0 * wlog2(b, 2.0 * b)
        - wlog2(b + g, b + g)
}

pub fn classical_correlation(s: &TwoParamState) -> f64 {
    let (b, g) = (s.beta(), s.gamma);
    let w = 3.0 * b + g;
    -wlog2(w, w / 2.0) + 2.0 * wlog2(b, 2.0 * b) + wlog2(b + g, b + g)
}

pub fn mutual_information(s: &TwoParamState) -> f64 {
    let (b, g) = (s.beta(), s.gamma);
    let w = 3.0 * b + g;
    wlog2(w, 4.0 / w) + 3.0 * wlog2(b, b) + wlog2(g, g)
}

pub fn discord(s: &TwoParamState) -> f64 {
    let (b, g) = (s.beta(), s.gamma);
    wlog2(b, 2.0 * b) + wlog2(g, 2.0 * g) - wlog2(b + g, b + g)
}

/// `max{0, 2(d−2)α + 2γ − 1}`.
///
/// The PPT members of the family are separable, so this vanishes exactly on
/// the separable ones.
pub fn negativity(s: &TwoParamState) -> f64 {
    (2.0 * s.qudit_levels() * s.alpha + 2.0 * s.gamma - 1.0).max(0.0)
}

/// Mutual information, classical correlation, discord (bits) and negativity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationReport {
    pub mutual_info: f64,
    pub classical: f64,
    pub discord: f64,
    pub negativity: f64,
}

pub fn correlation_report(s: &TwoParamState) -> CorrelationReport {
    CorrelationReport {
        mutual_info: mutual_information(s),
        classical: classical_correlation(s),
        discord: discord(s),
        negativity: negativity(s),
    }
}

/// Recovers `(α, γ)` from a `2 ⊗ d` state if it lies on the family surface.
///
/// `α` is the mean weight on `|i j⟩` (j ≥ 2) and `γ = ⟨ψ⁻|ρ|ψ⁻⟩`; the state is
/// accepted iff `‖ρ − ρ_{α,γ}‖_F ≤ tol`.
pub fn classify_family(rho: &DensityMatrix, tol: f64) -> Result<TwoParamState, FamilyError> {
    let (s, residual) = nearest_member(rho)?;
    if residual <= tol {
        Ok(s)
    } else {
        Err(FamilyError::NotInFamily { residual })
    }
}

/// Candidate parameters and the Frobenius residual to the corresponding member.
pub fn nearest_member(rho: &DensityMatrix) -> Result<(TwoParamState, f64), FamilyError> {
    let d = rho.dim_b();
    let m = rho.matrix();
    let outer_weight: f64 = (0..2)
        .flat_map(|i| (2..d).map(move |j| i * d + j))
        .map(|k| m[(k, k)].re)
        .sum();
    let alpha = outer_weight / (2 * d.saturating_sub(2)).max(1) as f64;
    let gamma = rho.expectation(&Bell::PsiMinus.vector(d));
    let s = TwoParamState::new(d, alpha, gamma)?;
    let residual = (m - build_state(&s).matrix()).norm();
    Ok((s, residual))
}
