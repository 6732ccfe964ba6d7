//! Classical correlation, quantum discord, mutual information and negativity
//! for the two-parameter family of qubit-qudit states `ρ_{α,γ}`.
//!
//! Every quantity is available twice: as a closed form over the family
//! parameters ([`family`]) and as a first-principles computation on an
//! arbitrary `2 ⊗ d` density matrix ([`opcore`], [`measure`]). The [`locc`]
//! module implements the twirling channel that projects any `2 ⊗ d` state onto
//! the family using mixtures of local unitaries.
//!
//! All entropies are in bits.

pub mod cli;
pub mod family;
pub mod locc;
pub mod measure;
pub mod opcore;
pub mod random;
mod simplex;

pub use family::{CorrelationReport, FamilyError, TwoParamState};
pub use locc::{LoccError, TwirlReport};
pub use measure::{ConditionalEnsemble, MeasurementAxis, OptimizerConfig};
pub use opcore::{ComplexMatrix, DensityMatrix, OpError, Spectrum};
