//! Relative-entropy coherence, Holevo quantity, accessible information and
//! quantum discord on small finite-dimensional states, together with seeded
//! suites that check the identities and inequalities tying them together:
//!
//! * information loss under strictly incoherent measurements equals the
//!   coherence lost by mixing (IL = CL);
//! * the dephased mutual information bounds every strictly incoherent
//!   instrument;
//! * local coherence of a separable state is at most the average coherence
//!   of its B parts;
//! * discord plus accessible information never exceeds χ.
//!
//! All entropies are in bits.

pub mod coherence;
pub mod discord;
pub mod error;
pub mod infotheory;
pub mod io;
pub mod linalg;
pub mod operations;
pub mod optimize;
pub mod random;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, Subsystem, C64};
pub use operations::{Measurement, ProjectiveBasis};
pub use optimize::OptimizerOptions;
pub use states::{BipartiteState, DensityMatrix, Ensemble, SeparableSpec};
