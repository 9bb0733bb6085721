//! Truncated multimode bosonic Fock space.
//!
//! A [`FockSpace`] is a sorted set of [`ModeLabel`]s together with a cap
//! `n_max` on the *total* photon number. States are sparse maps from
//! [`BasisState`] to complex amplitude; operators are sparse matrices over the
//! same basis. Nothing is ever enumerated unless a dense view is requested, so
//! spaces with thousands of frequency-bin modes stay cheap.

mod observable;
mod schmidt;
mod space;
mod state;

pub use observable::{expectation, susskind_glogower, variance_and_uncertainty, Observable, SusskindGlogower};
pub use schmidt::{schmidt_decomposition, Schmidt};
pub use space::{BasisState, FockSpace, ModeKind, ModeLabel};
pub use state::{annihilate, create, number_expectation, truncated_phase_state, StateVector};

/// Amplitudes with modulus below this are dropped after every operation.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Normalization tolerance for prepared and renormalized states.
pub const NORM_TOLERANCE: f64 = 1e-12;
