//! Exact simulation of the quantum objects used by the protocols.
//!
//! Measurements are never simulated by applying operators and collapsing; the
//! outcome distribution is computed in closed form and then sampled.

pub mod bb84;
pub mod code;
pub mod coherent;
pub mod state;

pub use bb84::{bb84_use_measure, Basis, Bb84Symbol, UseOutcome};
pub use code::{
    fingerprint_overlap, fingerprint_state, quantum_hash_certify, HashCertificate, LinearCode,
};
pub use coherent::{
    coherent_overlap, fingerprint_to_coherent, min_error_guess, p_min, p_usd,
    state_elimination_measure, usd_measure, CoherentTrain, EliminationOutcome, Sign, UsdOutcome,
};
pub use state::{swap_test, swap_test_probability, PureState, NORM_TOLERANCE};
