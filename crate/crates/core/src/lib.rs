//! Worst-case error certificates for coherent (unitary) gate errors from
//! average fidelity `F` and fidelity deviation `D`.
//!
//! The crate computes the Haar moments `(F, D)` of a unitary error, the exact
//! diamond distance from its spectrum, and several upper bounds on it that
//! only need moment data. It also simulates the randomized sampling protocol
//! that estimates `(F, D)` on hardware and evaluates the estimators.

pub mod certify;
pub mod error;
pub mod estimate;
pub mod gates;
pub mod geometry;
pub mod linalg;
pub mod moments;
pub mod sweep;
pub mod verify;

pub use certify::{
    bound_fd, bound_fidelity_only, bound_hybrid, bound_ru, certified_overlap, certify_moments,
    certify_unitary, diamond_exact, min_overlap_exact, tightness_witness, BoundSource, CertFlags,
    CertificateBundle,
};
pub use error::{Error, Result};
pub use estimate::{
    certify_from_estimates, estimate_moments, run_protocol, sample_haar_state, simulate_protocol,
    EstimationResult, ShotRecord,
};
pub use linalg::{ComplexSquareMatrix, UnitaryOperator};
pub use moments::{fd_from_unitary, pq_from_fd, MomentSummary};
