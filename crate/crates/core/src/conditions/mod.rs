//! Certified checks of (A0), (Inc)₁, (W4), (A1-Ψ), (M-Ψ), the equivalence
//! with the convex minorant, the (A1) ⇒ (M) constant chain and Jensen-type
//! inequalities.

pub mod ball;
pub mod basic;
pub mod certificate;
pub mod chain;
pub mod config;
pub mod jensen;
pub mod local;
pub mod reproduce;

pub use ball::{
    check_a1, check_a1_with, check_azero_reduction, check_azero_reduction_with, check_m, check_m_with,
    plus_to_range, propagate_range_failure, range_to_plus,
};
pub use basic::{
    a0_constant, a0_witness, certify_equivalence_conv, check_a0, check_almost_convex, check_inc1, doubling_exponent,
    w4_grid, w4_witness_at,
};
pub use certificate::{search_beta, BetaSearch, ConditionCertificate, ConditionTag, Verdict, Witness};
pub use chain::{a1_implies_m_chain, a1_implies_m_chain_with, PROOF_BETA_AC};
pub use config::{default_beta_grid, ConditionConfig, LocalEnvelopeSpec};
pub use jensen::{jensen_almost_convex, jensen_check, DiscreteMeasure};
pub use local::{BallAnalysis, LocalAnalysis, LocalProbe};
pub use reproduce::{reproduce, reproduce_pointwise};
