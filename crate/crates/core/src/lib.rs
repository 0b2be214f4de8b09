//! Remote preparation of GHZ-class states α|0…0⟩ + β|1…1⟩ from one shared
//! Bell pair.
//!
//! * [`statevector`]: dense simulator (gates, basis measurement, fidelity).
//! * [`protocol`]: target canonicalization, case classification, Alice's
//!   encoder, Bob's corrections and a single-trial driver.
//! * [`analysis`]: exact branch enumeration, seeded Monte Carlo and the
//!   comparison table.
//! * [`report`]: CSV output.

pub mod analysis;
pub mod protocol;
pub mod report;
pub mod statevector;

pub use analysis::{
    emit_comparison_table, exact_analyze, monte_carlo, monte_carlo_with_workers, AnalysisError,
    ComparisonRow, ExactAnalysis, MonteCarloStats, Source,
};
pub use protocol::{
    alice_encode, bob_act, build_target_state, canonicalize_target, canonicalize_target_with,
    classify_case, run_trial, CaseTag, ClassicalMessage, ProtocolError, TargetSpec, Tolerance,
    TrialRecord,
};
pub use statevector::{Outcome, OutcomeSelector, StateError, StateVector, Unitary2, Unitary4};
