//! Contextuality with respect to CSS-preserving measurements: witnesses,
//! the Wigner-function classifier, hidden-variable value assignments and
//! witness pullback through circuits.

mod classify;
mod hvm;
mod sweep;
mod witness;

pub use classify::{
    classify, classify_operator, classify_stabilizer_diagonal, classify_table, coset_sum, min_coset,
    Certificate, Classification, Verdict, CONTEXTUAL_TOL,
};
pub use hvm::{
    born_joint_distribution, hvm_consistency_audit, hvm_predict, mermin_square, ConsistencyReport,
    JointDistribution, MerminLine, MerminReport, ValueAssignment,
};
pub use sweep::{sweep, Sweep, SweepCheck, SweepFamily, SweepPoint, MAX_SWEEP_RESOLUTION};
pub use witness::{
    conjugate_basis, witness_pullback, witness_pullback_word, witness_value, witness_value_wigner, Pullback,
    PullbackStep, WitnessSpec,
};

#[cfg(test)]
mod tests;
