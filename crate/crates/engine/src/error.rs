//! Errors shared across the engine's operations.

use thiserror::Error;

use crate::model::Violation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An operation requiring a valid model was handed an invalid one.
    #[error("invalid model:\n{}", format_report(.0))]
    InvalidModel(Vec<Violation>),

    #[error("unknown measurement {0}")]
    UnknownMeasurement(String),

    #[error("unknown circumstance {0}")]
    UnknownCircumstance(String),

    #[error("measurement {measurement} has no outcome {outcome}")]
    UnknownOutcome {
        measurement: String,
        outcome: String,
    },

    #[error("circumstance {circumstance} has no table for measurement {measurement}")]
    MissingTable {
        circumstance: String,
        measurement: String,
    },

    /// Conditioning on an empty disjunction of circumstances.
    #[error("cannot condition on an empty set of circumstances")]
    EmptySubset,

    /// The disjunction's total weight is zero, so the conditional
    /// distribution is undefined. Surfaced as a hard error rather than
    /// adopting any limiting convention for contradictory contexts.
    #[error("conditional on a zero-weight disjunction is undefined")]
    ZeroWeightDisjunction,

    /// The observed outcomes have prior probability exactly zero.
    #[error("impossible evidence: the observed outcomes have probability 0")]
    ImpossibleEvidence,

    /// Two observations refer to the same measurement. Repeated
    /// measurements of the same kind are out of scope for this engine.
    #[error("measurement {0} observed more than once")]
    RepeatedMeasurement(String),

    /// The prediction target is among the observed measurements.
    #[error("target measurement {0} is among the observations")]
    TargetObserved(String),

    /// Outcome values do not cover some measurement.
    #[error("outcome values missing for measurement {0}")]
    MissingOutcomeValues(String),

    /// Two analyses do not share the same measurement/outcome structure.
    #[error("structure mismatch: {0}")]
    StructureMismatch(String),

    /// Requested urn size is outside the supported range.
    #[error("ball count parameter {n} out of range (must be 1..={cap})")]
    BallsOutOfRange { n: u32, cap: u32 },

    /// An operation on two-outcome distributions received a vector of a
    /// different arity.
    #[error("expected a 2-outcome probability vector, got {0} entries")]
    WrongArity(usize),
}

fn format_report(report: &[Violation]) -> String {
    report
        .iter()
        .map(|v| format!("  {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}
