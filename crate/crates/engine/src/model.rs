//! Domain model for contexts: measurements, outcomes, and circumstances.
//!
//! A [`CircumstanceModel`] reifies the whole background context: an ordered
//! set of measurements, each with at least two mutually exclusive and
//! exhaustive outcomes, and a mutually exclusive, exhaustive weighted set of
//! circumstances, each carrying one conditional outcome distribution per
//! measurement.
//!
//! Conditional independence of outcomes across measurements, given a
//! circumstance, is *structural* in this data model: a circumstance carries
//! one independent table per measurement. A situation where knowing one
//! measurement's outcome would change another's distribution *under the same
//! circumstance* cannot be expressed directly; it must be modelled by
//! refining the circumstance set until the independence holds within each
//! refined circumstance.
//!
//! Values are immutable after construction and all operations are pure, so
//! everything here is safe to share across threads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::Error;
use crate::rational::Rational;

/// A measurement with its ordered, mutually exclusive and exhaustive
/// outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Measurement {
    pub id: String,
    pub outcomes: Vec<String>,
}

impl Measurement {
    pub fn new(
        id: impl Into<String>,
        outcomes: impl IntoIterator<Item = impl Into<String>>,
    ) -> Self {
        Measurement {
            id: id.into(),
            outcomes: outcomes.into_iter().map(Into::into).collect(),
        }
    }

    pub fn outcome_index(&self, outcome: &str) -> Option<usize> {
        self.outcomes.iter().position(|o| o == outcome)
    }
}

/// A probability distribution over one measurement's outcomes, aligned with
/// the measurement's outcome order.
///
/// Construction does not check normalization; [`validate_model`] reports
/// rows that are not nonnegative or do not sum to one. Entries are always in
/// canonical lowest terms, so structural equality is mathematical equality
/// and the derived lexicographic order is exact.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProbVector(Vec<Rational>);

impl ProbVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        ProbVector(entries)
    }

    pub fn uniform(len: usize) -> Self {
        assert!(len > 0);
        ProbVector(vec![Rational::new(1, len as i64); len])
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Rational> {
        self.0.get(index)
    }

    pub fn sum(&self) -> Rational {
        self.0.iter().sum()
    }

    /// All entries nonnegative and summing to exactly one.
    pub fn is_normalized(&self) -> bool {
        !self.0.is_empty() && self.0.iter().all(|e| !e.is_negative()) && self.sum().is_one()
    }

    /// Largest entry (the supremum norm of the distribution).
    pub fn max_entry(&self) -> &Rational {
        self.0.iter().max().expect("nonempty probability vector")
    }
}

impl fmt::Display for ProbVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// One hypothesis about the context: a weight (its plausibility) and one
/// conditional outcome distribution per measurement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circumstance {
    pub id: String,
    pub label: Option<String>,
    pub weight: Rational,
    /// Measurement id -> conditional distribution over that measurement's
    /// outcomes.
    pub tables: BTreeMap<String, ProbVector>,
}

impl Circumstance {
    pub fn new(id: impl Into<String>, weight: Rational) -> Self {
        Circumstance {
            id: id.into(),
            label: None,
            weight,
            tables: BTreeMap::new(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_table(mut self, measurement: impl Into<String>, row: ProbVector) -> Self {
        self.tables.insert(measurement.into(), row);
        self
    }
}

/// The context: measurements plus a mutually exclusive, exhaustive weighted
/// set of circumstances.
///
/// Weights of exactly zero are permitted; such circumstances still carry
/// well-defined tables and participate in equivalence-classing, but
/// contribute nothing to any weighted sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircumstanceModel {
    pub name: String,
    pub measurements: Vec<Measurement>,
    pub circumstances: Vec<Circumstance>,
}

impl CircumstanceModel {
    pub fn new(name: impl Into<String>) -> Self {
        CircumstanceModel {
            name: name.into(),
            measurements: Vec::new(),
            circumstances: Vec::new(),
        }
    }

    pub fn measurement(&self, id: &str) -> Option<&Measurement> {
        self.measurements.iter().find(|m| m.id == id)
    }

    pub fn measurement_index(&self, id: &str) -> Option<usize> {
        self.measurements.iter().position(|m| m.id == id)
    }

    pub fn circumstance(&self, id: &str) -> Option<&Circumstance> {
        self.circumstances.iter().find(|c| c.id == id)
    }

    /// Sum of all circumstance weights.
    pub fn total_weight(&self) -> Rational {
        self.circumstances.iter().map(|c| &c.weight).sum()
    }

    /// Shorthand for an empty [`validate_model`] report.
    pub fn is_valid(&self) -> bool {
        validate_model(self).is_empty()
    }

    /// Returns `Ok(())` when valid, otherwise the full violation report.
    pub fn require_valid(&self) -> Result<(), Error> {
        let report = validate_model(self);
        if report.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidModel(report))
        }
    }
}

/// The tuple of one conditional distribution per measurement, in the model's
/// measurement order. This is the key by which circumstances are grouped
/// into equivalence classes: two circumstances are equivalent exactly when
/// their parameter points are equal.
///
/// Entries are canonical rationals, so the derived equality and the derived
/// lexicographic order are exact.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParameterPoint(Vec<ProbVector>);

impl ParameterPoint {
    pub fn new(components: Vec<ProbVector>) -> Self {
        ParameterPoint(components)
    }

    pub fn components(&self) -> &[ProbVector] {
        &self.0
    }

    /// Component for the `index`-th measurement.
    pub fn component(&self, index: usize) -> Option<&ProbVector> {
        self.0.get(index)
    }
}

impl fmt::Display for ParameterPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// A known outcome of one measurement.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Observation {
    pub measurement: String,
    pub outcome: String,
}

impl Observation {
    pub fn new(measurement: impl Into<String>, outcome: impl Into<String>) -> Self {
        Observation {
            measurement: measurement.into(),
            outcome: outcome.into(),
        }
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.measurement, self.outcome)
    }
}

/// One violated invariant, with the location it was found at.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

fn violation(location: impl Into<String>, message: impl Into<String>) -> Violation {
    Violation {
        location: location.into(),
        message: message.into(),
    }
}

/// Checks every structural invariant of a candidate model and reports all
/// violations found. Validation never fails: an arbitrary candidate
/// structure yields a (possibly empty) report, and an empty report means the
/// model is valid.
pub fn validate_model(model: &CircumstanceModel) -> Vec<Violation> {
    let mut report = Vec::new();

    if model.measurements.is_empty() {
        report.push(violation("model", "model declares no measurements"));
    }

    let mut seen_measurements = BTreeSet::new();
    for m in &model.measurements {
        let loc = format!("measurement {}", m.id);
        if !seen_measurements.insert(m.id.as_str()) {
            report.push(violation(
                &loc,
                format!("duplicate measurement id {}", m.id),
            ));
        }
        if m.outcomes.len() < 2 {
            report.push(violation(
                &loc,
                format!("must declare at least 2 outcomes, has {}", m.outcomes.len()),
            ));
        }
        let mut seen_outcomes = BTreeSet::new();
        for o in &m.outcomes {
            if !seen_outcomes.insert(o.as_str()) {
                report.push(violation(&loc, format!("duplicate outcome id {o}")));
            }
        }
    }

    let mut seen_circumstances = BTreeSet::new();
    for c in &model.circumstances {
        let loc = format!("circumstance {}", c.id);
        if !seen_circumstances.insert(c.id.as_str()) {
            report.push(violation(
                &loc,
                format!("duplicate circumstance id {}", c.id),
            ));
        }
        if c.weight.is_negative() {
            report.push(violation(&loc, format!("negative weight {}", c.weight)));
        }
        for m in &model.measurements {
            match c.tables.get(&m.id) {
                None => {
                    report.push(violation(
                        &loc,
                        format!("missing table for measurement {}", m.id),
                    ));
                }
                Some(row) => {
                    let row_loc = format!("{loc}, row {}", m.id);
                    if row.len() != m.outcomes.len() {
                        report.push(violation(
                            &row_loc,
                            format!(
                                "row has {} entries but measurement {} has {} outcomes",
                                row.len(),
                                m.id,
                                m.outcomes.len()
                            ),
                        ));
                    }
                    for (i, e) in row.entries().iter().enumerate() {
                        if e.is_negative() {
                            report.push(violation(
                                &row_loc,
                                format!("negative entry {e} at position {i}"),
                            ));
                        }
                    }
                    let sum = row.sum();
                    if !sum.is_one() {
                        report.push(violation(&row_loc, format!("row sums to {sum} ≠ 1")));
                    }
                }
            }
        }
        for key in c.tables.keys() {
            if model.measurement(key).is_none() {
                report.push(violation(
                    &loc,
                    format!("table for unknown measurement {key}"),
                ));
            }
        }
    }

    if model.circumstances.is_empty() {
        report.push(violation("model", "model declares no circumstances"));
    } else {
        let total = model.total_weight();
        if !total.is_one() {
            report.push(violation("model", format!("weights sum to {total} ≠ 1")));
        }
    }

    report
}

/// The equivalence-classing key of one circumstance: its conditional
/// distributions in the model's measurement order.
pub fn parameter_point_of(
    model: &CircumstanceModel,
    circumstance_id: &str,
) -> Result<ParameterPoint, Error> {
    let c = model
        .circumstance(circumstance_id)
        .ok_or_else(|| Error::UnknownCircumstance(circumstance_id.to_string()))?;
    let mut components = Vec::with_capacity(model.measurements.len());
    for m in &model.measurements {
        let row = c.tables.get(&m.id).ok_or_else(|| Error::MissingTable {
            circumstance: circumstance_id.to_string(),
            measurement: m.id.clone(),
        })?;
        components.push(row.clone());
    }
    Ok(ParameterPoint::new(components))
}
