//! Grouping circumstances into plausibility-indexed (or expectation-indexed)
//! equivalence classes.
//!
//! Two circumstances are equivalent when they lead to exactly the same
//! conditional distribution for every measurement, i.e. when their
//! [`ParameterPoint`]s are equal. The disjunction of each equivalence class
//! forms one coarse-grained circumstance, uniquely indexed by the shared
//! point; its weight is the exact sum of the member weights.
//!
//! The partition depends only on the tables, never on the weights, so
//! reweighting a model changes class weights but never class membership.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::model::{parameter_point_of, CircumstanceModel, Measurement, ParameterPoint};
use crate::rational::Rational;

/// One equivalence class: the shared parameter point, the member
/// circumstance ids (in model order), and the summed weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedClass {
    pub point: ParameterPoint,
    pub members: Vec<String>,
    pub weight: Rational,
}

/// The coarse-grained model: equivalence classes keyed by parameter point.
///
/// Classes are sorted lexicographically by the rational entries of their
/// points, so the listing order is deterministic. Points are pairwise
/// distinct and the members of all classes partition the source model's
/// circumstance ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedModel {
    pub source_name: String,
    pub measurements: Vec<Measurement>,
    pub classes: Vec<IndexedClass>,
}

impl IndexedModel {
    pub fn class_at(&self, point: &ParameterPoint) -> Option<&IndexedClass> {
        self.classes.iter().find(|c| &c.point == point)
    }

    pub fn measurement_index(&self, id: &str) -> Option<usize> {
        self.measurements.iter().position(|m| m.id == id)
    }

    pub fn total_weight(&self) -> Rational {
        self.classes.iter().map(|c| &c.weight).sum()
    }
}

/// Per-measurement numeric values attached to outcomes, for
/// expectation-indexed grouping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeValues {
    /// Measurement id -> (outcome id -> value).
    pub values: BTreeMap<String, BTreeMap<String, Rational>>,
}

impl OutcomeValues {
    pub fn new() -> Self {
        OutcomeValues {
            values: BTreeMap::new(),
        }
    }

    pub fn set(
        mut self,
        measurement: impl Into<String>,
        outcome: impl Into<String>,
        value: Rational,
    ) -> Self {
        self.values
            .entry(measurement.into())
            .or_default()
            .insert(outcome.into(), value);
        self
    }
}

impl Default for OutcomeValues {
    fn default() -> Self {
        Self::new()
    }
}

/// One expectation-indexed class: the tuple of per-measurement expected
/// values shared by all members, the member ids, and the summed weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectationIndexedClass {
    pub key: Vec<Rational>,
    pub members: Vec<String>,
    pub weight: Rational,
}

/// Partitions the circumstances by exact equality of their parameter
/// points and sums weights within each class.
pub fn index_by_plausibility(model: &CircumstanceModel) -> Result<IndexedModel, Error> {
    model.require_valid()?;

    let mut classes: BTreeMap<ParameterPoint, (Vec<String>, Rational)> = BTreeMap::new();
    for c in &model.circumstances {
        let point = parameter_point_of(model, &c.id)?;
        let entry = classes
            .entry(point)
            .or_insert_with(|| (Vec::new(), Rational::zero()));
        entry.0.push(c.id.clone());
        entry.1 = &entry.1 + &c.weight;
    }

    Ok(IndexedModel {
        source_name: model.name.clone(),
        measurements: model.measurements.clone(),
        classes: classes
            .into_iter()
            .map(|(point, (members, weight))| IndexedClass {
                point,
                members,
                weight,
            })
            .collect(),
    })
}

/// Expected value of the given outcome values under one conditional
/// distribution.
fn expectation(
    values: &BTreeMap<String, Rational>,
    measurement: &Measurement,
    row: &crate::model::ProbVector,
) -> Result<Rational, Error> {
    let mut total = Rational::zero();
    for (outcome, p) in measurement.outcomes.iter().zip(row.entries()) {
        let value = values.get(outcome).ok_or_else(|| Error::UnknownOutcome {
            measurement: measurement.id.clone(),
            outcome: outcome.clone(),
        })?;
        total = total + value * p;
    }
    Ok(total)
}

/// Partitions the circumstances by exact equality of the per-measurement
/// expectation tuple of `values`. This grouping is generally coarser than
/// plausibility indexing: distinct distributions can share an expectation.
pub fn index_by_expectation(
    model: &CircumstanceModel,
    values: &OutcomeValues,
) -> Result<Vec<ExpectationIndexedClass>, Error> {
    model.require_valid()?;
    for m in &model.measurements {
        if !values.values.contains_key(&m.id) {
            return Err(Error::MissingOutcomeValues(m.id.clone()));
        }
    }

    let mut classes: BTreeMap<Vec<Rational>, (Vec<String>, Rational)> = BTreeMap::new();
    for c in &model.circumstances {
        let mut key = Vec::with_capacity(model.measurements.len());
        for m in &model.measurements {
            let row = c.tables.get(&m.id).ok_or_else(|| Error::MissingTable {
                circumstance: c.id.clone(),
                measurement: m.id.clone(),
            })?;
            key.push(expectation(&values.values[&m.id], m, row)?);
        }
        let entry = classes
            .entry(key)
            .or_insert_with(|| (Vec::new(), Rational::zero()));
        entry.0.push(c.id.clone());
        entry.1 = &entry.1 + &c.weight;
    }

    Ok(classes
        .into_iter()
        .map(|(key, (members, weight))| ExpectationIndexedClass {
            key,
            members,
            weight,
        })
        .collect())
}

/// True iff every plausibility class's member set is contained in some
/// expectation class's member set, i.e. the plausibility partition refines
/// the expectation partition. Always true when both were built from the
/// same model, since equal distributions force equal expectations.
pub fn class_refinement_check(
    plaus: &IndexedModel,
    expect: &[ExpectationIndexedClass],
) -> Result<bool, Error> {
    let mut plaus_members: Vec<&str> = plaus
        .classes
        .iter()
        .flat_map(|c| c.members.iter().map(String::as_str))
        .collect();
    let mut expect_members: Vec<&str> = expect
        .iter()
        .flat_map(|c| c.members.iter().map(String::as_str))
        .collect();
    plaus_members.sort_unstable();
    expect_members.sort_unstable();
    if plaus_members != expect_members {
        return Err(Error::StructureMismatch(
            "partitions cover different circumstance sets".to_string(),
        ));
    }

    Ok(plaus.classes.iter().all(|pc| {
        expect
            .iter()
            .any(|ec| pc.members.iter().all(|m| ec.members.contains(m)))
    }))
}
