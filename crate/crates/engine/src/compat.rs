//! Moment vectors and the compatibility check between two circumstance
//! analyses of the same context.
//!
//! The moment of a key `{(k1,i1),…,(kt,it)}` (pairwise distinct
//! measurements) is the class-weighted sum of the products
//! `q^{k1}_{i1}⋯q^{kt}_{it}` over the indexed classes. Two analyses with
//! equal moment vectors assign identical marginal and predictive
//! distributions for every observation set, so they are observationally
//! interchangeable even when their circumstance sets differ.
//!
//! The vector carries every key from order 1 (single measurements, whose
//! moments are the marginals) up to order m (all measurements at once):
//! for m measurements with n_k outcomes each that is Π(n_k + 1) − 1
//! entries, cheap at desk scale.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::Error;
use crate::indexing::IndexedModel;
use crate::model::{Measurement, Observation};
use crate::rational::Rational;

/// A canonical set of observations with pairwise distinct measurements,
/// ordered by the model's measurement order.
///
/// The ordering compares measurement indices first, then outcome indices,
/// so "lexicographically first differing key" is well-defined and
/// deterministic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct MomentKey {
    /// (measurement index, outcome index) pairs, strictly increasing in
    /// the measurement index.
    entries: Vec<(usize, usize)>,
}

impl MomentKey {
    fn new(entries: Vec<(usize, usize)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(!entries.is_empty());
        MomentKey { entries }
    }

    pub fn order(&self) -> usize {
        self.entries.len()
    }

    /// Renders the key against its measurement list, e.g. `toss=head` or
    /// `Letter=a,Number=1`.
    pub fn render(&self, measurements: &[Measurement]) -> String {
        self.entries
            .iter()
            .map(|&(k, i)| format!("{}={}", measurements[k].id, measurements[k].outcomes[i]))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// The observations this key stands for.
    pub fn observations(&self, measurements: &[Measurement]) -> Vec<Observation> {
        self.entries
            .iter()
            .map(|&(k, i)| {
                Observation::new(
                    measurements[k].id.clone(),
                    measurements[k].outcomes[i].clone(),
                )
            })
            .collect()
    }
}

/// All mixed moments of an indexed model over distinct-measurement outcome
/// products, keyed canonically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentVector {
    pub measurements: Vec<Measurement>,
    pub moments: BTreeMap<MomentKey, Rational>,
}

impl MomentVector {
    pub fn get(&self, key: &MomentKey) -> Option<&Rational> {
        self.moments.get(key)
    }

    /// Looks up a moment by measurement/outcome ids.
    pub fn moment_of(&self, observations: &[Observation]) -> Result<&Rational, Error> {
        let mut entries = Vec::with_capacity(observations.len());
        for obs in observations {
            let k = self
                .measurements
                .iter()
                .position(|m| m.id == obs.measurement)
                .ok_or_else(|| Error::UnknownMeasurement(obs.measurement.clone()))?;
            let i = self.measurements[k]
                .outcome_index(&obs.outcome)
                .ok_or_else(|| Error::UnknownOutcome {
                    measurement: obs.measurement.clone(),
                    outcome: obs.outcome.clone(),
                })?;
            entries.push((k, i));
        }
        entries.sort_unstable();
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::RepeatedMeasurement(
                    self.measurements[w[0].0].id.clone(),
                ));
            }
        }
        if entries.is_empty() {
            return Err(Error::EmptySubset);
        }
        self.moments
            .get(&MomentKey::new(entries))
            .ok_or(Error::StructureMismatch(
                "moment key not present in vector".to_string(),
            ))
    }

    /// Deterministic key-sorted JSON object with `k=i` keys and `p/q`
    /// string values.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        let mut rendered: Vec<(String, String)> = self
            .moments
            .iter()
            .map(|(key, value)| (key.render(&self.measurements), value.to_string()))
            .collect();
        rendered.sort();
        for (k, v) in rendered {
            map.insert(k, serde_json::Value::String(v));
        }
        serde_json::Value::Object(map)
    }
}

impl fmt::Display for MomentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (key, value)) in self.moments.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{} {}", key.render(&self.measurements), value)?;
        }
        Ok(())
    }
}

/// Result of a [`compatible`] check: either equal, or the first differing
/// key with both values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Compatibility {
    Compatible,
    FirstDifference {
        key: MomentKey,
        rendered_key: String,
        left: Rational,
        right: Rational,
    },
}

impl Compatibility {
    pub fn is_compatible(&self) -> bool {
        matches!(self, Compatibility::Compatible)
    }
}

/// Computes the full moment vector of an indexed model.
pub fn moments(indexed: &IndexedModel) -> MomentVector {
    let mut keys: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for (k, m) in indexed.measurements.iter().enumerate() {
        let mut extended = Vec::new();
        for key in &keys {
            for i in 0..m.outcomes.len() {
                let mut next = key.clone();
                next.push((k, i));
                extended.push(next);
            }
        }
        keys.extend(extended);
    }

    let mut map = BTreeMap::new();
    for entries in keys.into_iter().filter(|k| !k.is_empty()) {
        let mut total = Rational::zero();
        for class in &indexed.classes {
            let mut product = class.weight.clone();
            for &(k, i) in &entries {
                let row = class.point.component(k).expect("point covers measurements");
                product = product * row.get(i).expect("row covers outcomes");
            }
            total = total + product;
        }
        map.insert(MomentKey::new(entries), total);
    }

    MomentVector {
        measurements: indexed.measurements.clone(),
        moments: map,
    }
}

/// Exact comparison of two moment vectors over the same structure.
pub fn compatible(a: &MomentVector, b: &MomentVector) -> Result<Compatibility, Error> {
    if a.measurements != b.measurements {
        return Err(Error::StructureMismatch(
            "moment vectors built over different measurement structures".to_string(),
        ));
    }
    debug_assert_eq!(a.moments.len(), b.moments.len());
    for (key, left) in &a.moments {
        let right = b.moments.get(key).ok_or(Error::StructureMismatch(
            "moment vectors carry different key sets".to_string(),
        ))?;
        if left != right {
            return Ok(Compatibility::FirstDifference {
                key: key.clone(),
                rendered_key: key.render(&a.measurements),
                left: left.clone(),
                right: right.clone(),
            });
        }
    }
    Ok(Compatibility::Compatible)
}
