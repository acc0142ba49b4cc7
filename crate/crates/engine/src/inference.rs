//! Marginal distributions, Bayesian updating of circumstance weights,
//! predictive distributions, and the convex-mixture invariance witness.
//!
//! Updating operates on raw circumstances; the indexed view is re-derived
//! afterwards. Because knowledge of outcomes can never alter the weight
//! *ratios* within an equivalence class, the raw-level and class-level
//! updates project onto each other exactly, and [`update_indexed`] is
//! provided for checking that equivalence directly.
//!
//! Observations are limited to at most one per measurement. Models in which
//! a circumstance does not screen off one measurement's outcome from
//! another's (for instance repeated tosses by the same unknown tosser)
//! cannot be expressed in this structure; they require a finer circumstance
//! set. See the crate-level notes.

use crate::error::Error;
use crate::indexing::{index_by_plausibility, IndexedModel};
use crate::model::{CircumstanceModel, Measurement, Observation, ProbVector};
use crate::rational::Rational;

/// A model with updated weights, together with the evidence (the prior
/// probability of the conditioning observations) and the observations
/// applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosteriorModel {
    pub model: CircumstanceModel,
    pub evidence: Rational,
    pub conditioning: Vec<Observation>,
}

/// Class-level counterpart of [`PosteriorModel`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedPosterior {
    pub model: IndexedModel,
    pub evidence: Rational,
    pub conditioning: Vec<Observation>,
}

/// One class's check in a [`mixture_invariance_witness`] report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessCheck {
    pub point_component: ProbVector,
    /// Recomputed conditional over the class members; `None` when the class
    /// carries zero total weight, in which case the member rows were
    /// compared directly instead.
    pub recomputed: Option<ProbVector>,
    pub passed: bool,
}

/// Looks up an observation's measurement and outcome indices.
fn observation_indices(
    measurements: &[Measurement],
    obs: &Observation,
) -> Result<(usize, usize), Error> {
    let k = measurements
        .iter()
        .position(|m| m.id == obs.measurement)
        .ok_or_else(|| Error::UnknownMeasurement(obs.measurement.clone()))?;
    let i = measurements[k]
        .outcome_index(&obs.outcome)
        .ok_or_else(|| Error::UnknownOutcome {
            measurement: obs.measurement.clone(),
            outcome: obs.outcome.clone(),
        })?;
    Ok((k, i))
}

fn check_distinct_measurements(observations: &[Observation]) -> Result<(), Error> {
    for (i, a) in observations.iter().enumerate() {
        for b in &observations[i + 1..] {
            if a.measurement == b.measurement {
                return Err(Error::RepeatedMeasurement(a.measurement.clone()));
            }
        }
    }
    Ok(())
}

/// Distribution for `measurement` conditional on the disjunction of the
/// given circumstances: the convex combination of their rows, weighted by
/// their (renormalized) weights.
pub fn conditional_on_disjunction(
    model: &CircumstanceModel,
    measurement: &str,
    subset: &[String],
) -> Result<ProbVector, Error> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let m = model
        .measurement(measurement)
        .ok_or_else(|| Error::UnknownMeasurement(measurement.to_string()))?;

    // B ∨ B = B: repeated ids contribute once.
    let mut seen = std::collections::BTreeSet::new();
    let subset: Vec<&String> = subset
        .iter()
        .filter(|id| seen.insert(id.as_str()))
        .collect();

    let mut total = Rational::zero();
    let mut mix = vec![Rational::zero(); m.outcomes.len()];
    for id in subset {
        let c = model
            .circumstance(id)
            .ok_or_else(|| Error::UnknownCircumstance(id.clone()))?;
        let row = c
            .tables
            .get(measurement)
            .ok_or_else(|| Error::MissingTable {
                circumstance: id.clone(),
                measurement: measurement.to_string(),
            })?;
        total = &total + &c.weight;
        for (acc, p) in mix.iter_mut().zip(row.entries()) {
            *acc = &*acc + &(p * &c.weight);
        }
    }
    if total.is_zero() {
        return Err(Error::ZeroWeightDisjunction);
    }
    Ok(ProbVector::new(
        mix.into_iter().map(|e| e / total.clone()).collect(),
    ))
}

/// Marginal distribution of one measurement: the weight-mixed combination
/// of all circumstance rows.
pub fn marginal(model: &CircumstanceModel, measurement: &str) -> Result<ProbVector, Error> {
    model.require_valid()?;
    let m = model
        .measurement(measurement)
        .ok_or_else(|| Error::UnknownMeasurement(measurement.to_string()))?;

    let mut mix = vec![Rational::zero(); m.outcomes.len()];
    for c in &model.circumstances {
        let row = c.tables.get(measurement).expect("validated model");
        for (acc, p) in mix.iter_mut().zip(row.entries()) {
            *acc = &*acc + &(p * &c.weight);
        }
    }
    Ok(ProbVector::new(mix))
}

/// Marginal computed through an indexed model. Agrees exactly with
/// [`marginal`] on the source model.
pub fn marginal_indexed(indexed: &IndexedModel, measurement: &str) -> Result<ProbVector, Error> {
    let k = indexed
        .measurement_index(measurement)
        .ok_or_else(|| Error::UnknownMeasurement(measurement.to_string()))?;

    let mut mix = vec![Rational::zero(); indexed.measurements[k].outcomes.len()];
    for class in &indexed.classes {
        let row = class.point.component(k).expect("point covers measurements");
        for (acc, p) in mix.iter_mut().zip(row.entries()) {
            *acc = &*acc + &(p * &class.weight);
        }
    }
    Ok(ProbVector::new(mix))
}

/// Bayesian update of the circumstance weights on a set of observations of
/// pairwise distinct measurements. Each weight is multiplied by the product
/// of the observed outcomes' likelihoods under that circumstance, then
/// normalized; the evidence is the normalizer.
pub fn update(
    model: &CircumstanceModel,
    observations: &[Observation],
) -> Result<PosteriorModel, Error> {
    model.require_valid()?;
    check_distinct_measurements(observations)?;
    let mut indices = Vec::with_capacity(observations.len());
    for obs in observations {
        indices.push(observation_indices(&model.measurements, obs)?);
    }

    let mut posterior = model.clone();
    let mut evidence = Rational::zero();
    for c in posterior.circumstances.iter_mut() {
        let mut likelihood = Rational::one();
        for (k, i) in &indices {
            let m = &model.measurements[*k];
            let row = c.tables.get(&m.id).expect("validated model");
            likelihood = likelihood * row.get(*i).expect("validated row");
        }
        c.weight = &c.weight * &likelihood;
        evidence = &evidence + &c.weight;
    }
    if evidence.is_zero() {
        return Err(Error::ImpossibleEvidence);
    }
    for c in posterior.circumstances.iter_mut() {
        c.weight = &c.weight / &evidence;
    }

    Ok(PosteriorModel {
        model: posterior,
        evidence,
        conditioning: observations.to_vec(),
    })
}

/// Class-level Bayesian update: each class weight is multiplied by the
/// product of likelihoods read off its parameter point, then normalized.
pub fn update_indexed(
    indexed: &IndexedModel,
    observations: &[Observation],
) -> Result<IndexedPosterior, Error> {
    check_distinct_measurements(observations)?;
    let mut indices = Vec::with_capacity(observations.len());
    for obs in observations {
        indices.push(observation_indices(&indexed.measurements, obs)?);
    }

    let mut posterior = indexed.clone();
    let mut evidence = Rational::zero();
    for class in posterior.classes.iter_mut() {
        let mut likelihood = Rational::one();
        for (k, i) in &indices {
            let row = class
                .point
                .component(*k)
                .expect("point covers measurements");
            likelihood = likelihood * row.get(*i).expect("row covers outcomes");
        }
        class.weight = &class.weight * &likelihood;
        evidence = &evidence + &class.weight;
    }
    if evidence.is_zero() {
        return Err(Error::ImpossibleEvidence);
    }
    for class in posterior.classes.iter_mut() {
        class.weight = &class.weight / &evidence;
    }

    Ok(IndexedPosterior {
        model: posterior,
        evidence,
        conditioning: observations.to_vec(),
    })
}

/// Predictive distribution for an unobserved target measurement given
/// observed outcomes of other measurements: the marginal of the updated
/// model.
pub fn predict(
    model: &CircumstanceModel,
    target: &str,
    observations: &[Observation],
) -> Result<ProbVector, Error> {
    if observations.iter().any(|o| o.measurement == target) {
        return Err(Error::TargetObserved(target.to_string()));
    }
    if model.measurement(target).is_none() {
        return Err(Error::UnknownMeasurement(target.to_string()));
    }
    let posterior = update(model, observations)?;
    marginal(&posterior.model, target)
}

/// Predictive distribution computed through an indexed model.
pub fn predict_indexed(
    indexed: &IndexedModel,
    target: &str,
    observations: &[Observation],
) -> Result<ProbVector, Error> {
    if observations.iter().any(|o| o.measurement == target) {
        return Err(Error::TargetObserved(target.to_string()));
    }
    if indexed.measurement_index(target).is_none() {
        return Err(Error::UnknownMeasurement(target.to_string()));
    }
    let posterior = update_indexed(indexed, observations)?;
    marginal_indexed(&posterior.model, target)
}

/// For each equivalence class, recomputes the conditional distribution on
/// the disjunction of its members and checks exact equality with the
/// class's parameter-point component for `measurement`.
///
/// Every check passes for any correctly built indexed model, whatever the
/// circumstance weights: the conditional on a disjunction of circumstances
/// with identical rows is that shared row, regardless of the mixing
/// weights. Classes of total weight zero (where the conditional is
/// undefined) are checked by direct row comparison instead.
pub fn mixture_invariance_witness(
    model: &CircumstanceModel,
    measurement: &str,
) -> Result<Vec<WitnessCheck>, Error> {
    let indexed = index_by_plausibility(model)?;
    let k = indexed
        .measurement_index(measurement)
        .ok_or_else(|| Error::UnknownMeasurement(measurement.to_string()))?;

    let mut checks = Vec::with_capacity(indexed.classes.len());
    for class in &indexed.classes {
        let expected = class.point.component(k).expect("point covers measurements");
        match conditional_on_disjunction(model, measurement, &class.members) {
            Ok(recomputed) => {
                let passed = &recomputed == expected;
                checks.push(WitnessCheck {
                    point_component: expected.clone(),
                    recomputed: Some(recomputed),
                    passed,
                });
            }
            Err(Error::ZeroWeightDisjunction) => {
                let passed = class.members.iter().all(|id| {
                    model
                        .circumstance(id)
                        .and_then(|c| c.tables.get(measurement))
                        .is_some_and(|row| row == expected)
                });
                checks.push(WitnessCheck {
                    point_component: expected.clone(),
                    recomputed: None,
                    passed,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(checks)
}
