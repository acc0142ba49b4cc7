//! Seeded simulation: draw a hidden circumstance, sample outcomes from its
//! tables, update sequentially, and audit ratio invariance.
//!
//! Randomness comes from a ChaCha12 stream seeded with `--seed`; sampling
//! against the exact rational weights is done by drawing a uniform integer
//! below the weights' common denominator, so the run is reproducible
//! bit-for-bit for a fixed seed on every platform.

use circ_engine::{index_by_plausibility, update, CircumstanceModel, Error, Observation, Rational};
use num_bigint::BigUint;
use num_integer::Integer;
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use crate::render::{classes_text, rational_pair};

/// Uniform integer in `0..bound` from the RNG stream, by rejection on the
/// top bits.
fn uniform_below(rng: &mut ChaCha12Rng, bound: &BigUint) -> BigUint {
    assert!(bound > &BigUint::from(0u8));
    let bits = bound.bits();
    let words = bits.div_ceil(32) as usize;
    let top_mask: u32 = if bits.is_multiple_of(32) {
        u32::MAX
    } else {
        (1u32 << (bits % 32) as u32) - 1
    };
    loop {
        let mut digits = Vec::with_capacity(words);
        for i in 0..words {
            let mut word = rng.next_u32();
            if i == words - 1 {
                word &= top_mask;
            }
            digits.push(word);
        }
        let candidate = BigUint::from_slice(&digits);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// Samples an index proportionally to exact nonnegative rational weights.
fn sample_index(rng: &mut ChaCha12Rng, weights: &[&Rational]) -> usize {
    let mut common = num_bigint::BigInt::from(1);
    for w in weights {
        common = common.lcm(w.denom());
    }
    let masses: Vec<BigUint> = weights
        .iter()
        .map(|w| ((w.numer() * &common) / w.denom()).magnitude().clone())
        .collect();
    let total: BigUint = masses.iter().sum();
    let draw = uniform_below(rng, &total);
    let mut cumulative = BigUint::from(0u8);
    for (i, mass) in masses.iter().enumerate() {
        cumulative += mass;
        if draw < cumulative {
            return i;
        }
    }
    unreachable!("draw below total mass")
}

pub struct SimulationArgs<'a> {
    pub model: &'a CircumstanceModel,
    pub seed: u64,
    pub hidden: Option<&'a str>,
    pub draw_hidden: bool,
    pub sequence: &'a [String],
}

pub enum SimError {
    /// Bad flags or references (exit 1).
    Input(String),
    /// An engine error, keeping its own exit-code mapping.
    Engine(Error),
}

/// Runs the simulation and returns the full report text.
pub fn run(args: SimulationArgs<'_>) -> Result<String, SimError> {
    let model = args.model;
    for (i, m) in args.sequence.iter().enumerate() {
        if model.measurement(m).is_none() {
            return Err(SimError::Input(format!(
                "unknown measurement {m} in --sequence"
            )));
        }
        if args.sequence[..i].contains(m) {
            return Err(SimError::Input(format!(
                "measurement {m} repeated in --sequence"
            )));
        }
    }

    let mut rng = ChaCha12Rng::seed_from_u64(args.seed);

    let hidden_id = match (args.hidden, args.draw_hidden) {
        (Some(_), true) => {
            return Err(SimError::Input(
                "--hidden and --draw-hidden are mutually exclusive".to_string(),
            ))
        }
        (None, false) => {
            return Err(SimError::Input(
                "one of --hidden or --draw-hidden is required".to_string(),
            ))
        }
        (Some(id), false) => {
            if model.circumstance(id).is_none() {
                return Err(SimError::Input(format!("unknown circumstance {id}")));
            }
            id.to_string()
        }
        (None, true) => {
            let weights: Vec<&Rational> = model.circumstances.iter().map(|c| &c.weight).collect();
            let index = sample_index(&mut rng, &weights);
            model.circumstances[index].id.clone()
        }
    };
    let hidden = model.circumstance(&hidden_id).expect("resolved above");

    let mut out = String::new();
    out.push_str(&format!("model: {}\n", model.name));
    out.push_str(&format!(
        "hidden circumstance: {} ({})\n",
        hidden_id,
        if args.draw_hidden { "drawn" } else { "fixed" }
    ));

    let mut current = model.clone();
    for (step, measurement_id) in args.sequence.iter().enumerate() {
        let measurement = model.measurement(measurement_id).expect("checked above");
        let row = hidden
            .tables
            .get(measurement_id)
            .expect("valid model tables");
        let entries: Vec<&Rational> = row.entries().iter().collect();
        let outcome_index = sample_index(&mut rng, &entries);
        let outcome = measurement.outcomes[outcome_index].clone();

        let observation = Observation::new(measurement_id.clone(), outcome.clone());
        let posterior = update(&current, &[observation]).map_err(SimError::Engine)?;

        out.push_str(&format!(
            "step {}: {measurement_id} = {outcome}\n",
            step + 1
        ));
        out.push_str(&format!(
            "  evidence {}\n",
            rational_pair(&posterior.evidence)
        ));
        let indexed = index_by_plausibility(&posterior.model).map_err(SimError::Engine)?;
        for line in classes_text(&indexed).lines() {
            out.push_str(&format!("  {line}\n"));
        }
        current = posterior.model;
    }
    if args.sequence.is_empty() {
        out.push_str("no steps requested; posterior equals prior\n");
    }

    out.push_str(&audit(model, &current)?);
    Ok(out)
}

/// Ratio-invariance audit: within every equivalence class, the posterior
/// weight ratios of members with nonzero prior weight must equal the prior
/// ratios exactly.
fn audit(prior: &CircumstanceModel, posterior: &CircumstanceModel) -> Result<String, SimError> {
    let indexed = index_by_plausibility(prior).map_err(SimError::Engine)?;
    let mut out = String::from("ratio audit:\n");
    let mut all_ok = true;
    let mut pairs = 0usize;
    for class in &indexed.classes {
        let audited: Vec<&String> = class
            .members
            .iter()
            .filter(|id| !prior.circumstance(id).unwrap().weight.is_zero())
            .collect();
        for pair in audited.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let prior_a = &prior.circumstance(a).unwrap().weight;
            let prior_b = &prior.circumstance(b).unwrap().weight;
            let post_a = &posterior.circumstance(a).unwrap().weight;
            let post_b = &posterior.circumstance(b).unwrap().weight;
            let ok = prior_a * post_b == prior_b * post_a;
            all_ok &= ok;
            pairs += 1;
            out.push_str(&format!(
                "  class {}: {a}:{b} prior {}:{} posterior {}:{} {}\n",
                class.point,
                prior_a,
                prior_b,
                post_a,
                post_b,
                if ok { "ok" } else { "MISMATCH" }
            ));
        }
    }
    if pairs == 0 {
        out.push_str("  no multi-member classes with positive weights to audit\n");
    }
    out.push_str(&format!(
        "ratio audit result: {}\n",
        if all_ok { "all preserved" } else { "MISMATCH" }
    ));
    if all_ok {
        Ok(out)
    } else {
        Err(SimError::Input(format!("{out}ratio invariance violated")))
    }
}
