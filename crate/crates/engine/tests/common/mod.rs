// Not every test target uses every helper.
#![allow(dead_code)]

//! Shared test support: a deterministic random-model generator and the
//! brute-force oracles the acceptance suite checks against.
//!
//! The oracles are deliberately independent of the library's own code
//! paths: the ball-box oracle enumerates concrete ball subsets with
//! bitmasks and recomputes probabilities by counting marks, never calling
//! the generator or the inference routines it certifies.

use circ_engine::{
    Circumstance, CircumstanceModel, Measurement, Observation, ProbVector, Rational,
};
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

pub struct Gen {
    rng: ChaCha12Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    /// Uniform integer in `0..bound`.
    pub fn below(&mut self, bound: u32) -> u32 {
        assert!(bound > 0);
        // Rejection sampling keeps the draw unbiased.
        let zone = u32::MAX - (u32::MAX % bound);
        loop {
            let raw = self.rng.next_u32();
            if raw < zone {
                return raw % bound;
            }
        }
    }

    pub fn range(&mut self, lo: u32, hi_inclusive: u32) -> u32 {
        lo + self.below(hi_inclusive - lo + 1)
    }

    pub fn bool(&mut self) -> bool {
        self.below(2) == 1
    }

    /// Random composition of `total` into `parts` nonnegative summands.
    pub fn composition(&mut self, total: u32, parts: usize) -> Vec<u32> {
        assert!(parts > 0);
        let mut cuts: Vec<u32> = (0..parts - 1).map(|_| self.below(total + 1)).collect();
        cuts.sort_unstable();
        cuts.push(total);
        let mut previous = 0;
        cuts.into_iter()
            .map(|c| {
                let part = c - previous;
                previous = c;
                part
            })
            .collect()
    }

    /// Random exact probability vector with a small denominator.
    pub fn prob_vector(&mut self, len: usize) -> ProbVector {
        let denom = self.range(1, 8);
        let parts = self.composition(denom, len);
        ProbVector::new(
            parts
                .into_iter()
                .map(|p| Rational::new(p as i64, denom as i64))
                .collect(),
        )
    }
}

/// A random valid model: 1–3 measurements with 2–4 outcomes, 1–6
/// circumstances drawing their rows from small per-measurement pools so
/// that multi-member equivalence classes are common, and exact weights
/// (zeros allowed) summing to 1.
pub fn random_model(g: &mut Gen) -> CircumstanceModel {
    let mut model = CircumstanceModel::new("random");

    let n_measurements = g.range(1, 3) as usize;
    for k in 0..n_measurements {
        let n_outcomes = g.range(2, 4) as usize;
        let outcomes: Vec<String> = (0..n_outcomes).map(|i| format!("o{i}")).collect();
        model
            .measurements
            .push(Measurement::new(format!("m{k}"), outcomes));
    }

    // Row pools: few distinct rows per measurement to force collisions.
    let pools: Vec<Vec<ProbVector>> = model
        .measurements
        .iter()
        .map(|m| {
            let pool_size = g.range(1, 3) as usize;
            (0..pool_size)
                .map(|_| g.prob_vector(m.outcomes.len()))
                .collect()
        })
        .collect();

    let n_circumstances = g.range(1, 6) as usize;
    let weight_denom = g.range(1, 12);
    let weights = g.composition(weight_denom, n_circumstances);
    for (j, w) in weights.into_iter().enumerate() {
        let mut c = Circumstance::new(
            format!("c{j}"),
            Rational::new(w as i64, weight_denom as i64),
        );
        if g.bool() {
            c.label = Some(format!("random circumstance {j}"));
        }
        for (m, pool) in model.measurements.iter().zip(&pools) {
            let row = pool[g.below(pool.len() as u32) as usize].clone();
            c.tables.insert(m.id.clone(), row);
        }
        model.circumstances.push(c);
    }
    model
}

/// Random weights for an existing model, preserving everything else.
pub fn reweight(g: &mut Gen, model: &CircumstanceModel) -> CircumstanceModel {
    let mut out = model.clone();
    let denom = g.range(1, 12);
    let weights = g.composition(denom, out.circumstances.len());
    for (c, w) in out.circumstances.iter_mut().zip(weights) {
        c.weight = Rational::new(w as i64, denom as i64);
    }
    out
}

/// Random observation set over distinct measurements, retried until the
/// evidence is positive (empty when no positive-evidence set is found).
pub fn random_observations(g: &mut Gen, model: &CircumstanceModel) -> Vec<Observation> {
    for _ in 0..20 {
        let mut obs = Vec::new();
        for m in &model.measurements {
            if g.bool() {
                let i = g.below(m.outcomes.len() as u32) as usize;
                obs.push(Observation::new(m.id.clone(), m.outcomes[i].clone()));
            }
        }
        if circ_engine::update(model, &obs).is_ok() {
            return obs;
        }
    }
    Vec::new()
}

/// One concrete preparation of the ball box, for the brute-force oracle:
/// which of the `4n` distinct balls remain in the chest.
///
/// Ball `i` carries mark `i / n` (0 = a1, 1 = a2, 2 = b1, 3 = b2).
pub struct BallSubsets {
    pub n: u32,
    /// Composition (alpha, beta, gamma, delta) of each `2n`-subset.
    pub subsets: Vec<[u32; 4]>,
}

/// Enumerates every way to leave `2n` of the `4n` balls in the chest.
/// Only feasible for small `n` (bitmask over `4n` bits).
pub fn enumerate_ball_subsets(n: u32) -> BallSubsets {
    assert!(n <= 3, "bitmask oracle is for n <= 3");
    let total_balls = 4 * n;
    let keep = 2 * n;
    let mut subsets = Vec::new();
    for mask in 0u32..(1 << total_balls) {
        if mask.count_ones() != keep {
            continue;
        }
        let mut counts = [0u32; 4];
        for ball in 0..total_balls {
            if mask & (1 << ball) != 0 {
                counts[(ball / n) as usize] += 1;
            }
        }
        subsets.push(counts);
    }
    assert!(!subsets.is_empty());
    BallSubsets { n, subsets }
}

impl BallSubsets {
    /// Probability of letter `a` under one subset: fraction of remaining
    /// balls marked a1 or a2.
    pub fn q_letter_a(&self, counts: &[u32; 4]) -> Rational {
        Rational::new((counts[0] + counts[1]) as i64, (2 * self.n) as i64)
    }

    /// Probability of number `1` under one subset.
    pub fn q_number_1(&self, counts: &[u32; 4]) -> Rational {
        Rational::new((counts[0] + counts[2]) as i64, (2 * self.n) as i64)
    }
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn prob_vector(entries: &[(i64, i64)]) -> ProbVector {
    ProbVector::new(entries.iter().map(|&(n, d)| Rational::new(n, d)).collect())
}
