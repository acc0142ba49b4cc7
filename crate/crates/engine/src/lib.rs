//! Exact-arithmetic inference over finite circumstance models.
//!
//! A *circumstance model* analyses a context into a mutually exclusive,
//! exhaustive weighted set of hypotheses ("circumstances"), each of which
//! fixes one conditional outcome distribution per measurement. This crate
//! groups circumstances into equivalence classes indexed by those
//! distributions, computes marginal and predictive distributions, performs
//! Bayesian updating of the weights, and checks moment compatibility
//! between alternative analyses of the same context. Every probability is
//! an exact rational; equality of distributions — and therefore the
//! equivalence-classing itself — is decided exactly, with no tolerance
//! parameter anywhere.
//!
//! # Structural assumptions
//!
//! Given a circumstance, outcomes of different measurements are
//! conditionally independent *by construction*: a circumstance carries one
//! table per measurement and nothing else. Situations where this fails
//! (for example, repeated tosses by the same unknown tosser, where earlier
//! outcomes teach you about the tosser) cannot be represented directly and
//! must be modelled by refining the circumstance set until independence
//! holds within each circumstance. Likewise, each measurement may be
//! observed at most once per conditioning set.
//!
//! Zero-probability evidence is a hard error, never a silent convention;
//! circumstances of weight exactly zero are allowed and participate in
//! classing without contributing to any sum.
//!
//! All values are immutable after construction and all operations are pure,
//! so everything is safe to share across threads.
//!
//! # Example
//!
//! ```
//! use circ_engine::{gen_coin, index_by_plausibility, marginal, update, Observation, Rational};
//!
//! let coin = gen_coin();
//! assert_eq!(
//!     marginal(&coin, "toss").unwrap().entries()[0],
//!     Rational::new(3, 4),
//! );
//!
//! // Two of the four tossers force head, so they share one class.
//! let classes = index_by_plausibility(&coin).unwrap();
//! assert_eq!(classes.classes.len(), 2);
//!
//! // Observing head moves weight onto the head-forcing class, but can
//! // never separate circumstances within a class.
//! let posterior = update(&coin, &[Observation::new("toss", "head")]).unwrap();
//! assert_eq!(posterior.evidence, Rational::new(3, 4));
//! let classes = index_by_plausibility(&posterior.model).unwrap();
//! assert_eq!(classes.classes[1].weight, Rational::new(2, 3));
//! ```

pub mod builtin;
pub mod compat;
pub mod dsl;
mod error;
pub mod indexing;
pub mod inference;
pub mod model;
pub mod rational;

pub use builtin::{
    count_classes, gamma_points, gamma_points_with_cap, gen_balls, gen_balls_with_cap, gen_coin,
    in_gamma_infinity, Composition, GammaPoint, DEFAULT_MAX_N,
};
pub use compat::{compatible, moments, Compatibility, MomentKey, MomentVector};
pub use error::Error;
pub use indexing::{
    class_refinement_check, index_by_expectation, index_by_plausibility, ExpectationIndexedClass,
    IndexedClass, IndexedModel, OutcomeValues,
};
pub use inference::{
    conditional_on_disjunction, marginal, marginal_indexed, mixture_invariance_witness, predict,
    predict_indexed, update, update_indexed, IndexedPosterior, PosteriorModel, WitnessCheck,
};
pub use model::{
    parameter_point_of, validate_model, Circumstance, CircumstanceModel, Measurement, Observation,
    ParameterPoint, ProbVector, Violation,
};
pub use rational::Rational;
