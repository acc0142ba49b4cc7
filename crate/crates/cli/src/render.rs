//! Text and JSON renderers shared by the subcommands.
//!
//! Rationals are printed as `p/q` with a decimal companion to 12
//! significant digits; the `p/q` strings are the authoritative values, the
//! decimals are display-only.

use circ_engine::{IndexedModel, Observation, ParameterPoint, ProbVector, Rational};
use serde_json::{json, Value};

pub const DECIMAL_DIGITS: usize = 12;

pub fn rational_pair(r: &Rational) -> String {
    format!("{} ({})", r, r.to_decimal(DECIMAL_DIGITS))
}

pub fn classes_text(indexed: &IndexedModel) -> String {
    let mut out = String::new();
    for class in &indexed.classes {
        out.push_str(&format!(
            "point {}  weight {}  members: {}\n",
            class.point,
            rational_pair(&class.weight),
            class.members.join(", ")
        ));
    }
    out
}

pub fn distribution_text(measurement_outcomes: &[String], dist: &ProbVector) -> String {
    let mut out = String::new();
    for (outcome, p) in measurement_outcomes.iter().zip(dist.entries()) {
        out.push_str(&format!("{outcome} {}\n", rational_pair(p)));
    }
    out
}

pub fn point_json(point: &ParameterPoint) -> Value {
    Value::Array(
        point
            .components()
            .iter()
            .map(|component| {
                Value::Array(
                    component
                        .entries()
                        .iter()
                        .map(|e| Value::String(e.to_string()))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn classes_json(indexed: &IndexedModel) -> Value {
    Value::Array(
        indexed
            .classes
            .iter()
            .map(|class| {
                json!({
                    "point": point_json(&class.point),
                    "weight": class.weight.to_string(),
                    "weight_decimal": class.weight.to_decimal(DECIMAL_DIGITS),
                    "members": class.members,
                })
            })
            .collect(),
    )
}

pub fn distribution_json(measurement_outcomes: &[String], dist: &ProbVector) -> Value {
    Value::Array(
        measurement_outcomes
            .iter()
            .zip(dist.entries())
            .map(|(outcome, p)| {
                json!({
                    "outcome": outcome,
                    "probability": p.to_string(),
                    "decimal": p.to_decimal(DECIMAL_DIGITS),
                })
            })
            .collect(),
    )
}

pub fn observations_json(observations: &[Observation]) -> Value {
    Value::Array(
        observations
            .iter()
            .map(|o| Value::String(o.to_string()))
            .collect(),
    )
}

/// Pretty JSON with a trailing newline, stable key order.
pub fn json_document(value: &Value) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serializable value");
    out.push('\n');
    out
}
