//! Built-in example models: the four-tosser coin and the two-button ball
//! box, plus the geometry of the box's parameter-point set.
//!
//! # Geometry of the box model's point set
//!
//! For the box with `2N` balls, each class point projects to a pair
//! `(qLa, qN1)` of letter-`a` and number-`1` probabilities. Enumeration
//! (exhaustively cross-checked against a brute force over the actual ball
//! subsets for `N ≤ 3`) certifies that every reachable point satisfies
//!
//! ```text
//! |qLa − 1/2| + |qN1 − 1/2| ≤ 1/2,
//! ```
//!
//! equivalently `max(qL) + max(qN) ≤ 3/2` in terms of the two
//! distributions' largest entries — the closed rhombus with vertices
//! (0, 1/2), (1/2, 0), (1, 1/2), (1/2, 1). The bound is tight: corner
//! points such as `qLa = 1, qN1 = 1/2` are already reachable at `N = 1`.
//! [`in_gamma_infinity`] implements this certified relation; the point sets
//! fill the rhombus densely as `N` grows.

use num_bigint::{BigInt, BigUint};

use crate::error::Error;
use crate::indexing::index_by_plausibility;
use crate::model::{Circumstance, CircumstanceModel, Measurement, ProbVector};
use crate::rational::Rational;

/// Default cap on the ball parameter `N`; keeps class counts at most 2113.
/// Overridable via [`gen_balls_with_cap`].
pub const DEFAULT_MAX_N: u32 = 32;

/// The numbers of `a1`-, `a2`-, `b1`-, `b2`-marked balls left in the chest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Composition {
    pub alpha: u32,
    pub beta: u32,
    pub gamma: u32,
    pub delta: u32,
}

impl Composition {
    /// All compositions for a given `N`: quadruples summing to `2N` with
    /// every count at most `N`, in ascending lexicographic order.
    pub fn enumerate(n: u32) -> Vec<Composition> {
        let total = 2 * n;
        let mut out = Vec::new();
        for alpha in 0..=n.min(total) {
            for beta in 0..=n.min(total - alpha) {
                for gamma in 0..=n.min(total - alpha - beta) {
                    let delta = total - alpha - beta - gamma;
                    if delta <= n {
                        out.push(Composition {
                            alpha,
                            beta,
                            gamma,
                            delta,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn id(&self) -> String {
        format!(
            "{}a1-{}a2-{}b1-{}b2",
            self.alpha, self.beta, self.gamma, self.delta
        )
    }

    pub fn label(&self) -> String {
        format!(
            "a1:{} a2:{} b1:{} b2:{} left in the chest",
            self.alpha, self.beta, self.gamma, self.delta
        )
    }
}

/// One projected class point of the box model: the letter-`a` and
/// number-`1` probabilities, the class weight, and the member count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaPoint {
    pub q_letter_a: Rational,
    pub q_number_1: Rational,
    pub weight: Rational,
    pub members: usize,
}

/// Binomial coefficient `C(n, k)`.
fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::from(0u8);
    }
    let k = k.min(n - k);
    let mut result = BigUint::from(1u8);
    for j in 0..k {
        result = result * BigUint::from(n - j) / BigUint::from(j + 1);
    }
    result
}

/// The coin-toss context: one `toss` measurement and the four possible
/// tossers, equally plausible, two of whom force `head`.
pub fn gen_coin() -> CircumstanceModel {
    let head_for_sure = || ProbVector::new(vec![Rational::one(), Rational::zero()]);
    let fair = || ProbVector::uniform(2);

    let mut model = CircumstanceModel::new("coin");
    model
        .measurements
        .push(Measurement::new("toss", ["head", "tail"]));
    let quarter = Rational::new(1, 4);
    let people: [(&str, &str, ProbVector); 4] = [
        (
            "Cecily",
            "a magician who always produces head",
            head_for_sure(),
        ),
        ("Gwendolen", "an unskilled tosser", fair()),
        ("Jack", "about whom nothing is known", fair()),
        ("Algernon", "carries a double-headed coin", head_for_sure()),
    ];
    for (id, label, row) in people {
        model.circumstances.push(
            Circumstance::new(id, quarter.clone())
                .with_label(format!("{id} tossed the coin; {label}"))
                .with_table("toss", row),
        );
    }
    model
}

/// The ball-box context for a chest of `2n` balls drawn from `4n` (with
/// `n` of each of the four marks), using [`DEFAULT_MAX_N`] as the cap.
pub fn gen_balls(n: u32) -> Result<CircumstanceModel, Error> {
    gen_balls_with_cap(n, DEFAULT_MAX_N)
}

/// As [`gen_balls`] with an explicit cap on `n`.
///
/// One circumstance per composition of the remaining balls. The
/// equally-plausible fine-grained hypotheses are the `C(4n, 2n)` concrete
/// ball subsets, of which `C(n,α)C(n,β)C(n,γ)C(n,δ)` realize the
/// composition `(α,β,γ,δ)`; the coarse-grained weights are those counts
/// over `C(4n, 2n)`. Conditional tables come from counting marks:
/// `q(Letter=a) = (α+β)/2n` and `q(Number=1) = (α+γ)/2n`.
pub fn gen_balls_with_cap(n: u32, cap: u32) -> Result<CircumstanceModel, Error> {
    if n == 0 || n > cap {
        return Err(Error::BallsOutOfRange { n, cap });
    }
    let two_n = BigInt::from(2 * n);
    let total_subsets = BigInt::from(binomial(4 * n, 2 * n));

    let mut model = CircumstanceModel::new(format!("balls-n{n}"));
    model
        .measurements
        .push(Measurement::new("Letter", ["a", "b"]));
    model
        .measurements
        .push(Measurement::new("Number", ["1", "2"]));

    for c in Composition::enumerate(n) {
        let count = binomial(n, c.alpha)
            * binomial(n, c.beta)
            * binomial(n, c.gamma)
            * binomial(n, c.delta);
        let weight = Rational::from_big(BigInt::from(count), total_subsets.clone());

        let q_a = Rational::from_big(BigInt::from(c.alpha + c.beta), two_n.clone());
        let q_1 = Rational::from_big(BigInt::from(c.alpha + c.gamma), two_n.clone());
        let letter = ProbVector::new(vec![q_a.clone(), Rational::one() - q_a]);
        let number = ProbVector::new(vec![q_1.clone(), Rational::one() - q_1]);

        model.circumstances.push(
            Circumstance::new(c.id(), weight)
                .with_label(c.label())
                .with_table("Letter", letter)
                .with_table("Number", number),
        );
    }
    Ok(model)
}

/// Projects the box model's equivalence classes to `(qLa, qN1)` points
/// with their weights and member counts, sorted lexicographically.
pub fn gamma_points(n: u32) -> Result<Vec<GammaPoint>, Error> {
    gamma_points_with_cap(n, DEFAULT_MAX_N)
}

/// As [`gamma_points`] with an explicit cap.
pub fn gamma_points_with_cap(n: u32, cap: u32) -> Result<Vec<GammaPoint>, Error> {
    let model = gen_balls_with_cap(n, cap)?;
    let indexed = index_by_plausibility(&model)?;
    let mut points: Vec<GammaPoint> = indexed
        .classes
        .iter()
        .map(|class| GammaPoint {
            q_letter_a: class.point.component(0).unwrap().get(0).unwrap().clone(),
            q_number_1: class.point.component(1).unwrap().get(0).unwrap().clone(),
            weight: class.weight.clone(),
            members: class.members.len(),
        })
        .collect();
    points.sort_by(|a, b| (&a.q_letter_a, &a.q_number_1).cmp(&(&b.q_letter_a, &b.q_number_1)));
    Ok(points)
}

/// Number of plausibility-indexed classes of the box model; equals
/// `n² + (n+1)²`.
pub fn count_classes(n: u32) -> Result<usize, Error> {
    Ok(gamma_points(n)?.len())
}

/// Membership test for the limiting point set of the box model: true iff
/// the two distributions' largest entries sum to at most 3/2 (see the
/// module notes for why 3/2 is the certified bound).
///
/// Both arguments must be 2-outcome distributions.
pub fn in_gamma_infinity(q_letter: &ProbVector, q_number: &ProbVector) -> Result<bool, Error> {
    for v in [q_letter, q_number] {
        if v.len() != 2 {
            return Err(Error::WrongArity(v.len()));
        }
    }
    let sum = q_letter.max_entry() + q_number.max_entry();
    Ok(sum <= Rational::new(3, 2))
}
