//! Acceptance suite: every release criterion as one test, each printing a
//! `criterion NN PASS/FAIL` line (run with `-- --nocapture` to see them).
//!
//! All comparisons are exact rational equality; there are no tolerances
//! anywhere. The property-based criteria use a fixed-seed deterministic
//! generator so failures are reproducible.

mod common;

use circ_engine::{
    class_refinement_check, compatible, count_classes, gamma_points, gen_balls, gen_coin,
    in_gamma_infinity, index_by_expectation, index_by_plausibility, marginal, marginal_indexed,
    mixture_invariance_witness, moments, predict, predict_indexed, update, update_indexed,
    Circumstance, Observation, OutcomeValues, ParameterPoint, ProbVector, Rational,
};
use common::{
    enumerate_ball_subsets, prob_vector, random_model, random_observations, rational, reweight, Gen,
};

fn criterion(number: u32, name: &str, body: impl FnOnce() -> Result<(), String>) {
    match body() {
        Ok(()) => println!("criterion {number:02} PASS {name}"),
        Err(message) => {
            println!("criterion {number:02} FAIL {name}: {message}");
            panic!("criterion {number:02} failed: {message}");
        }
    }
}

fn expect_eq<T: PartialEq + std::fmt::Debug>(label: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{label}: got {got:?}, want {want:?}"))
    }
}

#[test]
fn criterion_01_coin_marginal() {
    criterion(1, "coin marginal is exactly (3/4, 1/4)", || {
        let got = marginal(&gen_coin(), "toss").map_err(|e| e.to_string())?;
        expect_eq("marginal(toss)", got, prob_vector(&[(3, 4), (1, 4)]))
    });
}

#[test]
fn criterion_02_coin_posterior() {
    criterion(2, "coin posterior on head is exactly (2/3, 1/3)", || {
        let posterior =
            update(&gen_coin(), &[Observation::new("toss", "head")]).map_err(|e| e.to_string())?;
        let indexed = index_by_plausibility(&posterior.model).map_err(|e| e.to_string())?;
        let sure = indexed
            .class_at(&ParameterPoint::new(vec![prob_vector(&[(1, 1), (0, 1)])]))
            .ok_or("missing class ((1, 0))")?;
        let fair = indexed
            .class_at(&ParameterPoint::new(vec![prob_vector(&[(1, 2), (1, 2)])]))
            .ok_or("missing class ((1/2, 1/2))")?;
        expect_eq("weight of ((1, 0))", sure.weight.clone(), rational(2, 3))?;
        expect_eq(
            "weight of ((1/2, 1/2))",
            fair.weight.clone(),
            rational(1, 3),
        )
    });
}

#[test]
fn criterion_03_coin_indexing() {
    criterion(
        3,
        "coin indexes into exactly two half-weight classes",
        || {
            let indexed = index_by_plausibility(&gen_coin()).map_err(|e| e.to_string())?;
            expect_eq("class count", indexed.classes.len(), 2)?;
            let fair = &indexed.classes[0];
            let sure = &indexed.classes[1];
            expect_eq(
                "fair point",
                fair.point.clone(),
                ParameterPoint::new(vec![prob_vector(&[(1, 2), (1, 2)])]),
            )?;
            expect_eq("fair weight", fair.weight.clone(), rational(1, 2))?;
            expect_eq(
                "fair members",
                fair.members.clone(),
                vec!["Gwendolen".to_string(), "Jack".to_string()],
            )?;
            expect_eq(
                "sure point",
                sure.point.clone(),
                ParameterPoint::new(vec![prob_vector(&[(1, 1), (0, 1)])]),
            )?;
            expect_eq("sure weight", sure.weight.clone(), rational(1, 2))?;
            expect_eq(
                "sure members",
                sure.members.clone(),
                vec!["Cecily".to_string(), "Algernon".to_string()],
            )
        },
    );
}

#[test]
fn criterion_04_balls_class_counts() {
    criterion(4, "class count is n^2 + (n+1)^2 for n = 1..16", || {
        let started = std::time::Instant::now();
        for n in 1..=16u32 {
            let expected = (n * n + (n + 1) * (n + 1)) as usize;
            let got = count_classes(n).map_err(|e| e.to_string())?;
            expect_eq(&format!("count_classes({n})"), got, expected)?;
        }
        let elapsed = started.elapsed();
        if elapsed > std::time::Duration::from_secs(5) {
            return Err(format!("enumeration took {elapsed:?}, budget is 5 s"));
        }
        Ok(())
    });
}

#[test]
fn criterion_05_balls_n2_class_membership() {
    criterion(
        5,
        "the ((1/2,1/2),(3/4,1/4)) class has exactly two members",
        || {
            let indexed = index_by_plausibility(&gen_balls(2).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let point = ParameterPoint::new(vec![
                prob_vector(&[(1, 2), (1, 2)]),
                prob_vector(&[(3, 4), (1, 4)]),
            ]);
            let class = indexed.class_at(&point).ok_or("class not found")?;
            let mut members = class.members.clone();
            members.sort();
            expect_eq(
                "members",
                members,
                vec!["1a1-1a2-2b1-0b2".to_string(), "2a1-0a2-1b1-1b2".to_string()],
            )
        },
    );
}

#[test]
fn criterion_06_balls_weights_oracle() {
    criterion(
        6,
        "ball weights are hypergeometric, sum to 1, match brute force",
        || {
            // Independent binomial for the closed-form check.
            fn binom(n: u64, k: u64) -> u64 {
                if k > n {
                    return 0;
                }
                let mut result = 1u64;
                for j in 0..k.min(n - k) {
                    result = result * (n - j) / (j + 1);
                }
                result
            }

            // Composition counts back out of the circumstance id,
            // e.g. "2a1-0a2-1b1-1b2" -> [2, 0, 1, 1].
            fn composition_of_id(id: &str) -> Vec<u32> {
                id.split('-')
                    .map(|part| {
                        part.chars()
                            .take_while(|ch| ch.is_ascii_digit())
                            .collect::<String>()
                            .parse::<u32>()
                            .unwrap()
                    })
                    .collect()
            }

            for n in 1..=8u32 {
                let model = gen_balls(n).map_err(|e| e.to_string())?;
                if !model.total_weight().is_one() {
                    return Err(format!("weights of n={n} sum to {}", model.total_weight()));
                }
                let denom = binom(4 * n as u64, 2 * n as u64) as i64;
                for c in &model.circumstances {
                    let numer: u64 = composition_of_id(&c.id)
                        .iter()
                        .map(|&k| binom(n as u64, k as u64))
                        .product();
                    expect_eq(
                        &format!("weight of {} at n={n}", c.id),
                        c.weight.clone(),
                        Rational::new(numer as i64, denom),
                    )?;
                }
            }

            // Brute force over concrete ball subsets for n <= 3: the weight of
            // each composition must equal the fraction of subsets realizing it.
            for n in 1..=3u32 {
                let model = gen_balls(n).map_err(|e| e.to_string())?;
                let oracle = enumerate_ball_subsets(n);
                let total = oracle.subsets.len() as i64;
                let mut covered = 0usize;
                for c in &model.circumstances {
                    let composition = composition_of_id(&c.id);
                    let realizations = oracle
                        .subsets
                        .iter()
                        .filter(|counts| counts.iter().zip(&composition).all(|(a, b)| a == b))
                        .count();
                    covered += realizations;
                    expect_eq(
                        &format!("subset count of {} at n={n}", c.id),
                        c.weight.clone(),
                        Rational::new(realizations as i64, total),
                    )?;
                }
                // The compositions partition the subsets with nothing left over.
                expect_eq(&format!("subset coverage at n={n}"), covered as i64, total)?;
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_07_mixture_invariance() {
    criterion(
        7,
        "class membership and witness are weight-invariant (200 models x 5 reweightings)",
        || {
            let mut g = Gen::new(7);
            for round in 0..200 {
                let model = random_model(&mut g);
                let base = index_by_plausibility(&model).map_err(|e| e.to_string())?;
                let base_members: Vec<Vec<String>> =
                    base.classes.iter().map(|c| c.members.clone()).collect();
                for _ in 0..5 {
                    let reweighted = reweight(&mut g, &model);
                    let indexed = index_by_plausibility(&reweighted).map_err(|e| e.to_string())?;
                    let members: Vec<Vec<String>> =
                        indexed.classes.iter().map(|c| c.members.clone()).collect();
                    if members != base_members {
                        return Err(format!(
                            "membership changed under reweighting (round {round})"
                        ));
                    }
                    for m in &reweighted.measurements {
                        let checks = mixture_invariance_witness(&reweighted, &m.id)
                            .map_err(|e| e.to_string())?;
                        if !checks.iter().all(|c| c.passed) {
                            return Err(format!(
                                "witness failed for measurement {} (round {round})",
                                m.id
                            ));
                        }
                    }
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_08_indexed_vs_raw_oracle() {
    criterion(
        8,
        "marginal/update/predict agree between raw and indexed routes (200 models)",
        || {
            let mut g = Gen::new(8);
            for round in 0..200 {
                let model = random_model(&mut g);
                let indexed = index_by_plausibility(&model).map_err(|e| e.to_string())?;

                for m in &model.measurements {
                    let raw = marginal(&model, &m.id).map_err(|e| e.to_string())?;
                    let via_classes =
                        marginal_indexed(&indexed, &m.id).map_err(|e| e.to_string())?;
                    expect_eq(
                        &format!("marginal {} (round {round})", m.id),
                        via_classes,
                        raw,
                    )?;
                }

                let obs = random_observations(&mut g, &model);
                let raw_posterior = update(&model, &obs).map_err(|e| e.to_string())?;
                let indexed_posterior =
                    update_indexed(&indexed, &obs).map_err(|e| e.to_string())?;
                expect_eq(
                    &format!("evidence (round {round})"),
                    indexed_posterior.evidence.clone(),
                    raw_posterior.evidence.clone(),
                )?;
                let reindexed =
                    index_by_plausibility(&raw_posterior.model).map_err(|e| e.to_string())?;
                expect_eq(
                    &format!("posterior classes (round {round})"),
                    indexed_posterior.model.classes,
                    reindexed.classes,
                )?;

                for target in &model.measurements {
                    if obs.iter().any(|o| o.measurement == target.id) {
                        continue;
                    }
                    let raw = predict(&model, &target.id, &obs).map_err(|e| e.to_string())?;
                    let via_classes =
                        predict_indexed(&indexed, &target.id, &obs).map_err(|e| e.to_string())?;
                    expect_eq(
                        &format!("predict {} (round {round})", target.id),
                        via_classes,
                        raw,
                    )?;
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_09_ratio_invariance() {
    criterion(
        9,
        "posterior weight ratios within each class equal prior ratios (200 models)",
        || {
            let mut g = Gen::new(9);
            for round in 0..200 {
                let model = random_model(&mut g);
                let indexed = index_by_plausibility(&model).map_err(|e| e.to_string())?;
                let obs = random_observations(&mut g, &model);
                let posterior = update(&model, &obs).map_err(|e| e.to_string())?;
                for class in &indexed.classes {
                    for (i, a) in class.members.iter().enumerate() {
                        for b in &class.members[i + 1..] {
                            let prior_a = &model.circumstance(a).unwrap().weight;
                            let prior_b = &model.circumstance(b).unwrap().weight;
                            if prior_a.is_zero() || prior_b.is_zero() {
                                continue;
                            }
                            let post_a = &posterior.model.circumstance(a).unwrap().weight;
                            let post_b = &posterior.model.circumstance(b).unwrap().weight;
                            if prior_a * post_b != prior_b * post_a {
                                return Err(format!("ratio of {a}:{b} changed (round {round})"));
                            }
                        }
                    }
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_10_compatibility_soundness() {
    criterion(
        10,
        "class splits stay moment-compatible and predict-equivalent (50 models)",
        || {
            let mut g = Gen::new(10);
            let mut exercised = 0u32;
            for round in 0..50 {
                let model = random_model(&mut g);
                // Split one positive-weight circumstance into two parallel
                // copies at the same point.
                let Some(split_at) = model.circumstances.iter().position(|c| !c.weight.is_zero())
                else {
                    continue;
                };
                let mut split = model.clone();
                let original = split.circumstances[split_at].clone();
                let third = &original.weight * &rational(1, 3);
                let rest = &original.weight - &third;
                split.circumstances[split_at] = Circumstance {
                    id: format!("{}-p", original.id),
                    label: original.label.clone(),
                    weight: third,
                    tables: original.tables.clone(),
                };
                split.circumstances.insert(
                    split_at + 1,
                    Circumstance {
                        id: format!("{}-q", original.id),
                        label: original.label,
                        weight: rest,
                        tables: original.tables,
                    },
                );

                let a = index_by_plausibility(&model).map_err(|e| e.to_string())?;
                let b = index_by_plausibility(&split).map_err(|e| e.to_string())?;
                let ma = moments(&a);
                let mb = moments(&b);
                let verdict = compatible(&ma, &mb).map_err(|e| e.to_string())?;
                if !verdict.is_compatible() {
                    return Err(format!("split model lost compatibility (round {round})"));
                }

                // Every observation set with positive evidence must predict
                // identically through both analyses.
                let all_obs_sets = observation_sets(&model);
                for obs in &all_obs_sets {
                    if !obs.is_empty() {
                        let ea = update(&model, obs);
                        let eb = update(&split, obs);
                        match (ea, eb) {
                            (Ok(pa), Ok(pb)) => {
                                if pa.evidence != pb.evidence {
                                    return Err(format!("evidence differs (round {round})"));
                                }
                            }
                            (Err(_), Err(_)) => continue,
                            _ => return Err(format!("evidence zero-ness differs (round {round})")),
                        }
                    }
                    for target in &model.measurements {
                        if obs.iter().any(|o| o.measurement == target.id) {
                            continue;
                        }
                        match (
                            predict(&model, &target.id, obs),
                            predict(&split, &target.id, obs),
                        ) {
                            (Ok(pa), Ok(pb)) => {
                                exercised += 1;
                                if pa != pb {
                                    return Err(format!(
                                        "prediction for {} differs (round {round})",
                                        target.id
                                    ));
                                }
                            }
                            (Err(_), Err(_)) => continue,
                            _ => {
                                return Err(format!(
                                    "prediction feasibility differs (round {round})"
                                ))
                            }
                        }
                    }
                }
            }
            if exercised == 0 {
                return Err("no prediction pair was ever exercised".to_string());
            }
            Ok(())
        },
    );
}

/// All observation sets over distinct measurements, including the empty
/// one. Tiny models only.
fn observation_sets(model: &circ_engine::CircumstanceModel) -> Vec<Vec<Observation>> {
    let mut sets: Vec<Vec<Observation>> = vec![Vec::new()];
    for m in &model.measurements {
        let mut extended = Vec::new();
        for set in &sets {
            for outcome in &m.outcomes {
                let mut next = set.clone();
                next.push(Observation::new(m.id.clone(), outcome.clone()));
                extended.push(next);
            }
        }
        sets.extend(extended);
    }
    sets
}

#[test]
fn criterion_11_dsl_round_trip_and_fuzz() {
    criterion(
        11,
        "parse/serialize round-trips 200 models; 10k fuzz inputs never misbehave",
        || {
            let mut g = Gen::new(11);
            for round in 0..200 {
                let model = random_model(&mut g);
                let text = circ_engine::dsl::serialize(&model).map_err(|e| e.to_string())?;
                let parsed = circ_engine::dsl::parse(&text)
                    .map_err(|errors| format!("round {round}: {}", errors[0]))?;
                if parsed != model {
                    return Err(format!("round trip changed the model (round {round})"));
                }
            }

            for _ in 0..10_000 {
                let len = g.below(121) as usize;
                let bytes: Vec<u8> = (0..len).map(|_| g.below(256) as u8).collect();
                let text = String::from_utf8_lossy(&bytes);
                if let Ok(model) = circ_engine::dsl::parse(&text) {
                    if !model.is_valid() {
                        return Err("fuzz input produced an invalid model".to_string());
                    }
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_12_balls_predictive_value() {
    criterion(
        12,
        "balls n=1 predicts Number uniformly after Letter=a, matching brute force",
        || {
            // Independent oracle: enumerate the six concrete 2-ball subsets
            // and compute sum(qN1 * qLa) / sum(qLa) by counting marks.
            let oracle = enumerate_ball_subsets(1);
            let mut joint = Rational::zero();
            let mut evidence = Rational::zero();
            let per_subset = Rational::new(1, oracle.subsets.len() as i64);
            for counts in &oracle.subsets {
                let q_a = oracle.q_letter_a(counts);
                let q_1 = oracle.q_number_1(counts);
                joint = joint + &(&q_1 * &q_a) * &per_subset;
                evidence = evidence + &q_a * &per_subset;
            }
            let oracle_q1 = &joint / &evidence;
            expect_eq("oracle value", oracle_q1.clone(), rational(1, 2))?;

            let balls = gen_balls(1).map_err(|e| e.to_string())?;
            let predicted = predict(&balls, "Number", &[Observation::new("Letter", "a")])
                .map_err(|e| e.to_string())?;
            expect_eq(
                "predict(Number | Letter=a)",
                predicted,
                ProbVector::new(vec![oracle_q1.clone(), Rational::one() - oracle_q1]),
            )
        },
    );
}

#[test]
fn criterion_13_gamma_geometry() {
    criterion(
        13,
        "brute force certifies the rhombus bound; it holds for all n <= 16",
        || {
            // Brute force for n <= 3: every reachable (qLa, qN1) satisfies
            // max(qL) + max(qN) <= 3/2, and the literal <= 1 variant is
            // falsified by reachable corner points, so 3/2 is the certified
            // membership relation.
            let mut saw_sup_norm_sum_above_one = false;
            for n in 1..=3u32 {
                let oracle = enumerate_ball_subsets(n);
                for counts in &oracle.subsets {
                    let q_a = oracle.q_letter_a(counts);
                    let q_1 = oracle.q_number_1(counts);
                    let sup_l = q_a.clone().max(Rational::one() - q_a.clone());
                    let sup_n = q_1.clone().max(Rational::one() - q_1.clone());
                    let sum = &sup_l + &sup_n;
                    if sum > rational(3, 2) {
                        return Err(format!(
                            "reachable point ({q_a}, {q_1}) violates the 3/2 bound at n={n}"
                        ));
                    }
                    if sum > Rational::one() {
                        saw_sup_norm_sum_above_one = true;
                    }
                }
            }
            if !saw_sup_norm_sum_above_one {
                return Err(
                    "brute force never exceeded sup-norm sum 1; bound choice unverified"
                        .to_string(),
                );
            }

            // The certified relation holds for every class point up to n = 16.
            for n in 1..=16u32 {
                for p in gamma_points(n).map_err(|e| e.to_string())? {
                    let letter = ProbVector::new(vec![
                        p.q_letter_a.clone(),
                        Rational::one() - p.q_letter_a.clone(),
                    ]);
                    let number = ProbVector::new(vec![
                        p.q_number_1.clone(),
                        Rational::one() - p.q_number_1.clone(),
                    ]);
                    if !in_gamma_infinity(&letter, &number).map_err(|e| e.to_string())? {
                        return Err(format!(
                            "class point ({}, {}) of n={n} rejected by the membership test",
                            p.q_letter_a, p.q_number_1
                        ));
                    }
                }
            }
            Ok(())
        },
    );
}

#[test]
fn moments_equal_raw_circumstance_sums_on_random_models() {
    // Supporting property: every entry of the moment vector, computed over
    // classes, equals the same product sum computed directly over raw
    // circumstances.
    let mut g = Gen::new(13);
    for _ in 0..100 {
        let model = random_model(&mut g);
        let mv = moments(&index_by_plausibility(&model).unwrap());
        for key in mv.moments.keys() {
            let observations = key.observations(&mv.measurements);
            let mut direct = Rational::zero();
            for c in &model.circumstances {
                let mut product = c.weight.clone();
                for obs in &observations {
                    let m = model.measurement(&obs.measurement).unwrap();
                    let i = m.outcome_index(&obs.outcome).unwrap();
                    product = product * c.tables[&obs.measurement].get(i).unwrap();
                }
                direct = direct + product;
            }
            assert_eq!(mv.get(key), Some(&direct));
        }
    }
}

#[test]
fn expectation_refinement_holds_on_random_models() {
    // Supporting property: the plausibility partition always refines the
    // expectation partition, for random models and random outcome values.
    let mut g = Gen::new(14);
    for _ in 0..100 {
        let model = random_model(&mut g);
        let mut values = OutcomeValues::new();
        for m in &model.measurements {
            for o in &m.outcomes {
                values = values.set(
                    m.id.clone(),
                    o.clone(),
                    rational(g.below(9) as i64 - 4, (1 + g.below(3)) as i64),
                );
            }
        }
        let plaus = index_by_plausibility(&model).unwrap();
        let expect = index_by_expectation(&model, &values).unwrap();
        assert!(class_refinement_check(&plaus, &expect).unwrap());
    }
}

#[test]
fn evidence_factorizes_over_update_chains() {
    // Supporting property: updating on two observations in sequence
    // multiplies the evidences and matches the joint update.
    let mut g = Gen::new(15);
    let mut exercised = 0u32;
    for _ in 0..200 {
        let model = random_model(&mut g);
        if model.measurements.len() < 2 {
            continue;
        }
        let obs = random_observations(&mut g, &model);
        if obs.len() < 2 {
            continue;
        }
        let joint = update(&model, &obs).unwrap();
        let first = update(&model, &obs[..1]).unwrap();
        let second = update(&first.model, &obs[1..]).unwrap();
        assert_eq!(joint.evidence, first.evidence * second.evidence);
        assert!(joint.model.total_weight().is_one());
        assert!(second.model.total_weight().is_one());
        for (a, b) in joint
            .model
            .circumstances
            .iter()
            .zip(&second.model.circumstances)
        {
            assert_eq!(a.weight, b.weight);
        }
        exercised += 1;
    }
    assert!(
        exercised > 20,
        "too few two-observation rounds: {exercised}"
    );
}
