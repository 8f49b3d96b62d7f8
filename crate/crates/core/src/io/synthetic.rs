//! Synthetic studies in the shape of a budget-design experiment.
//!
//! The budget sampling scheme (size uniform in the range, then a uniform
//! member set of that size, redrawn on repeats) is a stand-in: nothing more
//! specific is known about how the original designs were drawn.

use std::collections::{BTreeMap, HashSet};

use rand::seq::{index, IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Study;
use crate::altset::{AltSet, MAX_ALTERNATIVES};
use crate::model::{Alternative, PreferenceOrder, Witness};

/// How a CLA subject's consideration sets are formed. Each subject draws a
/// salience order and considers the `t` most salient members of every budget
/// (all of them when the budget is smaller). Dropping an unconsidered
/// alternative never changes the top `t`, so this is an attention filter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttentionRule {
    /// `t = k`.
    Tight,
    /// `t` uniform in `k ..= max budget size`.
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Behavior {
    Rational,
    /// The rational choice is replaced by a uniform draw with probability ε.
    NoisyRational(f64),
    Uniform,
    Cla { k: usize, rule: AttentionRule },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub universe_size: usize,
    pub n_budgets: usize,
    /// Inclusive budget size range.
    pub size_range: (usize, usize),
    pub n_subjects: usize,
    pub behavior: Behavior,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid synthetic study parameters: {0}")]
pub struct DomainError(pub String);

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticStudy {
    pub study: Study,
    /// The generating rationalization for Rational and CLA subjects.
    pub witnesses: Vec<Option<Witness>>,
}

fn binomial(n: usize, r: usize) -> u128 {
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn check(spec: &SyntheticSpec) -> Result<(), DomainError> {
    let n = spec.universe_size;
    let (lo, hi) = spec.size_range;
    if n == 0 || n > MAX_ALTERNATIVES {
        return Err(DomainError(format!("universe size {n} outside 1..={MAX_ALTERNATIVES}")));
    }
    if lo < 2 || lo > hi || hi > n {
        return Err(DomainError(format!("size range [{lo}, {hi}] not within [2, {n}]")));
    }
    let available: u128 = (lo..=hi).map(|s| binomial(n, s)).sum();
    if spec.n_budgets as u128 > available {
        return Err(DomainError(format!(
            "{} distinct budgets requested but only {available} exist",
            spec.n_budgets
        )));
    }
    match spec.behavior {
        Behavior::NoisyRational(e) if !(0.0..=1.0).contains(&e) => {
            Err(DomainError(format!("noise probability {e} outside [0, 1]")))
        }
        Behavior::Cla { k: 0, .. } => Err(DomainError("threshold must be at least 1".into())),
        _ => Ok(()),
    }
}

/// Independent stream per subject; the design uses its own stream.
fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

const DESIGN_STREAM: u64 = u64::MAX;

fn draw_design(spec: &SyntheticSpec) -> Vec<AltSet> {
    let (lo, hi) = spec.size_range;
    let mut rng = stream(spec.seed, DESIGN_STREAM);
    let mut seen = HashSet::new();
    let mut design = Vec::with_capacity(spec.n_budgets);
    while design.len() < spec.n_budgets {
        let size = rng.random_range(lo..=hi);
        let taken = design.iter().filter(|b: &&AltSet| b.len() == size).count() as u128;
        if taken == binomial(spec.universe_size, size) {
            continue;
        }
        let set: AltSet = index::sample(&mut rng, spec.universe_size, size).into_iter().collect();
        if seen.insert(set) {
            design.push(set);
        }
    }
    design
}

fn random_order(rng: &mut ChaCha8Rng, n: usize) -> PreferenceOrder {
    let mut ranking: Vec<usize> = (0..n).collect();
    ranking.shuffle(rng);
    PreferenceOrder::from_ranking(ranking).expect("shuffle is a permutation")
}

fn top(order: &PreferenceOrder, set: AltSet, t: usize) -> AltSet {
    let mut members = set.to_vec();
    members.sort_by_key(|&a| order.position(a));
    members.into_iter().take(t).collect()
}

fn subject_choices(
    spec: &SyntheticSpec,
    design: &[AltSet],
    rng: &mut ChaCha8Rng,
) -> (Vec<usize>, Option<Witness>) {
    let n = spec.universe_size;
    match spec.behavior {
        Behavior::Uniform => {
            let choices = design
                .iter()
                .map(|b| *b.to_vec().choose(rng).expect("budgets are nonempty"))
                .collect();
            (choices, None)
        }
        Behavior::Rational => {
            let pref = random_order(rng, n);
            let choices: Vec<usize> = design.iter().map(|b| pref.best_in(*b).unwrap()).collect();
            (choices, Some(Witness { preference: pref, attention: design.to_vec() }))
        }
        Behavior::NoisyRational(eps) => {
            let pref = random_order(rng, n);
            let choices = design
                .iter()
                .map(|b| {
                    if rng.random_bool(eps) {
                        *b.to_vec().choose(rng).unwrap()
                    } else {
                        pref.best_in(*b).unwrap()
                    }
                })
                .collect();
            (choices, None)
        }
        Behavior::Cla { k, rule } => {
            let pref = random_order(rng, n);
            let salience = random_order(rng, n);
            let hi = spec.size_range.1.max(k);
            let t = match rule {
                AttentionRule::Tight => k,
                AttentionRule::Random => rng.random_range(k..=hi),
            };
            let attention: Vec<AltSet> = design.iter().map(|b| top(&salience, *b, t)).collect();
            let choices = attention.iter().map(|a| pref.best_in(*a).unwrap()).collect();
            (choices, Some(Witness { preference: pref, attention }))
        }
    }
}

/// Subjects observe every design budget; labels are `x1 … xn`.
pub fn generate_synthetic_study(spec: &SyntheticSpec) -> Result<SyntheticStudy, DomainError> {
    check(spec)?;
    let n = spec.universe_size;
    let design = draw_design(spec);
    let mut study = Study {
        universe: (0..n).map(|i| Alternative::new(i, format!("x{}", i + 1))).collect(),
        attributes: vec![BTreeMap::new(); n],
        design,
        subjects: Vec::with_capacity(spec.n_subjects),
    };
    let mut witnesses = Vec::with_capacity(spec.n_subjects);
    for s in 0..spec.n_subjects {
        let mut rng = stream(spec.seed, s as u64);
        let (choices, witness) = subject_choices(spec, &study.design, &mut rng);
        let observed: Vec<(usize, usize)> = choices.into_iter().enumerate().collect();
        study
            .push_subject(format!("s{}", s + 1), &observed)
            .expect("generated choices lie in their budgets");
        witnesses.push(witness);
    }
    Ok(SyntheticStudy { study, witnesses })
}
