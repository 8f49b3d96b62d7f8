//! Monte Carlo goodness of fit: pass rates, Bronars and bootstrap power,
//! predictive success and exact binomial intervals.

mod stats;

use std::collections::HashMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::altset::AltSet;
use crate::model::{Alternative, ChoiceDataset, ProfileError, ThresholdProfile, ValidationError};
use crate::solver::solve_rationalizability;

pub use stats::{clopper_pearson, describe, Summary};

pub const DEFAULT_RANDOM_SUBJECTS: usize = 1000;
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomMethod {
    /// Uniform choice within each budget.
    Bronars,
    /// Per-budget empirical choice frequencies of the real subjects.
    Bootstrap,
}

impl RandomMethod {
    fn stream_tag(self) -> u64 {
        match self {
            RandomMethod::Bronars => 1,
            RandomMethod::Bootstrap => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PowerError {
    #[error("bootstrap power needs reference subjects")]
    MissingReference,
    #[error("no reference subject observed design budget {budget}")]
    EmptyReferenceForBudget { budget: usize },
    #[error("reference subject {subject} observed a budget outside the design")]
    OffDesign { subject: usize },
    #[error("invalid argument: {0}")]
    Domain(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomSubjectSpec {
    pub method: RandomMethod,
    pub universe: Vec<Alternative>,
    pub design: Vec<AltSet>,
    pub n_subjects: usize,
    pub seed: u64,
}

/// Subject `i` draws from the ChaCha stream `(seed, method, i)`, so output is
/// independent of scheduling.
fn subject_rng(seed: u64, method: RandomMethod, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((method.stream_tag() << 48) | i as u64);
    rng
}

/// Observed alternatives and their sampling weights, per design budget.
type ChoiceTable = Vec<(Vec<usize>, WeightedIndex<u32>)>;

fn empirical(design: &[AltSet], reference: &[ChoiceDataset]) -> Result<ChoiceTable, PowerError> {
    let position: HashMap<AltSet, usize> = design.iter().enumerate().map(|(j, b)| (*b, j)).collect();
    let mut counts: Vec<HashMap<usize, u32>> = vec![HashMap::new(); design.len()];
    for (s, d) in reference.iter().enumerate() {
        for o in d.observations() {
            let j = *position
                .get(&o.budget.members())
                .ok_or(PowerError::OffDesign { subject: s })?;
            *counts[j].entry(o.choice).or_default() += 1;
        }
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(j, c)| {
            let mut pairs: Vec<(usize, u32)> = c.into_iter().collect();
            pairs.sort_unstable();
            let (alts, weights): (Vec<usize>, Vec<u32>) = pairs.into_iter().unzip();
            let dist = WeightedIndex::new(&weights)
                .map_err(|_| PowerError::EmptyReferenceForBudget { budget: j })?;
            Ok((alts, dist))
        })
        .collect()
}

/// Random subjects observing every design budget, in design order.
pub fn generate_random_subjects(
    spec: &RandomSubjectSpec,
    reference: Option<&[ChoiceDataset]>,
) -> Result<Vec<ChoiceDataset>, PowerError> {
    let tables = match spec.method {
        RandomMethod::Bronars => None,
        RandomMethod::Bootstrap => {
            let reference = reference.ok_or(PowerError::MissingReference)?;
            if reference.is_empty() {
                return Err(PowerError::MissingReference);
            }
            Some(empirical(&spec.design, reference)?)
        }
    };
    let members: Vec<Vec<usize>> = spec.design.iter().map(|b| b.to_vec()).collect();
    (0..spec.n_subjects)
        .into_par_iter()
        .map(|i| {
            let mut rng = subject_rng(spec.seed, spec.method, i);
            let raw = members.iter().enumerate().map(|(j, m)| {
                let choice = match &tables {
                    None => *m.choose(&mut rng).expect("budgets are nonempty"),
                    Some(t) => t[j].0[t[j].1.sample(&mut rng)],
                };
                (m.clone(), choice)
            });
            ChoiceDataset::validate(spec.universe.clone(), raw.collect::<Vec<_>>())
                .map_err(PowerError::from)
        })
        .collect()
}

/// Re-indexes a design-level profile onto one subject's observations.
pub fn profile_for_subject(
    profile: &ThresholdProfile,
    design: &[AltSet],
    data: &ChoiceDataset,
) -> Result<ThresholdProfile, PowerError> {
    match profile {
        ThresholdProfile::Uniform(_) => Ok(profile.clone()),
        ThresholdProfile::PerBudget(ks) => {
            if ks.len() != design.len() {
                return Err(ProfileError::LengthMismatch { expected: design.len(), found: ks.len() }.into());
            }
            data.observations()
                .iter()
                .map(|o| {
                    design
                        .iter()
                        .position(|b| *b == o.budget.members())
                        .map(|j| ks[j])
                        .ok_or_else(|| PowerError::Domain("subject observed a budget outside the design".into()))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(ThresholdProfile::PerBudget)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rate {
    pub successes: usize,
    pub trials: usize,
    pub value: f64,
    pub ci: (f64, f64),
}

impl Rate {
    pub fn new(successes: usize, trials: usize, alpha: f64) -> Result<Rate, PowerError> {
        let ci = clopper_pearson(successes, trials, alpha)?;
        Ok(Rate { successes, trials, value: successes as f64 / trials as f64, ci })
    }
}

/// Predictive success: pass rate minus the random pass rate.
pub fn psi(pass_rate: f64, power: f64) -> f64 {
    pass_rate - power
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MethodPower {
    pub method: RandomMethod,
    pub power: Rate,
    pub psi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerRow {
    pub profile: ThresholdProfile,
    pub pass: Rate,
    pub methods: Vec<MethodPower>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerReport {
    pub rows: Vec<PowerRow>,
    pub n_real: usize,
    pub n_random: usize,
    pub seed: u64,
    pub alpha: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerConfig {
    pub methods: Vec<RandomMethod>,
    pub n_random: usize,
    pub seed: u64,
    pub alpha: f64,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig {
            methods: vec![RandomMethod::Bronars, RandomMethod::Bootstrap],
            n_random: DEFAULT_RANDOM_SUBJECTS,
            seed: 0,
            alpha: DEFAULT_ALPHA,
        }
    }
}

/// How many subjects pass at each profile.
fn pass_counts(
    subjects: &[ChoiceDataset],
    design: &[AltSet],
    profiles: &[ThresholdProfile],
) -> Result<Vec<usize>, PowerError> {
    let verdicts: Vec<Vec<bool>> = subjects
        .par_iter()
        .map(|d| {
            profiles
                .iter()
                .map(|p| {
                    let p = profile_for_subject(p, design, d)?;
                    Ok(solve_rationalizability(d, &p)?.is_feasible())
                })
                .collect::<Result<Vec<bool>, PowerError>>()
        })
        .collect::<Result<_, _>>()?;
    Ok((0..profiles.len()).map(|j| verdicts.iter().filter(|v| v[j]).count()).collect())
}

/// Pass rates of `real` and the power of every configured method at every
/// profile. Profiles are indexed by design position.
pub fn run_power_study(
    real: &[ChoiceDataset],
    design: &[AltSet],
    profiles: &[ThresholdProfile],
    config: &PowerConfig,
) -> Result<PowerReport, PowerError> {
    if real.is_empty() {
        return Err(PowerError::Domain("no real subjects".into()));
    }
    if config.n_random == 0 {
        return Err(PowerError::Domain("at least one random subject is needed".into()));
    }
    if !(config.alpha > 0.0 && config.alpha < 1.0) {
        return Err(PowerError::Domain(format!("alpha {} outside (0, 1)", config.alpha)));
    }
    let universe = real[0].universe().to_vec();
    let real_pass = pass_counts(real, design, profiles)?;
    let mut random_pass = Vec::new();
    for &method in &config.methods {
        let spec = RandomSubjectSpec {
            method,
            universe: universe.clone(),
            design: design.to_vec(),
            n_subjects: config.n_random,
            seed: config.seed,
        };
        let subjects = generate_random_subjects(&spec, Some(real))?;
        random_pass.push(pass_counts(&subjects, design, profiles)?);
    }
    let rows = profiles
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let pass = Rate::new(real_pass[j], real.len(), config.alpha)?;
            let methods = config
                .methods
                .iter()
                .zip(&random_pass)
                .map(|(&method, counts)| {
                    let power = Rate::new(counts[j], config.n_random, config.alpha)?;
                    Ok(MethodPower { method, power, psi: psi(pass.value, power.value) })
                })
                .collect::<Result<Vec<_>, PowerError>>()?;
            Ok(PowerRow { profile: p.clone(), pass, methods })
        })
        .collect::<Result<Vec<_>, PowerError>>()?;
    Ok(PowerReport { rows, n_real: real.len(), n_random: config.n_random, seed: config.seed, alpha: config.alpha })
}
