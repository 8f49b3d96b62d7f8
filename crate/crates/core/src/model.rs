//! Domain types shared by every analysis: alternatives, budgets, choice
//! datasets, threshold profiles, preference orders and witnesses.
//!
//! Everything here is immutable once constructed. A [`ChoiceDataset`] can only
//! be obtained through validation, so downstream code may rely on its
//! invariants: every choice lies in its budget, budgets are non-empty subsets
//! of the universe, and no two observations share a member set.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::altset::{AltSet, MAX_ALTERNATIVES};

/// An element of the finite universe. `id` is a dense index `0..|X|`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alternative {
    pub id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Alternative {
    pub fn new(id: usize, label: impl Into<String>) -> Self {
        Alternative { id, label: Some(label.into()) }
    }

    pub fn unlabeled(id: usize) -> Self {
        Alternative { id, label: None }
    }

    pub fn display(&self) -> String {
        match &self.label {
            Some(l) => l.clone(),
            None => format!("#{}", self.id),
        }
    }
}

/// A non-empty menu of alternatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Budget {
    members: AltSet,
    size: usize,
}

impl Budget {
    /// Returns `None` for the empty set.
    pub fn new(members: AltSet) -> Option<Self> {
        if members.is_empty() {
            None
        } else {
            Some(Budget { members, size: members.len() })
        }
    }

    pub fn members(&self) -> AltSet {
        self.members
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, id: usize) -> bool {
        self.members.contains(id)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Observation {
    pub budget: Budget,
    pub choice: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("observation {index}: chosen alternative {choice} is not in the budget")]
    ChoiceNotInBudget { index: usize, choice: String },
    #[error("observation {index}: budget repeats observation {first} with a different choice")]
    ConflictingDuplicateBudget { index: usize, first: usize },
    #[error("observation {index}: empty budget")]
    EmptyBudget { index: usize },
    #[error("observation {index}: alternative {alternative} is not in the universe")]
    UnknownAlternative { index: usize, alternative: String },
    #[error("universe has {size} alternatives; at most {MAX_ALTERNATIVES} are supported")]
    UniverseTooLarge { size: usize },
    #[error("universe entry {index} is malformed: {reason}")]
    BadUniverse { index: usize, reason: String },
}

/// A subject's observed choices over a finite universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChoiceDataset {
    universe: Vec<Alternative>,
    observations: Vec<Observation>,
    by_members: HashMap<AltSet, usize>,
}

impl ChoiceDataset {
    /// Validates raw `(budget members, choice)` pairs against `universe`.
    ///
    /// Identical duplicates are dropped (the first occurrence is kept); a
    /// repeated member set with a different choice is an error. Error indices
    /// refer to positions in `raw`.
    pub fn validate(
        universe: Vec<Alternative>,
        raw: impl IntoIterator<Item = (Vec<usize>, usize)>,
    ) -> Result<Self, ValidationError> {
        check_universe(&universe)?;
        let n = universe.len();
        let label = |id: usize| {
            universe.get(id).map(Alternative::display).unwrap_or_else(|| format!("#{id}"))
        };
        let mut observations = Vec::new();
        let mut by_members = HashMap::new();
        let mut raw_index_of = Vec::new();
        for (index, (members, choice)) in raw.into_iter().enumerate() {
            if members.is_empty() {
                return Err(ValidationError::EmptyBudget { index });
            }
            let mut set = AltSet::EMPTY;
            for &m in &members {
                if m >= n {
                    return Err(ValidationError::UnknownAlternative {
                        index,
                        alternative: label(m),
                    });
                }
                set.insert(m);
            }
            if choice >= n {
                return Err(ValidationError::UnknownAlternative {
                    index,
                    alternative: label(choice),
                });
            }
            if !set.contains(choice) {
                return Err(ValidationError::ChoiceNotInBudget { index, choice: label(choice) });
            }
            if let Some(&existing) = by_members.get(&set) {
                let prev: &Observation = &observations[existing];
                if prev.choice != choice {
                    return Err(ValidationError::ConflictingDuplicateBudget {
                        index,
                        first: raw_index_of[existing],
                    });
                }
                continue;
            }
            by_members.insert(set, observations.len());
            raw_index_of.push(index);
            observations.push(Observation { budget: Budget::new(set).unwrap(), choice });
        }
        Ok(ChoiceDataset { universe, observations, by_members })
    }

    /// Validates label-based observations; the universe is every label in
    /// order of first appearance.
    pub fn from_labels<S: AsRef<str>>(raw: &[(&[S], S)]) -> Result<Self, ValidationError> {
        let mut labels: Vec<String> = Vec::new();
        for (budget, choice) in raw {
            for l in budget.iter().chain(std::iter::once(choice)) {
                if !labels.iter().any(|x| x == l.as_ref()) {
                    labels.push(l.as_ref().to_string());
                }
            }
        }
        Self::from_labels_in(&labels, raw)
    }

    /// Validates label-based observations against a fixed label universe.
    pub fn from_labels_in<L: AsRef<str>, S: AsRef<str>>(
        universe: &[L],
        raw: &[(&[S], S)],
    ) -> Result<Self, ValidationError> {
        let universe: Vec<Alternative> = universe
            .iter()
            .enumerate()
            .map(|(i, l)| Alternative::new(i, l.as_ref()))
            .collect();
        let lookup: HashMap<&str, usize> = universe
            .iter()
            .map(|a| (a.label.as_deref().unwrap(), a.id))
            .collect();
        let mut converted = Vec::with_capacity(raw.len());
        for (index, (budget, choice)) in raw.iter().enumerate() {
            let resolve = |l: &S| {
                lookup.get(l.as_ref()).copied().ok_or_else(|| {
                    ValidationError::UnknownAlternative {
                        index,
                        alternative: l.as_ref().to_string(),
                    }
                })
            };
            let members = budget.iter().map(resolve).collect::<Result<Vec<_>, _>>()?;
            converted.push((members, resolve(choice)?));
        }
        Self::validate(universe, converted)
    }

    pub fn universe(&self) -> &[Alternative] {
        &self.universe
    }

    pub fn universe_size(&self) -> usize {
        self.universe.len()
    }

    pub fn universe_set(&self) -> AltSet {
        AltSet::full(self.universe.len())
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn budget(&self, i: usize) -> AltSet {
        self.observations[i].budget.members()
    }

    pub fn choice(&self, i: usize) -> usize {
        self.observations[i].choice
    }

    /// Index of the observation whose budget is exactly `members`.
    pub fn index_of(&self, members: AltSet) -> Option<usize> {
        self.by_members.get(&members).copied()
    }

    /// The choice on `members`: observed, or forced when `members` is a singleton.
    pub fn choice_on(&self, members: AltSet) -> Option<usize> {
        if members.len() == 1 {
            return members.first();
        }
        self.index_of(members).map(|i| self.observations[i].choice)
    }

    pub fn id_of(&self, label: &str) -> Option<usize> {
        self.universe.iter().position(|a| a.label.as_deref() == Some(label))
    }

    pub fn label(&self, id: usize) -> String {
        self.universe.get(id).map(Alternative::display).unwrap_or_else(|| format!("#{id}"))
    }

    pub fn max_budget_size(&self) -> usize {
        self.observations.iter().map(|o| o.budget.size()).max().unwrap_or(0)
    }

    /// True when every subset of the universe with at least two members is
    /// observed (singletons carry no information and need not be listed).
    pub fn is_complete_domain(&self) -> bool {
        let n = self.universe.len();
        if n >= 24 {
            return false;
        }
        let needed = (1usize << n) - n - 1;
        let have = self.observations.iter().filter(|o| o.budget.size() >= 2).count();
        have == needed
    }

    /// Raw form suitable for re-validation.
    pub fn to_raw(&self) -> Vec<(Vec<usize>, usize)> {
        self.observations
            .iter()
            .map(|o| (o.budget.members().to_vec(), o.choice))
            .collect()
    }
}

fn check_universe(universe: &[Alternative]) -> Result<(), ValidationError> {
    if universe.len() > MAX_ALTERNATIVES {
        return Err(ValidationError::UniverseTooLarge { size: universe.len() });
    }
    for (i, a) in universe.iter().enumerate() {
        if a.id != i {
            return Err(ValidationError::BadUniverse {
                index: i,
                reason: format!("id {} is not dense (expected {i})", a.id),
            });
        }
        if let Some(l) = &a.label {
            if universe[..i].iter().any(|b| b.label.as_ref() == Some(l)) {
                return Err(ValidationError::BadUniverse {
                    index: i,
                    reason: format!("duplicate label {l:?}"),
                });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("threshold for observation {index} must be at least 1")]
    ZeroThreshold { index: usize },
    #[error("per-budget profile lists {found} thresholds but the dataset has {expected} observations")]
    LengthMismatch { expected: usize, found: usize },
}

/// Minimum consideration-set size, uniform or per observed budget.
///
/// The requirement actually imposed on observation `i` is always
/// `min(k_i, |B_i|)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdProfile {
    Uniform(usize),
    /// Indexed by observation index.
    PerBudget(Vec<usize>),
}

impl ThresholdProfile {
    /// Clamped requirement per observation.
    pub fn requirements(&self, data: &ChoiceDataset) -> Result<Vec<usize>, ProfileError> {
        match self {
            ThresholdProfile::Uniform(k) => {
                if *k == 0 {
                    return Err(ProfileError::ZeroThreshold { index: 0 });
                }
                Ok(data.observations().iter().map(|o| (*k).min(o.budget.size())).collect())
            }
            ThresholdProfile::PerBudget(ks) => {
                if ks.len() != data.len() {
                    return Err(ProfileError::LengthMismatch {
                        expected: data.len(),
                        found: ks.len(),
                    });
                }
                ks.iter()
                    .zip(data.observations())
                    .enumerate()
                    .map(|(index, (&k, o))| {
                        if k == 0 {
                            Err(ProfileError::ZeroThreshold { index })
                        } else {
                            Ok(k.min(o.budget.size()))
                        }
                    })
                    .collect()
            }
        }
    }

    /// Pointwise `k - 1` (floored at 1).
    pub fn relaxed(&self) -> ThresholdProfile {
        match self {
            ThresholdProfile::Uniform(k) => ThresholdProfile::Uniform(k.saturating_sub(1).max(1)),
            ThresholdProfile::PerBudget(ks) => {
                ThresholdProfile::PerBudget(ks.iter().map(|k| k.saturating_sub(1).max(1)).collect())
            }
        }
    }
}

impl fmt::Display for ThresholdProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdProfile::Uniform(k) => write!(f, "|Γ| ≥ {k}"),
            ThresholdProfile::PerBudget(ks) => {
                let parts: Vec<String> = ks.iter().map(|k| k.to_string()).collect();
                write!(f, "|Γ| ≥ k_i [{}]", parts.join(","))
            }
        }
    }
}

/// A strict total order on the universe; `ranking[0]` is the best alternative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PreferenceOrder {
    ranking: Vec<usize>,
    position: Vec<usize>,
}

impl PreferenceOrder {
    /// Returns `None` unless `ranking` is a permutation of `0..ranking.len()`.
    pub fn from_ranking(ranking: Vec<usize>) -> Option<Self> {
        let n = ranking.len();
        let mut position = vec![usize::MAX; n];
        for (pos, &a) in ranking.iter().enumerate() {
            if a >= n || position[a] != usize::MAX {
                return None;
            }
            position[a] = pos;
        }
        Some(PreferenceOrder { ranking, position })
    }

    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    /// `a ≻ b`.
    pub fn prefers(&self, a: usize, b: usize) -> bool {
        self.position[a] < self.position[b]
    }

    pub fn position(&self, a: usize) -> usize {
        self.position[a]
    }

    pub fn best_in(&self, set: AltSet) -> Option<usize> {
        set.iter().min_by_key(|&a| self.position.get(a).copied().unwrap_or(usize::MAX))
    }

    /// `{y : a ≻ y}`.
    pub fn lower_contour(&self, a: usize) -> AltSet {
        self.ranking[self.position[a] + 1..].iter().copied().collect()
    }
}

/// A preference order plus one consideration set per observation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Witness {
    pub preference: PreferenceOrder,
    pub attention: Vec<AltSet>,
}

impl Witness {
    /// `{(c(B_i), y) : y ∈ attention_i, y ≠ c(B_i)}`, closed transitively;
    /// returns the descendants of `x`.
    pub fn revealed_lower_contour(&self, data: &ChoiceDataset, x: usize) -> AltSet {
        let mut succ = vec![AltSet::EMPTY; data.universe_size()];
        for (i, att) in self.attention.iter().enumerate() {
            let c = data.choice(i);
            succ[c] = succ[c].union(att.without(c));
        }
        let mut seen = AltSet::EMPTY;
        let mut stack = vec![x];
        while let Some(u) = stack.pop() {
            for v in succ[u].iter() {
                if !seen.contains(v) {
                    seen.insert(v);
                    stack.push(v);
                }
            }
        }
        seen.without(x)
    }
}

/// Checks every witness clause against `data` and `profile`; malformed
/// witnesses yield `false`.
pub fn verify_witness(data: &ChoiceDataset, profile: &ThresholdProfile, w: &Witness) -> bool {
    let Ok(required) = profile.requirements(data) else {
        return false;
    };
    if w.preference.len() != data.universe_size() || w.attention.len() != data.len() {
        return false;
    }
    for (i, obs) in data.observations().iter().enumerate() {
        let att = w.attention[i];
        if !att.is_subset(obs.budget.members())
            || !att.contains(obs.choice)
            || w.preference.best_in(att) != Some(obs.choice)
            || att.len() < required[i]
        {
            return false;
        }
    }
    let obs = data.observations();
    for i in 0..obs.len() {
        for j in i + 1..obs.len() {
            let (bi, bj) = (obs[i].budget.members(), obs[j].budget.members());
            let common = bi.intersection(bj);
            if obs[i].choice != obs[j].choice
                && common.contains(obs[i].choice)
                && common.contains(obs[j].choice)
                && !w.attention[i].intersects(bi.difference(bj))
                && !w.attention[j].intersects(bj.difference(bi))
            {
                return false;
            }
        }
    }
    true
}
