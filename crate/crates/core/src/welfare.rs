//! Tight minimal lower contour sets and the guaranteed welfare bound.
//!
//! For a target `x`, the weak lower contour indicator `s` must contain `x`
//! and be closed under revealed comparisons: if `s(c(B_i)) = 1` and
//! `δ(i, y) = 1` then `s(y) = 1`. Together with the rationalizability
//! constraints this makes the minimal `Σ s - 1` exactly the smallest set of
//! alternatives that every admissible rationalization must put below `x`.
//! The bound `W` is the largest of these minima over the universe.

use thiserror::Error;

use crate::altset::AltSet;
use crate::model::{ChoiceDataset, PreferenceOrder, ProfileError, ThresholdProfile, Witness};
use crate::solver::search::{Conflict, Engine, State};
use crate::solver::{compile, ConstraintProgram};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WelfareError {
    #[error("data is not rationalizable at this threshold profile")]
    NotRationalizable(Conflict),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("alternative {0} is not in the universe")]
    UnknownAlternative(usize),
}

/// The minimization problem for one target alternative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContourProgram {
    pub target: usize,
    pub base: ConstraintProgram,
    /// `(i, y)`: `s(c(B_i)) ∧ δ(i, y) ⟹ s(y)`.
    pub propagation_rules: Vec<(usize, usize)>,
}

impl ContourProgram {
    pub fn new(base: ConstraintProgram, target: usize) -> Self {
        let propagation_rules = base
            .budgets
            .iter()
            .zip(&base.choices)
            .enumerate()
            .flat_map(|(i, (b, &c))| b.without(c).iter().map(move |y| (i, y)))
            .collect();
        ContourProgram { target, base, propagation_rules }
    }

    /// Checks `(attention, s)` against the propagation rules; `s` is the weak
    /// contour (it contains the target).
    pub fn is_closed(&self, attention: &[AltSet], weak_contour: AltSet) -> bool {
        weak_contour.contains(self.target)
            && self.propagation_rules.iter().all(|&(i, y)| {
                !(weak_contour.contains(self.base.choices[i]) && attention[i].contains(y))
                    || weak_contour.contains(y)
            })
    }
}

/// Minimal strict lower contour of one alternative and a witness realizing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContourBound {
    pub alternative: usize,
    pub size: usize,
    pub lower_contour: AltSet,
    /// Rationalizes the data; its preference puts exactly `lower_contour`
    /// below the alternative.
    pub witness: Witness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WelfareReport {
    /// One entry per alternative, indexed by id.
    pub per_alternative: Vec<ContourBound>,
    pub bound: usize,
    /// Lowest id attaining `bound`.
    pub argmax: usize,
}

struct Prepared {
    program: ConstraintProgram,
    root: State,
    feasible: State,
}

fn prepare(data: &ChoiceDataset, profile: &ThresholdProfile) -> Result<Prepared, WelfareError> {
    let program = compile(data, profile)?;
    let mut engine = Engine::new(&program);
    let root = engine.root().map_err(WelfareError::NotRationalizable)?;
    let feasible = engine
        .find_feasible(root.clone())
        .ok_or_else(|| WelfareError::NotRationalizable(engine.conflict_summary()))?;
    Ok(Prepared { program, root, feasible })
}

fn bound_for(p: &Prepared, x: usize) -> ContourBound {
    let mut engine = Engine::new(&p.program);
    let chosen = p.program.choices.contains(&x);
    let state = if chosen {
        engine.minimize_contour(p.root.clone(), x, p.feasible.clone())
    } else {
        // Only chosen alternatives have outgoing revealed edges.
        p.feasible.clone()
    };
    let contour = state.graph.descendants(x);
    // Everything outside the contour goes above x; this closes no cycle since
    // x reaches none of those alternatives.
    let mut tight = state.graph.clone();
    for y in AltSet::full(p.program.universe_size).difference(contour).without(x).iter() {
        tight.add_edge(y, x).expect("edges into x cannot close a cycle");
    }
    let order = PreferenceOrder::from_ranking(tight.topological_order())
        .expect("topological order is a permutation");
    ContourBound {
        alternative: x,
        size: contour.len(),
        lower_contour: contour,
        witness: engine.witness(&state, order),
    }
}

/// Smallest strict lower contour of `x` over all rationalizations.
pub fn min_lower_contour(
    data: &ChoiceDataset,
    profile: &ThresholdProfile,
    x: usize,
) -> Result<ContourBound, WelfareError> {
    if x >= data.universe_size() {
        return Err(WelfareError::UnknownAlternative(x));
    }
    let p = prepare(data, profile)?;
    Ok(bound_for(&p, x))
}

pub fn guaranteed_welfare_bound(
    data: &ChoiceDataset,
    profile: &ThresholdProfile,
) -> Result<WelfareReport, WelfareError> {
    let p = prepare(data, profile)?;
    let per_alternative: Vec<ContourBound> =
        (0..data.universe_size()).map(|x| bound_for(&p, x)).collect();
    let bound = per_alternative.iter().map(|b| b.size).max().unwrap_or(0);
    let argmax = per_alternative.iter().position(|b| b.size == bound).unwrap_or(0);
    Ok(WelfareReport { per_alternative, bound, argmax })
}
