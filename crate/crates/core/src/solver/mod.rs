//! Exact rationalizability under k-th order limited attention.
//!
//! [`compile`] turns a dataset and threshold profile into a
//! [`ConstraintProgram`]; [`solve_rationalizability`] decides it and, when
//! feasible, returns a [`Witness`] that [`crate::verify_witness`] accepts.

mod digraph;
mod program;
pub(crate) mod search;

use rayon::prelude::*;
use thiserror::Error;

pub use digraph::PreferenceDigraph;
pub use program::{compile, CardinalityRow, ConstraintProgram, OrClause};
pub use search::Conflict;

use crate::model::{ChoiceDataset, PreferenceOrder, ProfileError, ThresholdProfile, ValidationError, Witness};
use search::Engine;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Feasible(Witness),
    Infeasible(Conflict),
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Verdict::Feasible(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Feasible(w) => Some(w),
            Verdict::Infeasible(_) => None,
        }
    }
}

pub fn solve_rationalizability(
    data: &ChoiceDataset,
    profile: &ThresholdProfile,
) -> Result<Verdict, ProfileError> {
    let program = compile(data, profile)?;
    Ok(solve_program(&program))
}

pub fn solve_program(program: &ConstraintProgram) -> Verdict {
    let mut engine = Engine::new(program);
    let root = match engine.root() {
        Ok(s) => s,
        Err(conflict) => return Verdict::Infeasible(conflict),
    };
    match engine.find_feasible(root) {
        Some(state) => {
            let order = PreferenceOrder::from_ranking(state.graph.topological_order())
                .expect("topological order is a permutation");
            Verdict::Feasible(engine.witness(&state, order))
        }
        None => Verdict::Infeasible(engine.conflict_summary()),
    }
}

/// Why a batch cell has no verdict.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CellError {
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// One verdict per `(subject, profile)`, in input order. Subjects that failed
/// validation yield an error in every cell of their row.
pub fn solve_batch(
    subjects: &[Result<ChoiceDataset, ValidationError>],
    profiles: &[ThresholdProfile],
) -> Vec<Vec<Result<Verdict, CellError>>> {
    subjects
        .par_iter()
        .map(|subject| {
            profiles
                .iter()
                .map(|p| match subject {
                    Ok(d) => solve_rationalizability(d, p).map_err(CellError::from),
                    Err(e) => Err(CellError::Validation(e.clone())),
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::verify_witness;

    fn feasible(d: &ChoiceDataset, k: usize) -> bool {
        let v = solve_rationalizability(d, &ThresholdProfile::Uniform(k)).unwrap();
        if let Verdict::Feasible(w) = &v {
            assert!(verify_witness(d, &ThresholdProfile::Uniform(k), w));
        }
        v.is_feasible()
    }

    #[test]
    fn intro_is_feasible_at_low_orders() {
        let d = fixtures::intro();
        for k in 1..=3 {
            assert!(feasible(&d, k), "k = {k}");
        }
    }

    #[test]
    fn doubleton_cycle_breaks_at_k2() {
        let d = fixtures::doubleton_cycle();
        assert!(feasible(&d, 1));
        let Verdict::Infeasible(conflict) =
            solve_rationalizability(&d, &ThresholdProfile::Uniform(2)).unwrap()
        else {
            panic!("expected infeasible");
        };
        let id = |l| d.id_of(l).unwrap();
        assert_eq!(conflict.cycle, vec![id("a"), id("b"), id("c")]);
        assert_eq!(conflict.observations, vec![0, 1, 2]);
    }

    #[test]
    fn forced_two_cycle_is_never_feasible() {
        let d = fixtures::forced_two_cycle();
        for k in 1..=4 {
            assert!(!feasible(&d, k), "k = {k}");
        }
    }

    #[test]
    fn heterogeneous_profile() {
        let d = fixtures::doubleton_cycle();
        assert!(!solve_rationalizability(&d, &ThresholdProfile::PerBudget(vec![2, 2, 2]))
            .unwrap()
            .is_feasible());
        assert!(solve_rationalizability(&d, &ThresholdProfile::PerBudget(vec![2, 2, 1]))
            .unwrap()
            .is_feasible());
    }

    #[test]
    fn batch_matrix_and_error_propagation() {
        let subjects = vec![
            Ok(fixtures::intro()),
            Ok(fixtures::doubleton_cycle()),
            ChoiceDataset::from_labels(&[(&["a"][..], "b")]),
        ];
        let profiles = [ThresholdProfile::Uniform(1), ThresholdProfile::Uniform(2)];
        let m = solve_batch(&subjects, &profiles);
        let flags: Vec<Vec<Option<bool>>> = m
            .iter()
            .map(|row| row.iter().map(|c| c.as_ref().ok().map(Verdict::is_feasible)).collect())
            .collect();
        assert_eq!(flags[0], vec![Some(true), Some(true)]);
        assert_eq!(flags[1], vec![Some(true), Some(false)]);
        assert!(matches!(m[2][0], Err(CellError::Validation(_))));
        assert!(solve_batch(&[], &profiles).is_empty());
    }

    #[test]
    fn solves_are_deterministic() {
        let d = fixtures::intro();
        let p = ThresholdProfile::Uniform(2);
        assert_eq!(solve_rationalizability(&d, &p), solve_rationalizability(&d, &p));
    }
}
