//! Compilation of a dataset into its attention constraint program.
//!
//! Variables are attendance indicators `δ(i, x)` for every observation `i`
//! and every `x ∈ B_i`. The utility rows with a large constant are not
//! materialized: for a fixed attendance assignment they are satisfiable iff
//! the digraph with an edge `c(B_i) → x` for every attended `x ≠ c(B_i)` is
//! acyclic, which is what the search maintains.

use crate::altset::AltSet;
use crate::model::{ChoiceDataset, ProfileError, ThresholdProfile};

/// At least one of `δ(first, x), x ∈ first_vars` or `δ(second, x), x ∈
/// second_vars` must be 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrClause {
    pub first: usize,
    pub first_vars: AltSet,
    pub second: usize,
    pub second_vars: AltSet,
}

impl OrClause {
    pub fn literals(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.first_vars
            .iter()
            .map(|x| (self.first, x))
            .chain(self.second_vars.iter().map(|x| (self.second, x)))
    }

    pub fn width(&self) -> usize {
        self.first_vars.len() + self.second_vars.len()
    }
}

/// `Σ_{x ∈ vars} δ(observation, x) ≥ minimum`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CardinalityRow {
    pub observation: usize,
    pub vars: AltSet,
    pub minimum: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintProgram {
    pub universe_size: usize,
    pub budgets: Vec<AltSet>,
    pub choices: Vec<usize>,
    /// Edges fixed before any search: rows whose minimum equals the budget
    /// size, and single-literal or-clauses.
    pub forced_edges: Vec<(usize, usize)>,
    pub or_clauses: Vec<OrClause>,
    pub cardinality_rows: Vec<CardinalityRow>,
}

impl ConstraintProgram {
    /// All `(observation, alternative)` pairs that carry a variable.
    pub fn delta_vars(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.budgets.iter().enumerate().flat_map(|(i, b)| b.iter().map(move |x| (i, x)))
    }

    /// `δ(i, c(B_i))` is fixed to 1.
    pub fn is_fixed_attended(&self, i: usize, x: usize) -> bool {
        self.choices[i] == x
    }
}

pub fn compile(
    data: &ChoiceDataset,
    profile: &ThresholdProfile,
) -> Result<ConstraintProgram, ProfileError> {
    let minima = profile.requirements(data)?;
    let budgets: Vec<AltSet> = data.observations().iter().map(|o| o.budget.members()).collect();
    let choices: Vec<usize> = data.observations().iter().map(|o| o.choice).collect();

    let mut or_clauses = Vec::new();
    for i in 0..budgets.len() {
        for j in i + 1..budgets.len() {
            let common = budgets[i].intersection(budgets[j]);
            if choices[i] != choices[j] && common.contains(choices[i]) && common.contains(choices[j])
            {
                or_clauses.push(OrClause {
                    first: i,
                    first_vars: budgets[i].difference(budgets[j]),
                    second: j,
                    second_vars: budgets[j].difference(budgets[i]),
                });
            }
        }
    }

    let cardinality_rows: Vec<CardinalityRow> = minima
        .iter()
        .enumerate()
        .map(|(i, &minimum)| CardinalityRow { observation: i, vars: budgets[i], minimum })
        .collect();

    let mut forced_edges = Vec::new();
    for row in &cardinality_rows {
        if row.minimum == row.vars.len() {
            let c = choices[row.observation];
            forced_edges.extend(row.vars.without(c).iter().map(|x| (c, x)));
        }
    }
    for clause in &or_clauses {
        if clause.width() == 1 {
            let (i, x) = clause.literals().next().unwrap();
            forced_edges.push((choices[i], x));
        }
    }
    let mut seen = std::collections::HashSet::new();
    forced_edges.retain(|e| seen.insert(*e));

    Ok(ConstraintProgram {
        universe_size: data.universe_size(),
        budgets,
        choices,
        forced_edges,
        or_clauses,
        cardinality_rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn intro_program_at_k2() {
        let d = fixtures::intro();
        let p = compile(&d, &ThresholdProfile::Uniform(2)).unwrap();
        assert!(p.or_clauses.is_empty());
        let minima: Vec<usize> = p.cardinality_rows.iter().map(|r| r.minimum).collect();
        assert_eq!(minima, vec![2, 2, 2]);
        let id = |l| d.id_of(l).unwrap();
        assert_eq!(p.forced_edges, vec![(id("x"), id("z")), (id("y"), id("w"))]);
        assert_eq!(p.delta_vars().count(), 7);
    }

    #[test]
    fn reversal_pairs_produce_singleton_clauses() {
        let d = fixtures::forced_two_cycle();
        let p = compile(&d, &ThresholdProfile::Uniform(1)).unwrap();
        let id = |l| d.id_of(l).unwrap();
        let c12 = OrClause {
            first: 0,
            first_vars: AltSet::singleton(id("b")),
            second: 1,
            second_vars: AltSet::EMPTY,
        };
        let c34 = OrClause {
            first: 2,
            first_vars: AltSet::singleton(id("a")),
            second: 3,
            second_vars: AltSet::EMPTY,
        };
        assert!(p.or_clauses.contains(&c12));
        assert!(p.or_clauses.contains(&c34));
        // B1 and B3 also reverse (a vs b in {a, b}); that clause has two literals.
        let c13 = OrClause {
            first: 0,
            first_vars: AltSet::singleton(id("c")),
            second: 2,
            second_vars: AltSet::singleton(id("d")),
        };
        assert!(p.or_clauses.contains(&c13));
        assert_eq!(p.or_clauses.len(), 3);
        assert_eq!(p.forced_edges, vec![(id("a"), id("b")), (id("b"), id("a"))]);
    }

    #[test]
    fn single_observation_has_no_clauses() {
        let d = ChoiceDataset::from_labels(&[(&["a", "b", "c"][..], "a")]).unwrap();
        let p = compile(&d, &ThresholdProfile::Uniform(3)).unwrap();
        assert!(p.or_clauses.is_empty());
        assert_eq!(p.cardinality_rows.len(), 1);
        assert_eq!(p.cardinality_rows[0].minimum, 3);
    }
}
