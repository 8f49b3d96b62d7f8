//! Exact search over attention assignments.
//!
//! A search state is a preference digraph plus a set of forbidden
//! reachabilities. The attention assignment is implicit: in observation `i`
//! every member of `B_i` that `c(B_i)` already reaches is attended. Attending
//! such an alternative adds no reachability, so it can never hurt, and the
//! search only ever decides whether some `c(B_i)` should reach some `y`.
//!
//! Each branch either inserts the edge `c → y` or forbids `c ⇝ y` for the rest
//! of the subtree, which partitions the solutions. Cardinality rows and
//! or-clauses are unit-propagated before branching.

use std::collections::BTreeSet;

use crate::altset::AltSet;
use crate::model::{PreferenceOrder, Witness};

use super::digraph::PreferenceDigraph;
use super::program::{ConstraintProgram, OrClause};

/// Observations taking part in a detected contradiction, plus the preference
/// cycle when one was found.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Conflict {
    pub observations: Vec<usize>,
    pub cycle: Vec<usize>,
}

#[derive(Clone, Debug)]
pub(crate) struct State {
    pub graph: PreferenceDigraph,
    forbidden: Vec<AltSet>,
    /// Inserted edges and the observations that required them.
    log: Vec<(usize, usize, Vec<usize>)>,
}

impl State {
    fn new(n: usize) -> Self {
        State { graph: PreferenceDigraph::new(n), forbidden: vec![AltSet::EMPTY; n], log: Vec::new() }
    }

    fn owners_on(&self, cycle: &[usize]) -> BTreeSet<usize> {
        let mut obs = BTreeSet::new();
        for w in 0..cycle.len() {
            let (a, b) = (cycle[w], cycle[(w + 1) % cycle.len()]);
            if let Some((_, _, owners)) = self.log.iter().find(|(u, v, _)| *u == a && *v == b) {
                obs.extend(owners.iter().copied());
            }
        }
        obs
    }

    fn owners_within(&self, set: AltSet) -> BTreeSet<usize> {
        self.log
            .iter()
            .filter(|(a, b, _)| set.contains(*a) && set.contains(*b))
            .flat_map(|(_, _, o)| o.iter().copied())
            .collect()
    }

    fn add(&mut self, c: usize, y: usize, owners: &[usize]) -> Result<(), Conflict> {
        if let Err(cycle) = self.graph.add_edge(c, y) {
            let mut obs = self.owners_on(&cycle);
            obs.extend(owners.iter().copied());
            return Err(Conflict {
                observations: obs.into_iter().collect(),
                cycle: crate::relation::rotate_to_min(cycle),
            });
        }
        self.log.push((c, y, owners.to_vec()));
        let touched = self.graph.ancestors(c).with(c);
        if touched.iter().any(|u| self.graph.descendants(u).intersects(self.forbidden[u])) {
            return Err(Conflict { observations: owners.to_vec(), cycle: Vec::new() });
        }
        Ok(())
    }
}

enum Status {
    Satisfied,
    Violated,
    /// Exactly one way left to satisfy the constraint.
    Forced { owner: usize, from: usize, to: usize },
    Open { slack: usize, width: usize },
}

pub(crate) struct Engine<'p> {
    program: &'p ConstraintProgram,
    /// Strict descendants that `c(B_i)` needs inside `B_i`.
    need: Vec<usize>,
    first_conflict: Option<Conflict>,
    conflict_obs: BTreeSet<usize>,
    pub nodes: u64,
}

impl<'p> Engine<'p> {
    pub fn new(program: &'p ConstraintProgram) -> Self {
        let need = program.cardinality_rows.iter().map(|r| r.minimum.saturating_sub(1)).collect();
        Engine { program, need, first_conflict: None, conflict_obs: BTreeSet::new(), nodes: 0 }
    }

    fn n_rows(&self) -> usize {
        self.program.cardinality_rows.len()
    }

    pub fn root(&mut self) -> Result<State, Conflict> {
        let mut s = State::new(self.program.universe_size);
        // Owners of a forced edge: the row that fixes it, or the clause pair.
        for &(a, b) in &self.program.forced_edges {
            let mut owners = Vec::new();
            for (i, row) in self.program.cardinality_rows.iter().enumerate() {
                if self.program.choices[i] == a && row.vars.contains(b) && row.minimum == row.vars.len()
                {
                    owners.push(i);
                }
            }
            for cl in &self.program.or_clauses {
                if cl.width() == 1 {
                    let (i, x) = cl.literals().next().unwrap();
                    if self.program.choices[i] == a && x == b {
                        owners.extend([cl.first, cl.second]);
                    }
                }
            }
            owners.sort_unstable();
            owners.dedup();
            if let Err(c) = s.add(a, b, &owners) {
                self.record(&c);
                return Err(c);
            }
        }
        Ok(s)
    }

    fn record(&mut self, c: &Conflict) {
        if self.first_conflict.is_none() {
            self.first_conflict = Some(c.clone());
        }
        self.conflict_obs.extend(c.observations.iter().copied());
    }

    /// Best-effort explanation after an exhaustive failure.
    pub fn conflict_summary(&self) -> Conflict {
        let cycle = self.first_conflict.as_ref().map(|c| c.cycle.clone()).unwrap_or_default();
        Conflict { observations: self.conflict_obs.iter().copied().collect(), cycle }
    }

    fn can_add(&self, s: &State, c: usize, y: usize, ancestors: AltSet) -> bool {
        if s.graph.would_cycle(c, y) {
            return false;
        }
        let gained = s.graph.descendants(y).with(y);
        !gained.intersects(s.forbidden[c])
            && ancestors.iter().all(|u| !gained.intersects(s.forbidden[u]))
    }

    /// Members of `within` that `c` does not reach yet but still could.
    fn candidates(&self, s: &State, c: usize, within: AltSet) -> AltSet {
        let pool = within.without(c).difference(s.graph.descendants(c)).difference(s.forbidden[c]);
        if pool.is_empty() {
            return pool;
        }
        let anc = s.graph.ancestors(c);
        pool.iter().filter(|&y| self.can_add(s, c, y, anc)).collect()
    }

    fn row_status(&self, s: &State, i: usize) -> Status {
        let c = self.program.choices[i];
        let b = self.program.budgets[i];
        let have = s.graph.descendants(c).intersection(b).len();
        if have >= self.need[i] {
            return Status::Satisfied;
        }
        let cand = self.candidates(s, c, b);
        let missing = self.need[i] - have;
        match cand.len() {
            n if n < missing => Status::Violated,
            n if n == missing => Status::Forced { owner: i, from: c, to: cand.first().unwrap() },
            n => Status::Open { slack: n - missing, width: n },
        }
    }

    fn clause_sides(&self, s: &State, cl: &OrClause) -> Option<(AltSet, AltSet)> {
        let (ci, cj) = (self.program.choices[cl.first], self.program.choices[cl.second]);
        if s.graph.descendants(ci).intersects(cl.first_vars)
            || s.graph.descendants(cj).intersects(cl.second_vars)
        {
            return None;
        }
        Some((self.candidates(s, ci, cl.first_vars), self.candidates(s, cj, cl.second_vars)))
    }

    fn clause_status(&self, s: &State, cl: &OrClause) -> Status {
        let Some((a, b)) = self.clause_sides(s, cl) else {
            return Status::Satisfied;
        };
        match a.len() + b.len() {
            0 => Status::Violated,
            1 => {
                let (owner, to) = match a.first() {
                    Some(y) => (cl.first, y),
                    None => (cl.second, b.first().unwrap()),
                };
                Status::Forced { owner, from: self.program.choices[owner], to }
            }
            w => Status::Open { slack: w - 1, width: w },
        }
    }

    fn status(&self, s: &State, idx: usize) -> Status {
        if idx < self.n_rows() {
            self.row_status(s, idx)
        } else {
            self.clause_status(s, &self.program.or_clauses[idx - self.n_rows()])
        }
    }

    fn explain(&self, s: &State, idx: usize) -> Conflict {
        let (mut obs, scope) = if idx < self.n_rows() {
            (BTreeSet::from([idx]), self.program.budgets[idx])
        } else {
            let cl = &self.program.or_clauses[idx - self.n_rows()];
            (
                BTreeSet::from([cl.first, cl.second]),
                self.program.budgets[cl.first].union(self.program.budgets[cl.second]),
            )
        };
        obs.extend(s.owners_within(scope));
        Conflict { observations: obs.into_iter().collect(), cycle: Vec::new() }
    }

    fn propagate(&mut self, s: &mut State) -> Result<(), Conflict> {
        let total = self.n_rows() + self.program.or_clauses.len();
        loop {
            let mut changed = false;
            for idx in 0..total {
                loop {
                    match self.status(s, idx) {
                        Status::Satisfied | Status::Open { .. } => break,
                        Status::Violated => return Err(self.explain(s, idx)),
                        Status::Forced { owner, from, to } => {
                            s.add(from, to, &[owner])?;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }

    /// Branching literal `(owner, c, y)`, or `None` when every constraint holds.
    fn choose(&self, s: &State, target: Option<usize>) -> Option<(usize, usize, usize)> {
        // Clauses first (fewest literals), then rows (least slack).
        let mut best: Option<((u8, usize, usize), usize)> = None;
        let total = self.n_rows() + self.program.or_clauses.len();
        for idx in 0..total {
            if let Status::Open { slack, width } = self.status(s, idx) {
                let is_row = idx < self.n_rows();
                let key = if is_row { (1, slack, width) } else { (0, width, 0) };
                if best.is_none_or(|(k, _)| key < k) {
                    best = Some((key, idx));
                }
            }
        }
        let (_, idx) = best?;
        let mut literals: Vec<(usize, usize, usize)> = Vec::new();
        if idx < self.n_rows() {
            let c = self.program.choices[idx];
            literals.extend(
                self.candidates(s, c, self.program.budgets[idx]).iter().map(|y| (idx, c, y)),
            );
        } else {
            let cl = &self.program.or_clauses[idx - self.n_rows()];
            let (a, b) = self.clause_sides(s, cl).expect("open clause");
            let (ci, cj) = (self.program.choices[cl.first], self.program.choices[cl.second]);
            literals.extend(a.iter().map(|y| (cl.first, ci, y)));
            literals.extend(b.iter().map(|y| (cl.second, cj, y)));
        }
        literals.into_iter().min_by_key(|&(_, c, y)| self.literal_cost(s, c, y, target))
    }

    fn literal_cost(&self, s: &State, c: usize, y: usize, target: Option<usize>) -> (usize, usize, usize) {
        let gained = s.graph.descendants(y).with(y);
        let cost = match target {
            Some(x) if c == x || s.graph.reaches(x, c) => {
                gained.difference(s.graph.descendants(x)).len()
            }
            _ => 0,
        };
        (cost, gained.len(), y)
    }

    /// Depth-first search for any satisfying state.
    pub fn find_feasible(&mut self, root: State) -> Option<State> {
        self.dfs(root)
    }

    fn dfs(&mut self, mut s: State) -> Option<State> {
        self.nodes += 1;
        if let Err(c) = self.propagate(&mut s) {
            self.record(&c);
            return None;
        }
        let Some((owner, c, y)) = self.choose(&s, None) else {
            return Some(s);
        };
        let mut with_edge = s.clone();
        match with_edge.add(c, y, &[owner]) {
            Ok(()) => {
                if let Some(found) = self.dfs(with_edge) {
                    return Some(found);
                }
            }
            Err(conflict) => self.record(&conflict),
        }
        s.forbidden[c].insert(y);
        self.dfs(s)
    }

    /// Branch and bound for the satisfying state whose descendant set of
    /// `target` is smallest, ties broken by the lexicographically smallest
    /// set. `incumbent` must already satisfy every constraint.
    pub fn minimize_contour(&mut self, root: State, target: usize, incumbent: State) -> State {
        let mut best = incumbent;
        self.bb(root, target, &mut best);
        best
    }

    fn bb(&mut self, mut s: State, x: usize, best: &mut State) {
        self.nodes += 1;
        if self.propagate(&mut s).is_err() {
            return;
        }
        if !self.may_improve(&s, x, best) {
            return;
        }
        let Some((owner, c, y)) = self.choose(&s, Some(x)) else {
            if better(s.graph.descendants(x), best.graph.descendants(x)) {
                *best = s;
            }
            return;
        };
        let mut with_edge = s.clone();
        if with_edge.add(c, y, &[owner]).is_ok() {
            self.bb(with_edge, x, best);
        }
        s.forbidden[c].insert(y);
        self.bb(s, x, best);
    }

    fn may_improve(&self, s: &State, x: usize, best: &State) -> bool {
        let contour = s.graph.descendants(x);
        let incumbent = best.graph.descendants(x);
        // Rows whose chosen element is already at or below x must grow the
        // contour by whatever they still need from outside it.
        let mut extra = 0;
        for (i, &c) in self.program.choices.iter().enumerate() {
            if c != x && !contour.contains(c) {
                continue;
            }
            let b = self.program.budgets[i];
            let have = s.graph.descendants(c).intersection(b).len();
            if have >= self.need[i] {
                continue;
            }
            let free = self.candidates(s, c, b).intersection(contour).len();
            extra = extra.max((self.need[i] - have).saturating_sub(free));
        }
        let lower = contour.len() + extra;
        let m = incumbent.len();
        if lower != m {
            return lower < m;
        }
        // Equal size: can any superset of the contour of that size still be
        // lexicographically smaller than the incumbent?
        let mut smallest = contour;
        let mut room = m - contour.len();
        for id in 0..self.program.universe_size {
            if room == 0 {
                break;
            }
            if id != x && !smallest.contains(id) {
                smallest.insert(id);
                room -= 1;
            }
        }
        smallest.lex_cmp(incumbent) == std::cmp::Ordering::Less
    }

    /// Witness read off a satisfying state: attended = choice plus every
    /// budget member the choice reaches.
    pub fn witness(&self, s: &State, preference: PreferenceOrder) -> Witness {
        let attention = self
            .program
            .budgets
            .iter()
            .zip(&self.program.choices)
            .map(|(b, &c)| s.graph.descendants(c).intersection(*b).with(c))
            .collect();
        Witness { preference, attention }
    }
}

fn better(candidate: AltSet, incumbent: AltSet) -> bool {
    candidate.len() < incumbent.len()
        || (candidate.len() == incumbent.len()
            && candidate.lex_cmp(incumbent) == std::cmp::Ordering::Less)
}
