//! Brute-force ground truth for small instances.
//!
//! [`OracleMode::FullFilter`] enumerates strict orders together with attention
//! filters on every nonempty subset of the universe and checks the model's
//! definition directly. [`OracleMode::Constraint`] enumerates consideration
//! sets for the observed budgets only, keeping assignments whose revealed
//! comparisons are acyclic and whose choice reversals are explained. Neither
//! shares code with the solver.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::altset::AltSet;
use crate::axioms;
use crate::model::{Alternative, ChoiceDataset, ProfileError, ThresholdProfile};
use crate::solver::solve_rationalizability;
use crate::welfare::guaranteed_welfare_bound;

pub const FULL_FILTER_MAX_ALTERNATIVES: usize = 4;
pub const CONSTRAINT_MAX_ALTERNATIVES: usize = 8;
/// Cap on `Σ (|B_i| - 1)`, the number of free attention bits.
pub const CONSTRAINT_MAX_FREE_BITS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMode {
    FullFilter,
    Constraint,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large for the {mode:?} oracle: {reason}")]
    InstanceTooLarge { mode: OracleMode, reason: String },
    #[error("data is not rationalizable at this threshold profile")]
    NotRationalizable,
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("alternative {0} is not in the universe")]
    UnknownAlternative(usize),
}

/// Picks full-filter mode whenever it applies.
pub fn default_mode(data: &ChoiceDataset) -> OracleMode {
    if data.universe_size() <= FULL_FILTER_MAX_ALTERNATIVES {
        OracleMode::FullFilter
    } else {
        OracleMode::Constraint
    }
}

fn check_size(data: &ChoiceDataset, mode: OracleMode) -> Result<(), OracleError> {
    let n = data.universe_size();
    let too_large = |reason: String| Err(OracleError::InstanceTooLarge { mode, reason });
    match mode {
        OracleMode::FullFilter if n > FULL_FILTER_MAX_ALTERNATIVES => {
            too_large(format!("{n} alternatives, limit {FULL_FILTER_MAX_ALTERNATIVES}"))
        }
        OracleMode::Constraint if n > CONSTRAINT_MAX_ALTERNATIVES => {
            too_large(format!("{n} alternatives, limit {CONSTRAINT_MAX_ALTERNATIVES}"))
        }
        OracleMode::Constraint => {
            let bits: usize = data.observations().iter().map(|o| o.budget.size() - 1).sum();
            if bits > CONSTRAINT_MAX_FREE_BITS {
                too_large(format!("{bits} free attention bits, limit {CONSTRAINT_MAX_FREE_BITS}"))
            } else {
                Ok(())
            }
        }
        OracleMode::FullFilter => Ok(()),
    }
}

/// Descendants of every node under `edges`.
fn reach(edges: &[AltSet]) -> Vec<AltSet> {
    let mut r = edges.to_vec();
    loop {
        let mut changed = false;
        for a in 0..r.len() {
            let mut next = r[a];
            for b in r[a].iter() {
                next = next.union(r[b]);
            }
            if next != r[a] {
                r[a] = next;
                changed = true;
            }
        }
        if !changed {
            return r;
        }
    }
}

/// Revealed comparisons of one assignment of consideration sets.
fn revealed(data: &ChoiceDataset, attention: &[AltSet]) -> Vec<AltSet> {
    let mut edges = vec![AltSet::EMPTY; data.universe_size()];
    for (i, a) in attention.iter().enumerate() {
        let c = data.choice(i);
        edges[c] = edges[c].union(a.without(c));
    }
    edges
}

/// Calls `visit` with the observed-budget consideration sets of every
/// rationalization; `visit` returns `false` to stop early.
fn enumerate(
    data: &ChoiceDataset,
    profile: &ThresholdProfile,
    mode: OracleMode,
    visit: &mut dyn FnMut(&[AltSet]) -> bool,
) -> Result<(), OracleError> {
    check_size(data, mode)?;
    let required = profile.requirements(data)?;
    match mode {
        OracleMode::Constraint => {
            let mut att = Vec::with_capacity(data.len());
            constraint_dfs(data, &required, &mut att, visit);
        }
        OracleMode::FullFilter => full_filter(data, profile, &required, visit),
    }
    Ok(())
}

fn subsets_of(set: AltSet) -> impl Iterator<Item = AltSet> {
    let bits = set.bits();
    let mut sub = bits;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = AltSet::from_bits(sub);
        if sub == 0 {
            done = true;
        } else {
            sub = (sub - 1) & bits;
        }
        Some(out)
    })
}

fn constraint_dfs(
    data: &ChoiceDataset,
    required: &[usize],
    att: &mut Vec<AltSet>,
    visit: &mut dyn FnMut(&[AltSet]) -> bool,
) -> bool {
    let i = att.len();
    if i == data.len() {
        return visit(att);
    }
    let (b, c) = (data.budget(i), data.choice(i));
    let mut candidates: Vec<AltSet> = subsets_of(b)
        .filter(|a| a.contains(c) && a.len() >= required[i])
        .collect();
    candidates.sort_by_key(|a| a.bits());
    for a in candidates {
        att.push(a);
        if consistent_prefix(data, att) && !constraint_dfs(data, required, att, visit) {
            att.pop();
            return false;
        }
        att.pop();
    }
    true
}

/// The newest observation explains every reversal with earlier ones and the
/// revealed comparisons so far are acyclic.
fn consistent_prefix(data: &ChoiceDataset, att: &[AltSet]) -> bool {
    let i = att.len() - 1;
    let (bi, ci) = (data.budget(i), data.choice(i));
    for j in 0..i {
        let (bj, cj) = (data.budget(j), data.choice(j));
        let common = bi.intersection(bj);
        if ci != cj
            && common.contains(ci)
            && common.contains(cj)
            && !att[i].intersects(bi.difference(bj))
            && !att[j].intersects(bj.difference(bi))
        {
            return false;
        }
    }
    let r = reach(&revealed(data, att));
    (0..r.len()).all(|a| !r[a].contains(a))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    heap_permute(n, &mut current, &mut out);
    out.sort();
    out
}

fn heap_permute(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(a.clone());
        return;
    }
    for i in 0..k {
        heap_permute(k - 1, a, out);
        if k.is_multiple_of(2) {
            a.swap(i, k - 1);
        } else {
            a.swap(0, k - 1);
        }
    }
}

struct FilterSearch<'a> {
    data: &'a ChoiceDataset,
    universe: AltSet,
    /// Nonempty subsets, larger first, so a set's supersets are assigned
    /// before it.
    order: Vec<AltSet>,
    required: Vec<usize>,
    choice: Vec<Option<usize>>,
    rank: Vec<usize>,
    gamma: Vec<AltSet>,
}

impl FilterSearch<'_> {
    fn best(&self, g: AltSet) -> usize {
        g.iter().min_by_key(|&a| self.rank[a]).expect("nonempty")
    }

    fn admissible(&self, s: AltSet, g: AltSet) -> bool {
        let idx = s.bits() as usize;
        !g.is_empty()
            && g.len() >= self.required[idx]
            && self.choice[idx].is_none_or(|c| self.best(g) == c)
    }

    fn dfs(&mut self, pos: usize, visit: &mut dyn FnMut(&[AltSet]) -> bool) -> bool {
        if pos == self.order.len() {
            let att: Vec<AltSet> = (0..self.data.len())
                .map(|i| self.gamma[self.data.budget(i).bits() as usize])
                .collect();
            return visit(&att);
        }
        let s = self.order[pos];
        // Removing an unattended alternative from a superset leaves the
        // consideration set unchanged.
        let mut forced: Option<AltSet> = None;
        for x in self.universe.difference(s).iter() {
            let g = self.gamma[s.with(x).bits() as usize];
            if !g.contains(x) {
                match forced {
                    Some(f) if f != g => return true,
                    _ => forced = Some(g),
                }
            }
        }
        let candidates: Vec<AltSet> = match forced {
            Some(g) => vec![g],
            None => {
                let mut v: Vec<AltSet> = subsets_of(s).collect();
                v.sort_by_key(|a| a.bits());
                v
            }
        };
        for g in candidates {
            if !self.admissible(s, g) {
                continue;
            }
            self.gamma[s.bits() as usize] = g;
            if !self.dfs(pos + 1, visit) {
                return false;
            }
        }
        self.gamma[s.bits() as usize] = AltSet::EMPTY;
        true
    }
}

fn full_filter(
    data: &ChoiceDataset,
    profile: &ThresholdProfile,
    required: &[usize],
    visit: &mut dyn FnMut(&[AltSet]) -> bool,
) {
    let n = data.universe_size();
    let universe = AltSet::full(n);
    let mut order: Vec<AltSet> = subsets_of(universe).filter(|s| !s.is_empty()).collect();
    order.sort_by_key(|s| (std::cmp::Reverse(s.len()), s.bits()));
    let mut req = vec![1; 1 << n];
    let mut choice = vec![None; 1 << n];
    for s in &order {
        // Unobserved menus carry the uniform threshold; under a per-budget
        // profile they are unconstrained.
        if let ThresholdProfile::Uniform(k) = profile {
            req[s.bits() as usize] = (*k).min(s.len());
        }
    }
    for (i, o) in data.observations().iter().enumerate() {
        let idx = o.budget.members().bits() as usize;
        req[idx] = required[i];
        choice[idx] = Some(o.choice);
    }
    for ranking in permutations(n) {
        let mut rank = vec![0; n];
        for (pos, &a) in ranking.iter().enumerate() {
            rank[a] = pos;
        }
        let mut search = FilterSearch {
            data,
            universe,
            order: order.clone(),
            required: req.clone(),
            choice: choice.clone(),
            rank,
            gamma: vec![AltSet::EMPTY; 1 << n],
        };
        if !search.dfs(0, visit) {
            return;
        }
    }
}

pub fn oracle_rationalizable(
    data: &ChoiceDataset,
    profile: &ThresholdProfile,
    mode: OracleMode,
) -> Result<bool, OracleError> {
    let mut found = false;
    enumerate(data, profile, mode, &mut |_| {
        found = true;
        false
    })?;
    Ok(found)
}

/// Smallest revealed strict lower contour of every alternative over all
/// rationalizations, indexed by id.
pub fn oracle_min_contours(
    data: &ChoiceDataset,
    profile: &ThresholdProfile,
    mode: OracleMode,
) -> Result<Vec<usize>, OracleError> {
    let n = data.universe_size();
    let mut best: Option<Vec<usize>> = None;
    enumerate(data, profile, mode, &mut |att| {
        let r = reach(&revealed(data, att));
        let sizes: Vec<usize> = r.iter().map(|s| s.len()).collect();
        let b = best.get_or_insert_with(|| vec![n; n]);
        for (m, s) in b.iter_mut().zip(sizes) {
            *m = (*m).min(s);
        }
        // Nothing can go below zero everywhere.
        b.iter().any(|&m| m > 0)
    })?;
    best.ok_or(OracleError::NotRationalizable)
}

pub fn oracle_min_contour(
    data: &ChoiceDataset,
    profile: &ThresholdProfile,
    x: usize,
    mode: OracleMode,
) -> Result<usize, OracleError> {
    if x >= data.universe_size() {
        return Err(OracleError::UnknownAlternative(x));
    }
    Ok(oracle_min_contours(data, profile, mode)?[x])
}

/// Number of choice functions on every menu of size at least two.
pub fn complete_domain_count(n: usize) -> usize {
    menus(n).iter().map(|s| s.len()).product()
}

fn menus(n: usize) -> Vec<AltSet> {
    let mut v: Vec<AltSet> = subsets_of(AltSet::full(n)).filter(|s| s.len() >= 2).collect();
    v.sort_by(|a, b| a.len().cmp(&b.len()).then(a.lex_cmp(*b)));
    v
}

/// Labels `a`, `b`, … for a small universe.
pub fn letter_universe(n: usize) -> Vec<Alternative> {
    (0..n)
        .map(|i| Alternative::new(i, ((b'a' + (i % 26) as u8) as char).to_string()))
        .collect()
}

/// The `index`-th complete-domain choice function, in mixed radix over the
/// menus (smaller menus first, lexicographic within a size). Singletons are
/// implicit.
pub fn complete_domain_dataset(n: usize, index: usize) -> ChoiceDataset {
    let mut rest = index;
    let raw: Vec<(Vec<usize>, usize)> = menus(n)
        .into_iter()
        .map(|m| {
            let members = m.to_vec();
            let c = members[rest % members.len()];
            rest /= members.len();
            (members, c)
        })
        .collect();
    ChoiceDataset::validate(letter_universe(n), raw).expect("menus are valid")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepCheck {
    /// Solver verdict against the oracle.
    Oracle,
    /// SARP^k with WARP(LA^k) against the solver, `k ≥ 2`.
    FirstCharacterization,
    /// NBC with k-th order contraction against the solver, `k ≥ 2`.
    SecondCharacterization,
    /// Guaranteed welfare contours against the oracle's minima.
    Welfare,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub compared: usize,
    pub agreed: usize,
}

impl Tally {
    fn add(&mut self, ok: bool) {
        self.compared += 1;
        self.agreed += ok as usize;
    }

    pub fn all_agree(&self) -> bool {
        self.compared == self.agreed
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepMismatch {
    pub check: SweepCheck,
    pub function_index: usize,
    pub k: usize,
    pub solver: bool,
    pub other: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub universe_size: usize,
    pub mode: OracleMode,
    pub functions: usize,
    pub ks: Vec<usize>,
    pub oracle: Tally,
    pub first_characterization: Tally,
    pub second_characterization: Tally,
    pub welfare: Option<Tally>,
    /// Ordered by function index, then `k`, then check.
    pub mismatches: Vec<SweepMismatch>,
}

#[derive(Default)]
struct Partial {
    oracle: Tally,
    first: Tally,
    second: Tally,
    welfare: Tally,
    mismatches: Vec<SweepMismatch>,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        for (a, b) in [
            (&mut self.oracle, other.oracle),
            (&mut self.first, other.first),
            (&mut self.second, other.second),
            (&mut self.welfare, other.welfare),
        ] {
            a.compared += b.compared;
            a.agreed += b.agreed;
        }
        self.mismatches.extend(other.mismatches);
        self
    }
}

fn sweep_one(n: usize, index: usize, mode: OracleMode, with_welfare: bool) -> Result<Partial, OracleError> {
    let data = complete_domain_dataset(n, index);
    let mut p = Partial::default();
    for k in 1..=n {
        let profile = ThresholdProfile::Uniform(k);
        let solver = solve_rationalizability(&data, &profile)?.is_feasible();
        let record = |tally: &mut Tally, check, other: bool, mismatches: &mut Vec<SweepMismatch>| {
            tally.add(solver == other);
            if solver != other {
                mismatches.push(SweepMismatch { check, function_index: index, k, solver, other });
            }
        };
        let oracle = oracle_rationalizable(&data, &profile, mode)?;
        record(&mut p.oracle, SweepCheck::Oracle, oracle, &mut p.mismatches);
        if k >= 2 {
            let first = axioms::first_characterization(&data, k);
            record(&mut p.first, SweepCheck::FirstCharacterization, first, &mut p.mismatches);
            let second = axioms::second_characterization(&data, k);
            record(&mut p.second, SweepCheck::SecondCharacterization, second, &mut p.mismatches);
        }
        if with_welfare && solver && oracle {
            let ours = guaranteed_welfare_bound(&data, &profile)
                .map(|r| r.per_alternative.iter().map(|b| b.size).collect::<Vec<_>>())
                .ok();
            let theirs = oracle_min_contours(&data, &profile, mode).ok();
            let ok = ours.is_some() && ours == theirs;
            p.welfare.add(ok);
            if !ok {
                p.mismatches.push(SweepMismatch {
                    check: SweepCheck::Welfare,
                    function_index: index,
                    k,
                    solver: true,
                    other: false,
                });
            }
        }
    }
    Ok(p)
}

/// Compares solver, oracle and both axiom characterizations on every
/// complete-domain choice function over `n` alternatives and every `k ≤ n`.
pub fn run_sweep(n: usize, mode: OracleMode, with_welfare: bool) -> Result<SweepReport, OracleError> {
    let functions = complete_domain_count(n);
    let partial = (0..functions)
        .into_par_iter()
        .map(|i| sweep_one(n, i, mode, with_welfare))
        .try_reduce(Partial::default, |a, b| Ok(a.merge(b)))?;
    let mut mismatches = partial.mismatches;
    mismatches.sort_by_key(|m| (m.function_index, m.k, m.check as u8));
    Ok(SweepReport {
        universe_size: n,
        mode,
        functions,
        ks: (1..=n).collect(),
        oracle: partial.oracle,
        first_characterization: partial.first,
        second_characterization: partial.second,
        welfare: with_welfare.then_some(partial.welfare),
        mismatches,
    })
}
