//! Incrementally maintained strict-preference digraph.
//!
//! The graph keeps, for every node, the bit set of its strict descendants.
//! Inserting `a → b` is rejected exactly when `b` already reaches `a` (or
//! `a == b`), so every accepted state is a DAG. Insertion repairs the closure
//! locally: only `a` and its ancestors gain descendants.

use crate::altset::AltSet;
use crate::relation::Relation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreferenceDigraph {
    succ: Vec<AltSet>,
    reach: Vec<AltSet>,
}

impl PreferenceDigraph {
    pub fn new(n: usize) -> Self {
        PreferenceDigraph { succ: vec![AltSet::EMPTY; n], reach: vec![AltSet::EMPTY; n] }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    #[inline]
    pub fn reaches(&self, a: usize, b: usize) -> bool {
        self.reach[a].contains(b)
    }

    #[inline]
    pub fn descendants(&self, a: usize) -> AltSet {
        self.reach[a]
    }

    /// Strict ancestors of `a`.
    pub fn ancestors(&self, a: usize) -> AltSet {
        self.reach
            .iter()
            .enumerate()
            .filter(|(_, r)| r.contains(a))
            .map(|(u, _)| u)
            .collect()
    }

    #[inline]
    pub fn would_cycle(&self, a: usize, b: usize) -> bool {
        a == b || self.reach[b].contains(a)
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.succ[a].contains(b)
    }

    /// Inserts `a → b`. On rejection returns the cycle `a, b, …` that the edge
    /// would close.
    pub fn add_edge(&mut self, a: usize, b: usize) -> Result<(), Vec<usize>> {
        if self.would_cycle(a, b) {
            let mut cycle = vec![a];
            if a != b {
                cycle.extend(self.path(b, a).expect("reachability without a path"));
                cycle.pop();
            }
            return Err(cycle);
        }
        if self.succ[a].contains(b) {
            return Ok(());
        }
        self.succ[a].insert(b);
        if self.reach[a].contains(b) {
            return Ok(());
        }
        let gained = self.reach[b].with(b);
        for u in 0..self.reach.len() {
            if u == a || self.reach[u].contains(a) {
                self.reach[u] = self.reach[u].union(gained);
            }
        }
        Ok(())
    }

    /// Some shortest edge path `from → … → to`.
    pub fn path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        self.as_relation().shortest_path(from, to)
    }

    pub fn as_relation(&self) -> Relation {
        let mut r = Relation::new(self.succ.len());
        for (a, s) in self.succ.iter().enumerate() {
            for b in s.iter() {
                r.insert(a, b);
            }
        }
        r
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(|(a, s)| s.iter().map(move |b| (a, b)))
    }

    /// A linear extension: more descendants first, ties by id. Valid because
    /// `a ⇝ b` implies `reach[a] ⊋ reach[b]`.
    pub fn topological_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.reach.len()).collect();
        order.sort_by_key(|&a| (std::cmp::Reverse(self.reach[a].len()), a));
        order
    }
}
