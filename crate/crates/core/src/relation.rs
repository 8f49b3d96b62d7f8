//! Binary relations over alternatives as bit-matrix rows.

use std::collections::VecDeque;

use crate::altset::AltSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    succ: Vec<AltSet>,
}

impl Relation {
    pub fn new(n: usize) -> Self {
        Relation { succ: vec![AltSet::EMPTY; n] }
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.iter().all(|s| s.is_empty())
    }

    pub fn insert(&mut self, a: usize, b: usize) {
        self.succ[a].insert(b);
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.succ[a].contains(b)
    }

    pub fn successors(&self, a: usize) -> AltSet {
        self.succ[a]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ.iter().enumerate().flat_map(|(a, s)| s.iter().map(move |b| (a, b)))
    }

    /// Transitive closure by Warshall's algorithm over bit rows.
    pub fn closure(&self) -> Relation {
        let mut rows = self.succ.clone();
        let n = rows.len();
        for k in 0..n {
            let rk = rows[k];
            for row in rows.iter_mut() {
                if row.contains(k) {
                    *row = row.union(rk);
                }
            }
        }
        Relation { succ: rows }
    }

    /// Shortest chain `from → … → to` (BFS, lowest ids first).
    pub fn shortest_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let n = self.succ.len();
        let mut parent = vec![usize::MAX; n];
        let mut seen = AltSet::singleton(from);
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for v in self.succ[u].iter() {
                if v == to {
                    let mut path = vec![to, u];
                    let mut cur = u;
                    while cur != from {
                        cur = parent[cur];
                        path.push(cur);
                    }
                    path.reverse();
                    // `from` may equal `to` for a cycle query; drop the repeated tail.
                    if from == to {
                        path.pop();
                    }
                    return Some(path);
                }
                if !seen.contains(v) {
                    seen.insert(v);
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        None
    }

    /// Some shortest cycle, rotated so that it starts at its smallest id.
    pub fn find_cycle(&self) -> Option<Vec<usize>> {
        let mut best: Option<Vec<usize>> = None;
        for a in 0..self.succ.len() {
            if let Some(c) = self.shortest_path(a, a) {
                if best.as_ref().is_none_or(|b| c.len() < b.len()) {
                    best = Some(c);
                }
            }
        }
        best.map(rotate_to_min)
    }
}

pub(crate) fn rotate_to_min(mut cycle: Vec<usize>) -> Vec<usize> {
    if let Some(pos) = cycle.iter().enumerate().min_by_key(|(_, &v)| v).map(|(i, _)| i) {
        cycle.rotate_left(pos);
    }
    cycle
}
