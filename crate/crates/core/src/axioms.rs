//! Revealed-preference axioms for k-th order limited attention.
//!
//! On complete domains two pairs of axioms characterize the model for
//! `k ≥ 2`: SARP^k with WARP(LA^k), and no binary cycles with k-th order
//! contraction. On incomplete domains only premises that can be instantiated
//! from observed menus are evaluated; a missing menu never produces a
//! violation.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::altset::AltSet;
use crate::model::{ChoiceDataset, ProfileError, ThresholdProfile};
use crate::relation::Relation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Axiom {
    SarpK,
    WarpLaK,
    Nbc,
    KContraction,
    SarpHet,
    WarpLaHet,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::SarpK => "SARP^k",
            Axiom::WarpLaK => "WARP(LA^k)",
            Axiom::Nbc => "NBC",
            Axiom::KContraction => "k-th order Contraction",
            Axiom::SarpHet => "SARP^het",
            Axiom::WarpLaHet => "WARP(LA^het)",
        })
    }
}

/// A replayable counterexample.
///
/// `alternatives` is the offending cycle for the SARP variants and NBC,
/// `[x, y, c(S∖{y})]` for the WARP variants, and `[x, beaten-by…]` for
/// contraction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub observations: Vec<usize>,
    pub alternatives: Vec<usize>,
}

/// Edges `c(B) → y` from every observation selected by `keep`, with the first
/// observation producing each edge.
fn direct_relation(
    data: &ChoiceDataset,
    keep: impl Fn(usize) -> bool,
) -> (Relation, HashMap<(usize, usize), usize>) {
    let mut rel = Relation::new(data.universe_size());
    let mut owner = HashMap::new();
    for (i, o) in data.observations().iter().enumerate() {
        if !keep(i) {
            continue;
        }
        for y in o.budget.members().without(o.choice).iter() {
            rel.insert(o.choice, y);
            owner.entry((o.choice, y)).or_insert(i);
        }
    }
    (rel, owner)
}

fn cycle_violation(
    axiom: Axiom,
    rel: &Relation,
    owner: &HashMap<(usize, usize), usize>,
) -> Result<(), AxiomViolation> {
    let Some(cycle) = rel.find_cycle() else {
        return Ok(());
    };
    let mut observations: Vec<usize> = (0..cycle.len())
        .map(|w| owner[&(cycle[w], cycle[(w + 1) % cycle.len()])])
        .collect();
    observations.sort_unstable();
    observations.dedup();
    Err(AxiomViolation { axiom, observations, alternatives: cycle })
}

/// No alternative is k-th order directly chosen over something that is
/// k-th order indirectly chosen over it.
pub fn check_sarp_k(data: &ChoiceDataset, k: usize) -> Result<(), AxiomViolation> {
    let (rel, owner) = direct_relation(data, |i| data.observations()[i].budget.size() <= k);
    cycle_violation(Axiom::SarpK, &rel, &owner)
}

fn warp_scan(
    data: &ChoiceDataset,
    axiom: Axiom,
    fully_attentive: impl Fn(usize) -> bool,
) -> Result<(), AxiomViolation> {
    let obs = data.observations();
    for (s_idx, s) in obs.iter().enumerate() {
        for (t_idx, t) in obs.iter().enumerate() {
            if s_idx == t_idx || !fully_attentive(t_idx) {
                continue;
            }
            let (x, y) = (s.choice, t.choice);
            let common = s.budget.members().intersection(t.budget.members());
            if x == y || !common.contains(x) || !common.contains(y) {
                continue;
            }
            let reduced = s.budget.members().without(y);
            if let Some(c) = data.choice_on(reduced) {
                if c != x {
                    let mut observations = vec![s_idx, t_idx];
                    observations.extend(data.index_of(reduced));
                    return Err(AxiomViolation { axiom, observations, alternatives: vec![x, y, c] });
                }
            }
        }
    }
    Ok(())
}

/// For `x, y ∈ S ∩ T` with `|T| ≤ k`, `x = c(S)` and `y = c(T)`:
/// `c(S ∖ {y}) = x` whenever `S ∖ {y}` is observed.
pub fn check_warp_la_k(data: &ChoiceDataset, k: usize) -> Result<(), AxiomViolation> {
    warp_scan(data, Axiom::WarpLaK, |t| data.observations()[t].budget.size() <= k)
}

/// Pairwise choices are acyclic.
pub fn check_nbc(data: &ChoiceDataset) -> Result<(), AxiomViolation> {
    let (rel, owner) = direct_relation(data, |i| data.observations()[i].budget.size() == 2);
    cycle_violation(Axiom::Nbc, &rel, &owner)
}

/// Every chosen `x = c(B)` wins the pairwise choice against at least
/// `min(|B|, k) - 1` distinct members of `B`. Pairs that were never observed
/// are given the benefit of the doubt.
pub fn check_k_contraction(data: &ChoiceDataset, k: usize) -> Result<(), AxiomViolation> {
    for (i, o) in data.observations().iter().enumerate() {
        let x = o.choice;
        let need = k.min(o.budget.size()).saturating_sub(1);
        let mut wins = 0;
        let mut unknown = 0;
        let mut lost_to = Vec::new();
        let mut lost_obs = Vec::new();
        for y in o.budget.members().without(x).iter() {
            let pair = AltSet::singleton(x).with(y);
            match data.choice_on(pair) {
                Some(c) if c == x => wins += 1,
                Some(c) => {
                    lost_to.push(c);
                    lost_obs.extend(data.index_of(pair));
                }
                None => unknown += 1,
            }
        }
        if wins + unknown < need {
            let mut observations = vec![i];
            observations.extend(lost_obs);
            let mut alternatives = vec![x];
            alternatives.extend(lost_to);
            return Err(AxiomViolation { axiom: Axiom::KContraction, observations, alternatives });
        }
    }
    Ok(())
}

/// SARP^het and WARP(LA^het): budgets with `|S| ≤ k_S` are fully attentive.
/// Returns every axiom that fails, SARP first.
pub fn check_heterogeneous(
    data: &ChoiceDataset,
    profile: &ThresholdProfile,
) -> Result<Result<(), Vec<AxiomViolation>>, ProfileError> {
    let required = profile.requirements(data)?;
    let full = |i: usize| required[i] == data.observations()[i].budget.size();
    let mut violations = Vec::new();
    let (rel, owner) = direct_relation(data, full);
    if let Err(v) = cycle_violation(Axiom::SarpHet, &rel, &owner) {
        violations.push(v);
    }
    if let Err(v) = warp_scan(data, Axiom::WarpLaHet, full) {
        violations.push(v);
    }
    Ok(if violations.is_empty() { Ok(()) } else { Err(violations) })
}

/// SARP^k and WARP(LA^k) both hold.
pub fn first_characterization(data: &ChoiceDataset, k: usize) -> bool {
    check_sarp_k(data, k).is_ok() && check_warp_la_k(data, k).is_ok()
}

/// NBC and k-th order contraction both hold.
pub fn second_characterization(data: &ChoiceDataset, k: usize) -> bool {
    check_nbc(data).is_ok() && check_k_contraction(data, k).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn abc(ab: &str, ac: &str, bc: &str, abc: &str) -> ChoiceDataset {
        ChoiceDataset::from_labels_in(
            &["a", "b", "c"],
            &[
                (&["a", "b"][..], ab),
                (&["a", "c"][..], ac),
                (&["b", "c"][..], bc),
                (&["a", "b", "c"][..], abc),
            ],
        )
        .unwrap()
    }

    #[test]
    fn sarp_k_finds_the_doubleton_cycle() {
        let d = fixtures::doubleton_cycle();
        let v = check_sarp_k(&d, 2).unwrap_err();
        let id = |l| d.id_of(l).unwrap();
        assert_eq!(v.alternatives, vec![id("a"), id("b"), id("c")]);
        assert_eq!(v.observations, vec![0, 1, 2]);
        assert!(check_sarp_k(&d, 1).is_ok());
    }

    #[test]
    fn sarp_k_on_intro() {
        assert!(check_sarp_k(&fixtures::intro(), 2).is_ok());
    }

    #[test]
    fn warp_la_k_reversal() {
        let d = abc("b", "c", "b", "a");
        let v = check_warp_la_k(&d, 2).unwrap_err();
        let id = |l| d.id_of(l).unwrap();
        assert_eq!(v.alternatives, vec![id("a"), id("b"), id("c")]);
        assert_eq!(v.observations[..2], [3, 0]);
    }

    #[test]
    fn rational_complete_data_passes_everything() {
        let d = abc("a", "a", "b", "a");
        for k in 1..=3 {
            assert!(check_sarp_k(&d, k).is_ok());
            assert!(check_warp_la_k(&d, k).is_ok());
            assert!(check_k_contraction(&d, k).is_ok());
        }
        assert!(check_nbc(&d).is_ok());
    }

    #[test]
    fn warp_la_k_on_intro() {
        assert!(check_warp_la_k(&fixtures::intro(), 2).is_ok());
    }

    #[test]
    fn nbc_cases() {
        assert!(check_nbc(&fixtures::doubleton_cycle()).is_err());
        let ok = ChoiceDataset::from_labels(&[
            (&["a", "b"][..], "a"),
            (&["b", "c"][..], "b"),
            (&["a", "c"][..], "a"),
        ])
        .unwrap();
        assert!(check_nbc(&ok).is_ok());
        let no_pairs = ChoiceDataset::from_labels(&[(&["a", "b", "c"][..], "c")]).unwrap();
        assert!(check_nbc(&no_pairs).is_ok());
    }

    #[test]
    fn contraction_counts_pairwise_wins() {
        let d = abc("b", "c", "b", "a");
        let v = check_k_contraction(&d, 2).unwrap_err();
        assert_eq!(v.observations[0], 3);
        let d = abc("a", "c", "b", "a");
        assert!(check_k_contraction(&d, 2).is_ok());
        assert!(check_k_contraction(&d, 3).is_err());
    }

    #[test]
    fn heterogeneous_specializes_to_uniform() {
        let d = abc("b", "c", "b", "a");
        let r = check_heterogeneous(&d, &ThresholdProfile::Uniform(2)).unwrap().unwrap_err();
        let axioms: Vec<Axiom> = r.iter().map(|v| v.axiom).collect();
        assert_eq!(axioms, vec![Axiom::WarpLaHet]);
        assert!(check_sarp_k(&d, 2).is_ok());
        assert_eq!(r[0].alternatives, check_warp_la_k(&d, 2).unwrap_err().alternatives);

        let cyc = fixtures::doubleton_cycle();
        let r = check_heterogeneous(&cyc, &ThresholdProfile::PerBudget(vec![2, 2, 2])).unwrap();
        assert_eq!(r.unwrap_err()[0].axiom, Axiom::SarpHet);
        let ones = ThresholdProfile::PerBudget(vec![1, 1, 1]);
        assert!(check_heterogeneous(&cyc, &ones).unwrap().is_ok());
    }
}
