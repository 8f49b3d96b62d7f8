//! Benchmark fixtures.

use cla_core::io::{generate_synthetic_study, Behavior, Study, SyntheticSpec};
use cla_core::ChoiceDataset;

/// Ten alternatives, twenty budgets of size 2 to 8, 113 noisy-rational
/// subjects: the shape of a typical intertemporal-choice experiment.
pub fn experiment_shaped(seed: u64) -> Study {
    let spec = SyntheticSpec {
        universe_size: 10,
        n_budgets: 20,
        size_range: (2, 8),
        n_subjects: 113,
        behavior: Behavior::NoisyRational(0.1),
        seed,
    };
    generate_synthetic_study(&spec).expect("valid spec").study
}

/// Uniformly random choices, the hardest case for the search.
pub fn uniform_subjects(n: usize, seed: u64) -> Vec<ChoiceDataset> {
    let spec = SyntheticSpec {
        universe_size: 10,
        n_budgets: 20,
        size_range: (2, 8),
        n_subjects: n,
        behavior: Behavior::Uniform,
        seed,
    };
    generate_synthetic_study(&spec).expect("valid spec").study.datasets()
}
