//! Small named datasets used throughout the tests, the docs and the CLI.

use crate::model::ChoiceDataset;

/// `c{x,z} = x`, `c{x,y,w} = x`, `c{y,w} = y`.
pub fn intro() -> ChoiceDataset {
    ChoiceDataset::from_labels(&[
        (&["x", "z"][..], "x"),
        (&["x", "y", "w"][..], "x"),
        (&["y", "w"][..], "y"),
    ])
    .expect("fixture is valid")
}

/// `c{a,b} = a`, `c{b,c} = b`, `c{a,c} = c`.
pub fn doubleton_cycle() -> ChoiceDataset {
    ChoiceDataset::from_labels(&[
        (&["a", "b"][..], "a"),
        (&["b", "c"][..], "b"),
        (&["a", "c"][..], "c"),
    ])
    .expect("fixture is valid")
}

/// Two choice reversals that each force one attended alternative, producing
/// the edges `a → b` and `b → a`.
pub fn forced_two_cycle() -> ChoiceDataset {
    ChoiceDataset::from_labels_in(
        &["a", "b", "c", "d"],
        &[
            (&["a", "b", "c"][..], "a"),
            (&["a", "c"][..], "c"),
            (&["a", "b", "d"][..], "b"),
            (&["b", "d"][..], "d"),
        ],
    )
    .expect("fixture is valid")
}
