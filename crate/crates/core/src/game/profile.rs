use serde::{Deserialize, Serialize};

use crate::domain::Mood;

/// Per-player counts of (actual, guessed) mood pairs, indexed in catalog
/// order. The trace over the total is the player's accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub cells: [[u64; Mood::COUNT]; Mood::COUNT],
    pub total: u64,
    pub accuracy: Option<f64>,
}

impl ConfusionMatrix {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Mood, Mood)>) -> Self {
        let mut cells = [[0u64; Mood::COUNT]; Mood::COUNT];
        for (actual, guessed) in pairs {
            cells[actual.index()][guessed.index()] += 1;
        }
        let total: u64 = cells.iter().flatten().sum();
        let trace: u64 = (0..Mood::COUNT).map(|i| cells[i][i]).sum();
        ConfusionMatrix {
            cells,
            total,
            accuracy: (total > 0).then(|| trace as f64 / total as f64),
        }
    }

    pub fn cell(&self, actual: Mood, guessed: Mood) -> u64 {
        self.cells[actual.index()][guessed.index()]
    }

    pub fn row_sum(&self, actual: Mood) -> u64 {
        self.cells[actual.index()].iter().sum()
    }
}
