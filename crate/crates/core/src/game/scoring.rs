use serde::{Deserialize, Serialize};

use crate::domain::Mood;

/// Points per guess outcome. Defaults: 10 exact, 5 same grid cell, 0 miss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoringTable {
    pub exact: u32,
    pub quadrant: u32,
    pub miss: u32,
}

impl Default for ScoringTable {
    fn default() -> Self {
        ScoringTable {
            exact: 10,
            quadrant: 5,
            miss: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Exact,
    SameCell,
    Miss,
}

pub fn classify(actual: Mood, guessed: Mood) -> Outcome {
    if actual == guessed {
        Outcome::Exact
    } else if actual.cell() == guessed.cell() {
        Outcome::SameCell
    } else {
        Outcome::Miss
    }
}

impl ScoringTable {
    pub fn points(&self, actual: Mood, guessed: Mood) -> u32 {
        match classify(actual, guessed) {
            Outcome::Exact => self.exact,
            Outcome::SameCell => self.quadrant,
            Outcome::Miss => self.miss,
        }
    }
}
