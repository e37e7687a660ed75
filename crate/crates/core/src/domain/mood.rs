use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// One of the nine states a vision author or a guesser can pick.
///
/// Eight pictorial characters plus `Neutral`, laid out on a coarse
/// valence x arousal grid. Declaration order is the catalog order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mood {
    Excited,
    Cheerful,
    Relaxed,
    Calm,
    Neutral,
    Bored,
    Sad,
    Irritated,
    Tense,
}

impl Mood {
    pub const COUNT: usize = 9;

    pub const ALL: [Mood; Mood::COUNT] = [
        Mood::Excited,
        Mood::Cheerful,
        Mood::Relaxed,
        Mood::Calm,
        Mood::Neutral,
        Mood::Bored,
        Mood::Sad,
        Mood::Irritated,
        Mood::Tense,
    ];

    /// Pleasantness: -1, 0 or +1.
    pub fn valence(self) -> i8 {
        match self {
            Mood::Excited | Mood::Cheerful | Mood::Relaxed | Mood::Calm => 1,
            Mood::Neutral => 0,
            Mood::Bored | Mood::Sad | Mood::Irritated | Mood::Tense => -1,
        }
    }

    /// Activation: -1, 0 or +1.
    pub fn arousal(self) -> i8 {
        match self {
            Mood::Excited | Mood::Cheerful | Mood::Irritated | Mood::Tense => 1,
            Mood::Neutral => 0,
            Mood::Relaxed | Mood::Calm | Mood::Bored | Mood::Sad => -1,
        }
    }

    /// The (valence, arousal) grid cell the mood sits in.
    pub fn cell(self) -> (i8, i8) {
        (self.valence(), self.arousal())
    }

    /// Position in the catalog, 0..9.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Mood> {
        Mood::ALL.get(index).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Mood::Excited => "excited",
            Mood::Cheerful => "cheerful",
            Mood::Relaxed => "relaxed",
            Mood::Calm => "calm",
            Mood::Neutral => "neutral",
            Mood::Bored => "bored",
            Mood::Sad => "sad",
            Mood::Irritated => "irritated",
            Mood::Tense => "tense",
        }
    }
}

impl fmt::Display for Mood {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown mood {0:?}")]
pub struct UnknownMood(pub String);

impl FromStr for Mood {
    type Err = UnknownMood;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mood::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| UnknownMood(s.to_owned()))
    }
}

/// Catalog entry as published to clients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoodEntry {
    pub value: Mood,
    pub valence: i8,
    pub arousal: i8,
}

impl From<Mood> for MoodEntry {
    fn from(value: Mood) -> Self {
        MoodEntry {
            value,
            valence: value.valence(),
            arousal: value.arousal(),
        }
    }
}

/// The closed mood catalog in its fixed order.
pub fn mood_catalog() -> [Mood; Mood::COUNT] {
    Mood::ALL
}
