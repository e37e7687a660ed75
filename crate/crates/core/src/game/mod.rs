//! The mood-guessing game.
//!
//! Players are served visions written by others, guess the author's mood,
//! and earn points from a [`ScoringTable`]. A player sees each vision at
//! most once and never their own.

mod profile;
mod scoring;

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{
    Challenge, GuessId, Mood, ScenarioId, Timestamp, UserId, Vision, VisionId,
};
use crate::storage::{StorageError, Store};

pub use profile::ConfusionMatrix;
pub use scoring::{classify, Outcome, ScoringTable};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Guess {
    pub guess_id: GuessId,
    pub guesser: UserId,
    pub vision_id: VisionId,
    pub scenario_id: ScenarioId,
    pub guessed_mood: Mood,
    /// Snapshot of the vision's mood when the guess was made.
    pub actual_mood: Mood,
    pub points_awarded: u32,
    pub created_at: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayerStats {
    pub user_id: UserId,
    pub scenario_id: ScenarioId,
    pub total_points: u64,
    pub guesses_made: u64,
    pub exact_matches: u64,
    /// Consecutive exact matches; any other outcome resets it.
    pub current_streak: u64,
}

impl PlayerStats {
    pub fn empty(user_id: UserId, scenario_id: ScenarioId) -> Self {
        PlayerStats {
            user_id,
            scenario_id,
            total_points: 0,
            guesses_made: 0,
            exact_matches: 0,
            current_streak: 0,
        }
    }

    pub fn record(&mut self, points: u32, exact: bool) {
        self.total_points += u64::from(points);
        self.guesses_made += 1;
        if exact {
            self.exact_matches += 1;
            self.current_streak += 1;
        } else {
            self.current_streak = 0;
        }
    }

    /// Replays `guesses` in order from zero.
    pub fn replay<'a>(
        user_id: UserId,
        scenario_id: ScenarioId,
        guesses: impl IntoIterator<Item = &'a Guess>,
    ) -> Self {
        let mut stats = PlayerStats::empty(user_id, scenario_id);
        for g in guesses {
            stats.record(g.points_awarded, g.guessed_mood == g.actual_mood);
        }
        stats
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuessResult {
    pub guess_id: GuessId,
    pub correct: bool,
    pub actual_mood: Mood,
    pub points_awarded: u32,
    pub updated_stats: PlayerStats,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("scenario {0} not found")]
    UnknownScenario(ScenarioId),
    #[error("vision {0} not found")]
    UnknownVision(VisionId),
    #[error("user {0} not found")]
    UnknownUser(UserId),
    #[error("scenario is not published")]
    ScenarioNotPublished,
    #[error("no visions left to guess in this scenario")]
    NoEligibleVisions,
    #[error("you cannot guess the mood of your own vision")]
    SelfGuess,
    #[error("you already guessed this vision")]
    DuplicateGuess,
    #[error(transparent)]
    Storage(#[from] StorageError),
}

/// Visions `player` may still be challenged with, in input order.
pub fn eligible_visions<'a>(
    visions: &'a [Vision],
    player: &UserId,
    guessed: &HashSet<VisionId>,
) -> Vec<&'a Vision> {
    visions
        .iter()
        .filter(|v| &v.author != player && !guessed.contains(&v.vision_id))
        .collect()
}

/// Picks uniformly at random among the visions `player` has neither
/// written nor guessed.
pub fn next_challenge<R: Rng + ?Sized>(
    store: &Store,
    rng: &mut R,
    player: &UserId,
    scenario_id: &ScenarioId,
) -> Result<Challenge, GameError> {
    store.read(|tx| {
        let scenario = tx
            .find_scenario(scenario_id)?
            .ok_or_else(|| GameError::UnknownScenario(scenario_id.clone()))?;
        if !scenario.is_published() {
            return Err(GameError::ScenarioNotPublished);
        }
        let visions = tx.list_visions(scenario_id)?;
        let guessed: HashSet<VisionId> = tx
            .list_player_guesses(player, scenario_id)?
            .into_iter()
            .map(|g| g.vision_id)
            .collect();
        let pool = eligible_visions(&visions, player, &guessed);
        if pool.is_empty() {
            return Err(GameError::NoEligibleVisions);
        }
        let pick = pool[rng.random_range(0..pool.len())];
        Ok(Challenge::from(pick))
    })
}

/// Scores and records one guess, updating the player's stats in the same
/// transaction.
pub fn submit_guess(
    store: &Store,
    now: Timestamp,
    table: &ScoringTable,
    player: &UserId,
    vision_id: &VisionId,
    guessed: Mood,
) -> Result<GuessResult, GameError> {
    store.atomically(|tx| {
        let vision = tx
            .find_vision(vision_id)?
            .ok_or_else(|| GameError::UnknownVision(vision_id.clone()))?;
        if tx.find_user(player)?.is_none() {
            return Err(GameError::UnknownUser(player.clone()));
        }
        if &vision.author == player {
            return Err(GameError::SelfGuess);
        }
        if tx.find_guess(player, vision_id)?.is_some() {
            return Err(GameError::DuplicateGuess);
        }
        let points = table.points(vision.mood, guessed);
        let exact = vision.mood == guessed;
        let guess = Guess {
            guess_id: GuessId::generate(),
            guesser: player.clone(),
            vision_id: vision_id.clone(),
            scenario_id: vision.scenario_id.clone(),
            guessed_mood: guessed,
            actual_mood: vision.mood,
            points_awarded: points,
            created_at: now,
        };
        tx.insert_guess(&guess).map_err(|e| match e {
            StorageError::ConflictOnUnique { .. } => GameError::DuplicateGuess,
            other => other.into(),
        })?;
        let mut stats = tx
            .find_stats(player, &vision.scenario_id)?
            .unwrap_or_else(|| PlayerStats::empty(player.clone(), vision.scenario_id.clone()));
        stats.record(points, exact);
        tx.upsert_stats(&stats)?;
        Ok(GuessResult {
            guess_id: guess.guess_id,
            correct: exact,
            actual_mood: vision.mood,
            points_awarded: points,
            updated_stats: stats,
        })
    })
}

/// Stats for `player` in a scenario; zeros when they have not played.
pub fn player_stats(
    store: &Store,
    player: &UserId,
    scenario_id: &ScenarioId,
) -> Result<PlayerStats, GameError> {
    store.read(|tx| {
        Ok(tx
            .find_stats(player, scenario_id)?
            .unwrap_or_else(|| PlayerStats::empty(player.clone(), scenario_id.clone())))
    })
}

pub fn empathy_profile(
    store: &Store,
    player: &UserId,
    scenario_id: &ScenarioId,
) -> Result<ConfusionMatrix, GameError> {
    store.read(|tx| {
        let guesses = tx.list_player_guesses(player, scenario_id)?;
        Ok(ConfusionMatrix::from_pairs(
            guesses.iter().map(|g| (g.actual_mood, g.guessed_mood)),
        ))
    })
}
