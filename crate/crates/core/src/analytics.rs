//! Scenario reports for policymakers. Aggregates only; no respondent
//! identities ever leave this module.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::domain::{Mood, Role, Scenario, ScenarioId, Timestamp, UserId, Vision};
use crate::game::Guess;
use crate::storage::{StorageError, Store};
use crate::survey::{summarize_scenario, LikertSummary, SurveyResponse};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoodShare {
    pub count: u64,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario_id: ScenarioId,
    /// Time of the newest record the report covers, so an unchanged
    /// scenario always yields the same document.
    pub generated_at: Timestamp,
    pub likert: Vec<LikertSummary>,
    /// Every catalog mood is present; fractions are 0 when there are no
    /// visions.
    pub mood_distribution: BTreeMap<Mood, MoodShare>,
    pub vision_count: u64,
    pub response_count: u64,
    pub distinct_participants: u64,
    pub overall_guess_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalyticsError {
    #[error("scenario {0} not found")]
    UnknownScenario(ScenarioId),
    #[error("reports are only available to policymakers")]
    Forbidden,
    #[error(transparent)]
    Storage(#[from] StorageError),
}

pub fn mood_distribution(visions: &[Vision]) -> BTreeMap<Mood, MoodShare> {
    let mut counts = [0u64; Mood::COUNT];
    for v in visions {
        counts[v.mood.index()] += 1;
    }
    let total = visions.len() as u64;
    Mood::ALL
        .iter()
        .map(|m| {
            let count = counts[m.index()];
            let fraction = if total == 0 {
                0.0
            } else {
                count as f64 / total as f64
            };
            (*m, MoodShare { count, fraction })
        })
        .collect()
}

/// Pure report over one snapshot of a scenario's records.
pub fn build_report(
    scenario: &Scenario,
    responses: &[SurveyResponse],
    visions: &[Vision],
    guesses: &[Guess],
) -> ScenarioReport {
    let participants: HashSet<&UserId> = responses
        .iter()
        .map(|r| &r.user_id)
        .chain(visions.iter().map(|v| &v.author))
        .chain(guesses.iter().map(|g| &g.guesser))
        .collect();
    let exact = guesses
        .iter()
        .filter(|g| g.guessed_mood == g.actual_mood)
        .count();
    let generated_at = std::iter::once(scenario.created_at)
        .chain(scenario.published_at)
        .chain(responses.iter().map(|r| r.submitted_at))
        .chain(visions.iter().map(|v| v.created_at))
        .chain(guesses.iter().map(|g| g.created_at))
        .max()
        .unwrap_or(scenario.created_at);

    ScenarioReport {
        scenario_id: scenario.scenario_id.clone(),
        generated_at,
        likert: summarize_scenario(scenario, responses),
        mood_distribution: mood_distribution(visions),
        vision_count: visions.len() as u64,
        response_count: responses.len() as u64,
        distinct_participants: participants.len() as u64,
        overall_guess_accuracy: (!guesses.is_empty())
            .then(|| exact as f64 / guesses.len() as f64),
    }
}

/// Report for `scenario_id`, read from a single storage snapshot.
pub fn scenario_report(
    store: &Store,
    caller_role: Role,
    scenario_id: &ScenarioId,
) -> Result<ScenarioReport, AnalyticsError> {
    if caller_role != Role::Policymaker {
        return Err(AnalyticsError::Forbidden);
    }
    store.read(|tx| {
        let scenario = tx
            .find_scenario(scenario_id)?
            .ok_or_else(|| AnalyticsError::UnknownScenario(scenario_id.clone()))?;
        let responses = tx.list_responses(scenario_id)?;
        let visions = tx.list_visions(scenario_id)?;
        let guesses = tx.list_scenario_guesses(scenario_id)?;
        Ok(build_report(&scenario, &responses, &visions, &guesses))
    })
}
