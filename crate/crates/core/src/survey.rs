//! Sensitization pre-survey: complete five-point agreement responses and
//! their per-statement aggregates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::domain::{ResponseId, Scenario, ScenarioId, StatementId, Timestamp, UserId};
use crate::storage::{StorageError, Store};

pub const LEVEL_MIN: u8 = 1;
pub const LEVEL_MAX: u8 = 5;

/// Labels for levels 1..=5.
pub const LEVEL_LABELS: [&str; 5] = [
    "strongly disagree",
    "disagree",
    "neutral",
    "agree",
    "strongly agree",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyResponse {
    pub response_id: ResponseId,
    pub scenario_id: ScenarioId,
    pub user_id: UserId,
    pub answers: BTreeMap<StatementId, u8>,
    pub submitted_at: Timestamp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikertSummary {
    pub statement_id: StatementId,
    /// Index 0 holds level 1.
    pub counts: [u64; 5],
    pub n: u64,
    pub mean: Option<f64>,
    pub median: Option<f64>,
}

impl LikertSummary {
    pub fn from_counts(statement_id: StatementId, counts: [u64; 5]) -> Self {
        let n: u64 = counts.iter().sum();
        let (mean, median) = if n == 0 {
            (None, None)
        } else {
            let weighted: u64 = counts
                .iter()
                .enumerate()
                .map(|(i, c)| (i as u64 + 1) * c)
                .sum();
            let mean = weighted as f64 / n as f64;
            let median = if n % 2 == 1 {
                level_at_rank(&counts, n / 2) as f64
            } else {
                (level_at_rank(&counts, n / 2 - 1) + level_at_rank(&counts, n / 2)) as f64 / 2.0
            };
            (Some(mean), Some(median))
        };
        LikertSummary {
            statement_id,
            counts,
            n,
            mean,
            median,
        }
    }

    /// Levels outside 1..=5 are ignored.
    pub fn from_levels(statement_id: StatementId, levels: impl IntoIterator<Item = u8>) -> Self {
        let mut counts = [0u64; 5];
        for level in levels {
            if (LEVEL_MIN..=LEVEL_MAX).contains(&level) {
                counts[(level - 1) as usize] += 1;
            }
        }
        LikertSummary::from_counts(statement_id, counts)
    }
}

/// Level of the element at 0-based `rank` in the sorted multiset.
fn level_at_rank(counts: &[u64; 5], rank: u64) -> u8 {
    let mut seen = 0;
    for (i, c) in counts.iter().enumerate() {
        seen += c;
        if rank < seen {
            return i as u8 + 1;
        }
    }
    unreachable!("rank {rank} beyond multiset of size {seen}")
}

/// Summaries for every statement of `scenario`, in statement order.
pub fn summarize_scenario(scenario: &Scenario, responses: &[SurveyResponse]) -> Vec<LikertSummary> {
    scenario
        .statements
        .iter()
        .map(|st| {
            LikertSummary::from_levels(
                st.statement_id.clone(),
                responses
                    .iter()
                    .filter_map(|r| r.answers.get(&st.statement_id).copied()),
            )
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SurveyError {
    #[error("scenario {0} not found")]
    UnknownScenario(ScenarioId),
    #[error("user {0} not found")]
    UnknownUser(UserId),
    #[error("statement {0} does not belong to this scenario")]
    UnknownStatement(StatementId),
    #[error("scenario is not published")]
    ScenarioNotPublished,
    #[error("a response for this scenario was already submitted")]
    DuplicateResponse,
    #[error("answers must cover every statement exactly once (missing {missing:?}, unexpected {extra:?})")]
    IncompleteAnswers {
        missing: Vec<StatementId>,
        extra: Vec<StatementId>,
    },
    #[error("level {level} for statement {statement_id} is outside 1..=5")]
    LevelOutOfRange { statement_id: StatementId, level: i64 },
    #[error(transparent)]
    Storage(#[from] StorageError),
}

/// Checks that `answers` rates each statement of `scenario` exactly once on
/// the 1..=5 scale. Levels arrive as `i64` so out-of-range input from the
/// wire is reported rather than truncated.
pub fn validate_answers(
    scenario: &Scenario,
    answers: &BTreeMap<StatementId, i64>,
) -> Result<BTreeMap<StatementId, u8>, SurveyError> {
    if let Some((id, level)) = answers
        .iter()
        .find(|(_, l)| !(LEVEL_MIN as i64..=LEVEL_MAX as i64).contains(*l))
    {
        return Err(SurveyError::LevelOutOfRange {
            statement_id: id.clone(),
            level: *level,
        });
    }
    let missing: Vec<StatementId> = scenario
        .statements
        .iter()
        .filter(|s| !answers.contains_key(&s.statement_id))
        .map(|s| s.statement_id.clone())
        .collect();
    let extra: Vec<StatementId> = answers
        .keys()
        .filter(|id| scenario.statement(id).is_none())
        .cloned()
        .collect();
    if !missing.is_empty() || !extra.is_empty() {
        return Err(SurveyError::IncompleteAnswers { missing, extra });
    }
    Ok(answers
        .iter()
        .map(|(id, level)| (id.clone(), *level as u8))
        .collect())
}

/// Stores `user`'s one and only response to a published scenario.
pub fn submit_response(
    store: &Store,
    now: Timestamp,
    user: &UserId,
    scenario_id: &ScenarioId,
    answers: &BTreeMap<StatementId, i64>,
) -> Result<SurveyResponse, SurveyError> {
    store.atomically(|tx| {
        let scenario = tx
            .find_scenario(scenario_id)?
            .ok_or_else(|| SurveyError::UnknownScenario(scenario_id.clone()))?;
        if tx.find_user(user)?.is_none() {
            return Err(SurveyError::UnknownUser(user.clone()));
        }
        if !scenario.is_published() {
            return Err(SurveyError::ScenarioNotPublished);
        }
        let answers = validate_answers(&scenario, answers)?;
        if tx.find_response(scenario_id, user)?.is_some() {
            return Err(SurveyError::DuplicateResponse);
        }
        let response = SurveyResponse {
            response_id: ResponseId::generate(),
            scenario_id: scenario_id.clone(),
            user_id: user.clone(),
            answers,
            submitted_at: now,
        };
        tx.insert_response(&response).map_err(|e| match e {
            StorageError::ConflictOnUnique { .. } => SurveyError::DuplicateResponse,
            other => other.into(),
        })?;
        Ok(response)
    })
}

pub fn aggregate_statement(
    store: &Store,
    scenario_id: &ScenarioId,
    statement_id: &StatementId,
) -> Result<LikertSummary, SurveyError> {
    store.read(|tx| {
        let scenario = tx
            .find_scenario(scenario_id)?
            .ok_or_else(|| SurveyError::UnknownScenario(scenario_id.clone()))?;
        if scenario.statement(statement_id).is_none() {
            return Err(SurveyError::UnknownStatement(statement_id.clone()));
        }
        let levels = tx.statement_levels(statement_id)?;
        Ok(LikertSummary::from_levels(statement_id.clone(), levels))
    })
}
