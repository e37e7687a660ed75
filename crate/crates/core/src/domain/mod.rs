//! Domain values shared by every engine.
//!
//! Values are immutable once built; the constructors and transition
//! functions here are the only way to obtain a value that satisfies the
//! invariants, so storage and the HTTP layer never have to re-check them.

mod ids;
mod mood;
mod scenario;
mod user;
mod vision;

use chrono::{DateTime, Utc};

pub use ids::{GuessId, ResponseId, ScenarioId, StatementId, UserId, VisionId};
pub use mood::{mood_catalog, Mood, MoodEntry, UnknownMood};
pub use scenario::{transition_scenario, Scenario, ScenarioStatus, Statement};
pub use user::{Role, UserAccount};
pub use vision::{Challenge, ImageRef, Vision};

pub type Timestamp = DateTime<Utc>;

pub const HANDLE_MAX_CHARS: usize = 32;
pub const TITLE_MAX_CHARS: usize = 120;
pub const DESCRIPTION_MAX_CHARS: usize = 2000;
pub const STATEMENT_MAX_CHARS: usize = 500;
pub const MAX_STATEMENTS: usize = 20;
pub const CAPTION_MAX_CHARS: usize = 280;
pub const ATTRIBUTION_MAX_CHARS: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DomainError {
    #[error("invalid {field}: {reason}")]
    InvalidField { field: &'static str, reason: String },
    #[error("cannot move scenario from {from} to {to}: {reason}")]
    IllegalTransition {
        from: ScenarioStatus,
        to: ScenarioStatus,
        reason: &'static str,
    },
    #[error("only the scenario owner may do this")]
    NotOwner,
    #[error("this action requires the {0} role")]
    RoleRequired(Role),
    #[error("statements are frozen once a scenario is published")]
    StatementsFrozen,
    #[error("scenario is not published")]
    ScenarioNotPublished,
}

impl DomainError {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        DomainError::InvalidField {
            field,
            reason: reason.into(),
        }
    }
}

/// Checks a free-text field's length in characters.
pub(crate) fn check_text(
    field: &'static str,
    value: &str,
    min: usize,
    max: usize,
) -> Result<(), DomainError> {
    let len = value.chars().count();
    if len < min {
        return Err(DomainError::invalid(
            field,
            format!("must be at least {min} characters"),
        ));
    }
    if len > max {
        return Err(DomainError::invalid(
            field,
            format!("must be at most {max} characters"),
        ));
    }
    Ok(())
}
