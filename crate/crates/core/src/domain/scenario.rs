use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{
    check_text, DomainError, Role, ScenarioId, StatementId, Timestamp, UserAccount, UserId,
    DESCRIPTION_MAX_CHARS, MAX_STATEMENTS, STATEMENT_MAX_CHARS, TITLE_MAX_CHARS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioStatus {
    Draft,
    Published,
    Archived,
}

impl ScenarioStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioStatus::Draft => "draft",
            ScenarioStatus::Published => "published",
            ScenarioStatus::Archived => "archived",
        }
    }

    /// Draft -> Published -> Archived, nothing else.
    pub fn can_become(self, target: ScenarioStatus) -> bool {
        matches!(
            (self, target),
            (ScenarioStatus::Draft, ScenarioStatus::Published)
                | (ScenarioStatus::Published, ScenarioStatus::Archived)
        )
    }
}

impl fmt::Display for ScenarioStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioStatus {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "draft" => Ok(ScenarioStatus::Draft),
            "published" => Ok(ScenarioStatus::Published),
            "archived" => Ok(ScenarioStatus::Archived),
            other => Err(DomainError::invalid(
                "status",
                format!("unknown status {other:?}"),
            )),
        }
    }
}

/// One pre-survey statement, rated on the five-point agreement scale.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Statement {
    pub statement_id: StatementId,
    pub text: String,
    pub position: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub scenario_id: ScenarioId,
    pub owner: UserId,
    pub title: String,
    pub description: String,
    pub statements: Vec<Statement>,
    pub status: ScenarioStatus,
    pub created_at: Timestamp,
    pub published_at: Option<Timestamp>,
}

impl Scenario {
    /// A new draft owned by `owner`. Drafts may start without statements.
    pub fn draft(
        owner: &UserAccount,
        title: &str,
        description: &str,
        statements: &[String],
        now: Timestamp,
    ) -> Result<Self, DomainError> {
        if owner.role != Role::Policymaker {
            return Err(DomainError::RoleRequired(Role::Policymaker));
        }
        let title = title.trim();
        check_text("title", title, 1, TITLE_MAX_CHARS)?;
        check_text("description", description, 0, DESCRIPTION_MAX_CHARS)?;
        Ok(Scenario {
            scenario_id: ScenarioId::generate(),
            owner: owner.user_id.clone(),
            title: title.to_owned(),
            description: description.to_owned(),
            statements: build_statements(statements)?,
            status: ScenarioStatus::Draft,
            created_at: now,
            published_at: None,
        })
    }

    /// Replaces the statement list of a draft, renumbering positions from 0.
    pub fn with_statements(&self, actor: &UserId, texts: &[String]) -> Result<Self, DomainError> {
        if &self.owner != actor {
            return Err(DomainError::NotOwner);
        }
        if self.status != ScenarioStatus::Draft {
            return Err(DomainError::StatementsFrozen);
        }
        Ok(Scenario {
            statements: build_statements(texts)?,
            ..self.clone()
        })
    }

    pub fn is_published(&self) -> bool {
        self.status == ScenarioStatus::Published
    }

    pub fn statement(&self, id: &StatementId) -> Option<&Statement> {
        self.statements.iter().find(|s| &s.statement_id == id)
    }
}

fn build_statements(texts: &[String]) -> Result<Vec<Statement>, DomainError> {
    if texts.len() > MAX_STATEMENTS {
        return Err(DomainError::invalid(
            "statements",
            format!("at most {MAX_STATEMENTS} statements"),
        ));
    }
    texts
        .iter()
        .enumerate()
        .map(|(position, text)| {
            let text = text.trim();
            check_text("statement", text, 1, STATEMENT_MAX_CHARS)?;
            Ok(Statement {
                statement_id: StatementId::generate(),
                text: text.to_owned(),
                position: position as u32,
            })
        })
        .collect()
}

/// Moves `scenario` to `target` on behalf of `actor`.
///
/// `published_at` is stamped with `now` on Draft -> Published; every other
/// field is carried over untouched.
pub fn transition_scenario(
    scenario: &Scenario,
    actor: &UserId,
    target: ScenarioStatus,
    now: Timestamp,
) -> Result<Scenario, DomainError> {
    if &scenario.owner != actor {
        return Err(DomainError::NotOwner);
    }
    if !scenario.status.can_become(target) {
        return Err(DomainError::IllegalTransition {
            from: scenario.status,
            to: target,
            reason: "transition not allowed",
        });
    }
    if target == ScenarioStatus::Published && scenario.statements.is_empty() {
        return Err(DomainError::IllegalTransition {
            from: scenario.status,
            to: target,
            reason: "a published scenario needs at least one statement",
        });
    }
    let mut next = scenario.clone();
    next.status = target;
    if target == ScenarioStatus::Published {
        next.published_at = Some(now);
    }
    Ok(next)
}
