use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{check_text, DomainError, Timestamp, UserId, HANDLE_MAX_CHARS};

/// Researchers use the `Policymaker` role as well.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Citizen,
    Policymaker,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Citizen => "citizen",
            Role::Policymaker => "policymaker",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "citizen" => Ok(Role::Citizen),
            "policymaker" => Ok(Role::Policymaker),
            other => Err(DomainError::invalid("role", format!("unknown role {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserAccount {
    pub user_id: UserId,
    pub handle: String,
    pub role: Role,
    pub created_at: Timestamp,
}

impl UserAccount {
    pub fn new(handle: &str, role: Role, now: Timestamp) -> Result<Self, DomainError> {
        validate_handle(handle)?;
        Ok(UserAccount {
            user_id: UserId::generate(),
            handle: handle.to_owned(),
            role,
            created_at: now,
        })
    }

    pub fn is_policymaker(&self) -> bool {
        self.role == Role::Policymaker
    }
}

fn validate_handle(handle: &str) -> Result<(), DomainError> {
    check_text("handle", handle, 1, HANDLE_MAX_CHARS)?;
    if handle.chars().any(char::is_control) {
        return Err(DomainError::invalid("handle", "contains control characters"));
    }
    if handle.trim().is_empty() {
        return Err(DomainError::invalid("handle", "must not be blank"));
    }
    Ok(())
}
