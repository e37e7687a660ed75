use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use super::StorageError;

/// Parsed `STORAGE_URL`.
///
/// * `embedded:` in-memory database
/// * `embedded:/path/to/file` single-file database
/// * anything with a `scheme://` prefix is a server connection URL
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    Embedded(Option<PathBuf>),
    Server(String),
}

impl Backend {
    pub fn in_memory() -> Self {
        Backend::Embedded(None)
    }

    pub fn file(path: impl Into<PathBuf>) -> Self {
        Backend::Embedded(Some(path.into()))
    }
}

impl FromStr for Backend {
    type Err = StorageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("embedded:") {
            return Ok(if rest.is_empty() {
                Backend::Embedded(None)
            } else {
                Backend::Embedded(Some(PathBuf::from(rest)))
            });
        }
        if s.contains("://") {
            return Ok(Backend::Server(s.to_owned()));
        }
        Err(StorageError::Config(format!(
            "unrecognised storage url {s:?}; expected \"embedded:\", \"embedded:/path\" or a server url"
        )))
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Embedded(None) => f.write_str("embedded:"),
            Backend::Embedded(Some(p)) => write!(f, "embedded:{}", p.display()),
            // never print credentials
            Backend::Server(url) => match url.split_once('@') {
                Some((_, host)) => write!(f, "server://…@{host}"),
                None => f.write_str(url),
            },
        }
    }
}
