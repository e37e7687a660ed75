use std::net::SocketAddr;
use std::time::Duration;

use url::Url;

use crate::game::ScoringTable;
use crate::images::DEFAULT_CACHE_TTL;
use crate::storage::Backend;

pub const DEFAULT_BIND_ADDR: &str = "127.0.0.1:8080";
pub const DEFAULT_DEV_ORIGIN: &str = "http://localhost:5173";

#[derive(Debug, thiserror::Error)]
#[error("invalid {key}: {reason}")]
pub struct ConfigError {
    pub key: &'static str,
    pub reason: String,
}

fn bad(key: &'static str, reason: impl ToString) -> ConfigError {
    ConfigError {
        key,
        reason: reason.to_string(),
    }
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub bind_addr: SocketAddr,
    /// `None` means a random per-process secret: sessions die on restart.
    pub session_secret: Option<String>,
    pub admin_key: Option<String>,
    pub cors_origins: Vec<String>,
    pub storage: Backend,
    pub provider_base_url: Option<Url>,
    pub provider_api_key: Option<String>,
    pub cache_ttl: Duration,
    pub scoring: ScoringTable,
}

impl Settings {
    pub fn from_env() -> Result<Self, ConfigError> {
        Settings::from_lookup(|key| std::env::var(key).ok())
    }

    pub fn from_lookup(lookup: impl Fn(&str) -> Option<String>) -> Result<Self, ConfigError> {
        let get = |key: &str| lookup(key).filter(|v| !v.trim().is_empty());

        let bind_addr = get("BIND_ADDR")
            .unwrap_or_else(|| DEFAULT_BIND_ADDR.to_owned())
            .parse()
            .map_err(|e| bad("BIND_ADDR", e))?;
        let cors_origins = match get("CORS_ORIGINS") {
            Some(list) => list
                .split(',')
                .map(|o| o.trim().to_owned())
                .filter(|o| !o.is_empty())
                .collect(),
            None => vec![DEFAULT_DEV_ORIGIN.to_owned()],
        };
        let storage = get("STORAGE_URL")
            .unwrap_or_else(|| "embedded:".to_owned())
            .parse()
            .map_err(|e| bad("STORAGE_URL", e))?;
        let provider_base_url = get("PROVIDER_BASE_URL")
            .map(|u| Url::parse(&u))
            .transpose()
            .map_err(|e| bad("PROVIDER_BASE_URL", e))?;
        let cache_ttl = match get("CACHE_TTL_SECONDS") {
            Some(v) => Duration::from_secs(v.trim().parse().map_err(|e| bad("CACHE_TTL_SECONDS", e))?),
            None => DEFAULT_CACHE_TTL,
        };
        let defaults = ScoringTable::default();
        let score = |key: &'static str, default: u32| -> Result<u32, ConfigError> {
            get(key)
                .map(|v| v.trim().parse().map_err(|e| bad(key, e)))
                .unwrap_or(Ok(default))
        };
        let scoring = ScoringTable {
            exact: score("SCORE_EXACT", defaults.exact)?,
            quadrant: score("SCORE_QUADRANT", defaults.quadrant)?,
            miss: score("SCORE_MISS", defaults.miss)?,
        };

        Ok(Settings {
            bind_addr,
            session_secret: get("SESSION_SECRET"),
            admin_key: get("ADMIN_KEY"),
            cors_origins,
            storage,
            provider_base_url,
            provider_api_key: get("PROVIDER_API_KEY"),
            cache_ttl,
            scoring,
        })
    }
}
