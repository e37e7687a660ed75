//! Persistence for every entity, with the transactional guarantees the
//! survey and game engines depend on.
//!
//! The embedded backend is SQLite, either in memory or in a single file.
//! All access goes through one connection guarded by a mutex, so every
//! [`Store::atomically`] block is serializable and every [`Store::read`]
//! sees one consistent snapshot.

mod repo;
mod url;

use std::time::Duration;

use parking_lot::Mutex;
use rusqlite::{Connection, ErrorCode, TransactionBehavior};

pub use repo::{Page, Tx};
pub use url::Backend;

/// Schema version this binary expects.
pub const SCHEMA_VERSION: u32 = 1;

const MIGRATIONS: &[(u32, &str)] = &[(1, include_str!("../../migrations/0001_init.sql"))];

/// Attempts made by [`Store::atomically`] when the database reports a
/// conflicting writer.
pub const MAX_TX_ATTEMPTS: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StorageError {
    #[error("{entity} already exists")]
    ConflictOnUnique { entity: &'static str },
    #[error("{entity} {id} not found")]
    NotFound { entity: &'static str, id: String },
    #[error("storage unavailable: {0}")]
    Unavailable(String),
    #[error("transaction conflict, retries exhausted")]
    TransactionConflict,
    #[error(
        "database schema version {found} does not match expected version {expected}; {instruction}"
    )]
    SchemaMismatch {
        found: u32,
        expected: u32,
        instruction: &'static str,
    },
    #[error("corrupt record: {0}")]
    Corrupt(String),
    #[error("storage configuration: {0}")]
    Config(String),
}

impl StorageError {
    pub(crate) fn not_found(entity: &'static str, id: impl ToString) -> Self {
        StorageError::NotFound {
            entity,
            id: id.to_string(),
        }
    }

    pub fn is_not_found(&self) -> bool {
        matches!(self, StorageError::NotFound { .. })
    }

    pub fn is_conflict(&self) -> bool {
        matches!(self, StorageError::ConflictOnUnique { .. })
    }

    fn from_sqlite(err: rusqlite::Error, entity: &'static str) -> Self {
        match err.sqlite_error_code() {
            Some(ErrorCode::ConstraintViolation) => StorageError::ConflictOnUnique { entity },
            Some(ErrorCode::DatabaseBusy) | Some(ErrorCode::DatabaseLocked) => {
                StorageError::TransactionConflict
            }
            _ => StorageError::Unavailable(err.to_string()),
        }
    }
}

impl From<rusqlite::Error> for StorageError {
    fn from(err: rusqlite::Error) -> Self {
        StorageError::from_sqlite(err, "record")
    }
}

/// Handle to an open store. Cheap to share behind an `Arc`.
pub struct Store {
    conn: Mutex<Connection>,
    backend: Backend,
    schema_version: u32,
}

impl Store {
    pub fn open(backend: Backend) -> Result<Self, StorageError> {
        let conn = match &backend {
            Backend::Embedded(None) => Connection::open_in_memory()?,
            Backend::Embedded(Some(path)) => {
                let conn = Connection::open(path)?;
                conn.pragma_update(None, "journal_mode", "WAL")?;
                conn.pragma_update(None, "synchronous", "FULL")?;
                conn
            }
            Backend::Server(_) => {
                return Err(StorageError::Unavailable(format!(
                    "server backend {backend} is not supported by this build; use an embedded: url"
                )))
            }
        };
        conn.busy_timeout(Duration::from_secs(5))?;
        let schema_version = migrate(&conn)?;
        Ok(Store {
            conn: Mutex::new(conn),
            backend,
            schema_version,
        })
    }

    pub fn in_memory() -> Result<Self, StorageError> {
        Store::open(Backend::in_memory())
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn schema_version(&self) -> u32 {
        self.schema_version
    }

    /// Runs `work` in one transaction: all of its writes commit together or
    /// none do. Reads inside `work` observe its own earlier writes.
    pub fn atomically<T, E>(&self, mut work: impl FnMut(&Tx<'_>) -> Result<T, E>) -> Result<T, E>
    where
        E: From<StorageError>,
    {
        let mut attempt = 0;
        loop {
            attempt += 1;
            let mut conn = self.conn.lock();
            let tx = match conn.transaction_with_behavior(TransactionBehavior::Immediate) {
                Ok(tx) => tx,
                Err(err) => match StorageError::from(err) {
                    StorageError::TransactionConflict if attempt < MAX_TX_ATTEMPTS => continue,
                    other => return Err(other.into()),
                },
            };
            let value = work(&Tx::new(&tx))?;
            match tx.commit() {
                Ok(()) => return Ok(value),
                Err(err) => match StorageError::from(err) {
                    StorageError::TransactionConflict if attempt < MAX_TX_ATTEMPTS => continue,
                    other => return Err(other.into()),
                },
            }
        }
    }

    /// Runs read-only `work` against a single consistent snapshot.
    pub fn read<T, E>(&self, work: impl FnOnce(&Tx<'_>) -> Result<T, E>) -> Result<T, E>
    where
        E: From<StorageError>,
    {
        let mut conn = self.conn.lock();
        let tx = conn
            .transaction_with_behavior(TransactionBehavior::Deferred)
            .map_err(StorageError::from)?;
        let value = work(&Tx::new(&tx))?;
        // dropping rolls back; nothing was written anyway
        drop(tx);
        Ok(value)
    }
}

fn migrate(conn: &Connection) -> Result<u32, StorageError> {
    let found: u32 = conn.pragma_query_value(None, "user_version", |row| row.get(0))?;
    if found > SCHEMA_VERSION {
        return Err(StorageError::SchemaMismatch {
            found,
            expected: SCHEMA_VERSION,
            instruction: "the database was written by a newer release; upgrade this binary",
        });
    }
    for (version, sql) in MIGRATIONS.iter().filter(|(v, _)| *v > found) {
        conn.execute_batch(&format!(
            "BEGIN;\n{sql}\nPRAGMA user_version = {version};\nCOMMIT;"
        ))
        .map_err(|e| StorageError::Unavailable(format!("migration {version} failed: {e}")))?;
    }
    Ok(SCHEMA_VERSION)
}
