use std::collections::BTreeMap;

use chrono::{DateTime, SecondsFormat, Utc};
use rusqlite::{params, Connection, OptionalExtension, Row};
use serde::Serialize;

use super::StorageError;
use crate::domain::{
    ImageRef, Mood, ResponseId, Role, Scenario, ScenarioId, ScenarioStatus, Statement,
    StatementId, Timestamp, UserAccount, UserId, Vision, VisionId,
};
use crate::game::{Guess, PlayerStats};
use crate::survey::SurveyResponse;

type Result<T> = std::result::Result<T, StorageError>;

/// One page of a reverse-chronological listing. `page` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Page<T> {
    pub items: Vec<T>,
    pub page: u32,
    pub page_size: u32,
    pub total: u64,
}

/// Repository view over one open transaction.
pub struct Tx<'c> {
    conn: &'c Connection,
}

fn ts(t: &Timestamp) -> String {
    // fixed width so text order equals time order
    t.to_rfc3339_opts(SecondsFormat::Nanos, true)
}

fn parse_ts(raw: &str) -> Result<Timestamp> {
    DateTime::parse_from_rfc3339(raw)
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| StorageError::Corrupt(format!("timestamp {raw:?}: {e}")))
}

fn parse<T: std::str::FromStr>(what: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| StorageError::Corrupt(format!("{what} {raw:?}")))
}

fn offset(page: u32, page_size: u32) -> i64 {
    i64::from(page.saturating_sub(1)) * i64::from(page_size)
}

struct RawUser {
    user_id: String,
    handle: String,
    role: String,
    created_at: String,
}

impl RawUser {
    fn from_row(row: &Row<'_>) -> rusqlite::Result<Self> {
        Ok(RawUser {
            user_id: row.get(0)?,
            handle: row.get(1)?,
            role: row.get(2)?,
            created_at: row.get(3)?,
        })
    }

    fn into_user(self) -> Result<UserAccount> {
        Ok(UserAccount {
            user_id: self.user_id.into(),
            handle: self.handle,
            role: parse::<Role>("role", &self.role)?,
            created_at: parse_ts(&self.created_at)?,
        })
    }
}

struct RawScenario {
    scenario_id: String,
    owner: String,
    title: String,
    description: String,
    status: String,
    created_at: String,
    published_at: Option<String>,
}

impl RawScenario {
    fn from_row(row: &Row<'_>) -> rusqlite::Result<Self> {
        Ok(RawScenario {
            scenario_id: row.get(0)?,
            owner: row.get(1)?,
            title: row.get(2)?,
            description: row.get(3)?,
            status: row.get(4)?,
            created_at: row.get(5)?,
            published_at: row.get(6)?,
        })
    }
}

const SCENARIO_COLUMNS: &str =
    "scenario_id, owner, title, description, status, created_at, published_at";

const VISION_COLUMNS: &str = "vision_id, scenario_id, author, source_url, thumbnail_url, \
     attribution, provider_id, caption, mood, created_at";

fn vision_from_row(row: &Row<'_>) -> rusqlite::Result<[String; 10]> {
    Ok([
        row.get(0)?,
        row.get(1)?,
        row.get(2)?,
        row.get(3)?,
        row.get(4)?,
        row.get(5)?,
        row.get(6)?,
        row.get(7)?,
        row.get(8)?,
        row.get(9)?,
    ])
}

fn into_vision(raw: [String; 10]) -> Result<Vision> {
    let [vision_id, scenario_id, author, source_url, thumbnail_url, attribution, provider_id, caption, mood, created_at] =
        raw;
    Ok(Vision {
        vision_id: vision_id.into(),
        scenario_id: scenario_id.into(),
        author: author.into(),
        image: ImageRef {
            source_url,
            thumbnail_url,
            attribution,
            provider_id,
        },
        caption,
        mood: parse::<Mood>("mood", &mood)?,
        created_at: parse_ts(&created_at)?,
    })
}

const GUESS_COLUMNS: &str = "guess_id, guesser, vision_id, scenario_id, guessed_mood, \
     actual_mood, points_awarded, created_at";

struct RawGuess {
    guess_id: String,
    guesser: String,
    vision_id: String,
    scenario_id: String,
    guessed_mood: String,
    actual_mood: String,
    points_awarded: u32,
    created_at: String,
}

fn guess_from_row(row: &Row<'_>) -> rusqlite::Result<RawGuess> {
    Ok(RawGuess {
        guess_id: row.get(0)?,
        guesser: row.get(1)?,
        vision_id: row.get(2)?,
        scenario_id: row.get(3)?,
        guessed_mood: row.get(4)?,
        actual_mood: row.get(5)?,
        points_awarded: row.get(6)?,
        created_at: row.get(7)?,
    })
}

fn into_guess(raw: RawGuess) -> Result<Guess> {
    Ok(Guess {
        guess_id: raw.guess_id.into(),
        guesser: raw.guesser.into(),
        vision_id: raw.vision_id.into(),
        scenario_id: raw.scenario_id.into(),
        guessed_mood: parse::<Mood>("mood", &raw.guessed_mood)?,
        actual_mood: parse::<Mood>("mood", &raw.actual_mood)?,
        points_awarded: raw.points_awarded,
        created_at: parse_ts(&raw.created_at)?,
    })
}

impl<'c> Tx<'c> {
    pub(super) fn new(conn: &'c Connection) -> Self {
        Tx { conn }
    }

    // ---- users ----

    pub fn insert_user(&self, user: &UserAccount) -> Result<()> {
        self.conn
            .prepare_cached(
                "INSERT INTO users (user_id, handle, role, created_at) VALUES (?1, ?2, ?3, ?4)",
            )?
            .execute(params![
                user.user_id.as_str(),
                user.handle,
                user.role.as_str(),
                ts(&user.created_at)
            ])
            .map_err(|e| StorageError::from_sqlite(e, "user"))?;
        Ok(())
    }

    pub fn find_user(&self, id: &UserId) -> Result<Option<UserAccount>> {
        self.conn
            .prepare_cached("SELECT user_id, handle, role, created_at FROM users WHERE user_id = ?1")?
            .query_row([id.as_str()], RawUser::from_row)
            .optional()?
            .map(RawUser::into_user)
            .transpose()
    }

    pub fn get_user(&self, id: &UserId) -> Result<UserAccount> {
        self.find_user(id)?
            .ok_or_else(|| StorageError::not_found("user", id))
    }

    pub fn find_user_by_handle(&self, handle: &str) -> Result<Option<UserAccount>> {
        self.conn
            .prepare_cached("SELECT user_id, handle, role, created_at FROM users WHERE handle = ?1")?
            .query_row([handle], RawUser::from_row)
            .optional()?
            .map(RawUser::into_user)
            .transpose()
    }

    /// All users, oldest first.
    pub fn list_users(&self) -> Result<Vec<UserAccount>> {
        let mut stmt = self
            .conn
            .prepare_cached("SELECT user_id, handle, role, created_at FROM users ORDER BY seq")?;
        let rows = stmt.query_map([], RawUser::from_row)?;
        rows.map(|r| r.map_err(StorageError::from).and_then(RawUser::into_user))
            .collect()
    }

    // ---- scenarios ----

    pub fn insert_scenario(&self, scenario: &Scenario) -> Result<()> {
        self.conn
            .prepare_cached(&format!(
                "INSERT INTO scenarios ({SCENARIO_COLUMNS}) VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7)"
            ))?
            .execute(params![
                scenario.scenario_id.as_str(),
                scenario.owner.as_str(),
                scenario.title,
                scenario.description,
                scenario.status.as_str(),
                ts(&scenario.created_at),
                scenario.published_at.as_ref().map(ts),
            ])
            .map_err(|e| StorageError::from_sqlite(e, "scenario"))?;
        self.write_statements(scenario)
    }

    /// Overwrites the stored scenario, statements included.
    pub fn update_scenario(&self, scenario: &Scenario) -> Result<()> {
        let changed = self
            .conn
            .prepare_cached(
                "UPDATE scenarios SET owner = ?2, title = ?3, description = ?4, status = ?5, \
                 created_at = ?6, published_at = ?7 WHERE scenario_id = ?1",
            )?
            .execute(params![
                scenario.scenario_id.as_str(),
                scenario.owner.as_str(),
                scenario.title,
                scenario.description,
                scenario.status.as_str(),
                ts(&scenario.created_at),
                scenario.published_at.as_ref().map(ts),
            ])?;
        if changed == 0 {
            return Err(StorageError::not_found("scenario", &scenario.scenario_id));
        }
        self.conn
            .prepare_cached("DELETE FROM statements WHERE scenario_id = ?1")?
            .execute([scenario.scenario_id.as_str()])?;
        self.write_statements(scenario)
    }

    fn write_statements(&self, scenario: &Scenario) -> Result<()> {
        let mut stmt = self.conn.prepare_cached(
            "INSERT INTO statements (statement_id, scenario_id, position, text) VALUES (?1, ?2, ?3, ?4)",
        )?;
        for s in &scenario.statements {
            stmt.execute(params![
                s.statement_id.as_str(),
                scenario.scenario_id.as_str(),
                s.position,
                s.text
            ])
            .map_err(|e| StorageError::from_sqlite(e, "statement"))?;
        }
        Ok(())
    }

    fn load_scenario(&self, raw: RawScenario) -> Result<Scenario> {
        let mut stmt = self.conn.prepare_cached(
            "SELECT statement_id, text, position FROM statements WHERE scenario_id = ?1 ORDER BY position",
        )?;
        let statements = stmt
            .query_map([&raw.scenario_id], |row| {
                Ok(Statement {
                    statement_id: StatementId::from(row.get::<_, String>(0)?),
                    text: row.get(1)?,
                    position: row.get(2)?,
                })
            })?
            .collect::<rusqlite::Result<Vec<_>>>()?;
        Ok(Scenario {
            scenario_id: raw.scenario_id.into(),
            owner: raw.owner.into(),
            title: raw.title,
            description: raw.description,
            statements,
            status: parse::<ScenarioStatus>("status", &raw.status)?,
            created_at: parse_ts(&raw.created_at)?,
            published_at: raw.published_at.as_deref().map(parse_ts).transpose()?,
        })
    }

    pub fn find_scenario(&self, id: &ScenarioId) -> Result<Option<Scenario>> {
        let raw = self
            .conn
            .prepare_cached(&format!(
                "SELECT {SCENARIO_COLUMNS} FROM scenarios WHERE scenario_id = ?1"
            ))?
            .query_row([id.as_str()], RawScenario::from_row)
            .optional()?;
        raw.map(|r| self.load_scenario(r)).transpose()
    }

    pub fn get_scenario(&self, id: &ScenarioId) -> Result<Scenario> {
        self.find_scenario(id)?
            .ok_or_else(|| StorageError::not_found("scenario", id))
    }

    /// Newest first, optionally filtered by status.
    pub fn list_scenarios(&self, status: Option<ScenarioStatus>) -> Result<Vec<Scenario>> {
        let total = self.count_scenarios(status)?;
        Ok(self
            .paginate_scenarios(status, 1, total.max(1) as u32)?
            .items)
    }

    fn count_scenarios(&self, status: Option<ScenarioStatus>) -> Result<u64> {
        Ok(self
            .conn
            .prepare_cached(
                "SELECT COUNT(*) FROM scenarios WHERE ?1 IS NULL OR status = ?1",
            )?
            .query_row([status.map(|s| s.as_str())], |row| row.get::<_, i64>(0))? as u64)
    }

    pub fn paginate_scenarios(
        &self,
        status: Option<ScenarioStatus>,
        page: u32,
        page_size: u32,
    ) -> Result<Page<Scenario>> {
        let total = self.count_scenarios(status)?;
        let raws = self
            .conn
            .prepare_cached(&format!(
                "SELECT {SCENARIO_COLUMNS} FROM scenarios WHERE ?1 IS NULL OR status = ?1 \
                 ORDER BY created_at DESC, seq DESC LIMIT ?2 OFFSET ?3"
            ))?
            .query_map(
                params![status.map(|s| s.as_str()), page_size, offset(page, page_size)],
                RawScenario::from_row,
            )?
            .collect::<rusqlite::Result<Vec<_>>>()?;
        let items = raws
            .into_iter()
            .map(|r| self.load_scenario(r))
            .collect::<Result<Vec<_>>>()?;
        Ok(Page {
            items,
            page,
            page_size,
            total,
        })
    }

    // ---- survey responses ----

    pub fn insert_response(&self, response: &SurveyResponse) -> Result<()> {
        self.conn
            .prepare_cached(
                "INSERT INTO survey_responses (response_id, scenario_id, user_id, submitted_at) \
                 VALUES (?1, ?2, ?3, ?4)",
            )?
            .execute(params![
                response.response_id.as_str(),
                response.scenario_id.as_str(),
                response.user_id.as_str(),
                ts(&response.submitted_at)
            ])
            .map_err(|e| StorageError::from_sqlite(e, "survey response"))?;
        let mut stmt = self.conn.prepare_cached(
            "INSERT INTO survey_answers (response_id, statement_id, level) VALUES (?1, ?2, ?3)",
        )?;
        for (statement, level) in &response.answers {
            stmt.execute(params![
                response.response_id.as_str(),
                statement.as_str(),
                level
            ])
            .map_err(|e| StorageError::from_sqlite(e, "survey answer"))?;
        }
        Ok(())
    }

    fn load_answers(&self, response_id: &str) -> Result<BTreeMap<StatementId, u8>> {
        let mut stmt = self.conn.prepare_cached(
            "SELECT statement_id, level FROM survey_answers WHERE response_id = ?1",
        )?;
        let rows = stmt.query_map([response_id], |row| {
            Ok((StatementId::from(row.get::<_, String>(0)?), row.get::<_, u8>(1)?))
        })?;
        Ok(rows.collect::<rusqlite::Result<_>>()?)
    }

    fn responses_where(&self, clause: &str, args: &[&str]) -> Result<Vec<SurveyResponse>> {
        let raws = self
            .conn
            .prepare_cached(&format!(
                "SELECT response_id, scenario_id, user_id, submitted_at FROM survey_responses \
                 WHERE {clause} ORDER BY seq"
            ))?
            .query_map(rusqlite::params_from_iter(args), |row| {
                Ok((
                    row.get::<_, String>(0)?,
                    row.get::<_, String>(1)?,
                    row.get::<_, String>(2)?,
                    row.get::<_, String>(3)?,
                ))
            })?
            .collect::<rusqlite::Result<Vec<_>>>()?;
        raws.into_iter()
            .map(|(response_id, scenario_id, user_id, submitted_at)| {
                Ok(SurveyResponse {
                    answers: self.load_answers(&response_id)?,
                    response_id: ResponseId::from(response_id),
                    scenario_id: scenario_id.into(),
                    user_id: user_id.into(),
                    submitted_at: parse_ts(&submitted_at)?,
                })
            })
            .collect()
    }

    pub fn find_response(
        &self,
        scenario_id: &ScenarioId,
        user_id: &UserId,
    ) -> Result<Option<SurveyResponse>> {
        Ok(self
            .responses_where(
                "scenario_id = ?1 AND user_id = ?2",
                &[scenario_id.as_str(), user_id.as_str()],
            )?
            .pop())
    }

    pub fn get_response(&self, id: &ResponseId) -> Result<SurveyResponse> {
        self.responses_where("response_id = ?1", &[id.as_str()])?
            .pop()
            .ok_or_else(|| StorageError::not_found("survey response", id))
    }

    /// Responses to a scenario in submission order.
    pub fn list_responses(&self, scenario_id: &ScenarioId) -> Result<Vec<SurveyResponse>> {
        self.responses_where("scenario_id = ?1", &[scenario_id.as_str()])
    }

    /// Every level recorded for one statement.
    pub fn statement_levels(&self, statement_id: &StatementId) -> Result<Vec<u8>> {
        let mut stmt = self
            .conn
            .prepare_cached("SELECT level FROM survey_answers WHERE statement_id = ?1")?;
        let rows = stmt.query_map([statement_id.as_str()], |row| row.get::<_, u8>(0))?;
        Ok(rows.collect::<rusqlite::Result<_>>()?)
    }

    // ---- visions ----

    pub fn insert_vision(&self, vision: &Vision) -> Result<()> {
        self.conn
            .prepare_cached(&format!(
                "INSERT INTO visions ({VISION_COLUMNS}) VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10)"
            ))?
            .execute(params![
                vision.vision_id.as_str(),
                vision.scenario_id.as_str(),
                vision.author.as_str(),
                vision.image.source_url,
                vision.image.thumbnail_url,
                vision.image.attribution,
                vision.image.provider_id,
                vision.caption,
                vision.mood.name(),
                ts(&vision.created_at),
            ])
            .map_err(|e| StorageError::from_sqlite(e, "vision"))?;
        Ok(())
    }

    pub fn find_vision(&self, id: &VisionId) -> Result<Option<Vision>> {
        self.conn
            .prepare_cached(&format!(
                "SELECT {VISION_COLUMNS} FROM visions WHERE vision_id = ?1"
            ))?
            .query_row([id.as_str()], vision_from_row)
            .optional()?
            .map(into_vision)
            .transpose()
    }

    pub fn get_vision(&self, id: &VisionId) -> Result<Vision> {
        self.find_vision(id)?
            .ok_or_else(|| StorageError::not_found("vision", id))
    }

    /// Visions of a scenario, oldest first.
    pub fn list_visions(&self, scenario_id: &ScenarioId) -> Result<Vec<Vision>> {
        let mut stmt = self.conn.prepare_cached(&format!(
            "SELECT {VISION_COLUMNS} FROM visions WHERE scenario_id = ?1 ORDER BY seq"
        ))?;
        let rows = stmt.query_map([scenario_id.as_str()], vision_from_row)?;
        rows.map(|r| r.map_err(StorageError::from).and_then(into_vision))
            .collect()
    }

    /// Feed page, newest first. Not stable under concurrent inserts.
    pub fn paginate_visions(
        &self,
        scenario_id: &ScenarioId,
        page: u32,
        page_size: u32,
    ) -> Result<Page<Vision>> {
        let total: i64 = self
            .conn
            .prepare_cached("SELECT COUNT(*) FROM visions WHERE scenario_id = ?1")?
            .query_row([scenario_id.as_str()], |row| row.get(0))?;
        let mut stmt = self.conn.prepare_cached(&format!(
            "SELECT {VISION_COLUMNS} FROM visions WHERE scenario_id = ?1 \
             ORDER BY created_at DESC, seq DESC LIMIT ?2 OFFSET ?3"
        ))?;
        let items = stmt
            .query_map(
                params![scenario_id.as_str(), page_size, offset(page, page_size)],
                vision_from_row,
            )?
            .map(|r| r.map_err(StorageError::from).and_then(into_vision))
            .collect::<Result<Vec<_>>>()?;
        Ok(Page {
            items,
            page,
            page_size,
            total: total as u64,
        })
    }

    // ---- guesses ----

    pub fn insert_guess(&self, guess: &Guess) -> Result<()> {
        self.conn
            .prepare_cached(&format!(
                "INSERT INTO guesses ({GUESS_COLUMNS}) VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8)"
            ))?
            .execute(params![
                guess.guess_id.as_str(),
                guess.guesser.as_str(),
                guess.vision_id.as_str(),
                guess.scenario_id.as_str(),
                guess.guessed_mood.name(),
                guess.actual_mood.name(),
                guess.points_awarded,
                ts(&guess.created_at),
            ])
            .map_err(|e| StorageError::from_sqlite(e, "guess"))?;
        Ok(())
    }

    fn guesses_where(&self, clause: &str, args: &[&str]) -> Result<Vec<Guess>> {
        let mut stmt = self.conn.prepare_cached(&format!(
            "SELECT {GUESS_COLUMNS} FROM guesses WHERE {clause} ORDER BY seq"
        ))?;
        let rows = stmt.query_map(rusqlite::params_from_iter(args), guess_from_row)?;
        rows.map(|r| r.map_err(StorageError::from).and_then(into_guess))
            .collect()
    }

    pub fn find_guess(&self, guesser: &UserId, vision_id: &VisionId) -> Result<Option<Guess>> {
        Ok(self
            .guesses_where(
                "guesser = ?1 AND vision_id = ?2",
                &[guesser.as_str(), vision_id.as_str()],
            )?
            .pop())
    }

    /// One player's guesses in a scenario, in the order they were made.
    pub fn list_player_guesses(
        &self,
        guesser: &UserId,
        scenario_id: &ScenarioId,
    ) -> Result<Vec<Guess>> {
        self.guesses_where(
            "guesser = ?1 AND scenario_id = ?2",
            &[guesser.as_str(), scenario_id.as_str()],
        )
    }

    pub fn list_scenario_guesses(&self, scenario_id: &ScenarioId) -> Result<Vec<Guess>> {
        self.guesses_where("scenario_id = ?1", &[scenario_id.as_str()])
    }

    // ---- player stats ----

    pub fn find_stats(
        &self,
        user_id: &UserId,
        scenario_id: &ScenarioId,
    ) -> Result<Option<PlayerStats>> {
        Ok(self
            .conn
            .prepare_cached(
                "SELECT total_points, guesses_made, exact_matches, current_streak \
                 FROM player_stats WHERE user_id = ?1 AND scenario_id = ?2",
            )?
            .query_row([user_id.as_str(), scenario_id.as_str()], |row| {
                Ok(PlayerStats {
                    user_id: user_id.clone(),
                    scenario_id: scenario_id.clone(),
                    total_points: row.get::<_, i64>(0)? as u64,
                    guesses_made: row.get::<_, i64>(1)? as u64,
                    exact_matches: row.get::<_, i64>(2)? as u64,
                    current_streak: row.get::<_, i64>(3)? as u64,
                })
            })
            .optional()?)
    }

    pub fn upsert_stats(&self, stats: &PlayerStats) -> Result<()> {
        self.conn
            .prepare_cached(
                "INSERT INTO player_stats \
                 (user_id, scenario_id, total_points, guesses_made, exact_matches, current_streak) \
                 VALUES (?1, ?2, ?3, ?4, ?5, ?6) \
                 ON CONFLICT (user_id, scenario_id) DO UPDATE SET \
                 total_points = excluded.total_points, guesses_made = excluded.guesses_made, \
                 exact_matches = excluded.exact_matches, current_streak = excluded.current_streak",
            )?
            .execute(params![
                stats.user_id.as_str(),
                stats.scenario_id.as_str(),
                stats.total_points as i64,
                stats.guesses_made as i64,
                stats.exact_matches as i64,
                stats.current_streak as i64,
            ])?;
        Ok(())
    }

    /// Stats rows of a scenario ordered by user id.
    pub fn list_stats(&self, scenario_id: &ScenarioId) -> Result<Vec<PlayerStats>> {
        let users: Vec<String> = self
            .conn
            .prepare_cached(
                "SELECT user_id FROM player_stats WHERE scenario_id = ?1 ORDER BY user_id",
            )?
            .query_map([scenario_id.as_str()], |row| row.get(0))?
            .collect::<rusqlite::Result<_>>()?;
        users
            .into_iter()
            .filter_map(|u| self.find_stats(&UserId::from(u), scenario_id).transpose())
            .collect()
    }
}
