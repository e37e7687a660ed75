use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use crate::analytics::{self, AnalyticsError, ScenarioReport};
use crate::clock::{Clock, SystemClock};
use crate::domain::{
    transition_scenario, Challenge, DomainError, ImageRef, Mood, Role, Scenario, ScenarioId,
    ScenarioStatus, StatementId, UserAccount, UserId, Vision, VisionId,
};
use crate::game::{self, ConfusionMatrix, GameError, GuessResult, PlayerStats, ScoringTable};
use crate::images::{ImagePage, ImageSearchClient, ImageSearchError, ImageSearchQuery};
use crate::storage::{Page, StorageError, Store};
use crate::survey::{self, LikertSummary, SurveyError, SurveyResponse};

pub const MAX_FEED_PAGE_SIZE: u32 = 100;

/// Coarse error class, used by the HTTP layer to pick a status code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Forbidden,
    NotFound,
    Conflict,
    RateLimited,
    Unavailable,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlatformError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Survey(#[from] SurveyError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error(transparent)]
    Images(#[from] ImageSearchError),
    #[error(transparent)]
    Storage(#[from] StorageError),
    #[error("user {0} not found")]
    UnknownUser(UserId),
    #[error("scenario {0} not found")]
    UnknownScenario(ScenarioId),
    #[error("handle {0:?} is already taken")]
    HandleTaken(String),
}

impl PlatformError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            PlatformError::Domain(e) => match e {
                DomainError::InvalidField { .. } => "validation_error",
                DomainError::IllegalTransition { .. } => "illegal_transition",
                DomainError::NotOwner => "not_owner",
                DomainError::RoleRequired(_) => "forbidden",
                DomainError::StatementsFrozen => "statements_frozen",
                DomainError::ScenarioNotPublished => "scenario_not_published",
            },
            PlatformError::Survey(e) => match e {
                SurveyError::UnknownScenario(_) => "unknown_scenario",
                SurveyError::UnknownUser(_) => "unknown_user",
                SurveyError::UnknownStatement(_) => "unknown_statement",
                SurveyError::ScenarioNotPublished => "scenario_not_published",
                SurveyError::DuplicateResponse => "duplicate_response",
                SurveyError::IncompleteAnswers { .. } => "incomplete_answers",
                SurveyError::LevelOutOfRange { .. } => "level_out_of_range",
                SurveyError::Storage(e) => storage_code(e),
            },
            PlatformError::Game(e) => match e {
                GameError::UnknownScenario(_) => "unknown_scenario",
                GameError::UnknownVision(_) => "unknown_vision",
                GameError::UnknownUser(_) => "unknown_user",
                GameError::ScenarioNotPublished => "scenario_not_published",
                GameError::NoEligibleVisions => "no_eligible_visions",
                GameError::SelfGuess => "self_guess",
                GameError::DuplicateGuess => "duplicate_guess",
                GameError::Storage(e) => storage_code(e),
            },
            PlatformError::Analytics(e) => match e {
                AnalyticsError::UnknownScenario(_) => "unknown_scenario",
                AnalyticsError::Forbidden => "forbidden",
                AnalyticsError::Storage(e) => storage_code(e),
            },
            PlatformError::Images(e) => match e {
                ImageSearchError::InvalidQuery(_) => "invalid_query",
                ImageSearchError::ProviderUnavailable(_) => "provider_unavailable",
                ImageSearchError::RateLimited { .. } => "rate_limited",
            },
            PlatformError::Storage(e) => storage_code(e),
            PlatformError::UnknownUser(_) => "unknown_user",
            PlatformError::UnknownScenario(_) => "unknown_scenario",
            PlatformError::HandleTaken(_) => "handle_taken",
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self.code() {
            "validation_error" | "illegal_transition" | "statements_frozen"
            | "scenario_not_published" | "incomplete_answers" | "level_out_of_range"
            | "invalid_query" | "self_guess" => ErrorKind::Validation,
            "not_owner" | "forbidden" => ErrorKind::Forbidden,
            "unknown_scenario" | "unknown_user" | "unknown_statement" | "unknown_vision"
            | "no_eligible_visions" | "not_found" => ErrorKind::NotFound,
            "duplicate_response" | "duplicate_guess" | "handle_taken" | "conflict"
            | "transaction_conflict" => ErrorKind::Conflict,
            "rate_limited" => ErrorKind::RateLimited,
            "provider_unavailable" | "storage_unavailable" => ErrorKind::Unavailable,
            _ => ErrorKind::Internal,
        }
    }
}

fn storage_code(e: &StorageError) -> &'static str {
    match e {
        StorageError::ConflictOnUnique { .. } => "conflict",
        StorageError::NotFound { .. } => "not_found",
        StorageError::TransactionConflict => "transaction_conflict",
        StorageError::Unavailable(_) | StorageError::SchemaMismatch { .. } => {
            "storage_unavailable"
        }
        StorageError::Corrupt(_) | StorageError::Config(_) => "internal_error",
    }
}

type Result<T> = std::result::Result<T, PlatformError>;

/// Every platform operation behind one handle: storage, time, scoring and
/// image search.
pub struct Platform {
    store: Arc<Store>,
    clock: Arc<dyn Clock>,
    scoring: ScoringTable,
    images: ImageSearchClient,
}

impl Platform {
    pub fn new(store: Arc<Store>, images: ImageSearchClient) -> Self {
        Platform {
            store,
            clock: Arc::new(SystemClock),
            scoring: ScoringTable::default(),
            images,
        }
    }

    /// In-memory store, stub image provider. For tests and demos.
    pub fn in_memory() -> Result<Self> {
        Ok(Platform::new(Arc::new(Store::in_memory()?), ImageSearchClient::stub()))
    }

    pub fn with_clock(mut self, clock: Arc<dyn Clock>) -> Self {
        self.clock = clock;
        self
    }

    pub fn with_scoring(mut self, scoring: ScoringTable) -> Self {
        self.scoring = scoring;
        self
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn scoring(&self) -> &ScoringTable {
        &self.scoring
    }

    // ---- accounts ----

    pub fn create_user(&self, handle: &str, role: Role) -> Result<UserAccount> {
        let user = UserAccount::new(handle, role, self.clock.now())?;
        self.store.atomically(|tx| {
            if tx.find_user_by_handle(&user.handle)?.is_some() {
                return Err(PlatformError::HandleTaken(user.handle.clone()));
            }
            tx.insert_user(&user).map_err(|e| match e {
                StorageError::ConflictOnUnique { .. } => {
                    PlatformError::HandleTaken(user.handle.clone())
                }
                other => other.into(),
            })
        })?;
        Ok(user)
    }

    pub fn user(&self, id: &UserId) -> Result<UserAccount> {
        self.store.read(|tx| {
            tx.find_user(id)?
                .ok_or_else(|| PlatformError::UnknownUser(id.clone()))
        })
    }

    // ---- scenarios ----

    pub fn create_scenario(
        &self,
        owner: &UserId,
        title: &str,
        description: &str,
        statements: &[String],
    ) -> Result<Scenario> {
        let now = self.clock.now();
        self.store.atomically(|tx| {
            let owner = tx
                .find_user(owner)?
                .ok_or_else(|| PlatformError::UnknownUser(owner.clone()))?;
            let scenario = Scenario::draft(&owner, title, description, statements, now)?;
            tx.insert_scenario(&scenario)?;
            Ok(scenario)
        })
    }

    pub fn replace_statements(
        &self,
        actor: &UserId,
        scenario_id: &ScenarioId,
        statements: &[String],
    ) -> Result<Scenario> {
        self.store.atomically(|tx| {
            let current = visible_scenario(tx.find_scenario(scenario_id)?, actor, scenario_id)?;
            let next = current.with_statements(actor, statements)?;
            tx.update_scenario(&next)?;
            Ok(next)
        })
    }

    pub fn transition_scenario(
        &self,
        actor: &UserId,
        scenario_id: &ScenarioId,
        target: ScenarioStatus,
    ) -> Result<Scenario> {
        let now = self.clock.now();
        self.store.atomically(|tx| {
            let current = visible_scenario(tx.find_scenario(scenario_id)?, actor, scenario_id)?;
            let next = transition_scenario(&current, actor, target, now)?;
            tx.update_scenario(&next)?;
            Ok(next)
        })
    }

    /// Drafts are only visible to their owner.
    pub fn scenario(&self, viewer: &UserId, scenario_id: &ScenarioId) -> Result<Scenario> {
        self.store
            .read(|tx| visible_scenario(tx.find_scenario(scenario_id)?, viewer, scenario_id))
    }

    pub fn list_scenarios(
        &self,
        viewer: &UserId,
        status: Option<ScenarioStatus>,
    ) -> Result<Vec<Scenario>> {
        let all = self
            .store
            .read(|tx| tx.list_scenarios(status).map_err(PlatformError::from))?;
        Ok(all
            .into_iter()
            .filter(|s| s.status != ScenarioStatus::Draft || &s.owner == viewer)
            .collect())
    }

    // ---- survey ----

    pub fn submit_response(
        &self,
        user: &UserId,
        scenario_id: &ScenarioId,
        answers: &BTreeMap<StatementId, i64>,
    ) -> Result<SurveyResponse> {
        Ok(survey::submit_response(
            &self.store,
            self.clock.now(),
            user,
            scenario_id,
            answers,
        )?)
    }

    pub fn aggregate_statement(
        &self,
        scenario_id: &ScenarioId,
        statement_id: &StatementId,
    ) -> Result<LikertSummary> {
        Ok(survey::aggregate_statement(&self.store, scenario_id, statement_id)?)
    }

    // ---- visions ----

    pub async fn search_images(&self, query: &ImageSearchQuery) -> Result<ImagePage> {
        Ok(self.images.search_images(query).await?)
    }

    pub fn create_vision(
        &self,
        author: &UserId,
        scenario_id: &ScenarioId,
        image: ImageRef,
        caption: &str,
        mood: Mood,
    ) -> Result<Vision> {
        let now = self.clock.now();
        self.store.atomically(|tx| {
            let author = tx
                .find_user(author)?
                .ok_or_else(|| PlatformError::UnknownUser(author.clone()))?;
            let scenario =
                visible_scenario(tx.find_scenario(scenario_id)?, &author.user_id, scenario_id)?;
            let vision = Vision::create(&scenario, &author, image.clone(), caption, mood, now)?;
            tx.insert_vision(&vision)?;
            Ok(vision)
        })
    }

    /// The public feed, newest first. Moods are visible here.
    pub fn vision_feed(
        &self,
        scenario_id: &ScenarioId,
        page: u32,
        page_size: u32,
    ) -> Result<Page<Vision>> {
        if page == 0 {
            return Err(DomainError::InvalidField {
                field: "page",
                reason: "starts at 1".into(),
            }
            .into());
        }
        if !(1..=MAX_FEED_PAGE_SIZE).contains(&page_size) {
            return Err(DomainError::InvalidField {
                field: "page_size",
                reason: format!("must be between 1 and {MAX_FEED_PAGE_SIZE}"),
            }
            .into());
        }
        self.store.read(|tx| {
            let scenario = tx
                .find_scenario(scenario_id)?
                .filter(|s| s.status != ScenarioStatus::Draft)
                .ok_or_else(|| PlatformError::UnknownScenario(scenario_id.clone()))?;
            Ok(tx.paginate_visions(&scenario.scenario_id, page, page_size)?)
        })
    }

    pub fn vision(&self, id: &VisionId) -> Result<Vision> {
        self.store.read(|tx| {
            tx.find_vision(id)?
                .ok_or_else(|| GameError::UnknownVision(id.clone()).into())
        })
    }

    // ---- game ----

    pub fn next_challenge<R: Rng + ?Sized>(
        &self,
        player: &UserId,
        scenario_id: &ScenarioId,
        rng: &mut R,
    ) -> Result<Challenge> {
        Ok(game::next_challenge(&self.store, rng, player, scenario_id)?)
    }

    pub fn submit_guess(
        &self,
        player: &UserId,
        vision_id: &VisionId,
        guessed: Mood,
    ) -> Result<GuessResult> {
        Ok(game::submit_guess(
            &self.store,
            self.clock.now(),
            &self.scoring,
            player,
            vision_id,
            guessed,
        )?)
    }

    pub fn player_stats(&self, player: &UserId, scenario_id: &ScenarioId) -> Result<PlayerStats> {
        Ok(game::player_stats(&self.store, player, scenario_id)?)
    }

    pub fn empathy_profile(
        &self,
        player: &UserId,
        scenario_id: &ScenarioId,
    ) -> Result<ConfusionMatrix> {
        Ok(game::empathy_profile(&self.store, player, scenario_id)?)
    }

    // ---- analytics ----

    pub fn scenario_report(&self, caller: Role, scenario_id: &ScenarioId) -> Result<ScenarioReport> {
        Ok(analytics::scenario_report(&self.store, caller, scenario_id)?)
    }
}

fn visible_scenario(
    found: Option<Scenario>,
    viewer: &UserId,
    id: &ScenarioId,
) -> Result<Scenario> {
    found
        .filter(|s| s.status != ScenarioStatus::Draft || &s.owner == viewer)
        .ok_or_else(|| PlatformError::UnknownScenario(id.clone()))
}
