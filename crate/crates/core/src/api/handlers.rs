use std::collections::BTreeMap;

use axum::extract::{Path, State};
use axum::http::{HeaderMap, StatusCode};
use axum::Json;
use chrono::Utc;
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::extract::{ApiJson, ApiQuery, Auth, MaybeAuth, ADMIN_KEY_HEADER};
use super::{ApiError, AppState, Session};
use crate::analytics::ScenarioReport;
use crate::domain::{
    mood_catalog, Challenge, ImageRef, Mood, MoodEntry, Role, Scenario, ScenarioId,
    ScenarioStatus, Statement, StatementId, UserId, Vision, VisionId,
};
use crate::game::{ConfusionMatrix, GuessResult, PlayerStats};
use crate::images::{ImagePage, ImageSearchQuery};
use crate::storage::Page;
use crate::survey::{SurveyResponse, LEVEL_LABELS};

type ApiResult<T> = Result<Json<T>, ApiError>;
type Created<T> = Result<(StatusCode, Json<T>), ApiError>;

pub const DEFAULT_FEED_PAGE_SIZE: u32 = 20;

pub async fn health(State(state): State<AppState>, _: MaybeAuth) -> ApiResult<Value> {
    Ok(Json(json!({
        "status": "ok",
        "schema_version": state.platform.store().schema_version(),
    })))
}

pub async fn moods(_: MaybeAuth) -> ApiResult<Vec<MoodEntry>> {
    Ok(Json(mood_catalog().into_iter().map(MoodEntry::from).collect()))
}

#[derive(Deserialize)]
pub struct NewSession {
    handle: String,
    #[serde(default)]
    role: Option<Role>,
}

pub async fn create_session(
    State(state): State<AppState>,
    headers: HeaderMap,
    _: MaybeAuth,
    ApiJson(body): ApiJson<NewSession>,
) -> Created<Session> {
    let role = body.role.unwrap_or(Role::Citizen);
    if role == Role::Policymaker {
        let supplied = headers
            .get(ADMIN_KEY_HEADER)
            .and_then(|v| v.to_str().ok());
        let authorised = match (&state.admin_key, supplied) {
            (Some(expected), Some(given)) => {
                Sha256::digest(expected.as_bytes()) == Sha256::digest(given.as_bytes())
            }
            _ => false,
        };
        if !authorised {
            return Err(ApiError::forbidden(
                "policymaker sessions require a valid admin key",
            ));
        }
    }
    let user = state.platform.create_user(&body.handle, role)?;
    let session = state.signer.issue(&user, Utc::now());
    Ok((StatusCode::CREATED, Json(session)))
}

#[derive(Deserialize)]
pub struct NewScenario {
    title: String,
    #[serde(default)]
    description: String,
    #[serde(default)]
    statements: Vec<String>,
}

pub async fn create_scenario(
    State(state): State<AppState>,
    Auth(claims): Auth,
    ApiJson(body): ApiJson<NewScenario>,
) -> Created<Scenario> {
    if claims.role != Role::Policymaker {
        return Err(ApiError::forbidden("only policymakers can create scenarios"));
    }
    let scenario = state.platform.create_scenario(
        &claims.user_id,
        &body.title,
        &body.description,
        &body.statements,
    )?;
    Ok((StatusCode::CREATED, Json(scenario)))
}

#[derive(Deserialize)]
pub struct StatusChange {
    status: ScenarioStatus,
}

pub async fn set_status(
    State(state): State<AppState>,
    Auth(claims): Auth,
    Path(id): Path<String>,
    ApiJson(body): ApiJson<StatusChange>,
) -> ApiResult<Scenario> {
    Ok(Json(state.platform.transition_scenario(
        &claims.user_id,
        &ScenarioId::from(id),
        body.status,
    )?))
}

#[derive(Deserialize)]
pub struct StatementList {
    statements: Vec<String>,
}

pub async fn replace_statements(
    State(state): State<AppState>,
    Auth(claims): Auth,
    Path(id): Path<String>,
    ApiJson(body): ApiJson<StatementList>,
) -> ApiResult<Scenario> {
    Ok(Json(state.platform.replace_statements(
        &claims.user_id,
        &ScenarioId::from(id),
        &body.statements,
    )?))
}

#[derive(Deserialize)]
pub struct ScenarioFilter {
    #[serde(default)]
    status: Option<ScenarioStatus>,
}

pub async fn list_scenarios(
    State(state): State<AppState>,
    Auth(claims): Auth,
    ApiQuery(filter): ApiQuery<ScenarioFilter>,
) -> ApiResult<Vec<Scenario>> {
    Ok(Json(
        state
            .platform
            .list_scenarios(&claims.user_id, filter.status)?,
    ))
}

pub async fn get_scenario(
    State(state): State<AppState>,
    Auth(claims): Auth,
    Path(id): Path<String>,
) -> ApiResult<Scenario> {
    Ok(Json(
        state
            .platform
            .scenario(&claims.user_id, &ScenarioId::from(id))?,
    ))
}

#[derive(Serialize)]
pub struct ScaleLevel {
    level: u8,
    label: &'static str,
}

#[derive(Serialize)]
pub struct SurveyForm {
    scenario_id: ScenarioId,
    title: String,
    scale: Vec<ScaleLevel>,
    statements: Vec<Statement>,
}

pub async fn get_survey(
    State(state): State<AppState>,
    Auth(claims): Auth,
    Path(id): Path<String>,
) -> ApiResult<SurveyForm> {
    let scenario = state
        .platform
        .scenario(&claims.user_id, &ScenarioId::from(id))?;
    Ok(Json(SurveyForm {
        scenario_id: scenario.scenario_id,
        title: scenario.title,
        scale: LEVEL_LABELS
            .iter()
            .enumerate()
            .map(|(i, label)| ScaleLevel {
                level: i as u8 + 1,
                label,
            })
            .collect(),
        statements: scenario.statements,
    }))
}

#[derive(Deserialize)]
pub struct Answers {
    answers: BTreeMap<StatementId, i64>,
}

pub async fn submit_response(
    State(state): State<AppState>,
    Auth(claims): Auth,
    Path(id): Path<String>,
    ApiJson(body): ApiJson<Answers>,
) -> Created<SurveyResponse> {
    let response =
        state
            .platform
            .submit_response(&claims.user_id, &ScenarioId::from(id), &body.answers)?;
    Ok((StatusCode::CREATED, Json(response)))
}

#[derive(Deserialize)]
pub struct ImageParams {
    #[serde(default)]
    q: String,
    page: Option<u32>,
    per_page: Option<u32>,
}

pub async fn search_images(
    State(state): State<AppState>,
    Auth(_): Auth,
    ApiQuery(params): ApiQuery<ImageParams>,
) -> ApiResult<ImagePage> {
    let query = ImageSearchQuery::new(&params.q, params.page, params.per_page)
        .map_err(crate::PlatformError::from)?;
    Ok(Json(state.platform.search_images(&query).await?))
}

#[derive(Deserialize)]
pub struct NewVision {
    #[serde(default)]
    image: Option<ImageRef>,
    /// Direct image URL, used when search is unavailable.
    #[serde(default)]
    image_url: Option<String>,
    caption: String,
    mood: Mood,
}

pub async fn create_vision(
    State(state): State<AppState>,
    Auth(claims): Auth,
    Path(id): Path<String>,
    ApiJson(body): ApiJson<NewVision>,
) -> Created<Vision> {
    let image = match (body.image, body.image_url) {
        (Some(image), _) => image,
        (None, Some(url)) => ImageRef::direct(&url).map_err(crate::PlatformError::from)?,
        (None, None) => return Err(ApiError::bad_request("image or image_url is required")),
    };
    let vision = state.platform.create_vision(
        &claims.user_id,
        &ScenarioId::from(id),
        image,
        &body.caption,
        body.mood,
    )?;
    Ok((StatusCode::CREATED, Json(vision)))
}

#[derive(Deserialize)]
pub struct FeedParams {
    page: Option<u32>,
    page_size: Option<u32>,
}

pub async fn vision_feed(
    State(state): State<AppState>,
    Auth(_): Auth,
    Path(id): Path<String>,
    ApiQuery(params): ApiQuery<FeedParams>,
) -> ApiResult<Page<Vision>> {
    Ok(Json(state.platform.vision_feed(
        &ScenarioId::from(id),
        params.page.unwrap_or(1),
        params.page_size.unwrap_or(DEFAULT_FEED_PAGE_SIZE),
    )?))
}

/// Seed for one player's next draw. It only changes when the player's
/// guess count does, so repeated reads return the same challenge.
fn challenge_seed(base: u64, player: &UserId, scenario: &ScenarioId, guesses_made: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(base.to_le_bytes());
    hasher.update(player.as_str().as_bytes());
    hasher.update([0]);
    hasher.update(scenario.as_str().as_bytes());
    hasher.update(guesses_made.to_le_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

pub async fn next_challenge(
    State(state): State<AppState>,
    Auth(claims): Auth,
    Path(id): Path<String>,
) -> ApiResult<Challenge> {
    let scenario_id = ScenarioId::from(id);
    let stats = state.platform.player_stats(&claims.user_id, &scenario_id)?;
    let mut rng = StdRng::seed_from_u64(challenge_seed(
        state.challenge_seed,
        &claims.user_id,
        &scenario_id,
        stats.guesses_made,
    ));
    Ok(Json(state.platform.next_challenge(
        &claims.user_id,
        &scenario_id,
        &mut rng,
    )?))
}

#[derive(Deserialize)]
pub struct NewGuess {
    vision_id: VisionId,
    mood: Mood,
}

pub async fn submit_guess(
    State(state): State<AppState>,
    Auth(claims): Auth,
    ApiJson(body): ApiJson<NewGuess>,
) -> Created<GuessResult> {
    let result = state
        .platform
        .submit_guess(&claims.user_id, &body.vision_id, body.mood)?;
    Ok((StatusCode::CREATED, Json(result)))
}

pub async fn report(
    State(state): State<AppState>,
    Auth(claims): Auth,
    Path(id): Path<String>,
) -> ApiResult<ScenarioReport> {
    Ok(Json(
        state
            .platform
            .scenario_report(claims.role, &ScenarioId::from(id))?,
    ))
}

#[derive(Deserialize)]
pub struct StatsParams {
    #[serde(default)]
    scenario: Option<String>,
}

#[derive(Serialize)]
pub struct MyStats {
    #[serde(flatten)]
    stats: PlayerStats,
    empathy_profile: ConfusionMatrix,
}

pub async fn my_stats(
    State(state): State<AppState>,
    Auth(claims): Auth,
    ApiQuery(params): ApiQuery<StatsParams>,
) -> ApiResult<MyStats> {
    let Some(scenario) = params.scenario.filter(|s| !s.is_empty()) else {
        return Err(ApiError::bad_request("the scenario query parameter is required"));
    };
    let scenario_id = ScenarioId::from(scenario);
    // unknown scenarios are a 404 rather than an empty record
    state.platform.scenario(&claims.user_id, &scenario_id)?;
    Ok(Json(MyStats {
        stats: state.platform.player_stats(&claims.user_id, &scenario_id)?,
        empathy_profile: state
            .platform
            .empathy_profile(&claims.user_id, &scenario_id)?,
    }))
}

pub async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

pub async fn method_not_allowed() -> ApiError {
    ApiError::new(
        StatusCode::METHOD_NOT_ALLOWED,
        "method_not_allowed",
        "method not allowed on this endpoint",
    )
}
