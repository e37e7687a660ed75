//! JSON HTTP API over the [`Platform`].
//!
//! Every handler delegates to one platform operation. Errors always leave
//! as an [`ErrorEnvelope`] whose `code` is part of the public contract.

mod error;
mod extract;
mod handlers;
pub mod session;

use std::sync::Arc;

use axum::http::{header, HeaderName, HeaderValue, Method};
use axum::routing::{get, patch, post, put};
use axum::Router;
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::Platform;

pub use error::{ApiError, ErrorEnvelope};
pub use extract::ADMIN_KEY_HEADER;
pub use session::{Session, SessionClaims, SessionSigner};

pub struct ApiContext {
    pub platform: Platform,
    pub signer: SessionSigner,
    /// Secret required to open a policymaker session. `None` disables
    /// policymaker sign-up entirely.
    pub admin_key: Option<String>,
    /// Mixed into the per-request game RNG seed.
    pub challenge_seed: u64,
}

pub type AppState = Arc<ApiContext>;

pub fn router(state: AppState, cors_origins: &[String]) -> Router {
    let origins: Vec<HeaderValue> = cors_origins
        .iter()
        .filter_map(|o| HeaderValue::from_str(o).ok())
        .collect();
    let cors = CorsLayer::new()
        .allow_origin(AllowOrigin::list(origins))
        .allow_methods([Method::GET, Method::POST, Method::PATCH, Method::PUT])
        .allow_headers([
            header::AUTHORIZATION,
            header::CONTENT_TYPE,
            HeaderName::from_static(ADMIN_KEY_HEADER),
        ]);

    Router::new()
        .route("/api/health", get(handlers::health))
        .route("/api/moods", get(handlers::moods))
        .route("/api/sessions", post(handlers::create_session))
        .route(
            "/api/scenarios",
            post(handlers::create_scenario).get(handlers::list_scenarios),
        )
        .route("/api/scenarios/{id}", get(handlers::get_scenario))
        .route("/api/scenarios/{id}/status", patch(handlers::set_status))
        .route("/api/scenarios/{id}/statements", put(handlers::replace_statements))
        .route("/api/scenarios/{id}/survey", get(handlers::get_survey))
        .route(
            "/api/scenarios/{id}/survey-responses",
            post(handlers::submit_response),
        )
        .route(
            "/api/scenarios/{id}/visions",
            post(handlers::create_vision).get(handlers::vision_feed),
        )
        .route("/api/scenarios/{id}/game/next", get(handlers::next_challenge))
        .route("/api/scenarios/{id}/report", get(handlers::report))
        .route("/api/images", get(handlers::search_images))
        .route("/api/guesses", post(handlers::submit_guess))
        .route("/api/users/me/stats", get(handlers::my_stats))
        .fallback(handlers::not_found)
        .method_not_allowed_fallback(handlers::method_not_allowed)
        .layer(cors)
        .with_state(state)
}
