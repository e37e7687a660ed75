use axum::extract::{FromRequest, FromRequestParts, Query, Request};
use axum::http::header::AUTHORIZATION;
use axum::http::request::Parts;
use axum::Json;
use chrono::Utc;
use serde::de::DeserializeOwned;

use super::{ApiError, AppState, SessionClaims};

pub const ADMIN_KEY_HEADER: &str = "x-admin-key";

/// A verified session. Missing, tampered and expired tokens are rejected
/// with 401.
pub struct Auth(pub SessionClaims);

/// Like [`Auth`] but absent tokens are fine. A token that is present must
/// still verify.
pub struct MaybeAuth(pub Option<SessionClaims>);

fn bearer(parts: &Parts) -> Result<Option<&str>, ApiError> {
    let Some(value) = parts.headers.get(AUTHORIZATION) else {
        return Ok(None);
    };
    let value = value
        .to_str()
        .map_err(|_| ApiError::unauthorized("invalid_session", "unreadable authorization header"))?;
    match value.strip_prefix("Bearer ") {
        Some(token) => Ok(Some(token.trim())),
        None => Err(ApiError::unauthorized(
            "invalid_session",
            "expected a Bearer token",
        )),
    }
}

impl FromRequestParts<AppState> for MaybeAuth {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, ApiError> {
        match bearer(parts)? {
            None => Ok(MaybeAuth(None)),
            Some(token) => Ok(MaybeAuth(Some(state.signer.verify(token, Utc::now())?))),
        }
    }
}

impl FromRequestParts<AppState> for Auth {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, ApiError> {
        match MaybeAuth::from_request_parts(parts, state).await? {
            MaybeAuth(Some(claims)) => Ok(Auth(claims)),
            MaybeAuth(None) => Err(ApiError::unauthorized(
                "unauthorized",
                "a session token is required",
            )),
        }
    }
}

/// JSON body whose rejections are error envelopes.
pub struct ApiJson<T>(pub T);

impl<S, T> FromRequest<S> for ApiJson<T>
where
    S: Send + Sync,
    T: DeserializeOwned,
{
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, ApiError> {
        Json::<T>::from_request(req, state)
            .await
            .map(|Json(v)| ApiJson(v))
            .map_err(|rej| ApiError::bad_request(rej.body_text()))
    }
}

/// Query string whose rejections are error envelopes.
pub struct ApiQuery<T>(pub T);

impl<S, T> FromRequestParts<S> for ApiQuery<T>
where
    S: Send + Sync,
    T: DeserializeOwned,
{
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &S) -> Result<Self, ApiError> {
        Query::<T>::from_request_parts(parts, state)
            .await
            .map(|Query(v)| ApiQuery(v))
            .map_err(|rej| ApiError::bad_request(rej.body_text()))
    }
}
