#![allow(dead_code)]

pub mod flows;
pub mod oracle;
pub mod reference;

use std::net::SocketAddr;
use std::sync::Arc;

use chrono::{Duration, TimeZone, Utc};
use cocteau_core::api::{self, ApiContext, SessionSigner};
use cocteau_core::clock::ManualClock;
use cocteau_core::domain::{ImageRef, Role, Scenario, ScenarioStatus, UserAccount};
use cocteau_core::images::{ImageProvider, ImageSearchClient, StubProvider};
use cocteau_core::storage::Store;
use cocteau_core::Platform;

pub const ADMIN_KEY: &str = "test-admin-key";

/// In-memory platform whose clock ticks one second per reading.
pub fn platform() -> Platform {
    Platform::in_memory()
        .unwrap()
        .with_clock(Arc::new(ManualClock::new(
            Utc.with_ymd_and_hms(2024, 5, 1, 9, 0, 0).unwrap(),
            Duration::seconds(1),
        )))
}

pub fn platform_on(store: Arc<Store>) -> Platform {
    Platform::new(store, ImageSearchClient::stub()).with_clock(Arc::new(ManualClock::new(
        Utc.with_ymd_and_hms(2024, 5, 1, 9, 0, 0).unwrap(),
        Duration::seconds(1),
    )))
}

pub fn statements(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("Statement number {i}")).collect()
}

pub fn published_scenario(p: &Platform, n_statements: usize) -> (UserAccount, Scenario) {
    let owner = p
        .create_user(&format!("pm-{}", uuid_suffix()), Role::Policymaker)
        .unwrap();
    let draft = p
        .create_scenario(&owner.user_id, "Scenario", "", &statements(n_statements))
        .unwrap();
    let published = p
        .transition_scenario(&owner.user_id, &draft.scenario_id, ScenarioStatus::Published)
        .unwrap();
    (owner, published)
}

pub fn citizen(p: &Platform, handle: &str) -> UserAccount {
    p.create_user(handle, Role::Citizen).unwrap()
}

pub fn image(n: usize) -> ImageRef {
    ImageRef::new(
        &format!("https://img.example.org/{n}.jpg"),
        &format!("https://img.example.org/{n}_t.jpg"),
        "Photo by Someone on Example",
        &format!("p{n}"),
    )
    .unwrap()
}

fn uuid_suffix() -> String {
    cocteau_core::domain::UserId::generate().as_str()[..8].to_owned()
}

pub struct TestServer {
    pub base: String,
    pub http: reqwest::Client,
    pub state: api::AppState,
}

impl TestServer {
    pub async fn spawn(platform: Platform) -> TestServer {
        TestServer::spawn_with(platform, Some(ADMIN_KEY.to_owned())).await
    }

    pub async fn spawn_with(platform: Platform, admin_key: Option<String>) -> TestServer {
        let state = Arc::new(ApiContext {
            platform,
            signer: SessionSigner::new("test-secret", Duration::hours(1)),
            admin_key,
            challenge_seed: 7,
        });
        let app = api::router(state.clone(), &["http://localhost:5173".to_owned()]);
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
        let addr: SocketAddr = listener.local_addr().unwrap();
        tokio::spawn(async move {
            axum::serve(listener, app).await.unwrap();
        });
        TestServer {
            base: format!("http://{addr}"),
            http: reqwest::Client::new(),
            state,
        }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{}", self.base, path)
    }

    pub async fn call(
        &self,
        method: reqwest::Method,
        path: &str,
        token: Option<&str>,
        body: Option<serde_json::Value>,
    ) -> Reply {
        let mut req = self.http.request(method, self.url(path));
        if let Some(token) = token {
            req = req.bearer_auth(token);
        }
        if let Some(body) = body {
            req = req.json(&body);
        }
        Reply::read(req.send().await.unwrap()).await
    }

    pub async fn get(&self, path: &str, token: &str) -> Reply {
        self.call(reqwest::Method::GET, path, Some(token), None).await
    }

    pub async fn post(&self, path: &str, token: &str, body: serde_json::Value) -> Reply {
        self.call(reqwest::Method::POST, path, Some(token), Some(body)).await
    }

    /// Signs up `handle` and returns the bearer token.
    pub async fn session(&self, handle: &str, role: Role) -> String {
        let mut req = self.http.post(self.url("/api/sessions")).json(&serde_json::json!({
            "handle": handle,
            "role": role,
        }));
        if role == Role::Policymaker {
            req = req.header(api::ADMIN_KEY_HEADER, ADMIN_KEY);
        }
        let reply = Reply::read(req.send().await.unwrap()).await;
        assert_eq!(reply.status, 201, "{}", reply.json);
        reply.json["session_token"].as_str().unwrap().to_owned()
    }
}

pub struct Reply {
    pub status: u16,
    pub headers: reqwest::header::HeaderMap,
    pub bytes: Vec<u8>,
    pub json: serde_json::Value,
}

impl Reply {
    pub async fn read(resp: reqwest::Response) -> Reply {
        let status = resp.status().as_u16();
        let headers = resp.headers().clone();
        let bytes = resp.bytes().await.unwrap().to_vec();
        let json = serde_json::from_slice(&bytes).unwrap_or(serde_json::Value::Null);
        Reply { status, headers, bytes, json }
    }
}

/// Platform backed by a stub provider the caller can reconfigure.
pub fn platform_with_provider(provider: Arc<dyn ImageProvider>) -> Platform {
    Platform::new(
        Arc::new(Store::in_memory().unwrap()),
        ImageSearchClient::new(provider, std::time::Duration::ZERO),
    )
}

pub fn stub() -> Arc<StubProvider> {
    Arc::new(StubProvider::new())
}
