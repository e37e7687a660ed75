use std::sync::atomic::{AtomicUsize, Ordering};

use async_trait::async_trait;
use parking_lot::Mutex;
use sha2::{Digest, Sha256};

use super::{status_error, ImageProvider, ImageSearchError, ImageSearchQuery, ProviderImage, ProviderPage};

const STUB_TOTAL: u64 = 90;
const PHOTOGRAPHERS: [&str; 6] = [
    "Ada Pereira",
    "Bo Lindqvist",
    "Chidi Okafor",
    "Dana Kowalski",
    "Eun-ji Park",
    "Farid Haddad",
];

/// Forced failure for exercising error paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StubFailure {
    /// Behave as if the provider answered with this HTTP status.
    Status(u16),
    RateLimited { retry_after_secs: u64 },
}

/// Deterministic in-process provider: the same query always yields the
/// same page. Used for tests and demo mode.
#[derive(Default)]
pub struct StubProvider {
    failure: Mutex<Option<StubFailure>>,
    calls: AtomicUsize,
}

impl StubProvider {
    pub fn new() -> Self {
        StubProvider::default()
    }

    pub fn failing(failure: StubFailure) -> Self {
        let stub = StubProvider::new();
        stub.set_failure(Some(failure));
        stub
    }

    pub fn set_failure(&self, failure: Option<StubFailure>) {
        *self.failure.lock() = failure;
    }

    /// Number of searches that reached the provider.
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

fn slug(keywords: &str) -> String {
    keywords
        .split_whitespace()
        .map(|w| {
            w.chars()
                .filter(char::is_ascii_alphanumeric)
                .collect::<String>()
                .to_ascii_lowercase()
        })
        .filter(|w| !w.is_empty())
        .collect::<Vec<_>>()
        .join("-")
}

#[async_trait]
impl ImageProvider for StubProvider {
    fn name(&self) -> &str {
        "Stub Images"
    }

    async fn search(&self, query: &ImageSearchQuery) -> Result<ProviderPage, ImageSearchError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        match *self.failure.lock() {
            Some(StubFailure::Status(status)) => return Err(status_error(status, None)),
            Some(StubFailure::RateLimited { retry_after_secs }) => {
                return Err(status_error(429, Some(retry_after_secs)))
            }
            None => {}
        }
        let digest = Sha256::digest(query.keywords().to_lowercase().as_bytes());
        let slug = match slug(query.keywords()) {
            s if s.is_empty() => hex_prefix(&digest),
            s => s,
        };
        let first = u64::from(query.page() - 1) * u64::from(query.per_page());
        let images = (first..STUB_TOTAL.min(first + u64::from(query.per_page())))
            .map(|i| {
                let who = PHOTOGRAPHERS[(usize::from(digest[0]) + i as usize) % PHOTOGRAPHERS.len()];
                ProviderImage {
                    id: format!("stub-{}-{i}", hex_prefix(&digest)),
                    source_url: format!("https://images.example.org/stub/{slug}/{i}.jpg"),
                    thumbnail_url: format!("https://images.example.org/stub/{slug}/{i}_thumb.jpg"),
                    creator: Some(who.to_owned()),
                }
            })
            .collect();
        Ok(ProviderPage {
            images,
            total: Some(STUB_TOTAL),
        })
    }
}

fn hex_prefix(digest: &[u8]) -> String {
    digest[..4].iter().map(|b| format!("{b:02x}")).collect()
}
