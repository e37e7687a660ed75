//! Keyword image search used while creating a vision.
//!
//! A provider returns raw entries; [`ImageSearchClient`] validates them into
//! [`ImageRef`]s (dropping malformed ones), enforces the page size bound and
//! caches successful pages for a configurable TTL.

mod cache;
mod http;
mod stub;

use std::sync::Arc;
use std::time::Duration;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};

use crate::domain::{ImageRef, ATTRIBUTION_MAX_CHARS};

pub use cache::TtlCache;
pub use http::HttpProvider;
pub use stub::{StubFailure, StubProvider};

pub const KEYWORDS_MAX_CHARS: usize = 100;
pub const DEFAULT_PER_PAGE: u32 = 20;
pub const MAX_PER_PAGE: u32 = 30;
pub const DEFAULT_CACHE_TTL: Duration = Duration::from_secs(15 * 60);
/// Used when a 429 carries no usable Retry-After header.
pub const DEFAULT_RETRY_AFTER_SECS: u64 = 60;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ImageSearchQuery {
    keywords: String,
    page: u32,
    per_page: u32,
}

impl ImageSearchQuery {
    pub fn new(
        keywords: &str,
        page: Option<u32>,
        per_page: Option<u32>,
    ) -> Result<Self, ImageSearchError> {
        let keywords = keywords.trim();
        if keywords.is_empty() {
            return Err(ImageSearchError::InvalidQuery("keywords must not be empty".into()));
        }
        if keywords.chars().count() > KEYWORDS_MAX_CHARS {
            return Err(ImageSearchError::InvalidQuery(format!(
                "keywords must be at most {KEYWORDS_MAX_CHARS} characters"
            )));
        }
        let page = page.unwrap_or(1);
        if page == 0 {
            return Err(ImageSearchError::InvalidQuery("page starts at 1".into()));
        }
        let per_page = per_page.unwrap_or(DEFAULT_PER_PAGE);
        if !(1..=MAX_PER_PAGE).contains(&per_page) {
            return Err(ImageSearchError::InvalidQuery(format!(
                "per_page must be between 1 and {MAX_PER_PAGE}"
            )));
        }
        Ok(ImageSearchQuery {
            keywords: keywords.to_owned(),
            page,
            per_page,
        })
    }

    pub fn keywords(&self) -> &str {
        &self.keywords
    }

    pub fn page(&self) -> u32 {
        self.page
    }

    pub fn per_page(&self) -> u32 {
        self.per_page
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImagePage {
    pub results: Vec<ImageRef>,
    pub page: u32,
    pub total_available: Option<u64>,
}

/// An entry as the provider sent it, not yet validated.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProviderImage {
    pub id: String,
    pub source_url: String,
    pub thumbnail_url: String,
    pub creator: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProviderPage {
    pub images: Vec<ProviderImage>,
    pub total: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ImageSearchError {
    #[error("invalid image query: {0}")]
    InvalidQuery(String),
    #[error("image provider unavailable: {0}")]
    ProviderUnavailable(String),
    #[error("image provider rate limit hit, retry after {retry_after_secs}s")]
    RateLimited { retry_after_secs: u64 },
}

/// Maps a non-success HTTP status from a provider to an error.
pub(crate) fn status_error(status: u16, retry_after: Option<u64>) -> ImageSearchError {
    if status == 429 {
        ImageSearchError::RateLimited {
            retry_after_secs: retry_after.unwrap_or(DEFAULT_RETRY_AFTER_SECS),
        }
    } else {
        ImageSearchError::ProviderUnavailable(format!("provider answered HTTP {status}"))
    }
}

#[async_trait]
pub trait ImageProvider: Send + Sync {
    /// Display name used in attributions, e.g. "Unsplash".
    fn name(&self) -> &str;

    async fn search(&self, query: &ImageSearchQuery) -> Result<ProviderPage, ImageSearchError>;
}

pub struct ImageSearchClient {
    provider: Arc<dyn ImageProvider>,
    cache: Option<TtlCache<ImageSearchQuery, ImagePage>>,
}

impl ImageSearchClient {
    /// A zero `cache_ttl` disables caching.
    pub fn new(provider: Arc<dyn ImageProvider>, cache_ttl: Duration) -> Self {
        ImageSearchClient {
            provider,
            cache: (!cache_ttl.is_zero()).then(|| TtlCache::new(cache_ttl)),
        }
    }

    pub fn stub() -> Self {
        ImageSearchClient::new(Arc::new(StubProvider::new()), DEFAULT_CACHE_TTL)
    }

    pub async fn search_images(
        &self,
        query: &ImageSearchQuery,
    ) -> Result<ImagePage, ImageSearchError> {
        if let Some(hit) = self.cache.as_ref().and_then(|c| c.get(query)) {
            return Ok(hit);
        }
        let raw = self.provider.search(query).await?;
        let page = ImagePage {
            results: raw
                .images
                .iter()
                .filter_map(|img| to_image_ref(img, self.provider.name()))
                .take(query.per_page() as usize)
                .collect(),
            page: query.page(),
            total_available: raw.total,
        };
        if let Some(cache) = &self.cache {
            cache.insert(query.clone(), page.clone());
        }
        Ok(page)
    }
}

fn to_image_ref(img: &ProviderImage, provider: &str) -> Option<ImageRef> {
    let attribution = match img.creator.as_deref().map(str::trim) {
        Some(creator) if !creator.is_empty() => format!("Photo by {creator} on {provider}"),
        _ => provider.to_owned(),
    };
    let attribution: String = attribution.chars().take(ATTRIBUTION_MAX_CHARS).collect();
    ImageRef::new(&img.source_url, &img.thumbnail_url, &attribution, &img.id).ok()
}
