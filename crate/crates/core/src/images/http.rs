use std::time::Duration;

use async_trait::async_trait;
use reqwest::header::{AUTHORIZATION, RETRY_AFTER};
use serde_json::Value;
use url::Url;

use super::{status_error, ImageProvider, ImageSearchError, ImageSearchQuery, ProviderImage, ProviderPage};

const REQUEST_TIMEOUT: Duration = Duration::from_secs(8);

/// Provider speaking an Unsplash-style search API:
///
/// `GET {base_url}?keywords=..&page=..&per_page=..` answering
/// `{"total": n, "results": [{"id", "urls": {"regular", "thumb"}, "user": {"name"}}]}`.
pub struct HttpProvider {
    http: reqwest::Client,
    base_url: Url,
    api_key: Option<String>,
    name: String,
}

impl HttpProvider {
    pub fn new(base_url: Url, api_key: Option<String>) -> Result<Self, ImageSearchError> {
        let http = reqwest::Client::builder()
            .timeout(REQUEST_TIMEOUT)
            .build()
            .map_err(|e| ImageSearchError::ProviderUnavailable(e.to_string()))?;
        let name = base_url
            .host_str()
            .map(provider_name)
            .unwrap_or_else(|| "image provider".to_owned());
        Ok(HttpProvider {
            http,
            base_url,
            api_key,
            name,
        })
    }
}

/// "api.unsplash.com" -> "Unsplash".
fn provider_name(host: &str) -> String {
    let labels: Vec<&str> = host.split('.').collect();
    let core = if labels.len() >= 2 {
        labels[labels.len() - 2]
    } else {
        host
    };
    let mut chars = core.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => host.to_owned(),
    }
}

fn parse_entry(entry: &Value) -> Option<ProviderImage> {
    let urls = entry.get("urls")?;
    Some(ProviderImage {
        id: match entry.get("id")? {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            _ => return None,
        },
        source_url: urls.get("regular")?.as_str()?.to_owned(),
        thumbnail_url: urls.get("thumb")?.as_str()?.to_owned(),
        creator: entry
            .get("user")
            .and_then(|u| u.get("name"))
            .and_then(Value::as_str)
            .map(str::to_owned),
    })
}

pub(crate) fn parse_body(body: &Value) -> Result<ProviderPage, ImageSearchError> {
    let results = body
        .get("results")
        .and_then(Value::as_array)
        .ok_or_else(|| {
            ImageSearchError::ProviderUnavailable("provider response has no results array".into())
        })?;
    Ok(ProviderPage {
        images: results.iter().filter_map(parse_entry).collect(),
        total: body.get("total").and_then(Value::as_u64),
    })
}

#[async_trait]
impl ImageProvider for HttpProvider {
    fn name(&self) -> &str {
        &self.name
    }

    async fn search(&self, query: &ImageSearchQuery) -> Result<ProviderPage, ImageSearchError> {
        let mut request = self.http.get(self.base_url.clone()).query(&[
            ("keywords", query.keywords().to_owned()),
            ("page", query.page().to_string()),
            ("per_page", query.per_page().min(super::MAX_PER_PAGE).to_string()),
        ]);
        if let Some(key) = &self.api_key {
            request = request.header(AUTHORIZATION, format!("Client-ID {key}"));
        }
        let response = request
            .send()
            .await
            .map_err(|e| ImageSearchError::ProviderUnavailable(e.to_string()))?;
        let status = response.status();
        if !status.is_success() {
            let retry_after = response
                .headers()
                .get(RETRY_AFTER)
                .and_then(|v| v.to_str().ok())
                .and_then(|v| v.trim().parse::<u64>().ok());
            return Err(status_error(status.as_u16(), retry_after));
        }
        let body: Value = response
            .json()
            .await
            .map_err(|e| ImageSearchError::ProviderUnavailable(format!("bad provider body: {e}")))?;
        parse_body(&body)
    }
}
