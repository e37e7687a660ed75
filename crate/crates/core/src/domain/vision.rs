use serde::{Deserialize, Serialize};
use url::Url;

use super::{
    check_text, DomainError, Mood, Scenario, ScenarioId, Timestamp, UserAccount, UserId, VisionId,
    ATTRIBUTION_MAX_CHARS, CAPTION_MAX_CHARS,
};

/// A hot-linked image. `provider_id` is empty for directly entered URLs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageRef {
    pub source_url: String,
    pub thumbnail_url: String,
    #[serde(default)]
    pub attribution: String,
    #[serde(default)]
    pub provider_id: String,
}

impl ImageRef {
    pub fn new(
        source_url: &str,
        thumbnail_url: &str,
        attribution: &str,
        provider_id: &str,
    ) -> Result<Self, DomainError> {
        let image = ImageRef {
            source_url: source_url.trim().to_owned(),
            thumbnail_url: thumbnail_url.trim().to_owned(),
            attribution: attribution.trim().to_owned(),
            provider_id: provider_id.to_owned(),
        };
        image.validate()?;
        Ok(image)
    }

    /// Image entered by hand, used when the search provider is down.
    pub fn direct(url: &str) -> Result<Self, DomainError> {
        ImageRef::new(url, url, "", "")
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        check_url("source_url", &self.source_url)?;
        check_url("thumbnail_url", &self.thumbnail_url)?;
        check_text("attribution", &self.attribution, 0, ATTRIBUTION_MAX_CHARS)
    }
}

/// Absolute http(s) URL with a host.
pub(crate) fn is_valid_image_url(raw: &str) -> bool {
    match Url::parse(raw) {
        Ok(url) => matches!(url.scheme(), "http" | "https") && url.host_str().is_some(),
        Err(_) => false,
    }
}

fn check_url(field: &'static str, raw: &str) -> Result<(), DomainError> {
    if is_valid_image_url(raw) {
        Ok(())
    } else {
        Err(DomainError::invalid(field, "must be an absolute http(s) URL"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vision {
    pub vision_id: VisionId,
    pub scenario_id: ScenarioId,
    pub author: UserId,
    pub image: ImageRef,
    pub caption: String,
    pub mood: Mood,
    pub created_at: Timestamp,
}

impl Vision {
    pub fn create(
        scenario: &Scenario,
        author: &UserAccount,
        image: ImageRef,
        caption: &str,
        mood: Mood,
        now: Timestamp,
    ) -> Result<Self, DomainError> {
        if !scenario.is_published() {
            return Err(DomainError::ScenarioNotPublished);
        }
        image.validate()?;
        let caption = caption.trim();
        check_text("caption", caption, 1, CAPTION_MAX_CHARS)?;
        Ok(Vision {
            vision_id: VisionId::generate(),
            scenario_id: scenario.scenario_id.clone(),
            author: author.user_id.clone(),
            image,
            caption: caption.to_owned(),
            mood,
            created_at: now,
        })
    }
}

/// A vision as served to a guesser: everything but the mood and the author.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Challenge {
    pub vision_id: VisionId,
    pub scenario_id: ScenarioId,
    pub image: ImageRef,
    pub caption: String,
    pub created_at: Timestamp,
}

impl From<&Vision> for Challenge {
    fn from(v: &Vision) -> Self {
        Challenge {
            vision_id: v.vision_id.clone(),
            scenario_id: v.scenario_id.clone(),
            image: v.image.clone(),
            caption: v.caption.clone(),
            created_at: v.created_at,
        }
    }
}
