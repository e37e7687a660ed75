//! Sample content for demo deployments.

use crate::domain::{ImageRef, Mood, Role, Scenario, ScenarioStatus};
use crate::{Platform, PlatformError};

pub const DEMO_TITLE: &str = "New formats for academic conferences";

const DEMO_DESCRIPTION: &str = "Conferences have been run online, onsite and as hybrids. \
Share how you would like to meet colleagues, present work and network in the coming years.";

const DEMO_STATEMENTS: [&str; 5] = [
    "Onsite conferences are worth their travel cost.",
    "Online conferences make research more accessible.",
    "Hybrid events give remote attendees an equal experience.",
    "Virtual venues help people network in a meaningful way.",
    "Conferences should reduce their carbon footprint even if attendance drops.",
];

const DEMO_VISIONS: [(&str, &str, Mood); 3] = [
    (
        "demo-ana",
        "A full hall and a coffee line where the best ideas come up.",
        Mood::Excited,
    ),
    (
        "demo-ben",
        "Watching the keynote from home while my kid sleeps next door.",
        Mood::Relaxed,
    ),
    (
        "demo-chen",
        "Muted in a breakout room nobody else joined.",
        Mood::Bored,
    ),
];

/// Creates a published demo scenario with a few visions. Returns the
/// scenario, or the existing one if the demo organizer already exists.
pub fn seed_demo(platform: &Platform) -> Result<Scenario, PlatformError> {
    let organizer = match platform.create_user("demo-organizer", Role::Policymaker) {
        Ok(user) => user,
        Err(PlatformError::HandleTaken(_)) => {
            let existing = platform.store().read(|tx| {
                let owner = tx.find_user_by_handle("demo-organizer")?;
                Ok::<_, PlatformError>(owner.and_then(|o| {
                    tx.list_scenarios(None)
                        .ok()?
                        .into_iter()
                        .find(|s| s.owner == o.user_id && s.title == DEMO_TITLE)
                }))
            })?;
            if let Some(s) = existing {
                return Ok(s);
            }
            return Err(PlatformError::HandleTaken("demo-organizer".into()));
        }
        Err(e) => return Err(e),
    };
    let statements: Vec<String> = DEMO_STATEMENTS.iter().map(|s| s.to_string()).collect();
    let draft =
        platform.create_scenario(&organizer.user_id, DEMO_TITLE, DEMO_DESCRIPTION, &statements)?;
    let scenario = platform.transition_scenario(
        &organizer.user_id,
        &draft.scenario_id,
        ScenarioStatus::Published,
    )?;
    for (i, (handle, caption, mood)) in DEMO_VISIONS.iter().enumerate() {
        let citizen = platform.create_user(handle, Role::Citizen)?;
        let image = ImageRef::new(
            &format!("https://images.example.org/demo/conference-{i}.jpg"),
            &format!("https://images.example.org/demo/conference-{i}_thumb.jpg"),
            "Demo image",
            "",
        )?;
        platform.create_vision(&citizen.user_id, &scenario.scenario_id, image, caption, *mood)?;
    }
    Ok(scenario)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeding_twice_returns_same_scenario() {
        let platform = Platform::in_memory().unwrap();
        let first = seed_demo(&platform).unwrap();
        assert!(first.is_published());
        assert_eq!(first.statements.len(), 5);
        let again = seed_demo(&platform).unwrap();
        assert_eq!(again.scenario_id, first.scenario_id);
        let feed = platform.vision_feed(&first.scenario_id, 1, 20).unwrap();
        assert_eq!(feed.total, 3);
    }
}
