mod common;

use std::collections::HashSet;

use cocteau_core::domain::{Mood, Role, ScenarioStatus};
use cocteau_core::game::{GameError, PlayerStats};
use cocteau_core::PlatformError;
use common::oracle;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn challenges_skip_own_and_guessed_visions() {
    let p = common::platform();
    let (_, scenario) = common::published_scenario(&p, 1);
    let ana = common::citizen(&p, "ana");
    let bo = common::citizen(&p, "bo");
    let own = p
        .create_vision(&ana.user_id, &scenario.scenario_id, common::image(0), "mine", Mood::Calm)
        .unwrap();
    let other = p
        .create_vision(&bo.user_id, &scenario.scenario_id, common::image(1), "theirs", Mood::Sad)
        .unwrap();

    let mut rng = StdRng::seed_from_u64(1);
    for _ in 0..50 {
        let c = p.next_challenge(&ana.user_id, &scenario.scenario_id, &mut rng).unwrap();
        assert_eq!(c.vision_id, other.vision_id);
        assert_ne!(c.vision_id, own.vision_id);
    }
    p.submit_guess(&ana.user_id, &other.vision_id, Mood::Bored).unwrap();
    let err = p
        .next_challenge(&ana.user_id, &scenario.scenario_id, &mut rng)
        .unwrap_err();
    assert_eq!(err, PlatformError::Game(GameError::NoEligibleVisions));
}

#[test]
fn empty_scenario_has_no_challenge() {
    let p = common::platform();
    let (_, scenario) = common::published_scenario(&p, 1);
    let ana = common::citizen(&p, "ana");
    let err = p
        .next_challenge(&ana.user_id, &scenario.scenario_id, &mut StdRng::seed_from_u64(0))
        .unwrap_err();
    assert_eq!(err.code(), "no_eligible_visions");
}

#[test]
fn challenge_json_hides_the_answer() {
    let p = common::platform();
    let (_, scenario) = common::published_scenario(&p, 1);
    let ana = common::citizen(&p, "ana");
    let bo = common::citizen(&p, "bo");
    p.create_vision(&bo.user_id, &scenario.scenario_id, common::image(0), "x", Mood::Tense)
        .unwrap();
    let c = p
        .next_challenge(&ana.user_id, &scenario.scenario_id, &mut StdRng::seed_from_u64(0))
        .unwrap();
    let json = serde_json::to_value(&c).unwrap();
    let obj = json.as_object().unwrap();
    for hidden in ["mood", "actual_mood", "author"] {
        assert!(!obj.contains_key(hidden), "{hidden} leaked: {json}");
    }
    assert!(!json.to_string().contains("tense"));
}

#[test]
fn guess_rules() {
    let p = common::platform();
    let (owner, scenario) = common::published_scenario(&p, 1);
    let ana = common::citizen(&p, "ana");
    let bo = common::citizen(&p, "bo");
    let v = p
        .create_vision(&bo.user_id, &scenario.scenario_id, common::image(0), "x", Mood::Excited)
        .unwrap();

    assert_eq!(
        p.submit_guess(&bo.user_id, &v.vision_id, Mood::Excited).unwrap_err(),
        PlatformError::Game(GameError::SelfGuess)
    );

    let near = p.submit_guess(&ana.user_id, &v.vision_id, Mood::Cheerful).unwrap();
    assert_eq!((near.correct, near.points_awarded, near.actual_mood), (false, 5, Mood::Excited));
    assert_eq!(near.updated_stats.current_streak, 0);

    assert_eq!(
        p.submit_guess(&ana.user_id, &v.vision_id, Mood::Excited).unwrap_err(),
        PlatformError::Game(GameError::DuplicateGuess)
    );
    let stats = p.player_stats(&ana.user_id, &scenario.scenario_id).unwrap();
    assert_eq!((stats.guesses_made, stats.total_points), (1, 5));

    // the owner is a registered user too, and may play
    let exact = p.submit_guess(&owner.user_id, &v.vision_id, Mood::Excited).unwrap();
    assert_eq!((exact.correct, exact.points_awarded), (true, 10));
    assert_eq!(exact.updated_stats.current_streak, 1);
}

#[test]
fn visions_need_a_published_scenario() {
    let p = common::platform();
    let pm = p.create_user("pm", Role::Policymaker).unwrap();
    let draft = p
        .create_scenario(&pm.user_id, "Draft", "", &common::statements(1))
        .unwrap();
    let err = p
        .create_vision(&pm.user_id, &draft.scenario_id, common::image(0), "x", Mood::Calm)
        .unwrap_err();
    assert_eq!(err.code(), "scenario_not_published");

    p.transition_scenario(&pm.user_id, &draft.scenario_id, ScenarioStatus::Published)
        .unwrap();
    p.transition_scenario(&pm.user_id, &draft.scenario_id, ScenarioStatus::Archived)
        .unwrap();
    let err = p
        .next_challenge(&pm.user_id, &draft.scenario_id, &mut StdRng::seed_from_u64(0))
        .unwrap_err();
    assert_eq!(err.code(), "scenario_not_published");
}

#[test]
fn stats_and_profile_match_the_guess_log() {
    let p = common::platform();
    let (_, scenario) = common::published_scenario(&p, 1);
    let author = common::citizen(&p, "author");
    let player = common::citizen(&p, "player");
    let mut rng = StdRng::seed_from_u64(99);
    let mut log = vec![];
    let mut expected = PlayerStats::empty(player.user_id.clone(), scenario.scenario_id.clone());
    for i in 0..60 {
        let actual = Mood::ALL[rng.random_range(0..9)];
        let guessed = Mood::ALL[rng.random_range(0..9)];
        let v = p
            .create_vision(&author.user_id, &scenario.scenario_id, common::image(i), "c", actual)
            .unwrap();
        let r = p.submit_guess(&player.user_id, &v.vision_id, guessed).unwrap();
        expected.record(r.points_awarded, actual == guessed);
        assert_eq!(r.updated_stats, expected);
        log.push((actual, guessed));
    }

    let stats = p.player_stats(&player.user_id, &scenario.scenario_id).unwrap();
    assert_eq!(stats, expected);
    let by_hand: u64 = log
        .iter()
        .map(|(a, g)| {
            if a == g {
                10
            } else if a.cell() == g.cell() {
                5
            } else {
                0
            }
        })
        .sum();
    assert_eq!(stats.total_points, by_hand);

    let profile = p.empathy_profile(&player.user_id, &scenario.scenario_id).unwrap();
    let (cells, accuracy) = oracle::confusion(&log);
    for (i, a) in Mood::ALL.iter().enumerate() {
        for (j, g) in Mood::ALL.iter().enumerate() {
            assert_eq!(profile.cell(*a, *g), cells[i][j]);
        }
    }
    assert_eq!(profile.total, 60);
    assert!(oracle::close(profile.accuracy, accuracy, 1e-12));
}

#[test]
fn untouched_player_has_zero_stats() {
    let p = common::platform();
    let (_, scenario) = common::published_scenario(&p, 1);
    let ana = common::citizen(&p, "ana");
    let stats = p.player_stats(&ana.user_id, &scenario.scenario_id).unwrap();
    assert_eq!(stats, PlayerStats::empty(ana.user_id, scenario.scenario_id.clone()));
    let profile = p.empathy_profile(&stats.user_id, &scenario.scenario_id).unwrap();
    assert_eq!((profile.total, profile.accuracy), (0, None));
}

#[test]
fn every_vision_is_eventually_offered() {
    let p = common::platform();
    let (_, scenario) = common::published_scenario(&p, 1);
    let authors: Vec<_> = (0..4).map(|i| common::citizen(&p, &format!("a{i}"))).collect();
    let mut ids = HashSet::new();
    for (i, a) in authors.iter().enumerate() {
        let v = p
            .create_vision(&a.user_id, &scenario.scenario_id, common::image(i), "c", Mood::Neutral)
            .unwrap();
        ids.insert(v.vision_id);
    }
    let player = common::citizen(&p, "player");
    let mut rng = StdRng::seed_from_u64(5);
    let mut offered = HashSet::new();
    while let Ok(c) = p.next_challenge(&player.user_id, &scenario.scenario_id, &mut rng) {
        assert!(offered.insert(c.vision_id.clone()), "offered twice");
        p.submit_guess(&player.user_id, &c.vision_id, Mood::Neutral).unwrap();
    }
    assert_eq!(offered, ids);
}
