//! A naive in-memory model of the storage contract and a randomized
//! differential driver that runs the same operations against a real
//! [`Store`] and the model.

use std::collections::BTreeMap;

use chrono::{Duration, TimeZone, Utc};
use cocteau_core::domain::{
    GuessId, Mood, ResponseId, Role, Scenario, ScenarioId, ScenarioStatus, Statement,
    StatementId, Timestamp, UserAccount, UserId, Vision, VisionId,
};
use cocteau_core::game::{Guess, PlayerStats};
use cocteau_core::storage::{StorageError, Store};
use cocteau_core::survey::SurveyResponse;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Conflict,
    NotFound,
}

fn classify<T>(r: Result<T, StorageError>) -> Outcome {
    match r {
        Ok(_) => Outcome::Ok,
        Err(StorageError::ConflictOnUnique { .. }) => Outcome::Conflict,
        Err(StorageError::NotFound { .. }) => Outcome::NotFound,
        Err(other) => panic!("unexpected storage error {other}"),
    }
}

#[derive(Default)]
pub struct RefStore {
    users: Vec<UserAccount>,
    scenarios: Vec<Scenario>,
    responses: Vec<SurveyResponse>,
    visions: Vec<Vision>,
    guesses: Vec<Guess>,
    stats: BTreeMap<(UserId, ScenarioId), PlayerStats>,
}

impl RefStore {
    pub fn insert_user(&mut self, u: &UserAccount) -> Outcome {
        if self.users.iter().any(|x| x.user_id == u.user_id || x.handle == u.handle) {
            return Outcome::Conflict;
        }
        self.users.push(u.clone());
        Outcome::Ok
    }

    pub fn insert_scenario(&mut self, s: &Scenario) -> Outcome {
        if self.scenarios.iter().any(|x| x.scenario_id == s.scenario_id) {
            return Outcome::Conflict;
        }
        self.scenarios.push(s.clone());
        Outcome::Ok
    }

    pub fn update_scenario(&mut self, s: &Scenario) -> Outcome {
        match self.scenarios.iter_mut().find(|x| x.scenario_id == s.scenario_id) {
            Some(slot) => {
                *slot = s.clone();
                Outcome::Ok
            }
            None => Outcome::NotFound,
        }
    }

    pub fn insert_response(&mut self, r: &SurveyResponse) -> Outcome {
        if self.responses.iter().any(|x| {
            x.response_id == r.response_id
                || (x.scenario_id == r.scenario_id && x.user_id == r.user_id)
        }) {
            return Outcome::Conflict;
        }
        self.responses.push(r.clone());
        Outcome::Ok
    }

    pub fn insert_vision(&mut self, v: &Vision) -> Outcome {
        if self.visions.iter().any(|x| x.vision_id == v.vision_id) {
            return Outcome::Conflict;
        }
        self.visions.push(v.clone());
        Outcome::Ok
    }

    pub fn insert_guess(&mut self, g: &Guess) -> Outcome {
        if self.guesses.iter().any(|x| {
            x.guess_id == g.guess_id || (x.guesser == g.guesser && x.vision_id == g.vision_id)
        }) {
            return Outcome::Conflict;
        }
        self.guesses.push(g.clone());
        Outcome::Ok
    }

    pub fn upsert_stats(&mut self, s: &PlayerStats) {
        self.stats
            .insert((s.user_id.clone(), s.scenario_id.clone()), s.clone());
    }

    fn newest_first<T: Clone>(items: Vec<(usize, &T)>, at: impl Fn(&T) -> Timestamp) -> Vec<T> {
        let mut items = items;
        items.sort_by(|(ia, a), (ib, b)| at(b).cmp(&at(a)).then(ib.cmp(ia)));
        items.into_iter().map(|(_, t)| t.clone()).collect()
    }

    pub fn scenarios_newest_first(&self) -> Vec<Scenario> {
        Self::newest_first(self.scenarios.iter().enumerate().collect(), |s| s.created_at)
    }

    pub fn vision_page(&self, scenario: &ScenarioId, page: u32, size: u32) -> (Vec<Vision>, u64) {
        let all = Self::newest_first(
            self.visions
                .iter()
                .enumerate()
                .filter(|(_, v)| &v.scenario_id == scenario)
                .collect(),
            |v| v.created_at,
        );
        let total = all.len() as u64;
        let start = ((page - 1) * size) as usize;
        (all.into_iter().skip(start).take(size as usize).collect(), total)
    }

    /// Full observable state as the store would report it.
    pub fn snapshot(&self) -> Snapshot {
        let mut per_scenario = BTreeMap::new();
        for s in &self.scenarios {
            let id = &s.scenario_id;
            per_scenario.insert(
                id.clone(),
                ScenarioState {
                    scenario: s.clone(),
                    responses: self.responses.iter().filter(|r| &r.scenario_id == id).cloned().collect(),
                    visions: self.visions.iter().filter(|v| &v.scenario_id == id).cloned().collect(),
                    guesses: self.guesses.iter().filter(|g| &g.scenario_id == id).cloned().collect(),
                    stats: self
                        .stats
                        .iter()
                        .filter(|((_, sid), _)| sid == id)
                        .map(|(_, v)| v.clone())
                        .collect(),
                },
            );
        }
        Snapshot {
            users: self.users.clone(),
            scenario_order: self.scenarios_newest_first().into_iter().map(|s| s.scenario_id).collect(),
            per_scenario,
        }
    }
}

#[derive(Debug, PartialEq)]
pub struct ScenarioState {
    pub scenario: Scenario,
    pub responses: Vec<SurveyResponse>,
    pub visions: Vec<Vision>,
    pub guesses: Vec<Guess>,
    pub stats: Vec<PlayerStats>,
}

#[derive(Debug, PartialEq)]
pub struct Snapshot {
    pub users: Vec<UserAccount>,
    pub scenario_order: Vec<ScenarioId>,
    pub per_scenario: BTreeMap<ScenarioId, ScenarioState>,
}

pub fn store_snapshot(store: &Store) -> Snapshot {
    store
        .read(|tx| {
            let users = tx.list_users()?;
            let scenarios = tx.list_scenarios(None)?;
            let mut per_scenario = BTreeMap::new();
            for s in &scenarios {
                let id = &s.scenario_id;
                per_scenario.insert(
                    id.clone(),
                    ScenarioState {
                        scenario: s.clone(),
                        responses: tx.list_responses(id)?,
                        visions: tx.list_visions(id)?,
                        guesses: tx.list_scenario_guesses(id)?,
                        stats: tx.list_stats(id)?,
                    },
                );
            }
            Ok::<_, StorageError>(Snapshot {
                users,
                scenario_order: scenarios.into_iter().map(|s| s.scenario_id).collect(),
                per_scenario,
            })
        })
        .unwrap()
}

const HANDLE_POOL: usize = 24;

struct Driver {
    rng: StdRng,
    base: Timestamp,
    users: Vec<UserId>,
    scenarios: Vec<Scenario>,
    visions: Vec<Vision>,
}

impl Driver {
    fn time(&mut self) -> Timestamp {
        // a small range so equal timestamps are common
        self.base + Duration::seconds(self.rng.random_range(0..30))
    }

    fn user(&mut self) -> UserId {
        if self.users.is_empty() || self.rng.random_bool(0.05) {
            UserId::generate()
        } else {
            self.users[self.rng.random_range(0..self.users.len())].clone()
        }
    }

    fn scenario(&mut self) -> Option<Scenario> {
        if self.scenarios.is_empty() || self.rng.random_bool(0.05) {
            None
        } else {
            Some(self.scenarios[self.rng.random_range(0..self.scenarios.len())].clone())
        }
    }

    fn mood(&mut self) -> Mood {
        Mood::ALL[self.rng.random_range(0..9)]
    }

    fn statements(&mut self) -> Vec<Statement> {
        let n = self.rng.random_range(0..4);
        (0..n)
            .map(|i| Statement {
                statement_id: StatementId::generate(),
                text: format!("s{i}"),
                position: i,
            })
            .collect()
    }
}

/// Runs `ops` random operations against both `store` and a fresh model,
/// comparing every outcome and, periodically, the full observable state.
pub fn run_differential(store: &Store, seed: u64, ops: usize) -> Result<(), String> {
    let mut model = RefStore::default();
    let mut d = Driver {
        rng: StdRng::seed_from_u64(seed),
        base: Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap(),
        users: vec![],
        scenarios: vec![],
        visions: vec![],
    };

    for step in 0..ops {
        let kind = d.rng.random_range(0..100);
        let (got, want) = match kind {
            0..=14 => {
                let role = if d.rng.random_bool(0.3) { Role::Policymaker } else { Role::Citizen };
                let user = UserAccount {
                    user_id: UserId::generate(),
                    handle: format!("h{}", d.rng.random_range(0..HANDLE_POOL)),
                    role,
                    created_at: d.time(),
                };
                let got = classify(store.atomically(|tx| tx.insert_user(&user)));
                let want = model.insert_user(&user);
                if want == Outcome::Ok {
                    d.users.push(user.user_id.clone());
                }
                (got, want)
            }
            15..=24 => {
                let statements = d.statements();
                let scenario = Scenario {
                    scenario_id: ScenarioId::generate(),
                    owner: d.user(),
                    title: "t".into(),
                    description: String::new(),
                    statements,
                    status: ScenarioStatus::Draft,
                    created_at: d.time(),
                    published_at: None,
                };
                let got = classify(store.atomically(|tx| tx.insert_scenario(&scenario)));
                let want = model.insert_scenario(&scenario);
                if want == Outcome::Ok {
                    d.scenarios.push(scenario);
                }
                (got, want)
            }
            25..=31 => {
                let mut scenario = d.scenario().unwrap_or_else(|| Scenario {
                    scenario_id: ScenarioId::generate(),
                    owner: UserId::generate(),
                    title: "ghost".into(),
                    description: String::new(),
                    statements: vec![],
                    status: ScenarioStatus::Draft,
                    created_at: d.base,
                    published_at: None,
                });
                scenario.status = [ScenarioStatus::Draft, ScenarioStatus::Published, ScenarioStatus::Archived]
                    [d.rng.random_range(0..3)];
                scenario.published_at = Some(d.time());
                scenario.title = format!("t{step}");
                if d.rng.random_bool(0.3) {
                    scenario.statements = d.statements();
                }
                let got = classify(store.atomically(|tx| tx.update_scenario(&scenario)));
                let want = model.update_scenario(&scenario);
                if want == Outcome::Ok {
                    if let Some(slot) = d.scenarios.iter_mut().find(|s| s.scenario_id == scenario.scenario_id) {
                        *slot = scenario;
                    }
                }
                (got, want)
            }
            32..=49 => {
                let scenario = d.scenario();
                let answers = match &scenario {
                    Some(s) => s
                        .statements
                        .iter()
                        .map(|st| (st.statement_id.clone(), d.rng.random_range(1..=5u8)))
                        .collect(),
                    None => BTreeMap::new(),
                };
                let response = SurveyResponse {
                    response_id: ResponseId::generate(),
                    scenario_id: scenario.map(|s| s.scenario_id).unwrap_or_else(ScenarioId::generate),
                    user_id: d.user(),
                    answers,
                    submitted_at: d.time(),
                };
                let got = classify(store.atomically(|tx| tx.insert_response(&response)));
                (got, model.insert_response(&response))
            }
            50..=67 => {
                let scenario_id = d.scenario().map(|s| s.scenario_id).unwrap_or_else(ScenarioId::generate);
                let vision = Vision {
                    vision_id: VisionId::generate(),
                    scenario_id,
                    author: d.user(),
                    image: cocteau_core::domain::ImageRef::direct("https://e.org/i.jpg").unwrap(),
                    caption: format!("c{step}"),
                    mood: d.mood(),
                    created_at: d.time(),
                };
                let got = classify(store.atomically(|tx| tx.insert_vision(&vision)));
                let want = model.insert_vision(&vision);
                if want == Outcome::Ok {
                    d.visions.push(vision);
                }
                (got, want)
            }
            68..=85 => {
                let (vision_id, scenario_id, actual) = if d.visions.is_empty() || d.rng.random_bool(0.05) {
                    (VisionId::generate(), ScenarioId::generate(), Mood::Calm)
                } else {
                    let v = &d.visions[d.rng.random_range(0..d.visions.len())];
                    (v.vision_id.clone(), v.scenario_id.clone(), v.mood)
                };
                let guess = Guess {
                    guess_id: GuessId::generate(),
                    guesser: d.user(),
                    vision_id,
                    scenario_id,
                    guessed_mood: d.mood(),
                    actual_mood: actual,
                    points_awarded: [0, 5, 10][d.rng.random_range(0..3)],
                    created_at: d.time(),
                };
                let got = classify(store.atomically(|tx| tx.insert_guess(&guess)));
                (got, model.insert_guess(&guess))
            }
            86..=91 => {
                let stats = PlayerStats {
                    user_id: d.user(),
                    scenario_id: d.scenario().map(|s| s.scenario_id).unwrap_or_else(ScenarioId::generate),
                    total_points: d.rng.random_range(0..1000),
                    guesses_made: d.rng.random_range(0..100),
                    exact_matches: d.rng.random_range(0..100),
                    current_streak: d.rng.random_range(0..100),
                };
                let got = classify(store.atomically(|tx| tx.upsert_stats(&stats)));
                model.upsert_stats(&stats);
                (got, Outcome::Ok)
            }
            92..=95 => {
                let id = d.user();
                let got = store.read(|tx| tx.get_user(&id));
                let want = model.users.iter().find(|u| u.user_id == id).cloned();
                match (&got, &want) {
                    (Ok(a), Some(b)) if a == b => {}
                    (Err(e), None) if e.is_not_found() => {}
                    _ => return Err(format!("step {step}: get_user mismatch {got:?} vs {want:?}")),
                }
                continue;
            }
            _ => {
                let scenario_id = d.scenario().map(|s| s.scenario_id).unwrap_or_else(ScenarioId::generate);
                let size = d.rng.random_range(1..8);
                let page = d.rng.random_range(1..5);
                let got = store.read(|tx| tx.paginate_visions(&scenario_id, page, size)).unwrap();
                let (items, total) = model.vision_page(&scenario_id, page, size);
                if got.items != items || got.total != total {
                    return Err(format!("step {step}: page {page}/{size} differs"));
                }
                continue;
            }
        };
        if got != want {
            return Err(format!("step {step} (op {kind}): store {got:?}, model {want:?}"));
        }
        if step % 500 == 499 && store_snapshot(store) != model.snapshot() {
            return Err(format!("state diverged by step {step}"));
        }
    }
    if store_snapshot(store) != model.snapshot() {
        return Err("final state diverged".into());
    }
    Ok(())
}
