//! Python bindings. Results cross the boundary as plain dicts and lists
//! built from each type's JSON form, so they match the HTTP API payloads.

use std::collections::BTreeMap;
use std::sync::Arc;

use cocteau_core::domain::{
    mood_catalog, ImageRef, Mood, MoodEntry, Role, ScenarioId, ScenarioStatus, StatementId,
    UserId, VisionId,
};
use cocteau_core::game::{classify as classify_pair, Outcome, ScoringTable};
use cocteau_core::images::{ImageSearchClient, ImageSearchQuery};
use cocteau_core::storage::{Backend, Store};
use cocteau_core::survey::LikertSummary;
use cocteau_core::PlatformError;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList, PyString};
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Serialize;
use serde_json::Value;

create_exception!(cocteau, CocteauError, PyException, "Raised with (code, message).");

fn raise(code: &str, message: impl Into<String>) -> PyErr {
    CocteauError::new_err((code.to_owned(), message.into()))
}

fn platform_err(err: PlatformError) -> PyErr {
    raise(err.code(), err.to_string())
}

fn parse<T: std::str::FromStr>(what: &str, s: &str) -> PyResult<T> {
    s.parse()
        .map_err(|_| raise("validation_error", format!("unknown {what} {s:?}")))
}

fn json_to_py<'py>(py: Python<'py>, value: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match value {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => i.into_pyobject(py)?.into_any(),
            (_, Some(u), _) => u.into_pyobject(py)?.into_any(),
            (_, _, f) => f.unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, json_to_py(py, v)?)?;
            }
            dict.into_any()
        }
    })
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let json = serde_json::to_value(value).map_err(|e| raise("internal", e.to_string()))?;
    json_to_py(py, &json)
}

/// The nine moods in catalog order with their grid coordinates.
#[pyfunction]
fn moods(py: Python<'_>) -> PyResult<Bound<'_, PyAny>> {
    let entries: Vec<MoodEntry> = mood_catalog().into_iter().map(MoodEntry::from).collect();
    to_py(py, &entries)
}

/// Points for guessing `guessed` when the author chose `actual`.
#[pyfunction]
fn score(actual: &str, guessed: &str) -> PyResult<u32> {
    let (actual, guessed): (Mood, Mood) = (parse("mood", actual)?, parse("mood", guessed)?);
    Ok(ScoringTable::default().points(actual, guessed))
}

/// "exact", "same_cell" or "miss".
#[pyfunction]
fn classify(actual: &str, guessed: &str) -> PyResult<&'static str> {
    let (actual, guessed): (Mood, Mood) = (parse("mood", actual)?, parse("mood", guessed)?);
    Ok(match classify_pair(actual, guessed) {
        Outcome::Exact => "exact",
        Outcome::SameCell => "same_cell",
        Outcome::Miss => "miss",
    })
}

/// Counts, mean and median for a list of 1..=5 levels.
#[pyfunction]
fn likert_summary(py: Python<'_>, levels: Vec<i64>) -> PyResult<Bound<'_, PyAny>> {
    let mut checked = Vec::with_capacity(levels.len());
    for level in levels {
        match u8::try_from(level) {
            Ok(l @ 1..=5) => checked.push(l),
            _ => return Err(raise("level_out_of_range", format!("level {level} is outside 1..=5"))),
        }
    }
    to_py(py, &LikertSummary::from_levels(StatementId::from("statement"), checked))
}

#[pyclass(module = "cocteau")]
struct Platform {
    inner: cocteau_core::Platform,
    runtime: tokio::runtime::Runtime,
}

#[pymethods]
impl Platform {
    /// `storage_url` defaults to a private in-memory database; pass
    /// `"embedded:/path/to/file.db"` for a persistent one.
    #[new]
    #[pyo3(signature = (storage_url = None))]
    fn new(storage_url: Option<&str>) -> PyResult<Self> {
        let backend: Backend = parse("storage url", storage_url.unwrap_or("embedded:"))?;
        let store = Store::open(backend).map_err(|e| platform_err(e.into()))?;
        let runtime = tokio::runtime::Builder::new_current_thread()
            .enable_all()
            .build()
            .map_err(|e| raise("internal", e.to_string()))?;
        Ok(Platform {
            inner: cocteau_core::Platform::new(Arc::new(store), ImageSearchClient::stub()),
            runtime,
        })
    }

    #[pyo3(signature = (handle, role = "citizen"))]
    fn create_user<'py>(&self, py: Python<'py>, handle: &str, role: &str) -> PyResult<Bound<'py, PyAny>> {
        let role: Role = parse("role", role)?;
        let user = self.inner.create_user(handle, role).map_err(platform_err)?;
        to_py(py, &user)
    }

    #[pyo3(signature = (owner, title, statements, description = ""))]
    fn create_scenario<'py>(
        &self,
        py: Python<'py>,
        owner: &str,
        title: &str,
        statements: Vec<String>,
        description: &str,
    ) -> PyResult<Bound<'py, PyAny>> {
        let scenario = self
            .inner
            .create_scenario(&UserId::from(owner), title, description, &statements)
            .map_err(platform_err)?;
        to_py(py, &scenario)
    }

    fn transition_scenario<'py>(
        &self,
        py: Python<'py>,
        actor: &str,
        scenario_id: &str,
        status: &str,
    ) -> PyResult<Bound<'py, PyAny>> {
        let status: ScenarioStatus = serde_json::from_value(Value::String(status.to_owned()))
            .map_err(|_| raise("validation_error", format!("unknown status {status:?}")))?;
        let scenario = self
            .inner
            .transition_scenario(&UserId::from(actor), &ScenarioId::from(scenario_id), status)
            .map_err(platform_err)?;
        to_py(py, &scenario)
    }

    fn submit_response<'py>(
        &self,
        py: Python<'py>,
        user: &str,
        scenario_id: &str,
        answers: BTreeMap<String, i64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let answers = answers
            .into_iter()
            .map(|(k, v)| (StatementId::from(k), v))
            .collect();
        let response = self
            .inner
            .submit_response(&UserId::from(user), &ScenarioId::from(scenario_id), &answers)
            .map_err(platform_err)?;
        to_py(py, &response)
    }

    fn aggregate_statement<'py>(
        &self,
        py: Python<'py>,
        scenario_id: &str,
        statement_id: &str,
    ) -> PyResult<Bound<'py, PyAny>> {
        let summary = self
            .inner
            .aggregate_statement(&ScenarioId::from(scenario_id), &StatementId::from(statement_id))
            .map_err(platform_err)?;
        to_py(py, &summary)
    }

    /// Searches the built-in deterministic image provider.
    #[pyo3(signature = (keywords, page = None, per_page = None))]
    fn search_images<'py>(
        &self,
        py: Python<'py>,
        keywords: &str,
        page: Option<u32>,
        per_page: Option<u32>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let query = ImageSearchQuery::new(keywords, page, per_page)
            .map_err(|e| platform_err(e.into()))?;
        let page = self
            .runtime
            .block_on(self.inner.search_images(&query))
            .map_err(platform_err)?;
        to_py(py, &page)
    }

    fn create_vision<'py>(
        &self,
        py: Python<'py>,
        author: &str,
        scenario_id: &str,
        image_url: &str,
        caption: &str,
        mood: &str,
    ) -> PyResult<Bound<'py, PyAny>> {
        let image = ImageRef::direct(image_url).map_err(|e| platform_err(e.into()))?;
        let vision = self
            .inner
            .create_vision(
                &UserId::from(author),
                &ScenarioId::from(scenario_id),
                image,
                caption,
                parse("mood", mood)?,
            )
            .map_err(platform_err)?;
        to_py(py, &vision)
    }

    #[pyo3(signature = (scenario_id, page = 1, page_size = 20))]
    fn vision_feed<'py>(
        &self,
        py: Python<'py>,
        scenario_id: &str,
        page: u32,
        page_size: u32,
    ) -> PyResult<Bound<'py, PyAny>> {
        let feed = self
            .inner
            .vision_feed(&ScenarioId::from(scenario_id), page, page_size)
            .map_err(platform_err)?;
        to_py(py, &feed)
    }

    #[pyo3(signature = (player, scenario_id, seed = None))]
    fn next_challenge<'py>(
        &self,
        py: Python<'py>,
        player: &str,
        scenario_id: &str,
        seed: Option<u64>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let mut rng = match seed {
            Some(seed) => StdRng::seed_from_u64(seed),
            None => StdRng::from_os_rng(),
        };
        let challenge = self
            .inner
            .next_challenge(&UserId::from(player), &ScenarioId::from(scenario_id), &mut rng)
            .map_err(platform_err)?;
        to_py(py, &challenge)
    }

    fn submit_guess<'py>(
        &self,
        py: Python<'py>,
        player: &str,
        vision_id: &str,
        mood: &str,
    ) -> PyResult<Bound<'py, PyAny>> {
        let result = self
            .inner
            .submit_guess(&UserId::from(player), &VisionId::from(vision_id), parse("mood", mood)?)
            .map_err(platform_err)?;
        to_py(py, &result)
    }

    fn player_stats<'py>(&self, py: Python<'py>, player: &str, scenario_id: &str) -> PyResult<Bound<'py, PyAny>> {
        let stats = self
            .inner
            .player_stats(&UserId::from(player), &ScenarioId::from(scenario_id))
            .map_err(platform_err)?;
        to_py(py, &stats)
    }

    fn empathy_profile<'py>(&self, py: Python<'py>, player: &str, scenario_id: &str) -> PyResult<Bound<'py, PyAny>> {
        let profile = self
            .inner
            .empathy_profile(&UserId::from(player), &ScenarioId::from(scenario_id))
            .map_err(platform_err)?;
        to_py(py, &profile)
    }

    /// Report for a scenario as seen by a caller with `role`.
    #[pyo3(signature = (scenario_id, role = "policymaker"))]
    fn scenario_report<'py>(&self, py: Python<'py>, scenario_id: &str, role: &str) -> PyResult<Bound<'py, PyAny>> {
        let report = self
            .inner
            .scenario_report(parse("role", role)?, &ScenarioId::from(scenario_id))
            .map_err(platform_err)?;
        to_py(py, &report)
    }

    /// Loads the demo scenario and returns it.
    fn seed_demo<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let scenario = cocteau_core::demo::seed_demo(&self.inner).map_err(platform_err)?;
        to_py(py, &scenario)
    }
}

#[pymodule]
fn cocteau(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CocteauError", m.py().get_type::<CocteauError>())?;
    m.add_function(wrap_pyfunction!(moods, m)?)?;
    m.add_function(wrap_pyfunction!(score, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(likert_summary, m)?)?;
    m.add_class::<Platform>()?;
    Ok(())
}
