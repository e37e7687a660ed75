//! Multi-step HTTP flows shared by the API tests and the acceptance suite.

use cocteau_core::domain::Role;
use reqwest::Method;
use serde_json::{json, Value};

use super::{Reply, TestServer};

fn expect(reply: &Reply, status: u16, what: &str) -> Result<(), String> {
    if reply.status == status {
        Ok(())
    } else {
        Err(format!("{what}: expected {status}, got {} {}", reply.status, reply.json))
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a str, String> {
    v[key].as_str().ok_or_else(|| format!("missing {key} in {v}"))
}

/// Session, scenario, publish, survey, image search, vision, challenge,
/// guess and report, checking each step's contract along the way.
pub async fn happy_path(server: &TestServer, tag: &str) -> Result<(), String> {
    let pm = server.session(&format!("pm-{tag}"), Role::Policymaker).await;
    let author = server.session(&format!("author-{tag}"), Role::Citizen).await;
    let player = server.session(&format!("player-{tag}"), Role::Citizen).await;

    let created = server
        .post(
            "/api/scenarios",
            &pm,
            json!({
                "title": "New formats for academic conferences",
                "description": "Hybrid or local hubs?",
                "statements": ["Travel is a burden", "Hubs keep the community together"],
            }),
        )
        .await;
    expect(&created, 201, "create scenario")?;
    let sid = field(&created.json, "scenario_id")?.to_owned();
    if created.json["status"] != "draft" {
        return Err(format!("new scenario is not a draft: {}", created.json));
    }

    let published = server
        .call(
            Method::PATCH,
            &format!("/api/scenarios/{sid}/status"),
            Some(&pm),
            Some(json!({"status": "published"})),
        )
        .await;
    expect(&published, 200, "publish")?;

    let form = server.get(&format!("/api/scenarios/{sid}/survey"), &author).await;
    expect(&form, 200, "survey form")?;
    let statements = form.json["statements"].as_array().ok_or("no statements")?;
    if statements.len() != 2 || form.json["scale"].as_array().map(Vec::len) != Some(5) {
        return Err(format!("unexpected survey form {}", form.json));
    }
    let answers: serde_json::Map<String, Value> = statements
        .iter()
        .enumerate()
        .map(|(i, s)| (s["statement_id"].as_str().unwrap().to_owned(), json!(i + 4)))
        .collect();
    let submitted = server
        .post(
            &format!("/api/scenarios/{sid}/survey-responses"),
            &author,
            json!({ "answers": answers }),
        )
        .await;
    expect(&submitted, 201, "survey response")?;

    let images = server.get("/api/images?q=conference%20hall&per_page=5", &author).await;
    expect(&images, 200, "image search")?;
    let first = images.json["results"]
        .get(0)
        .cloned()
        .ok_or("image search returned nothing")?;

    let vision = server
        .post(
            &format!("/api/scenarios/{sid}/visions"),
            &author,
            json!({"image": first, "caption": "A quiet hub near home", "mood": "relaxed"}),
        )
        .await;
    expect(&vision, 201, "create vision")?;
    let vid = field(&vision.json, "vision_id")?.to_owned();

    let challenge = server.get(&format!("/api/scenarios/{sid}/game/next"), &player).await;
    expect(&challenge, 200, "next challenge")?;
    if field(&challenge.json, "vision_id")? != vid {
        return Err("challenge is not the only eligible vision".into());
    }
    let obj = challenge.json.as_object().ok_or("challenge is not an object")?;
    if obj.contains_key("actual_mood") || obj.contains_key("mood") {
        return Err(format!("challenge leaks the mood: {}", challenge.json));
    }

    let guess = server
        .post("/api/guesses", &player, json!({"vision_id": vid, "mood": "calm"}))
        .await;
    expect(&guess, 201, "guess")?;
    if guess.json["actual_mood"] != "relaxed" || guess.json["points_awarded"] != 5 {
        return Err(format!("unexpected guess result {}", guess.json));
    }

    let report = server.get(&format!("/api/scenarios/{sid}/report"), &pm).await;
    expect(&report, 200, "report")?;
    let r = &report.json;
    let checks = [
        (r["vision_count"] == 1, "vision_count"),
        (r["response_count"] == 1, "response_count"),
        (r["distinct_participants"] == 2, "distinct_participants"),
        (r["overall_guess_accuracy"] == 0.0, "overall_guess_accuracy"),
        (r["mood_distribution"]["relaxed"]["count"] == 1, "mood_distribution"),
        (r["likert"][1]["counts"] == json!([0, 0, 0, 0, 1]), "likert counts"),
    ];
    for (ok, what) in checks {
        if !ok {
            return Err(format!("report {what} wrong: {r}"));
        }
    }
    Ok(())
}
