use std::path::Path;

use pensionlab_core::sweeps::CSV_HEADER;
use pensionlab_core::*;
use pensionlab_service::{AppState, ErrorBody, SavedScenario, ScenarioStore};
use reqwest::StatusCode;
use serde_json::{json, Value};

struct Server {
    base: String,
    handle: tokio::task::JoinHandle<()>,
}

impl Drop for Server {
    fn drop(&mut self) {
        self.handle.abort();
    }
}

async fn start(data: &Path) -> Server {
    let store = ScenarioStore::open(data).unwrap();
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let handle = tokio::spawn(async move {
        pensionlab_service::serve(listener, AppState::new(store))
            .await
            .unwrap();
    });
    Server {
        base: format!("http://{addr}/api/v1"),
        handle,
    }
}

fn reference() -> EmployeeProfile {
    EmployeeProfile::level_10_reference()
}

fn pinned_request() -> ProjectionRequest {
    ProjectionRequest::new(Scheme::Nps, reference()).with_overrides(Overrides {
        corpus: Some(Money::from_rupees(53_349_262)),
        ..Overrides::default()
    })
}

#[tokio::test]
async fn project_matches_engine() {
    let dir = tempfile::tempdir().unwrap();
    let srv = start(&dir.path().join("s.jsonl")).await;
    let client = reqwest::Client::new();

    let req = pinned_request();
    let resp = client
        .post(format!("{}/project", srv.base))
        .json(&req)
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    let body: Value = resp.json().await.unwrap();
    assert_eq!(body["monthly_pension"]["paise"], 26_674_600);
    assert_eq!(body, serde_json::to_value(project(&req).unwrap()).unwrap());

    let ops = ProjectionRequest::new(Scheme::Ops, reference()).with_overrides(Overrides {
        last_drawn_salary: Some(Money::from_rupees(2_245_536)),
        ..Overrides::default()
    });
    let body: Value = client
        .post(format!("{}/project", srv.base))
        .json(&ops)
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(body["monthly_pension"]["paise"], 112_276_800);
}

#[tokio::test]
async fn project_validation_and_domain_errors() {
    let dir = tempfile::tempdir().unwrap();
    let srv = start(&dir.path().join("s.jsonl")).await;
    let client = reqwest::Client::new();
    let url = format!("{}/project", srv.base);

    let resp = client.post(&url).body("").send().await.unwrap();
    assert_eq!(resp.status(), StatusCode::BAD_REQUEST);

    let mut v = serde_json::to_value(pinned_request()).unwrap();
    v["overrides"]["surprise"] = json!(true);
    let resp = client.post(&url).json(&v).send().await.unwrap();
    assert_eq!(resp.status(), StatusCode::BAD_REQUEST);
    let err: ErrorBody = resp.json().await.unwrap();
    assert!(err.message.contains("surprise"), "{}", err.message);

    let mut v = serde_json::to_value(pinned_request()).unwrap();
    v["profile"]["basic_pay"]["paise"] = json!(1.5);
    let resp = client.post(&url).json(&v).send().await.unwrap();
    assert_eq!(resp.status(), StatusCode::BAD_REQUEST);
    let err: ErrorBody = resp.json().await.unwrap();
    assert_eq!(err.field.as_deref(), Some("profile.basic_pay.paise"));

    let mut bad_age = pinned_request();
    bad_age.profile.retirement_age = 20;
    let resp = client.post(&url).json(&bad_age).send().await.unwrap();
    assert_eq!(resp.status(), StatusCode::BAD_REQUEST);
    let err: ErrorBody = resp.json().await.unwrap();
    assert_eq!(err.field.as_deref(), Some("retirement_age"));

    // Corporate + government caps of 30% + 40% cannot absorb the rest.
    let tight = json!({
        "equity": "0.15", "corporate_debt": "0.30", "government_securities": "0.40",
        "short_term_debt": "0.10", "alternative": "0.05"
    });
    let mut v = serde_json::to_value(ProjectionRequest::new(Scheme::Nps, reference())).unwrap();
    v["overrides"] = json!({ "lifecycle": "default", "caps": tight });
    let resp = client.post(&url).json(&v).send().await.unwrap();
    assert_eq!(resp.status(), StatusCode::UNPROCESSABLE_ENTITY);
}

fn share_grid_spec() -> SweepSpec {
    SweepSpec::parse(
        reference(),
        SweptParameter::AnnuityShare,
        &["0.40", "0.50", "0.60", "0.70", "0.75", "0.80"],
        Overrides::default(),
    )
    .unwrap()
}

#[tokio::test]
async fn sweep_endpoint() {
    let dir = tempfile::tempdir().unwrap();
    let srv = start(&dir.path().join("s.jsonl")).await;
    let client = reqwest::Client::new();
    let url = format!("{}/sweep", srv.base);

    let table: SweepTable = client
        .post(&url)
        .json(&share_grid_spec())
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(table.rows.len(), 6);
    assert!(table.metadata.generated_at.is_some());
    let pensions: Vec<i64> = table
        .results()
        .map(|r| r.monthly_pension.rupees())
        .collect();
    assert!((pensions[0] as f64 / 151_117.0 - 1.0).abs() < 1e-3);
    assert!((pensions[5] as f64 / 302_233.0 - 1.0).abs() < 1e-3);
    let mut direct = run_sweep(&share_grid_spec());
    direct.metadata.generated_at = table.metadata.generated_at;
    assert_eq!(table, direct);

    let resp = client
        .post(format!("{url}?format=csv"))
        .json(&share_grid_spec())
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    assert!(resp.headers()["content-type"]
        .to_str()
        .unwrap()
        .starts_with("text/csv"));
    let csv = resp.text().await.unwrap();
    assert_eq!(csv, run_sweep(&share_grid_spec()).to_csv());
    assert_eq!(csv.lines().next().unwrap(), CSV_HEADER.join(","));

    // A one-point grid is the same projection as /project.
    let one = SweepSpec::parse(
        reference(),
        SweptParameter::AnnuityShare,
        &["0.75"],
        Overrides::default(),
    )
    .unwrap();
    let table: SweepTable = client
        .post(&url)
        .json(&one)
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    let single: ProjectionResult = client
        .post(format!("{}/project", srv.base))
        .json(&one.row_request(&one.grid()[0]))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(table.rows[0].result.as_ref().unwrap(), &single);

    let mut v = serde_json::to_value(share_grid_spec()).unwrap();
    v["grid"] = json!(["0.80", "0.40"]);
    let resp = client.post(&url).json(&v).send().await.unwrap();
    assert_eq!(resp.status(), StatusCode::BAD_REQUEST);

    let resp = client
        .post(format!("{url}?format=xml"))
        .json(&share_grid_spec())
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), StatusCode::BAD_REQUEST);
}

async fn create(client: &reqwest::Client, base: &str, name: &str) -> SavedScenario {
    let resp = client
        .post(format!("{base}/scenarios"))
        .json(&json!({ "name": name, "profile": reference() }))
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), StatusCode::CREATED);
    resp.json().await.unwrap()
}

#[tokio::test]
async fn scenario_crud_and_restart() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("s.jsonl");
    let client = reqwest::Client::new();
    let (a, b_id) = {
        let srv = start(&data).await;
        let a = create(&client, &srv.base, "baseline").await;
        let got: SavedScenario = client
            .get(format!("{}/scenarios/{}", srv.base, a.id))
            .send()
            .await
            .unwrap()
            .json()
            .await
            .unwrap();
        assert_eq!(got, a);
        let b = create(&client, &srv.base, "second").await;
        let list: Vec<SavedScenario> = client
            .get(format!("{}/scenarios", srv.base))
            .send()
            .await
            .unwrap()
            .json()
            .await
            .unwrap();
        assert_eq!(
            list.iter().map(|s| &s.id).collect::<Vec<_>>(),
            vec![&b.id, &a.id]
        );

        let resp = client
            .get(format!("{}/scenarios/nope", srv.base))
            .send()
            .await
            .unwrap();
        assert_eq!(resp.status(), StatusCode::NOT_FOUND);
        let resp = client
            .post(format!("{}/scenarios", srv.base))
            .json(&json!({ "name": "", "profile": reference() }))
            .send()
            .await
            .unwrap();
        assert_eq!(resp.status(), StatusCode::BAD_REQUEST);

        let resp = client
            .delete(format!("{}/scenarios/{}", srv.base, b.id))
            .send()
            .await
            .unwrap();
        assert_eq!(resp.status(), StatusCode::NO_CONTENT);
        (a, b.id)
    };

    let srv = start(&data).await;
    let got: SavedScenario = client
        .get(format!("{}/scenarios/{}", srv.base, a.id))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(got, a);
    let resp = client
        .get(format!("{}/scenarios/{}", srv.base, b_id))
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), StatusCode::NOT_FOUND);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn racing_updates_yield_one_conflict() {
    let dir = tempfile::tempdir().unwrap();
    let srv = start(&dir.path().join("s.jsonl")).await;
    let client = reqwest::Client::new();
    for round in 0..10 {
        let s = create(&client, &srv.base, &format!("race {round}")).await;
        let url = format!("{}/scenarios/{}", srv.base, s.id);
        let body = |name: &str| json!({ "name": name, "profile": s.profile, "expected_updated_at": s.updated_at });
        let (r1, r2) = tokio::join!(
            client.put(&url).json(&body("left")).send(),
            client.put(&url).json(&body("right")).send()
        );
        let mut statuses = [r1.unwrap().status(), r2.unwrap().status()];
        statuses.sort();
        assert_eq!(
            statuses,
            [StatusCode::OK, StatusCode::CONFLICT],
            "round {round}"
        );
    }
}
