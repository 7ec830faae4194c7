use ramsey_forge::harness::{run_experiment, run_with_workers, ExperimentConfig, CSV_HEADER};
use ramsey_forge::Error;

fn cfg(json: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(json, "inline").unwrap()
}

#[test]
fn outputs_are_written_where_configured() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let summary = dir.path().join("summary.json");
    let text = format!(
        r#"{{"task":"bandwidth","instances":["cycle:8","hypercube:3"],"seeds":[1,2],
            "output":{{"csv":{:?},"summary":{:?}}}}}"#,
        csv, summary
    );
    let out = run_experiment(&cfg(&text), "inline").unwrap();
    assert_eq!(std::fs::read_to_string(&csv).unwrap(), out.csv);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(json["cells"], 4);
    let mut lines = out.csv.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(lines.count(), 4);
    assert!(out.records.iter().all(|r| r.verified));
}

#[test]
fn identical_runs_are_byte_identical() {
    let c = cfg(r#"{"task":"embed-wheel","instances":["complete:14"],"params":{"k":5,"weight":"1/2"},"seeds":{"start":0,"count":12}}"#);
    let a = run_with_workers(&c, "inline", 1).unwrap();
    let b = run_with_workers(&c, "inline", 1).unwrap();
    let d = run_with_workers(&c, "inline", 3).unwrap();
    assert_eq!(a.csv, b.csv);
    assert_eq!(a.csv, d.csv);
    assert_eq!(a.summary_json, d.summary_json);
}

#[test]
fn config_errors_name_the_path() {
    match ExperimentConfig::load(std::path::Path::new("/nonexistent/cfg.json")) {
        Err(Error::Config { path, .. }) => assert!(path.contains("cfg.json")),
        other => panic!("{other:?}"),
    }
    assert!(ExperimentConfig::from_json(r#"{"task":"ramsey","bogus":1}"#, "x").is_err());
    let bad_task = cfg(r#"{"task":"nope","instances":["complete:3"],"seeds":[1]}"#);
    assert!(run_with_workers(&bad_task, "inline", 1).is_err());
}

#[test]
fn degenerate_bandwidth_is_reported_not_run() {
    let c = cfg(r#"{"task":"embed-drc","instances":["ladder:16"],"params":{"host":"complete:128","alpha":"1/2"},"seeds":[0,1]}"#);
    let out = run_with_workers(&c, "inline", 1).unwrap();
    assert!(out.records.iter().all(|r| r.outcome == "degenerate" && r.stage == "bandwidth-budget"));
    assert_eq!(out.summary.successes, 0);
}
