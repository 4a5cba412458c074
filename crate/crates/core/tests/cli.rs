use std::fs;

use sepvol::cli::{self, Command, RunConfig};
use sepvol::integrate::Surface;
use sepvol::Error;

fn config(command: Command, dir: &std::path::Path) -> RunConfig {
    RunConfig { command, points: 20_000, checkpoint_every: Some(3_000), output_dir: dir.to_path_buf(), ..RunConfig::default() }
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg_a = RunConfig { metrics: vec!["bures".into(), "km".into()], ..config(Command::Volume, a.path()) };
    let cfg_b = RunConfig { output_dir: b.path().to_path_buf(), ..cfg_a.clone() };
    let out_a = cli::execute_with_threads(&cfg_a, Some(1)).unwrap();
    cli::execute_with_threads(&cfg_b, Some(3)).unwrap();
    for f in &out_a.files {
        let name = f.file_name().unwrap();
        let (x, y) = (fs::read(f).unwrap(), fs::read(b.path().join(name)).unwrap());
        if name.to_string_lossy().ends_with(".json") {
            // the config echo names the directory
            let strip = |v: Vec<u8>| String::from_utf8(v).unwrap().lines().filter(|l| !l.contains("output_dir")).collect::<Vec<_>>().join("\n");
            assert_eq!(strip(x), strip(y));
        } else {
            assert_eq!(x, y);
        }
    }
}

#[test]
fn csv_has_one_row_per_full_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    cli::execute(&config(Command::Volume, dir.path())).unwrap();
    let text = fs::read_to_string(dir.path().join("volume_bures.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("points,estimate_total,estimate_sep,estimate_nonsep,prob_sep"));
    assert_eq!(lines.count(), 20_000 / 3_000);

    let cfg = RunConfig { checkpoint_every: Some(1_000), points: 2_500, ..config(Command::Boundary, dir.path()) };
    cli::execute(&cfg).unwrap();
    let text = fs::read_to_string(dir.path().join("boundary_bures.csv")).unwrap();
    assert!(text.starts_with("points,B_total,B_sep,beta\n"));
    assert_eq!(text.lines().count(), 1 + 2);
}

#[test]
fn json_report_carries_targets_and_config() {
    let dir = tempfile::tempdir().unwrap();
    cli::execute(&config(Command::Volume, dir.path())).unwrap();
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("volume.json")).unwrap()).unwrap();
    let r = &v["results"][0];
    assert_eq!(r["targets"]["V_total"]["target"], "pi^8/5040");
    assert!(r["targets"]["V_sep"]["relative_deviation"].is_f64());
    assert_eq!(v["seed"], 1);
    assert_eq!(v["config"]["points"], 20_000);
}

#[test]
fn kubo_mori_rank_three_is_a_structured_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig { metrics: vec!["km".into()], surfaces: vec![Surface::Rank3], ..config(Command::Boundary, dir.path()) };
    match cli::execute(&cfg) {
        Err(Error::UnsupportedStratum { metric, surface }) => {
            assert_eq!(metric, "KM");
            assert_eq!(surface, "rank3");
        }
        other => panic!("expected an unsupported-stratum error, got {other:?}"),
    }
    let code = cli::main_with_args(["sepvol", "boundary", "--metric", "km", "--surface", "rank3", "-n", "10"]);
    assert_eq!(code, 1);
}

#[test]
fn conjectures_command_writes_ledger() {
    let dir = tempfile::tempdir().unwrap();
    cli::execute(&config(Command::Conjectures, dir.path())).unwrap();
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("conjectures.json")).unwrap()).unwrap();
    let entries = v["entries"].as_array().unwrap();
    let km = entries.iter().find(|e| e["metric"] == "KM" && e["quantity"] == "V_total").unwrap();
    assert_eq!(km["V_total"], "4*pi^8/315");
    assert!((km["value"].as_f64().unwrap() - 120.489).abs() < 5e-4);
}

#[test]
fn config_file_runs_match_flag_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig { name: Some("from_file".into()), ..config(Command::Sweep, dir.path()) };
    let path = dir.path().join("run.json");
    fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let code = cli::main_with_args(["sepvol".into(), "run".into(), "--config".into(), path.into_os_string()]);
    assert_eq!(code, 0);
    let text = fs::read_to_string(dir.path().join("from_file.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + cfg.a_values.len());
}

#[test]
fn unknown_metric_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig { metrics: vec!["nope".into()], ..config(Command::Volume, dir.path()) };
    assert!(matches!(cli::execute(&cfg), Err(Error::UnknownMetric(_))));
}
