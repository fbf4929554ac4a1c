use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rta-ofdma"));
    c.env_remove("RTA_OFDMA_OUT_DIR");
    c
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn four_station_trace(scheduler: &str) -> String {
    let arrivals = fixture("four_station_arrivals.csv");
    stdout(&run(&[
        "trace",
        "--scheduler",
        scheduler,
        "--stations",
        "12",
        "--f-max",
        "5",
        "--f-ra",
        "1",
        "--identity-shuffle",
        "--arrivals",
        arrivals.to_str().unwrap(),
    ]))
}

#[test]
fn cra_trace_matches_golden() {
    assert_eq!(
        four_station_trace("cra"),
        fs::read_to_string(fixture("cra_four_stations.jsonl")).unwrap()
    );
}

#[test]
fn gra_trace_matches_golden() {
    assert_eq!(
        four_station_trace("gra"),
        fs::read_to_string(fixture("gra_four_stations.jsonl")).unwrap()
    );
}

#[test]
fn empty_script_traces_ra_only_slots() {
    let arrivals = fixture("empty_arrivals.csv");
    let out = stdout(&run(&[
        "trace",
        "--horizon",
        "3",
        "--arrivals",
        arrivals.to_str().unwrap(),
    ]));
    let expected = "{\"slot\":K,\"rus\":[{\"kind\":\"ra\",\"stations\":[],\"outcome\":\"empty\",\"transmitters\":[]}],\"nonrta_rus\":17}\n";
    let want: String = (0..3).map(|k| expected.replace('K', &k.to_string())).collect();
    assert_eq!(out, want);
}

#[test]
fn gra_with_ax_exits_with_usage_code() {
    let arrivals = fixture("empty_arrivals.csv");
    let o = run(&["sweep", "--scheduler", "gra", "--rules", "ax", "--stations", "30"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    let o = run(&[
        "trace",
        "--scheduler",
        "gra",
        "--rules",
        "ax",
        "--arrivals",
        arrivals.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_flag_and_malformed_arrivals_exit_2() {
    assert_eq!(run(&["sweep", "--bogus", "1"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "0,0\nseven,1\n").unwrap();
    let o = run(&["trace", "--arrivals", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn config_file_values_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.conf");
    fs::write(
        &cfg,
        "# empty network, static RA\nscheduler-kind = uora\nn-stations = 0\nf-ra = 2\nstop-rule = slot-count\nstop-value = 50\nreplications = 1\n",
    )
    .unwrap();
    let out = stdout(&run(&["sweep", "--config", cfg.to_str().unwrap(), "--f-ra", "3"]));
    let row = out.lines().nth(1).unwrap();
    assert!(row.starts_with("stations,0,uora,be,3,18,"), "{row}");
    assert!(row.contains(&format!(",{},", 15.0f64 / 18.0)), "{row}");
}

#[test]
fn empty_network_uora_shares() {
    let out = stdout(&run(&[
        "sweep",
        "--scheduler",
        "uora",
        "--stations",
        "0",
        "--stop",
        "slot-count",
        "--stop-value",
        "200",
        "--reps",
        "2",
        "--f-ra",
        "1:4:1",
    ]));
    let shares: Vec<String> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(11).unwrap().to_string())
        .collect();
    let want: Vec<String> = [17.0f64, 16.0, 15.0, 14.0]
        .iter()
        .map(|k| (k / 18.0).to_string())
        .collect();
    assert_eq!(shares, want);
}

#[test]
fn sweep_is_byte_identical_across_runs() {
    let args = [
        "sweep",
        "--scheduler",
        "gra",
        "--stations",
        "20:40:10",
        "--stop-value",
        "2000",
        "--reps",
        "3",
        "--seed",
        "9",
    ];
    let a = stdout(&run(&args));
    let b = stdout(&run(&args));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 4);
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin()
        .env("RTA_OFDMA_OUT_DIR", dir.path())
        .args([
            "sweep",
            "--scheduler",
            "cra",
            "--stations",
            "8",
            "--stop-value",
            "500",
            "--reps",
            "2",
        ])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("sweep.json")).unwrap()).unwrap();
    assert_eq!(json["rows"][0]["config"]["scheduler"], "cra");
    assert_eq!(json["rows"][0]["replications"], 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("resolved config"));
}
