mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::d;
use rating_markov::diagnostics::write_test_series;
use rating_markov::ingest::{write_count_series, write_ratio_series};
use rating_markov::stats::write_moment_series;
use rating_markov::*;
use tempfile::TempDir;

const MOVING: &str = "bank_id,date,rating\n\
                      a,2007-01-01,C\na,2007-03-15,C-\na,2007-10-02,D+\n\
                      b,2007-01-01,B\nb,2007-06-01,B+\n\
                      c,2007-02-01,C-\nc,2007-09-01,WR\n";

const STATIC: &str = "bank_id,date,rating\n\
                      a,2007-01-01,C\nb,2007-01-01,C\nc,2007-01-01,C\n";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rating-markov"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn lines(p: &Path) -> Vec<String> {
    std::fs::read_to_string(p).unwrap().lines().map(String::from).collect()
}

fn column(rows: &[String], k: usize) -> Vec<String> {
    rows[1..].iter().map(|r| r.split(',').nth(k).unwrap().to_string()).collect()
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn ok(out: Output) {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn counts_writes_one_row_per_day() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.csv", MOVING);
    let out = dir.path().join("counts");
    ok(run(&["counts", "--input", s(&input), "--output", s(&out), "--from", "2007-01-01", "--to", "2007-12-31", "--tau", "30"]));
    let n = lines(&out.join("n_rated.csv"));
    assert_eq!(n[0], "date,value");
    assert_eq!(n.len(), 366);
    assert_eq!(n[1], "2007-01-01,2");
    assert_eq!(n[32], "2007-02-01,3");
    assert_eq!(n.last().unwrap(), "2007-12-31,2");
    let t = lines(&out.join("transitions_per_bank.csv"));
    assert_eq!(t.len(), 1 + 365 - 29);
}

#[test]
fn missing_input_names_the_path() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nowhere.csv");
    let out = run(&["counts", "--input", s(&missing), "--output", s(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nowhere.csv"));
}

#[test]
fn bad_row_reports_row_number() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.csv", "bank_id,date,rating\na,2007-01-01,C\na,2007-02-01,Z\n");
    let out = run(&["moments", "--input", s(&input), "--output", s(&dir.path().join("m.csv"))]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("row 3") && msg.contains("\"Z\""), "{msg}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["ck", "--output", "x", "--window", "week"]).status.code(), Some(1));
    assert_eq!(run(&["ck", "--output", "x", "--tau", "many"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn invalid_tau_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.csv", STATIC);
    let out = run(&["moments", "--input", s(&input), "--output", s(&dir.path().join("m.csv")), "--tau", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_panel_gives_header_only_files() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.csv", "bank_id,date,rating\n");
    let out = dir.path().join("counts");
    ok(run(&["counts", "--input", s(&input), "--output", s(&out)]));
    assert_eq!(lines(&out.join("n_rated.csv")), ["date,value"]);
    assert_eq!(lines(&out.join("transitions_per_bank.csv")), ["date,value"]);
    let m = dir.path().join("m.csv");
    ok(run(&["moments", "--input", s(&input), "--output", s(&m)]));
    assert_eq!(lines(&m).len(), 1);
    let h = dir.path().join("h.csv");
    ok(run(&["homogeneity", "--input", s(&input), "--output", s(&h)]));
    assert_eq!(lines(&h), ["window_start,window_end,statistic,value,abs_value,n_transitions"]);
}

#[test]
fn static_fixture_moments_and_ck() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.csv", STATIC);
    let span = ["--from", "2007-01-01", "--to", "2009-12-31"];

    let m = dir.path().join("m.csv");
    ok(run(&[&["moments", "--input", s(&input), "--output", s(&m)][..], &span].concat()));
    let rows = lines(&m);
    assert_eq!(rows[0], "date,mean_R,var_R,skew_R,kurt_R,mean_T,var_T,skew_T,kurt_T");
    assert_eq!(rows.len(), 1 + 36);
    assert!(column(&rows, 1).iter().all(|v| v == "7"));
    assert!(column(&rows, 3).iter().all(|v| v.is_empty()));
    let mean_t = column(&rows, 5);
    assert_eq!(mean_t.iter().filter(|v| v.is_empty()).count(), 12);
    assert!(mean_t[12..].iter().all(|v| v == "0"));
    assert!(!std::fs::read_to_string(&m).unwrap().contains("NaN"));

    let ck = dir.path().join("ck.csv");
    ok(run(&[&["ck", "--input", s(&input), "--output", s(&ck)][..], &span].concat()));
    let rows = lines(&ck);
    assert_eq!(rows.len(), 1 + 24);
    assert!(column(&rows, 3).iter().all(|v| v == "0"));

    let h = dir.path().join("h.csv");
    ok(run(&[&["homogeneity", "--input", s(&input), "--output", s(&h)][..], &span].concat()));
    assert_eq!(lines(&h).len(), 1);
}

#[test]
fn month_windows_over_one_year() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "in.csv", MOVING);
    let out = dir.path().join("ck.csv");
    ok(run(&["ck", "--input", s(&input), "--output", s(&out), "--window", "month", "--from", "2007-01-01", "--to", "2007-12-31"]));
    let n = lines(&out).len() - 1;
    assert!((1..=12).contains(&n), "{n}");
    assert_eq!(column(&lines(&out), 2)[0], "ck_l2");
}

#[test]
fn simulate_static_and_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    ok(run(&["simulate", "--scenario", s(&scenario("static.toml")), "--output", s(&a)]));
    assert_eq!(lines(&a).len(), 1 + 200);

    let cfg = write(&dir, "h.toml", "kind = \"homogeneous\"\nn_banks = 300\nstart = 2007-01-01\nend = 2009-01-01\nrate_scale = 1.0\n");
    ok(run(&["simulate", "--scenario", s(&cfg), "--output", s(&a), "--seed", "9"]));
    ok(run(&["simulate", "--scenario", s(&cfg), "--output", s(&b), "--seed", "9"]));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    ok(run(&["simulate", "--scenario", s(&cfg), "--output", s(&b), "--seed", "10"]));
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn simulate_requires_scenario() {
    let dir = TempDir::new().unwrap();
    let out = run(&["simulate", "--output", s(&dir.path().join("x.csv"))]);
    assert_eq!(out.status.code(), Some(2));
    let bad = write(&dir, "bad.toml", "kind = \"excited\"\nn_banks = 3\nstart = 2007-01-01\nend = 2008-01-01\nrate_scale = 1.0\n");
    let out = run(&["simulate", "--scenario", s(&bad), "--output", s(&dir.path().join("x.csv"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("excitation_factor"));
}

#[test]
fn excited_scenario_runs_through_ck() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "e.toml",
        "kind = \"excited\"\nn_banks = 400\nstart = 2007-01-01\nend = 2010-01-01\nrate_scale = 2.0\nexcitation_factor = 5.0\nexcitation_days = 90\n",
    );
    let panel = dir.path().join("p.csv");
    let ck = dir.path().join("ck.csv");
    ok(run(&["simulate", "--scenario", s(&cfg), "--output", s(&panel)]));
    ok(run(&["ck", "--input", s(&panel), "--output", s(&ck)]));
    let rows = lines(&ck);
    assert_eq!(rows.len(), 1 + 25);
    assert!(column(&rows, 3).iter().all(|v| v.parse::<f64>().unwrap() > 0.0));
}

#[test]
fn cli_output_equals_library_output() {
    let dir = TempDir::new().unwrap();
    let (start, end) = (d("2007-01-01"), d("2010-01-01"));
    let q = random_generator(4, 0.8).unwrap();
    let sc = Scenario::regime_switch(q, d("2008-07-01"), 3.0, 500, start, end, 4).unwrap();
    let panel = simulate(&sc).unwrap();
    let input = dir.path().join("p.csv");
    let mut bytes = Vec::new();
    write_panel(&panel, &mut bytes).unwrap();
    std::fs::write(&input, bytes).unwrap();
    let span = ["--from", "2007-01-01", "--to", "2010-01-01"];
    let cli = |cmd: &str, extra: &[&str]| {
        let out = dir.path().join(cmd);
        ok(run(&[&[cmd, "--input", s(&input), "--output", s(&out)][..], &span, extra].concat()));
        out
    };

    let out = cli("counts", &["--tau", "90"]);
    let mut expected = Vec::new();
    write_count_series(&mut expected, &daily_counts(&panel)).unwrap();
    assert_eq!(std::fs::read(out.join("n_rated.csv")).unwrap(), expected);
    let mut expected = Vec::new();
    write_ratio_series(&mut expected, &transitions_per_bank(&panel, 90).unwrap()).unwrap();
    assert_eq!(std::fs::read(out.join("transitions_per_bank.csv")).unwrap(), expected);

    let out = cli("moments", &[]);
    let mut expected = Vec::new();
    write_moment_series(&mut expected, &moment_series(&panel, 365, Sampling::MonthStarts).unwrap()).unwrap();
    assert_eq!(std::fs::read(out).unwrap(), expected);

    for (cmd, stat, len, flag) in [
        ("homogeneity", Statistic::Homogeneity, WindowLength::Month, "month"),
        ("ck", Statistic::ChapmanKolmogorov, WindowLength::Year, "year"),
    ] {
        let out = cli(cmd, &["--window", flag]);
        let mut expected = Vec::new();
        write_test_series(&mut expected, &rolling_series(&panel, stat, len).unwrap()).unwrap();
        assert_eq!(std::fs::read(out).unwrap(), expected);
    }
}

#[test]
fn shipped_scenarios_parse() {
    for name in ["homogeneous.toml", "regime_switch.toml", "excited.toml", "static.toml"] {
        let cfg = rating_markov::simulator::ScenarioConfig::from_path(&scenario(name)).unwrap();
        cfg.to_scenario().unwrap();
    }
}
