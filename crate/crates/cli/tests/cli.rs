use std::process::{Command, Output};

use idle_otto::scan::presets::{self, PresetKind};
use idle_otto::scan::{run_grid, Observable};
use idle_otto::tpm::{enumerate_trajectories, scaled_efficiency_distribution};
use idle_otto::{cycle, EngineParams};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_idle-otto"))
        .args(args)
        .env_remove("IDLE_OTTO_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Parsed CSV: comment pairs, header, rows.
struct Csv {
    meta: Vec<(String, String)>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn parse(text: &str) -> Csv {
        let mut meta = Vec::new();
        let mut lines = text.lines().peekable();
        while let Some(l) = lines.next_if(|l| l.starts_with('#')) {
            let (k, v) = l[2..].split_once('=').unwrap();
            meta.push((k.to_string(), v.to_string()));
        }
        let split = |l: &str| l.split(',').map(String::from).collect::<Vec<_>>();
        let header = split(lines.next().expect("header"));
        Csv {
            meta,
            header,
            rows: lines.map(split).collect(),
        }
    }

    fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    fn col(&self, name: &str) -> usize {
        self.header
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("no column {name} in {:?}", self.header))
    }

    fn num(&self, row: usize, name: &str) -> f64 {
        self.rows[row][self.col(name)].parse().unwrap()
    }
}

fn ok_csv(args: &[&str]) -> Csv {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", stderr(&out));
    Csv::parse(&stdout(&out))
}

/// Splits a command line on whitespace.
fn sh(line: &str) -> Vec<&str> {
    line.split_whitespace().collect()
}

const REFERENCE: [&str; 10] = ["--J", "2", "--hi", "3", "--hf", "4", "--Tc", "1", "--Th", "5"];

fn with(cmd: &str, extra: &[&'static str]) -> Vec<&'static str> {
    let mut v = vec![Box::leak(cmd.to_string().into_boxed_str()) as &str];
    v.extend(extra);
    v
}

#[test]
fn observables_at_reference_point() {
    let csv = ok_csv(&with("observables", &REFERENCE));
    assert_eq!(csv.rows.len(), 1);
    let p = EngineParams::new(2.0, 3.0, 4.0, 1.0, 5.0).unwrap();
    let o = cycle::observables(&p);
    // Exact bit equality with the library is the CSV contract.
    assert_eq!(csv.num(0, "mean_W"), o.mean_w);
    assert_eq!(csv.num(0, "var_W"), o.var_w);
    assert_eq!(csv.num(0, "mean_Sigma"), o.mean_sigma);
    assert!((csv.num(0, "mean_W") + 0.35863).abs() < 1e-5);
    assert!((csv.num(0, "eta_th") - 0.26080).abs() < 1e-5);
    assert_eq!(csv.rows[0][csv.col("regime")], "engine");
    assert_eq!(csv.meta("tool"), Some("idle-otto"));
    assert_eq!(csv.meta("preset_version"), Some("1"));
}

#[test]
fn uncoupled_engine_runs_at_otto_efficiency() {
    let csv = ok_csv(&sh("observables --J 0 --hi 3 --hf 4 --Tc 1 --Th 5"));
    assert_eq!(csv.num(0, "eta_th"), csv.num(0, "eta_0"));
}

#[test]
fn table_format_is_labelled() {
    let out = run(&with("observables", &[&REFERENCE[..], &["--format", "table"]].concat()));
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("(human-readable"));
    assert!(text.contains("regime"));
}

#[test]
fn missing_flag_is_a_usage_error() {
    let out = run(&["observables", "--J", "2", "--hi", "3", "--hf", "4", "--Tc", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--Th"));

    let out = run(&["distribution", "--J", "2", "--hi", "3", "--hf", "4", "--Tc", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--Th"));
}

#[test]
fn invalid_parameters_exit_two() {
    for line in [
        "observables --J 2 --hi 3 --hf 3 --Tc 1 --Th 5",
        "observables --J 2 --hi 3 --hf 4 --Tc -1 --Th 5",
        "scan --axis1 Tc:1:2",
        "scan --axis1 J:0.1:2:5:log --Tc 1 --Th 2",
        "scan --axis1 Tc:0.1:2:5 --quantities bogus --J 1 --Th 2",
    ] {
        let args = sh(line);
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn thread_override_must_be_positive() {
    let out = Command::new(env!("CARGO_BIN_EXE_idle-otto"))
        .args(["limits", "--J", "1", "--hi", "3", "--hf", "4"])
        .env("IDLE_OTTO_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn undefined_efficiency_exits_three() {
    let out = run(&sh("distribution --J 0 --hi 3 --hf 4 --Tc 3 --Th 4"));
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    let out = run(&["tur", "--J", "0", "--hi", "3", "--hf", "4", "--Tc", "3", "--Th", "4"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn joint_distribution_has_sixteen_trajectories() {
    let csv = ok_csv(&with("distribution", &[&REFERENCE[..], &["--which", "joint"]].concat()));
    assert_eq!(csv.rows.len(), 16);
    let total: f64 = (0..16).map(|r| csv.num(r, "probability")).sum();
    assert!((total - 1.0).abs() < 1e-14);
    let mean: f64 = (0..16).map(|r| csv.num(r, "W") * csv.num(r, "probability")).sum();
    assert!((mean + 0.35863).abs() < 1e-5);
}

#[test]
fn efficiency_presets_match_library() {
    for name in ["fig9-top", "fig9-bottom"] {
        let csv = ok_csv(&["distribution", "--preset", name]);
        let PresetKind::Distribution(p) = presets::preset(name).unwrap().kind else {
            panic!("{name} is a distribution preset")
        };
        let d = scaled_efficiency_distribution(&enumerate_trajectories(&p)).unwrap();
        assert_eq!(csv.rows.len(), d.len());
        for (r, &(v, prob)) in d.support().iter().enumerate() {
            assert_eq!(csv.num(r, "eta_scaled"), v);
            assert_eq!(csv.num(r, "probability"), prob);
        }
        assert_eq!(csv.meta("preset"), Some(name));
    }
    let bottom = ok_csv(&["distribution", "--preset", "fig9-bottom"]);
    let eta_c: f64 = bottom.meta("eta_C").unwrap().parse().unwrap();
    let max = (0..bottom.rows.len())
        .map(|r| bottom.num(r, "eta_scaled"))
        .fold(f64::MIN, f64::max);
    assert!(max > eta_c);
}

#[test]
fn preset_scan_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig1b.csv");
    let out = run(&["scan", "--preset", "fig1b", "-o", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let csv = Csv::parse(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(csv.meta("J"), Some("2.0000000000000000e0"));
    assert_eq!(csv.meta("preset"), Some("fig1b"));
    assert_eq!(csv.meta("approximate"), Some("true"));
    assert_eq!(csv.header, ["Tc", "Th", "mean_W", "regime", "engine"]);

    let PresetKind::Grid(spec) = presets::preset("fig1b").unwrap().kind else {
        panic!("fig1b is a grid")
    };
    let grid = run_grid(&spec).unwrap();
    assert_eq!(csv.rows.len(), grid.cells().len());
    for (r, cell) in grid.cells().iter().enumerate().step_by(97) {
        assert_eq!(csv.num(r, "Tc"), cell.x);
        assert_eq!(csv.num(r, "Th"), cell.y.unwrap());
        assert_eq!(csv.num(r, "mean_W"), cell.value(Observable::MeanW).unwrap());
        assert_eq!(csv.rows[r][csv.col("regime")], cell.regime().name());
    }
}

#[test]
fn tur_preset_respects_bound() {
    let csv = ok_csv(&["scan", "--preset", "fig10"]);
    assert!(!csv.rows.is_empty());
    for r in 0..csv.rows.len() {
        assert!(csv.num(r, "tur_observed") >= csv.num(r, "tur_bound"), "row {r}");
        assert_eq!(csv.rows[r][csv.col("tur_satisfied")], "1");
    }
    let labels: std::collections::BTreeSet<_> = csv.rows.iter().map(|r| r[0].clone()).collect();
    assert_eq!(labels.len(), 3);
}

#[test]
fn entropy_preset_runs() {
    let csv = ok_csv(&["scan", "--preset", "fig11a"]);
    assert!(csv.header.iter().any(|h| h == "mean_Sigma"));
    for r in 0..csv.rows.len() {
        assert!(csv.num(r, "mean_Sigma") >= -1e-12);
    }
}

#[test]
fn unknown_preset_lists_alternatives() {
    let out = run(&["scan", "--preset", "fig99"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("fig1a") && err.contains("fig11b"), "{err}");
}

#[test]
fn preset_listing() {
    let out = run(&["scan", "--preset", "list"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out).lines().filter(|l| !l.starts_with('#')).count(),
        presets::names().len()
    );

    let out = run(&["scan", "--preset", "list", "--show"]);
    let text = stdout(&out);
    assert!(text.contains("\"version\": 1"));
    assert!(text.contains("fig9-bottom"));
}

#[test]
fn custom_line_scan() {
    let csv = ok_csv(&sh("scan --axis1 Tc:0.1:2:5 --J 1 --Th 5 --quantities mean_W,|mean_W|"));
    assert_eq!(csv.header, ["Tc", "mean_W", "abs_mean_W", "regime", "engine"]);
    assert_eq!(csv.rows.len(), 5);
    assert_eq!(csv.num(4, "Tc"), 2.0);
    let p = EngineParams::new(1.0, 3.0, 4.0, 2.0, 5.0).unwrap();
    assert_eq!(csv.num(4, "mean_W"), cycle::mean_work(&p).total);
}

#[test]
fn custom_grid_scan() {
    let csv = ok_csv(&["scan", "--axis1", "Tc:0.1:1:3:log", "--axis2", "Th:1:10:4", "--J", "2"]);
    assert_eq!(csv.rows.len(), 12);
    assert_eq!(&csv.header[..2], ["Tc", "Th"]);
}

#[test]
fn limits() {
    let csv = ok_csv(&["limits", "--J", "1", "--hi", "3", "--hf", "4"]);
    assert_eq!(csv.num(0, "mean_W"), -1.0);
    assert_eq!(csv.num(0, "var_W"), 0.5);
    assert!((csv.num(0, "eta_th") - 4.0 / 15.0).abs() < 1e-15);
    // A level crossing at the cold field leaves the limit undefined.
    let out = run(&["limits", "--J", "3", "--hi", "3", "--hf", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tur_point_and_sweep() {
    let csv = ok_csv(&with("tur", &REFERENCE));
    assert_eq!(csv.rows[0][csv.col("tur_satisfied")], "1");
    assert!(csv.num(0, "tur_observed") > csv.num(0, "tur_bound"));

    let csv = ok_csv(&["tur", "--sweep", "300", "--seed", "9"]);
    assert_eq!(csv.meta("violations"), Some("0"));
    assert_eq!(
        csv.rows.len(),
        300 - csv.meta("skipped_zero_work").unwrap().parse::<usize>().unwrap()
    );
}

#[test]
fn extremum_of_relative_fluctuation() {
    let csv = ok_csv(&sh(
        "extremum --objective rel_fluct_W --param J --min 0 --max 2.999 --Tc 0.1 --Th 5",
    ));
    assert_eq!(csv.rows[0][csv.col("goal")], "min");
    let j = csv.num(0, "argument");
    let p = EngineParams::new(j, 3.0, 4.0, 0.1, 5.0).unwrap();
    assert_eq!(csv.num(0, "value"), cycle::observables(&p).rel_fluct_w.unwrap());
    assert!(csv.num(0, "value") < 1.0);
}

#[test]
fn montecarlo_is_reproducible() {
    let args = with(
        "montecarlo",
        &[&REFERENCE[..], &["--samples", "50000", "--seed", "42"]].concat(),
    );
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let csv = Csv::parse(&stdout(&a));
    assert_eq!(csv.rows.len(), 16);
    let observed: u64 = (0..16)
        .map(|r| csv.rows[r][csv.col("observed")].parse::<u64>().unwrap())
        .sum();
    assert_eq!(observed, 50_000);
    assert_eq!(csv.meta("mean_within_band"), Some("true"));

    let other = run(&with(
        "montecarlo",
        &[&REFERENCE[..], &["--samples", "50000", "--seed", "43"]].concat(),
    ));
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn thread_count_does_not_change_output() {
    let go = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_idle-otto"))
            .args(["scan", "--preset", "fig5b"])
            .env("IDLE_OTTO_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(go("1"), go("4"));
}
