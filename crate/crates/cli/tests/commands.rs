use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hetgev(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hetgev"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], cwd: &Path) -> Output {
    let out = hetgev(args, cwd);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Parses the machine-readable first stderr line and returns its code.
fn error_code(out: &Output) -> i64 {
    let stderr = String::from_utf8_lossy(&out.stderr);
    let first = stderr.lines().next().expect("stderr is not empty");
    let v: Value = serde_json::from_str(first).unwrap_or_else(|_| panic!("not json: {first}"));
    let code = v["error"]["code"].as_i64().unwrap();
    assert_eq!(Some(code as i32), out.status.code());
    assert!(stderr.lines().nth(1).is_some(), "human message missing");
    code
}

const SHORT: [&str; 4] = ["--iterations", "300", "--truncation", "10"];

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for name in ["a.csv", "b.csv"] {
        ok(
            &[
                "simulate",
                "--scenario",
                "A",
                "--n",
                "1000",
                "--seed",
                "7",
                "--out",
                name,
            ],
            d,
        );
    }
    ok(
        &[
            "simulate",
            "--scenario",
            "A",
            "--n",
            "1000",
            "--seed",
            "8",
            "--out",
            "c.csv",
        ],
        d,
    );
    let a = fs::read(d.join("a.csv")).unwrap();
    assert_eq!(a, fs::read(d.join("b.csv")).unwrap());
    assert_ne!(a, fs::read(d.join("c.csv")).unwrap());
    assert_eq!(
        fs::read(d.join("a.csv.truth.json")).unwrap(),
        fs::read(d.join("b.csv.truth.json")).unwrap()
    );
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 1001);
}

#[test]
fn fit_loses_no_observations_and_replays_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        &[
            "simulate",
            "--scenario",
            "B",
            "--n",
            "250",
            "--seed",
            "3",
            "--out",
            "b.csv",
        ],
        d,
    );
    let mut args = vec!["fit", "--data", "b.csv", "--seed", "11", "--out-dir", "run"];
    args.extend(SHORT);
    ok(&args, d);
    let manifest = json(&d.join("run/manifest.json"));
    assert_eq!(manifest["data"]["observations"], 250);
    assert_eq!(manifest["seed"], 11);
    assert_eq!(manifest["draws"]["retained"], 150);

    let original: Vec<String> = fs::read_to_string(d.join("b.csv"))
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect();
    let copied: Vec<String> = fs::read_to_string(d.join("run/data.csv"))
        .unwrap()
        .lines()
        .map(str::to_string)
        .collect();
    assert_eq!(original, copied);

    ok(
        &["fit", "--replay", "run/manifest.json", "--out-dir", "again"],
        d,
    );
    let draws = fs::read(d.join("run/draws.csv")).unwrap();
    assert_eq!(draws, fs::read(d.join("again/draws.csv")).unwrap());
    let lines = String::from_utf8(draws).unwrap().lines().count();
    assert_eq!(lines, 1 + 150 * 10);

    args[6] = "same";
    ok(&args, d);
    assert_eq!(
        fs::read(d.join("run/draws.csv")).unwrap(),
        fs::read(d.join("same/draws.csv")).unwrap()
    );
}

#[test]
fn config_file_and_flags_layer() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        &[
            "simulate",
            "--scenario",
            "A",
            "--n",
            "100",
            "--seed",
            "1",
            "--out",
            "a.csv",
        ],
        d,
    );
    fs::write(
        d.join("chain.toml"),
        "n_iter = 200\nthin = 4\nalpha_rate = 2.0\ntruncation = 6\n",
    )
    .unwrap();
    ok(
        &[
            "fit",
            "--data",
            "a.csv",
            "--config",
            "chain.toml",
            "--set",
            "shape_var=25",
            "--thin",
            "2",
            "--out-dir",
            "run",
        ],
        d,
    );
    let c = &json(&d.join("run/manifest.json"))["config"];
    assert_eq!(c["n_iter"], 200);
    assert_eq!(c["burn_in"], 100);
    assert_eq!(c["thin"], 2);
    assert_eq!(c["truncation"], 6);
    assert_eq!(c["alpha_rate"], 2.0);
    assert_eq!(c["shape_var"], 25.0);
}

#[test]
fn censor_delta_changes_the_likelihood() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut text = String::from("value\n");
    ok(
        &[
            "simulate",
            "--scenario",
            "A",
            "--n",
            "150",
            "--seed",
            "4",
            "--out",
            "raw.csv",
        ],
        d,
    );
    for line in fs::read_to_string(d.join("raw.csv"))
        .unwrap()
        .lines()
        .skip(1)
    {
        let v: f64 = line.split(',').next().unwrap().parse().unwrap();
        text.push_str(&format!("{:.1}\n", v));
    }
    fs::write(d.join("rounded.csv"), text).unwrap();
    let base = [
        "fit",
        "--data",
        "rounded.csv",
        "--seed",
        "5",
        "--iterations",
        "200",
        "--truncation",
        "8",
    ];
    let mut exact = base.to_vec();
    exact.extend(["--out-dir", "exact"]);
    ok(&exact, d);
    let mut censored = base.to_vec();
    censored.extend(["--censor-delta", "0.05", "--out-dir", "censored"]);
    ok(&censored, d);
    let m = json(&d.join("censored/manifest.json"));
    assert_eq!(m["config"]["censor_delta"], 0.05);
    assert_ne!(
        fs::read(d.join("exact/draws.csv")).unwrap(),
        fs::read(d.join("censored/draws.csv")).unwrap()
    );

    let mut bad = base.to_vec();
    bad.extend(["--censor-delta", "-1", "--out-dir", "bad"]);
    assert_eq!(error_code(&hetgev(&bad, d)), 2);
}

#[test]
fn diagnose_writes_every_table() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        &[
            "simulate",
            "--scenario",
            "B",
            "--n",
            "200",
            "--seed",
            "9",
            "--out",
            "b.csv",
        ],
        d,
    );
    let mut args = vec!["fit", "--data", "b.csv", "--out-dir", "run"];
    args.extend(SHORT);
    ok(&args, d);
    ok(
        &[
            "diagnose",
            "--run",
            "run",
            "--grid-points",
            "64",
            "--p-grid",
            "0.1,0.05,0.01",
            "--out-dir",
            "diag",
        ],
        d,
    );
    let header = |f: &str| {
        fs::read_to_string(d.join("diag").join(f))
            .unwrap()
            .lines()
            .next()
            .unwrap()
            .to_string()
    };
    assert_eq!(header("density.csv"), "grid,median,lower,upper");
    assert_eq!(header("cdf.csv"), "grid,median,lower,upper");
    assert_eq!(header("return_levels.csv"), "p,x_axis,median,lower,upper");
    assert_eq!(
        header("residuals.csv"),
        "index,observation,fitted_cdf,residual"
    );
    assert_eq!(header("qq.csv"), "theoretical,sample");
    assert_eq!(header("occupancy.csv"), "occupied,fraction");
    let density = fs::read_to_string(d.join("diag/density.csv")).unwrap();
    assert_eq!(density.lines().count(), 65);
    let residuals = fs::read_to_string(d.join("diag/residuals.csv")).unwrap();
    assert_eq!(residuals.lines().count(), 201);
    let s = json(&d.join("diag/summary.json"));
    let total: f64 = s["occupancy"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["fraction"].as_f64().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn seasonal_fit_keeps_and_flags_edge_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut text = String::from("date,value\n");
    let mut day = chrono::NaiveDate::from_ymd_opt(1990, 12, 1).unwrap();
    let end = chrono::NaiveDate::from_ymd_opt(1993, 3, 31).unwrap();
    let mut i = 0u32;
    while day <= end {
        if i % 37 == 5 {
            text.push_str(&format!("{day},NA\n"));
        } else {
            text.push_str(&format!("{day},{}\n", (i * 7919 % 113) as f64 / 10.0));
        }
        day = day.succ_opt().unwrap();
        i += 1;
    }
    fs::write(d.join("daily.csv"), text).unwrap();
    let mut args = vec![
        "fit",
        "--data",
        "daily.csv",
        "--seasonal",
        "--out-dir",
        "run",
    ];
    args.extend(SHORT);
    ok(&args, d);
    let m = json(&d.join("run/manifest.json"));
    // DJF 1990, four seasons in 1991 and 1992, March 1993
    assert_eq!(m["data"]["observations"], 10);
    assert_eq!(m["data"]["mode"], "seasonal");
    let blocks = fs::read_to_string(d.join("run/blocks.csv")).unwrap();
    let rows: Vec<&str> = blocks.lines().collect();
    assert_eq!(rows[0], "year,season,maximum,count,calendar_days,partial");
    assert!(rows[1].starts_with("1990,DJF,"));
    assert!(rows[10].starts_with("1993,MAM,") && rows[10].ends_with(",true"));
    let data = fs::read_to_string(d.join("run/data.csv")).unwrap();
    assert!(data.starts_with("value,group\n"));
    assert!(data.lines().nth(1).unwrap().ends_with(",DJF"));
}

#[test]
fn exit_codes_follow_the_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(error_code(&hetgev(&["fit", "--bogus"], d)), 2);
    assert_eq!(
        error_code(&hetgev(
            &["simulate", "--scenario", "Z", "--out", "x.csv"],
            d
        )),
        2
    );
    assert_eq!(
        error_code(&hetgev(
            &["fit", "--data", "missing.csv", "--out-dir", "r"],
            d
        )),
        3
    );
    fs::write(d.join("bad.csv"), "value\n1.0\nabc\n2.0\n").unwrap();
    let out = hetgev(&["fit", "--data", "bad.csv", "--out-dir", "r"], d);
    assert_eq!(error_code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let mut permissive = vec!["fit", "--data", "bad.csv", "--permissive", "--out-dir", "r"];
    permissive.extend(SHORT);
    ok(&permissive, d);
    assert_eq!(
        json(&d.join("r/manifest.json"))["data"]["malformed_rows"],
        1
    );

    fs::write(d.join("c.toml"), "iterations = 10\n").unwrap();
    let out = hetgev(
        &[
            "fit",
            "--data",
            "bad.csv",
            "--permissive",
            "--config",
            "c.toml",
            "--out-dir",
            "r",
        ],
        d,
    );
    assert_eq!(error_code(&out), 2);
    assert_eq!(error_code(&hetgev(&["diagnose", "--run", "nowhere"], d)), 3);
    let help = hetgev(&["--help"], d);
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn numerical_failures_map_to_exit_code_four() {
    let e = hetgev::Error::NoConvergence {
        p: 0.5,
        lo: 0.0,
        hi: 1.0,
        iterations: 200,
    };
    let wrapped = hetgev::Error::ReturnLevel {
        draw: 3,
        p: 0.01,
        source: Box::new(e),
    };
    let cli: hetgev_cli::CliError = wrapped.into();
    assert_eq!(cli.exit_code(), 4);
    let line: Value = serde_json::from_str(&cli.machine_line()).unwrap();
    assert_eq!(line["error"]["kind"], "numerical");
}

#[test]
fn study_output_does_not_depend_on_workers() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (workers, out) in [("1", "one"), ("4", "four")] {
        ok(
            &[
                "study",
                "--scenario",
                "A",
                "--replicates",
                "4",
                "--sample-size",
                "150",
                "--seed",
                "21",
                "--workers",
                workers,
                "--iterations",
                "200",
                "--truncation",
                "8",
                "--subsample",
                "50",
                "--out-dir",
                out,
            ],
            d,
        );
    }
    for f in ["replicates.csv", "occupancy.csv", "summary.json"] {
        assert_eq!(
            fs::read(d.join("one").join(f)).unwrap(),
            fs::read(d.join("four").join(f)).unwrap(),
            "{f}"
        );
    }
    let m = json(&d.join("one/manifest.json"));
    let seeds = m["replicate_seeds"].as_array().unwrap();
    assert_eq!(seeds.len(), 4);
    let rows = fs::read_to_string(d.join("one/replicates.csv")).unwrap();
    let second = rows.lines().nth(2).unwrap();
    assert_eq!(
        second.split(',').nth(2).unwrap(),
        seeds[1]["seed"].to_string()
    );
}
