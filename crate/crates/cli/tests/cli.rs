use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn finlim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finlim"))
        .args(args)
        .env_remove("FINLIM_TYPE_CLASS_BUDGET")
        .env_remove("FINLIM_ENUM_BUDGET")
        .env_remove("FINLIM_MC_TRIALS")
        .output()
        .expect("binary runs")
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn stdout_rows(args: &[&str]) -> (Vec<String>, Vec<Vec<String>>) {
    let out = finlim(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    csv_rows(&String::from_utf8(out.stdout).unwrap())
}

fn error_report(out: &Output) -> Value {
    let report: Value = serde_json::from_slice(&out.stderr).expect("stderr is one JSON object");
    assert_eq!(report["error"]["exit_code"], out.status.code().unwrap());
    report
}

const BERNOULLI: &str = r#"{"type":"memoryless","probs":[0.89,0.11]}"#;
const CHAIN: &str = r#"{"type":"markov","kernel":[[0.9,0.1],[0.2,0.8]]}"#;

#[test]
fn same_config_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, extra: &[&str]| {
        let path = dir.path().join(name);
        let p = path.to_str().unwrap();
        let mut args = vec![
            "spectrum",
            "--source-json",
            CHAIN,
            "--n",
            "50",
            "--samples",
            "5000",
            "--out",
            p,
        ];
        args.extend_from_slice(extra);
        assert!(finlim(&args).status.success());
        let side = format!("{p}.meta.json");
        (
            std::fs::read(&path).unwrap(),
            std::fs::read(Path::new(&side)).unwrap(),
        )
    };
    let a = run("a.csv", &["--seed", "9"]);
    let b = run("b.csv", &["--seed", "9"]);
    assert_eq!(a, b);
    let c = run("c.csv", &["--seed", "10"]);
    assert_ne!(a.0, c.0);

    let fig = |name: &str| {
        let path = dir.path().join(name);
        assert!(
            finlim(&["figure3", "--n", "10:40", "--out", path.to_str().unwrap()])
                .status
                .success()
        );
        std::fs::read(path).unwrap()
    };
    assert_eq!(fig("f1.csv"), fig("f2.csv"));
}

#[test]
fn metadata_records_seed_version_and_hash() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lim.csv");
    let out = finlim(&[
        "limits",
        "--source-json",
        BERNOULLI,
        "--n",
        "4",
        "--seed",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let meta: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("lim.csv.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["seed"], 3);
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(meta["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(meta["config"]["source"]["probs"][1], 0.11);
}

#[test]
fn figure1_cdfs_have_expected_means() {
    let (header, rows) = stdout_rows(&["figure1"]);
    assert_eq!(header, ["curve", "x_bits", "cdf_prob"]);
    let mean = |curve: &str| {
        let mut prev = 0.0;
        let mut m = 0.0;
        for r in rows.iter().filter(|r| r[0] == curve) {
            let (x, f): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
            m += x * (f - prev);
            prev = f;
        }
        assert!((prev - 1.0).abs() < 1e-12);
        m
    };
    assert!((mean("information") - 7.69).abs() < 0.005);
    // floor(log2 rank) lengths; the leading-1 convention would add one bit
    assert!((mean("codelength") - 5.2932).abs() < 1e-4);
}

#[test]
fn deterministic_source_limits() {
    let (header, rows) = stdout_rows(&[
        "limits",
        "--source-json",
        r#"{"type":"memoryless","probs":[1.0]}"#,
        "--n",
        "1:4",
    ]);
    let r_cols: Vec<usize> = (0..header.len())
        .filter(|&i| header[i].contains("r_star"))
        .collect();
    assert!(!r_cols.is_empty());
    for row in rows {
        let n: f64 = row[0].parse().unwrap();
        for &i in &r_cols {
            let r: f64 = row[i].parse().unwrap();
            // a single string still takes the empty codeword, length 0 < 1
            assert_eq!(r, 1.0 / n);
        }
        assert_eq!(row.last().unwrap(), "0.0");
    }
}

#[test]
fn bounds_sandwich_the_exact_rate() {
    let (header, rows) = stdout_rows(&[
        "bounds",
        "--source-json",
        BERNOULLI,
        "--n",
        "100:300:50",
        "--eps",
        "0.1",
    ]);
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    for row in rows {
        let get = |name: &str| row[col(name)].parse::<f64>().unwrap();
        let r = get("exact_rstar_bits_per_symbol");
        assert!(r <= get("upper_quantile_bits_per_symbol"));
        if row[col("achievability_valid")] == "true" {
            assert!(r <= get("achievability_bits_per_symbol"));
        }
        if row[col("converse_valid")] == "true" {
            assert!(get("converse_bits_per_symbol") <= r);
        }
    }
}

#[test]
fn binning_simulation_tracks_exact_error() {
    let (_, rows) = stdout_rows(&[
        "binning",
        "--source-json",
        r#"{"type":"memoryless","probs":[0.5,0.3,0.2]}"#,
        "--n",
        "2",
        "--bins",
        "2,4,9",
        "--trials",
        "200000",
    ]);
    assert_eq!(rows.len(), 3);
    for row in rows {
        let exact: f64 = row[2].parse().unwrap();
        let mc: f64 = row[3].parse().unwrap();
        let se: f64 = row[4].parse().unwrap();
        assert!((exact - mc).abs() <= 4.0 * se.max(1e-6), "{row:?}");
    }
}

#[test]
fn dispersion_and_figure4_tables() {
    let (header, rows) =
        stdout_rows(&["dispersion", "--source-json", BERNOULLI, "--n", "10,20,40"]);
    assert_eq!(header[1], "var_len_over_n_bits2");
    assert_eq!(rows.len(), 3);
    let (header, rows) = stdout_rows(&["figure4", "--points", "5"]);
    assert_eq!(header, ["h_bits", "d_over_h2", "family", "param"]);
    for family in ["bernoulli", "geometric", "poisson"] {
        assert_eq!(rows.iter().filter(|r| r[2] == family).count(), 5);
    }
}

#[test]
fn json_output_embeds_metadata() {
    let out = finlim(&[
        "figure4", "--points", "3", "--format", "json", "--seed", "4",
    ]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["metadata"]["seed"], 4);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 9);
    assert!(doc["rows"][0]["d_over_h2"].is_number());
}

#[test]
fn failures_map_to_exit_codes() {
    let missing = finlim(&["limits", "--n", "3"]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(error_report(&missing)["error"]["kind"], "config");

    let malformed = finlim(&[
        "limits",
        "--source-json",
        r#"{"type":"memoryless","p":[1]}"#,
        "--n",
        "3",
    ]);
    assert_eq!(malformed.status.code(), Some(2));

    let invalid = finlim(&[
        "limits",
        "--source-json",
        r#"{"type":"memoryless","probs":[0.5,0.6]}"#,
        "--n",
        "3",
    ]);
    assert_eq!(invalid.status.code(), Some(2));

    let budget = finlim(&[
        "spectrum",
        "--source-json",
        BERNOULLI,
        "--n",
        "500",
        "--type-class-budget",
        "100",
    ]);
    assert_eq!(budget.status.code(), Some(3));
    assert_eq!(error_report(&budget)["error"]["kind"], "budget");

    let env_budget = Command::new(env!("CARGO_BIN_EXE_finlim"))
        .args(["spectrum", "--source-json", CHAIN, "--n", "20"])
        .env("FINLIM_ENUM_BUDGET", "1000")
        .output()
        .unwrap();
    assert_eq!(env_budget.status.code(), Some(3));

    let usage = finlim(&["nonsense"]);
    assert_eq!(usage.status.code(), Some(2));
    assert_eq!(error_report(&usage)["error"]["kind"], "usage");
}
