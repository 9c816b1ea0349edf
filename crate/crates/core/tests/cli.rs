use std::collections::HashMap;
use std::path::Path;
use std::process::Command;

use arnoldi_agg::cli::{self, EXIT_BAD_INPUT, EXIT_NOT_CONVERGED, EXIT_OVERFLOW, EXIT_SUCCESS};
use arnoldi_agg::markov::mtx;

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn arnagg(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("arnagg").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn field(stdout: &str, key: &str) -> String {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no `{key}` in {stdout}"))
        .to_string()
}

/// Data rows of a versioned CSV keyed by column name.
fn read_csv(path: &Path) -> Vec<HashMap<String, String>> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert!(
        lines.next().unwrap().starts_with("# arnagg-"),
        "missing version line"
    );
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    lines
        .map(|l| {
            header
                .iter()
                .cloned()
                .zip(l.split(',').map(String::from))
                .collect()
        })
        .collect()
}

fn num(row: &HashMap<String, String>, key: &str) -> f64 {
    row[key]
        .parse()
        .unwrap_or_else(|_| panic!("column {key} = {}", row[key]))
}

fn write_swap_chain(dir: &Path) -> String {
    let path = dir.join("swap.mtx");
    std::fs::write(
        &path,
        "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 1\n2 1 1\n",
    )
    .unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn identity_chain_stops_at_one_by_invariance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = arnagg(&[
        "aggregate",
        "--model",
        "identity:5",
        "--p0",
        "index:2",
        "--epsilon",
        "1e-12",
        "--out",
        out,
    ]);
    assert_eq!(r.code, EXIT_SUCCESS, "{}", r.stderr);
    assert_eq!(field(&r.stdout, "stop_reason"), "invariant-subspace");
    assert_eq!(field(&r.stdout, "j"), "1");
    assert!(dir.path().join("aggregation/meta.json").exists());
    let trace = read_csv(&dir.path().join("trace.csv"));
    assert_eq!(trace.last().unwrap()["stop_reason"], "invariant-subspace");
}

#[test]
fn lumpable_fixture_aggregates_to_at_most_its_block_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = arnagg(&[
        "aggregate",
        "--model",
        "lumpable:3,5,4",
        "--epsilon",
        "1e-10",
        "--check-every",
        "1",
        "--out",
        out,
    ]);
    assert_eq!(r.code, EXIT_SUCCESS, "{}", r.stderr);
    let j: usize = field(&r.stdout, "j").parse().unwrap();
    assert!(j <= 3);
    let criterion: f64 = field(&r.stdout, "criterion").parse().unwrap();
    assert!(criterion <= 1e-10);
}

#[test]
fn cap_without_convergence_has_its_own_exit_code_and_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = arnagg(&[
        "aggregate",
        "--model",
        "random:60,4",
        "--epsilon",
        "0",
        "--max-dim",
        "12",
        "--out",
        out,
    ]);
    assert_eq!(r.code, EXIT_NOT_CONVERGED);
    assert_eq!(field(&r.stdout, "stop_reason"), "max-dimension");
    assert_eq!(field(&r.stdout, "j"), "12");
    assert!(dir.path().join("aggregation/H.mtx").exists());
    assert!(dir.path().join("trace.csv").exists());
}

#[test]
fn bad_input_maps_to_its_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for args in [
        vec!["aggregate", "--model", "identity:3", "--out", out],
        vec!["aggregate", "--model", "no-such-model", "--epsilon", "1"],
        vec![
            "aggregate",
            "--model",
            "identity:3",
            "--epsilon",
            "1",
            "--p0",
            "index:9",
        ],
        vec![
            "aggregate",
            "--model",
            "identity:3",
            "--epsilon",
            "1",
            "--p0",
            "sideways",
        ],
        vec!["aggregate", "--bogus-flag"],
        vec![
            "sweep",
            "--model",
            "identity:3",
            "--dims",
            "3,2",
            "--out",
            out,
        ],
        vec!["transient", "--model", "identity:3", "--out", out],
        vec![
            "aggregate",
            "--matrix",
            "/definitely/not/here.mtx",
            "--epsilon",
            "1",
        ],
    ] {
        let r = arnagg(&args);
        assert_eq!(r.code, EXIT_BAD_INPUT, "{args:?}: {}", r.stderr);
        assert!(!r.stderr.is_empty());
    }
}

#[test]
fn state_space_overflow_maps_to_its_exit_code() {
    let r = arnagg(&[
        "model",
        "describe",
        "--model",
        "lotka-volterra:50",
        "--state-limit",
        "100",
    ]);
    assert_eq!(r.code, EXIT_OVERFLOW, "{}", r.stderr);
}

#[test]
fn help_is_not_an_error() {
    let r = arnagg(&["--help"]);
    assert_eq!(r.code, EXIT_SUCCESS);
    assert!(r.stdout.contains("aggregate"));
}

#[test]
fn sweep_on_swap_chain_is_exact_at_two() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = write_swap_chain(dir.path());
    let out = dir.path().join("out");
    let r = arnagg(&[
        "sweep",
        "--matrix",
        &matrix,
        "--p0",
        "index:0",
        "--dims",
        "1,2,3",
        "--horizons",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, EXIT_SUCCESS, "{}", r.stderr);
    assert!(r.stderr.contains("skipping j = 3"));
    let rows = read_csv(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["j"], "2");
    assert!(num(&rows[1], "err_4") <= 1e-12);
}

#[test]
fn sweep_closed_form_column_matches_direct_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = arnagg(&[
        "sweep",
        "--model",
        "random:50,5",
        "--p0",
        "random",
        "--dims",
        "5,10,25",
        "--horizons",
        "0,7,60,200",
        "--closed-form",
        "--out",
        out,
    ]);
    assert_eq!(r.code, EXIT_SUCCESS, "{}", r.stderr);
    let rows = read_csv(&dir.path().join("sweep.csv"));
    assert_eq!(rows.len(), 3);
    for row in &rows {
        for k in [0, 7, 60, 200] {
            let direct = num(row, &format!("err_{k}"));
            let closed = num(row, &format!("closed_form_{k}"));
            let bound = num(row, &format!("bound_{k}"));
            assert!(
                (direct - closed).abs() <= 1e-8,
                "j={} k={k}: {direct} vs {closed}",
                row["j"]
            );
            assert!(bound >= direct - 1e-10);
        }
    }
}

#[test]
fn csv_outputs_are_reproducible_apart_from_timings() {
    let strip = |path: &Path| -> Vec<String> {
        read_csv(path)
            .into_iter()
            .map(|mut row| {
                row.retain(|k, _| !k.ends_with("_ns"));
                let mut kv: Vec<_> = row.into_iter().collect();
                kv.sort();
                format!("{kv:?}")
            })
            .collect()
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = dir.path().to_str().unwrap();
        let r = arnagg(&[
            "sweep",
            "--model",
            "lumpable:4,6,5,3@9",
            "--p0",
            "random",
            "--seed",
            "4",
            "--dims",
            "1,2,3,4",
            "--horizons",
            "10,100",
            "--out",
            out,
        ]);
        assert_eq!(r.code, EXIT_SUCCESS, "{}", r.stderr);
        let r = arnagg(&[
            "aggregate",
            "--model",
            "random:80,6@3",
            "--epsilon",
            "1e-9",
            "--out",
            out,
        ]);
        assert!(r.code == EXIT_SUCCESS || r.code == EXIT_NOT_CONVERGED);
    }
    assert_eq!(
        strip(&a.path().join("sweep.csv")),
        strip(&b.path().join("sweep.csv"))
    );
    assert_eq!(
        strip(&a.path().join("trace.csv")),
        strip(&b.path().join("trace.csv"))
    );
    for file in ["H.mtx", "Q.mtx", "meta.json"] {
        assert_eq!(
            std::fs::read(a.path().join("aggregation").join(file)).unwrap(),
            std::fs::read(b.path().join("aggregation").join(file)).unwrap()
        );
    }
}

#[test]
fn naive_transient_of_identity_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = arnagg(&[
        "transient",
        "--model",
        "identity:6",
        "--p0",
        "uniform",
        "--naive",
        "--horizons",
        "1000",
        "--out",
        out,
    ]);
    assert_eq!(r.code, EXIT_SUCCESS, "{}", r.stderr);
    let pk = mtx::read_vector_file(dir.path().join("p_1000.txt")).unwrap();
    assert_eq!(pk, vec![1.0 / 6.0; 6]);
}

#[test]
fn aggregated_transient_of_invariant_fixture_matches_naive() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = arnagg(&[
        "aggregate",
        "--model",
        "lumpable:2,4,3",
        "--epsilon",
        "1e-12",
        "--check-every",
        "1",
        "--out",
        out,
    ]);
    assert_eq!(r.code, EXIT_SUCCESS, "{}", r.stderr);
    let agg = dir.path().join("aggregation");
    let tout = dir.path().join("t");
    let r = arnagg(&[
        "transient",
        "--model",
        "lumpable:2,4,3",
        "--aggregation",
        agg.to_str().unwrap(),
        "--naive",
        "--horizons",
        "0,10000",
        "--out",
        tout.to_str().unwrap(),
    ]);
    assert_eq!(r.code, EXIT_SUCCESS, "{}", r.stderr);
    let rows = read_csv(&tout.join("transient.csv"));
    assert!(num(&rows[0], "l1_difference") <= 1e-15);
    assert!(num(&rows[1], "l1_difference") <= 1e4 * 1e-12);
    let p0 = mtx::read_vector_file(tout.join("p_0.txt")).unwrap();
    let q0 = mtx::read_vector_file(tout.join("ptilde_0.txt")).unwrap();
    for (a, b) in p0.iter().zip(&q0) {
        assert!((a - b).abs() <= 1e-15);
    }
}

#[test]
fn missing_aggregation_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let r = arnagg(&[
        "transient",
        "--aggregation",
        dir.path().join("absent").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(r.code, EXIT_BAD_INPUT, "{}", r.stderr);
}

#[test]
fn single_repetition_bench_is_flagged_low_confidence() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = arnagg(&[
        "bench",
        "--model",
        "random:100,5",
        "--dims",
        "5,10",
        "--horizons",
        "100",
        "--epsilon",
        "1e-8",
        "--reps",
        "1",
        "--out",
        out,
    ]);
    assert_eq!(r.code, EXIT_SUCCESS, "{}", r.stderr);
    let rows = read_csv(&dir.path().join("bench.csv"));
    let kinds: Vec<&str> = rows.iter().map(|r| r["kind"].as_str()).collect();
    for kind in [
        "expand",
        "evaluate",
        "naive",
        "adaptive",
        "adaptive-evaluate",
        "speedup",
    ] {
        assert!(kinds.contains(&kind), "missing {kind}");
    }
    assert!(rows
        .iter()
        .all(|r| r["low_confidence"] == "true" && r["reps"] == "1"));
    let adaptive = rows.iter().find(|r| r["kind"] == "adaptive").unwrap();
    let share = num(adaptive, "ratio");
    assert!((0.0..=1.0).contains(&share));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"model": "random:40,4", "epsilon": 0, "max-dim": 30, "out": "{}"}}"#,
            dir.path().display()
        ),
    )
    .unwrap();
    let r = arnagg(&["aggregate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_NOT_CONVERGED);
    assert_eq!(field(&r.stdout, "j"), "30");
    let r = arnagg(&[
        "aggregate",
        "--config",
        cfg.to_str().unwrap(),
        "--max-dim",
        "10",
    ]);
    assert_eq!(field(&r.stdout, "j"), "10");
}

#[test]
fn model_export_and_describe() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = arnagg(&[
        "model",
        "export",
        "--model",
        "workstation-cluster:1",
        "--out",
        out,
    ]);
    assert_eq!(r.code, EXIT_SUCCESS, "{}", r.stderr);
    assert!(dir.path().join("model.mtx").exists());
    let r = arnagg(&["model", "describe", "--model", "lotka-volterra:10"]);
    let json: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(json["state_count"], 121);
    let r = arnagg(&["model", "list"]);
    assert!(r.stdout.contains("gene-expression"));
}

#[test]
fn binary_propagates_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_arnagg");
    let status = |args: &[&str]| {
        Command::new(bin)
            .args(args)
            .output()
            .unwrap()
            .status
            .code()
            .unwrap()
    };
    assert_eq!(status(&["model", "list"]), EXIT_SUCCESS);
    assert_eq!(status(&["aggregate", "--nonsense"]), EXIT_BAD_INPUT);
    assert_eq!(
        status(&[
            "model",
            "describe",
            "--model",
            "lotka-volterra:50",
            "--state-limit",
            "10"
        ]),
        EXIT_OVERFLOW
    );
}
