//! End-to-end runs of the installed binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qftadm"));
    cmd.env_remove("QFTADM_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_ensemble(path: &Path, n: usize, states: &[Vec<[f64; 2]>]) {
    let value = serde_json::json!({ "n": n, "states": states });
    fs::write(path, serde_json::to_string(&value).unwrap()).unwrap();
}

fn standard_basis_states(n: usize) -> Vec<Vec<[f64; 2]>> {
    (0..n)
        .map(|j| {
            (0..n)
                .map(|i| [if i == j { 1.0 } else { 0.0 }, 0.0])
                .collect()
        })
        .collect()
}

#[test]
fn matrix_two_prints_hadamard() {
    let out = run(&["matrix", "2"]);
    let v = stdout_json(&out);
    assert_eq!(v["rows"], 2);
    assert_eq!(v["cols"], 2);
    let data = v["data"].as_array().unwrap();
    assert_eq!(data.len(), 4);
    let r = 1.0 / 2f64.sqrt();
    let expected = [[r, 0.0], [r, 0.0], [r, 0.0], [-r, 0.0]];
    for (entry, want) in data.iter().zip(expected) {
        let re = entry[0].as_f64().unwrap();
        let im = entry[1].as_f64().unwrap();
        assert!((re - want[0]).abs() < 1e-15 && (im - want[1]).abs() < 1e-15);
    }
}

#[test]
fn matrix_rejects_dimension_one() {
    let out = run(&["matrix", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension"));
}

#[test]
fn matrix_three_csv_has_nine_cells() {
    let out = run(&["matrix", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.trim().lines().collect();
    assert_eq!(rows.len(), 3);
    let mut cells = Vec::new();
    for row in &rows {
        let row_cells: Vec<&str> = row.split(',').collect();
        assert_eq!(row_cells.len(), 3);
        cells.extend(row_cells);
    }
    assert_eq!(cells.len(), 9);
    for cell in &cells {
        assert!(cell.ends_with('i'), "cell {cell} not in re+imi form");
    }
    // Entry (1,1) is ω/√3 = -1/(2√3) + i/2.
    let (re, im) = parse_complex_cell(cells[4]);
    assert!((re - (-1.0 / (2.0 * 3f64.sqrt()))).abs() < 1e-15);
    assert!((im - 0.5).abs() < 1e-15);
}

/// Splits a "re+imi" cell at the sign that starts the imaginary part (the
/// last sign not belonging to an exponent).
fn parse_complex_cell(cell: &str) -> (f64, f64) {
    let body = cell.strip_suffix('i').unwrap();
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'e')
        .unwrap();
    (
        body[..split].parse().unwrap(),
        body[split..].parse().unwrap(),
    )
}

#[test]
fn commutant_dimensions_and_symmetry() {
    for (n, dim, symmetric) in [("2", 2, true), ("3", 3, true), ("4", 6, false)] {
        let out = run(&["commutant", n]);
        let v = stdout_json(&out);
        assert_eq!(v["dim"].as_u64().unwrap(), dim, "n = {n}");
        assert_eq!(v["all_symmetric"].as_bool().unwrap(), symmetric, "n = {n}");
        assert_eq!(v["basis"].as_array().unwrap().len(), dim as usize);
        if symmetric {
            assert!(v["witness"].is_null());
        } else {
            assert!(v["witness"].is_object());
            assert!(v["max_asymmetry"].as_f64().unwrap() > 0.1);
        }
    }
}

#[test]
fn check_accepts_standard_basis() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("basis5.json");
    write_ensemble(&path, 5, &standard_basis_states(5));
    let out = run(&["check", path.to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["n"], 5);
    assert!(v["max_admissibility_residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn check_accepts_reference_qubit_ensemble() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("qubit.json");
    let states = vec![
        vec![[0.5, 0.5], [0.5, 0.5]],
        vec![[0.5, 0.5], [-0.5, -0.5]],
    ];
    write_ensemble(&path, 2, &states);
    let out = run(&["check", path.to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(v["pass"], true);
    assert!(v["gram_deviation"].as_f64().unwrap() < 1e-12);
}

#[test]
fn check_fails_perturbed_basis_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("perturbed.json");
    let mut states = standard_basis_states(5);
    states[0][1][0] += 0.1;
    write_ensemble(&path, 5, &states);
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], false);
    assert!(v["max_admissibility_residual"].as_f64().unwrap() > 1e-3);
}

#[test]
fn check_rejects_malformed_file_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\"n\": 3, \"states\": 7}").unwrap();
    let out = run(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let missing = run(&["check", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn solve3_recovers_radical_root_on_tenth_slice() {
    let out = run(&["solve3", "--y0", "0.1", "--y1", "0.1", "--y2", "0.1"]);
    let v = stdout_json(&out);
    let solutions = v["solutions"].as_array().unwrap();
    assert!(!solutions.is_empty());
    let expected = (11.0 / 75.0 + 1909f64.sqrt() / 300.0).sqrt();
    let hit = solutions.iter().any(|s| {
        let x0 = s["point"][0].as_f64().unwrap();
        (x0 - expected).abs() < 1e-10
    });
    assert!(hit, "no solution with the radical x0");
    for s in solutions {
        let worst = s["residuals"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r.as_f64().unwrap().abs())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-9);
        assert_eq!(s["point"][1].as_f64().unwrap(), 0.1);
    }
}

#[test]
fn solve3_zero_slice_contains_the_four_real_solutions() {
    let out = run(&["solve3"]);
    let v = stdout_json(&out);
    let solutions = v["solutions"].as_array().unwrap();
    let x0 = 1.0 / 3f64.sqrt();
    let h = 1.0 / (2.0 * 3f64.sqrt());
    let targets = [
        [x0, 0.0, -h - 0.5, 0.0, -h + 0.5, 0.0],
        [-x0, 0.0, h - 0.5, 0.0, h + 0.5, 0.0],
        [x0, 0.0, -h + 0.5, 0.0, -h - 0.5, 0.0],
        [-x0, 0.0, h + 0.5, 0.0, h - 0.5, 0.0],
    ];
    for target in targets {
        let hit = solutions.iter().any(|s| {
            let p = s["point"].as_array().unwrap();
            p.iter()
                .zip(target)
                .map(|(a, b)| (a.as_f64().unwrap() - b).powi(2))
                .sum::<f64>()
                .sqrt()
                < 1e-8
        });
        assert!(hit, "missing real solution {target:?}");
    }
    let off_axis = solutions
        .iter()
        .filter(|s| s["point"][0].as_f64().unwrap().abs() > 0.1)
        .count();
    assert_eq!(off_axis, 4);
}

#[test]
fn solve3_reports_empty_on_infeasible_slice() {
    let out = run(&["solve3", "--y0", "0.9", "--y1", "0.9", "--y2", "0.9"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["solutions"].as_array().unwrap().len(), 0);
    assert_eq!(v["converged_starts"], 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no solutions"));
}

#[test]
fn solve3_output_is_deterministic_and_seed_sources_agree() {
    let args = ["solve3", "--y0", "0.05", "--y1", "-0.1", "--y2", "0.2"];
    let first = run(&[&args[..], &["--seed", "7"][..]].concat());
    let second = run(&[&args[..], &["--seed", "7"][..]].concat());
    assert_eq!(first.stdout, second.stdout);
    let via_env = bin()
        .args(args)
        .env("QFTADM_SEED", "7")
        .output()
        .expect("binary runs");
    assert_eq!(first.stdout, via_env.stdout);
    let other_seed = run(&[&args[..], &["--seed", "8"][..]].concat());
    let count = |out: &Output| {
        serde_json::from_slice::<Value>(&out.stdout).unwrap()["solutions"]
            .as_array()
            .unwrap()
            .len()
    };
    assert_eq!(count(&first), count(&other_seed));
}

#[test]
fn solve3_rejects_bad_env_seed() {
    let out = bin()
        .args(["solve3"])
        .env("QFTADM_SEED", "not-a-number")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_passes_and_carries_named_claims() {
    let out = run(&["report"]);
    assert_eq!(out.status.code(), Some(0));
    let entries: Value = serde_json::from_slice(&out.stdout).unwrap();
    let entries = entries.as_array().unwrap();
    assert!(entries.len() >= 20);
    for e in entries {
        assert_eq!(e["status"], "pass", "claim {}", e["claim_id"]);
        assert!(
            e["measured"].as_f64().unwrap() <= e["tolerance"].as_f64().unwrap(),
            "invariant broken for {}",
            e["claim_id"]
        );
    }
    let find = |id: &str| {
        entries
            .iter()
            .find(|e| e["claim_id"] == id)
            .unwrap_or_else(|| panic!("claim {id} missing"))
    };
    assert_eq!(find("commutant-dim-4")["measured"].as_f64().unwrap(), 6.0);
    assert_eq!(find("qutrit-real-count")["measured"].as_f64().unwrap(), 4.0);
    let table = String::from_utf8_lossy(&out.stderr);
    assert!(table.contains("claim") && table.contains("commutant-dim-4"));
}

#[test]
fn unknown_subcommand_exits_two() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}
