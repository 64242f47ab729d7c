//! End-to-end coverage of the command surface: run -> snapshots + CSV,
//! diagnose -> JSON report, symbols -> scan CSV, epsilon-study -> table,
//! config rejection with exit code 2, and custom symbol tables.

use std::fs;
use std::path::Path;
use std::process::Command;

use mgscalar::cli::{cmd_diagnose, cmd_epsilon_study, cmd_run, cmd_symbols};
use mgscalar::grid::Grid;
use mgscalar::io::read_symbol_file;
use mgscalar::symbols::perp_riesz_symbol;

fn write_config(path: &Path, body: &str) {
    fs::write(path, body).unwrap();
}

fn mg_config(out_dir: &Path) -> String {
    format!(
        r#"{{
  "grid": {{ "dims": [16, 16, 16] }},
  "operator": {{ "kind": "mg", "omega": 0.5, "beta2_over_eta": 1.0 }},
  "solver": {{ "kappa": 1.0, "dt": 0.005, "t_final": 0.2 }},
  "initial": {{ "kind": "random_bandlimited", "k_min": 1, "k_max": 2, "amplitude": 0.5, "seed": 4 }},
  "diagnostics": {{
    "checks": ["energy", "levelset", "degiorgi", "linf", "local_energy", "second_energy", "shrink", "bmo", "oscillation"],
    "sample_count": 3,
    "levelset_h_count": 4,
    "levelset_pair_count": 2,
    "oscillation_r_max": 0.5,
    "cylinder_radius": 0.8
  }},
  "output": {{ "dir": "{}", "snapshot_interval": 0.005 }}
}}"#,
        out_dir.display()
    )
}

#[test]
fn run_then_diagnose_full_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run1");
    let cfg_path = tmp.path().join("mg.json");
    write_config(&cfg_path, &mg_config(&out));

    let summary = cmd_run(&cfg_path, None).unwrap();
    assert!(summary.energy_monotone());
    assert_eq!(summary.samples.len(), 41);

    // snapshots and CSV landed
    let csv = fs::read_to_string(out.join("timeseries.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,l2,h1_seminorm,linf,energy_residual"
    );
    let mut prev_t = f64::NEG_INFINITY;
    for line in lines {
        let t: f64 = line.split(',').next().unwrap().parse().unwrap();
        assert!(t > prev_t, "CSV times not strictly increasing");
        prev_t = t;
    }
    let snap_count = fs::read_dir(&out)
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .path()
                .extension()
                .map(|x| x == "asf")
                .unwrap_or(false)
        })
        .count();
    assert_eq!(snap_count, 41);

    // diagnose the stored snapshots with every check enabled
    let report_path = tmp.path().join("report.json");
    let report = cmd_diagnose(&cfg_path, &out, Some(&report_path)).unwrap();
    assert!(report.all_satisfied(), "diagnostics found violations");
    assert!(report.energy.is_some());
    assert!(report.levelset.is_some());
    assert!(report.degiorgi.is_some());
    assert!(report.linf.is_some());
    assert!(report.local_energy.is_some());
    assert!(report.second_energy.is_some());
    assert!(report.shrink.is_some());
    assert!(report.bmo.is_some());
    assert!(report.oscillation.is_some());

    // the written report is valid JSON with the same verdicts
    let text = fs::read_to_string(&report_path).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed["snapshots"].as_u64().unwrap() as usize, 41);
    assert!(parsed["energy"][0]["satisfied"].as_bool().unwrap());
}

#[test]
fn same_seed_runs_are_file_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    let cfg_path = tmp.path().join("mg.json");
    write_config(&cfg_path, &mg_config(tmp.path()));
    cmd_run(&cfg_path, Some(&out_a)).unwrap();
    cmd_run(&cfg_path, Some(&out_b)).unwrap();
    for i in 0..5 {
        let name = format!("snap_{i:06}.asf");
        let a = fs::read(out_a.join(&name)).unwrap();
        let b = fs::read(out_b.join(&name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn symbols_scan_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("mg.json");
    write_config(&cfg_path, &mg_config(tmp.path()));
    let out = tmp.path().join("symbols.csv");
    cmd_symbols(&cfg_path, &out).unwrap();
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("metric,value"));
    assert!(text.contains("divergence_defect_max"));
    assert!(text.contains("growth_constant"));
    assert!(text.contains("k1,k2,m1_abs,m2_abs,m3_abs,m2_over_k1"));
    assert!(text.contains("\n100,10,"));
    // divergence defect parses and meets the table invariant
    let div: f64 = text
        .lines()
        .find(|l| l.starts_with("divergence_defect_max"))
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!(div <= 1e-12);
}

#[test]
fn epsilon_study_table() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("pr.json");
    write_config(
        &cfg_path,
        &format!(
            r#"{{
  "grid": {{ "dims": [16, 16] }},
  "operator": {{ "kind": "perp_riesz", "axis": 1 }},
  "solver": {{ "kappa": 1.0, "dt": 0.01, "t_final": 0.1 }},
  "initial": {{ "kind": "random_bandlimited", "k_min": 1, "k_max": 3, "amplitude": 0.5, "seed": 12 }},
  "output": {{ "dir": "{}", "snapshot_interval": 0.02 }}
}}"#,
            tmp.path().display()
        ),
    );
    let out = tmp.path().join("eps.csv");
    let report = cmd_epsilon_study(&cfg_path, &[0.1, 0.05, 0.025], Some(&out)).unwrap();
    assert!(report.distances_decreasing);
    assert!(report.uniform_bound_holds);
    let text = fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    let d: Vec<f64> = rows
        .iter()
        .take(2)
        .map(|r| r.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    assert!(d[1] < d[0], "distance column not decreasing: {d:?}");
}

#[test]
fn custom_symbol_table_via_config() {
    let tmp = tempfile::tempdir().unwrap();
    let grid = Grid::new(&[16, 16]).unwrap();
    let sym = perp_riesz_symbol(2, grid).unwrap();
    let table = tmp.path().join("table.msy");
    mgscalar::io::write_symbol_file(&table, &sym).unwrap();
    // loads back through the validating path
    let loaded = read_symbol_file(&table, None).unwrap();
    assert_eq!(loaded.kind().label(), "custom");

    let out = tmp.path().join("out");
    let cfg_path = tmp.path().join("custom.json");
    write_config(
        &cfg_path,
        &format!(
            r#"{{
  "grid": {{ "dims": [16, 16] }},
  "operator": {{ "kind": "custom", "path": "{}" }},
  "solver": {{ "kappa": 1.0, "dt": 0.01, "t_final": 0.05 }},
  "initial": {{ "kind": "modes", "modes": [ {{ "k": [1, 2], "amplitude": 1.0 }} ] }},
  "output": {{ "dir": "{}", "snapshot_interval": 0.025 }}
}}"#,
            table.display(),
            out.display()
        ),
    );
    let summary = cmd_run(&cfg_path, None).unwrap();
    assert!(summary.energy_monotone());
}

#[test]
fn config_errors_exit_with_code_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("bad.json");
    write_config(
        &cfg_path,
        r#"{
  "grid": { "dims": [16, 16, 16] },
  "operator": { "kind": "mg", "omega": -1.0, "beta2_over_eta": 1.0 },
  "solver": { "kappa": 1.0, "dt": 0.005, "t_final": 0.2 },
  "initial": { "kind": "random_bandlimited", "k_min": 1, "k_max": 2, "amplitude": 0.5, "seed": 4 },
  "output": { "dir": "x", "snapshot_interval": 0.005 }
}"#,
    );
    match cmd_run(&cfg_path, None) {
        Err(e) => {
            assert_eq!(e.exit_code(), 2);
            assert!(e.to_string().contains("operator.mg.omega"), "{e}");
        }
        Ok(_) => panic!("invalid config accepted"),
    }

    // the binary maps the error to exit status 2
    let status = Command::new(env!("CARGO_BIN_EXE_mgscalar"))
        .args(["run", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&status.stderr);
    assert!(stderr.contains("operator.mg.omega"), "{stderr}");

    // missing file maps to the I/O exit code
    let status = Command::new(env!("CARGO_BIN_EXE_mgscalar"))
        .args(["run", "--config", "/nonexistent/c.json"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(4));
}

#[test]
fn numerical_abort_exits_with_code_3() {
    // a grossly over-stepped advective run blows up; the binary reports it
    // as a numerical abort
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("blowup.json");
    write_config(
        &cfg_path,
        &format!(
            r#"{{
  "grid": {{ "dims": [16, 16] }},
  "operator": {{ "kind": "perp_riesz", "axis": 1 }},
  "solver": {{ "kappa": 0.0, "dt": 1.0, "t_final": 40.0 }},
  "initial": {{ "kind": "random_bandlimited", "k_min": 1, "k_max": 4, "amplitude": 50.0, "seed": 2 }},
  "output": {{ "dir": "{}", "snapshot_interval": 10.0 }}
}}"#,
            tmp.path().join("out").display()
        ),
    );
    let output = Command::new(env!("CARGO_BIN_EXE_mgscalar"))
        .args(["run", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3), "{output:?}");
}

#[test]
fn binary_runs_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let cfg_path = tmp.path().join("mg.json");
    write_config(&cfg_path, &mg_config(&out));
    let output = Command::new(env!("CARGO_BIN_EXE_mgscalar"))
        .args(["run", "--config"])
        .arg(&cfg_path)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("run complete"), "{stdout}");

    let report = tmp.path().join("report.json");
    let output = Command::new(env!("CARGO_BIN_EXE_mgscalar"))
        .args(["diagnose", "--config"])
        .arg(&cfg_path)
        .arg("--snapshots")
        .arg(&out)
        .arg("--out")
        .arg(&report)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    assert!(String::from_utf8_lossy(&output.stdout).contains("all checks satisfied"));
    assert!(report.exists());
}
