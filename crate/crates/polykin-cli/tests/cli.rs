//! End-to-end tests of the `polykin` binary: JSON/CSV output contracts,
//! byte-level determinism, exit codes, and the viscosity-fit pipeline
//! on the bundled datasets.

use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polykin"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("failed to spawn binary");
    assert!(
        out.status.success(),
        "command {:?} failed with {:?}:\n{}",
        args,
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn exit_code(args: &[&str]) -> i32 {
    let out = bin().args(args).output().expect("failed to spawn binary");
    out.status.code().expect("no exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn get(v: &Value, key: &str) -> f64 {
    v.get(key)
        .and_then(Value::as_f64)
        .unwrap_or_else(|| panic!("missing numeric field {key} in {v}"))
}

#[test]
fn six_field_report_contract() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("six.json");
    let out = run_ok(&[
        "six-field",
        "--alpha",
        "0",
        "--gamma",
        "1",
        "--pi-ratio",
        "0.3",
        "--dimensionless",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "six-field");
    assert_eq!(get(&v, "alpha"), 0.0);
    assert_eq!(get(&v, "gamma"), 1.0);
    assert!((get(&v, "pi_over_p") - 0.3).abs() < 1e-14);
    // Positive dynamic pressure relaxes down; entropy production is
    // positive away from equilibrium, and the report is self-consistent.
    let production = get(&v, "production");
    let sigma = get(&v, "sigma");
    let dk_dpi = get(&v, "dk_dpi");
    assert!(production < 0.0);
    assert!(sigma > 0.0);
    assert!(get(&v, "k_noneq") < 0.0);
    assert!(get(&v, "tau_pi") > 0.0);
    let rel = (sigma - dk_dpi * production / 3.0).abs() / sigma;
    assert!(rel < 1e-12, "sigma identity off by {rel}");
    // The --out file carries exactly the stdout document.
    let file = fs::read(&out_path).unwrap();
    assert_eq!(file, out.stdout);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("scan_a.csv");
    let b = dir.path().join("scan_b.csv");
    let out_a = run_ok(&[
        "delta-scan",
        "--points",
        "150",
        "--out",
        a.to_str().unwrap(),
    ]);
    let out_b = run_ok(&[
        "delta-scan",
        "--points",
        "150",
        "--out",
        b.to_str().unwrap(),
    ]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    // Stdout differs only through the artifact path; check the parsed rows.
    let va = stdout_json(&out_a);
    let vb = stdout_json(&out_b);
    assert_eq!(va["rows"], vb["rows"]);

    // Monte Carlo battery: same (seed, samples, workers) means the same
    // bytes, stdout and file alike.
    let v1 = dir.path().join("verify_1.json");
    let v2 = dir.path().join("verify_2.json");
    let common = ["verify", "--samples", "60000", "--seed", "1", "--workers", "4"];
    let mut args1: Vec<&str> = common.to_vec();
    args1.extend(["--out", v1.to_str().unwrap()]);
    let mut args2: Vec<&str> = common.to_vec();
    args2.extend(["--out", v2.to_str().unwrap()]);
    let run1 = run_ok(&args1);
    let run2 = run_ok(&args2);
    assert_eq!(run1.stdout, run2.stdout);
    assert_eq!(fs::read(&v1).unwrap(), fs::read(&v2).unwrap());
}

#[test]
fn verify_prints_one_line_per_check_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.json");
    let out = run_ok(&[
        "verify",
        "--samples",
        "60000",
        "--seed",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 16, "one line per check:\n{text}");
    for line in &lines {
        assert!(line.starts_with("PASS "), "unexpected line: {line}");
    }
    let v: Value = serde_json::from_slice(&fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["checks"].as_array().unwrap().len(), 16);
    assert_eq!(get(&v, "z_gate"), 4.0);
}

#[test]
fn fit_recovers_synthetic_power_law() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("curve.csv");
    let out = run_ok(&[
        "fit-viscosity",
        "--input",
        fixture("viscosity_synthetic.csv").to_str().unwrap(),
        "--emit-curve",
        curve.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["command"], "fit-viscosity");
    let fit = &v["fit"];
    assert_eq!(fit["gas"], "synthetic");
    assert!((get(fit, "exponent_s") - 0.7).abs() < 1e-10);
    assert!((get(fit, "prefactor_a") - 3e-7).abs() / 3e-7 < 1e-8);
    assert!(get(fit, "residual_rms_log") < 1e-12);
    assert!((get(fit, "gamma") - 0.6).abs() < 1e-9);
    assert!(get(fit, "pr_model") > 0.7 && get(fit, "pr_model") < 0.9);
    // The emitted curve interleaves observed and fitted values; on
    // exact data they agree.
    let text = fs::read_to_string(&curve).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("T_K,mu_obs_Pa_s,mu_fit_Pa_s"));
    let mut rows = 0;
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 3);
        assert!((cols[1] - cols[2]).abs() / cols[1] < 1e-10);
        rows += 1;
    }
    assert_eq!(rows, 15);
}

#[test]
fn fit_derives_prandtl_for_co2_like_data() {
    let out = run_ok(&[
        "fit-viscosity",
        "--input",
        fixture("viscosity_co2_synthetic.csv").to_str().unwrap(),
        "--alpha",
        "2",
    ]);
    let fit = &stdout_json(&out)["fit"];
    assert_eq!(fit["gas"], "CO2");
    assert_eq!(get(fit, "alpha"), 2.0);
    assert!((get(fit, "exponent_s") - 0.7005).abs() < 1e-9);
    assert!((get(fit, "gamma") - 0.599).abs() < 1e-9);
    assert!((get(fit, "pr_model") - 0.894).abs() < 1e-3);
    let eucken = 22.0 / 27.0;
    assert!((get(fit, "pr_eucken") - eucken).abs() < 1e-12);
    let expected_rel = (get(fit, "pr_model") - eucken).abs() / eucken;
    assert!((get(fit, "rel_error") - expected_rel).abs() < 1e-12);
}

#[test]
fn fit_is_invariant_under_viscosity_rescaling() {
    // Multiply every viscosity by 1e3; the exponent and everything
    // derived from it must not move, while the prefactor scales.
    let dir = tempfile::tempdir().unwrap();
    let scaled = dir.path().join("scaled.csv");
    let original = fs::read_to_string(fixture("viscosity_synthetic.csv")).unwrap();
    let mut text = String::new();
    for line in original.lines() {
        if line.starts_with('#') || line.starts_with("T_K") {
            text.push_str(line);
        } else {
            let (t, mu) = line.split_once(',').unwrap();
            let mu: f64 = mu.parse().unwrap();
            text.push_str(&format!("{t},{}", mu * 1e3));
        }
        text.push('\n');
    }
    fs::write(&scaled, text).unwrap();

    let base = stdout_json(&run_ok(&[
        "fit-viscosity",
        "--input",
        fixture("viscosity_synthetic.csv").to_str().unwrap(),
    ]));
    let resc = stdout_json(&run_ok(&[
        "fit-viscosity",
        "--input",
        scaled.to_str().unwrap(),
    ]));
    let (bf, rf) = (&base["fit"], &resc["fit"]);
    assert!((get(bf, "exponent_s") - get(rf, "exponent_s")).abs() < 1e-12);
    assert!((get(bf, "gamma") - get(rf, "gamma")).abs() < 1e-12);
    assert!((get(bf, "pr_model") - get(rf, "pr_model")).abs() < 1e-12);
    let ratio = get(rf, "prefactor_a") / get(bf, "prefactor_a");
    assert!((ratio - 1e3).abs() / 1e3 < 1e-9);
}

#[test]
fn bad_inputs_map_to_documented_exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    // Non-increasing temperatures: dataset validation, exit 1.
    let unsorted = dir.path().join("unsorted.csv");
    fs::write(&unsorted, "T_K,mu_Pa_s\n400,2e-5\n300,1e-5\n500,3e-5\n").unwrap();
    assert_eq!(
        exit_code(&["fit-viscosity", "--input", unsorted.to_str().unwrap()]),
        1
    );

    // Malformed numeric cell: parse error with a line number, exit 1.
    let garbled = dir.path().join("garbled.csv");
    fs::write(&garbled, "T_K,mu_Pa_s\n300,not-a-number\n400,2e-5\n500,3e-5\n").unwrap();
    let out = bin()
        .args(["fit-viscosity", "--input", garbled.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "stderr should locate the bad row: {err}");

    // Missing file: I/O, exit 3.
    assert_eq!(
        exit_code(&[
            "fit-viscosity",
            "--input",
            dir.path().join("missing.csv").to_str().unwrap(),
        ]),
        3
    );

    // Out-of-window state: domain validation, exit 1.
    assert_eq!(
        exit_code(&["six-field", "--alpha", "0", "--pi-ratio", "0.9"]),
        1
    );

    // Unknown subcommand: usage error, exit 1; --help exits 0.
    assert_eq!(exit_code(&["frobnicate"]), 1);
    assert_eq!(exit_code(&["--help"]), 0);
}

#[test]
fn reproduce_tables_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(&["reproduce-tables", "--out", dir.path().to_str().unwrap()]);
    let v = stdout_json(&out);
    assert_eq!(v["all_pass"], true);
    let expected_cells = [4, 8, 24, 12];
    for (idx, cells) in expected_cells.iter().enumerate() {
        let name = format!("table{}", idx + 1);
        let csv = dir.path().join(format!("{name}.csv"));
        let json = dir.path().join(format!("{name}.json"));
        let text = fs::read_to_string(&csv).unwrap();
        assert!(
            text.starts_with("row,column,computed,reference,tolerance,pass\n"),
            "{name}.csv header"
        );
        assert_eq!(text.lines().count(), cells + 1, "{name}.csv row count");
        let doc: Value = serde_json::from_slice(&fs::read(&json).unwrap()).unwrap();
        assert_eq!(doc["all_pass"], true, "{name} has failing cells");
        assert_eq!(doc["cells"].as_array().unwrap().len(), *cells);
    }
    let summary: Value =
        serde_json::from_slice(&fs::read(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["all_pass"], true);
    assert_eq!(summary["tables"].as_array().unwrap().len(), 4);
}

#[test]
fn collision_freq_grid_is_monotone_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("freq.csv");
    let out = run_ok(&[
        "collision-freq",
        "--alpha",
        "0",
        "--gamma",
        "1",
        "--points",
        "15",
        "--c-max",
        "4",
        "--i-max",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["rows"].as_u64().unwrap(), 15 * 15);
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha,gamma,c_hat,i_hat,nu_hat"));
    let mut grid = [[0.0f64; 15]; 15];
    for (row, line) in lines.enumerate() {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols[0], 0.0);
        assert_eq!(cols[1], 1.0);
        grid[row / 15][row % 15] = cols[4];
    }
    for ci in 0..15 {
        for ii in 0..15 {
            assert!(grid[ci][ii] > 0.0);
            if ii > 0 {
                assert!(grid[ci][ii] > grid[ci][ii - 1], "not increasing in I at c row {ci}");
            }
            if ci > 0 {
                assert!(grid[ci][ii] > grid[ci - 1][ii], "not increasing in c at I col {ii}");
            }
        }
    }
}

#[test]
fn relaxation_trace_decays_monotonically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("relax.csv");
    let out = run_ok(&[
        "six-field-relax",
        "--alpha",
        "0.5",
        "--gamma",
        "1",
        "--pi-ratio",
        "0.3",
        "--horizon",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    assert!(get(&v, "tau_pi") > 0.0);
    assert!(v["steps"].as_u64().unwrap() >= 2);
    assert!(get(&v, "pi_over_p_final") < 0.05);
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,pi,pi_over_p"));
    let mut prev_t = f64::NEG_INFINITY;
    let mut prev_pi = f64::INFINITY;
    let mut first = true;
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        if first {
            assert_eq!(cols[0], 0.0);
            assert!((cols[2] - 0.3).abs() < 1e-14);
            first = false;
        }
        assert!(cols[0] > prev_t);
        assert!(cols[1] < prev_pi, "dynamic pressure must decay monotonically");
        assert!(cols[1] > 0.0, "no sign crossing");
        prev_t = cols[0];
        prev_pi = cols[1];
    }
}

#[test]
fn config_file_layers_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# lab nitrogen-like setup\nalpha = 2\ngamma = 1.4\nK = 0.5\nrho = 2\nT = 1.5\n",
    )
    .unwrap();
    let v = stdout_json(&run_ok(&[
        "six-field",
        "--config",
        cfg.to_str().unwrap(),
        "--pi-ratio",
        "0.1",
    ]));
    assert_eq!(get(&v, "alpha"), 2.0);
    assert_eq!(get(&v, "gamma"), 1.4);
    // An explicit flag wins over the file.
    let v = stdout_json(&run_ok(&[
        "six-field",
        "--config",
        cfg.to_str().unwrap(),
        "--alpha",
        "1",
        "--pi-ratio",
        "0.1",
    ]));
    assert_eq!(get(&v, "alpha"), 1.0);
    assert_eq!(get(&v, "gamma"), 1.4);
}

#[test]
fn prandtl_match_defaults_cover_the_reference_set() {
    let v = stdout_json(&run_ok(&["prandtl-match"]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 10);
    assert!((get(&rows[0], "gamma_star") - 2.1532).abs() < 1e-3);
    assert!((get(&rows[0], "prandtl_at_root") - 14.0 / 19.0).abs() < 5e-4);
    assert!((get(&rows[1], "gamma_star") - 2.3676).abs() < 1e-3);
    assert!((get(&rows[1], "prandtl_at_root") - 16.0 / 21.0).abs() < 5e-4);
    let printed = [4.063, 9.469, 17.262, 25.801, 34.705, 43.835, 53.123, 62.526];
    for (k, expected) in printed.iter().enumerate() {
        let row = &rows[k + 2];
        assert_eq!(row["n_atoms"].as_u64().unwrap(), (k + 3) as u64);
        assert!(
            (get(row, "gamma_star") - expected).abs() < 0.05,
            "N = {}: {} vs {}",
            k + 3,
            get(row, "gamma_star"),
            expected
        );
    }
}

#[test]
fn fourteen_report_contract() {
    let v = stdout_json(&run_ok(&[
        "fourteen",
        "--alpha",
        "0",
        "--gamma",
        "1",
        "--dimensionless",
    ]));
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "fourteen");
    let tr = &v["transport"];
    // Frozen values at (alpha, gamma) = (0, 1) in reduced units.
    assert!((get(tr, "mu") - 0.19087540210527817).abs() < 1e-12);
    assert!((get(tr, "nu") - 0.042896073632439228).abs() < 1e-12);
    assert!((get(tr, "kappa") - 0.83242392360200023).abs() < 1e-12);
    assert!((get(tr, "prandtl") - 0.80255250771467410).abs() < 1e-12);
    let times = &v["relaxation"];
    assert!(get(times, "tau_s") > 0.0);
    assert!(get(times, "tau_pi") > 0.0);
    assert!(get(times, "tau_q") > 0.0);
}
