//! CLI acceptance: the gen → amb --oracle → verify pipeline on the
//! matched Gaussian pair, file-format round trips, report schema, exit
//! codes, and error diagnostics.

use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

fn ambkit(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ambkit"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn assert_ok(out: &Output, what: &str) {
    assert!(
        out.status.success(),
        "{what} failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn assert_single_line_error(out: &Output, what: &str) {
    assert!(!out.status.success(), "{what} unexpectedly succeeded");
    let stderr = String::from_utf8_lossy(&out.stderr);
    let trimmed = stderr.trim_end();
    assert!(!trimmed.is_empty(), "{what}: empty stderr");
    assert!(
        !trimmed.contains('\n'),
        "{what}: diagnostic spans multiple lines: {trimmed:?}"
    );
}

/// 10. End-to-end pipeline with exit 0 in at most 60 s, bit-exact AMBG
///     round trip, and a schema-valid report.
#[test]
fn criterion_10_cli_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let mut violations: Vec<String> = Vec::new();
    let started = Instant::now();

    let gen = ambkit(
        &[
            "gen",
            "--kind",
            "matched_gaussian_pair",
            "--alpha",
            "3.141592653589793",
            "--t",
            "8",
            "--dt",
            "0.03125",
            "-o",
            "pair.json",
        ],
        dir.path(),
    );
    assert_ok(&gen, "gen");

    let set = ambkit_core::signal::SignalSet::from_file(dir.path().join("pair.json")).unwrap();
    if set.size() != 2 {
        violations.push(format!("expected 2 signals, got {}", set.size()));
    }
    for (i, s) in set.signals().iter().enumerate() {
        let norm = s.energy().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            violations.push(format!("signal {i} norm {norm} not unit within 1e-10"));
        }
    }

    let amb = ambkit(
        &[
            "amb",
            "--set",
            "pair.json",
            "--i",
            "0",
            "--j",
            "0",
            "--kind",
            "symmetric",
            "--extent",
            "8",
            "--n",
            "513",
            "--oracle",
            "-o",
            "a.ambg",
        ],
        dir.path(),
    );
    assert_ok(&amb, "amb --oracle");

    // Bit-exact AMBG round trip.
    let bytes = std::fs::read(dir.path().join("a.ambg")).unwrap();
    let grid = ambkit_core::ambg::from_bytes(&bytes).unwrap();
    if ambkit_core::ambg::to_bytes(&grid) != bytes {
        violations.push("AMBG round trip is not bit-exact".to_string());
    }
    let (oi, oj) = grid.spec().nearest_index(0.0, 0.0);
    let peak = grid.value(oi, oj).norm();
    if (peak - 1.0).abs() > 1e-9 {
        violations.push(format!("origin peak {peak} differs from 1 by > 1e-9"));
    }

    let verify = ambkit(
        &["verify", "--set", "pair.json", "-o", "report.json"],
        dir.path(),
    );
    assert_ok(&verify, "verify full suite");

    let elapsed = started.elapsed();
    if elapsed.as_secs_f64() > 60.0 {
        violations.push(format!("pipeline took {elapsed:?} > 60 s"));
    }

    // Schema check on the report.
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    for key in ["tool_version", "set_digest", "grid", "steering", "results"] {
        if report.get(key).is_none() {
            violations.push(format!("report missing top-level field {key:?}"));
        }
    }
    let results = report["results"].as_array().cloned().unwrap_or_default();
    if results.is_empty() {
        violations.push("report has no results".to_string());
    }
    for r in &results {
        for (field, check) in [
            ("id", r["id"].is_string()),
            ("lhs", r["lhs"].is_number()),
            ("rhs", r["rhs"].is_number()),
            ("slack", r["slack"].is_number()),
            ("tol", r["tol"].is_number()),
            ("satisfied", r["satisfied"].is_boolean()),
            ("context", r["context"].is_object()),
        ] {
            if !check {
                violations.push(format!("result {} field {field} malformed", r["id"]));
            }
        }
        let sense = r["sense"].as_str().unwrap_or("");
        if !["le", "ge", "eq"].contains(&sense) {
            violations.push(format!("result {} has sense {sense:?}", r["id"]));
        }
        if r["satisfied"] != serde_json::Value::Bool(true) {
            violations.push(format!("result {} unsatisfied in a green run", r["id"]));
        }
    }

    let pass = violations.is_empty();
    println!(
        "acceptance 10 cli end-to-end: {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion 10 violations:\n{}", violations.join("\n"));
}

#[test]
fn gen_rejects_nonpositive_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let out = ambkit(
        &[
            "gen", "--kind", "gaussian", "--alpha", "0", "--t", "8", "--dt", "0.03125", "-o",
            "bad.json",
        ],
        dir.path(),
    );
    assert_single_line_error(&out, "gen --alpha 0");
}

#[test]
fn amb_rejects_out_of_range_indices() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(
        &ambkit(
            &[
                "gen", "--kind", "hermite", "--orders", "0,1", "--t", "8", "--dt", "0.03125", "-o",
                "set.json",
            ],
            dir.path(),
        ),
        "gen hermite",
    );
    let out = ambkit(
        &[
            "amb", "--set", "set.json", "--i", "5", "--j", "0", "-o", "out.ambg",
        ],
        dir.path(),
    );
    assert_single_line_error(&out, "amb --i 5");
}

#[test]
fn verify_only_filter_selects_and_validates_relations() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(
        &ambkit(
            &[
                "gen", "--kind", "hermite", "--orders", "0,1", "--t", "8", "--dt", "0.03125", "-o",
                "set.json",
            ],
            dir.path(),
        ),
        "gen hermite",
    );

    // --only R3.1 on an orthonormal pair: both sides near 4.
    let out = ambkit(
        &[
            "verify", "--set", "set.json", "--only", "R3.1", "--n", "257", "-o", "r31.json",
        ],
        dir.path(),
    );
    assert_ok(&out, "verify --only R3.1");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r31.json")).unwrap())
            .unwrap();
    let results = report["results"].as_array().unwrap();
    assert_eq!(results.len(), 1);
    let lhs = results[0]["lhs"].as_f64().unwrap();
    let rhs = results[0]["rhs"].as_f64().unwrap();
    assert!((lhs - 4.0).abs() < 4e-3, "lhs {lhs}");
    assert!((rhs - 4.0).abs() < 1e-9, "rhs {rhs}");

    // Unknown relation key.
    let unknown = ambkit(
        &[
            "verify", "--set", "set.json", "--only", "R9.9", "--n", "129",
        ],
        dir.path(),
    );
    assert_single_line_error(&unknown, "verify --only R9.9");
}

#[test]
fn verify_r35_demands_a_matched_gaussian_set() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(
        &ambkit(
            &[
                "gen",
                "--kind",
                "lfm_chirp",
                "--rates",
                "0.1,0.3",
                "--t",
                "8",
                "--dt",
                "0.03125",
                "-o",
                "chirps.json",
            ],
            dir.path(),
        ),
        "gen chirps",
    );
    let out = ambkit(
        &[
            "verify",
            "--set",
            "chirps.json",
            "--only",
            "R3.5",
            "--n",
            "257",
        ],
        dir.path(),
    );
    assert_single_line_error(&out, "verify --only R3.5 on chirps");
}

#[test]
fn support_sweep_is_monotone_with_nonnegative_margins() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(
        &ambkit(
            &[
                "gen",
                "--kind",
                "gaussian",
                "--alpha",
                "3.141592653589793",
                "--t",
                "8",
                "--dt",
                "0.03125",
                "-o",
                "g.json",
            ],
            dir.path(),
        ),
        "gen gaussian",
    );
    assert_ok(
        &ambkit(
            &[
                "amb",
                "--set",
                "g.json",
                "--kind",
                "symmetric",
                "--extent",
                "8",
                "--n",
                "513",
                "-o",
                "g.ambg",
            ],
            dir.path(),
        ),
        "amb",
    );
    let out = ambkit(
        &[
            "support",
            "--ambg",
            "g.ambg",
            "--eps",
            "0.05,0.1,0.20787957635076193,0.4,2.0",
            "-o",
            "support.json",
        ],
        dir.path(),
    );
    assert_ok(&out, "support sweep");
    let rows: Vec<serde_json::Value> =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("support.json")).unwrap())
            .unwrap();
    assert_eq!(rows.len(), 5);
    let areas: Vec<f64> = rows.iter().map(|r| r["area"].as_f64().unwrap()).collect();
    for pair in areas.windows(2) {
        assert!(pair[1] <= pair[0], "areas not nonincreasing: {areas:?}");
    }
    // ε = e^{-π/2} level set of the Gaussian ambiguity is a unit disk.
    assert!((areas[2] - std::f64::consts::PI).abs() < 0.02 * std::f64::consts::PI);
    // ε above the peak has empty support.
    assert_eq!(areas[4], 0.0);
    for r in &rows {
        assert!(r["margin"].as_f64().unwrap() >= -1e-9);
    }
}

#[test]
fn mimo_and_norms_subcommands_produce_consumable_outputs() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(
        &ambkit(
            &[
                "gen", "--kind", "hermite", "--orders", "0,1", "--t", "8", "--dt", "0.03125", "-o",
                "set.json",
            ],
            dir.path(),
        ),
        "gen hermite",
    );
    assert_ok(
        &ambkit(
            &[
                "mimo",
                "--set",
                "set.json",
                "--extent",
                "4",
                "--n",
                "129",
                "-o",
                "fdir",
                "--slice",
                "0.25,0.5",
                "--gamma",
                "1",
                "--slice-out",
                "slice.ambg",
            ],
            dir.path(),
        ),
        "mimo",
    );
    let field = ambkit_core::mimo::read_field_dir(dir.path().join("fdir")).unwrap();
    assert_eq!(field.size(), 2);
    assert_eq!(field.spec().n_tau, 129);
    let slice = ambkit_core::ambg::read(dir.path().join("slice.ambg")).unwrap();
    assert_eq!(slice.spec(), field.spec());

    assert_ok(
        &ambkit(
            &[
                "norms",
                "--set",
                "set.json",
                "--kind",
                "entrywise:2",
                "--extent",
                "4",
                "--n",
                "65",
                "-o",
                "norms.csv",
            ],
            dir.path(),
        ),
        "norms",
    );
    let csv = std::fs::read_to_string(dir.path().join("norms.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("tau,nu,value"));
    assert_eq!(lines.count(), 65 * 65);
}

#[test]
fn verify_accepts_region_flags_and_rejects_malformed_ones() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(
        &ambkit(
            &[
                "gen", "--kind", "hermite", "--orders", "0,1", "--t", "8", "--dt", "0.03125", "-o",
                "set.json",
            ],
            dir.path(),
        ),
        "gen hermite",
    );
    let out = ambkit(
        &[
            "verify",
            "--set",
            "set.json",
            "--only",
            "R3.3",
            "--n",
            "129",
            "--region",
            "disk:0,0,1",
            "--region",
            "rect:-1,1,-0.5,0.5",
            "-o",
            "r.json",
        ],
        dir.path(),
    );
    assert_ok(&out, "verify with regions");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    // Two bounds per configured region.
    assert_eq!(report["results"].as_array().unwrap().len(), 4);

    for bad in ["disk:0,0", "blob:1,2,3", "rect:1,-1,0,1"] {
        let out = ambkit(
            &[
                "verify", "--set", "set.json", "--only", "R3.3", "--n", "129", "--region", bad,
            ],
            dir.path(),
        );
        assert_single_line_error(&out, &format!("verify --region {bad}"));
    }
}

#[test]
fn support_from_a_signal_set_uses_the_norm_budget() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(
        &ambkit(
            &[
                "gen",
                "--kind",
                "gaussian",
                "--alpha",
                "3.141592653589793",
                "--t",
                "8",
                "--dt",
                "0.03125",
                "-o",
                "g.json",
            ],
            dir.path(),
        ),
        "gen gaussian",
    );
    let out = ambkit(
        &[
            "support",
            "--set",
            "g.json",
            "--extent",
            "8",
            "--n",
            "513",
            "--eps",
            "0.20787957635076193",
            "-o",
            "s.json",
        ],
        dir.path(),
    );
    assert_ok(&out, "support --set");
    let rows: Vec<serde_json::Value> =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    let area = rows[0]["area"].as_f64().unwrap();
    let bound = rows[0]["bound"].as_f64().unwrap();
    assert!((area - std::f64::consts::PI).abs() < 0.02 * std::f64::consts::PI);
    assert!(bound <= area && bound > 0.9, "bound {bound} vs area {area}");
}

#[test]
fn outputs_are_deterministic_and_thread_count_independent() {
    let dir = tempfile::tempdir().unwrap();
    for run in ["one", "two"] {
        assert_ok(
            &ambkit(
                &[
                    "gen",
                    "--kind",
                    "phase_code",
                    "--random-code",
                    "13",
                    "--seed",
                    "9",
                    "--chip",
                    "0.5",
                    "--t",
                    "8",
                    "--dt",
                    "0.03125",
                    "-o",
                    &format!("code_{run}.json"),
                ],
                dir.path(),
            ),
            "gen random code",
        );
    }
    let a = std::fs::read(dir.path().join("code_one.json")).unwrap();
    let b = std::fs::read(dir.path().join("code_two.json")).unwrap();
    assert_eq!(a, b, "seeded generation is not reproducible");

    let default_run = ambkit(
        &[
            "amb",
            "--set",
            "code_one.json",
            "--extent",
            "4",
            "--n",
            "129",
            "-o",
            "surface_default.ambg",
        ],
        dir.path(),
    );
    assert_ok(&default_run, "amb default threads");
    let single = Command::new(env!("CARGO_BIN_EXE_ambkit"))
        .args([
            "amb",
            "--set",
            "code_one.json",
            "--extent",
            "4",
            "--n",
            "129",
            "-o",
            "surface_single.ambg",
        ])
        .env("AMBKIT_THREADS", "1")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_ok(&single, "amb AMBKIT_THREADS=1");
    let multi = std::fs::read(dir.path().join("surface_default.ambg")).unwrap();
    let one = std::fs::read(dir.path().join("surface_single.ambg")).unwrap();
    assert_eq!(multi, one, "thread count changed the output bytes");
}
