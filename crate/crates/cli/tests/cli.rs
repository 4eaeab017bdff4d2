use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gpc_cli::plot::{grid_coordinate, tetra_grid};
use gpc_core::channel::qubit::cp_condition_qubit;
use gpc_core::{CMatrix, Decomposition};
use serde_json::Value;
use tempfile::TempDir;

fn gpc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpc"))
        .args(args)
        .output()
        .expect("spawn gpc")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&o.stdout),
            String::from_utf8_lossy(&o.stderr)
        )
    })
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_then_validate_m4() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("m4.json");
    let o = gpc(&[
        "decomp",
        "build",
        "--name",
        "m4-example2",
        "--out",
        path_str(&file),
    ]);
    assert_eq!(code(&o), 0);
    let d: Decomposition = serde_json::from_str(&fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(d.len(), 5);

    let o = gpc(&["decomp", "validate", "--in", path_str(&file)]);
    assert_eq!(code(&o), 0);
    let report = stdout_json(&o);
    assert_eq!(report["passed"], true);
    assert!(report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
}

#[test]
fn decomposition_file_reserializes_byte_identically() {
    let dir = TempDir::new().unwrap();
    for name in ["qubit-pauli", "m4-example2", "mub-p3", "mub-p7"] {
        let file = dir.path().join(format!("{name}.json"));
        assert_eq!(
            code(&gpc(&[
                "decomp",
                "build",
                "--name",
                name,
                "--out",
                path_str(&file)
            ])),
            0
        );
        let text = fs::read_to_string(&file).unwrap();
        let d: Decomposition = serde_json::from_str(&text).unwrap();
        let mut again = serde_json::to_string_pretty(&d).unwrap();
        again.push('\n');
        assert_eq!(text, again, "{name}");
    }
}

#[test]
fn validation_failure_is_a_negative_verdict() {
    let dir = TempDir::new().unwrap();
    let o = gpc(&["decomp", "build", "--name", "qubit-pauli"]);
    let mut v = stdout_json(&o);
    // Replace the σ1 MASA by a second copy of the σ3 MASA.
    let parts = v["parts"].as_array_mut().unwrap();
    parts[0] = parts[2].clone();
    let file = write(&dir, "bad.json", &v.to_string());
    let o = gpc(&["decomp", "validate", "--in", &file]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout_json(&o)["passed"], false);
}

#[test]
fn invalid_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&gpc(&["decomp", "build", "--name", "mub-p4"])), 2);
    assert_eq!(code(&gpc(&["decomp", "build", "--name", "unknown"])), 2);
    let junk = write(&dir, "junk.json", "{not json");
    assert_eq!(code(&gpc(&["decomp", "validate", "--in", &junk])), 2);
    assert_eq!(
        code(&gpc(&[
            "decomp",
            "validate",
            "--in",
            "/nonexistent/file.json"
        ])),
        2
    );
    let short = write(
        &dir,
        "short.json",
        r#"{"decomposition":"qubit-pauli","lambda":[0.1,0.2]}"#,
    );
    assert_eq!(code(&gpc(&["channel", "choi", "--channel", &short])), 2);
    assert_eq!(
        code(&gpc(&[
            "sample",
            "--decomp",
            "qubit-pauli",
            "--count",
            "5",
            "--box",
            "1"
        ])),
        2
    );
    assert_eq!(code(&gpc(&["channel", "bogus"])), 2);
    assert_eq!(
        code(&gpc(&["plot-tetra", "--lambda3", "0", "--resolution", "7"])),
        2
    );
    let unwritable = dir.path().join("missing-dir").join("x.svg");
    assert_eq!(
        code(&gpc(&[
            "plot-tetra",
            "--lambda3",
            "0",
            "--out",
            path_str(&unwritable)
        ])),
        2
    );
}

#[test]
fn check_cp_vertex_and_violation() {
    let dir = TempDir::new().unwrap();
    let vertex = write(
        &dir,
        "v.json",
        r#"{"decomposition":"qubit-pauli","lambda":[1,-1,-1]}"#,
    );
    let o = gpc(&["channel", "check-cp", "--channel", &vertex]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(r["cp"], true);
    assert!(r["report"]["min_choi_eigenvalue"].as_f64().unwrap().abs() < 1e-12);

    let outside = write(
        &dir,
        "o.json",
        r#"{"decomposition":"qubit-pauli","lambda":[1,1,-1]}"#,
    );
    for method in ["analytic", "numeric", "both", "kraus"] {
        let o = gpc(&[
            "channel",
            "check-cp",
            "--channel",
            &outside,
            "--method",
            method,
        ]);
        assert_eq!(code(&o), 1, "{method}");
        assert_eq!(stdout_json(&o)["cp"], false);
    }
    let o = gpc(&["channel", "check-cp", "--channel", &outside]);
    assert!(
        (stdout_json(&o)["report"]["min_choi_eigenvalue"]
            .as_f64()
            .unwrap()
            + 1.0)
            .abs()
            < 1e-12
    );
}

#[test]
fn choi_matches_closed_form_entries() {
    let dir = TempDir::new().unwrap();
    let ch = write(
        &dir,
        "c.json",
        r#"{"decomposition":"qubit-pauli","lambda":[0.2,0.4,0.6]}"#,
    );
    let o = gpc(&["channel", "choi", "--channel", &ch]);
    assert_eq!(code(&o), 0);
    let x: CMatrix = serde_json::from_slice(&o.stdout).unwrap();
    let expect = [
        [0.8, 0.0, 0.0, 0.3],
        [0.0, 0.2, -0.1, 0.0],
        [0.0, -0.1, 0.2, 0.0],
        [0.3, 0.0, 0.0, 0.8],
    ];
    for (r, row) in expect.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            assert!((x[(r, c)].re - v).abs() < 1e-12 && x[(r, c)].im.abs() < 1e-12);
        }
    }
}

#[test]
fn apply_and_kraus() {
    let dir = TempDir::new().unwrap();
    let ch = write(
        &dir,
        "c.json",
        r#"{"decomposition":"qubit-pauli","lambda":[0.5,0.5,0.5]}"#,
    );
    let state = write(
        &dir,
        "s.json",
        r#"{"dim":2,"data":[[[1,0],[0,0]],[[0,0],[0,0]]]}"#,
    );
    let o = gpc(&["channel", "apply", "--channel", &ch, "--state", &state]);
    assert_eq!(code(&o), 0);
    let out: CMatrix = serde_json::from_slice(&o.stdout).unwrap();
    assert!((out[(0, 0)].re - 0.75).abs() < 1e-12 && (out[(1, 1)].re - 0.25).abs() < 1e-12);

    let m4 = write(
        &dir,
        "m4.json",
        r#"{"decomposition":"m4-example2","lambda":[1,0,0,0,0]}"#,
    );
    let o = gpc(&["channel", "kraus", "--channel", &m4]);
    assert_eq!(code(&o), 0);
    let form = stdout_json(&o);
    let coeffs = form["coefficients"].as_array().unwrap();
    let groups = form["groups"].as_array().unwrap();
    assert_eq!(coeffs.len(), 16);
    assert_eq!(groups[0]["slot"], "identity");
    assert!(groups
        .iter()
        .any(|g| g["slot"] == "commutant" && g["part"] == 0));
}

#[test]
fn sample_runs() {
    let o = gpc(&[
        "sample",
        "--decomp",
        "qubit-pauli",
        "--count",
        "0",
        "--seed",
        "1",
    ]);
    assert_eq!(code(&o), 0);
    let s = stdout_json(&o);
    assert_eq!(
        (
            s["agree"].as_u64(),
            s["skipped"].as_u64(),
            s["disagree"].as_u64()
        ),
        (Some(0), Some(0), Some(0))
    );

    let args = [
        "sample",
        "--decomp",
        "qubit-pauli",
        "--count",
        "10000",
        "--seed",
        "7",
        "--box",
        "-1.5,1.5",
    ];
    let a = gpc(&args);
    let b = gpc(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout_json(&a)["disagree"], 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sample_from_decomposition_file() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("mub.json");
    assert_eq!(
        code(&gpc(&[
            "decomp",
            "build",
            "--name",
            "mub-p3",
            "--out",
            path_str(&file)
        ])),
        0
    );
    let out = dir.path().join("stats.json");
    let o = gpc(&[
        "sample",
        "--decomp",
        path_str(&file),
        "--count",
        "200",
        "--seed",
        "3",
        "--box",
        "-0.8,1.2",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let s: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(s["decomposition"], "mub-p3");
    assert_eq!(s["disagree"], 0);
}

#[test]
fn verify_suites_pass_deterministically() {
    for suite in ["lemmas", "projections", "fmap"] {
        let a = gpc(&["verify", "--suite", suite, "--seed", "5"]);
        assert_eq!(code(&a), 0, "{suite}");
        let v = stdout_json(&a);
        assert_eq!(v["passed"], true);
        assert!(!v["reports"].as_array().unwrap().is_empty());
        let b = gpc(&["verify", "--suite", suite, "--seed", "5"]);
        assert_eq!(a.stdout, b.stdout);
    }
    let all = stdout_json(&gpc(&["verify"]));
    let names: Vec<&str> = all["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["name"].as_str().unwrap())
        .collect();
    for n in 2..=5 {
        assert!(names.contains(&format!("trace-product n={n}").as_str()));
        assert!(names.contains(&format!("choi-projections weyl n={n}").as_str()));
    }
    assert!(names.iter().any(|n| n.contains("M2xI2")));
}

fn svg_cells(svg: &str) -> Vec<(f64, f64, bool)> {
    svg.lines()
        .filter(|l| l.contains("data-cp="))
        .map(|l| {
            let attr = |key: &str| {
                let start = l.find(&format!("{key}=\"")).unwrap() + key.len() + 2;
                let end = start + l[start..].find('"').unwrap();
                l[start..end].to_string()
            };
            (
                attr("data-l1").parse().unwrap(),
                attr("data-l2").parse().unwrap(),
                attr("data-cp") == "true",
            )
        })
        .collect()
}

#[test]
fn plot_slices_match_condition() {
    let dir = TempDir::new().unwrap();
    for (lambda3, res) in [(0.0, 21), (1.0, 17), (2.0, 8), (-0.5, 12)] {
        let file = dir.path().join(format!("slice-{lambda3}.svg"));
        let l3 = lambda3.to_string();
        let r = res.to_string();
        let o = gpc(&[
            "plot-tetra",
            "--lambda3",
            &l3,
            "--resolution",
            &r,
            "--out",
            path_str(&file),
        ]);
        assert_eq!(code(&o), 0);
        let svg = fs::read_to_string(&file).unwrap();
        let cells = svg_cells(&svg);
        assert_eq!(cells.len(), res * res);
        for &(l1, l2, cp) in &cells {
            assert_eq!(cp, cp_condition_qubit([l1, l2, lambda3]));
        }
        let grid = tetra_grid(lambda3, res);
        let count = grid.iter().flatten().filter(|&&c| c).count();
        assert_eq!(count, cells.iter().filter(|c| c.2).count());
        if lambda3 == 0.0 {
            for (row, cells) in grid.iter().enumerate() {
                for (col, &cp) in cells.iter().enumerate() {
                    let (x, y) = (grid_coordinate(col, res), grid_coordinate(row, res));
                    assert_eq!(cp, (x + y).abs() <= 1.0 && (x - y).abs() <= 1.0);
                }
            }
        } else if lambda3 == 1.0 {
            assert_eq!(count, res);
        } else if lambda3 == 2.0 {
            assert_eq!(count, 0);
        }
    }
}
