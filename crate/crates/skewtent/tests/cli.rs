//! End-to-end tests of the `skewtent` binary: subcommand output, exit
//! codes, machine-parseable error categories, and file outputs.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skewtent"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("skewtent-cli-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn golden_beta_text() -> String {
    format!("{:.17}", (1.0 + 5.0_f64.sqrt()) / 4.0)
}

#[test]
fn kneading_subcommand() {
    let out = run(&["kneading", "0.5", "1.0", "--len", "6"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "RLLLLL (open)");

    let beta = golden_beta_text();
    let out = run(&["kneading", "0.5", &beta, "--len", "6", "--ctol", "1e-6"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "RLC (periodic, n=2)");
}

#[test]
fn region_errors_exit_nonzero_with_category() {
    let out = run(&["kneading", "0.3", "0.4"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error: region:"), "stderr was {err:?}");
    assert_eq!(stdout(&out), "");
}

#[test]
fn gamma_subcommand_is_deterministic_json() {
    let a = run(&["gamma", "0.3", "0.8", "--n", "20000", "--seed", "7"]);
    let b = run(&["gamma", "0.3", "0.8", "--n", "20000", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    let text = stdout(&a);
    assert!(text.starts_with("{\"alpha\":"));
    assert!(text.contains("\"seed\":7"));
}

#[test]
fn tangent_table_defaults_to_six_rows() {
    let out = run(&["tangent-table", "--n", "20000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 7);
    assert!(text.starts_with("alpha,beta,gamma_birkhoff"));
}

#[test]
fn tangent_table_empty_params_prints_header_only() {
    let out = run(&["tangent-table", "--params", ""]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("alpha,beta,"));
}

#[test]
fn tangent_table_reads_param_files() {
    let dir = temp_dir("params");
    let file = dir.join("pairs.txt");
    fs::write(&file, "0.3,0.8\n0.6,0.9\n").unwrap();
    let out = run(&[
        "tangent-table",
        "--params-file",
        file.to_str().unwrap(),
        "--n",
        "20000",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 3);
    fs::remove_dir_all(dir).ok();
}

#[test]
fn isentrope_streams_csv_to_stdout() {
    let out = run(&[
        "isentrope",
        "0.5",
        "1.0",
        "--range",
        "0.3,0.7",
        "--steps",
        "5",
        "--out",
        "-",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("alpha,beta,theta_residual,slope\n"));
    assert_eq!(text.lines().count(), 6);
    for line in text.lines().skip(1) {
        let beta: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((beta - 1.0).abs() < 1e-9);
    }
}

#[test]
fn isentrope_json_format() {
    let out = run(&[
        "isentrope",
        "0.5",
        "1.0",
        "--range",
        "0.4,0.6",
        "--steps",
        "3",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("[{\"alpha\":"));
    assert!(text.trim_end().ends_with("}]"));
}

#[test]
fn raster_writes_ppm_and_ids_csv() {
    let dir = temp_dir("raster");
    let ppm = dir.join("img.ppm");
    let ids = dir.join("ids.csv");
    let out = run(&[
        "raster",
        "--range",
        "0.2,0.8,0.5,1.0",
        "--size",
        "24x16",
        "--prefix",
        "6",
        "--out",
        ppm.to_str().unwrap(),
        "--ids-csv",
        ids.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bytes = fs::read(&ppm).unwrap();
    assert!(bytes.starts_with(b"P6\n24 16\n255\n"));
    assert_eq!(bytes.len(), "P6\n24 16\n255\n".len() + 24 * 16 * 3);
    let ids_text = fs::read_to_string(&ids).unwrap();
    assert_eq!(ids_text.lines().count(), 1 + 24 * 16);
    fs::remove_dir_all(dir).ok();
}

#[test]
fn raster_one_by_one_image_renders() {
    let dir = temp_dir("tiny");
    let ppm = dir.join("one.ppm");
    let out = run(&[
        "raster",
        "--range",
        "0.29,0.31,0.79,0.81",
        "--size",
        "1x1",
        "--out",
        ppm.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(fs::read(&ppm).unwrap().starts_with(b"P6\n1 1\n255\n"));
    fs::remove_dir_all(dir).ok();
}

#[test]
fn raster_with_overlays_marks_both_sources() {
    let dir = temp_dir("overlay");
    let ppm = dir.join("tangent.ppm");
    let out = run(&[
        "raster",
        "--range",
        "0.2,0.4,0.7,0.9",
        "--size",
        "64x64",
        "--prefix",
        "6",
        "--overlay",
        "0.3,0.8,gamma",
        "--overlay",
        "0.3,0.8,theta",
        "--n",
        "20000",
        "--out",
        ppm.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let bytes = fs::read(&ppm).unwrap();
    let body = &bytes["P6\n64 64\n255\n".len()..];
    let mut reds = 0;
    let mut blues = 0;
    for px in body.chunks(3) {
        if px == [255, 0, 0] {
            reds += 1;
        }
        if px == [0, 0, 255] {
            blues += 1;
        }
    }
    // the theta segment is drawn after the gamma one; where they coincide
    // blue wins, so red may be sparse but blue must cross the image
    assert!(blues >= 64, "theta overlay missing: {blues}");
    assert!(reds + blues >= 64, "overlays missing entirely");
    fs::remove_dir_all(dir).ok();
}

#[test]
fn out_dir_env_var_resolves_relative_paths() {
    let dir = temp_dir("envdir");
    let out = Command::new(env!("CARGO_BIN_EXE_skewtent"))
        .args([
            "raster",
            "--range",
            "0.2,0.8,0.5,1.0",
            "--size",
            "4x4",
            "--out",
            "via-env.ppm",
        ])
        .env("SKEWTENT_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.join("via-env.ppm").exists());
    fs::remove_dir_all(dir).ok();
}

#[test]
fn markov_subcommand_reports() {
    let beta = golden_beta_text();
    let out = run(&["markov", "0.5", &beta]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\"status\":\"ok\""));
    assert!(text.contains("\"period\":2"));

    let out = run(&["markov", "0.3", "0.8", "--tol", "1e-12"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("\"status\":\"no-period-found\""));

    let out = run(&["markov", "0.5", "1.0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\"period\":null"));
    assert!(text.contains("\"gamma\":5.0000000000000000e-1"));
}

#[test]
fn usage_errors_are_reported() {
    let out = run(&["raster", "--range", "0.2,0.8", "--size", "4x4"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: usage:"));
}
