use std::path::Path;
use std::process::{Command, Output};

const FIG4B: &str = r#"
scenario = "fig4b"
threshold = { relative = 0.5 }

[scene]
wavelength_nm = 428.0
range_m = 1e-6
medium = { refractive_index = 1.0 }
particle = { shape = "sphere", radius_nm = 50.0, rri = 1.05 }

[grid]
start_deg = 0.0
stop_deg = 180.0
count = 181
"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nanoradar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn column(csv: &str, idx: usize) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn every_subcommand_has_help() {
    for sub in ["mie", "rgd", "radar", "spp", "antenna", "pd", "compare", "reproduce-fig4"] {
        let out = run(&[sub, "--help"]);
        assert!(out.status.success(), "{sub} --help failed");
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn csv_is_bit_identical_across_runs() {
    for args in [
        &["mie", "--grid", "0:180:37"][..],
        &["rgd", "--extents-nm", "40,60,80", "--grid", "0:180:19"][..],
        &["spp", "--count", "20"][..],
        &["antenna", "--hansen-woodyard", "--element", "dipole"][..],
        &["pd", "--count", "50", "--rc-tau", "1e-12"][..],
    ] {
        let a = stdout(&run(args));
        let b = stdout(&run(args));
        assert_eq!(a, b, "{args:?}");
        assert!(a.lines().count() > 2);
    }
}

#[test]
fn radar_on_small_sphere_selects_rgd() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fig4b.toml", FIG4B);
    let text = stdout(&run(&["radar", "--config", &cfg]));
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["model"], "RGD");
    assert_eq!(doc["scenario"], "fig4b");
    assert_eq!(doc["detected"], true);
}

#[test]
fn radar_writes_configured_outputs_and_honours_seed() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("echo.csv");
    let text = format!(
        "{FIG4B}\n[noise]\nkind = \"gaussian\"\nsigma = 1e-20\nseed = 1\n\n[[outputs]]\npath = {:?}\nformat = \"csv\"\n",
        csv_path.to_str().unwrap()
    );
    let cfg = write_config(dir.path(), "noisy.toml", &text);
    let mut traces = Vec::new();
    for seed in ["5", "5", "6"] {
        let out = run(&["radar", "--config", &cfg, "--seed", seed]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        traces.push(std::fs::read_to_string(&csv_path).unwrap());
    }
    assert_eq!(traces[0], traces[1]);
    assert_ne!(traces[0], traces[2]);
}

#[test]
fn index_matched_sphere_is_dark() {
    let text = stdout(&run(&["mie", "--rri", "1.0", "--grid", "0:180:91"]));
    let intensity = column(&text, 1);
    assert_eq!(intensity.len(), 91);
    assert!(intensity.iter().all(|&v| v == 0.0));
}

#[test]
fn compare_small_spheres_agree() {
    let text = stdout(&run(&["compare", "--x", "0.1,0.25,0.5"]));
    for err in column(&text, 1) {
        assert!(err < 0.05, "{err}");
    }
}

#[test]
fn structured_output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mie.json");
    let out = run(&["mie", "--format", "structured", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(doc["model"], "Mie");
    assert_eq!(doc["intensity"].as_array().unwrap().len(), 181);
}

#[test]
fn fig4_covers_both_panels() {
    let text = stdout(&run(&["reproduce-fig4", "--grid", "0:180:7"]));
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 4 * 7);
    assert!(rows.iter().filter(|r| r[0] == "a").all(|r| r[1] == "Mie"));
    assert!(rows.iter().filter(|r| r[0] == "b").all(|r| r[1] == "RGD"));
}

#[test]
fn empty_config_lists_missing_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "empty.toml", "");
    let out = run(&["radar", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    for key in ["scenario", "scene", "grid", "threshold"] {
        assert!(err.contains(key), "{err}");
    }
}

#[test]
fn bad_grid_is_a_validation_error() {
    let out = run(&["mie", "--grid", "90:10:5"]);
    assert_eq!(out.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", &FIG4B.replace("count = 181", "count = 0"));
    let out = run(&["radar", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid.count"));
}

#[test]
fn mie_rejects_box_target() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "box.toml",
        &FIG4B.replace(
            r#"particle = { shape = "sphere", radius_nm = 50.0, rri = 1.05 }"#,
            r#"particle = { shape = "box", extents_nm = [50.0, 50.0, 50.0], rri = 1.05 }"#,
        ),
    );
    assert_eq!(run(&["mie", "--config", &cfg]).status.code(), Some(2));
    assert!(run(&["rgd", "--config", &cfg]).status.success());
}

#[test]
fn missing_config_file_is_io_error() {
    let out = run(&["radar", "--config", "/nonexistent/run.toml"]);
    assert_eq!(out.status.code(), Some(1));
}
