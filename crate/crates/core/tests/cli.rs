use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn symbreak(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symbreak")).args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("symbreak-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn every_example_config_validates() {
    for entry in std::fs::read_dir(configs().join("examples")).unwrap() {
        let path = entry.unwrap().path();
        let out = symbreak(&["validate", "--config", path.to_str().unwrap()]);
        assert!(out.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn malformed_configs_report_their_class() {
    let mut seen = 0;
    for entry in std::fs::read_dir(configs().join("malformed")).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let class = text.lines().next().unwrap().strip_prefix("# expect: ").unwrap().trim();
        let out = symbreak(&["validate", "--config", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{}", path.display());
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert!(stderr.starts_with(&format!("{class}: ")), "{}: {stderr}", path.display());
        seen += 1;
    }
    assert_eq!(seen, 10);
}

#[test]
fn out_flag_overrides_stdout() {
    let cfg = configs().join("examples/isotropy-check.toml");
    let target = scratch("iso.csv");
    let out = symbreak(&["isotropy-check", "--config", cfg.to_str().unwrap(), "--out", target.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let stdout = symbreak(&["isotropy-check", "--config", cfg.to_str().unwrap()]).stdout;
    assert_eq!(std::fs::read(&target).unwrap(), stdout);
}

#[test]
fn subcommand_must_match_scenario() {
    let cfg = configs().join("examples/isotropy-check.toml");
    let out = symbreak(&["yrast", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("scenario.name"));
}

#[test]
fn missing_config_is_an_io_error() {
    let out = symbreak(&["validate", "--config", "/nonexistent/run.toml"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("IoError: "));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let cfg = configs().join("examples/isotropy-check.toml");
    let out = symbreak(&["isotropy-check", "--config", cfg.to_str().unwrap(), "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn unstable_two_fluid_coupling_is_a_domain_error() {
    let cfg = scratch("attractive.toml");
    std::fs::write(
        &cfg,
        "[system]\nZ = 10\nN = 10\nqq_isovector = -0.05\n[scenario]\nname = \"scissors\"\n",
    )
    .unwrap();
    let out = symbreak(&["scissors", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("DomainError: scissors: "));
}

#[test]
fn csv_and_json_agree_to_full_precision() {
    let base = std::fs::read_to_string(configs().join("examples/crank-sweep.toml")).unwrap();
    let csv_cfg = scratch("sweep-csv.toml");
    let json_cfg = scratch("sweep-json.toml");
    std::fs::write(&csv_cfg, format!("{base}\n[output]\nprecision = 17\n")).unwrap();
    std::fs::write(&json_cfg, format!("{base}\n[output]\nformat = \"json\"\n")).unwrap();
    let csv = String::from_utf8(symbreak(&["crank-sweep", "--config", csv_cfg.to_str().unwrap()]).stdout).unwrap();
    let json: Value =
        serde_json::from_slice(&symbreak(&["crank-sweep", "--config", json_cfg.to_str().unwrap()]).stdout).unwrap();

    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let columns: Vec<&str> = json["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(header, columns);
    let rows = json["rows"].as_array().unwrap();
    let csv_rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(csv_rows.len(), rows.len());
    for (c, j) in csv_rows.iter().zip(rows) {
        for (a, b) in c.iter().zip(j.as_array().unwrap()) {
            assert_eq!(*a, b.as_f64().unwrap());
        }
    }
}
