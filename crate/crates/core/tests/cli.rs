use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use orlicz_core::cli::AnalysisConfig;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn orlicz(args: &[&str], cfg: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orlicz"))
        .args(args)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const UNIFORM_HEAD: &str = "[phi.domain]\nlo = [-1.0, -1.0]\nhi = [1.0, 1.0]\n[phi.family]\nkind = \"uniform\"\n";

#[test]
fn min_of_squares_is_not_almost_convex() {
    let dir = tempfile::tempdir().unwrap();
    let o = orlicz(&["check", "almost-convex"], &config("min_of_squares.toml"), dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL witness=((1,0), (0,1), 0.5)"), "{}", stdout(&o));
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("seed: 1\n"));
    assert_eq!(report.lines().last().unwrap(), stdout(&o).trim_end());
}

#[test]
fn quadratic_passes_a1_with_beta_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = orlicz(&["check", "a1"], &config("quadratic.toml"), dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim_end(), "PASS beta=1");
}

#[test]
fn malformed_config_exits_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let o = orlicz(&["check", "a1"], &config("malformed.toml"), dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 4, column 1"), "{err}");
    assert!(!dir.path().join("report.txt").exists());
}

#[test]
fn unknown_keys_and_conditions_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(config("quadratic.toml")).unwrap() + "\nbogus = 3\n";
    let cfg = write_config(dir.path(), "bad.toml", &text);
    assert_eq!(orlicz(&["check", "a1"], &cfg, dir.path()).status.code(), Some(2));
    let o = orlicz(&["check", "nope"], &config("quadratic.toml"), dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn envelope_csv_of_min_of_squares_vanishes() {
    let dir = tempfile::tempdir().unwrap();
    let o = orlicz(&["envelope"], &config("min_of_squares.toml"), dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("envelope.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("xi1,xi2,value,envelope"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 33 * 33);
    assert!(rows.iter().all(|r| r[3] <= 1e-9));
}

#[test]
fn envelope_of_convex_family_equals_values() {
    let dir = tempfile::tempdir().unwrap();
    let o = orlicz(&["envelope"], &config("quadratic.toml"), dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("envelope.csv")).unwrap();
    for l in csv.lines().skip(1) {
        let r: Vec<&str> = l.split(',').collect();
        assert_eq!(r[2], r[3], "{l}");
    }
}

#[test]
fn envelope_of_min_of_linear_and_quadratic() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[phi.domain]\nlo = [-1.0]\nhi = [1.0]\n[phi.family]\nkind = \"uniform\"\n\
        [phi.family.phi]\nfamily = \"min\"\n\
        [[phi.family.phi.parts]]\nfamily = \"power-norm\"\ndim = 1\np = 1.0\n\
        [[phi.family.phi.parts]]\nfamily = \"power-norm\"\ndim = 1\np = 2.0\n\
        [envelope]\nsupport_scale = 1\n[envelope.grid]\nlo = [0.0]\nhi = [50.0]\nper_axis = 401\n";
    let cfg = write_config(dir.path(), "minlin.toml", text);
    let o = orlicz(&["envelope"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("envelope.csv")).unwrap();
    let row = csv.lines().find(|l| l.starts_with("1,")).unwrap();
    let env: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((env - 0.75).abs() <= 0.02, "{row}");
}

#[test]
fn infinity_is_written_as_inf() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "{UNIFORM_HEAD}[phi.family.phi]\nfamily = \"linfty-indicator\"\ndim = 2\nr = 1.0\n\
         [envelope]\nsupport_scale = 1\n[envelope.grid]\nlo = [-2.0, -2.0]\nhi = [2.0, 2.0]\nper_axis = 5\n"
    );
    let cfg = write_config(dir.path(), "ind.toml", &text);
    assert_eq!(orlicz(&["envelope"], &cfg, dir.path()).status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("envelope.csv")).unwrap();
    assert!(csv.contains("-2,-2,inf,inf"), "{csv}");
}

#[test]
fn chain_on_uniform_quadratic_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = orlicz(&["chain"], &config("quadratic.toml"), dir.path());
    assert_eq!(o.status.code(), Some(0));
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("chain<=direct=true"), "{report}");
    assert!(report.contains("[a1]") && report.contains("[m]"));
}

#[test]
fn chain_on_inadmissible_exponent_fails_a1() {
    let dir = tempfile::tempdir().unwrap();
    let o = orlicz(&["chain"], &config("double_phase_inadmissible.toml"), dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("FAIL witness="));
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("condition: (A1-psi)") && report.contains("derived.betas_failing: 20/20"));
}

#[test]
fn chain_with_distinct_psi_is_out_of_scope() {
    let dir = tempfile::tempdir().unwrap();
    let base = std::fs::read_to_string(config("quadratic.toml")).unwrap();
    let text = base
        + "\n[conditions.psi.domain]\nlo = [-1.0, -1.0]\nhi = [1.0, 1.0]\n[conditions.psi.family]\nkind = \"uniform\"\n\
           [conditions.psi.family.phi]\nfamily = \"power-norm\"\ndim = 2\np = 3.0\n";
    let cfg = write_config(dir.path(), "psi.toml", &text);
    let o = orlicz(&["chain"], &cfg, dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn norm_command_agrees_with_scan() {
    let dir = tempfile::tempdir().unwrap();
    let o = orlicz(&["norm"], &config("quadratic.toml"), dir.path());
    assert_eq!(o.status.code(), Some(0));
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    let get = |k: &str| -> f64 {
        report.lines().find_map(|l| l.strip_prefix(k)).unwrap().trim().parse().unwrap()
    };
    let (lux, scan) = (get("luxemburg_norm:"), get("dense_scan:"));
    assert!(lux <= scan && scan <= lux * 1.01);
}

#[test]
fn seed_and_tol_flags_are_applied() {
    let dir = tempfile::tempdir().unwrap();
    let out = orlicz(&["check", "a0", "--seed", "99", "--tol", "1e-6"], &config("quadratic.toml"), dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("seed: 99\n"));
}

#[test]
fn configs_round_trip_losslessly() {
    for name in [
        "min_of_squares.toml",
        "quadratic.toml",
        "indicator.toml",
        "double_phase_admissible.toml",
        "double_phase_inadmissible.toml",
    ] {
        let cfg = AnalysisConfig::load(&config(name)).unwrap();
        let again = AnalysisConfig::parse(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, again, "{name}");
    }
}
