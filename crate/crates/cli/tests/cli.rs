use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fracns(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracns")).args(args).arg("--output").arg(out).output().unwrap()
}

fn config(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name).display().to_string()
}

fn manifest(dir: &Path) -> toml::Table {
    fs::read_to_string(dir.join("manifest.toml")).unwrap().parse().unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("run.toml");
    fs::write(&p, body).unwrap();
    p
}

const LINEAR: &str = r#"
alpha = 0.6
dim = 2
n_modes = 8
nu = 1.0
delay_r = 0.1
t_end = 0.5
n_steps = 10
nonlinear = false

[force]
kind = "point_delay"
kappa = 0.0

[monitor]
c1 = 0.25
samples = 200
strict_ball = false
"#;

#[test]
fn linear_solve_decays_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracns(&["solve", "--config", &config("linear.toml")], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert!(!csv.contains('\r'));
    let norms = column(&csv, "l2_norm");
    assert!(norms.last().unwrap() < &norms[0]);
    let m = manifest(dir.path());
    assert_eq!(m["monitor"]["verdict"].as_str(), Some("continue"));
    for f in m["outputs"].as_array().unwrap() {
        assert!(dir.path().join(f.as_str().unwrap()).exists());
    }
    // header: u32 dim, u32 n_modes, f64 nu, then (re, im) pairs
    let bin = fs::read(dir.path().join("field_final.bin")).unwrap();
    assert_eq!(u32::from_le_bytes(bin[0..4].try_into().unwrap()), 2);
    assert_eq!(u32::from_le_bytes(bin[4..8].try_into().unwrap()), 32);
    assert_eq!(f64::from_le_bytes(bin[8..16].try_into().unwrap()), 1.0);
    assert_eq!(bin.len(), 16 + 32 * 32 * 2 * 16);
}

#[test]
fn blowup_exits_with_two_and_records_t_max() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracns(&["solve", "--config", &config("blowup.toml")], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let m = manifest(dir.path());
    assert_eq!(m["monitor"]["verdict"].as_str(), Some("halt"));
    let t_max = m["monitor"]["t_max"].as_float().unwrap();
    assert!(t_max > 0.0 && t_max < 20.0);
}

#[test]
fn invalid_alpha_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &LINEAR.replace("alpha = 0.6", "alpha = 1.5"));
    let out = fracns(&["solve", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{LINEAR}\n[extra]\nx = 1\n"));
    let out = fracns(&["solve", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_specfun_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracns(&["verify", "--suite", "specfun"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("verify specfun:") && stdout.contains("0 failed"));
    assert!(dir.path().join("verify_specfun.csv").exists());
}

#[test]
fn operators_report_has_one_row_per_bound_beta_and_time() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracns(&["verify", "--suite", "operators"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let csv = fs::read_to_string(dir.path().join("bounds.csv")).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    for col in ["bound", "beta", "t"] {
        assert!(header.split(',').any(|h| h == col), "{header}");
    }
    let width = header.split(',').count();
    assert!(lines.all(|l| l.split(',').count() == width));
}

#[test]
fn one_level_ladder_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracns(&["convergence", "--config", &config("linear.toml"), "--ladder", "10"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn linear_convergence_is_flagged_exact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), LINEAR);
    let out = fracns(&["convergence", "--config", cfg.to_str().unwrap(), "--ladder", "5,10,20"], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(&dir.path().join("out"));
    assert_eq!(m["results"]["exact"].as_bool(), Some(true));
}

#[test]
fn delay_convergence_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracns(&["convergence", "--config", &config("delay.toml")], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    // the last row is the reference level itself
    let errors = &column(&csv, "error")[..4];
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
}

#[test]
fn rerun_from_manifest_reproduces_the_csvs() {
    let first = tempfile::tempdir().unwrap();
    let out = fracns(&["solve", "--config", &config("desk.toml"), "--threads", "2"], first.path());
    assert_eq!(out.status.code(), Some(0));
    let files: Vec<_> = fs::read_dir(first.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(files.iter().filter(|f| f.to_str().unwrap().starts_with("manifest")).count(), 1);

    let m = manifest(first.path());
    let echoed = toml::to_string(&m["config"]).unwrap();
    let second = tempfile::tempdir().unwrap();
    let cfg = write_config(second.path(), &echoed);
    let seed = m["run"]["seed"].as_integer().unwrap().to_string();
    let out = fracns(&["solve", "--config", cfg.to_str().unwrap(), "--seed", &seed, "--threads", "2"], &second.path().join("out"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["trajectory.csv", "spectrum_final.csv"] {
        let a = fs::read_to_string(first.path().join(name)).unwrap();
        let b = fs::read_to_string(second.path().join("out").join(name)).unwrap();
        let header = a.lines().next().unwrap().to_string();
        for col in header.split(',') {
            for (x, y) in column(&a, col).iter().zip(column(&b, col)) {
                assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "{name}/{col}: {x} vs {y}");
            }
        }
    }
}
