use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tlsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tlsim"))
        .args(args)
        .env_remove("TLSIM_THREADS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = "\
# small carpet
particle.lambda = 5pm
grating0.n = 4
grating1.n = 5
grid.x_min = -2um
grid.x_max = 2um
grid.z_min = 0.01
grid.z_max = 0.12
grid.nx = 41
grid.nz = 21
";

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn help_lists_keys_with_defaults() {
    let o = tlsim(&["--help"]);
    assert!(o.status.success());
    let h = stdout(&o);
    for key in [
        "particle.lambda",
        "grating1.pitch",
        "source.zs",
        "grid.nx",
        "output.formats",
        "scan.param",
    ] {
        assert!(h.contains(key), "{key}");
    }
    assert!(h.contains("500nm") && h.contains("800"));
    assert!(h.contains("fig19d"));
}

#[test]
fn run_writes_named_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.cfg", SMALL);
    let out = dir.path().join("out");
    let o = tlsim(&[
        "run",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--threads",
        "2",
        "--log-scale",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["small.field.csv", "small.field.pgm", "small.meta.txt"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let pgm = fs::read(out.join("small.field.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n41 21\n65535\n"));
    assert_eq!(pgm.len(), b"P5\n41 21\n65535\n".len() + 41 * 21 * 2);
}

#[test]
fn runs_are_bit_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.cfg", SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(
        tlsim(&["run", "--config", &cfg, "--out", a.to_str().unwrap(), "--threads", "1"])
            .status
            .success()
    );
    let o = Command::new(env!("CARGO_BIN_EXE_tlsim"))
        .args(["run", "--config", &cfg, "--out", b.to_str().unwrap()])
        .env("TLSIM_THREADS", "3")
        .output()
        .unwrap();
    assert!(o.status.success());
    for f in ["small.field.csv", "small.field.pgm", "small.meta.txt"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn bad_config_reports_every_problem_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", "grating0.n = 4\nsource.zs = 0.1\nnope = 1\n");
    let o = tlsim(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert!(!o.status.success());
    let e = stderr(&o);
    assert!(e.contains("particle.lambda"), "{e}");
    assert!(e.contains("line 3: unknown key"), "{e}");

    let cfg = write_config(dir.path(), "zs.cfg", "particle.lambda = 5pm\nsource.zs = 0.1\n");
    let o = tlsim(&["run", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("source must precede grating G0"));
}

#[test]
fn unknown_preset_lists_names() {
    let dir = tempfile::tempdir().unwrap();
    let o = tlsim(&["preset", "fig99", "--out", dir.path().to_str().unwrap()]);
    assert!(!o.status.success());
    let e = stderr(&o);
    assert!(e.contains("fig4a") && e.contains("fig17"), "{e}");
}

#[test]
fn preset_fig11_reports_peak_velocity() {
    let dir = tempfile::tempdir().unwrap();
    let o = tlsim(&["preset", "fig11", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    let line = s.lines().find(|l| l.starts_with("maximum at")).unwrap();
    let v: f64 = line.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((v - 110.0).abs() < 5.0, "{line}");
    assert!(dir.path().join("fig11.scan.csv").exists());
    assert!(dir.path().join("fig11.meta.txt").exists());
}

#[test]
fn preset_fig7_table_spans_the_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let o = tlsim(&["preset", "fig7", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("fig7.sweep.csv")).unwrap();
    let sigmas: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert!((sigmas[0] - 1e-8).abs() < 1e-20);
    assert!((sigmas.last().unwrap() - 1e-4).abs() < 1e-16);
}

#[test]
fn preset_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(tlsim(&["preset", "fig16", "--out", a.to_str().unwrap()])
        .status
        .success());
    assert!(tlsim(&["preset", "fig16", "--out", b.to_str().unwrap()])
        .status
        .success());
    assert_eq!(
        fs::read(a.join("fig16.meta.txt")).unwrap(),
        fs::read(b.join("fig16.meta.txt")).unwrap()
    );
}

#[test]
fn sigma_scan_visibility_ascends() {
    let dir = tempfile::tempdir().unwrap();
    let text = "particle.lambda = 5pm\nsource.xs = -4um,-3um,-2um,-1um,0,1um,2um,3um,4um\n";
    let cfg = write_config(dir.path(), "line.cfg", text);
    let o = tlsim(&[
        "scan",
        "--config",
        &cfg,
        "--param",
        "sigma_I",
        "--values",
        "0.1um,1um,10um",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("line.scan.csv")).unwrap();
    let v: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(v.len(), 3);
    assert!(v[0] < v[1] && v[1] < v[2], "{v:?}");
}

#[test]
fn scan_rejects_unknown_parameter_and_empty_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.cfg", SMALL);
    let d = dir.path().to_str().unwrap();
    let o = tlsim(&[
        "scan", "--config", &cfg, "--param", "pitch", "--values", "1", "--out", d,
    ]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("cannot be scanned"));
    let o = tlsim(&["scan", "--config", &cfg, "--param", "xs", "--values", "", "--out", d]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("at least one value"));
}

#[test]
fn oracle_check_reports_error() {
    let o = tlsim(&["oracle-check", "--cases", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("max relative error"));
}
