//! The four subcommands. Each writes its files under an output directory and a
//! short report to `report`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use tlsim_core::coherence::{coherence_sweep, focusing_contrast, fringe_metrics, resonance_scan};
use tlsim_core::fieldgrid::{evaluate_grid, evaluate_profile, export_field, linspace, ExportFormat, PgmScale};
use tlsim_core::physics::{Coherence, GratingSpec, SourceKind, SourceSpec, ZPlane, C60_MASS};
use tlsim_core::presets::{preset, PresetKind};
use tlsim_core::propagators::{psi_behind, psi_hard_edge, quadrature_oracle, ApertureModel};
use tlsim_core::scenario::hex_digest;
use tlsim_core::{DensityField, Particle, PathContext, Scenario, SourcePoint};

use crate::config::{OutputFormat, OutputSpec, RunConfig, ScanParam};
use crate::error::{CliError, Result};

/// Largest relative error `oracle-check` accepts.
pub const ORACLE_TOLERANCE: f64 = 1e-6;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(io_err(path))
}

fn say(report: &mut dyn Write, text: &str) -> Result<()> {
    report.write_all(text.as_bytes()).map_err(io_err(Path::new("<stdout>")))
}

/// Writes a density field in the requested formats; returns the paths.
pub fn write_field(field: &DensityField, dir: &Path, stem: &str, output: &OutputSpec) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for f in &output.formats {
        let (path, format) = match f {
            OutputFormat::Csv => (dir.join(format!("{stem}.field.csv")), ExportFormat::Csv),
            OutputFormat::Pgm => {
                let scale = if output.log_scale {
                    PgmScale::Log
                } else {
                    PgmScale::Linear
                };
                (dir.join(format!("{stem}.field.pgm")), ExportFormat::Pgm(scale))
            }
            OutputFormat::Meta => (dir.join(format!("{stem}.meta.txt")), ExportFormat::Meta),
        };
        export_field(field, format, &path)?;
        written.push(path);
    }
    Ok(written)
}

fn field_summary(field: &DensityField) -> String {
    let g = &field.grid;
    let e = &field.extrema;
    format!(
        "p_min = {:.6e}\np_max = {:.6e}\nargmax = (x {:.6e} m, z {:.6e} m)\nfingerprint = {}\n",
        e.min,
        e.max,
        g.x(e.argmax.0),
        g.z(e.argmax.1),
        field.fingerprint
    )
}

/// `run`: evaluate the configured grid and export it.
pub fn run(
    cfg: &RunConfig,
    stem: &str,
    dir: &Path,
    threads: Option<usize>,
    report: &mut dyn Write,
) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let field = evaluate_grid(&cfg.scenario, &cfg.grid, threads)?;
    let written = write_field(&field, dir, stem, &cfg.output)?;
    say(report, &field_summary(&field))?;
    Ok(written)
}

fn preset_meta(name: &str, description: &str, scenarios: &[&Scenario], data: &[u8]) -> String {
    let mut s = format!("# preset\nname = {name}\ndescription = {description}\n");
    for (i, sc) in scenarios.iter().enumerate() {
        let _ = writeln!(s, "# scenario {i}");
        s.push_str(&sc.echo());
        let _ = writeln!(s, "fingerprint = {}", sc.fingerprint());
    }
    let _ = writeln!(s, "# result\ndata_sha256 = {}", hex_digest(data));
    s
}

fn columns_csv(header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// `preset`: reproduce one named figure configuration.
pub fn run_preset(name: &str, dir: &Path, threads: Option<usize>, report: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let p = preset(name)?;
    ensure_dir(dir)?;
    say(report, &format!("{}: {}\n", p.name, p.description))?;
    let meta_path = dir.join(format!("{}.meta.txt", p.name));
    match &p.kind {
        PresetKind::Field {
            scenario,
            grid,
            log_scale,
        } => {
            let field = evaluate_grid(scenario, grid, threads)?;
            let output = OutputSpec {
                formats: vec![OutputFormat::Csv, OutputFormat::Pgm, OutputFormat::Meta],
                log_scale: *log_scale,
            };
            let written = write_field(&field, dir, p.name, &output)?;
            say(report, &field_summary(&field))?;
            Ok(written)
        }
        PresetKind::Profiles { cases, xs } => {
            let profiles = cases
                .iter()
                .map(|c| evaluate_profile(&c.scenario, c.z, xs))
                .collect::<tlsim_core::Result<Vec<_>>>()?;
            let mut header = vec!["x_m".to_string()];
            header.extend(cases.iter().map(|c| c.label.clone()));
            let csv = columns_csv(
                &header,
                (0..xs.len()).map(|i| std::iter::once(xs[i]).chain(profiles.iter().map(|p| p.p[i])).collect()),
            );
            let mut text = String::from("case z_m p_min p_max visibility integral\n");
            for (c, pr) in cases.iter().zip(&profiles) {
                let m = fringe_metrics(&pr.p)?;
                let _ = writeln!(
                    text,
                    "{} {:.6e} {:.6e} {:.6e} {:.6} {:.6e}",
                    c.label,
                    c.z,
                    m.p_min,
                    m.p_max,
                    m.visibility,
                    pr.integral()
                );
            }
            say(report, &text)?;
            let scen: Vec<&Scenario> = cases.iter().map(|c| &c.scenario).collect();
            finish_table(
                p.name,
                "profiles",
                &csv,
                &meta_path,
                dir,
                &preset_meta(p.name, p.description, &scen, csv.as_bytes()),
            )
        }
        PresetKind::CoherenceSweep {
            scenario,
            sigmas,
            samples,
        } => {
            let sweep = coherence_sweep(scenario, sigmas, *samples)?;
            let header = ["sigma_I_m", "p_min", "p_max", "visibility"].map(String::from);
            let csv = columns_csv(
                &header,
                sweep.iter().map(|(s, m)| vec![*s, m.p_min, m.p_max, m.visibility]),
            );
            let mut text = String::from("sigma_I_um p_min visibility\n");
            for (s, m) in &sweep {
                let _ = writeln!(text, "{:.4} {:.6e} {:.6}", s * 1e6, m.p_min, m.visibility);
            }
            say(report, &text)?;
            finish_table(
                p.name,
                "sweep",
                &csv,
                &meta_path,
                dir,
                &preset_meta(p.name, p.description, &[scenario], csv.as_bytes()),
            )
        }
        PresetKind::ResonanceScan {
            scenario,
            lambdas,
            samples,
        } => {
            let scan = resonance_scan(scenario, lambdas, *samples)?;
            let header = ["lambda_m", "velocity_m_per_s", "p_max"].map(String::from);
            let csv = columns_csv(&header, scan.iter().map(|r| vec![r.lambda, r.velocity, r.p_max]));
            let mut text = String::from("lambda_pm velocity_m_per_s p_max\n");
            for r in &scan {
                let _ = writeln!(text, "{:.3} {:.2} {:.6e}", r.lambda * 1e12, r.velocity, r.p_max);
            }
            if let Some(best) = scan.iter().max_by(|a, b| a.p_max.total_cmp(&b.p_max)) {
                let _ = writeln!(
                    text,
                    "maximum at {:.2} m/s ({:.3} pm)",
                    best.velocity,
                    best.lambda * 1e12
                );
            }
            say(report, &text)?;
            finish_table(
                p.name,
                "scan",
                &csv,
                &meta_path,
                dir,
                &preset_meta(p.name, p.description, &[scenario], csv.as_bytes()),
            )
        }
        PresetKind::FocusingContrast { cases, z_a, z_b, xs } => {
            let diffs = cases
                .iter()
                .map(|(_, s)| focusing_contrast(s, *z_a, *z_b, xs))
                .collect::<tlsim_core::Result<Vec<_>>>()?;
            let mut header = vec!["x_m".to_string()];
            header.extend(cases.iter().map(|(l, _)| l.clone()));
            let csv = columns_csv(
                &header,
                (0..xs.len()).map(|i| std::iter::once(xs[i]).chain(diffs.iter().map(|d| d.p[i])).collect()),
            );
            let mut text = String::from("case max_dp min_dp\n");
            for ((label, _), d) in cases.iter().zip(&diffs) {
                let max = d.p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let min = d.p.iter().copied().fold(f64::INFINITY, f64::min);
                let _ = writeln!(text, "{label} {max:.6e} {min:.6e}");
            }
            say(report, &text)?;
            let scen: Vec<&Scenario> = cases.iter().map(|(_, s)| s).collect();
            finish_table(
                p.name,
                "contrast",
                &csv,
                &meta_path,
                dir,
                &preset_meta(p.name, p.description, &scen, csv.as_bytes()),
            )
        }
    }
}

fn finish_table(name: &str, kind: &str, csv: &str, meta_path: &Path, dir: &Path, meta: &str) -> Result<Vec<PathBuf>> {
    let path = dir.join(format!("{name}.{kind}.csv"));
    write_text(&path, csv)?;
    write_text(meta_path, meta)?;
    Ok(vec![path, meta_path.to_path_buf()])
}

fn rebuild(base: &Scenario, g1: GratingSpec, source: SourceSpec, particle: Particle) -> Result<Scenario> {
    let mut s = Scenario::new(particle, base.g0, g1, source)?;
    s.region = base.region;
    s.metrics_window = base.metrics_window;
    Ok(s)
}

/// Applies one scan value to the configured scenario.
pub fn scan_scenario(base: &Scenario, param: ScanParam, value: f64) -> Result<Scenario> {
    let g1 = base.g1;
    let mut source = base.source.clone();
    let particle = base.particle;
    match param {
        ScanParam::SigmaI => {
            if source.kind != SourceKind::DistributedLine {
                return Err(CliError::Usage(
                    "sigma_I scans need a line source (several source.xs values)".into(),
                ));
            }
            source.coherence = if value.is_infinite() {
                Coherence::Full
            } else {
                Coherence::Gaussian(value)
            };
            rebuild(base, g1, source, particle)
        }
        ScanParam::Lambda => rebuild(base, g1, source, particle.with_wavelength(value)?),
        ScanParam::K1 => {
            if !(value >= 1.0 && value.fract() == 0.0 && value <= f64::from(u32::MAX)) {
                return Err(CliError::Usage(format!("K1 must be a positive integer, got {value}")));
            }
            let g = GratingSpec::with_comb(g1.n_slits, g1.pitch, g1.half_width, g1.z_pos, value as u32, g1.comb_eta)?;
            rebuild(base, g, source, particle)
        }
        ScanParam::Eta1 => {
            let g = GratingSpec::with_comb(g1.n_slits, g1.pitch, g1.half_width, g1.z_pos, g1.comb_k, value)?;
            rebuild(base, g, source, particle)
        }
        ScanParam::Zs => {
            source.plane = if value == f64::NEG_INFINITY {
                ZPlane::MinusInfinity
            } else {
                ZPlane::Finite(value)
            };
            rebuild(base, g1, source, particle)
        }
        ScanParam::Xs => {
            let mut point = SourceSpec::point(value, source.plane);
            point.spectrum = source.spectrum;
            rebuild(base, g1, point, particle)
        }
    }
}

/// `scan`: one metrics row per value, taken at `cfg.metrics_plane` over the
/// metrics window.
pub fn run_scan(
    cfg: &RunConfig,
    stem: &str,
    param: ScanParam,
    values: &[String],
    dir: &Path,
    threads: Option<usize>,
    report: &mut dyn Write,
) -> Result<Vec<PathBuf>> {
    if values.is_empty() {
        return Err(CliError::Usage("scan needs at least one value".into()));
    }
    let parsed = values
        .iter()
        .map(|v| param.value(v).map_err(|e| CliError::Usage(format!("scan value: {e}"))))
        .collect::<Result<Vec<f64>>>()?;
    ensure_dir(dir)?;
    let mut written = Vec::new();
    let mut rows = Vec::new();
    let mut text = format!("{} p_min p_max visibility argmax_x_m\n", param.name());
    for (i, &v) in parsed.iter().enumerate() {
        let s = scan_scenario(&cfg.scenario, param, v)?;
        let (lo, hi) = s.metrics_window();
        let xs = linspace(lo, hi, cfg.metrics_samples);
        let prof = evaluate_profile(&s, cfg.metrics_plane, &xs)?;
        let m = fringe_metrics(&prof.p)?;
        let imax = (0..xs.len())
            .max_by(|&a, &b| prof.p[a].total_cmp(&prof.p[b]))
            .unwrap_or(0);
        let _ = writeln!(
            text,
            "{} {:.6e} {:.6e} {:.6} {:.6e}",
            values[i], m.p_min, m.p_max, m.visibility, xs[imax]
        );
        rows.push(vec![v, m.p_min, m.p_max, m.visibility, xs[imax]]);
        if cfg.scan.export_fields {
            let field = evaluate_grid(&s, &cfg.grid, threads)?;
            written.extend(write_field(
                &field,
                dir,
                &format!("{stem}.{}-{i}", param.name()),
                &cfg.output,
            )?);
        }
    }
    say(report, &text)?;
    let header = [param.name(), "p_min", "p_max", "visibility", "argmax_x_m"].map(String::from);
    let csv = columns_csv(&header, rows.into_iter());
    let path = dir.join(format!("{stem}.scan.csv"));
    write_text(&path, &csv)?;
    written.push(path);
    let meta = format!(
        "# scenario\n{}fingerprint = {}\nscan.param = {}\nscan.values = {}\nmetrics.z = {:e}\n# result\ndata_sha256 = {}\n",
        cfg.scenario.echo(),
        cfg.scenario.fingerprint(),
        param.name(),
        values.join(", "),
        cfg.metrics_plane,
        hex_digest(csv.as_bytes())
    );
    let meta_path = dir.join(format!("{stem}.meta.txt"));
    write_text(&meta_path, &meta)?;
    written.push(meta_path);
    Ok(written)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub fuzzy_cases: usize,
    pub comb_cases: usize,
    pub max_fuzzy: f64,
    pub max_comb: f64,
}

fn random_case(rng: &mut StdRng, k1: u32, eta1: f64) -> Result<(PathContext, f64, f64)> {
    let lambda = rng.random_range(3.0..8.0) * 1e-12;
    let b0 = rng.random_range(20.0..100.0) * 1e-9;
    let b1 = rng.random_range(20.0..100.0) * 1e-9;
    let zs = -rng.random_range(0.2..1.0);
    let z1 = rng.random_range(0.02..0.1);
    let z = z1 + rng.random_range(0.005..0.1);
    let xs = rng.random_range(-4.0..4.0) * 1e-6;
    let x0 = rng.random_range(-2.0..2.0) * 1e-6;
    let x1 = x0 + rng.random_range(-1.0..1.0) * 1e-6;
    // stay inside the lit cone so the amplitude is well above roundoff
    let ray = x1 + (x1 - x0) * (z - z1) / z1;
    let x = ray + rng.random_range(-1.0..1.0) * (lambda * z / (std::f64::consts::PI * b1) + b1);
    let ctx = PathContext {
        particle: Particle::from_wavelength(C60_MASS, lambda)?,
        g0: GratingSpec::new(1, 500e-9, b0, 0.0)?,
        g1: GratingSpec::with_comb(1, 500e-9, b1, z1, k1, eta1)?,
        source: SourcePoint::finite(xs, zs),
        x0,
        x1: Some(x1),
    };
    Ok((ctx, x, z))
}

/// `oracle-check`: closed forms against brute-force quadrature on random
/// single paths. `cases` fuzzy paths plus `cases / 2` comb paths.
pub fn oracle_check(cases: usize, seed: u64, report: &mut dyn Write) -> Result<OracleReport> {
    if cases == 0 {
        return Err(CliError::Usage("--cases must be at least 1".into()));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let mut max_fuzzy: f64 = 0.0;
    for _ in 0..cases {
        let (ctx, x, z) = random_case(&mut rng, 1, 1.0)?;
        let c = psi_behind(&ctx, x, z)?;
        let o = quadrature_oracle(&ctx, x, z, ApertureModel::Fuzzy)?;
        max_fuzzy = max_fuzzy.max((c - o).norm() / o.norm());
    }
    let comb_cases = (cases / 2).max(1);
    let mut max_comb: f64 = 0.0;
    for i in 0..comb_cases {
        let k = if i % 2 == 0 { 2 } else { 4 };
        let eta = rng.random_range(0.5..1.5);
        let (ctx, x, z) = random_case(&mut rng, k, eta)?;
        let c = psi_hard_edge(&ctx, x, z)?;
        let o = quadrature_oracle(&ctx, x, z, ApertureModel::Comb)?;
        max_comb = max_comb.max((c - o).norm() / o.norm());
    }
    say(
        report,
        &format!(
            "fuzzy slits: {cases} cases, max relative error {max_fuzzy:.3e}\n\
             comb slits (K1 = 2, 4): {comb_cases} cases, max relative error {max_comb:.3e}\n"
        ),
    )?;
    let r = OracleReport {
        fuzzy_cases: cases,
        comb_cases,
        max_fuzzy,
        max_comb,
    };
    if max_fuzzy >= ORACLE_TOLERANCE || max_comb >= ORACLE_TOLERANCE {
        return Err(CliError::CheckFailed(format!(
            "oracle mismatch above {ORACLE_TOLERANCE:e}: fuzzy {max_fuzzy:.3e}, comb {max_comb:.3e}"
        )));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn small_cfg(extra: &str) -> RunConfig {
        parse_config(&format!(
            "particle.lambda = 5pm\ngrating0.n = 4\ngrating1.n = 5\ngrid.x_min = -2um\ngrid.x_max = 2um\n\
             grid.z_min = 0.01\ngrid.z_max = 0.12\ngrid.nx = 21\ngrid.nz = 11\nmetrics.samples = 201\n{extra}"
        ))
        .unwrap()
    }

    #[test]
    fn run_writes_three_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = Vec::new();
        let files = run(&small_cfg(""), "demo", dir.path(), Some(1), &mut out).unwrap();
        let names: Vec<String> = files
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(names, ["demo.field.csv", "demo.field.pgm", "demo.meta.txt"]);
        assert!(String::from_utf8(out).unwrap().contains("fingerprint = "));
    }

    #[test]
    fn lambda_scan_peaks_at_5pm() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_cfg("source.zs = -inf\n");
        let values: Vec<String> = ["3pm", "5pm", "7pm"].map(String::from).to_vec();
        let mut out = Vec::new();
        run_scan(&cfg, "s", ScanParam::Lambda, &values, dir.path(), None, &mut out).unwrap();
        let csv = fs::read_to_string(dir.path().join("s.scan.csv")).unwrap();
        let pmax: Vec<f64> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
            .collect();
        assert!(pmax[1] > pmax[0] && pmax[1] > pmax[2], "{pmax:?}");
    }

    #[test]
    fn sigma_scan_needs_line_source() {
        let cfg = small_cfg("");
        assert!(matches!(
            scan_scenario(&cfg.scenario, ScanParam::SigmaI, 1e-6),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn empty_scan_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = run_scan(
            &small_cfg(""),
            "s",
            ScanParam::Xs,
            &[],
            dir.path(),
            None,
            &mut Vec::new(),
        )
        .unwrap_err();
        assert!(err.to_string().contains("at least one value"));
    }

    #[test]
    fn k1_scan_switches_to_comb() {
        let cfg = small_cfg("");
        let s = scan_scenario(&cfg.scenario, ScanParam::K1, 4.0).unwrap();
        assert_eq!(s.g1.comb_k, 4);
        assert!(scan_scenario(&cfg.scenario, ScanParam::K1, 2.5).is_err());
    }

    #[test]
    fn oracle_check_passes_small_run() {
        let r = oracle_check(3, 1, &mut Vec::new()).unwrap();
        assert!(r.max_fuzzy < ORACLE_TOLERANCE && r.max_comb < ORACLE_TOLERANCE);
        assert_eq!(r.comb_cases, 1);
    }
}
