//! Flat `section.key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Lengths accept the
//! suffixes `pm`, `nm`, `um`, `μm`, `mm` and `m`; a bare number is in metres.
//! Lists are comma separated.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use tlsim_core::fieldgrid::GridSpec;
use tlsim_core::physics::{Coherence, GratingSpec, Particle, SourceSpec, Spectrum, ZPlane};
use tlsim_core::{RegionSelector, Scenario};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Length,
    Mass,
    Count,
    Number,
    Flag,
    Word,
}

impl Unit {
    fn label(self) -> &'static str {
        match self {
            Unit::Length => "m",
            Unit::Mass => "kg",
            Unit::Count => "integer",
            Unit::Number => "dimensionless",
            Unit::Flag => "true|false",
            Unit::Word => "keyword",
        }
    }
}

pub struct KeySpec {
    pub key: &'static str,
    /// `None` for required keys and for keys whose default is derived.
    pub default: Option<&'static str>,
    pub unit: Unit,
    pub list: bool,
    pub help: &'static str,
}

const fn key(key: &'static str, default: Option<&'static str>, unit: Unit, help: &'static str) -> KeySpec {
    KeySpec {
        key,
        default,
        unit,
        list: false,
        help,
    }
}

const fn list(key: &'static str, default: Option<&'static str>, unit: Unit, help: &'static str) -> KeySpec {
    KeySpec {
        key,
        default,
        unit,
        list: true,
        help,
    }
}

pub const KEYS: &[KeySpec] = &[
    key(
        "particle.mass",
        Some("1.2e-24"),
        Unit::Mass,
        "particle mass (C60 by default)",
    ),
    key("particle.lambda", None, Unit::Length, "de Broglie wavelength, required"),
    key("grating0.n", Some("32"), Unit::Count, "slit count of G0"),
    key("grating0.pitch", Some("500nm"), Unit::Length, "slit period of G0"),
    key(
        "grating0.b",
        Some("37.5nm"),
        Unit::Length,
        "Gaussian slit half-width of G0",
    ),
    key("grating0.z", Some("0"), Unit::Length, "position of G0"),
    key("grating1.n", Some("33"), Unit::Count, "slit count of G1"),
    key("grating1.pitch", Some("500nm"), Unit::Length, "slit period of G1"),
    key("grating1.b", Some("75nm"), Unit::Length, "slit half-width of G1"),
    key("grating1.z", Some("0.05"), Unit::Length, "position of G1"),
    key(
        "grating1.k",
        Some("1"),
        Unit::Count,
        "Gaussian comb terms per G1 slit; 1 with eta 1 is the fuzzy slit",
    ),
    key("grating1.eta", Some("1"), Unit::Number, "comb term width factor"),
    list(
        "source.xs",
        Some("0"),
        Unit::Length,
        "source x positions; more than one makes a line source",
    ),
    key(
        "source.zs",
        Some("-0.5"),
        Unit::Length,
        "source plane; -inf for plane-wave illumination",
    ),
    key(
        "source.sigma",
        Some("inf"),
        Unit::Length,
        "coherence width of a line source; inf is fully coherent",
    ),
    list(
        "spectrum.lambdas",
        None,
        Unit::Length,
        "wavelength grid for spectral averaging; unset is monochromatic",
    ),
    key(
        "spectrum.mean",
        None,
        Unit::Length,
        "mean wavelength; defaults to particle.lambda",
    ),
    key(
        "spectrum.sigma",
        Some("2.25pm"),
        Unit::Length,
        "Gaussian wavelength spread",
    ),
    key("grid.x_min", Some("-10um"), Unit::Length, "left edge of the field grid"),
    key("grid.x_max", Some("10um"), Unit::Length, "right edge of the field grid"),
    key("grid.z_min", Some("0"), Unit::Length, "first grid row"),
    key("grid.z_max", Some("0.15"), Unit::Length, "last grid row"),
    key("grid.nx", Some("800"), Unit::Count, "samples along x"),
    key("grid.nz", Some("600"), Unit::Count, "samples along z"),
    key("grid.region", Some("auto"), Unit::Word, "auto | between | behind"),
    key(
        "metrics.x_min",
        None,
        Unit::Length,
        "fringe metrics window; defaults to G1's slit span plus b1",
    ),
    key(
        "metrics.x_max",
        None,
        Unit::Length,
        "fringe metrics window; defaults to G1's slit span plus b1",
    ),
    key(
        "metrics.z",
        None,
        Unit::Length,
        "plane for scan metrics; defaults to z0 + zT",
    ),
    key(
        "metrics.samples",
        Some("801"),
        Unit::Count,
        "samples across the metrics window",
    ),
    list(
        "output.formats",
        Some("csv,pgm,meta"),
        Unit::Word,
        "any of csv, pgm, meta",
    ),
    key(
        "output.log_scale",
        Some("false"),
        Unit::Flag,
        "log-scaled PGM (four decades)",
    ),
    key("scan.param", None, Unit::Word, "sigma_I | lambda | K1 | eta1 | zs | xs"),
    list(
        "scan.values",
        None,
        Unit::Number,
        "scan values, units as for the scanned key",
    ),
    key(
        "scan.export_fields",
        Some("false"),
        Unit::Flag,
        "also write a field grid per scan value",
    ),
];

/// `--help` text listing every key with its default and unit.
pub fn keys_help() -> String {
    let mut s = String::from("Configuration keys (section.key = value):\n");
    for k in KEYS {
        let default = match (k.default, k.key) {
            (Some(d), _) => d,
            (None, "particle.lambda") => "required",
            (None, _) => "derived",
        };
        let unit = if k.list {
            format!("list of {}", k.unit.label())
        } else {
            k.unit.label().to_string()
        };
        let _ = writeln!(s, "  {:<20} default {:<14} [{}]  {}", k.key, default, unit, k.help);
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Pgm,
    Meta,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub formats: Vec<OutputFormat>,
    pub log_scale: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanParam {
    SigmaI,
    Lambda,
    K1,
    Eta1,
    Zs,
    Xs,
}

impl ScanParam {
    pub const NAMES: [&'static str; 6] = ["sigma_I", "lambda", "K1", "eta1", "zs", "xs"];

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "sigma_I" => ScanParam::SigmaI,
            "lambda" => ScanParam::Lambda,
            "K1" => ScanParam::K1,
            "eta1" => ScanParam::Eta1,
            "zs" => ScanParam::Zs,
            "xs" => ScanParam::Xs,
            _ => {
                return Err(CliError::Usage(format!(
                    "parameter {name:?} cannot be scanned; choose one of {}",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(self) -> &'static str {
        Self::NAMES[self as usize]
    }

    /// Parses a scan value; lengths take unit suffixes.
    pub fn value(self, text: &str) -> std::result::Result<f64, String> {
        match self {
            ScanParam::K1 | ScanParam::Eta1 => parse_number(text),
            _ => parse_length(text),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub param: Option<ScanParam>,
    pub values: Vec<String>,
    pub export_fields: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub grid: GridSpec,
    pub metrics_plane: f64,
    pub metrics_samples: usize,
    pub output: OutputSpec,
    pub scan: ScanSpec,
}

fn parse_number(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim();
    let v = match t {
        "inf" | "+inf" => f64::INFINITY,
        "-inf" => f64::NEG_INFINITY,
        _ => t.parse::<f64>().map_err(|_| format!("malformed number {t:?}"))?,
    };
    if v.is_nan() {
        return Err(format!("malformed number {t:?}"));
    }
    Ok(v)
}

/// Parses a length with an optional unit suffix into metres.
pub fn parse_length(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim();
    // divisors are exact, so "500nm" gives the double nearest 5e-7
    const SUFFIXES: [(&str, f64); 6] = [
        ("pm", 1e12),
        ("nm", 1e9),
        ("μm", 1e6),
        ("um", 1e6),
        ("mm", 1e3),
        ("m", 1.0),
    ];
    for (suffix, div) in SUFFIXES {
        if let Some(num) = t.strip_suffix(suffix) {
            return parse_number(num)
                .map(|v| v / div)
                .map_err(|_| format!("malformed length {t:?}"));
        }
    }
    parse_number(t).map_err(|_| format!("malformed length {t:?}"))
}

fn parse_count(text: &str) -> std::result::Result<usize, String> {
    text.trim()
        .parse::<usize>()
        .map_err(|_| format!("expected a non-negative integer, got {:?}", text.trim()))
}

fn parse_flag(text: &str) -> std::result::Result<bool, String> {
    match text.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        t => Err(format!("expected true or false, got {t:?}")),
    }
}

struct Entry {
    value: String,
    line: Option<usize>,
}

/// Collects per-key values and problems while building a [`RunConfig`].
struct Reader {
    entries: BTreeMap<&'static str, Entry>,
    problems: Vec<String>,
}

impl Reader {
    fn where_(&self, key: &str) -> String {
        match self.entries.get(key).and_then(|e| e.line) {
            Some(n) => format!("line {n}: "),
            None => String::new(),
        }
    }

    fn problem(&mut self, key: &str, msg: impl std::fmt::Display) {
        let at = self.where_(key);
        self.problems.push(format!("{at}{key}: {msg}"));
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn get<T>(&mut self, key: &str, parse: impl Fn(&str) -> std::result::Result<T, String>) -> Option<T> {
        let raw = self.raw(key)?.to_string();
        match parse(&raw) {
            Ok(v) => Some(v),
            Err(e) => {
                self.problem(key, e);
                None
            }
        }
    }

    fn get_list<T>(&mut self, key: &str, parse: impl Fn(&str) -> std::result::Result<T, String>) -> Option<Vec<T>> {
        let raw = self.raw(key)?.to_string();
        let mut out = Vec::new();
        let mut ok = true;
        for item in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match parse(item) {
                Ok(v) => out.push(v),
                Err(e) => {
                    self.problem(key, e);
                    ok = false;
                }
            }
        }
        ok.then_some(out)
    }
}

/// Parses and validates a configuration. Every problem found is reported,
/// each with its line number where one applies.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut r = Reader {
        entries: KEYS
            .iter()
            .filter_map(|k| {
                k.default.map(|d| {
                    (
                        k.key,
                        Entry {
                            value: d.to_string(),
                            line: None,
                        },
                    )
                })
            })
            .collect(),
        problems: Vec::new(),
    };

    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            r.problems.push(format!("line {n}: expected `section.key = value`"));
            continue;
        };
        let (k, v) = (k.trim(), v.trim());
        match KEYS.iter().find(|s| s.key == k) {
            None => r.problems.push(format!("line {n}: unknown key {k:?}")),
            Some(spec) => {
                if r.entries.get(spec.key).is_some_and(|e| e.line.is_some()) {
                    r.problems.push(format!("line {n}: {k} given more than once"));
                }
                r.entries.insert(
                    spec.key,
                    Entry {
                        value: v.to_string(),
                        line: Some(n),
                    },
                );
            }
        }
    }

    let cfg = build(&mut r);
    match cfg {
        Some(c) if r.problems.is_empty() => Ok(c),
        _ => Err(CliError::Config(r.problems)),
    }
}

fn build(r: &mut Reader) -> Option<RunConfig> {
    let mass = r.get("particle.mass", parse_number);
    let lambda = if r.raw("particle.lambda").is_none() {
        r.problems.push("particle.lambda: required key is missing".to_string());
        None
    } else {
        r.get("particle.lambda", parse_length)
    };

    let g0 = (
        r.get("grating0.n", parse_count),
        r.get("grating0.pitch", parse_length),
        r.get("grating0.b", parse_length),
        r.get("grating0.z", parse_length),
    );
    let g1 = (
        r.get("grating1.n", parse_count),
        r.get("grating1.pitch", parse_length),
        r.get("grating1.b", parse_length),
        r.get("grating1.z", parse_length),
        r.get("grating1.k", parse_count),
        r.get("grating1.eta", parse_number),
    );
    let xs = r.get_list("source.xs", parse_length);
    let zs = r.get("source.zs", parse_length);
    let sigma = r.get("source.sigma", parse_length);
    let lambdas = r.get_list("spectrum.lambdas", parse_length);
    let mean = r.get("spectrum.mean", parse_length);
    let sigma_g = r.get("spectrum.sigma", parse_length);
    let grid = (
        r.get("grid.x_min", parse_length),
        r.get("grid.x_max", parse_length),
        r.get("grid.z_min", parse_length),
        r.get("grid.z_max", parse_length),
        r.get("grid.nx", parse_count),
        r.get("grid.nz", parse_count),
    );
    let region = r.get("grid.region", |s| match s {
        "auto" => Ok(RegionSelector::Auto),
        "between" => Ok(RegionSelector::BetweenGratings),
        "behind" => Ok(RegionSelector::BehindG1),
        _ => Err(format!("expected auto, between or behind, got {s:?}")),
    });
    let mx = (
        r.get("metrics.x_min", parse_length),
        r.get("metrics.x_max", parse_length),
    );
    let mz = r.get("metrics.z", parse_length);
    let samples = r.get("metrics.samples", parse_count);
    let formats = r.get_list("output.formats", |s| match s {
        "csv" => Ok(OutputFormat::Csv),
        "pgm" => Ok(OutputFormat::Pgm),
        "meta" => Ok(OutputFormat::Meta),
        _ => Err(format!("unknown output format {s:?}")),
    });
    let log_scale = r.get("output.log_scale", parse_flag);
    let param = r.get("scan.param", |s| ScanParam::parse(s).map_err(|e| e.to_string()));
    let scan_values: Vec<String> = r
        .raw("scan.values")
        .map(|v| {
            v.split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect()
        })
        .unwrap_or_default();
    let export_fields = r.get("scan.export_fields", parse_flag);

    if r.raw("metrics.x_min").is_some() != r.raw("metrics.x_max").is_some() {
        r.problems
            .push("metrics.x_min and metrics.x_max must be given together".to_string());
    }
    if samples.is_some_and(|n| n < 2) {
        r.problem("metrics.samples", "needs at least 2 samples");
    }

    let particle = match Particle::from_wavelength(mass?, lambda?) {
        Ok(p) => p,
        Err(e) => {
            r.problem("particle.lambda", e);
            return None;
        }
    };
    let g0 = match GratingSpec::new(g0.0?, g0.1?, g0.2?, g0.3?) {
        Ok(g) => g,
        Err(e) => {
            r.problem("grating0.b", e);
            return None;
        }
    };
    let g1 = match GratingSpec::with_comb(
        g1.0?,
        g1.1?,
        g1.2?,
        g1.3?,
        u32::try_from(g1.4?).unwrap_or(u32::MAX),
        g1.5?,
    ) {
        Ok(g) => g,
        Err(e) => {
            r.problem("grating1.b", e);
            return None;
        }
    };

    let zs = zs?;
    let plane = if zs == f64::NEG_INFINITY {
        ZPlane::MinusInfinity
    } else {
        ZPlane::Finite(zs)
    };
    let xs = xs?;
    let sigma = sigma?;
    let mut source = if xs.len() == 1 {
        if sigma.is_finite() {
            r.problem("source.sigma", "a coherence width needs more than one source position");
        }
        SourceSpec::point(xs[0], plane)
    } else {
        let coherence = if sigma.is_infinite() {
            Coherence::Full
        } else {
            Coherence::Gaussian(sigma)
        };
        SourceSpec::line(xs, plane, coherence)
    };
    if r.raw("spectrum.lambdas").is_some() {
        source = source.with_spectrum(Spectrum {
            mean_lambda: mean.unwrap_or(particle.lambda()),
            sigma_g: sigma_g?,
            lambdas: lambdas?,
        });
    }

    let mut scenario = match Scenario::new(particle, g0, g1, source) {
        Ok(s) => s,
        Err(e) => {
            let key = if e.to_string().contains("source must precede") {
                "source.zs"
            } else {
                "grating1.z"
            };
            r.problem(key, e);
            return None;
        }
    };
    scenario.region = region?;
    if let (Some(lo), Some(hi)) = mx {
        if lo >= hi {
            r.problem("metrics.x_max", "metrics window needs x_min < x_max");
        }
        scenario.metrics_window = Some((lo, hi));
    }

    let grid = match GridSpec::new(grid.0?, grid.1?, grid.2?, grid.3?, grid.4?, grid.5?) {
        Ok(g) => g,
        Err(e) => {
            r.problem("grid.nx", e);
            return None;
        }
    };
    let metrics_plane = mz.unwrap_or_else(|| scenario.g0.z_pos + scenario.talbot_length());

    Some(RunConfig {
        scenario,
        grid,
        metrics_plane,
        metrics_samples: samples?,
        output: OutputSpec {
            formats: formats?,
            log_scale: log_scale?,
        },
        scan: ScanSpec {
            param,
            values: scan_values,
            export_fields: export_fields?,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problems(text: &str) -> Vec<String> {
        match parse_config(text) {
            Err(CliError::Config(p)) => p,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn unit_suffixes() {
        assert_eq!(parse_length("500nm").unwrap(), 5e-7);
        assert_eq!(parse_length("5pm").unwrap(), 5e-12);
        assert_eq!(parse_length("2um").unwrap(), 2e-6);
        assert_eq!(parse_length("2μm").unwrap(), 2e-6);
        assert_eq!(parse_length("3mm").unwrap(), 3e-3);
        assert_eq!(parse_length("-0.5m").unwrap(), -0.5);
        assert_eq!(parse_length("0.05").unwrap(), 0.05);
        assert_eq!(parse_length("-inf").unwrap(), f64::NEG_INFINITY);
        assert!(parse_length("5 furlongs").is_err());
    }

    #[test]
    fn pitch_in_nanometres() {
        let c = parse_config("particle.lambda = 5pm\ngrating1.pitch = 500nm\n").unwrap();
        assert_eq!(c.scenario.g1.pitch, 5e-7);
    }

    #[test]
    fn defaults_apply() {
        let c = parse_config("particle.lambda = 5pm").unwrap();
        let s = &c.scenario;
        assert_eq!(s.particle.mass(), 1.2e-24);
        assert_eq!((s.g0.n_slits, s.g1.n_slits), (32, 33));
        assert_eq!((s.g0.half_width, s.g1.half_width), (37.5e-9, 75e-9));
        assert_eq!(s.g1.z_pos, 0.05);
        assert_eq!(s.source.plane, ZPlane::Finite(-0.5));
        assert_eq!((c.grid.nx, c.grid.nz), (800, 600));
        assert_eq!((c.grid.x_min, c.grid.x_max), (-10e-6, 10e-6));
        assert_eq!(
            c.output.formats,
            vec![OutputFormat::Csv, OutputFormat::Pgm, OutputFormat::Meta]
        );
    }

    #[test]
    fn missing_lambda_names_the_key() {
        let p = problems("grating0.n = 8\n");
        assert!(p.iter().any(|m| m.contains("particle.lambda")), "{p:?}");
    }

    #[test]
    fn source_after_g0_is_rejected() {
        let p = problems("particle.lambda = 5pm\nsource.zs = 0.1\n");
        assert!(
            p.iter()
                .any(|m| m.contains("source must precede grating G0") && m.starts_with("line 2")),
            "{p:?}"
        );
    }

    #[test]
    fn all_problems_are_reported_with_lines() {
        let p = problems("particle.lambda = 5pm\nbogus.key = 1\ngrid.nx = many\nno equals sign\n");
        assert_eq!(p.len(), 3, "{p:?}");
        assert!(p[0].starts_with("line 2"));
        assert!(p[1].starts_with("line 4"));
        assert!(p[2].starts_with("line 3: grid.nx"));
    }

    #[test]
    fn line_source_and_spectrum() {
        let c = parse_config(
            "particle.lambda = 5pm\nsource.xs = -1um, 0, 1um\nsource.sigma = 1um\nspectrum.lambdas = 4pm,5pm,6pm\n",
        )
        .unwrap();
        assert_eq!(c.scenario.source.x_positions, vec![-1e-6, 0.0, 1e-6]);
        assert_eq!(c.scenario.source.coherence, Coherence::Gaussian(1e-6));
        let sp = c.scenario.source.spectrum.as_ref().unwrap();
        assert_eq!(sp.lambdas.len(), 3);
        assert_eq!(sp.mean_lambda, 5e-12);
    }

    #[test]
    fn paraxial_source() {
        let c = parse_config("particle.lambda = 5pm\nsource.zs = -inf\n").unwrap();
        assert!(c.scenario.source.plane.is_infinite());
    }

    #[test]
    fn help_lists_every_key() {
        let h = keys_help();
        for k in KEYS {
            assert!(h.contains(k.key), "{}", k.key);
        }
        assert!(h.contains("500nm"));
    }

    #[test]
    fn scan_param_whitelist() {
        for n in ScanParam::NAMES {
            assert_eq!(ScanParam::parse(n).unwrap().name(), n);
        }
        assert!(ScanParam::parse("pitch").is_err());
    }
}
