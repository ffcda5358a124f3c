//! Named reproduction configurations.
//!
//! All presets share d = 500 nm, b0 = 37.5 nm, b1 = 75 nm, z0 = 0, a C60 mass
//! of 1.2e-24 kg and G1 at half the 5 pm Talbot length (z1 = 0.05 m). Field
//! windows cover the grating extent plus a margin unless noted.

use crate::coherence::logspace;
use crate::error::{Error, Result};
use crate::fieldgrid::{linspace, GridSpec};
use crate::physics::{talbot_length, Coherence, GratingSpec, Particle, SourceSpec, Spectrum, ZPlane, C60_MASS};
use crate::scenario::{RegionSelector, Scenario};

pub const PITCH: f64 = 500e-9;
pub const B0: f64 = 37.5e-9;
pub const B1: f64 = 75e-9;
pub const LAMBDA_REF: f64 = 5e-12;

pub const PRESET_NAMES: [&str; 27] = [
    "fig4a", "fig4b", "fig4c", "fig5a", "fig5b", "fig5c", "fig6", "fig7", "fig8a", "fig8b", "fig9", "fig10a", "fig10b",
    "fig10c", "fig11", "fig12", "fig14a", "fig14b", "fig14c", "fig15a", "fig15b", "fig16", "fig17", "fig19a", "fig19b",
    "fig19c", "fig19d",
];

/// A labelled cross-section request.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCase {
    pub label: String,
    pub scenario: Scenario,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PresetKind {
    /// Density carpet on a grid.
    Field {
        scenario: Scenario,
        grid: GridSpec,
        log_scale: bool,
    },
    /// Cross-sections on a common x sampling, with fringe metrics.
    Profiles { cases: Vec<ProfileCase>, xs: Vec<f64> },
    /// Pedestal and visibility at `z0 + zT` against σ_I.
    CoherenceSweep {
        scenario: Scenario,
        sigmas: Vec<f64>,
        samples: usize,
    },
    /// Peak density at `z0 + zT(5 pm)` against wavelength.
    ResonanceScan {
        scenario: Scenario,
        lambdas: Vec<f64>,
        samples: usize,
    },
    /// `p(x, z_b) − p(x, z_a)` for several G1 comb sizes.
    FocusingContrast {
        cases: Vec<(String, Scenario)>,
        z_a: f64,
        z_b: f64,
        xs: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub kind: PresetKind,
}

/// Talbot length at the reference wavelength (0.1 m).
pub fn reference_talbot_length() -> f64 {
    talbot_length(PITCH, LAMBDA_REF).expect("positive constants")
}

fn particle(lambda: f64) -> Particle {
    Particle::from_wavelength(C60_MASS, lambda).expect("positive constants")
}

fn gratings(n0: usize, n1: usize, k1: u32, eta1: f64) -> (GratingSpec, GratingSpec) {
    let z1 = 0.5 * reference_talbot_length();
    (
        GratingSpec::new(n0, PITCH, B0, 0.0).expect("valid G0"),
        GratingSpec::with_comb(n1, PITCH, B1, z1, k1, eta1).expect("valid G1"),
    )
}

fn scenario(n0: usize, n1: usize, lambda: f64, source: SourceSpec) -> Scenario {
    let (g0, g1) = gratings(n0, n1, 1, 1.0);
    Scenario::new(particle(lambda), g0, g1, source).expect("valid preset")
}

fn comb_scenario(n0: usize, n1: usize, k1: u32, eta1: f64) -> Scenario {
    let (g0, g1) = gratings(n0, n1, k1, eta1);
    Scenario::new(
        particle(LAMBDA_REF),
        g0,
        g1,
        SourceSpec::point(0.0, ZPlane::Finite(-0.5)),
    )
    .expect("valid preset")
}

fn point(xs: f64, zs: f64) -> SourceSpec {
    SourceSpec::point(xs, ZPlane::Finite(zs))
}

/// 33 sources on `[-4, 4]` μm in 0.25 μm steps at `z_s = −0.5` m.
pub fn source_line(coherence: Coherence) -> SourceSpec {
    let xs = (0..33).map(|i| (f64::from(i) - 16.0) * 0.25e-6).collect();
    SourceSpec::line(xs, ZPlane::Finite(-0.5), coherence)
}

fn carpet(half_x: f64, z_max: f64, nx: usize, nz: usize) -> GridSpec {
    GridSpec::new(-half_x, half_x, 0.0, z_max, nx, nz).expect("valid grid")
}

fn field(scenario: Scenario, grid: GridSpec) -> PresetKind {
    PresetKind::Field {
        scenario,
        grid,
        log_scale: false,
    }
}

fn behind(mut s: Scenario) -> Scenario {
    s.region = RegionSelector::BehindG1;
    s
}

pub fn preset(name: &str) -> Result<Preset> {
    let zt = reference_talbot_length();
    let (name, description, kind): (&'static str, &'static str, PresetKind) = match name {
        "fig4a" | "fig4b" | "fig4c" => {
            let (n, d, xs) = match name {
                "fig4a" => ("fig4a", "N0=32, N1=33, point source on axis, z_s=-0.5 m", 0.0),
                "fig4b" => ("fig4b", "N0=32, N1=33, point source at x_s=2 um, z_s=-0.5 m", 2e-6),
                _ => ("fig4c", "N0=32, N1=33, point source at x_s=4 um, z_s=-0.5 m", 4e-6),
            };
            (
                n,
                d,
                field(
                    scenario(32, 33, LAMBDA_REF, point(xs, -0.5)),
                    carpet(10e-6, 1.5 * zt, 800, 600),
                ),
            )
        }
        "fig5a" | "fig5b" | "fig5c" => {
            let (n, d, s) = match name {
                "fig5a" => ("fig5a", "33 sources over +-4 um, sigma_I=10 um (400x300 grid)", 10e-6),
                "fig5b" => ("fig5b", "33 sources over +-4 um, sigma_I=1 um (400x300 grid)", 1e-6),
                _ => ("fig5c", "33 sources over +-4 um, sigma_I=0.3 um (400x300 grid)", 0.3e-6),
            };
            let sc = scenario(32, 33, LAMBDA_REF, source_line(Coherence::Gaussian(s)));
            (n, d, field(sc, carpet(10e-6, 1.5 * zt, 400, 300)))
        }
        "fig6" => {
            let cases = [("sigma_I=1um", 1e-6), ("sigma_I=0.1um", 0.1e-6)]
                .into_iter()
                .map(|(label, s)| ProfileCase {
                    label: label.to_string(),
                    scenario: scenario(32, 33, LAMBDA_REF, source_line(Coherence::Gaussian(s))),
                    z: zt,
                })
                .collect();
            (
                "fig6",
                "cross-sections at z=zT for sigma_I=1 um and 0.1 um, 33 sources",
                PresetKind::Profiles {
                    cases,
                    xs: linspace(-10e-6, 10e-6, 2001),
                },
            )
        }
        "fig7" => (
            "fig7",
            "pedestal and visibility at z=zT for 17 log-spaced sigma_I in [1e-2, 1e2] um",
            PresetKind::CoherenceSweep {
                scenario: scenario(32, 33, LAMBDA_REF, source_line(Coherence::Full)),
                sigmas: logspace(1e-8, 1e-4, 17),
                samples: 1601,
            },
        ),
        "fig8a" => (
            "fig8a",
            "N0=32, N1=33, on-axis source close to G0, z_s=-0.5 m, wide window",
            field(
                scenario(32, 33, LAMBDA_REF, point(0.0, -0.5)),
                carpet(30e-6, 5.0 * zt, 800, 600),
            ),
        ),
        "fig8b" => (
            "fig8b",
            "N0=32, N1=33, on-axis source far from G0, z_s=-50 m, wide window",
            field(
                scenario(32, 33, LAMBDA_REF, point(0.0, -50.0)),
                carpet(30e-6, 5.0 * zt, 800, 600),
            ),
        ),
        "fig9" => (
            "fig9",
            "Talbot carpet, N0=64, N1=63, plane-wave illumination",
            field(
                scenario(64, 63, LAMBDA_REF, SourceSpec::point(0.0, ZPlane::MinusInfinity)),
                carpet(18e-6, 1.5 * zt, 800, 600),
            ),
        ),
        "fig10a" | "fig10b" | "fig10c" => {
            let (n, d, l) = match name {
                "fig10a" => ("fig10a", "N0=8, N1=9, plane wave, lambda=3 pm (v ~ 184 m/s)", 3e-12),
                "fig10b" => ("fig10b", "N0=8, N1=9, plane wave, lambda=5 pm (v ~ 110 m/s)", 5e-12),
                _ => ("fig10c", "N0=8, N1=9, plane wave, lambda=7 pm (v ~ 79 m/s)", 7e-12),
            };
            let sc = scenario(8, 9, l, SourceSpec::point(0.0, ZPlane::MinusInfinity));
            (n, d, field(sc, carpet(4e-6, 1.5 * zt, 800, 600)))
        }
        "fig11" => (
            "fig11",
            "peak density at z=zT(5 pm) vs velocity, lambda 2..8 pm step 0.25 pm, N0=8, N1=9",
            PresetKind::ResonanceScan {
                scenario: scenario(8, 9, LAMBDA_REF, SourceSpec::point(0.0, ZPlane::MinusInfinity)),
                lambdas: (0..25).map(|i| (2.0 + 0.25 * f64::from(i)) * 1e-12).collect(),
                samples: 801,
            },
        ),
        "fig12" => {
            let lambdas: Vec<f64> = (0..21).map(|i| (3.0 + 0.25 * f64::from(i)) * 1e-12).collect();
            let src = SourceSpec::point(0.0, ZPlane::MinusInfinity).with_spectrum(Spectrum {
                mean_lambda: LAMBDA_REF,
                sigma_g: 2.25e-12,
                lambdas,
            });
            (
                "fig12",
                "N0=8, N1=9, plane wave, incoherent spectrum 3..8 pm, sigma_g=2.25 pm (400x300 grid)",
                field(scenario(8, 9, LAMBDA_REF, src), carpet(4e-6, 1.5 * zt, 400, 300)),
            )
        }
        "fig14a" | "fig14b" | "fig14c" => {
            let (n, d, k) = match name {
                "fig14a" => ("fig14a", "N0=4, N1=5, hard-edged G1 with K1=1, eta1=1.5", 1),
                "fig14b" => ("fig14b", "N0=4, N1=5, hard-edged G1 with K1=4, eta1=1.5", 4),
                _ => ("fig14c", "N0=4, N1=5, hard-edged G1 with K1=16, eta1=1.5", 16),
            };
            (
                n,
                d,
                field(comb_scenario(4, 5, k, 1.5), carpet(3e-6, 1.5 * zt, 800, 600)),
            )
        }
        "fig15a" | "fig15b" => {
            let (n, d, k) = if name == "fig15a" {
                (
                    "fig15a",
                    "jet behind the central G1 slit, K1=16, eta1=1.5, z in [0.5, 0.6] zT",
                    16,
                )
            } else {
                (
                    "fig15b",
                    "jet behind the central G1 slit, K1=64, eta1=1.5, z in [0.5, 0.6] zT",
                    64,
                )
            };
            let grid = GridSpec::new(-125e-9, 125e-9, 0.5 * zt, 0.6 * zt, 800, 600).expect("valid grid");
            (n, d, field(behind(comb_scenario(4, 5, k, 1.5)), grid))
        }
        "fig16" => {
            let sc = behind(comb_scenario(4, 5, 64, 1.5));
            let cases = [("z=0.5zT", 0.5), ("z=0.513zT", 0.513), ("z=0.55zT", 0.55)]
                .into_iter()
                .map(|(label, f)| ProfileCase {
                    label: label.to_string(),
                    scenario: sc.clone(),
                    z: f * zt,
                })
                .collect();
            (
                "fig16",
                "profiles at z/zT = 0.5, 0.513, 0.55 behind the central slit, K1=64, eta1=1.5",
                PresetKind::Profiles {
                    cases,
                    xs: linspace(-250e-9, 250e-9, 1001),
                },
            )
        }
        "fig17" => {
            let cases = [1u32, 2, 4, 8, 16]
                .into_iter()
                .map(|k| (format!("K1={k}"), comb_scenario(4, 5, k, 1.5)))
                .collect();
            (
                "fig17",
                "p(x, 0.513 zT) - p(x, 0.5 zT) for K1 = 1..16, eta1=1.5",
                PresetKind::FocusingContrast {
                    cases,
                    z_a: 0.5 * zt,
                    z_b: 0.513 * zt,
                    xs: linspace(-75e-9, 75e-9, 601),
                },
            )
        }
        "fig19a" | "fig19b" | "fig19c" | "fig19d" => {
            let (n, d, eta) = match name {
                "fig19a" => ("fig19a", "N0=2, N1=1, K1=7, eta1=0.2, z in [0.5, 0.54] zT", 0.2),
                "fig19b" => ("fig19b", "N0=2, N1=1, K1=7, eta1=0.5, z in [0.5, 0.54] zT", 0.5),
                "fig19c" => ("fig19c", "N0=2, N1=1, K1=7, eta1=0.8, z in [0.5, 0.54] zT", 0.8),
                _ => ("fig19d", "N0=2, N1=1, K1=7, eta1=1.1, z in [0.5, 0.54] zT", 1.1),
            };
            let grid = GridSpec::new(-125e-9, 125e-9, 0.5 * zt, 0.54 * zt, 800, 600).expect("valid grid");
            (n, d, field(behind(comb_scenario(2, 1, 7, eta)), grid))
        }
        other => {
            return Err(Error::domain(format!(
                "unknown preset {other:?}; available: {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(Preset {
        name,
        description,
        kind,
    })
}

/// Every scenario a preset evaluates.
pub fn scenarios(p: &Preset) -> Vec<&Scenario> {
    match &p.kind {
        PresetKind::Field { scenario, .. }
        | PresetKind::CoherenceSweep { scenario, .. }
        | PresetKind::ResonanceScan { scenario, .. } => vec![scenario],
        PresetKind::Profiles { cases, .. } => cases.iter().map(|c| &c.scenario).collect(),
        PresetKind::FocusingContrast { cases, .. } => cases.iter().map(|(_, s)| s).collect(),
    }
}
