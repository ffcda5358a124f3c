//! A complete simulation input and its canonical text echo.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::physics::{talbot_length, Coherence, GratingSpec, Particle, SourceKind, SourceSpec, ZPlane};
use crate::propagators::SourcePoint;
use crate::superposition::{FieldRequest, PropagatorKind};

/// Which formula a grid row uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionSelector {
    /// Between-gratings form for `z ≤ z1`, behind-G1 form for `z > z1`.
    Auto,
    /// Every row uses the between-gratings form; rows must satisfy `z ≤ z1`.
    BetweenGratings,
    /// Every row uses the behind-G1 form; rows must satisfy `z ≥ z1`.
    /// The `z = z1` row is then the G1-masked field.
    BehindG1,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub particle: Particle,
    pub g0: GratingSpec,
    pub g1: GratingSpec,
    pub source: SourceSpec,
    pub propagator: PropagatorKind,
    pub region: RegionSelector,
    /// x-window for fringe metrics; `None` means the extent of G1's slits.
    pub metrics_window: Option<(f64, f64)>,
}

impl Scenario {
    /// Builds a scenario, picking the propagator from the source plane and the
    /// G1 slit model.
    pub fn new(particle: Particle, g0: GratingSpec, g1: GratingSpec, source: SourceSpec) -> Result<Self> {
        let propagator = if !g1.is_fuzzy() {
            PropagatorKind::HardEdge
        } else if source.plane.is_infinite() {
            PropagatorKind::Paraxial
        } else {
            PropagatorKind::Standard
        };
        let s = Scenario {
            particle,
            g0,
            g1,
            source,
            propagator,
            region: RegionSelector::Auto,
            metrics_window: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.source.validate(self.g0.z_pos)?;
        if let Some((a, b)) = self.metrics_window {
            if !(a < b) {
                return Err(Error::domain(format!(
                    "metrics window must satisfy min < max, got {a} .. {b}"
                )));
            }
        }
        // one request per source validates the grating/propagator pairing
        self.request(self.source.x_positions[0], &self.particle)?;
        Ok(())
    }

    pub fn request(&self, x_s: f64, particle: &Particle) -> Result<FieldRequest> {
        FieldRequest::new(
            *particle,
            self.g0,
            self.g1,
            SourcePoint {
                x: x_s,
                plane: self.source.plane,
            },
            self.propagator,
        )
    }

    /// Talbot length of G0 at the scenario's (mean) wavelength.
    pub fn talbot_length(&self) -> f64 {
        talbot_length(self.g0.pitch, self.particle.lambda()).expect("validated pitch and wavelength")
    }

    pub fn metrics_window(&self) -> (f64, f64) {
        self.metrics_window.unwrap_or_else(|| {
            let h = self.g1.half_span() + self.g1.half_width;
            (-h, h)
        })
    }

    /// True when the source set is mirror-symmetric about `x = 0`.
    pub fn is_on_axis(&self) -> bool {
        let xs = &self.source.x_positions;
        xs.iter().zip(xs.iter().rev()).all(|(a, b)| *a == -*b)
    }

    /// Canonical `key = value` listing of every input, one per line.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let p = &self.particle;
        let _ = writeln!(s, "particle.mass = {:e}", p.mass());
        let _ = writeln!(s, "particle.lambda = {:e}", p.lambda());
        for (name, g) in [("grating0", &self.g0), ("grating1", &self.g1)] {
            let _ = writeln!(s, "{name}.n = {}", g.n_slits);
            let _ = writeln!(s, "{name}.pitch = {:e}", g.pitch);
            let _ = writeln!(s, "{name}.b = {:e}", g.half_width);
            let _ = writeln!(s, "{name}.z = {:e}", g.z_pos);
            let _ = writeln!(s, "{name}.k = {}", g.comb_k);
            let _ = writeln!(s, "{name}.eta = {:e}", g.comb_eta);
        }
        let src = &self.source;
        let kind = match src.kind {
            SourceKind::Point => "point",
            SourceKind::DistributedLine => "line",
        };
        let _ = writeln!(s, "source.kind = {kind}");
        let xs: Vec<String> = src.x_positions.iter().map(|x| format!("{x:e}")).collect();
        let _ = writeln!(s, "source.xs = {}", xs.join(","));
        match src.plane {
            ZPlane::Finite(z) => {
                let _ = writeln!(s, "source.zs = {z:e}");
            }
            ZPlane::MinusInfinity => {
                let _ = writeln!(s, "source.zs = -inf");
            }
        }
        match src.coherence {
            Coherence::Full => {
                let _ = writeln!(s, "source.sigma_i = inf");
            }
            Coherence::Gaussian(v) => {
                let _ = writeln!(s, "source.sigma_i = {v:e}");
            }
        }
        if let Some(sp) = &src.spectrum {
            let _ = writeln!(s, "spectrum.mean = {:e}", sp.mean_lambda);
            let _ = writeln!(s, "spectrum.sigma_g = {:e}", sp.sigma_g);
            let ls: Vec<String> = sp.lambdas.iter().map(|l| format!("{l:e}")).collect();
            let _ = writeln!(s, "spectrum.lambdas = {}", ls.join(","));
        }
        let prop = match self.propagator {
            PropagatorKind::Standard => "standard",
            PropagatorKind::Paraxial => "paraxial",
            PropagatorKind::HardEdge => "hard-edge",
        };
        let _ = writeln!(s, "model.propagator = {prop}");
        let region = match self.region {
            RegionSelector::Auto => "auto",
            RegionSelector::BetweenGratings => "between",
            RegionSelector::BehindG1 => "behind",
        };
        let _ = writeln!(s, "model.region = {region}");
        let (a, b) = self.metrics_window();
        let _ = writeln!(s, "metrics.x_min = {a:e}");
        let _ = writeln!(s, "metrics.x_max = {b:e}");
        s
    }

    /// SHA-256 of [`Self::echo`], hex encoded.
    pub fn fingerprint(&self) -> String {
        hex_digest(self.echo().as_bytes())
    }
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest.iter() {
        let _ = write!(out, "{b:02x}");
    }
    out
}
