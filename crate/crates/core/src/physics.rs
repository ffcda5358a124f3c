//! Particles, gratings, geometry and the dimensionless spreading parameters
//! shared by every wave function in the crate.
//!
//! All lengths are in meters, masses in kilograms, times in seconds.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Planck constant, J·s (exact SI value).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = PLANCK / (2.0 * PI);

/// Mass of a C60 fullerene molecule used throughout the presets, kg.
pub const C60_MASS: f64 = 1.2e-24;

/// Upper bound on slits per grating; keeps the per-point cost bounded.
pub const MAX_SLITS: usize = 4096;

/// A matter-wave species at a fixed de Broglie wavelength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    mass: f64,
    lambda: f64,
    p_z: f64,
    v_z: f64,
}

impl Particle {
    pub fn from_wavelength(mass: f64, lambda: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::domain(format!("particle mass must be positive, got {mass}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::domain(format!(
                "de Broglie wavelength must be positive, got {lambda}"
            )));
        }
        let p_z = PLANCK / lambda;
        Ok(Particle {
            mass,
            lambda,
            p_z,
            v_z: p_z / mass,
        })
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// de Broglie wavelength, m.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Longitudinal momentum `h / λ`.
    pub fn p_z(&self) -> f64 {
        self.p_z
    }

    /// Longitudinal velocity `p_z / m`.
    pub fn v_z(&self) -> f64 {
        self.v_z
    }

    /// Same species at another wavelength.
    pub fn with_wavelength(&self, lambda: f64) -> Result<Self> {
        Particle::from_wavelength(self.mass, lambda)
    }
}

/// Velocity of a particle of mass `mass` at wavelength `lambda`: `h / (m λ)`.
pub fn velocity_for_wavelength(mass: f64, lambda: f64) -> f64 {
    PLANCK / (mass * lambda)
}

/// One slit grating. Slits are Gaussian form factors of half-width `half_width`
/// or, for `comb_k > 1` (or `comb_eta != 1`), combs of narrower Gaussians that
/// approximate a hard-edged slit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GratingSpec {
    pub n_slits: usize,
    pub pitch: f64,
    pub half_width: f64,
    pub z_pos: f64,
    pub comb_k: u32,
    pub comb_eta: f64,
}

impl GratingSpec {
    /// Fuzzy-edged grating (single Gaussian per slit).
    pub fn new(n_slits: usize, pitch: f64, half_width: f64, z_pos: f64) -> Result<Self> {
        Self::with_comb(n_slits, pitch, half_width, z_pos, 1, 1.0)
    }

    pub fn with_comb(
        n_slits: usize,
        pitch: f64,
        half_width: f64,
        z_pos: f64,
        comb_k: u32,
        comb_eta: f64,
    ) -> Result<Self> {
        let g = GratingSpec {
            n_slits,
            pitch,
            half_width,
            z_pos,
            comb_k,
            comb_eta,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_slits == 0 || self.n_slits > MAX_SLITS {
            return Err(Error::domain(format!(
                "slit count must be in 1..={MAX_SLITS}, got {}",
                self.n_slits
            )));
        }
        if !(self.pitch > 0.0 && self.pitch.is_finite()) {
            return Err(Error::domain(format!(
                "grating pitch must be positive, got {}",
                self.pitch
            )));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::domain(format!(
                "slit half-width must be positive, got {}",
                self.half_width
            )));
        }
        if 2.0 * self.half_width > self.pitch {
            return Err(Error::domain(format!(
                "slit width 2b = {} exceeds the pitch {}",
                2.0 * self.half_width,
                self.pitch
            )));
        }
        if !self.z_pos.is_finite() {
            return Err(Error::domain("grating position must be finite"));
        }
        if self.comb_k == 0 {
            return Err(Error::domain("comb K must be at least 1"));
        }
        if !(self.comb_eta > 0.0 && self.comb_eta.is_finite()) {
            return Err(Error::domain(format!(
                "comb eta must be positive, got {}",
                self.comb_eta
            )));
        }
        Ok(())
    }

    /// Effective Gaussian half-width `b / sqrt(2)`.
    pub fn sigma0(&self) -> f64 {
        self.half_width / std::f64::consts::SQRT_2
    }

    /// True when the slits use the plain single-Gaussian form factor.
    pub fn is_fuzzy(&self) -> bool {
        self.comb_k == 1 && self.comb_eta == 1.0
    }

    /// `K² / η²`, the factor the comb form factor puts on the spreading rate.
    pub fn comb_scale(&self) -> f64 {
        let k = f64::from(self.comb_k);
        k * k / (self.comb_eta * self.comb_eta)
    }

    /// Slit centres, symmetric about `x = 0`.
    pub fn slit_positions(&self) -> Vec<f64> {
        slit_positions(self)
    }

    /// Half the distance between the outermost slit centres.
    pub fn half_span(&self) -> f64 {
        0.5 * (self.n_slits as f64 - 1.0) * self.pitch
    }
}

/// Slit centres `(n − (N−1)/2)·d` for `n = 0..N`.
pub fn slit_positions(g: &GratingSpec) -> Vec<f64> {
    let half = (g.n_slits as f64 - 1.0) / 2.0;
    (0..g.n_slits).map(|n| (n as f64 - half) * g.pitch).collect()
}

/// Talbot length `2 d² / λ`.
pub fn talbot_length(pitch: f64, lambda: f64) -> Result<f64> {
    if !(pitch > 0.0) || !(lambda > 0.0) {
        return Err(Error::domain(format!(
            "Talbot length needs positive pitch and wavelength, got d = {pitch}, λ = {lambda}"
        )));
    }
    Ok(2.0 * pitch * pitch / lambda)
}

/// An axial position that may be pushed to minus infinity (plane-wave limit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZPlane {
    Finite(f64),
    MinusInfinity,
}

impl ZPlane {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ZPlane::MinusInfinity)
    }

    /// `1 / (z_next − self)`, zero at infinity.
    pub(crate) fn inverse_distance_to(&self, z_next: f64) -> f64 {
        match *self {
            ZPlane::Finite(z) => 1.0 / (z_next - z),
            ZPlane::MinusInfinity => 0.0,
        }
    }
}

/// Point source, or a line of mutually partially-coherent point sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    Point,
    DistributedLine,
}

/// Spatial coherence width of a distributed source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coherence {
    /// `σ_I → ∞`: all point sources add coherently.
    Full,
    /// Gaussian Schell-model width `σ_I`, m.
    Gaussian(f64),
}

/// Gaussian wavelength spread sampled on an explicit wavelength grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub mean_lambda: f64,
    pub sigma_g: f64,
    pub lambdas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    pub kind: SourceKind,
    pub x_positions: Vec<f64>,
    pub plane: ZPlane,
    pub coherence: Coherence,
    pub spectrum: Option<Spectrum>,
}

impl SourceSpec {
    pub fn point(x: f64, plane: ZPlane) -> Self {
        SourceSpec {
            kind: SourceKind::Point,
            x_positions: vec![x],
            plane,
            coherence: Coherence::Full,
            spectrum: None,
        }
    }

    pub fn line(x_positions: Vec<f64>, plane: ZPlane, coherence: Coherence) -> Self {
        SourceSpec {
            kind: SourceKind::DistributedLine,
            x_positions,
            plane,
            coherence,
            spectrum: None,
        }
    }

    pub fn with_spectrum(mut self, spectrum: Spectrum) -> Self {
        self.spectrum = Some(spectrum);
        self
    }

    /// Checks the source against the first grating plane `z0`.
    pub fn validate(&self, z0: f64) -> Result<()> {
        if self.x_positions.is_empty() {
            return Err(Error::domain("source needs at least one x position"));
        }
        if self.x_positions.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("source x positions must be finite"));
        }
        if self.kind == SourceKind::Point && self.x_positions.len() != 1 {
            return Err(Error::domain("a point source has exactly one x position"));
        }
        if self.x_positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("source x positions must be strictly increasing"));
        }
        if let ZPlane::Finite(zs) = self.plane {
            if !(zs < z0) {
                return Err(Error::domain(format!(
                    "source must precede grating G0 (z_s = {zs} m, z0 = {z0} m)"
                )));
            }
        }
        if let Coherence::Gaussian(s) = self.coherence {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::domain(format!(
                    "coherence width sigma_I must be positive, got {s}"
                )));
            }
        }
        if let Some(sp) = &self.spectrum {
            if !(sp.sigma_g > 0.0) || !(sp.mean_lambda > 0.0) {
                return Err(Error::domain("spectrum needs positive mean wavelength and sigma_g"));
            }
            if sp.lambdas.is_empty() || sp.lambdas.iter().any(|l| !(*l > 0.0)) {
                return Err(Error::domain("spectrum wavelength list must be non-empty and positive"));
            }
        }
        Ok(())
    }
}

/// Positions of the two grating planes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub z0: f64,
    pub z1: f64,
}

impl Geometry {
    pub fn new(z0: f64, z1: f64) -> Result<Self> {
        if !(z0 < z1) || !z0.is_finite() || !z1.is_finite() {
            return Err(Error::domain(format!(
                "gratings must satisfy z0 < z1, got {z0} and {z1}"
            )));
        }
        Ok(Geometry { z0, z1 })
    }
}

/// Flight times source→G0 (`None` for a source at infinity), G0→G1 and
/// G1→detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightTimes {
    pub t_source: Option<f64>,
    pub tau0: f64,
    pub tau1: f64,
}

pub fn flight_context(geom: &Geometry, particle: &Particle, source: ZPlane, z_detector: f64) -> Result<FlightTimes> {
    if let ZPlane::Finite(zs) = source {
        if !(zs < geom.z0) {
            return Err(Error::domain("source must precede grating G0"));
        }
    }
    if !(geom.z0 < geom.z1) || z_detector < geom.z1 {
        return Err(Error::domain(format!(
            "flight times need z0 < z1 <= z2, got {}, {}, {z_detector}",
            geom.z0, geom.z1
        )));
    }
    let v = particle.v_z();
    Ok(FlightTimes {
        t_source: match source {
            ZPlane::Finite(zs) => Some((geom.z0 - zs) / v),
            ZPlane::MinusInfinity => None,
        },
        tau0: (geom.z1 - geom.z0) / v,
        tau1: (z_detector - geom.z1) / v,
    })
}

/// Width parameters of one grating seen from a downstream plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadingParams {
    /// `b / sqrt(2)`.
    pub sigma0: f64,
    /// Dimensionless complex spreading.
    pub sigma: Complex64,
}

/// Dimensionless complex spreading of grating `j` at `z_next`:
///
/// `Σ = (z_next − z_prev)/(z_j − z_prev) + i λ (z_next − z_j) K²/(4π σ0² η²)`.
///
/// With `z_prev` at minus infinity the real part is exactly one.
pub fn spreading(grating: &GratingSpec, lambda: f64, z_prev: ZPlane, z_next: f64) -> Result<SpreadingParams> {
    let zj = grating.z_pos;
    if let ZPlane::Finite(zp) = z_prev {
        if !(zp < zj) {
            return Err(Error::domain(format!(
                "spreading needs the upstream plane before the grating ({zp} vs {zj})"
            )));
        }
    }
    if z_next < zj {
        return Err(Error::domain(format!(
            "spreading needs the observation plane at or behind the grating ({z_next} vs {zj})"
        )));
    }
    let sigma0 = grating.sigma0();
    let re = match z_prev {
        ZPlane::Finite(zp) => (z_next - zp) / (zj - zp),
        ZPlane::MinusInfinity => 1.0,
    };
    let im = lambda * (z_next - zj) / (4.0 * PI * sigma0 * sigma0) * grating.comb_scale();
    Ok(SpreadingParams {
        sigma0,
        sigma: Complex64::new(re, im),
    })
}

/// Source-alignment parameter `Ξ₀ = 1 − ((x0−xs)/(z0−zs))·((z1−z0)/(x1−x0))`.
///
/// Singular for `x1 == x0`; the propagators never divide by `x1 − x0` and use
/// [`xi0_times_offset`] instead.
pub fn xi0(x0: f64, x1: f64, x_s: f64, z0: f64, z1: f64, z_s: f64) -> Result<f64> {
    if !(z_s < z0 && z0 < z1) {
        return Err(Error::domain("xi0 needs z_s < z0 < z1"));
    }
    if x1 == x0 {
        return Err(Error::domain("xi0 is singular at x1 == x0; use xi0_times_offset"));
    }
    Ok(1.0 - ((x0 - x_s) / (z0 - z_s)) * ((z1 - z0) / (x1 - x0)))
}

/// `(x1 − x0)·Ξ₀ = (x1 − x0) − (x0 − xs)(z1 − z0)/(z0 − zs)`, finite for all inputs.
/// Equals `x1 − x0` for a source at infinity.
pub fn xi0_times_offset(x0: f64, x1: f64, x_s: f64, z0: f64, z1: f64, z_s: ZPlane) -> f64 {
    (x1 - x0) - (x0 - x_s) * (z1 - z0) * z_s.inverse_distance_to(z0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn g0() -> GratingSpec {
        GratingSpec::new(32, 500e-9, 37.5e-9, 0.0).unwrap()
    }

    #[test]
    fn fullerene_velocities() {
        for (lambda, v) in [(5e-12, 110.0), (3e-12, 184.0), (7e-12, 79.0)] {
            let p = Particle::from_wavelength(C60_MASS, lambda).unwrap();
            assert!((p.v_z() - v).abs() < 1.0, "λ = {lambda}: v = {}", p.v_z());
        }
    }

    #[test]
    fn particle_rejects_nonpositive() {
        assert!(Particle::from_wavelength(0.0, 5e-12).is_err());
        assert!(Particle::from_wavelength(1e-24, -1.0).is_err());
        assert!(Particle::from_wavelength(1e-24, f64::NAN).is_err());
    }

    #[test]
    fn talbot_lengths() {
        assert_relative_eq!(talbot_length(500e-9, 5e-12).unwrap(), 0.1, max_relative = 1e-12);
        assert_relative_eq!(talbot_length(500e-9, 2.5e-12).unwrap(), 0.2, max_relative = 1e-12);
        let d = 3.7e-7;
        assert_relative_eq!(talbot_length(d, 2.0 * d * d).unwrap(), 1.0, max_relative = 1e-15);
        assert!(talbot_length(0.0, 1.0).is_err());
        assert!(talbot_length(1.0, -1.0).is_err());
    }

    #[test]
    fn flight_times() {
        let v = 110.0;
        let p = Particle::from_wavelength(C60_MASS, PLANCK / (C60_MASS * v)).unwrap();
        let geom = Geometry::new(0.0, 0.05).unwrap();
        let ft = flight_context(&geom, &p, ZPlane::Finite(-0.5), 0.05).unwrap();
        assert_relative_eq!(ft.t_source.unwrap(), 0.5 / 110.0, max_relative = 1e-12);
        assert_relative_eq!(ft.tau0, 4.545_454_5e-4, max_relative = 1e-7);
        assert_eq!(ft.tau1, 0.0);

        let inf = flight_context(&geom, &p, ZPlane::MinusInfinity, 0.1).unwrap();
        assert_eq!(inf.t_source, None);
        assert!(flight_context(&geom, &p, ZPlane::Finite(0.01), 0.1).is_err());
        assert!(flight_context(&geom, &p, ZPlane::Finite(-0.5), 0.01).is_err());
    }

    #[test]
    fn spreading_of_first_grating() {
        let s = spreading(&g0(), 5e-12, ZPlane::Finite(-0.5), 0.05).unwrap();
        assert_relative_eq!(s.sigma.re, 1.1, max_relative = 1e-12);
        // λ(z1 − z0)/(4π σ0²) with σ0² = b²/2
        let expected = 5e-12 * 0.05 / (2.0 * PI * 37.5e-9 * 37.5e-9);
        assert_relative_eq!(s.sigma.im, expected, max_relative = 1e-12);
        assert!((s.sigma.im - 28.29).abs() < 0.01);
        assert_eq!(s.sigma0, 37.5e-9 / std::f64::consts::SQRT_2);
    }

    #[test]
    fn spreading_at_grating_plane_is_one() {
        let g1 = GratingSpec::new(33, 500e-9, 75e-9, 0.05).unwrap();
        let s = spreading(&g1, 5e-12, ZPlane::Finite(0.0), 0.05).unwrap();
        assert_eq!(s.sigma, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn comb_scales_imaginary_part_only() {
        let fuzzy = GratingSpec::new(5, 500e-9, 75e-9, 0.05).unwrap();
        let comb = GratingSpec::with_comb(5, 500e-9, 75e-9, 0.05, 2, 1.0).unwrap();
        let a = spreading(&fuzzy, 5e-12, ZPlane::Finite(0.0), 0.08).unwrap();
        let b = spreading(&comb, 5e-12, ZPlane::Finite(0.0), 0.08).unwrap();
        assert_eq!(a.sigma.re, b.sigma.re);
        assert_relative_eq!(b.sigma.im, 4.0 * a.sigma.im, max_relative = 1e-15);
    }

    #[test]
    fn spreading_rejects_coincident_planes() {
        assert!(spreading(&g0(), 5e-12, ZPlane::Finite(0.0), 0.05).is_err());
        assert!(spreading(&g0(), 5e-12, ZPlane::Finite(-0.5), -0.1).is_err());
    }

    #[test]
    fn paraxial_spreading_has_unit_real_part() {
        let s = spreading(&g0(), 5e-12, ZPlane::MinusInfinity, 0.05).unwrap();
        assert_eq!(s.sigma.re, 1.0);
    }

    #[test]
    fn xi0_examples() {
        assert_eq!(xi0(1e-6, 2e-6, 1e-6, 0.0, 0.05, -0.5).unwrap(), 1.0);
        assert_relative_eq!(
            xi0(0.0, 250e-9, 2e-6, 0.0, 0.05, -0.5).unwrap(),
            1.8,
            max_relative = 1e-12
        );
        assert!(xi0(1e-6, 1e-6, 0.0, 0.0, 0.05, -0.5).is_err());
        // approaches 1 as the source recedes
        let far = xi0(0.0, 250e-9, 2e-6, 0.0, 0.05, -1e9).unwrap();
        assert!((far - 1.0).abs() < 1e-8);
    }

    #[test]
    fn grouped_xi0_matches_definition() {
        let (x0, x1, xs) = (3e-7, -1.2e-6, 2.5e-6);
        let direct = xi0(x0, x1, xs, 0.0, 0.05, -0.7).unwrap() * (x1 - x0);
        let grouped = xi0_times_offset(x0, x1, xs, 0.0, 0.05, ZPlane::Finite(-0.7));
        assert_relative_eq!(direct, grouped, max_relative = 1e-13);
        assert_eq!(xi0_times_offset(x0, x1, xs, 0.0, 0.05, ZPlane::MinusInfinity), x1 - x0);
        // finite at the removable singularity
        assert!(xi0_times_offset(x0, x0, xs, 0.0, 0.05, ZPlane::Finite(-0.7)).is_finite());
    }

    #[test]
    fn slit_layouts() {
        let g = GratingSpec::new(33, 500e-9, 37.5e-9, 0.0).unwrap();
        let s = g.slit_positions();
        assert_eq!(s.len(), 33);
        assert_relative_eq!(s[0], -8e-6, max_relative = 1e-15);
        assert_eq!(s[16], 0.0);

        let one = GratingSpec::new(1, 500e-9, 37.5e-9, 0.0).unwrap();
        assert_eq!(one.slit_positions(), vec![0.0]);

        let even = GratingSpec::new(32, 500e-9, 37.5e-9, 0.0).unwrap().slit_positions();
        assert_relative_eq!(even[15], -250e-9, max_relative = 1e-15);
        assert_relative_eq!(even[16], 250e-9, max_relative = 1e-15);
        assert!(!even.contains(&0.0));
    }

    #[test]
    fn grating_invariants() {
        assert!(GratingSpec::new(0, 500e-9, 37.5e-9, 0.0).is_err());
        assert!(GratingSpec::new(MAX_SLITS + 1, 500e-9, 37.5e-9, 0.0).is_err());
        assert!(GratingSpec::new(3, 500e-9, 300e-9, 0.0).is_err());
        assert!(GratingSpec::new(3, -1.0, 37.5e-9, 0.0).is_err());
        assert!(GratingSpec::with_comb(3, 500e-9, 75e-9, 0.0, 0, 1.0).is_err());
        assert!(GratingSpec::with_comb(3, 500e-9, 75e-9, 0.0, 4, 0.0).is_err());
    }

    #[test]
    fn source_validation() {
        let s = SourceSpec::point(0.0, ZPlane::Finite(0.1));
        let err = s.validate(0.0).unwrap_err().to_string();
        assert!(err.contains("source must precede grating G0"), "{err}");
        assert!(SourceSpec::point(0.0, ZPlane::MinusInfinity).validate(0.0).is_ok());
        let bad = SourceSpec::line(vec![1e-6, 0.0], ZPlane::Finite(-0.5), Coherence::Full);
        assert!(bad.validate(0.0).is_err());
        let zero = SourceSpec::line(vec![0.0, 1e-6], ZPlane::Finite(-0.5), Coherence::Gaussian(0.0));
        assert!(zero.validate(0.0).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn momentum_relation(mass in 1e-27f64..1e-22, lambda in 1e-13f64..1e-9) {
                let p = Particle::from_wavelength(mass, lambda).unwrap();
                prop_assert!(((p.v_z() * mass * lambda - PLANCK) / PLANCK).abs() < 1e-12);
            }

            #[test]
            fn slits_are_symmetric(n in 1usize..600, d in 1e-8f64..1e-5) {
                let g = GratingSpec::new(n, d, d / 4.0, 0.0).unwrap();
                let s = g.slit_positions();
                // compensated sum so accumulation error does not mask the layout
                let (mut sum, mut comp) = (0.0f64, 0.0f64);
                for &v in &s {
                    let t = sum + v;
                    comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
                    sum = t;
                }
                let sum = sum + comp;
                prop_assert!(sum.abs() <= 1e-15 * n as f64 * d);
                for (a, b) in s.iter().zip(s.iter().rev()) {
                    prop_assert_eq!(*a, -*b);
                }
            }

            #[test]
            fn spreading_signs(zs in -5.0f64..-0.01, a0 in 1e-3f64..1.0, a1 in 1e-6f64..1.0,
                               lambda in 1e-12f64..1e-11, b in 1e-8f64..2e-7) {
                let g = GratingSpec::new(1, 4.0 * b, b, 0.0).unwrap();
                let s = spreading(&g, lambda, ZPlane::Finite(zs), a1).unwrap();
                prop_assert!(s.sigma.im > 0.0);
                prop_assert!(s.sigma.re > 1.0);
                let _ = a0;
            }
        }
    }
}
