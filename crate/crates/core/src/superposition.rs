//! Sums of single-path wave functions over all slits of G0 (and G1).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::physics::{GratingSpec, Particle};
use crate::propagators::{behind_field, between_field, ComplexAmplitude, PlaneField, Slits1, SourcePoint};

/// Which single-path formula feeds the sum behind G1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagatorKind {
    /// Fuzzy Gaussian slits, finite source.
    Standard,
    /// Fuzzy Gaussian slits, source at infinity.
    Paraxial,
    /// G1 slits replaced by their K-term comb.
    HardEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    BetweenGratings,
    BehindG1,
}

/// One source point seen through both gratings with a chosen propagator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRequest {
    pub particle: Particle,
    pub g0: GratingSpec,
    pub g1: GratingSpec,
    pub source: SourcePoint,
    pub propagator: PropagatorKind,
}

impl FieldRequest {
    pub fn new(
        particle: Particle,
        g0: GratingSpec,
        g1: GratingSpec,
        source: SourcePoint,
        propagator: PropagatorKind,
    ) -> Result<Self> {
        let req = FieldRequest {
            particle,
            g0,
            g1,
            source,
            propagator,
        };
        req.validate()?;
        Ok(req)
    }

    pub fn validate(&self) -> Result<()> {
        self.g0.validate()?;
        self.g1.validate()?;
        if !(self.g0.z_pos < self.g1.z_pos) {
            return Err(Error::domain(format!(
                "gratings must satisfy z0 < z1, got {} and {}",
                self.g0.z_pos, self.g1.z_pos
            )));
        }
        if !self.g0.is_fuzzy() {
            return Err(Error::domain(
                "grating G0 must use the single-Gaussian slit model (K = 1, eta = 1)",
            ));
        }
        let infinite = self.source.plane.is_infinite();
        match self.propagator {
            PropagatorKind::Standard if infinite => {
                return Err(Error::domain(
                    "the standard propagator needs a finite source; select paraxial",
                ))
            }
            PropagatorKind::Paraxial if !infinite => {
                return Err(Error::domain("the paraxial propagator needs the source at infinity"))
            }
            PropagatorKind::Standard | PropagatorKind::Paraxial if !self.g1.is_fuzzy() => {
                return Err(Error::domain(
                    "grating G1 has comb parameters (K, eta); select the hard-edge propagator",
                ))
            }
            _ => {}
        }
        if let crate::physics::ZPlane::Finite(zs) = self.source.plane {
            if !(zs < self.g0.z_pos) {
                return Err(Error::domain(format!(
                    "source must precede grating G0 (z_s = {zs} m, z0 = {} m)",
                    self.g0.z_pos
                )));
            }
        }
        Ok(())
    }

    pub fn with_source(&self, source: SourcePoint) -> Self {
        FieldRequest { source, ..*self }
    }

    pub fn with_particle(&self, particle: Particle) -> Self {
        FieldRequest { particle, ..*self }
    }

    fn slits1(&self) -> Slits1 {
        match self.propagator {
            PropagatorKind::HardEdge => Slits1::Comb {
                k: self.g1.comb_k,
                eta: self.g1.comb_eta,
            },
            _ => Slits1::Fuzzy,
        }
    }

    /// Plane constants for every G0 slit at `z0 ≤ z ≤ z1`.
    pub fn between_plane(&self, z: f64) -> Result<PlaneField> {
        self.check_between(z)?;
        between_field(&self.particle, &self.g0, self.source, &self.g0.slit_positions(), z)
    }

    /// Plane constants for every slit pair at `z ≥ z1`, ordered by ascending
    /// G1 index and, within it, ascending G0 index.
    pub fn behind_plane(&self, z: f64) -> Result<PlaneField> {
        let n0: Vec<usize> = (0..self.g0.n_slits).collect();
        let n1: Vec<usize> = (0..self.g1.n_slits).collect();
        self.behind_plane_subset(z, &n0, &n1)
    }

    /// Like [`Self::behind_plane`] restricted to the given slit indices.
    pub fn behind_plane_subset(&self, z: f64, n0: &[usize], n1: &[usize]) -> Result<PlaneField> {
        self.check_behind(z)?;
        let s0 = self.g0.slit_positions();
        let s1 = self.g1.slit_positions();
        let mut pairs = Vec::with_capacity(n0.len() * n1.len());
        for &j in n1 {
            let x1 = *s1
                .get(j)
                .ok_or_else(|| Error::domain(format!("G1 slit index {j} out of range")))?;
            for &i in n0 {
                let x0 = *s0
                    .get(i)
                    .ok_or_else(|| Error::domain(format!("G0 slit index {i} out of range")))?;
                pairs.push((x0, x1));
            }
        }
        behind_field(
            &self.particle,
            &self.g0,
            &self.g1,
            self.source,
            &pairs,
            self.slits1(),
            z,
        )
    }

    fn check_between(&self, z: f64) -> Result<()> {
        if !(z >= self.g0.z_pos && z <= self.g1.z_pos) {
            return Err(Error::domain(format!(
                "between-gratings region is z0 <= z <= z1 ({} .. {}), got {z}",
                self.g0.z_pos, self.g1.z_pos
            )));
        }
        Ok(())
    }

    fn check_behind(&self, z: f64) -> Result<()> {
        if !(z >= self.g1.z_pos) || !z.is_finite() {
            return Err(Error::domain(format!(
                "behind-G1 region is z >= z1 = {}, got {z}",
                self.g1.z_pos
            )));
        }
        Ok(())
    }
}

/// `Σ_{n0} ψ(x, z)` over all G0 slits, `z0 ≤ z ≤ z1`.
pub fn superpose_between(req: &FieldRequest, x: f64, z: f64) -> Result<ComplexAmplitude> {
    Ok(req.between_plane(z)?.eval(x))
}

/// `Σ_{n1} Σ_{n0} ψ(x, z)` over all slit pairs, `z ≥ z1`.
pub fn superpose_behind(req: &FieldRequest, x: f64, z: f64) -> Result<ComplexAmplitude> {
    Ok(req.behind_plane(z)?.eval(x))
}

pub fn superpose(req: &FieldRequest, region: Region, x: f64, z: f64) -> Result<ComplexAmplitude> {
    match region {
        Region::BetweenGratings => superpose_between(req, x, z),
        Region::BehindG1 => superpose_behind(req, x, z),
    }
}

/// Probability density `|ψ|²`.
#[inline]
pub fn density(psi: ComplexAmplitude) -> f64 {
    psi.re * psi.re + psi.im * psi.im
}

/// Zero amplitude, handy as a fold seed.
pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
