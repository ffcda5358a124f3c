//! Single-path wave functions between and behind the gratings, the free
//! kernel, the slit form factors and a brute-force quadrature oracle.
//!
//! Every closed form is written as `A · Σ exp(q·g² + l·g + c)` with
//! `g = x − (slit centre)`: the quadratic coefficient `q` and the prefactor
//! `A` depend only on the observation plane, the linear and constant parts on
//! the slit pair. [`PlaneField`] stores exactly that, so a superposition over
//! many slits (and a whole grid row) reuses one set of plane constants.
//!
//! Normalization: the time-dependent radical `(m / 2πiħT)^{1/2}` is dropped.
//! Finite-source amplitudes carry `1/D`, paraxial ones `A∞ = 1`.

mod oracle;

pub use oracle::{gauss_legendre, gaussian_integral, quadrature_oracle, ApertureModel};

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::physics::{GratingSpec, Particle, ZPlane, HBAR};

pub type ComplexAmplitude = Complex64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Source point of a single path: transverse position and axial plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourcePoint {
    pub x: f64,
    pub plane: ZPlane,
}

impl SourcePoint {
    pub fn finite(x: f64, z: f64) -> Self {
        SourcePoint {
            x,
            plane: ZPlane::Finite(z),
        }
    }

    pub fn at_infinity(x: f64) -> Self {
        SourcePoint {
            x,
            plane: ZPlane::MinusInfinity,
        }
    }
}

/// Everything one path needs: the species, both gratings, the source point
/// and the slit centres it passes through. `x1` is present only behind G1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathContext {
    pub particle: Particle,
    pub g0: GratingSpec,
    pub g1: GratingSpec,
    pub source: SourcePoint,
    pub x0: f64,
    pub x1: Option<f64>,
}

/// `D = sqrt(Σ₀Σ₁ − (z2−z1)/(z1−z0))`, principal branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DTerm {
    pub squared: Complex64,
    pub value: Complex64,
}

pub fn d_term(sigma0: Complex64, sigma1: Complex64, z0: f64, z1: f64, z2: f64) -> Result<DTerm> {
    if !(z1 > z0) {
        return Err(Error::domain(format!("D needs z1 > z0, got z0 = {z0}, z1 = {z1}")));
    }
    let squared = sigma0 * sigma1 - (z2 - z1) / (z1 - z0);
    d_from_squared(squared)
}

fn d_from_squared(squared: Complex64) -> Result<DTerm> {
    if squared == Complex64::new(0.0, 0.0) || !squared.is_finite() {
        return Err(Error::DegenerateGeometry(format!("D² = {squared}")));
    }
    // valid geometries keep D² off the negative real axis
    if squared.im < 0.0 && squared.re <= 0.0 {
        return Err(Error::DegenerateGeometry(format!(
            "D² = {squared} crosses the branch cut"
        )));
    }
    Ok(DTerm {
        squared,
        value: squared.sqrt(),
    })
}

/// Free-particle kernel in SI units.
pub fn free_kernel(x_b: f64, t_b: f64, x_a: f64, t_a: f64, particle: &Particle) -> Result<ComplexAmplitude> {
    free_kernel_units(x_b, t_b, x_a, t_a, particle.mass(), HBAR)
}

/// Free-particle kernel `[2πiħΔt/m]^{-1/2} exp(i m Δx² / 2ħΔt)` with explicit
/// mass and ħ (natural units are handy in tests).
pub fn free_kernel_units(x_b: f64, t_b: f64, x_a: f64, t_a: f64, mass: f64, hbar: f64) -> Result<ComplexAmplitude> {
    let dt = t_b - t_a;
    if !(dt > 0.0) {
        return Err(Error::domain(format!("free kernel needs t_b > t_a, got Δt = {dt}")));
    }
    let dx = x_b - x_a;
    let pre = (I * (2.0 * PI * hbar * dt / mass)).sqrt().inv();
    Ok(pre * (I * (mass * dx * dx / (2.0 * hbar * dt))).exp())
}

/// K-term Gaussian comb approximating a hard-edged slit of half-width `b`:
/// `(1/η)·sqrt(2/π)·Σ_k exp(−(Kξ − b(K−2k+1))² / 2b²η²)`. Its integral is `2b`.
pub fn comb_form_factor(xi: f64, b: f64, eta: f64, k: u32) -> f64 {
    let kf = f64::from(k);
    let w = 2.0 * b * b * eta * eta;
    let sum: f64 = (1..=k)
        .map(|j| {
            let m = kf - f64::from(2 * j - 1);
            let u = kf * xi - b * m;
            (-(u * u) / w).exp()
        })
        .sum();
    (2.0 / PI).sqrt() / eta * sum
}

/// Gaussian slit form factor `exp(−ξ² / 2b²)`.
pub fn gaussian_form_factor(xi: f64, b: f64) -> f64 {
    (-(xi * xi) / (2.0 * b * b)).exp()
}

/// How the second grating's slits are modelled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Slits1 {
    Fuzzy,
    Comb { k: u32, eta: f64 },
}

/// Plane-dependent constants plus per-path exponent coefficients.
#[derive(Debug, Clone)]
pub struct PlaneField {
    prefactor: Complex64,
    quad: Complex64,
    centers: Vec<f64>,
    stride: usize,
    terms: Vec<(Complex64, Complex64)>,
}

impl PlaneField {
    /// Evaluates `A · Σ_groups Σ_terms exp(q g² + l g + c)` in storage order.
    #[inline]
    pub fn eval(&self, x: f64) -> ComplexAmplitude {
        let mut acc = Complex64::new(0.0, 0.0);
        for (center, chunk) in self.centers.iter().zip(self.terms.chunks_exact(self.stride)) {
            let g = x - center;
            let qg2 = self.quad * (g * g);
            for &(lin, cst) in chunk {
                acc += (qg2 + lin * g + cst).exp();
            }
        }
        self.prefactor * acc
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }
}

/// Constants of the first stage (source → G0 → plane at distance `a`).
struct Stage0 {
    c: f64,
    inv_as: f64,
    ik0: Complex64,
    a: f64,
    sigma0: Complex64,
}

impl Stage0 {
    fn new(lambda: f64, g0: &GratingSpec, source: ZPlane, a: f64) -> Self {
        let inv_as = source.inverse_distance_to(g0.z_pos);
        let k0 = lambda / (2.0 * PI * g0.half_width * g0.half_width);
        let ik0 = Complex64::new(0.0, k0);
        Stage0 {
            c: PI / lambda,
            inv_as,
            ik0,
            a,
            sigma0: Complex64::new(1.0 + a * inv_as, k0 * a),
        }
    }

    /// `Φ₁(e)` for offset `e = x − x0` and `e0 = x0 − xs`; the phase is `i c Φ₁`.
    fn phi1(&self, e: f64, e0: f64) -> Complex64 {
        let s = self.inv_as;
        let num = (s + self.ik0) * (e * e) + 2.0 * e * e0 * s - e0 * e0 * self.a * s * s;
        num / self.sigma0 + e0 * e0 * s
    }
}

/// Between-gratings field of the given G0 slits at plane `z` (`z0 ≤ z ≤ z1`).
pub(crate) fn between_field(
    particle: &Particle,
    g0: &GratingSpec,
    source: SourcePoint,
    slits0: &[f64],
    z: f64,
) -> Result<PlaneField> {
    check_source(g0, source)?;
    let a = z - g0.z_pos;
    if !(a >= 0.0) {
        return Err(Error::domain(format!(
            "between-gratings field needs z >= z0, got z = {z}, z0 = {}",
            g0.z_pos
        )));
    }
    let st = Stage0::new(particle.lambda(), g0, source.plane, a);
    let ic = I * st.c;
    let s = st.inv_as;
    let quad = ic * ((s + st.ik0) / st.sigma0);
    let mut terms = Vec::with_capacity(slits0.len());
    for &x0 in slits0 {
        let e0 = x0 - source.x;
        let lin = ic * (2.0 * e0 * s / st.sigma0);
        let cst = ic * (e0 * e0 * s - e0 * e0 * a * s * s / st.sigma0);
        terms.push((lin, cst));
    }
    Ok(PlaneField {
        prefactor: st.sigma0.sqrt().inv(),
        quad,
        centers: slits0.to_vec(),
        stride: 1,
        terms,
    })
}

/// Behind-G1 field for the given slit pairs at plane `z ≥ z1`. Pairs are
/// visited in the order given; at `z = z1` this is the G1-masked limit.
pub(crate) fn behind_field(
    particle: &Particle,
    g0: &GratingSpec,
    g1: &GratingSpec,
    source: SourcePoint,
    pairs: &[(f64, f64)],
    slits1: Slits1,
    z: f64,
) -> Result<PlaneField> {
    check_source(g0, source)?;
    let (z0, z1) = (g0.z_pos, g1.z_pos);
    if !(z1 > z0) {
        return Err(Error::domain(format!(
            "gratings must satisfy z0 < z1, got {z0} and {z1}"
        )));
    }
    let a1 = z - z1;
    if !(a1 >= 0.0) {
        return Err(Error::domain(format!(
            "behind-G1 field needs z >= z1, got z = {z}, z1 = {z1}"
        )));
    }
    let lambda = particle.lambda();
    let a0 = z1 - z0;
    let st = Stage0::new(lambda, g0, source.plane, a0);
    let (k, eta) = match slits1 {
        Slits1::Fuzzy => (1u32, 1.0),
        Slits1::Comb { k, eta } => (k, eta),
    };
    let kf = f64::from(k);
    let b1 = g1.half_width;
    let k1 = lambda * kf * kf / (2.0 * PI * b1 * b1 * eta * eta);
    let sigma0 = st.sigma0;
    let h = (st.inv_as + st.ik0) + I * k1 * sigma0;
    let d = d_from_squared(sigma0 + h * a1)?;
    let ratio = sigma0 / d.squared;
    let ic = I * st.c;
    let quad = ic * (h / d.squared);

    let shifts: Vec<(f64, f64)> = (1..=k)
        .map(|j| {
            let m = kf - f64::from(2 * j - 1);
            (lambda * kf * m / (2.0 * PI * b1 * eta * eta), m * m / (2.0 * eta * eta))
        })
        .collect();

    let s = st.inv_as;
    let mut centers = Vec::with_capacity(pairs.len());
    let mut terms = Vec::with_capacity(pairs.len() * shifts.len());
    for &(x0, x1) in pairs {
        let e0 = x0 - source.x;
        let f = x1 - x0;
        let phi = st.phi1(f, e0);
        let cfac = ((s + st.ik0) * f + e0 * s) / sigma0;
        centers.push(x1);
        for &(shift, damp) in &shifts {
            let w = cfac - I * shift;
            let lin = ic * (2.0 * ratio * w);
            let cst = ic * (phi - a1 * ratio * w * w) - damp;
            terms.push((lin, cst));
        }
    }
    let prefactor = match slits1 {
        Slits1::Fuzzy => d.value.inv(),
        Slits1::Comb { eta, .. } => Complex64::new((2.0 / PI).sqrt() / eta, 0.0) / d.value,
    };
    Ok(PlaneField {
        prefactor,
        quad,
        centers,
        stride: shifts.len(),
        terms,
    })
}

fn check_source(g0: &GratingSpec, source: SourcePoint) -> Result<()> {
    if !source.x.is_finite() {
        return Err(Error::domain("source x must be finite"));
    }
    if let ZPlane::Finite(zs) = source.plane {
        if !(zs < g0.z_pos) {
            return Err(Error::domain(format!(
                "source must precede grating G0 (z_s = {zs} m, z0 = {} m)",
                g0.z_pos
            )));
        }
    }
    Ok(())
}

fn require_finite_source(ctx: &PathContext) -> Result<()> {
    if ctx.source.plane.is_infinite() {
        return Err(Error::domain(
            "this wave function needs a finite source; use psi_paraxial",
        ));
    }
    Ok(())
}

fn require_between(ctx: &PathContext, z: f64) -> Result<()> {
    if ctx.x1.is_some() {
        return Err(Error::domain("between-gratings path must not carry a G1 slit"));
    }
    if z > ctx.g1.z_pos {
        return Err(Error::domain(format!(
            "z = {z} lies behind G1 (z1 = {}); between-gratings form needs z0 <= z <= z1",
            ctx.g1.z_pos
        )));
    }
    Ok(())
}

fn require_x1(ctx: &PathContext) -> Result<f64> {
    ctx.x1
        .ok_or_else(|| Error::domain("behind-G1 path needs the G1 slit centre x1"))
}

/// Single-slit wave function between the gratings, `z0 ≤ z ≤ z1`.
pub fn psi_between(ctx: &PathContext, x: f64, z: f64) -> Result<ComplexAmplitude> {
    require_finite_source(ctx)?;
    require_between(ctx, z)?;
    Ok(between_field(&ctx.particle, &ctx.g0, ctx.source, &[ctx.x0], z)?.eval(x))
}

/// Single-path wave function behind a fuzzy-edged G1, `z ≥ z1`.
/// At `z = z1` it is the between-gratings field masked by the G1 slit.
pub fn psi_behind(ctx: &PathContext, x: f64, z: f64) -> Result<ComplexAmplitude> {
    require_finite_source(ctx)?;
    let x1 = require_x1(ctx)?;
    Ok(behind_field(
        &ctx.particle,
        &ctx.g0,
        &ctx.g1,
        ctx.source,
        &[(ctx.x0, x1)],
        Slits1::Fuzzy,
        z,
    )?
    .eval(x))
}

/// Plane-wave illumination (`z_s → −∞`, `A∞ = 1`). Without `x1` the path
/// ends between the gratings, with it the path continues behind G1.
pub fn psi_paraxial(ctx: &PathContext, x: f64, z: f64) -> Result<ComplexAmplitude> {
    if !ctx.source.plane.is_infinite() {
        return Err(Error::domain("psi_paraxial needs a source at infinity"));
    }
    match ctx.x1 {
        None => {
            require_between(ctx, z)?;
            Ok(between_field(&ctx.particle, &ctx.g0, ctx.source, &[ctx.x0], z)?.eval(x))
        }
        Some(x1) => Ok(behind_field(
            &ctx.particle,
            &ctx.g0,
            &ctx.g1,
            ctx.source,
            &[(ctx.x0, x1)],
            Slits1::Fuzzy,
            z,
        )?
        .eval(x)),
    }
}

/// Behind a hard-edged G1 modelled by its `K₁`-term comb, `z ≥ z1`.
pub fn psi_hard_edge(ctx: &PathContext, x: f64, z: f64) -> Result<ComplexAmplitude> {
    require_finite_source(ctx)?;
    let x1 = require_x1(ctx)?;
    let slits1 = Slits1::Comb {
        k: ctx.g1.comb_k,
        eta: ctx.g1.comb_eta,
    };
    Ok(behind_field(&ctx.particle, &ctx.g0, &ctx.g1, ctx.source, &[(ctx.x0, x1)], slits1, z)?.eval(x))
}
