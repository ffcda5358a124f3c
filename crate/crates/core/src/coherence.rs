//! Spatial (Gaussian Schell-model) and spectral averaging, fringe metrics and
//! the scans built on them.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fieldgrid::{evaluate_profile, linspace, source_fields, Profile};
use crate::physics::{velocity_for_wavelength, Coherence, SourceKind};
use crate::scenario::{RegionSelector, Scenario};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Pedestal, peak and visibility of a cross-section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeMetrics {
    pub p_min: f64,
    pub p_max: f64,
    pub visibility: f64,
}

/// `V = (Pmax − Pmin)/(Pmax + Pmin)`; an all-zero profile has `V = 0`.
pub fn fringe_metrics(profile: &[f64]) -> Result<FringeMetrics> {
    if profile.is_empty() {
        return Err(Error::domain("fringe metrics need a non-empty profile"));
    }
    if let Some(bad) = profile.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
        return Err(Error::domain(format!(
            "profile values must be finite and >= 0, found {bad}"
        )));
    }
    let p_min = profile.iter().copied().fold(f64::INFINITY, f64::min);
    let p_max = profile.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let visibility = if p_max > 0.0 {
        (p_max - p_min) / (p_max + p_min)
    } else {
        0.0
    };
    Ok(FringeMetrics {
        p_min,
        p_max,
        visibility,
    })
}

/// Metrics over the part of `profile` inside `[lo, hi]`.
pub fn windowed_metrics(profile: &Profile, (lo, hi): (f64, f64)) -> Result<FringeMetrics> {
    let inside: Vec<f64> = profile
        .x
        .iter()
        .zip(&profile.p)
        .filter(|(x, _)| **x >= lo && **x <= hi)
        .map(|(_, p)| *p)
        .collect();
    fringe_metrics(&inside)
}

/// Gaussian coherence kernel over a fixed set of source positions, stored as
/// the weights `σ_I·μ(x_a, x_b)` that enter the double sum.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceKernel {
    coherence: Coherence,
    positions: Vec<f64>,
    weights: Vec<f64>,
}

impl CoherenceKernel {
    pub fn new(coherence: Coherence, positions: &[f64]) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::domain("coherence kernel needs at least one source position"));
        }
        if positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain("source positions must be strictly increasing"));
        }
        if let Coherence::Gaussian(s) = coherence {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::domain(format!("sigma_I must be positive, got {s}")));
            }
        }
        let n = positions.len();
        let mut weights = Vec::with_capacity(n * n);
        for &a in positions {
            for &b in positions {
                weights.push(match coherence {
                    Coherence::Full => INV_SQRT_2PI,
                    Coherence::Gaussian(s) => s * mu(a, b, s),
                });
            }
        }
        Ok(CoherenceKernel {
            coherence,
            positions: positions.to_vec(),
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn coherence(&self) -> Coherence {
        self.coherence
    }
}

/// `μ(a, b) = exp(−(a−b)²/2σ²) / (√(2π) σ)`.
pub fn mu(a: f64, b: f64, sigma: f64) -> f64 {
    let d = a - b;
    (-(d * d) / (2.0 * sigma * sigma)).exp() * INV_SQRT_2PI / sigma
}

/// `p = σ_I Σ_a Σ_b conj(Ψ_a) μ(x_a, x_b) Ψ_b`, summed in index order. Small
/// negative round-off (within `1e-12` of the magnitude bound) is clamped to 0.
pub fn gsm_average(fields: &[Complex64], kernel: &CoherenceKernel) -> Result<f64> {
    let n = kernel.len();
    if fields.len() != n {
        return Err(Error::domain(format!(
            "got {} fields for {n} source positions",
            fields.len()
        )));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut bound = 0.0;
    for (a, fa) in fields.iter().enumerate() {
        let row = &kernel.weights[a * n..(a + 1) * n];
        let ca = fa.conj();
        let mut inner = Complex64::new(0.0, 0.0);
        let mut inner_bound = 0.0;
        for (w, fb) in row.iter().zip(fields) {
            inner += fb * *w;
            inner_bound += w * fb.norm();
        }
        sum += ca * inner;
        bound += fa.norm() * inner_bound;
    }
    if sum.im.abs() > 1e-12 * bound.max(f64::MIN_POSITIVE) {
        return Err(Error::NumericalConsistency(format!(
            "coherence average has imaginary part {} (bound {bound})",
            sum.im
        )));
    }
    if sum.re < 0.0 {
        if sum.re >= -1e-12 * bound {
            return Ok(0.0);
        }
        return Err(Error::NumericalConsistency(format!(
            "coherence average is negative: {} (bound {bound})",
            sum.re
        )));
    }
    Ok(sum.re)
}

/// Gaussian weights `exp(−(λ−mean)²/2σ_g²)` normalized to sum 1.
pub fn spectral_weights(mean: f64, sigma_g: f64, lambdas: &[f64]) -> Result<Vec<f64>> {
    if lambdas.is_empty() {
        return Err(Error::domain("spectral average needs at least one wavelength"));
    }
    if !(sigma_g > 0.0) {
        return Err(Error::domain(format!("sigma_g must be positive, got {sigma_g}")));
    }
    let raw: Vec<f64> = lambdas
        .iter()
        .map(|l| {
            let d = l - mean;
            (-(d * d) / (2.0 * sigma_g * sigma_g)).exp()
        })
        .collect();
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(Error::domain("spectral weights vanish on the wavelength list"));
    }
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// Incoherent average `Σ_λ w_λ p_λ` of equally sampled densities.
pub fn spectral_average(densities: &[Vec<f64>], weights: &[f64]) -> Result<Vec<f64>> {
    if densities.is_empty() || densities.len() != weights.len() {
        return Err(Error::domain(format!(
            "spectral average got {} densities and {} weights",
            densities.len(),
            weights.len()
        )));
    }
    let n = densities[0].len();
    if densities.iter().any(|d| d.len() != n) {
        return Err(Error::domain("per-wavelength densities differ in length"));
    }
    let mut out = vec![0.0; n];
    for (d, w) in densities.iter().zip(weights) {
        for (o, p) in out.iter_mut().zip(d) {
            *o += w * p;
        }
    }
    Ok(out)
}

/// Detection plane one Talbot length behind G0 at the scenario wavelength.
pub fn talbot_plane(scenario: &Scenario) -> f64 {
    scenario.g0.z_pos + scenario.talbot_length()
}

fn window_samples(scenario: &Scenario, samples: usize) -> Result<Vec<f64>> {
    if samples < 2 {
        return Err(Error::domain("need at least 2 x samples"));
    }
    let (lo, hi) = scenario.metrics_window();
    Ok(linspace(lo, hi, samples))
}

/// Fringe metrics at `z = z0 + zT` for each coherence width. The per-source
/// fields are computed once and recombined for every width.
pub fn coherence_sweep(scenario: &Scenario, sigmas: &[f64], samples: usize) -> Result<Vec<(f64, FringeMetrics)>> {
    if sigmas.is_empty() {
        return Err(Error::domain("coherence sweep needs at least one sigma_I"));
    }
    if sigmas.iter().any(|s| !(*s > 0.0)) || sigmas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("sigma_I values must be positive and ascending"));
    }
    if scenario.source.kind != SourceKind::DistributedLine {
        return Err(Error::domain("coherence sweep needs a distributed source"));
    }
    if scenario.source.spectrum.is_some() {
        return Err(Error::domain("coherence sweep runs at a single wavelength"));
    }
    let xs = window_samples(scenario, samples)?;
    let fields = source_fields(scenario, talbot_plane(scenario), &xs)?;
    sigmas
        .par_iter()
        .map(|&s| {
            let kernel = CoherenceKernel::new(Coherence::Gaussian(s), &scenario.source.x_positions)?;
            let mut column = vec![Complex64::new(0.0, 0.0); fields.len()];
            let mut p = Vec::with_capacity(xs.len());
            for i in 0..xs.len() {
                for (c, f) in column.iter_mut().zip(&fields) {
                    *c = f[i];
                }
                p.push(gsm_average(&column, &kernel)?);
            }
            Ok((s, fringe_metrics(&p)?))
        })
        .collect()
}

/// One point of a wavelength scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonancePoint {
    pub lambda: f64,
    pub velocity: f64,
    pub p_max: f64,
}

/// Peak density over the metrics window at the fixed plane `z0 + zT(λ_ref)`,
/// `λ_ref` being the scenario wavelength, while the particle wavelength runs
/// over `lambdas`. The grating geometry stays fixed.
pub fn resonance_scan(scenario: &Scenario, lambdas: &[f64], samples: usize) -> Result<Vec<ResonancePoint>> {
    if lambdas.is_empty() {
        return Err(Error::domain("resonance scan needs at least one wavelength"));
    }
    let z = talbot_plane(scenario);
    let xs = window_samples(scenario, samples)?;
    lambdas
        .par_iter()
        .map(|&l| {
            let mut s = scenario.clone();
            s.particle = scenario.particle.with_wavelength(l)?;
            s.source.spectrum = None;
            let prof = evaluate_profile(&s, z, &xs)?;
            Ok(ResonancePoint {
                lambda: l,
                velocity: velocity_for_wavelength(s.particle.mass(), l),
                p_max: fringe_metrics(&prof.p)?.p_max,
            })
        })
        .collect()
}

/// `Δp(x) = p_b(x) − p_a(x)`; both profiles must share the x sampling.
pub fn profile_difference(a: &Profile, b: &Profile) -> Result<Vec<f64>> {
    if a.x.len() != b.x.len() || a.x.iter().zip(&b.x).any(|(u, v)| u.to_bits() != v.to_bits()) {
        return Err(Error::domain("profiles are sampled on different x grids"));
    }
    Ok(b.p.iter().zip(&a.p).map(|(pb, pa)| pb - pa).collect())
}

/// Density difference between two planes behind G1 on the samples `xs`.
/// Both planes use the behind-G1 form; `z = z1` gives the G1-masked field.
pub fn focusing_contrast(scenario: &Scenario, z_a: f64, z_b: f64, xs: &[f64]) -> Result<Profile> {
    if !(z_a <= z_b) {
        return Err(Error::domain(format!(
            "focusing contrast needs z_a <= z_b, got {z_a} and {z_b}"
        )));
    }
    if z_a < scenario.g1.z_pos {
        return Err(Error::domain("focusing contrast planes must lie behind G1"));
    }
    let mut s = scenario.clone();
    s.region = RegionSelector::BehindG1;
    let pa = evaluate_profile(&s, z_a, xs)?;
    let pb = evaluate_profile(&s, z_b, xs)?;
    Ok(Profile {
        z: z_b,
        x: xs.to_vec(),
        p: profile_difference(&pa, &pb)?,
    })
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    linspace(a, b, n).into_iter().map(|e| 10f64.powf(e)).collect()
}
