//! Brute-force quadrature of the path integral over the slit planes.
//!
//! Deliberately independent of the closed forms: it works in the time domain
//! with mass and ħ, builds its own Gauss–Legendre rules and only shares the
//! aperture functions with the rest of the module.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{comb_form_factor, free_kernel_units, gaussian_form_factor, ComplexAmplitude, PathContext};
use crate::error::{Error, Result};
use crate::physics::{ZPlane, HBAR};

const NODES_PER_PANEL: usize = 16;
const WINDOW: f64 = 8.0;
const TARGET: f64 = 1e-8;
const START_PANELS: usize = 8;
const MAX_PANELS: usize = 512;

/// Aperture substituted for the G1 slit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApertureModel {
    Fuzzy,
    Comb,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Closed-form Gaussian integral `∫ exp(αξ² + βξ + γ) dξ = sqrt(π/−α)·exp(γ − β²/4α)`
/// for `Re α < 0` (or `Re α = 0`, `Im α ≠ 0` as an oscillatory limit).
pub fn gaussian_integral(alpha: Complex64, beta: Complex64, gamma: Complex64) -> Complex64 {
    (PI / -alpha).sqrt() * (gamma - beta * beta / (4.0 * alpha)).exp()
}

struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
}

fn composite_rule(a: f64, b: f64, panels: usize, base: &(Vec<f64>, Vec<f64>)) -> Rule {
    let mut x = Vec::with_capacity(panels * base.0.len());
    let mut w = Vec::with_capacity(panels * base.0.len());
    let width = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + width * p as f64;
        let half = 0.5 * width;
        for (t, wt) in base.0.iter().zip(&base.1) {
            x.push(lo + half * (t + 1.0));
            w.push(half * wt);
        }
    }
    Rule { x, w }
}

/// Numerically integrates the path integral through the slit(s) of `ctx` and
/// returns it in the normalization of the closed forms. Panels double until
/// the relative change drops below `1e-8`.
pub fn quadrature_oracle(ctx: &PathContext, x: f64, z: f64, model: ApertureModel) -> Result<ComplexAmplitude> {
    let zs = match ctx.source.plane {
        ZPlane::Finite(zs) => zs,
        ZPlane::MinusInfinity => return Err(Error::domain("the oracle needs a finite source")),
    };
    let (z0, z1) = (ctx.g0.z_pos, ctx.g1.z_pos);
    if !(zs < z0 && z0 < z1) {
        return Err(Error::domain("the oracle needs z_s < z0 < z1"));
    }
    let v = ctx.particle.v_z();
    let m = ctx.particle.mass();
    let t_src = (z0 - zs) / v;
    let norm = (Complex64::new(0.0, 2.0 * PI * HBAR * t_src / m)).sqrt();
    let base = gauss_legendre(NODES_PER_PANEL);
    let b0 = ctx.g0.half_width;
    let (lo0, hi0) = (ctx.x0 - WINDOW * b0, ctx.x0 + WINDOW * b0);

    let eval = |panels: usize| -> Result<Complex64> {
        let r0 = composite_rule(lo0, hi0, panels, &base);
        // source → G0 aperture, weighted
        let mut first = Vec::with_capacity(r0.x.len());
        for (&u0, &w0) in r0.x.iter().zip(&r0.w) {
            let k = free_kernel_units(u0, t_src, ctx.source.x, 0.0, m, HBAR)?;
            first.push(k * gaussian_form_factor(u0 - ctx.x0, b0) * w0);
        }
        match ctx.x1 {
            None => {
                if !(z > z0 && z <= z1) {
                    return Err(Error::domain("between-gratings oracle needs z0 < z <= z1"));
                }
                let tau = (z - z0) / v;
                let mut acc = Complex64::new(0.0, 0.0);
                for (&u0, f) in r0.x.iter().zip(&first) {
                    acc += free_kernel_units(x, tau, u0, 0.0, m, HBAR)? * f;
                }
                Ok(acc)
            }
            Some(x1) => {
                if !(z > z1) {
                    return Err(Error::domain("behind-G1 oracle needs z > z1"));
                }
                let b1 = ctx.g1.half_width;
                let (k1, eta1) = (ctx.g1.comb_k, ctx.g1.comb_eta);
                let (lo1, hi1) = match model {
                    ApertureModel::Fuzzy => (x1 - WINDOW * b1, x1 + WINDOW * b1),
                    ApertureModel::Comb => {
                        let tail = WINDOW * b1 * eta1 / f64::from(k1);
                        (x1 - b1 - tail, x1 + b1 + tail)
                    }
                };
                let r1 = composite_rule(lo1, hi1, panels, &base);
                let tau0 = (z1 - z0) / v;
                let tau1 = (z - z1) / v;
                let mut acc = Complex64::new(0.0, 0.0);
                for (&u1, &w1) in r1.x.iter().zip(&r1.w) {
                    let aperture = match model {
                        ApertureModel::Fuzzy => gaussian_form_factor(u1 - x1, b1),
                        ApertureModel::Comb => comb_form_factor(u1 - x1, b1, eta1, k1),
                    };
                    let mut inner = Complex64::new(0.0, 0.0);
                    for (&u0, f) in r0.x.iter().zip(&first) {
                        inner += free_kernel_units(u1, tau0, u0, 0.0, m, HBAR)? * f;
                    }
                    acc += free_kernel_units(x, tau1, u1, 0.0, m, HBAR)? * inner * (aperture * w1);
                }
                Ok(acc)
            }
        }
    };

    let mut panels = START_PANELS;
    let mut prev = eval(panels)?;
    let mut change = f64::INFINITY;
    while panels < MAX_PANELS {
        panels *= 2;
        let next = eval(panels)?;
        change = (next - prev).norm() / next.norm();
        prev = next;
        if change < TARGET {
            return Ok(prev * norm);
        }
    }
    Err(Error::OracleFailure {
        last_change: change,
        nodes: panels * NODES_PER_PANEL,
    })
}
