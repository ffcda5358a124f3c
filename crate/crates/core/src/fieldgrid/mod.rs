//! Density fields on rectangular (x, z) grids, cross-sections and profiles.

mod export;

pub use export::{export_field, read_csv, write_csv, write_meta, write_pgm, ExportFormat, PgmScale};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::coherence::{gsm_average, spectral_weights, CoherenceKernel};
use crate::error::{Error, Result};
use crate::physics::SourceKind;
use crate::propagators::PlaneField;
use crate::scenario::{hex_digest, RegionSelector, Scenario};
use crate::superposition::density;

/// Uniform grid including both endpoints on each axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub nx: usize,
    pub nz: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, z_min: f64, z_max: f64, nx: usize, nz: usize) -> Result<Self> {
        let g = GridSpec {
            x_min,
            x_max,
            z_min,
            z_max,
            nx,
            nz,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x_min, self.x_max, self.z_min, self.z_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || !(self.x_min < self.x_max) || !(self.z_min < self.z_max) {
            return Err(Error::domain(format!(
                "grid needs x_min < x_max and z_min < z_max, got x {} .. {}, z {} .. {}",
                self.x_min, self.x_max, self.z_min, self.z_max
            )));
        }
        if self.nx < 2 || self.nz < 2 {
            return Err(Error::domain(format!(
                "grid needs at least 2 points per axis, got {} x {}",
                self.nx, self.nz
            )));
        }
        Ok(())
    }

    pub fn x(&self, i: usize) -> f64 {
        lerp(self.x_min, self.x_max, i, self.nx)
    }

    pub fn z(&self, j: usize) -> f64 {
        lerp(self.z_min, self.z_max, j, self.nz)
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn zs(&self) -> Vec<f64> {
        (0..self.nz).map(|j| self.z(j)).collect()
    }

    pub fn describe(&self) -> String {
        format!(
            "x = {:e} .. {:e} ({} points), z = {:e} .. {:e} ({} points)",
            self.x_min, self.x_max, self.nx, self.z_min, self.z_max, self.nz
        )
    }
}

/// `n` evenly spaced points from `a` to `b`, endpoints exact and the point set
/// mirror-symmetric when `a == −b`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (a + b)],
        _ => (0..n).map(|i| lerp(a, b, i, n)).collect(),
    }
}

fn lerp(a: f64, b: f64, i: usize, n: usize) -> f64 {
    let m = (n - 1) as f64;
    (a * (m - i as f64) + b * i as f64) / m
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrema {
    pub min: f64,
    pub max: f64,
    /// `(ix, iz)` of the first maximum in row-major order.
    pub argmax: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub grid: GridSpec,
    /// Row-major in z: `values[iz * nx + ix]`.
    pub values: Vec<f64>,
    pub extrema: Extrema,
    pub fingerprint: String,
    /// Scenario echo the field was computed from.
    pub echo: String,
}

impl DensityField {
    pub fn at(&self, ix: usize, iz: usize) -> f64 {
        self.values[iz * self.grid.nx + ix]
    }

    pub fn row(&self, iz: usize) -> &[f64] {
        &self.values[iz * self.grid.nx..(iz + 1) * self.grid.nx]
    }

    /// SHA-256 of the little-endian value bytes.
    pub fn values_digest(&self) -> String {
        let mut bytes = Vec::with_capacity(self.values.len() * 8);
        for v in &self.values {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        hex_digest(&bytes)
    }
}

/// Densities along x at one z.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub z: f64,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl Profile {
    /// Trapezoidal integral of `p` over `x`.
    pub fn integral(&self) -> f64 {
        self.x
            .windows(2)
            .zip(self.p.windows(2))
            .map(|(x, p)| 0.5 * (x[1] - x[0]) * (p[0] + p[1]))
            .sum()
    }
}

/// Formula used for a given row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowForm {
    Between,
    Behind,
}

fn row_form(s: &Scenario, z: f64) -> Result<RowForm> {
    let (z0, z1) = (s.g0.z_pos, s.g1.z_pos);
    match s.region {
        RegionSelector::Auto => {
            if z < z0 {
                Err(Error::domain(format!("z = {z} lies before grating G0 (z0 = {z0})")))
            } else if z <= z1 {
                Ok(RowForm::Between)
            } else {
                Ok(RowForm::Behind)
            }
        }
        RegionSelector::BetweenGratings => {
            if z < z0 || z > z1 {
                Err(Error::domain(format!(
                    "between-gratings region needs z0 <= z <= z1, row at z = {z}"
                )))
            } else {
                Ok(RowForm::Between)
            }
        }
        RegionSelector::BehindG1 => {
            if z < z1 {
                Err(Error::domain(format!(
                    "behind-G1 region needs z >= z1 = {z1}, row at z = {z}"
                )))
            } else {
                Ok(RowForm::Behind)
            }
        }
    }
}

/// Per-wavelength, per-source plane constants for one z.
struct RowPlan {
    weights: Vec<f64>,
    /// `planes[l][s]` for wavelength `l` and source `s`.
    planes: Vec<Vec<PlaneField>>,
    kernel: Option<CoherenceKernel>,
}

fn plan_row(s: &Scenario, z: f64) -> Result<RowPlan> {
    let form = row_form(s, z)?;
    let particles = match &s.source.spectrum {
        None => vec![s.particle],
        Some(sp) => sp
            .lambdas
            .iter()
            .map(|&l| s.particle.with_wavelength(l))
            .collect::<Result<Vec<_>>>()?,
    };
    let weights = match &s.source.spectrum {
        None => vec![1.0],
        Some(sp) => spectral_weights(sp.mean_lambda, sp.sigma_g, &sp.lambdas)?,
    };
    let mut planes = Vec::with_capacity(particles.len());
    for p in &particles {
        let mut per_source = Vec::with_capacity(s.source.x_positions.len());
        for &xs in &s.source.x_positions {
            let req = s.request(xs, p)?;
            per_source.push(match form {
                RowForm::Between => req.between_plane(z)?,
                RowForm::Behind => req.behind_plane(z)?,
            });
        }
        planes.push(per_source);
    }
    let kernel = match s.source.kind {
        SourceKind::Point => None,
        SourceKind::DistributedLine => Some(CoherenceKernel::new(s.source.coherence, &s.source.x_positions)?),
    };
    Ok(RowPlan {
        weights,
        planes,
        kernel,
    })
}

impl RowPlan {
    fn density(&self, x: f64, scratch: &mut Vec<Complex64>) -> Result<f64> {
        let mut total = 0.0;
        for (w, per_source) in self.weights.iter().zip(&self.planes) {
            let p = match &self.kernel {
                None => density(per_source[0].eval(x)),
                Some(k) => {
                    scratch.clear();
                    scratch.extend(per_source.iter().map(|f| f.eval(x)));
                    gsm_average(scratch, k)?
                }
            };
            if self.weights.len() == 1 {
                return Ok(p);
            }
            total += w * p;
        }
        Ok(total)
    }

    fn fill(&self, xs: &[f64], out: &mut [f64]) -> Result<()> {
        let mut scratch = Vec::new();
        for (o, &x) in out.iter_mut().zip(xs) {
            *o = self.density(x, &mut scratch)?;
        }
        Ok(())
    }
}

/// Density of `scenario` at one point. Grid samples equal this bit for bit.
pub fn evaluate_point(scenario: &Scenario, x: f64, z: f64) -> Result<f64> {
    plan_row(scenario, z)?.density(x, &mut Vec::new())
}

/// Density along `xs` at a fixed `z`, single-threaded.
pub fn evaluate_profile(scenario: &Scenario, z: f64, xs: &[f64]) -> Result<Profile> {
    let plan = plan_row(scenario, z)?;
    let mut p = vec![0.0; xs.len()];
    plan.fill(xs, &mut p)?;
    Ok(Profile { z, x: xs.to_vec(), p })
}

/// Per-source complex fields along `xs` at one wavelength: `out[s][i]`.
pub(crate) fn source_fields(scenario: &Scenario, z: f64, xs: &[f64]) -> Result<Vec<Vec<Complex64>>> {
    let form = row_form(scenario, z)?;
    scenario
        .source
        .x_positions
        .iter()
        .map(|&x_s| {
            let req = scenario.request(x_s, &scenario.particle)?;
            let plane = match form {
                RowForm::Between => req.between_plane(z)?,
                RowForm::Behind => req.behind_plane(z)?,
            };
            Ok(xs.iter().map(|&x| plane.eval(x)).collect())
        })
        .collect()
}

/// Worker count: `threads` if given, else the machine's available parallelism.
pub fn resolve_threads(threads: Option<usize>) -> usize {
    threads
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Evaluates the density on every grid point. Rows are distributed over
/// `threads` workers; each row is written by exactly one worker and every
/// point is computed independently, so the result does not depend on the
/// worker count.
pub fn evaluate_grid(scenario: &Scenario, grid: &GridSpec, threads: Option<usize>) -> Result<DensityField> {
    scenario.validate()?;
    grid.validate()?;
    let zs = grid.zs();
    for &z in &zs {
        row_form(scenario, z)?;
    }
    let xs = grid.xs();
    let mut values = vec![0.0; grid.nx * grid.nz];
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(resolve_threads(threads))
        .build()
        .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        values
            .par_chunks_mut(grid.nx)
            .zip(zs.par_iter())
            .try_for_each(|(row, &z)| plan_row(scenario, z)?.fill(&xs, row))
    })?;
    if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::NumericalConsistency(format!(
            "non-finite or negative density {bad}"
        )));
    }
    let extrema = extrema(&values, grid.nx);
    let echo = scenario.echo();
    let fingerprint = hex_digest(format!("{echo}grid = {}\n", grid.describe()).as_bytes());
    Ok(DensityField {
        grid: *grid,
        values,
        extrema,
        fingerprint,
        echo,
    })
}

fn extrema(values: &[f64], nx: usize) -> Extrema {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut arg = 0;
    for (i, &v) in values.iter().enumerate() {
        min = min.min(v);
        if v > max {
            max = v;
            arg = i;
        }
    }
    Extrema {
        min,
        max,
        argmax: (arg % nx, arg / nx),
    }
}

/// Nearest grid row to `z` (ties go to the lower row), reported at its own z.
pub fn cross_section(field: &DensityField, z: f64) -> Result<Profile> {
    let g = &field.grid;
    if !(z >= g.z_min && z <= g.z_max) {
        return Err(Error::domain(format!(
            "z = {z} outside the grid range {} .. {}",
            g.z_min, g.z_max
        )));
    }
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for j in 0..g.nz {
        let d = (g.z(j) - z).abs();
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    Ok(Profile {
        z: g.z(best),
        x: g.xs(),
        p: field.row(best).to_vec(),
    })
}
