//! Fixed inputs shared by the benchmarks.

use tlsim_core::fieldgrid::GridSpec;
use tlsim_core::physics::C60_MASS;
use tlsim_core::presets::{preset, PresetKind};
use tlsim_core::{GratingSpec, Particle, PathContext, Scenario, SourcePoint};

/// One slit pair at the reference geometry.
pub fn single_path(k1: u32) -> PathContext {
    PathContext {
        particle: Particle::from_wavelength(C60_MASS, 5e-12).expect("valid particle"),
        g0: GratingSpec::new(1, 500e-9, 37.5e-9, 0.0).expect("valid grating"),
        g1: GratingSpec::with_comb(1, 500e-9, 75e-9, 0.05, k1, 1.5).expect("valid grating"),
        source: SourcePoint::finite(0.0, -0.5),
        x0: 250e-9,
        x1: Some(-250e-9),
    }
}

/// The fig4a scenario and its full-size grid.
pub fn fig4a() -> (Scenario, GridSpec) {
    match preset("fig4a").expect("known preset").kind {
        PresetKind::Field { scenario, grid, .. } => (scenario, grid),
        _ => unreachable!("fig4a is a field preset"),
    }
}

/// `grid` resampled to `nx` by `nz`.
pub fn resample(grid: &GridSpec, nx: usize, nz: usize) -> GridSpec {
    GridSpec::new(grid.x_min, grid.x_max, grid.z_min, grid.z_max, nx, nz).expect("valid grid")
}
