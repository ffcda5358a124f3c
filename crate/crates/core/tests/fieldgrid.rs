use tlsim_core::fieldgrid::{
    cross_section, evaluate_grid, evaluate_point, evaluate_profile, export_field, read_csv, ExportFormat, GridSpec,
};
use tlsim_core::presets::{preset, reference_talbot_length, PresetKind};
use tlsim_core::superposition::{density, superpose_behind, superpose_between};
use tlsim_core::{Scenario, ZPlane};

fn fig4a() -> (Scenario, GridSpec) {
    match preset("fig4a").unwrap().kind {
        PresetKind::Field { scenario, grid, .. } => (scenario, grid),
        _ => unreachable!(),
    }
}

fn small(grid: &GridSpec) -> GridSpec {
    GridSpec::new(grid.x_min, grid.x_max, grid.z_min, grid.z_max, 80, 60).unwrap()
}

#[test]
fn grid_samples_equal_direct_calls() {
    let (s, grid) = fig4a();
    let g = small(&grid);
    let f = evaluate_grid(&s, &g, Some(2)).unwrap();
    let req = s.request(0.0, &s.particle).unwrap();
    let z1 = s.g1.z_pos;
    for k in 0..10 {
        let (ix, iz) = ((k * 37 + 3) % g.nx, (k * 13 + 5) % g.nz);
        let (x, z) = (g.x(ix), g.z(iz));
        let direct = if z <= z1 {
            density(superpose_between(&req, x, z).unwrap())
        } else {
            density(superpose_behind(&req, x, z).unwrap())
        };
        assert_eq!(f.at(ix, iz).to_bits(), direct.to_bits(), "({ix}, {iz})");
        assert_eq!(f.at(ix, iz).to_bits(), evaluate_point(&s, x, z).unwrap().to_bits());
    }
}

#[test]
fn repeated_and_parallel_runs_are_bit_identical() {
    let (s, grid) = fig4a();
    let g = small(&grid);
    let a = evaluate_grid(&s, &g, Some(1)).unwrap();
    let b = evaluate_grid(&s, &g, Some(3)).unwrap();
    let c = evaluate_grid(&s, &g, Some(1)).unwrap();
    assert_eq!(a.values, b.values);
    assert_eq!(a.values, c.values);
    assert_eq!(a.fingerprint, b.fingerprint);
    assert_eq!(a.values_digest(), b.values_digest());
}

#[test]
fn csv_export_of_evaluated_grid_round_trips() {
    let (s, grid) = fig4a();
    let g = GridSpec::new(grid.x_min, grid.x_max, 0.02, 0.12, 17, 9).unwrap();
    let f = evaluate_grid(&s, &g, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    export_field(&f, ExportFormat::Csv, &path).unwrap();
    let rows = read_csv(&path).unwrap();
    assert_eq!(rows.len(), f.values.len());
    for (r, v) in rows.iter().zip(&f.values) {
        assert_eq!(r.2.to_bits(), v.to_bits());
    }
}

#[test]
fn cross_section_matches_profile() {
    let (s, grid) = fig4a();
    let g = small(&grid);
    let f = evaluate_grid(&s, &g, None).unwrap();
    let row = 41;
    let cs = cross_section(&f, g.z(row)).unwrap();
    let pr = evaluate_profile(&s, g.z(row), &g.xs()).unwrap();
    assert_eq!(cs.p, pr.p);
}

#[test]
fn source_position_moves_pattern() {
    let (s, _) = fig4a();
    let mut off = s.clone();
    off.source.x_positions = vec![2e-6];
    let z = 0.1;
    let a = evaluate_point(&s, 0.0, z).unwrap();
    let b = evaluate_point(&off, 0.0, z).unwrap();
    assert_ne!(a, b);
    assert!(matches!(off.source.plane, ZPlane::Finite(_)));
}

#[test]
fn focusing_profiles_carry_similar_weight() {
    // the three fig16 cross-sections hold comparable probability within the window
    let p = preset("fig16").unwrap();
    let PresetKind::Profiles { cases, xs } = p.kind else {
        unreachable!()
    };
    let integrals: Vec<f64> = cases
        .iter()
        .map(|c| evaluate_profile(&c.scenario, c.z, &xs).unwrap().integral())
        .collect();
    let first = integrals[0];
    for v in &integrals {
        assert!((v - first).abs() < 0.05 * first, "{integrals:?}");
    }
    let zt = reference_talbot_length();
    assert!((cases[1].z / zt - 0.513).abs() < 1e-12);
}
