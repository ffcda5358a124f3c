use tlsim_core::coherence::{coherence_sweep, logspace, resonance_scan};
use tlsim_core::physics::{talbot_length, C60_MASS};
use tlsim_core::presets::{preset, source_line, PresetKind};
use tlsim_core::{Coherence, GratingSpec, Particle, Scenario, SourceSpec, ZPlane};

fn line_scenario() -> Scenario {
    let zt = talbot_length(500e-9, 5e-12).unwrap();
    Scenario::new(
        Particle::from_wavelength(C60_MASS, 5e-12).unwrap(),
        GratingSpec::new(32, 500e-9, 37.5e-9, 0.0).unwrap(),
        GratingSpec::new(33, 500e-9, 75e-9, 0.5 * zt).unwrap(),
        source_line(Coherence::Full),
    )
    .unwrap()
}

#[test]
fn visibility_does_not_rise_as_coherence_shrinks() {
    let sigmas = logspace(1e-8, 1e-4, 17);
    let sweep = coherence_sweep(&line_scenario(), &sigmas, 801).unwrap();
    for w in sweep.windows(2) {
        // w[0] has the smaller sigma
        assert!(w[0].1.visibility <= w[1].1.visibility + 0.02, "{:?}", w);
    }
    for (_, m) in &sweep {
        assert!((0.0..=1.0).contains(&m.visibility));
        assert!(m.p_min <= m.p_max);
    }
}

#[test]
fn three_point_sigma_scan_ascends() {
    let sweep = coherence_sweep(&line_scenario(), &[0.1e-6, 1e-6, 10e-6], 801).unwrap();
    assert!(sweep[0].1.visibility < sweep[1].1.visibility);
    assert!(sweep[1].1.visibility < sweep[2].1.visibility);
}

#[test]
fn three_point_lambda_scan_peaks_at_5pm() {
    let zt = talbot_length(500e-9, 5e-12).unwrap();
    let s = Scenario::new(
        Particle::from_wavelength(C60_MASS, 5e-12).unwrap(),
        GratingSpec::new(8, 500e-9, 37.5e-9, 0.0).unwrap(),
        GratingSpec::new(9, 500e-9, 75e-9, 0.5 * zt).unwrap(),
        SourceSpec::point(0.0, ZPlane::MinusInfinity),
    )
    .unwrap();
    let scan = resonance_scan(&s, &[3e-12, 5e-12, 7e-12], 801).unwrap();
    assert!(scan[1].p_max > scan[0].p_max && scan[1].p_max > scan[2].p_max);
    assert!((scan[1].velocity - 110.4).abs() < 0.1, "{}", scan[1].velocity);
}

#[test]
fn fig11_scan_peaks_near_110_m_per_s() {
    let p = preset("fig11").unwrap();
    let PresetKind::ResonanceScan {
        scenario,
        lambdas,
        samples,
    } = p.kind
    else {
        unreachable!()
    };
    let scan = resonance_scan(&scenario, &lambdas, samples).unwrap();
    let best = scan.iter().max_by(|a, b| a.p_max.total_cmp(&b.p_max)).unwrap();
    assert!((best.velocity - 110.0).abs() < 5.0, "{}", best.velocity);
}
