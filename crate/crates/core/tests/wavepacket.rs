use phasetime_core::spectral::GaussianSpectrum;
use phasetime_core::wavepacket::*;
use phasetime_core::{phase_times, BarrierConfig};

fn q() -> QuadratureSpec {
    QuadratureSpec::default()
}

#[test]
fn free_peak_moves_at_group_velocity() {
    let s = GaussianSpectrum::new(8.0, 1.0).unwrap();
    let x = linspace(-5.0, 15.0, 801).unwrap();
    let dx = x[1] - x[0];
    let p0 = synthesize_incident(&s, &x, 0.0, 1.0, &q())
        .unwrap()
        .0
        .peak()
        .position;
    for &t in &[0.2, 0.5, 1.0] {
        let p = synthesize_incident(&s, &x, t, 1.0, &q())
            .unwrap()
            .0
            .peak()
            .position;
        assert!((p - p0 - 8.0 * t).abs() < dx, "t={t}");
    }
}

#[test]
fn centroid_velocity_and_spreading() {
    let s = GaussianSpectrum::new(8.0, 1.0).unwrap();
    let x = linspace(-10.0, 40.0, 2001).unwrap();
    let mut last_width = 0.0;
    let mut centroids = Vec::new();
    for &t in &[0.0, 1.0, 2.0, 3.0] {
        let f = synthesize_incident(&s, &x, t, 1.0, &q()).unwrap().0;
        let c = f.centroid();
        let var = {
            let d = f.density();
            let n = f.norm();
            x.windows(2)
                .enumerate()
                .map(|(i, p)| {
                    0.5 * (p[1] - p[0])
                        * ((p[0] - c).powi(2) * d[i] + (p[1] - c).powi(2) * d[i + 1])
                })
                .sum::<f64>()
                / n
        };
        assert!(var > last_width);
        last_width = var;
        centroids.push((t, c));
    }
    let v = (centroids[3].1 - centroids[0].1) / 3.0;
    assert!((v / 8.0 - 1.0).abs() < 1e-3, "{v}");
}

#[test]
fn transmitted_without_barrier_is_free_packet() {
    let s = GaussianSpectrum::new(5.0, 1.0).unwrap();
    let b = BarrierConfig::from_wavenumber(20.0, 0.0).unwrap();
    let x = linspace(0.0, 6.0, 61).unwrap();
    let t = synthesize_transmitted(&s, &b, &x, 0.0, &q()).unwrap().0;
    let f = synthesize_incident(&s, &x, 0.0, 1.0, &q()).unwrap().0;
    for (a, b) in t.psi().iter().zip(f.psi()) {
        // the free packet stops at k₀ + 8/a, the transmitted one at w
        assert!((a - b).norm() < 1e-7);
    }
    let env = s.amplitude(5.0) * 2.0 * std::f64::consts::PI.sqrt() / std::f64::consts::TAU;
    assert!((t.psi()[0].norm() - env).abs() < 1e-2 * env);
}

#[test]
fn transmission_removes_weight() {
    let s = GaussianSpectrum::new(1.0, 1.0).unwrap();
    let b = BarrierConfig::from_wavenumber(4.0, 0.3).unwrap();
    let x = linspace(0.15, 40.15, 2001).unwrap();
    let xi = linspace(-20.0, 40.0, 3001).unwrap();
    let tr = synthesize_transmitted(&s, &b, &x, 8.0, &q()).unwrap().0;
    let inc = synthesize_incident(&s, &xi, 0.0, 1.0, &q()).unwrap().0;
    assert!(tr.norm() < inc.norm());
}

#[test]
fn quadrature_doubling_is_converged() {
    let s = GaussianSpectrum::new(1.0, 1.0).unwrap();
    let b = BarrierConfig::from_wavenumber(4.0, 0.2).unwrap();
    let x = linspace(0.1, 8.1, 81).unwrap();
    let (f, r) = synthesize_transmitted(&s, &b, &x, 2.0, &q()).unwrap();
    assert!(r.probe_change < 1e-8);
    let fixed = QuadratureSpec {
        panels: Some(r.panels),
        ..q()
    };
    // a run started at the accepted panel count doubles once more
    let (g, _) = synthesize_transmitted(&s, &b, &x, 2.0, &fixed).unwrap();
    let scale = f.psi().iter().map(|p| p.norm()).fold(0.0, f64::max);
    for (a, c) in f.psi().iter().zip(g.psi()) {
        assert!((a - c).norm() < 1e-8 * scale);
    }
    let starved = QuadratureSpec {
        panels: Some(1),
        max_panels: 2,
        ..q()
    };
    assert!(matches!(
        synthesize_transmitted(&s, &b, &x, 2.0, &starved),
        Err(phasetime_core::Error::Convergence { .. })
    ));
    assert!(synthesize_transmitted(&s, &b, &linspace(0.0, 1.0, 5).unwrap(), 0.0, &q()).is_err());
}

#[test]
fn free_arrival_at_plane() {
    let s = GaussianSpectrum::new(8.0, 1.0).unwrap();
    let x = linspace(-4.0, 12.0, 401).unwrap();
    let times = linspace(0.0, 1.2, 25).unwrap();
    let fields: Vec<_> = times
        .iter()
        .map(|&t| synthesize_incident(&s, &x, t, 1.0, &q()).unwrap().0)
        .collect();
    let r = track_peak(&fields, (-4.0, 12.0), 5.0).unwrap();
    let t = r.arrival.time().unwrap();
    assert!((t - 5.0 / 8.0).abs() < times[1] - times[0]);
    assert!(!r.multimodal);
}

#[test]
fn collision_is_mirror_symmetric() {
    let s = GaussianSpectrum::new(1.0, 1.0).unwrap();
    let b = BarrierConfig::from_wavenumber(4.0, 0.5).unwrap();
    let x = linspace(-8.0, 8.0, 321).unwrap();
    let t0 = collision_start(&s, &b);
    for &t in &[t0, 0.0, 1.0, 3.0] {
        let f = synthesize_collision(&s, &b, &x, t, &q()).unwrap().0;
        assert!(mirror_residual(&f).unwrap() < 1e-10, "t={t}");
    }
    assert!(synthesize_collision(&s, &b, &x, t0 - 0.1, &q()).is_err());
}

#[test]
fn collision_outgoing_spectrum_is_incident_gaussian() {
    let s = GaussianSpectrum::new(1.0, 1.0).unwrap();
    for &l in &[0.1, 1.0, 5.0] {
        let b = BarrierConfig::from_wavenumber(4.0, l).unwrap();
        let c = outgoing_spectrum_check(&s, &b, &q()).unwrap();
        assert!(c.max_modulus_error < 1e-8);
        assert!(c.weight_error() < 1e-8);
    }
}

#[test]
fn collision_delay_matches_scattering_time() {
    // narrow spectrum: α ≈ 1.7
    let s = GaussianSpectrum::new(20.0, 1.0).unwrap();
    let b = BarrierConfig::from_wavenumber(40.0, 0.05).unwrap();
    let x = linspace(0.025, 6.0, 301).unwrap();
    let t0 = collision_start(&s, &b);
    let times = linspace(t0, t0 + 0.4, 41).unwrap();
    let d = collision_delay(&s, &b, &x, &times, 4.0, &q()).unwrap();
    let e = d.empirical.unwrap();
    let expected = phase_times::scattering_phase_time(20.0, &b).unwrap().time();
    assert!((e - expected).abs() < 0.01 * expected, "{e} {expected}");
}

#[test]
fn thick_barrier_is_flagged() {
    let s = GaussianSpectrum::new(1.0, 1.0).unwrap();
    let b = BarrierConfig::from_wavenumber(4.0, 1.0).unwrap();
    let x = linspace(0.5, 12.5, 601).unwrap();
    let times = linspace(0.0, 6.0, 121).unwrap();
    let c = spm_comparison(&s, &b, &x, &times, 5.0, &q()).unwrap();
    assert!(c.filter_effect);
    assert!(c.multimodal);
}
