use amdyn::measure::{
    iterate_to_stationary, kolmogorov_distance_samples, IterationMode, OrbitSamples, PiecewiseDensity,
};
use amdyn::resonant::{cylinder_mass, ifs_apply, symbolic_weights, Geometry};
use amdyn::{AmSystem, ResonantSystem};

fn transfer_estimate(sys: &AmSystem, p: f64, n: usize, mode: IterationMode) -> PiecewiseDensity {
    iterate_to_stationary(sys, p, &PiecewiseDensity::uniform(), n, 1e-300, mode)
        .unwrap()
        .density
}

fn pinned() -> Vec<(AmSystem, f64)> {
    vec![
        (AmSystem::new(2.0 / 3.0, 2.0, 2.0 / 3.0, 2.0).unwrap(), 0.5),
        (AmSystem::new(0.5, 4.0, 0.5, 4.0).unwrap(), 0.5),
        (AmSystem::new(0.5, 3.0, 0.5, 3.0).unwrap(), 0.5),
        (AmSystem::new(0.6, 2.5, 0.7, 3.0).unwrap(), 0.45),
        (ResonantSystem::new(0.45, 5, 2, 0.5).unwrap().system(), 0.5),
    ]
}

#[test]
fn transfer_operator_matches_orbit_statistics() {
    for (i, (sys, p)) in pinned().iter().enumerate() {
        assert!(sys.lyapunov_exponents(*p).unwrap().both_positive());
        let samples = OrbitSamples::simulate(sys, *p, 1000, 1_000_000, 100 + i as u64).unwrap();
        let direct = kolmogorov_distance_samples(&transfer_estimate(sys, *p, 60, IterationMode::Direct), &samples);
        assert!(direct < 0.01, "system {i}: direct distance {direct}");
        // Cesaro means from the uniform start carry an O(1/N) transient
        let c60 = kolmogorov_distance_samples(&transfer_estimate(sys, *p, 60, IterationMode::Cesaro), &samples);
        let c120 = kolmogorov_distance_samples(&transfer_estimate(sys, *p, 120, IterationMode::Cesaro), &samples);
        assert!(c60 < 0.025, "system {i}: Cesaro distance {c60}");
        if c60 > 0.005 {
            let ratio = c60 / c120;
            assert!((1.5..2.5).contains(&ratio), "system {i}: Cesaro error ratio {ratio}");
        }
    }
}

#[test]
fn cylinder_frequencies_alternate_sides() {
    // p_minus != 1/2 so beta^- and beta^+ differ and the alternation shows
    let p = 0.4;
    let res = ResonantSystem::new(0.5, 2, 1, p).unwrap();
    let w = symbolic_weights(2, p).unwrap();
    let (lo, hi) = Geometry::from_system(&res).unwrap().base_interval(-1);
    let samples = OrbitSamples::simulate(&res.system(), p, 1000, 2_000_000, 21).unwrap();
    let phi = |r: u32, x: f64| ifs_apply(0.5, 2, 1, r, &[], x).unwrap();
    for r1 in 1..=2 {
        for r2 in 1..=2 {
            let (a, b) = (phi(r1, phi(r2, lo)), phi(r1, phi(r2, hi)));
            let f = samples.fraction_between(a.min(b), a.max(b));
            let m = cylinder_mass(&w, -1, &[r1, r2]).unwrap();
            assert!((f - m).abs() < 0.005, "I(-1; {r1}, {r2}): frequency {f}, predicted {m}");
        }
    }
}
