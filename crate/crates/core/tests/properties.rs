use proptest::prelude::*;

use amdyn::conjugacy::evaluate_h;
use amdyn::dynamics::{detect_jumps, orbit, sample_word, Word};
use amdyn::measure::{transfer_step, PiecewiseDensity};
use amdyn::resonant::{
    build_intervals, cylinder_mass, solve_eta, solve_pressure_zero, symbolic_weights, Geometry,
};
use amdyn::system::{from_resonance, positivity_window, Sign};
use amdyn::{AmSystem, ResonantSystem, SystemClass};

fn am_system() -> impl Strategy<Value = AmSystem> {
    (0.05f64..0.95, 1.05f64..8.0, 0.05f64..0.95, 1.05f64..8.0)
        .prop_map(|(am, bm, ap, bp)| AmSystem::new(am, bm, ap, bp).unwrap())
}

fn signs(n: usize) -> impl Strategy<Value = Word> {
    proptest::collection::vec(prop_oneof![Just(Sign::Minus), Just(Sign::Plus)], 1..n).prop_map(Word::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn maps_are_increasing_and_invertible(sys in am_system(), x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let (x, y) = if x < y { (x, y) } else { (y, x) };
        for s in [Sign::Minus, Sign::Plus] {
            if x < y {
                prop_assert!(sys.apply(s, x).unwrap() < sys.apply(s, y).unwrap());
            }
            let back = sys.apply_inverse(s, sys.apply(s, x).unwrap()).unwrap();
            prop_assert!((back - x).abs() < 1e-12);
        }
        if x > 0.0 {
            prop_assert!(sys.apply(Sign::Minus, x).unwrap() < x);
            prop_assert!(x < sys.apply(Sign::Plus, x).unwrap());
        }
    }

    #[test]
    fn positive_exponents_order_the_kinks(sys in am_system()) {
        if sys.lyapunov_exponents(0.5).unwrap().both_positive() {
            prop_assert!(sys.x_plus() < sys.x_minus());
        }
    }

    #[test]
    fn resonant_systems_are_symmetric(rho in 0.2f64..0.9, k in 2u32..6, l in 1u32..3, m in 0u32..=(1 << 20)) {
        // dyadic x, so 1 - x is exact
        prop_assume!(amdyn::system::gcd(k, l) == 1 && l < k);
        let sys = from_resonance(&ResonantSystem::new(rho, k, l, 0.5).unwrap()).unwrap();
        let x = m as f64 / (1u32 << 20) as f64;
        // the outer 1 - y is the only rounding left
        let lhs = sys.apply(Sign::Minus, 1.0 - x).unwrap();
        let rhs = 1.0 - sys.apply(Sign::Plus, x).unwrap();
        prop_assert!((lhs - rhs).abs() <= f64::EPSILON, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn orbits_are_confined_and_deterministic(sys in am_system(), x0 in 0.0f64..=1.0, seed: u64, p in 0.05f64..0.95) {
        let w = sample_word(seed, 300, p).unwrap();
        let o = orbit(&sys, x0, &w).unwrap();
        prop_assert!(o.points.iter().all(|x| (0.0..=1.0).contains(x)));
        let again = orbit(&sys, x0, &sample_word(seed, 300, p).unwrap()).unwrap();
        prop_assert_eq!(o.points, again.points);
    }

    #[test]
    fn transfer_keeps_mass_and_sign(sys in am_system(), p in 0.05f64..0.95, lo in 0.0f64..0.9, w in 0.01f64..0.1, steps in 1usize..12) {
        let mut d = PiecewiseDensity::block(lo, (lo + w).min(1.0)).unwrap();
        for _ in 0..steps {
            d = transfer_step(&sys, p, &d);
            prop_assert!((d.total_mass() - 1.0).abs() < 1e-12);
            prop_assert!(d.values().iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn dual_conditions_force_border_type(p in 0.1f64..0.9, u in 0.05f64..0.95, v in 0.05f64..0.95) {
        let q = 1.0 - p;
        let a_minus = p + (1.0 - p) * u;
        let a_plus = q + (1.0 - q) * v;
        let sys = AmSystem::new(a_minus, p / (1.0 - q / a_plus), a_plus, q / (1.0 - p / a_minus)).unwrap();
        prop_assert_eq!(sys.classify_type(), SystemClass::Border);
        let d = transfer_step(&sys, p, &PiecewiseDensity::uniform());
        prop_assert!(d.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn cylinders_add_up(k in 2u32..6, t in 0.01f64..0.99, j in -6i64..6, rs in proptest::collection::vec(1u32..6, 0..5)) {
        prop_assume!(j != 0);
        let (lo, hi) = positivity_window(k, 1);
        let p = lo + (hi - lo) * t;
        let w = symbolic_weights(k, p).unwrap();
        let rs: Vec<u32> = rs.into_iter().map(|r| 1 + (r - 1) % k).collect();
        let whole = cylinder_mass(&w, j, &rs).unwrap();
        let mut parts = 0.0;
        for r in 1..=k {
            let mut longer = rs.clone();
            longer.push(r);
            parts += cylinder_mass(&w, j, &longer).unwrap();
        }
        prop_assert!((whole - parts).abs() < 1e-12);
        prop_assert!((w.beta_minus.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!((w.beta_plus.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let sides = w.c_minus * w.eta_minus / (1.0 - w.eta_minus) + w.c_plus * w.eta_plus / (1.0 - w.eta_plus);
        prop_assert!((sides - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pressure_zero_matches_eta(frac in 0.3f64..0.999, kl in prop_oneof![Just((2u32, 1u32)), Just((3, 1)), Just((3, 2)), Just((5, 2)), Just((4, 3))]) {
        let (k, l) = kl;
        let eta = solve_eta(k, l).unwrap();
        let rho = frac * eta;
        let d = solve_pressure_zero(rho, k, l).unwrap();
        prop_assert!((rho.powf(d) - eta).abs() < 1e-9);
    }

    #[test]
    fn jumps_depend_only_on_the_copy(j in prop_oneof![-4i64..=-1, 1i64..=4], s in 0.0f64..1.0, t in 0.0f64..1.0, word in signs(60)) {
        let res = ResonantSystem::new(0.5, 2, 1, 0.5).unwrap();
        let sys = res.system();
        let (lo, hi) = Geometry::from_system(&res).unwrap().base_interval(j);
        let a = orbit(&sys, lo + s * (hi - lo), &word).unwrap();
        let b = orbit(&sys, lo + t * (hi - lo), &word).unwrap();
        prop_assert_eq!(detect_jumps(&sys, &a).unwrap().times, detect_jumps(&sys, &b).unwrap().times);
    }

    #[test]
    fn conjugacy_is_monotone_and_invertible(x in 0.001f64..0.999, dx in 1e-6f64..0.1, pair in prop_oneof![Just((0.5, 0.55, 2u32, 1u32)), Just((0.4, 0.3, 3, 1)), Just((0.45, 0.5, 5, 2))]) {
        let (rf, rg, k, l) = pair;
        let f = ResonantSystem::new(rf, k, l, 0.5).unwrap();
        let g = ResonantSystem::new(rg, k, l, 0.5).unwrap();
        let tol = 1e-10;
        let hx = evaluate_h(&f, &g, x, tol).unwrap();
        prop_assert!((evaluate_h(&g, &f, hx, tol).unwrap() - x).abs() < 10.0 * tol);
        let y = (x + dx).min(0.999);
        if y - x > 2.0 * tol {
            prop_assert!(evaluate_h(&f, &g, y, tol).unwrap() > hx);
        }
    }
}

fn disjoint_or_touching(ivs: &[(f64, f64)], slack: f64) -> bool {
    let mut v = ivs.to_vec();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v.windows(2).all(|w| w[1].0 >= w[0].1 - slack)
}

#[test]
fn emitted_intervals_are_disjoint() {
    for (rho, k, l) in [(0.5, 2, 1), (0.4, 3, 1), (0.45, 5, 2), (0.5, 3, 2)] {
        let ivs = build_intervals(rho, k, l, 4, 3).unwrap();
        let hulls: Vec<(f64, f64)> = ivs.iter().filter(|iv| iv.hull || l == 1).map(|iv| (iv.lo, iv.hi)).collect();
        assert!(disjoint_or_touching(&hulls, 1e-12), "hulls overlap for ({rho}, {k}, {l})");
        let leaves: Vec<(f64, f64)> = ivs.iter().filter(|iv| !iv.hull).map(|iv| (iv.lo, iv.hi)).collect();
        assert!(disjoint_or_touching(&leaves, 1e-12), "intervals overlap for ({rho}, {k}, {l})");
    }
}

#[test]
fn emitted_intervals_map_into_emitted_intervals() {
    for (rho, k, l) in [(0.5, 2, 1), (0.4, 3, 1), (0.45, 5, 2)] {
        let sys = ResonantSystem::new(rho, k, l, 0.5).unwrap().system();
        let source = build_intervals(rho, k, l, 3, 1).unwrap();
        let target = build_intervals(rho, k, l, 3 + k + l, 3).unwrap();
        for iv in source.iter().filter(|iv| !iv.hull) {
            for s in [Sign::Minus, Sign::Plus] {
                let (a, b) = (sys.apply(s, iv.lo).unwrap(), sys.apply(s, iv.hi).unwrap());
                let slack = 1e-12;
                let hit = target
                    .iter()
                    .any(|t| t.lo - slack <= a && b <= t.hi + slack);
                assert!(hit, "({rho}, {k}, {l}) {} under {s:?} -> [{a}, {b}] lands in no interval", iv.code_string());
            }
        }
    }
}
