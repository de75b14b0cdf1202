//! Property tests over randomly generated models and parameter points.

mod common;

use kolmogorov::classify::{classify_equilibrium, eigen2, EigenKind};
use kolmogorov::equilibria::{all_equilibria, axis1_equilibria, discriminant};
use kolmogorov::par::Execution;
use kolmogorov::portrait::{integrate, phase_portrait, IntegrateOptions, PortraitSpec};
use kolmogorov::report::{analyze_point, class_tuple, is_admissible};
use kolmogorov::{presets, DegeneracyCase, ParamPoint, Rect, StatePoint, SystemModel, Tolerances};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn model_from(seed: u64, case_a: bool) -> SystemModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let case = if case_a { DegeneracyCase::CaseA } else { DegeneracyCase::CaseB };
    common::random_model(&mut rng, case)
}

fn family(k: usize) -> SystemModel {
    if k < 9 {
        presets::family_g(k + 1)
    } else {
        presets::family_f(k - 8)
    }
}

fn mu_in(r: f64) -> impl Strategy<Value = ParamPoint> {
    (0.0..=1.0f64, 0.0..std::f64::consts::TAU).prop_map(move |(rho, phi)| {
        let rho = r * rho.sqrt();
        ParamPoint::new(rho * phi.cos(), rho * phi.sin())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn coordinate_axes_are_invariant(seed in any::<u64>(), a in any::<bool>(), mu in mu_in(0.1), s in -2.0..2.0f64) {
        let m = model_from(seed, a);
        prop_assert_eq!(m.eval_field(mu, StatePoint::new(0.0, s)).unwrap().0, 0.0);
        prop_assert_eq!(m.eval_field(mu, StatePoint::new(s, 0.0)).unwrap().1, 0.0);
    }

    #[test]
    fn origin_jacobian_is_diag_mu(seed in any::<u64>(), a in any::<bool>(), mu in mu_in(0.1)) {
        let j = model_from(seed, a).jacobian(mu, StatePoint::ORIGIN).unwrap();
        prop_assert_eq!(j, [[mu.mu1, 0.0], [0.0, mu.mu2]]);
    }

    #[test]
    fn jacobian_matches_central_differences(
        seed in any::<u64>(), a in any::<bool>(), mu in mu_in(0.5), x in -0.5..0.5f64, y in -0.5..0.5f64,
    ) {
        let m = model_from(seed, a).with_radius(1.0).unwrap();
        let j = m.jacobian(mu, StatePoint::new(x, y)).unwrap();
        let h = 1e-6;
        let f = |x, y| m.eval_field(mu, StatePoint::new(x, y)).unwrap();
        let (px, mx) = (f(x + h, y), f(x - h, y));
        let (py, my) = (f(x, y + h), f(x, y - h));
        let fd = [[(px.0 - mx.0) / (2.0 * h), (py.0 - my.0) / (2.0 * h)], [(px.1 - mx.1) / (2.0 * h), (py.1 - my.1) / (2.0 * h)]];
        for r in 0..2 {
            for c in 0..2 {
                prop_assert!((j[r][c] - fd[r][c]).abs() <= 1e-6, "J[{r}][{c}] = {} vs {}", j[r][c], fd[r][c]);
            }
        }
    }

    #[test]
    fn second_directional_is_even(seed in any::<u64>(), mu in mu_in(0.1), x in -0.5..0.5f64, y in -0.5..0.5f64, v in prop::array::uniform2(-1.0..1.0f64)) {
        let m = model_from(seed, true);
        let p = StatePoint::new(x, y);
        prop_assert_eq!(m.second_directional(mu, p, v).unwrap(), m.second_directional(mu, p, [-v[0], -v[1]]).unwrap());
    }

    #[test]
    fn json_round_trip_is_exact(seed in any::<u64>(), a in any::<bool>()) {
        let m = model_from(seed, a);
        let back = SystemModel::from_json_str(&m.to_json_string()).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(back.to_json_string(), m.to_json_string());
    }

    #[test]
    fn refined_equilibria_have_small_residual(seed in any::<u64>(), a in any::<bool>(), mu in mu_in(0.05)) {
        let m = model_from(seed, a);
        let t = Tolerances::default();
        for (id, eq) in all_equilibria(&m, mu, &t).unwrap() {
            let eq = match eq { Ok(e) => e, Err(_) => continue };
            if !eq.exists() {
                continue;
            }
            let (f1, f2) = m.eval_field(mu, eq.point).unwrap();
            prop_assert!(f1.abs().max(f2.abs()) <= 1e-10, "{id}: residual ({f1:e}, {f2:e})");
            prop_assert_eq!(eq.is_proper(), eq.point.xi1 >= -t.properness_tie && eq.point.xi2 >= -t.properness_tie);
        }
    }

    #[test]
    fn axis_roots_satisfy_vieta(seed in any::<u64>(), mu in mu_in(0.05)) {
        let m = model_from(seed, true);
        let t = Tolerances::default();
        prop_assume!(discriminant(&m, mu).unwrap() >= 0.0);
        let (e11, e12) = axis1_equilibria(&m, mu, &t).unwrap();
        let c = m.coeffs(mu).unwrap();
        let (sum, prod) = (e11.point.xi1 + e12.point.xi1, e11.point.xi1 * e12.point.xi1);
        prop_assert!((sum - c.theta / c.big_n).abs() <= 1e-12, "sum {sum} vs {}", c.theta / c.big_n);
        prop_assert!((prod - c.mu1 / c.big_n).abs() <= 1e-12, "product {prod} vs {}", c.mu1 / c.big_n);
    }

    #[test]
    fn eigenvalues_reproduce_trace_and_det(m in prop::array::uniform4(-1.0..1.0f64)) {
        let j = [[m[0], m[1]], [m[2], m[3]]];
        let rep = eigen2(&j).unwrap();
        let (tr, det) = (m[0] + m[3], m[0] * m[3] - m[1] * m[2]);
        match rep.kind {
            EigenKind::RealPair { l1, l2 } => {
                prop_assert!(l1 >= l2);
                prop_assert!((l1 + l2 - tr).abs() <= 1e-12);
                prop_assert!((l1 * l2 - det).abs() <= 1e-12);
            }
            EigenKind::ComplexPair { p, omega } => {
                prop_assert!(omega > 0.0);
                prop_assert!((p * p + omega * omega - det).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn family_tuples_are_admissible(k in 0usize..13, mu in mu_in(0.02)) {
        let m = family(k);
        let case = m.classify_case().unwrap();
        let t = class_tuple(&analyze_point(&m, case, mu, &Tolerances::default()));
        prop_assert!(is_admissible(case, &t), "family {k}: {t} at {mu:?}");
    }

    #[test]
    fn analysis_is_deterministic(seed in any::<u64>(), a in any::<bool>(), mu in mu_in(0.05)) {
        let m = model_from(seed, a);
        let case = m.classify_case().unwrap();
        let t = Tolerances::default();
        prop_assert_eq!(analyze_point(&m, case, mu, &t), analyze_point(&m, case, mu, &t));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn trajectories_stay_in_the_quadrant(
        k in 0usize..13, mu in mu_in(0.03), x in 0.0..0.05f64, y in 0.0..0.05f64, on_axis in 0u8..3,
    ) {
        let m = family(k);
        let xi0 = match on_axis {
            0 => StatePoint::new(x, y),
            1 => StatePoint::new(x, 0.0),
            _ => StatePoint::new(0.0, y),
        };
        let tr = integrate(&m, mu, xi0, 1e4, &IntegrateOptions::default(), &Tolerances::default()).unwrap();
        prop_assert!(tr.min_coordinate() >= -1e-10, "min coordinate {:e}", tr.min_coordinate());
        if on_axis == 1 {
            prop_assert!(tr.samples.iter().all(|(_, p)| p.xi2 == 0.0));
        }
        if on_axis == 2 {
            prop_assert!(tr.samples.iter().all(|(_, p)| p.xi1 == 0.0));
        }
        for w in tr.samples.windows(2) {
            prop_assert!(w[1].0 > w[0].0);
        }
    }

    #[test]
    fn portraits_are_deterministic(mu in mu_in(0.02)) {
        let m = presets::ma();
        let mut spec = PortraitSpec::new(Rect::new(0.0, 0.05, 0.0, 0.05));
        spec.seeds_per_side = 2;
        spec.t_max = 2e3;
        let t = Tolerances::default();
        let a = phase_portrait(&m, mu, &spec, &t, Execution::Parallel).unwrap();
        let b = phase_portrait(&m, mu, &spec, &t, Execution::Sequential).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn classified_proper_equilibria_agree_with_eigen_signs() {
    let t = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..13 {
        let m = family(k);
        for _ in 0..50 {
            let mu = common::random_mu(&mut rng, 0.02);
            for (_, eq) in all_equilibria(&m, mu, &t).unwrap() {
                let Ok(eq) = eq else { continue };
                if !eq.is_proper() {
                    continue;
                }
                let (rep, class) = classify_equilibrium(&m, mu, &eq, &t).unwrap();
                let (hi, lo) = rep.real_parts();
                match class.code() {
                    'a' => assert!(hi < 0.0),
                    'r' => assert!(lo > 0.0),
                    's' => assert!(hi > 0.0 && lo < 0.0),
                    _ => {}
                }
            }
        }
    }
}
