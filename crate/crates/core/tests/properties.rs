use std::collections::BTreeMap;

use proptest::prelude::*;

use nes::analysis::{fit_loglog_slope, hierarchy_check, scaling_thresholds};
use nes::dynamics::{averaged_rom_rhs, blm_rhs, nes_rhs, partially_averaged_rhs};
use nes::equilibria::{best_response, h_prime, reduced_cost, stackelberg_equilibrium};
use nes::expr::{eval_ast, parse_cost_expr};
use nes::games::{fish_war_game, quadratic_game, FishWarParams};
use nes::integrate::{fmt_g17, rk4_integrate, FnField, IntegrationSpec};
use nes::{Game, NesParams, Partial, State2};

fn fish() -> Game {
    fish_war_game(FishWarParams::default()).unwrap()
}

/// Random expression source text over x1, x2 and the parameter `p`.
fn expr_source() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("x1".to_string()),
        Just("x2".to_string()),
        Just("p".to_string()),
        (-5.0f64..5.0).prop_map(|c| format!("{c:.3}")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone(), prop::sample::select(vec!["+", "-", "*", "/"]))
                .prop_map(|(a, b, op)| format!("({a}) {op} ({b})")),
            (inner.clone(), 0u32..4).prop_map(|(a, k)| format!("({a})^{k}")),
            inner.clone().prop_map(|a| format!("-({a})")),
            (inner, prop::sample::select(vec!["exp", "sin", "cos", "abs", "sqrt", "log"]))
                .prop_map(|(a, f)| if f == "exp" { format!("exp(sin({a}))") } else { format!("{f}({a})") }),
        ]
    })
}

fn same(a: f64, b: f64) -> bool {
    (a.is_nan() && b.is_nan()) || a == b || (a - b).abs() <= 1e-12 * a.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_expressions_reparse_to_equivalent_trees(src in expr_source()) {
        let params = BTreeMap::from([("p".to_string(), 0.7)]);
        let ast = parse_cost_expr(&src, &params).unwrap();
        let printed = ast.to_string();
        let again = parse_cost_expr(&printed, &params).unwrap();
        for i in 0..50 {
            let a = -2.0 + 4.0 * (i as f64 * 0.618_033_988_75).fract();
            let b = -2.0 + 4.0 * (i as f64 * 0.414_213_562_37).fract();
            match (eval_ast(&ast, a, b), eval_ast(&again, a, b)) {
                (Ok(u), Ok(v)) => prop_assert!(same(u, v), "{src} vs {printed} at ({a}, {b}): {u} vs {v}"),
                (Err(_), Err(_)) => {}
                (u, v) => prop_assert!(false, "{src} vs {printed}: {u:?} vs {v:?}"),
            }
        }
    }

    #[test]
    fn slope_is_invariant_under_error_scaling(
        errs in prop::collection::vec(1e-6f64..1.0, 3..8),
        scale in 1e-3f64..1e3,
    ) {
        let xs: Vec<f64> = (0..errs.len()).map(|i| 10.0 * 2f64.powi(i as i32)).collect();
        let scaled: Vec<f64> = errs.iter().map(|e| e * scale).collect();
        let a = fit_loglog_slope(&xs, &errs).unwrap();
        let b = fit_loglog_slope(&xs, &scaled).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn hierarchy_report_is_a_pure_function(
        a1 in 1e-3f64..1.0, k1 in 0.1f64..10.0, w1 in 1.0f64..100.0,
        a2 in 1e-3f64..1.0, k2 in 1.0f64..1000.0, r in 1.5f64..100.0,
    ) {
        let p = NesParams::new(a1, k1, w1, a2, k2, w1 * r).unwrap();
        let x = hierarchy_check(&p, 5.0);
        prop_assert_eq!(&x, &hierarchy_check(&p, 5.0));
        prop_assert_eq!(x.stages, [a1 * k1, w1, a2 * k2, w1 * r]);
        prop_assert_eq!(x.ratios, [w1 / (a1 * k1), a2 * k2 / w1, r * w1 / (a2 * k2)]);
        prop_assert_eq!(x.flagged, x.ratios.iter().any(|&q| q < 5.0));
    }

    #[test]
    fn smaller_upsilon_never_lowers_a_threshold(
        u in 0.01f64..1.0, shrink in 0.05f64..0.99,
        c in 0.1f64..10.0, c1 in 0.1f64..10.0, c2 in 0.1f64..10.0, c3 in 0.1f64..10.0,
        a2 in 0.01f64..1.0,
    ) {
        let hi = scaling_thresholds(u, c, c1, c2, c3, a2).unwrap();
        let lo = scaling_thresholds(u * shrink, c, c1, c2, c3, a2).unwrap();
        prop_assert!(lo.omega1_star >= hi.omega1_star);
        prop_assert!(lo.k2_star >= hi.k2_star);
        prop_assert!(lo.omega2_star >= hi.omega2_star);
        prop_assert!(lo.epsilon_star <= hi.epsilon_star);
    }

    #[test]
    fn closed_loop_speed_is_bounded_by_dither_amplitude(
        t in 0.0f64..100.0, a in -3.0f64..3.0, b in -3.0f64..3.0,
    ) {
        let p = NesParams::quadratic_stackelberg();
        let v = nes_rhs(t, State2::new(a, b), &p, &quadratic_game()).unwrap();
        prop_assert!(v.x1.abs() <= (p.alpha1 * p.omega1).sqrt() * (1.0 + 1e-15));
        prop_assert!(v.x2.abs() <= (p.alpha2 * p.omega2).sqrt() * (1.0 + 1e-15));
    }

    #[test]
    fn fish_war_speed_bound_holds_inside_domain(
        t in 0.0f64..100.0, u in 0.05f64..1.1, v in 0.02f64..1.0,
    ) {
        let fp = FishWarParams::default();
        prop_assume!(fp.is_feasible(u, v));
        let p = NesParams::fish_war_nash();
        let s = nes_rhs(t, State2::new(u, v), &p, &fish()).unwrap();
        prop_assert!(s.x1.abs() <= (p.alpha1 * p.omega1).sqrt() * (1.0 + 1e-15));
        prop_assert!(s.x2.abs() <= (p.alpha2 * p.omega2).sqrt() * (1.0 + 1e-15));
    }

    #[test]
    fn follower_field_vanishes_on_the_manifold(t in 0.0f64..50.0, a in -5.0f64..5.0) {
        let g = quadratic_game();
        let p = NesParams::quadratic_stackelberg();
        let h = best_response(&g, a).unwrap();
        let v = partially_averaged_rhs(t, State2::new(a, h), &p, &g).unwrap();
        prop_assert!(v.x2.abs() < 1e-8);
    }

    #[test]
    fn fish_war_follower_field_vanishes_on_the_manifold(a in 0.1f64..1.19) {
        let g = fish();
        let p = NesParams::fish_war_stackelberg();
        let h = best_response(&g, a).unwrap();
        let v = partially_averaged_rhs(0.0, State2::new(a, h), &p, &g).unwrap();
        prop_assert!(v.x2.abs() < 1e-8);
    }

    #[test]
    fn averaged_rom_is_scaled_reduced_gradient(a in 0.15f64..1.19) {
        let g = fish();
        let p = NesParams::fish_war_stackelberg();
        let d = 1e-5;
        let fd = (reduced_cost(&g, a + d).unwrap() - reduced_cost(&g, a - d).unwrap()) / (2.0 * d);
        let want = -0.5 * p.alpha1 * p.k1 * fd;
        let got = averaged_rom_rhs(a, &p, &g).unwrap();
        prop_assert!((got - want).abs() <= 1e-5 * want.abs().max(1e-8), "{got} vs {want}");
    }

    #[test]
    fn best_response_residual_is_tiny(a in 0.05f64..1.2) {
        let g = fish();
        let h = best_response(&g, a).unwrap();
        prop_assert!(g.follower_partial(Partial::D2, a, h).unwrap().abs() < 1e-10);
    }

    #[test]
    fn reduced_cost_obeys_the_chain_rule(a in 0.1f64..1.19) {
        let g = fish();
        let h = best_response(&g, a).unwrap();
        let analytic = g.leader_partial(Partial::D1, a, h).unwrap()
            + g.leader_partial(Partial::D2, a, h).unwrap() * h_prime(&g, a).unwrap();
        let d = 1e-5;
        let fd = (reduced_cost(&g, a + d).unwrap() - reduced_cost(&g, a - d).unwrap()) / (2.0 * d);
        prop_assert!((analytic - fd).abs() <= 1e-5 * analytic.abs().max(1.0));
    }

    #[test]
    fn blm_decays_at_least_at_half_rate(x1 in -2.0f64..2.0, y0 in -3.0f64..3.0) {
        prop_assume!(y0.abs() > 1e-3);
        let g = quadratic_game();
        let blm = FnField::new(1, move |tau, y: &[f64], dy: &mut [f64]| {
            dy[0] = blm_rhs(tau, y[0], x1, &g)?;
            Ok(())
        });
        let tr = rk4_integrate(&blm, &IntegrationSpec::new(0.0, 20.0, 0.01, vec![y0])).unwrap().complete().unwrap();
        for i in 0..tr.len() {
            let bound = y0.abs() * (-0.5 * tr.time(i)).exp() * (1.0 + 1e-6);
            prop_assert!(tr.state(i)[0].abs() <= bound);
        }
    }

    #[test]
    fn rk4_is_bitwise_deterministic(x0 in -5.0f64..5.0, dt in 1e-3f64..0.1, stride in 1usize..5) {
        let f = FnField::new(2, |t, x: &[f64], dx: &mut [f64]| {
            dx[0] = x[1];
            dx[1] = -x[0] + (3.0 * t).cos();
            Ok(())
        });
        let spec = IntegrationSpec::new(0.0, 5.0, dt, vec![x0, 0.0]).with_stride(stride);
        let a = rk4_integrate(&f, &spec).unwrap().complete().unwrap();
        let b = rk4_integrate(&f, &spec).unwrap().complete().unwrap();
        prop_assert_eq!(a.to_csv(), b.to_csv());
        for i in 0..a.len() {
            prop_assert_eq!(fmt_g17(a.time(i)), fmt_g17((i * stride) as f64 * dt));
        }
    }
}

#[test]
fn stackelberg_point_lies_on_the_best_response() {
    for (g, seed) in [(quadratic_game(), 0.0), (fish(), 1.2)] {
        let se = stackelberg_equilibrium(&g, seed).unwrap().point;
        assert!((se.x2 - best_response(&g, se.x1).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn fish_war_costs_are_finite_inside_and_flagged_outside() {
    let fp = FishWarParams::default();
    let g = fish();
    let (mut inside, mut outside) = (0, 0);
    for i in 0..50 {
        for j in 0..50 {
            let u = -0.2 + 1.6 * i as f64 / 49.0;
            let v = -0.2 + 1.6 * j as f64 / 49.0;
            if fp.is_feasible(u, v) {
                inside += 1;
                assert!(g.leader_cost(u, v).unwrap().is_finite());
                assert!(g.follower_cost(u, v).unwrap().is_finite());
            } else {
                outside += 1;
                assert!(g.leader_cost(u, v).unwrap_err().is_domain());
                assert!(g.follower_cost(u, v).unwrap_err().is_domain());
            }
        }
    }
    assert!(inside > 100 && outside > 100);
}

#[test]
fn quadratic_partials_match_finite_differences_tightly() {
    let g = quadratic_game();
    let h = 1e-5;
    for i in 0..40 {
        let a = -3.0 + 0.15 * i as f64;
        let b = 2.0 - 0.1 * i as f64;
        let d1 = (g.leader_cost(a + h, b).unwrap() - g.leader_cost(a - h, b).unwrap()) / (2.0 * h);
        let d2 = (g.follower_cost(a, b + h).unwrap() - g.follower_cost(a, b - h).unwrap()) / (2.0 * h);
        let e1 = (d1 - g.leader_partial(Partial::D1, a, b).unwrap()).abs() / d1.abs().max(1.0);
        let e2 = (d2 - g.follower_partial(Partial::D2, a, b).unwrap()).abs() / d2.abs().max(1.0);
        assert!(e1 < 1e-8 && e2 < 1e-8, "({a}, {b}): {e1:e} {e2:e}");
    }
}
