use std::path::PathBuf;

use nes::equilibria::{convexity_report, nash_equilibrium, stackelberg_equilibrium, Rect};
use nes::games::{game_from_config_str, load_game, quadratic_game};
use nes::{NesError, Partial, State2};

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs").join(name)
}

#[test]
fn config_copy_of_quadratic_game_agrees_with_builtin() {
    let cfg = load_game(config_path("quadratic.json")).unwrap();
    let builtin = quadratic_game();
    for i in 0..100 {
        let a = -3.0 + 6.0 * ((i * 37) % 100) as f64 / 99.0;
        let b = -3.0 + 6.0 * ((i * 61) % 100) as f64 / 99.0;
        let dl = cfg.leader_cost(a, b).unwrap() - builtin.leader_cost(a, b).unwrap();
        let df = cfg.follower_cost(a, b).unwrap() - builtin.follower_cost(a, b).unwrap();
        assert!(dl.abs() < 1e-12 && df.abs() < 1e-12, "mismatch at ({a}, {b})");
    }
    let ne = nash_equilibrium(&cfg, State2::new(0.0, 0.0)).unwrap().point;
    assert!(ne.distance(State2::new(0.6, -0.3)) < 1e-8);
    let se = stackelberg_equilibrium(&cfg, 0.0).unwrap().point;
    assert!(se.distance(State2::new(1.0 / 3.0, -5.0 / 6.0)) < 1e-8);
}

#[test]
fn finite_difference_partials_of_config_game_match_hand_derivatives() {
    let g = load_game(config_path("quadratic.json")).unwrap();
    for &(a, b) in &[(0.0, 0.0), (1.3, -0.7), (-2.5, 2.0)] {
        let d2 = g.follower_partial(Partial::D2, a, b).unwrap();
        assert!((d2 - (b - 2.0 * a + 1.5)).abs() < 1e-6);
        let d12 = g.follower_partial(Partial::D12, a, b).unwrap();
        assert!((d12 + 2.0).abs() < 1e-4);
    }
}

#[test]
fn harvest_config_equilibria_match_closed_form() {
    let g = load_game(config_path("harvest.json")).unwrap();
    // symmetric interior Nash point: x (1 + beta + kappa) = stock
    let x = 2.0 / 2.4;
    let ne = nash_equilibrium(&g, State2::new(0.5, 0.5)).unwrap().point;
    assert!(ne.distance(State2::new(x, x)) < 1e-6, "{ne:?}");
    // leader optimum of the reduced cost with h(x1) = (stock - kappa x1) / (1 + beta)
    let r = 1.0 - 0.25 / 1.9;
    let s = 2.0 - 1.0 / 1.9;
    let x1 = s / (r * 1.9);
    let se = stackelberg_equilibrium(&g, 0.5).unwrap().point;
    assert!((se.x1 - x1).abs() < 1e-6, "{se:?} vs {x1}");
    assert!((se.x2 - (2.0 - 0.5 * x1) / 1.9).abs() < 1e-6);
}

#[test]
fn concave_follower_loads_but_is_flagged() {
    let text = r#"{
        "name": "concave",
        "leader_cost": "x1^2 + x2^2",
        "follower_cost": "-(x2 - x1)^2"
    }"#;
    let g = game_from_config_str(text).unwrap();
    let rep = convexity_report(&g, Rect::new((-1.0, 1.0), (-1.0, 1.0)), 9).unwrap();
    assert!(rep.m2_estimate < 0.0);
    assert!(!rep.follower_strongly_convex());
}

#[test]
fn missing_follower_cost_reports_a_line_number() {
    let text = "{\n  \"name\": \"broken\",\n  \"leader_cost\": \"x1^2\"\n}";
    match game_from_config_str(text) {
        Err(NesError::Config(msg)) => {
            assert!(msg.contains("follower_cost"), "{msg}");
            assert!(msg.contains("line 4"), "{msg}");
        }
        other => panic!("expected config error, got {other:?}"),
    }
}

#[test]
fn bad_expression_reports_its_line() {
    let text = "{\n  \"name\": \"typo\",\n  \"leader_cost\": \"x1^2\",\n  \"follower_cost\": \"x2 * unknown\"\n}";
    match game_from_config_str(text) {
        Err(NesError::Config(msg)) => assert!(msg.contains("line 4") && msg.contains("unknown"), "{msg}"),
        other => panic!("expected config error, got {other:?}"),
    }
}

#[test]
fn infeasible_point_is_a_domain_error() {
    let g = load_game(config_path("harvest.json")).unwrap();
    assert!(g.is_feasible(0.5, 0.5));
    assert!(!g.is_feasible(-0.1, 0.5));
    assert!(g.leader_cost(2.5, 0.5).unwrap_err().is_domain());
}
