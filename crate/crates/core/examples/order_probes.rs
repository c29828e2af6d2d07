//! Empirical convergence orders of the three approximation steps on the
//! quadratic game: errors shrink like omega2^-1/2, epsilon^1 and omega1^-1/2.
//!
//! cargo run --release --example order_probes

use std::f64::consts::SQRT_2;

use nes::analysis::{probe_order_epsilon, probe_order_omega1, probe_order_omega2, OrderProbeResult, ProbeOptions};
use nes::games::quadratic_game;
use nes::{NesParams, State2};

fn show(r: &OrderProbeResult) {
    println!("{} sweep over {:?}", r.parameter, r.values);
    for (x, e) in r.abscissa.iter().zip(&r.errors) {
        println!("    {x:>12.6}  {e:.6e}");
    }
    println!(
        "    slope {:+.4}  target {:+}  band [{:+}, {:+}]  {}",
        r.slope,
        r.target,
        r.band.0,
        r.band.1,
        if r.passes() { "ok" } else { "outside band" }
    );
}

fn main() -> nes::Result<()> {
    let g = quadratic_game();
    let base = NesParams::quadratic_stackelberg();

    let p1 = NesParams { k2: 10.0, ..base };
    let w2: Vec<f64> = [200.0, 800.0, 3200.0].iter().map(|w| w * SQRT_2).collect();
    show(&probe_order_omega2(&g, &p1, &w2, &ProbeOptions::new(5.0, State2::new(0.0, 0.0)))?);

    let on_manifold = ProbeOptions::new(10.0, State2::new(0.0, -1.5)).with_samples(256);
    show(&probe_order_epsilon(&g, &base, &[125.0, 250.0, 500.0], &on_manifold)?);

    show(&probe_order_omega1(&g, &base, &[100.0, 400.0, 1600.0], &ProbeOptions::new(10.0, State2::new(0.0, 0.0)))?);
    Ok(())
}
