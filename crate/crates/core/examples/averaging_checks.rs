//! Two building blocks behind the averaging analysis: the Lie-bracket
//! coefficient of the dither pair, and exponential decay of the follower's
//! boundary layer.
//!
//! cargo run --example averaging_checks

use nes::analysis::blm_decay_certificate;
use nes::dynamics::{lie_bracket_coeff, BlmSystem};
use nes::games::quadratic_game;
use nes::integrate::{rk4_integrate, IntegrationSpec};

fn main() -> nes::Result<()> {
    println!("nu(cos, sin) = {:.15}", lie_bracket_coeff(f64::cos, f64::sin)?);
    println!("nu(sin, cos) = {:.15}", lie_bracket_coeff(f64::sin, f64::cos)?);
    println!("nu(cos, cos) = {:.3e}", lie_bracket_coeff(f64::cos, f64::cos)?);
    match lie_bracket_coeff(|t| 1.0 + t.cos(), f64::sin) {
        Ok(v) => println!("biased dither gave {v}"),
        Err(e) => println!("biased dither rejected: {e}"),
    }

    let g = quadratic_game();
    let blm = BlmSystem::new(0.4, &g)?;
    let tr = rk4_integrate(&blm, &IntegrationSpec::new(0.0, 10.0, 1e-3, vec![1.0]))?.complete()?;
    for tau in [0.0, 2.0, 5.0, 10.0] {
        println!("y({tau:>4}) = {:.10}  e^(-tau/2) = {:.10}", tr.interpolate(tau, 0), (-tau / 2.0f64).exp());
    }
    println!("decay certificate (mu = 1, tau <= 20): {}", blm_decay_certificate(&g, 0.4, 1.0, 1.0, 20.0)?);
    Ok(())
}
