//! The Fish War harvesting game. Nash tuning converges near (0.3, 0.9). The
//! Stackelberg point sits so close to the boundary of the feasible set that
//! the leader's dither crosses it; strict mode stops there and reports where,
//! clamp mode keeps integrating with floored logarithms.
//!
//! cargo run --release --example fish_war

use nes::cli::{cmd_simulate, GameSource, Mode, Outputs, RunConfig, RunRequest};
use nes::BoundaryPolicy;

fn run(mode: Mode, boundary: BoundaryPolicy, t_end: Option<f64>) -> nes::Result<()> {
    let mut req = RunRequest::new(GameSource::Builtin("fishwar".into()), mode);
    req.boundary = boundary;
    req.t_end = t_end;
    let (mut cfg, game) = RunConfig::resolve(&req)?;
    cfg.outputs = Outputs { csv: false, summary: false, phase_svg: false, time_svg: false };
    let s = cmd_simulate(&cfg, &game)?.summary;
    print!(
        "{mode:<12} {boundary:<7} T = {:<6} mean ({:.4}, {:.4}) d_NE {:.4} d_SE {:.4} clamps {}",
        s.t_end,
        s.final_window_mean.x1,
        s.final_window_mean.x2,
        s.distance_to_nash.unwrap_or(f64::NAN),
        s.distance_to_stackelberg.unwrap_or(f64::NAN),
        s.clamp_count
    );
    match &s.violation {
        Some(v) => println!("  stopped at t = {:.3}: {}", v.t, v.message),
        None => println!(),
    }
    Ok(())
}

fn main() -> nes::Result<()> {
    run(Mode::Nash, BoundaryPolicy::Strict, None)?;
    run(Mode::Stackelberg, BoundaryPolicy::Strict, None)?;
    run(Mode::Stackelberg, BoundaryPolicy::Clamp, Some(20.0))?;
    Ok(())
}
