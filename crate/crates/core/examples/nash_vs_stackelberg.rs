//! Same game, two tunings: Stackelberg-style parameters (follower much faster
//! than the leader) settle near the Stackelberg point, Nash-style parameters
//! (comparable speeds) near the Nash point.
//!
//! cargo run --release --example nash_vs_stackelberg

use nes::cli::{cmd_simulate, GameSource, Mode, Outputs, RunConfig, RunRequest};

fn main() -> nes::Result<()> {
    for mode in [Mode::Stackelberg, Mode::Nash] {
        let req = RunRequest::new(GameSource::Builtin("quadratic".into()), mode);
        let (mut cfg, game) = RunConfig::resolve(&req)?;
        cfg.outputs = Outputs { csv: false, summary: false, phase_svg: false, time_svg: false };
        let s = cmd_simulate(&cfg, &game)?.summary;
        println!(
            "{mode:<12} eps = {:<8.4} mean ({:+.4}, {:+.4})  d_NE = {:.4}  d_SE = {:.4}  -> {}",
            s.epsilon,
            s.final_window_mean.x1,
            s.final_window_mean.x2,
            s.distance_to_nash.unwrap_or(f64::NAN),
            s.distance_to_stackelberg.unwrap_or(f64::NAN),
            s.closer_to.as_deref().unwrap_or("?"),
        );
    }
    Ok(())
}
