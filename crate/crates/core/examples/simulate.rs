//! Runs the closed loop on the quadratic game in Stackelberg mode and writes
//! the trajectory CSV, a JSON summary and two SVG plots.
//!
//! cargo run --release --example simulate

use nes::cli::{cmd_simulate, GameSource, Mode, RunConfig, RunRequest};

fn main() -> nes::Result<()> {
    let mut req = RunRequest::new(GameSource::Builtin("quadratic".into()), Mode::Stackelberg);
    req.out_dir = std::env::temp_dir().join("nes-example-simulate");
    let (cfg, game) = RunConfig::resolve(&req)?;
    println!("params {:?}", cfg.params);
    println!("dt = {:.4e}, T = {}", cfg.dt, cfg.t_end);

    let sim = cmd_simulate(&cfg, &game)?;
    let s = &sim.summary;
    println!("samples          {}", s.samples);
    println!("final state      ({:.5}, {:.5})", s.final_state.x1, s.final_state.x2);
    println!("window mean      ({:.5}, {:.5})", s.final_window_mean.x1, s.final_window_mean.x2);
    println!("to Stackelberg   {:?}", s.distance_to_stackelberg);
    println!("to Nash          {:?}", s.distance_to_nash);
    for a in &sim.artifacts {
        println!("wrote {}", a.display());
    }
    Ok(())
}
