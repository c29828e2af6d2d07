//! A game defined in a JSON config file: costs are arithmetic expressions in
//! x1, x2 and named parameters, with optional feasibility constraints.
//!
//! cargo run --release --example custom_game [-- path/to/game.json]

use nes::cli::{cmd_simulate, GameSource, Mode, Outputs, RunConfig, RunRequest};
use nes::equilibria::{convexity_report, nash_equilibrium, stackelberg_equilibrium, Rect};
use nes::games::load_game;
use nes::State2;

fn main() -> nes::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/harvest.json"));
    let g = load_game(&path)?;
    println!("loaded `{}` (feasible set: {})", g.name, g.feasible.description());

    let ne = nash_equilibrium(&g, State2::new(0.5, 0.5))?.point;
    let se = stackelberg_equilibrium(&g, 0.5)?.point;
    println!("Nash ({:.6}, {:.6})   Stackelberg ({:.6}, {:.6})", ne.x1, ne.x2, se.x1, se.x2);

    let conv = convexity_report(&g, Rect::around(se, 0.2), 21)?;
    println!(
        "sampled curvature near SE: follower {:.4}, reduced leader {:.4}",
        conv.m2_estimate, conv.m1_estimate
    );

    let mut req = RunRequest::new(GameSource::Config(path), Mode::Stackelberg);
    req.x1 = Some(0.5);
    req.x2 = Some(0.5);
    let (mut cfg, game) = RunConfig::resolve(&req)?;
    cfg.outputs = Outputs { csv: false, summary: false, phase_svg: false, time_svg: false };
    let s = cmd_simulate(&cfg, &game)?.summary;
    println!(
        "closed loop from (0.5, 0.5): window mean ({:.4}, {:.4}), complete = {}",
        s.final_window_mean.x1, s.final_window_mean.x2, s.complete
    );
    Ok(())
}
