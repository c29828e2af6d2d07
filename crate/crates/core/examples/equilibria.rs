//! Nash and Stackelberg equilibria of the built-in games, with solver
//! residuals and a brute-force grid check of the Nash point.
//!
//! cargo run --release --example equilibria

use nes::equilibria::{best_response, grid_oracle_nash, nash_equilibrium, reduced_cost, stackelberg_equilibrium, Rect};
use nes::games::{fish_war_game, quadratic_game, FishWarParams};
use nes::State2;

fn main() -> nes::Result<()> {
    let games = [
        (quadratic_game(), State2::new(0.0, 0.0), 0.0, Rect::new((-2.0, 2.0), (-2.0, 2.0)), 1e-3),
        (fish_war_game(FishWarParams::default())?, State2::new(0.3, 0.9), 1.2, Rect::around(State2::new(0.3, 0.9), 0.05), 1e-4),
    ];
    for (g, nash_seed, se_seed, rect, step) in games {
        println!("== {}", g.name);
        let ne = nash_equilibrium(&g, nash_seed)?;
        println!("Nash         ({:.8}, {:.8})  {} iterations  residuals {:?}", ne.point.x1, ne.point.x2, ne.iterations, ne.residuals);
        let se = stackelberg_equilibrium(&g, se_seed)?;
        println!("Stackelberg  ({:.8}, {:.8})  {} iterations  residuals {:?}", se.point.x1, se.point.x2, se.iterations, se.residuals);
        println!("leader reduced cost at SE {:.6}, follower reply there {:.8}", reduced_cost(&g, se.point.x1)?, best_response(&g, se.point.x1)?);
        let grid = grid_oracle_nash(&g, rect, step);
        println!("grid oracle  ({:.5}, {:.5})  step {step}", grid.x1, grid.x2);
    }
    Ok(())
}
