//! Integrates every level of the approximation ladder from the same initial
//! state and prints how far each is from the original closed loop.
//!
//! cargo run --release --example ladder_compare

use nes::analysis::{simulate_ladder, Ladder};
use nes::equilibria::best_response;
use nes::games::quadratic_game;
use nes::integrate::{auto_step, sup_distance};
use nes::{NesParams, State2};

fn main() -> nes::Result<()> {
    let g = quadratic_game();
    let p = NesParams::quadratic_stackelberg();
    let (t_end, dt) = (10.0, auto_step(&p, 32));
    let x0 = State2::new(0.0, best_response(&g, 0.0)?);

    let original = simulate_ladder(Ladder::Original, &g, &p, 0.0, t_end, dt, x0)?;
    println!("epsilon = {:.4}, dt = {dt:.3e}, T = {t_end}", p.epsilon());
    for level in Ladder::ALL {
        let tr = simulate_ladder(level, &g, &p, 0.0, t_end, dt, x0)?;
        let both = sup_distance(&original, &tr, (0.0, t_end), &[0, 1])?;
        let leader = sup_distance(&original, &tr, (0.0, t_end), &[0])?;
        let last = tr.last().unwrap();
        println!(
            "{:<9} x(T) = ({:+.5}, {:+.5})   sup |x - x_orig| = {both:.4e}   leader only {leader:.4e}",
            level.to_string(),
            last[0],
            last[1]
        );
    }
    Ok(())
}
