//! Checks the time-scale ordering alpha1*k1 << omega1 << alpha2*k2 << omega2
//! for the shipped parameter sets and evaluates the theoretical thresholds
//! for a few accuracy levels upsilon.
//!
//! cargo run --example design_rules

use nes::analysis::{hierarchy_check, scaling_thresholds, DEFAULT_MIN_RATIO};
use nes::NesParams;

fn main() -> nes::Result<()> {
    let sets = [
        ("quadratic stackelberg", NesParams::quadratic_stackelberg()),
        ("quadratic nash", NesParams::quadratic_nash()),
        ("fish war nash", NesParams::fish_war_nash()),
        ("fish war stackelberg", NesParams::fish_war_stackelberg()),
    ];
    for (name, p) in sets {
        let h = hierarchy_check(&p, DEFAULT_MIN_RATIO);
        println!(
            "{name:<22} eps {:<8.4} ratios [{:>8.2} {:>8.2} {:>8.2}] {}",
            p.epsilon(),
            h.ratios[0],
            h.ratios[1],
            h.ratios[2],
            if h.flagged { "flagged" } else { "ok" }
        );
    }

    println!();
    for ups in [1.0, 0.5, 0.1, 0.01] {
        let t = scaling_thresholds(ups, 1.0, 1.0, 1.0, 1.0, 0.1)?;
        println!(
            "upsilon {ups:<5} omega1* {:.3e}  k2* {:.3e}  omega2* {:.3e}  eps* {:.3e}{}",
            t.omega1_star,
            t.k2_star,
            t.omega2_star,
            t.epsilon_star,
            if t.saturated { "  (saturated)" } else { "" }
        );
    }
    Ok(())
}
