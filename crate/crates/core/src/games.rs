//! Built-in games and games loaded from JSON config files.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{NesError, Result};
use crate::expr::{parse_cost_expr, Expr};
use crate::game::{Feasible, Game, Partial, References, ScalarField2};
use crate::State2;

/// Quadratic game with Nash point (0.6, -0.3) and Stackelberg point
/// (1/3, -5/6):
///
/// ```text
/// J_L = x1^2 / 2 + 2 x1 x2
/// J_F = (x2 - 2 x1 + 1.5)^2 / 2,   h(x1) = 2 x1 - 1.5
/// ```
pub fn quadratic_game() -> Game {
    let leader = ScalarField2::from_fn(|a, b| 0.5 * a * a + 2.0 * a * b)
        .with_pure_partial(Partial::D1, |a, b| a + 2.0 * b)
        .with_pure_partial(Partial::D2, |a, _| 2.0 * a)
        .with_pure_partial(Partial::D22, |_, _| 0.0)
        .with_pure_partial(Partial::D12, |_, _| 2.0);
    let follower = ScalarField2::from_fn(|a, b| {
        let r = b - 2.0 * a + 1.5;
        0.5 * r * r
    })
    .with_pure_partial(Partial::D1, |a, b| -2.0 * (b - 2.0 * a + 1.5))
    .with_pure_partial(Partial::D2, |a, b| b - 2.0 * a + 1.5)
    .with_pure_partial(Partial::D22, |_, _| 1.0)
    .with_pure_partial(Partial::D12, |_, _| -2.0);
    Game::new("quadratic", leader, follower)
        .with_best_response(|a| 2.0 * a - 1.5)
        .with_x2_hint(0.0)
        .with_references(References {
            nash: Some(State2::new(0.6, -0.3)),
            stackelberg: Some(State2::new(1.0 / 3.0, -5.0 / 6.0)),
        })
}

/// Fish War parameters `(tau, mu_L, mu_F, beta_L, beta_F, x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FishWarParams {
    pub tau: f64,
    pub mu_l: f64,
    pub mu_f: f64,
    pub beta_l: f64,
    pub beta_f: f64,
    /// Fish population.
    pub x: f64,
}

impl Default for FishWarParams {
    fn default() -> Self {
        FishWarParams {
            tau: 0.2852,
            mu_l: 1.1,
            mu_f: 1.2,
            beta_l: 0.8,
            beta_f: 0.48,
            x: 1.259,
        }
    }
}

impl FishWarParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(NesError::InvalidParameter(m.to_string()));
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return bad("tau must lie in (0, 1)");
        }
        if !(self.mu_l > 1.0 && self.mu_f > 1.0) {
            return bad("mu_L and mu_F must exceed 1");
        }
        if !(self.beta_l > 0.0 && self.beta_l <= 1.0 && self.beta_f > 0.0 && self.beta_f <= 1.0) {
            return bad("beta_L and beta_F must lie in (0, 1]");
        }
        if !(self.x > 0.0 && self.x.is_finite()) {
            return bad("fish population x must be positive");
        }
        Ok(())
    }

    /// Open interval of follower actions `v` that keep `(u, v)` feasible.
    pub fn follower_slice(&self, u: f64) -> Option<(f64, f64)> {
        if u <= 0.0 {
            return None;
        }
        let a = self.x - u.powf(self.mu_f);
        let b = self.x - u;
        if a <= 0.0 || b <= 0.0 {
            return None;
        }
        Some((0.0, a.min(b.powf(1.0 / self.mu_l))))
    }

    pub fn is_feasible(&self, u: f64, v: f64) -> bool {
        u > 0.0
            && v > 0.0
            && u + v.powf(self.mu_l) < self.x
            && u.powf(self.mu_f) + v < self.x
    }
}

/// Reported Fish War equilibria for the default parameters.
pub const FISH_WAR_NASH: State2 = State2 { x1: 0.3, x2: 0.9 };
pub const FISH_WAR_STACKELBERG: State2 = State2 {
    x1: 1.19426,
    x2: 0.01896,
};

/// Fish War with `(u, v) = (x1, x2)`:
///
/// ```text
/// J_L = -ln u - beta_L tau ln(x - u - v^mu_L)
/// J_F = -ln v - beta_F tau ln(x - v - u^mu_F)
/// ```
///
/// Feasible set: `u > 0`, `v > 0`, `u + v^mu_L < x`, `u^mu_F + v < x`.
pub fn fish_war_game(fp: FishWarParams) -> Result<Game> {
    fp.validate()?;
    let FishWarParams {
        tau,
        mu_l,
        mu_f,
        beta_l,
        beta_f,
        x,
    } = fp;
    let cl = beta_l * tau;
    let cf = beta_f * tau;

    let leader = ScalarField2::new(move |u, v, g| {
        let at = (u, v);
        let a = x - u - g.powf(v, mu_l, at)?;
        Ok(-g.ln(u, at)? - cl * g.ln(a, at)?)
    })
    .with_partial(Partial::D1, move |u, v, g| {
        let at = (u, v);
        let a = x - u - g.powf(v, mu_l, at)?;
        Ok(-g.recip_log_arg(u, at)? + cl * g.recip_log_arg(a, at)?)
    })
    .with_partial(Partial::D2, move |u, v, g| {
        let at = (u, v);
        let a = x - u - g.powf(v, mu_l, at)?;
        Ok(cl * mu_l * g.powf(v, mu_l - 1.0, at)? * g.recip_log_arg(a, at)?)
    })
    .with_partial(Partial::D22, move |u, v, g| {
        let at = (u, v);
        let a = x - u - g.powf(v, mu_l, at)?;
        let ia = g.recip_log_arg(a, at)?;
        let vp = g.powf(v, mu_l - 1.0, at)?;
        let vpp = g.powf(v, mu_l - 2.0, at)?;
        Ok(cl * mu_l * ((mu_l - 1.0) * vpp * ia + mu_l * vp * vp * ia * ia))
    })
    .with_partial(Partial::D12, move |u, v, g| {
        let at = (u, v);
        let a = x - u - g.powf(v, mu_l, at)?;
        let ia = g.recip_log_arg(a, at)?;
        Ok(cl * mu_l * g.powf(v, mu_l - 1.0, at)? * ia * ia)
    });

    let follower = ScalarField2::new(move |u, v, g| {
        let at = (u, v);
        let b = x - v - g.powf(u, mu_f, at)?;
        Ok(-g.ln(v, at)? - cf * g.ln(b, at)?)
    })
    .with_partial(Partial::D1, move |u, v, g| {
        let at = (u, v);
        let b = x - v - g.powf(u, mu_f, at)?;
        Ok(cf * mu_f * g.powf(u, mu_f - 1.0, at)? * g.recip_log_arg(b, at)?)
    })
    .with_partial(Partial::D2, move |u, v, g| {
        let at = (u, v);
        let b = x - v - g.powf(u, mu_f, at)?;
        Ok(-g.recip_log_arg(v, at)? + cf * g.recip_log_arg(b, at)?)
    })
    .with_partial(Partial::D22, move |u, v, g| {
        let at = (u, v);
        let b = x - v - g.powf(u, mu_f, at)?;
        let iv = g.recip_log_arg(v, at)?;
        let ib = g.recip_log_arg(b, at)?;
        Ok(iv * iv + cf * ib * ib)
    })
    .with_partial(Partial::D12, move |u, v, g| {
        let at = (u, v);
        let b = x - v - g.powf(u, mu_f, at)?;
        let ib = g.recip_log_arg(b, at)?;
        Ok(cf * mu_f * g.powf(u, mu_f - 1.0, at)? * ib * ib)
    });

    let feasible = Feasible::new(
        format!("u > 0, v > 0, u + v^{mu_l} < {x}, u^{mu_f} + v < {x}"),
        move |u, v| fp.is_feasible(u, v),
    );
    let mut game = Game::new("fishwar", leader, follower)
        .with_feasible(feasible)
        .with_follower_slice(move |u| fp.follower_slice(u))
        .with_x2_hint(0.5);
    if fp == FishWarParams::default() {
        game = game.with_references(References {
            nash: Some(FISH_WAR_NASH),
            stackelberg: Some(FISH_WAR_STACKELBERG),
        });
    }
    Ok(game)
}

/// Names accepted by [`builtin_game`].
pub const BUILTIN_GAMES: [&str; 2] = ["quadratic", "fishwar"];

pub fn builtin_game(name: &str) -> Result<Game> {
    match name {
        "quadratic" => Ok(quadratic_game()),
        "fishwar" | "fish-war" | "fish_war" => fish_war_game(FishWarParams::default()),
        other => Err(NesError::Usage(format!(
            "unknown game `{other}` (built-ins: {})",
            BUILTIN_GAMES.join(", ")
        ))),
    }
}

/// On-disk game description.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    pub name: String,
    pub leader_cost: String,
    pub follower_cost: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// Each entry `e` means `e >= 0`.
    #[serde(default)]
    pub feasible: Vec<String>,
    /// Follower best response as an expression in `x1`.
    #[serde(default)]
    pub best_response: Option<String>,
    #[serde(default)]
    pub references: Option<ConfigReferences>,
    #[serde(default)]
    pub x2_hint: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigReferences {
    pub nash: Option<[f64; 2]>,
    pub stackelberg: Option<[f64; 2]>,
}

fn line_of_key(text: &str, key: &str) -> usize {
    let needle = format!("\"{key}\"");
    text.lines()
        .position(|l| l.contains(&needle))
        .map_or(0, |i| i + 1)
}

fn parse_field(text: &str, key: &str, src: &str, params: &BTreeMap<String, f64>) -> Result<Expr> {
    parse_cost_expr(src, params).map_err(|e| {
        NesError::Config(format!("line {}: `{key}`: {e}", line_of_key(text, key)))
    })
}

/// Builds a game from config text (see [`GameConfig`]).
pub fn game_from_config_str(text: &str) -> Result<Game> {
    let cfg: GameConfig = serde_json::from_str(text).map_err(|e| {
        NesError::Config(format!("line {} column {}: {e}", e.line(), e.column()))
    })?;
    for name in cfg.params.keys() {
        if name == "x1" || name == "x2" {
            return Err(NesError::Config(format!(
                "line {}: parameter name `{name}` shadows a player variable",
                line_of_key(text, "params")
            )));
        }
    }
    let leader = parse_field(text, "leader_cost", &cfg.leader_cost, &cfg.params)?;
    let follower = parse_field(text, "follower_cost", &cfg.follower_cost, &cfg.params)?;
    let constraints = cfg
        .feasible
        .iter()
        .map(|s| parse_field(text, "feasible", s, &cfg.params))
        .collect::<Result<Vec<_>>>()?;

    let leader = Arc::new(leader);
    let follower = Arc::new(follower);
    let lf = ScalarField2::new(move |a, b, g| leader.eval_guarded(a, b, g));
    let ff = ScalarField2::new(move |a, b, g| follower.eval_guarded(a, b, g));

    let description = if constraints.is_empty() {
        "R^2".to_string()
    } else {
        cfg.feasible
            .iter()
            .map(|s| format!("{s} >= 0"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let constraints = Arc::new(constraints);
    let feasible = Feasible::new(description, move |a, b| {
        constraints
            .iter()
            .all(|c| matches!(crate::expr::eval_ast(c, a, b), Ok(v) if v >= 0.0))
    });

    let mut game = Game::new(cfg.name.clone(), lf, ff).with_feasible(feasible);
    if let Some(src) = &cfg.best_response {
        let h = parse_field(text, "best_response", src, &cfg.params)?;
        if h.uses_x2() {
            return Err(NesError::Config(format!(
                "line {}: `best_response` must depend on x1 only",
                line_of_key(text, "best_response")
            )));
        }
        game = game.with_best_response(move |a| crate::expr::eval_ast(&h, a, 0.0).unwrap_or(f64::NAN));
    }
    if let Some(hint) = cfg.x2_hint {
        game = game.with_x2_hint(hint);
    }
    if let Some(r) = &cfg.references {
        game = game.with_references(References {
            nash: r.nash.map(|[a, b]| State2::new(a, b)),
            stackelberg: r.stackelberg.map(|[a, b]| State2::new(a, b)),
        });
    }
    Ok(game)
}

/// Loads a game config file.
pub fn load_game(path: impl AsRef<Path>) -> Result<Game> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| NesError::Io(format!("{}: {e}", path.display())))?;
    game_from_config_str(&text).map_err(|e| match e {
        NesError::Config(m) => NesError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}
