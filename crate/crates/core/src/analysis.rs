//! Empirical checks of the approximation ladder: error-order probes, the
//! time-scale hierarchy rule, theoretical scaling thresholds, and
//! boundary-layer decay certificates.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{
    qss_eval, AveragedRomSystem, BlmSystem, NesParams, NesSystem, PartiallyAveragedSystem, RomSystem,
};
use crate::equilibria::best_response;
use crate::error::{NesError, Result};
use crate::game::Game;
use crate::integrate::{rk4_integrate, sup_distance, IntegrationSpec, Trajectory};
use crate::State2;

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(NesError::DegenerateProbe(format!(
            "need at least two (x, y) pairs, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if let Some(v) = xs.iter().chain(ys).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(NesError::DegenerateProbe(format!(
            "log-log fit needs positive finite data, got {v}"
        )));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(NesError::DegenerateProbe("all parameter values are equal".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Outcome of an error-order probe.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderProbeResult {
    /// Name of the swept parameter.
    pub parameter: String,
    /// Swept values, in input order.
    pub values: Vec<f64>,
    /// Abscissa of the fit (the swept value itself, or `ε` for a `k2` sweep).
    pub abscissa: Vec<f64>,
    pub errors: Vec<f64>,
    /// Secondary errors, e.g. the follower error of the `ε` probe.
    pub secondary_errors: Option<Vec<f64>>,
    pub slope: f64,
    pub target: f64,
    pub band: (f64, f64),
    pub window: (f64, f64),
}

impl OrderProbeResult {
    /// Builds a result and fits its slope. Zero or non-finite errors make the
    /// probe degenerate.
    pub fn from_errors(
        parameter: impl Into<String>,
        values: Vec<f64>,
        abscissa: Vec<f64>,
        errors: Vec<f64>,
        target: f64,
        half_band: f64,
        window: (f64, f64),
    ) -> Result<Self> {
        if values.len() < 3 {
            return Err(NesError::DegenerateProbe(format!(
                "need at least 3 parameter values, got {}",
                values.len()
            )));
        }
        if let Some(e) = errors.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return Err(NesError::DegenerateProbe(format!(
                "error {e} is not positive and finite; the compared systems coincide"
            )));
        }
        let slope = fit_loglog_slope(&abscissa, &errors)?;
        Ok(OrderProbeResult {
            parameter: parameter.into(),
            values,
            abscissa,
            errors,
            secondary_errors: None,
            slope,
            target,
            band: (target - half_band, target + half_band),
            window,
        })
    }

    pub fn passes(&self) -> bool {
        self.slope >= self.band.0 && self.slope <= self.band.1
    }

    pub fn errors_decreasing(&self) -> bool {
        strictly_decreasing(&self.errors)
    }

    pub fn secondary_decreasing(&self) -> Option<bool> {
        self.secondary_errors.as_deref().map(strictly_decreasing)
    }
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn check_increasing(name: &str, values: &[f64]) -> Result<()> {
    if values.len() < 3 {
        return Err(NesError::DegenerateProbe(format!(
            "{name} probe needs at least 3 values, got {}",
            values.len()
        )));
    }
    if !values.windows(2).all(|w| w[1] > w[0]) {
        return Err(NesError::InvalidParameter(format!("{name} values must be increasing")));
    }
    Ok(())
}

/// Horizon, initial state and step policy shared by the probes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    pub horizon: f64,
    pub x0: State2,
    /// Steps per period of the fastest dither present in the compared systems.
    pub samples_per_period: usize,
}

impl ProbeOptions {
    pub fn new(horizon: f64, x0: State2) -> Self {
        ProbeOptions {
            horizon,
            x0,
            samples_per_period: 64,
        }
    }

    pub fn with_samples(mut self, samples_per_period: usize) -> Self {
        self.samples_per_period = samples_per_period;
        self
    }

    fn step_for(&self, omega: f64) -> f64 {
        2.0 * std::f64::consts::PI / (omega * self.samples_per_period as f64)
    }
}

/// Level of the approximation ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ladder {
    /// Original dithered dynamics.
    Original,
    /// Follower averaged.
    Partial,
    /// Reduced-order model with the follower on its quasi-steady state.
    Rom,
    /// Averaged reduced-order model.
    AvgRom,
}

impl Ladder {
    pub const ALL: [Ladder; 4] = [Ladder::Original, Ladder::Partial, Ladder::Rom, Ladder::AvgRom];

    pub fn name(self) -> &'static str {
        match self {
            Ladder::Original => "original",
            Ladder::Partial => "partial",
            Ladder::Rom => "rom",
            Ladder::AvgRom => "avgrom",
        }
    }

    /// Fastest angular frequency the level's vector field carries.
    pub fn fastest_frequency(self, p: &NesParams) -> f64 {
        match self {
            Ladder::Original => p.omega1.max(p.omega2),
            Ladder::Partial | Ladder::Rom => p.omega1,
            Ladder::AvgRom => p.omega1.min(p.omega2),
        }
    }

    /// Whether the level carries the follower as its own state (rather than
    /// reconstructing it from the best response).
    pub fn has_follower_state(self) -> bool {
        matches!(self, Ladder::Original | Ladder::Partial)
    }
}

impl fmt::Display for Ladder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Ladder {
    type Err = NesError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "original" | "nes" => Ok(Ladder::Original),
            "partial" | "partially-averaged" => Ok(Ladder::Partial),
            "rom" => Ok(Ladder::Rom),
            "avgrom" | "averaged-rom" => Ok(Ladder::AvgRom),
            other => Err(NesError::Usage(format!(
                "unknown ladder level '{other}' (expected original, partial, rom or avgrom)"
            ))),
        }
    }
}

/// Integrates one ladder level from `x0` on `[t0, t_end]` with step `dt`.
///
/// The result always has columns `(x1, x2)`. For the reduced levels `x2` is
/// reconstructed as the quasi-steady state `h(x1) + y̆`, where the boundary
/// layer starts from `x0.x2 - h(x0.x1)`.
pub fn simulate_ladder(level: Ladder, g: &Game, p: &NesParams, t0: f64, t_end: f64, dt: f64, x0: State2) -> Result<Trajectory> {
    let spec2 = IntegrationSpec::new(t0, t_end, dt, x0.to_vec());
    let spec1 = IntegrationSpec::new(t0, t_end, dt, vec![x0.x1]);
    let reduced = |x1: Trajectory| -> Result<Trajectory> {
        let y0 = x0.x2 - best_response(g, x0.x1)?;
        let q = qss_eval(&x1, p, g, y0)?;
        let mut out = x1.empty_like(vec!["x1".into(), "x2".into()]);
        for i in 0..x1.len() {
            out.push(&[x1.state(i)[0], q.qss.state(i)[0]]);
        }
        Ok(out)
    };
    match level {
        Ladder::Original => rk4_integrate(&NesSystem::new(*p, g), &spec2)?.complete(),
        Ladder::Partial => rk4_integrate(&PartiallyAveragedSystem::new(*p, g), &spec2)?.complete(),
        Ladder::Rom => reduced(rk4_integrate(&RomSystem::new(*p, g).with_memo(), &spec1)?.complete()?),
        Ladder::AvgRom => reduced(rk4_integrate(&AveragedRomSystem::new(*p, g), &spec1)?.complete()?),
    }
}

/// Original versus partially averaged dynamics for each `ω2`; slope of the
/// sup error against `ω2` (expected about `-1/2`).
pub fn probe_order_omega2(g: &Game, p0: &NesParams, omega2_values: &[f64], opts: &ProbeOptions) -> Result<OrderProbeResult> {
    check_increasing("omega2", omega2_values)?;
    if let Some(w) = omega2_values.iter().find(|w| **w <= p0.omega1) {
        return Err(NesError::InvalidParameter(format!("omega2 = {w} must exceed omega1 = {}", p0.omega1)));
    }
    let errors = omega2_values
        .par_iter()
        .map(|&w| {
            let p = NesParams::new(p0.alpha1, p0.k1, p0.omega1, p0.alpha2, p0.k2, w)?;
            let dt = opts.step_for(w);
            let a = simulate_ladder(Ladder::Original, g, &p, 0.0, opts.horizon, dt, opts.x0)?;
            let b = simulate_ladder(Ladder::Partial, g, &p, 0.0, opts.horizon, dt, opts.x0)?;
            sup_distance(&a, &b, (0.0, opts.horizon), &[0, 1])
        })
        .collect::<Result<Vec<_>>>()?;
    OrderProbeResult::from_errors(
        "omega2",
        omega2_values.to_vec(),
        omega2_values.to_vec(),
        errors,
        -0.5,
        0.25,
        (0.0, opts.horizon),
    )
}

/// Partially averaged dynamics versus ROM plus quasi-steady state for each
/// `k2`; slope of the leader sup error against `ε = 1/(α2 k2)` (expected
/// about `1`). The follower errors are kept as secondary errors.
pub fn probe_order_epsilon(g: &Game, p0: &NesParams, k2_values: &[f64], opts: &ProbeOptions) -> Result<OrderProbeResult> {
    check_increasing("k2", k2_values)?;
    let pairs = k2_values
        .par_iter()
        .map(|&k2| {
            let p = NesParams::new(p0.alpha1, p0.k1, p0.omega1, p0.alpha2, k2, p0.omega2)?;
            let dt = opts.step_for(p.omega1);
            let a = simulate_ladder(Ladder::Partial, g, &p, 0.0, opts.horizon, dt, opts.x0)?;
            let b = simulate_ladder(Ladder::Rom, g, &p, 0.0, opts.horizon, dt, opts.x0)?;
            let w = (0.0, opts.horizon);
            Ok((sup_distance(&a, &b, w, &[0])?, sup_distance(&a, &b, w, &[1])?))
        })
        .collect::<Result<Vec<_>>>()?;
    let eps: Vec<f64> = k2_values.iter().map(|k2| 1.0 / (p0.alpha2 * k2)).collect();
    let mut r = OrderProbeResult::from_errors(
        "k2",
        k2_values.to_vec(),
        eps,
        pairs.iter().map(|e| e.0).collect(),
        1.0,
        0.5,
        (0.0, opts.horizon),
    )?;
    r.secondary_errors = Some(pairs.iter().map(|e| e.1).collect());
    Ok(r)
}

/// ROM versus averaged ROM for each `ω1`; slope of the sup error against
/// `ω1` (expected about `-1/2`).
pub fn probe_order_omega1(g: &Game, p0: &NesParams, omega1_values: &[f64], opts: &ProbeOptions) -> Result<OrderProbeResult> {
    check_increasing("omega1", omega1_values)?;
    let errors = omega1_values
        .par_iter()
        .map(|&w| {
            // ω2 plays no part in either reduced model; keep it distinct from ω1
            let omega2 = if p0.omega2 == w { 2.0 * w } else { p0.omega2 };
            let p = NesParams::new(p0.alpha1, p0.k1, w, p0.alpha2, p0.k2, omega2)?;
            let dt = opts.step_for(w);
            let spec = IntegrationSpec::new(0.0, opts.horizon, dt, vec![opts.x0.x1]);
            let a = rk4_integrate(&RomSystem::new(p, g).with_memo(), &spec)?.complete()?;
            let b = rk4_integrate(&AveragedRomSystem::new(p, g), &spec)?.complete()?;
            sup_distance(&a, &b, (0.0, opts.horizon), &[0])
        })
        .collect::<Result<Vec<_>>>()?;
    OrderProbeResult::from_errors(
        "omega1",
        omega1_values.to_vec(),
        omega1_values.to_vec(),
        errors,
        -0.5,
        0.25,
        (0.0, opts.horizon),
    )
}

pub const DEFAULT_MIN_RATIO: f64 = 5.0;

/// Check of the ordering `α1k1 ≪ ω1 ≪ α2k2 ≪ ω2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyReport {
    /// `(α1k1, ω1, α2k2, ω2)`.
    pub stages: [f64; 4],
    /// `(ω1/(α1k1), α2k2/ω1, ω2/(α2k2))`.
    pub ratios: [f64; 3],
    pub min_ratio: f64,
    /// Set when any ratio is below `min_ratio`. Advisory only.
    pub flagged: bool,
    pub advisory: String,
}

pub fn hierarchy_check(p: &NesParams, min_ratio: f64) -> HierarchyReport {
    let stages = [p.alpha1 * p.k1, p.omega1, p.alpha2 * p.k2, p.omega2];
    let ratios = [stages[1] / stages[0], stages[2] / stages[1], stages[3] / stages[2]];
    const NAMES: [&str; 3] = ["omega1/(alpha1*k1)", "alpha2*k2/omega1", "omega2/(alpha2*k2)"];
    let weak: Vec<String> = ratios
        .iter()
        .zip(NAMES)
        .filter(|(r, _)| **r < min_ratio)
        .map(|(r, n)| format!("{n} = {r:.4}"))
        .collect();
    let advisory = if weak.is_empty() {
        format!("time scales are separated by at least {min_ratio} at every stage")
    } else {
        format!(
            "weak separation ({}) below {min_ratio}; Stackelberg behaviour is not guaranteed by the hierarchy rule, \
             although it may still emerge",
            weak.join(", ")
        )
    };
    HierarchyReport {
        stages,
        ratios,
        min_ratio,
        flagged: !weak.is_empty(),
        advisory,
    }
}

/// Conservative theoretical scaling thresholds for a target residual `υ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingThresholds {
    pub upsilon: f64,
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub alpha2: f64,
    /// `C1 / υ²`.
    pub omega1_star: f64,
    /// `e^{2c/υ} / (C2 α2)`.
    pub k2_star: f64,
    /// `C3 exp(2 e^{2c/υ})`.
    pub omega2_star: f64,
    /// `ε* = 1/(α2 k2*)`.
    pub epsilon_star: f64,
    /// Set when a threshold exceeds double precision (stored as +inf).
    pub saturated: bool,
}

/// Evaluates the thresholds. Overflow saturates to `+inf` and sets the flag.
pub fn scaling_thresholds(upsilon: f64, c: f64, c1: f64, c2: f64, c3: f64, alpha2: f64) -> Result<ScalingThresholds> {
    if !(upsilon > 0.0 && upsilon <= 1.0) {
        return Err(NesError::InvalidParameter(format!("upsilon = {upsilon} must lie in (0, 1]")));
    }
    for (name, v) in [("c", c), ("C1", c1), ("C2", c2), ("C3", c3), ("alpha2", alpha2)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(NesError::InvalidParameter(format!("{name} = {v} must be positive")));
        }
    }
    let growth = (2.0 * c / upsilon).exp();
    let omega1_star = c1 / (upsilon * upsilon);
    let k2_star = growth / (c2 * alpha2);
    let omega2_star = c3 * (2.0 * growth).exp();
    let saturated = [omega1_star, k2_star, omega2_star].iter().any(|v| v.is_infinite());
    Ok(ScalingThresholds {
        upsilon,
        c,
        c1,
        c2,
        c3,
        alpha2,
        omega1_star,
        k2_star,
        omega2_star,
        epsilon_star: 1.0 / (alpha2 * k2_star),
        saturated,
    })
}

/// Integrates the boundary-layer model at `x1` from `y0` over `[0, tau_end]`
/// and checks `|y(τ)| ≤ |y0| e^{-μτ/2} (1 + 1e-6)` at every step.
pub fn blm_decay_certificate(g: &Game, x1: f64, y0: f64, mu: f64, tau_end: f64) -> Result<bool> {
    if y0 == 0.0 {
        return Ok(true);
    }
    let blm = BlmSystem::new(x1, g)?;
    let dtau = 1e-3_f64.min(tau_end);
    let spec = IntegrationSpec::new(0.0, tau_end, dtau, vec![y0]).with_labels(&["y"]);
    let traj = rk4_integrate(&blm, &spec)?.complete()?;
    Ok((0..traj.len()).all(|i| {
        let tau = traj.time(i);
        traj.state(i)[0].abs() <= y0.abs() * (-0.5 * mu * tau).exp() * (1.0 + 1e-6)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::quadratic_game;

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-0.5)).collect();
        assert!((fit_loglog_slope(&xs, &ys).unwrap() + 0.5).abs() < 1e-12);
        assert!(fit_loglog_slope(&xs, &[1.0, 0.0, 1.0, 1.0]).is_err());
        assert!(fit_loglog_slope(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn zero_errors_are_degenerate() {
        let r = OrderProbeResult::from_errors("w", vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0], vec![0.0; 3], -0.5, 0.25, (0.0, 1.0));
        assert!(matches!(r, Err(NesError::DegenerateProbe(_))));
        let two = OrderProbeResult::from_errors("w", vec![1.0, 2.0], vec![1.0, 2.0], vec![1.0, 0.5], -0.5, 0.25, (0.0, 1.0));
        assert!(two.is_err());
    }

    #[test]
    fn hierarchy_examples() {
        let r = hierarchy_check(&NesParams::quadratic_stackelberg(), DEFAULT_MIN_RATIO);
        assert!((r.ratios[0] - 500.0).abs() < 1e-9);
        assert!((r.ratios[1] - 5.0).abs() < 1e-12);
        assert!((r.ratios[2] - 10.0 * 2f64.sqrt()).abs() < 1e-9);
        assert!(!r.flagged);
        let n = hierarchy_check(&NesParams::quadratic_nash(), DEFAULT_MIN_RATIO);
        assert!((n.ratios[1] - 0.005).abs() < 1e-12);
        assert!(n.flagged);
        let f = hierarchy_check(&NesParams::fish_war_stackelberg(), DEFAULT_MIN_RATIO);
        assert!((f.ratios[1] - 0.25).abs() < 1e-12);
        assert!(f.flagged);
    }

    #[test]
    fn thresholds_examples() {
        let t = scaling_thresholds(1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let e2 = 1f64.exp().powi(2);
        assert!((t.omega1_star - 1.0).abs() < 1e-15);
        assert!((t.k2_star - e2).abs() < 1e-12);
        assert!((t.omega2_star / (2.0 * e2).exp() - 1.0).abs() < 1e-12);
        assert!((t.omega2_star - 2.61e6).abs() / 2.61e6 < 0.01);
        assert!(!t.saturated);
        let h = scaling_thresholds(0.5, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(h.omega1_star, 4.0 * t.omega1_star);
        let tiny = scaling_thresholds(0.1, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(tiny.saturated && tiny.omega2_star.is_infinite());
        assert!(scaling_thresholds(0.0, 1.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(scaling_thresholds(0.5, -1.0, 1.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn decay_certificate_examples() {
        let g = quadratic_game();
        assert!(blm_decay_certificate(&g, 0.3, 1.0, 1.0, 20.0).unwrap());
        assert!(blm_decay_certificate(&g, 0.3, 0.0, 1.0, 20.0).unwrap());
        assert!(!blm_decay_certificate(&g, 0.3, 1.0, 10.0, 20.0).unwrap());
    }

    #[test]
    fn ladder_names_round_trip() {
        for l in Ladder::ALL {
            assert_eq!(l.name().parse::<Ladder>().unwrap(), l);
        }
        assert!("bogus".parse::<Ladder>().is_err());
    }

    #[test]
    fn identical_systems_are_rejected_by_probe() {
        let g = quadratic_game();
        let p = NesParams::quadratic_stackelberg();
        let opts = ProbeOptions::new(1.0, State2::new(0.0, 0.0));
        let errs: Vec<f64> = [100.0, 200.0, 400.0]
            .iter()
            .map(|&w| {
                let p = NesParams { omega1: w, ..p };
                let a = simulate_ladder(Ladder::AvgRom, &g, &p, 0.0, opts.horizon, 0.01, opts.x0).unwrap();
                sup_distance(&a, &a, (0.0, 1.0), &[0]).unwrap()
            })
            .collect();
        let r = OrderProbeResult::from_errors("omega1", vec![1.0, 2.0, 4.0], vec![1.0, 2.0, 4.0], errs, -0.5, 0.25, (0.0, 1.0));
        assert!(r.is_err());
    }

    #[test]
    fn reduced_levels_reconstruct_follower() {
        let g = quadratic_game();
        let p = NesParams::quadratic_stackelberg();
        let t = simulate_ladder(Ladder::AvgRom, &g, &p, 0.0, 1.0, 0.01, State2::new(0.0, -1.5)).unwrap();
        for s in t.states() {
            assert!((s[1] - (2.0 * s[0] - 1.5)).abs() < 1e-12);
        }
    }
}
