//! Command implementations behind the `nes` binary.
//!
//! Every command is a plain function returning a serialisable report, so the
//! same work is available in-process. [`run_from_args`] adds argument parsing,
//! artifact printing and exit codes on top.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{
    hierarchy_check, probe_order_epsilon, probe_order_omega1, probe_order_omega2, scaling_thresholds,
    simulate_ladder, HierarchyReport, Ladder, OrderProbeResult, ProbeOptions, ScalingThresholds, DEFAULT_MIN_RATIO,
};
use crate::boundary::BoundaryPolicy;
use crate::dynamics::{NesParams, NesSystem, State2};
use crate::equilibria::{best_response, nash_equilibrium, stackelberg_equilibrium, EquilibriumKind};
use crate::error::{NesError, Result};
use crate::game::Game;
use crate::games::{builtin_game, load_game, BUILTIN_GAMES};
use crate::integrate::{auto_step, final_window_mean2, fmt_g17, rk4_integrate, sup_distance, IntegrationSpec, Trajectory};
use crate::plot::{render, Glyph, Marker, Panel, Series};

/// Version tag of every JSON document written by the CLI.
pub const SCHEMA: &str = "nes/1";
/// Fraction of the run averaged for the convergence readout.
pub const DEFAULT_WINDOW: f64 = 0.2;
/// Default steps per period of the fastest dither.
pub const DEFAULT_SAMPLES: usize = 32;
/// Longest trajectory CSV written, in rows; longer runs are decimated.
pub const MAX_CSV_ROWS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Nash,
    Stackelberg,
    Custom,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Mode::Nash => "nash",
            Mode::Stackelberg => "stackelberg",
            Mode::Custom => "custom",
        })
    }
}

impl FromStr for Mode {
    type Err = NesError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nash" => Ok(Mode::Nash),
            "stackelberg" => Ok(Mode::Stackelberg),
            "custom" => Ok(Mode::Custom),
            other => Err(NesError::Usage(format!(
                "unknown mode `{other}` (expected nash, stackelberg or custom)"
            ))),
        }
    }
}

/// Where the game comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum GameSource {
    Builtin(String),
    Config(PathBuf),
}

impl GameSource {
    pub fn load(&self, policy: BoundaryPolicy) -> Result<Game> {
        let g = match self {
            GameSource::Builtin(name) => builtin_game(name)?,
            GameSource::Config(path) => load_game(path)?,
        };
        Ok(g.with_boundary(policy))
    }

    fn is_fish_war(&self) -> bool {
        matches!(self, GameSource::Builtin(n) if n.replace(['-', '_'], "") == "fishwar")
    }
}

/// Individually overridable design parameters.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ParamOverrides {
    pub alpha1: Option<f64>,
    pub k1: Option<f64>,
    pub omega1: Option<f64>,
    pub alpha2: Option<f64>,
    pub k2: Option<f64>,
    pub omega2: Option<f64>,
}

impl ParamOverrides {
    pub fn apply(&self, base: NesParams) -> Result<NesParams> {
        NesParams::new(
            self.alpha1.unwrap_or(base.alpha1),
            self.k1.unwrap_or(base.k1),
            self.omega1.unwrap_or(base.omega1),
            self.alpha2.unwrap_or(base.alpha2),
            self.k2.unwrap_or(base.k2),
            self.omega2.unwrap_or(base.omega2),
        )
    }

    /// All six values, or a usage error naming the missing ones.
    pub fn complete(&self) -> Result<NesParams> {
        let named = [
            ("--alpha1", self.alpha1),
            ("--k1", self.k1),
            ("--omega1", self.omega1),
            ("--alpha2", self.alpha2),
            ("--k2", self.k2),
            ("--omega2", self.omega2),
        ];
        let missing: Vec<&str> = named.iter().filter(|(_, v)| v.is_none()).map(|(n, _)| *n).collect();
        if !missing.is_empty() {
            return Err(NesError::Usage(format!(
                "custom mode needs all six parameters; missing {}",
                missing.join(", ")
            )));
        }
        self.apply(NesParams::quadratic_stackelberg())
    }
}

/// Which artifacts a simulation writes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outputs {
    pub csv: bool,
    pub summary: bool,
    pub phase_svg: bool,
    pub time_svg: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            csv: true,
            summary: true,
            phase_svg: true,
            time_svg: true,
        }
    }
}

/// Raw, possibly partial, run settings as given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRequest {
    pub game: GameSource,
    pub mode: Mode,
    pub params: ParamOverrides,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub auto_dt: Option<usize>,
    pub x1: Option<f64>,
    pub x2: Option<f64>,
    pub out_dir: PathBuf,
    pub boundary: BoundaryPolicy,
}

impl RunRequest {
    pub fn new(game: GameSource, mode: Mode) -> Self {
        RunRequest {
            game,
            mode,
            params: ParamOverrides::default(),
            t_end: None,
            dt: None,
            auto_dt: None,
            x1: None,
            x2: None,
            out_dir: PathBuf::from("out"),
            boundary: BoundaryPolicy::Strict,
        }
    }
}

/// Fully resolved simulation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub game: GameSource,
    pub mode: Mode,
    pub params: NesParams,
    pub t0: f64,
    pub t_end: f64,
    pub dt: f64,
    pub x0: State2,
    pub out_dir: PathBuf,
    pub outputs: Outputs,
    pub boundary: BoundaryPolicy,
    pub window_fraction: f64,
}

/// Published parameter set, horizon and starting point for a game and mode.
fn mode_defaults(source: &GameSource, mode: Mode) -> (NesParams, f64, State2) {
    match (source.is_fish_war(), mode) {
        (true, Mode::Nash) => (NesParams::fish_war_nash(), 300.0, State2::new(0.25, 0.8)),
        (true, _) => (NesParams::fish_war_stackelberg(), 600.0, State2::new(1.1, 0.05)),
        (false, Mode::Nash) => (NesParams::quadratic_nash(), 2000.0, State2::new(0.0, 0.0)),
        (false, _) => (NesParams::quadratic_stackelberg(), 300.0, State2::new(0.0, 0.0)),
    }
}

impl RunConfig {
    /// Fills the gaps of `req` with the defaults of its game and mode and
    /// loads the game.
    pub fn resolve(req: &RunRequest) -> Result<(RunConfig, Game)> {
        let game = req.game.load(req.boundary)?;
        let (base, t_end, x0) = mode_defaults(&req.game, req.mode);
        let params = match req.mode {
            Mode::Custom => req.params.complete()?,
            _ => req.params.apply(base)?,
        };
        let dt = match (req.dt, req.auto_dt) {
            (Some(_), Some(_)) => return Err(NesError::Usage("give either --dt or --auto-dt, not both".into())),
            (Some(dt), None) => dt,
            (None, n) => {
                let n = n.unwrap_or(DEFAULT_SAMPLES);
                if n < 8 {
                    return Err(NesError::Usage(format!("--auto-dt needs at least 8 samples per period, got {n}")));
                }
                auto_step(&params, n)
            }
        };
        let x0 = State2::new(req.x1.unwrap_or(x0.x1), req.x2.unwrap_or(x0.x2));
        if !game.is_feasible(x0.x1, x0.x2) {
            return Err(NesError::Usage(format!(
                "initial state ({}, {}) is outside the feasible set of `{}`; pass --x1/--x2",
                x0.x1, x0.x2, game.name
            )));
        }
        let cfg = RunConfig {
            game: req.game.clone(),
            mode: req.mode,
            params,
            t0: 0.0,
            t_end: req.t_end.unwrap_or(t_end),
            dt,
            x0,
            out_dir: req.out_dir.clone(),
            outputs: Outputs::default(),
            boundary: req.boundary,
            window_fraction: DEFAULT_WINDOW,
        };
        cfg.spec().validate()?;
        Ok((cfg, game))
    }

    pub fn spec(&self) -> IntegrationSpec {
        IntegrationSpec::new(self.t0, self.t_end, self.dt, self.x0.to_vec())
    }
}

/// Reference equilibria: the game's declared ones, otherwise solved for from
/// `seed`. Unsolvable ones are `None`.
pub fn reference_equilibria(g: &Game, seed: State2) -> (Option<State2>, Option<State2>) {
    let nash = g
        .references
        .nash
        .or_else(|| nash_equilibrium(g, seed).ok().map(|r| r.point));
    let stackelberg = g
        .references
        .stackelberg
        .or_else(|| stackelberg_equilibrium(g, seed.x1).ok().map(|r| r.point));
    (nash, stackelberg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationInfo {
    pub t: f64,
    pub state: Vec<f64>,
    pub message: String,
}

/// JSON summary of a simulation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub schema: &'static str,
    pub game: String,
    pub mode: Mode,
    pub params: NesParams,
    pub epsilon: f64,
    pub hierarchy: HierarchyReport,
    pub t0: f64,
    pub t_end: f64,
    pub dt: f64,
    pub samples: usize,
    pub initial_state: State2,
    pub final_state: State2,
    pub window_fraction: f64,
    pub final_window_mean: State2,
    pub nash: Option<State2>,
    pub stackelberg: Option<State2>,
    pub distance_to_nash: Option<f64>,
    pub distance_to_stackelberg: Option<f64>,
    /// `"nash"` or `"stackelberg"`, whichever reference is strictly closer.
    pub closer_to: Option<String>,
    pub boundary_policy: BoundaryPolicy,
    pub clamp_count: u64,
    pub complete: bool,
    pub violation: Option<ViolationInfo>,
}

impl RunSummary {
    /// 0 for a complete run, 4 for one cut short by a domain violation.
    pub fn exit_code(&self) -> i32 {
        if self.complete {
            0
        } else {
            4
        }
    }
}

/// Outcome of [`cmd_simulate`].
#[derive(Debug, Clone)]
pub struct Simulation {
    pub summary: RunSummary,
    /// Full-resolution trajectory (possibly partial).
    pub trajectory: Trajectory,
    pub artifacts: Vec<PathBuf>,
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| NesError::Io(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report types serialise");
    s.push('\n');
    s
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| NesError::Io(format!("cannot create {}: {e}", dir.display())))
}

fn decimated(t: &Trajectory) -> Trajectory {
    t.decimate(t.len().div_ceil(MAX_CSV_ROWS).max(1))
}

/// Integrates the nES closed loop and writes the requested artifacts. A
/// domain violation still yields a report (with `complete = false`) and the
/// partial artifacts.
pub fn cmd_simulate(cfg: &RunConfig, game: &Game) -> Result<Simulation> {
    let run = rk4_integrate(&NesSystem::new(cfg.params, game), &cfg.spec())?;
    let traj = run.trajectory;
    if traj.len() < 2 {
        let why = run
            .violation
            .map_or_else(|| "no steps taken".to_string(), |v| v.error.to_string());
        return Err(NesError::EmptyTrajectory(why));
    }
    let last = traj.last().expect("non-empty");
    let final_state = State2::new(last[0], last[1]);
    let mean = final_window_mean2(&traj, cfg.window_fraction)?;
    let (nash, stackelberg) = reference_equilibria(game, cfg.x0);
    let dn = nash.map(|p| mean.distance(p));
    let ds = stackelberg.map(|p| mean.distance(p));
    let closer_to = match (dn, ds) {
        (Some(a), Some(b)) if a < b => Some("nash".to_string()),
        (Some(a), Some(b)) if b < a => Some("stackelberg".to_string()),
        _ => None,
    };
    let summary = RunSummary {
        schema: SCHEMA,
        game: game.name.clone(),
        mode: cfg.mode,
        params: cfg.params,
        epsilon: cfg.params.epsilon(),
        hierarchy: hierarchy_check(&cfg.params, DEFAULT_MIN_RATIO),
        t0: cfg.t0,
        t_end: cfg.t_end,
        dt: cfg.dt,
        samples: traj.len(),
        initial_state: cfg.x0,
        final_state,
        window_fraction: cfg.window_fraction,
        final_window_mean: mean,
        nash,
        stackelberg,
        distance_to_nash: dn,
        distance_to_stackelberg: ds,
        closer_to,
        boundary_policy: cfg.boundary,
        clamp_count: game.clamp_count(),
        complete: run.violation.is_none(),
        violation: run.violation.map(|v| ViolationInfo {
            t: v.t,
            state: v.state,
            message: v.error.to_string(),
        }),
    };

    let mut artifacts = Vec::new();
    let o = cfg.outputs;
    if o.csv || o.summary || o.phase_svg || o.time_svg {
        ensure_dir(&cfg.out_dir)?;
    }
    if o.csv {
        let p = cfg.out_dir.join("trajectory.csv");
        decimated(&traj).write_csv(&p)?;
        artifacts.push(p);
    }
    if o.summary {
        let p = cfg.out_dir.join("summary.json");
        write_text(&p, &to_json(&summary))?;
        artifacts.push(p);
    }
    if o.phase_svg {
        let p = cfg.out_dir.join("phase.svg");
        write_text(&p, &phase_svg(&traj, &summary))?;
        artifacts.push(p);
    }
    if o.time_svg {
        let p = cfg.out_dir.join("time.svg");
        write_text(&p, &time_svg(&traj, &summary))?;
        artifacts.push(p);
    }
    Ok(Simulation {
        summary,
        trajectory: traj,
        artifacts,
    })
}

const BLUE: &str = "#1f77b4";
const GREEN: &str = "#2ca02c";
const RED: &str = "#d62728";
const PURPLE: &str = "#9467bd";

fn phase_svg(traj: &Trajectory, s: &RunSummary) -> String {
    let pts: Vec<(f64, f64)> = traj.states().map(|x| (x[0], x[1])).collect();
    let mut panel = Panel::new(format!("{} ({} mode): phase plane", s.game, s.mode), "x1", "x2")
        .series(Series::new("trajectory", BLUE, pts))
        .marker(Marker::new("start", GREEN, (s.initial_state.x1, s.initial_state.x2), Glyph::Circle));
    if let Some(n) = s.nash {
        panel = panel.marker(Marker::new("Nash", RED, (n.x1, n.x2), Glyph::Square));
    }
    if let Some(st) = s.stackelberg {
        panel = panel.marker(Marker::new("Stackelberg", PURPLE, (st.x1, st.x2), Glyph::Triangle));
    }
    render(&[panel])
}

fn time_svg(traj: &Trajectory, s: &RunSummary) -> String {
    let panels = (0..2)
        .map(|c| {
            let name = &traj.labels()[c];
            let pts = (0..traj.len()).map(|i| (traj.time(i), traj.state(i)[c])).collect();
            let mut p = Panel::new(format!("{}: {name}(t)", s.game), "t [s]", name.as_str())
                .series(Series::new(name.as_str(), BLUE, pts));
            let pick = |e: State2| if c == 0 { e.x1 } else { e.x2 };
            if let Some(n) = s.nash {
                p = p.hline("Nash", RED, pick(n));
            }
            if let Some(st) = s.stackelberg {
                p = p.hline("Stackelberg", PURPLE, pick(st));
            }
            p
        })
        .collect::<Vec<_>>();
    render(&panels)
}

/// One solved (or failed) equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumEntry {
    pub kind: EquilibriumKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<std::collections::BTreeMap<String, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriaReport {
    pub schema: &'static str,
    pub game: String,
    pub equilibria: Vec<EquilibriumEntry>,
}

impl EquilibriaReport {
    pub fn get(&self, kind: EquilibriumKind) -> Option<State2> {
        self.equilibria
            .iter()
            .find(|e| e.kind == kind)
            .and_then(|e| Some(State2::new(e.x1?, e.x2?)))
    }

    /// 0 when both solves succeeded, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.equilibria.iter().any(|e| e.error.is_some()) {
            3
        } else {
            0
        }
    }
}

/// Solves for both equilibria. Seeds default to the game's declared
/// references, then to `(0, x2_hint)`.
pub fn cmd_equilibria(game: &Game, nash_seed: Option<State2>, stackelberg_seed: Option<f64>) -> EquilibriaReport {
    let fallback = State2::new(0.0, game.x2_hint);
    let ns = nash_seed.or(game.references.nash).unwrap_or(fallback);
    let ss = stackelberg_seed
        .or(game.references.stackelberg.map(|s| s.x1))
        .unwrap_or(fallback.x1);
    let entry = |kind, r: Result<crate::equilibria::EquilibriumResult>| match r {
        Ok(r) => EquilibriumEntry {
            kind,
            x1: Some(r.point.x1),
            x2: Some(r.point.x2),
            residuals: Some(r.residuals),
            iterations: Some(r.iterations),
            method: Some(r.method),
            error: None,
        },
        Err(e) => EquilibriumEntry {
            kind,
            x1: None,
            x2: None,
            residuals: None,
            iterations: None,
            method: None,
            error: Some(e.to_string()),
        },
    };
    EquilibriaReport {
        schema: SCHEMA,
        game: game.name.clone(),
        equilibria: vec![
            entry(EquilibriumKind::Nash, nash_equilibrium(game, ns)),
            entry(EquilibriumKind::Stackelberg, stackelberg_equilibrium(game, ss)),
        ],
    }
}

/// Parses `a:b` (or `a,b`) into two ladder levels.
pub fn parse_pair(s: &str) -> Result<(Ladder, Ladder)> {
    let parts: Vec<&str> = s.split([':', ',']).map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => Ok((a.parse()?, b.parse()?)),
        _ => Err(NesError::Usage(format!("--pair expects `level:level`, got `{s}`"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub schema: &'static str,
    pub game: String,
    pub pair: [Ladder; 2],
    pub params: NesParams,
    pub dt: f64,
    pub window: (f64, f64),
    /// Sup over the window of the Euclidean distance in `(x1, x2)`.
    pub sup_distance: f64,
    /// Same, leader component only.
    pub sup_distance_x1: f64,
}

/// Integrates two ladder levels from the same initial state and measures
/// their distance. Writes both trajectories and the per-time error.
pub fn cmd_compare(cfg: &RunConfig, game: &Game, a: Ladder, b: Ladder, samples: Option<usize>) -> Result<CompareReport> {
    let p = &cfg.params;
    let dt = match samples {
        Some(n) => 2.0 * std::f64::consts::PI / (a.fastest_frequency(p).max(b.fastest_frequency(p)) * n as f64),
        None => cfg.dt,
    };
    let ta = simulate_ladder(a, game, p, cfg.t0, cfg.t_end, dt, cfg.x0)?;
    let tb = simulate_ladder(b, game, p, cfg.t0, cfg.t_end, dt, cfg.x0)?;
    let window = (cfg.t0, cfg.t_end.min(ta.t_end()).min(tb.t_end()));
    let report = CompareReport {
        schema: SCHEMA,
        game: game.name.clone(),
        pair: [a, b],
        params: *p,
        dt,
        window,
        sup_distance: sup_distance(&ta, &tb, window, &[0, 1])?,
        sup_distance_x1: sup_distance(&ta, &tb, window, &[0])?,
    };

    ensure_dir(&cfg.out_dir)?;
    decimated(&ta).write_csv(cfg.out_dir.join(format!("left_{a}.csv")))?;
    decimated(&tb).write_csv(cfg.out_dir.join(format!("right_{b}.csv")))?;
    let err = ta.map(&["error", "error_x1"], |t, x| {
        let (d1, d2) = (x[0] - tb.interpolate(t, 0), x[1] - tb.interpolate(t, 1));
        vec![d1.hypot(d2), d1.abs()]
    });
    decimated(&err).write_csv(cfg.out_dir.join("error.csv"))?;
    write_text(&cfg.out_dir.join("compare.json"), &to_json(&report))?;
    Ok(report)
}

/// Error-order probe selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Probe {
    /// Original versus partially averaged, swept over `ω2`.
    Omega2,
    /// Partially averaged versus ROM plus quasi-steady state, swept over `k2`.
    Epsilon,
    /// ROM versus averaged ROM, swept over `ω1`.
    Omega1,
}

impl FromStr for Probe {
    type Err = NesError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "omega2" => Ok(Probe::Omega2),
            "epsilon" | "k2" => Ok(Probe::Epsilon),
            "omega1" => Ok(Probe::Omega1),
            other => Err(NesError::Usage(format!(
                "unknown probe `{other}` (expected omega2, epsilon or omega1)"
            ))),
        }
    }
}

impl Probe {
    /// Default horizon: short, so the exponential growth of the error bounds
    /// does not swamp the order signal.
    pub fn default_horizon(self) -> f64 {
        match self {
            Probe::Omega2 => 5.0,
            Probe::Epsilon | Probe::Omega1 => 10.0,
        }
    }

    pub fn default_samples(self) -> usize {
        match self {
            Probe::Omega2 | Probe::Omega1 => 64,
            Probe::Epsilon => 256,
        }
    }

    /// Base parameters: the quadratic Stackelberg set, except that the
    /// `ω2` probe uses a moderate follower gain `k2 = 10`.
    pub fn default_params(self) -> NesParams {
        let p = NesParams::quadratic_stackelberg();
        match self {
            Probe::Omega2 => NesParams { k2: 10.0, ..p },
            _ => p,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRequest {
    pub probe: Probe,
    pub values: Vec<f64>,
    pub params: NesParams,
    pub horizon: f64,
    /// Initial state; `x2 = None` starts the follower on its best response.
    pub x1: f64,
    pub x2: Option<f64>,
    pub samples_per_period: usize,
    pub out_dir: Option<PathBuf>,
}

impl SweepRequest {
    pub fn new(probe: Probe, values: Vec<f64>) -> Self {
        SweepRequest {
            probe,
            values,
            params: probe.default_params(),
            horizon: probe.default_horizon(),
            x1: 0.0,
            x2: match probe {
                Probe::Epsilon => None,
                _ => Some(0.0),
            },
            samples_per_period: probe.default_samples(),
            out_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub schema: &'static str,
    pub game: String,
    pub probe: Probe,
    pub initial_state: State2,
    #[serde(flatten)]
    pub result: OrderProbeResult,
    pub pass: bool,
}

/// Runs an error-order probe, writing `sweep.csv` and `sweep.json` when an
/// output directory is set.
pub fn cmd_sweep(game: &Game, req: &SweepRequest) -> Result<SweepReport> {
    if req.values.len() < 3 {
        return Err(NesError::Usage(format!(
            "a sweep needs at least 3 values to fit a slope with a residual, got {}",
            req.values.len()
        )));
    }
    let x2 = match req.x2 {
        Some(v) => v,
        None => best_response(game, req.x1)?,
    };
    let x0 = State2::new(req.x1, x2);
    let opts = ProbeOptions::new(req.horizon, x0).with_samples(req.samples_per_period);
    let result = match req.probe {
        Probe::Omega2 => probe_order_omega2(game, &req.params, &req.values, &opts)?,
        Probe::Epsilon => probe_order_epsilon(game, &req.params, &req.values, &opts)?,
        Probe::Omega1 => probe_order_omega1(game, &req.params, &req.values, &opts)?,
    };
    let report = SweepReport {
        schema: SCHEMA,
        game: game.name.clone(),
        probe: req.probe,
        initial_state: x0,
        pass: result.passes(),
        result,
    };
    if let Some(dir) = &req.out_dir {
        ensure_dir(dir)?;
        let mut csv = String::from("param_value,sup_error\n");
        for (v, e) in report.result.values.iter().zip(&report.result.errors) {
            csv.push_str(&format!("{},{}\n", fmt_g17(*v), fmt_g17(*e)));
        }
        write_text(&dir.join("sweep.csv"), &csv)?;
        write_text(&dir.join("sweep.json"), &to_json(&report))?;
    }
    Ok(report)
}

/// Constants of the theoretical thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdConstants {
    pub upsilon: f64,
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignReport {
    pub schema: &'static str,
    pub params: NesParams,
    pub epsilon: f64,
    pub hierarchy: HierarchyReport,
    pub thresholds: Option<ScalingThresholds>,
    pub advisory: Vec<String>,
}

/// Time-scale hierarchy of `params` and, given `υ`, the theoretical
/// thresholds.
pub fn cmd_design(params: &NesParams, min_ratio: f64, constants: Option<ThresholdConstants>) -> Result<DesignReport> {
    let hierarchy = hierarchy_check(params, min_ratio);
    let mut advisory = vec![hierarchy.advisory.clone()];
    let thresholds = match constants {
        Some(k) => {
            let t = scaling_thresholds(k.upsilon, k.c, k.c1, k.c2, k.c3, params.alpha2)?;
            advisory.push(
                "thresholds are conservative sufficient conditions from the convergence proof; tune with the hierarchy ratios in practice"
                    .into(),
            );
            if t.saturated {
                advisory.push("omega2* exceeds double precision (saturated); the bound is not usable at this upsilon".into());
            }
            Some(t)
        }
        None => None,
    };
    Ok(DesignReport {
        schema: SCHEMA,
        params: *params,
        epsilon: params.epsilon(),
        hierarchy,
        thresholds,
        advisory,
    })
}

impl fmt::Display for DesignReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.hierarchy.stages;
        let r = &self.hierarchy.ratios;
        writeln!(
            f,
            "stages  alpha1*k1 = {:.6}  omega1 = {:.6}  alpha2*k2 = {:.6}  omega2 = {:.6}",
            s[0], s[1], s[2], s[3]
        )?;
        writeln!(f, "ratios  {:.6}  {:.6}  {:.6}  (min {})", r[0], r[1], r[2], self.hierarchy.min_ratio)?;
        writeln!(f, "epsilon = {:.6}", self.epsilon)?;
        if let Some(t) = &self.thresholds {
            writeln!(
                f,
                "upsilon = {}: omega1* = {:.6e}  k2* = {:.6e}  omega2* = {:.6e}{}",
                t.upsilon,
                t.omega1_star,
                t.k2_star,
                t.omega2_star,
                if t.saturated { "  (saturated)" } else { "" }
            )?;
        }
        for a in &self.advisory {
            writeln!(f, "note: {a}")?;
        }
        Ok(())
    }
}

/// Built-in game names with a one-line description.
pub fn list_games() -> Vec<(&'static str, &'static str)> {
    BUILTIN_GAMES
        .iter()
        .map(|n| {
            let d = match *n {
                "quadratic" => "J_L = x1^2/2 + 2 x1 x2, J_F = (x2 - 2 x1 + 1.5)^2/2; NE (0.6, -0.3), SE (1/3, -5/6)",
                _ => "Fish War with logarithmic utilities; NE (0.3, 0.9), SE (1.19426, 0.01896)",
            };
            (*n, d)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// argument parsing

#[derive(Debug, Parser)]
#[command(name = "nes", version, about = "Nested extremum seeking for leader-follower games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the nES closed loop and write CSV, JSON and SVG artifacts.
    Simulate(RunArgs),
    /// Solve for the Nash and Stackelberg equilibria.
    Equilibria(RunArgs),
    /// Integrate two levels of the approximation ladder and compare them.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        /// Pair of levels, e.g. `original:partial` (levels: original, partial, rom, avgrom).
        #[arg(long, default_value = "original:partial")]
        pair: String,
    },
    /// Fit the error order of an approximation over a parameter sweep.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// omega2, epsilon (sweeps k2) or omega1.
        #[arg(long)]
        probe: String,
        /// Comma-separated, increasing parameter values (at least 3).
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<f64>,
    },
    /// Check the time-scale hierarchy and evaluate theoretical thresholds.
    Design {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        upsilon: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        c1: f64,
        #[arg(long, default_value_t = 1.0)]
        c2: f64,
        #[arg(long, default_value_t = 1.0)]
        c3: f64,
        #[arg(long, default_value_t = DEFAULT_MIN_RATIO)]
        min_ratio: f64,
    },
    /// List the built-in games.
    ListGames,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Built-in game name.
    #[arg(long, conflicts_with = "config")]
    pub game: Option<String>,
    /// JSON game config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "stackelberg")]
    pub mode: String,
    #[arg(long)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub k1: Option<f64>,
    #[arg(long)]
    pub omega1: Option<f64>,
    #[arg(long)]
    pub alpha2: Option<f64>,
    #[arg(long)]
    pub k2: Option<f64>,
    #[arg(long)]
    pub omega2: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Steps per period of the fastest dither.
    #[arg(long)]
    pub auto_dt: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub x1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x2: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "strict")]
    pub boundary: String,
}

impl RunArgs {
    fn source(&self) -> GameSource {
        match (&self.config, &self.game) {
            (Some(p), _) => GameSource::Config(p.clone()),
            (None, Some(n)) => GameSource::Builtin(n.clone()),
            (None, None) => GameSource::Builtin("quadratic".into()),
        }
    }

    pub fn request(&self) -> Result<RunRequest> {
        Ok(RunRequest {
            game: self.source(),
            mode: self.mode.parse()?,
            params: ParamOverrides {
                alpha1: self.alpha1,
                k1: self.k1,
                omega1: self.omega1,
                alpha2: self.alpha2,
                k2: self.k2,
                omega2: self.omega2,
            },
            t_end: self.t_end,
            dt: self.dt,
            auto_dt: self.auto_dt,
            x1: self.x1,
            x2: self.x2,
            out_dir: self.out.clone().unwrap_or_else(|| PathBuf::from("out")),
            boundary: self.boundary.parse()?,
        })
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())?;
    Ok(())
}

/// Executes a parsed command, printing reports to `out`; returns the exit
/// code.
pub fn execute(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Simulate(args) => {
            let (cfg, game) = RunConfig::resolve(&args.request()?)?;
            let sim = cmd_simulate(&cfg, &game)?;
            emit(out, &to_json(&sim.summary))?;
            if let Some(v) = &sim.summary.violation {
                writeln!(out, "domain violation at t = {}: {}", v.t, v.message)?;
            }
            Ok(sim.summary.exit_code())
        }
        Command::Equilibria(args) => {
            let req = args.request()?;
            let game = req.game.load(req.boundary)?;
            let nash_seed = match (args.x1, args.x2) {
                (Some(a), Some(b)) => Some(State2::new(a, b)),
                _ => None,
            };
            let report = cmd_equilibria(&game, nash_seed, args.x1);
            let json = to_json(&report);
            if let Some(dir) = &args.out {
                ensure_dir(dir)?;
                write_text(&dir.join("equilibria.json"), &json)?;
            }
            emit(out, &json)?;
            Ok(report.exit_code())
        }
        Command::Compare { run, pair } => {
            let (a, b) = parse_pair(&pair)?;
            let (cfg, game) = RunConfig::resolve(&run.request()?)?;
            let samples = if run.dt.is_some() {
                None
            } else {
                Some(run.auto_dt.unwrap_or(DEFAULT_SAMPLES))
            };
            let report = cmd_compare(&cfg, &game, a, b, samples)?;
            emit(out, &to_json(&report))?;
            Ok(0)
        }
        Command::Sweep { run, probe, values } => {
            let probe: Probe = probe.parse()?;
            if run.dt.is_some() {
                return Err(NesError::Usage("sweep sets its own steps; use --auto-dt".into()));
            }
            let req = run.request()?;
            let game = req.game.load(req.boundary)?;
            let mut sweep = SweepRequest::new(probe, values);
            sweep.params = req.params.apply(probe.default_params())?;
            if let Some(t) = run.t_end {
                sweep.horizon = t;
            }
            if let Some(x1) = run.x1 {
                sweep.x1 = x1;
            }
            if run.x2.is_some() {
                sweep.x2 = run.x2;
            }
            if let Some(n) = run.auto_dt {
                sweep.samples_per_period = n;
            }
            sweep.out_dir = Some(req.out_dir);
            let report = cmd_sweep(&game, &sweep)?;
            emit(out, &to_json(&report))?;
            Ok(0)
        }
        Command::Design {
            run,
            upsilon,
            c,
            c1,
            c2,
            c3,
            min_ratio,
        } => {
            let req = run.request()?;
            let (base, _, _) = mode_defaults(&req.game, req.mode);
            let params = match req.mode {
                Mode::Custom => req.params.complete()?,
                _ => req.params.apply(base)?,
            };
            let constants = upsilon.map(|upsilon| ThresholdConstants { upsilon, c, c1, c2, c3 });
            let report = cmd_design(&params, min_ratio, constants)?;
            if let Some(dir) = &run.out {
                ensure_dir(dir)?;
                write_text(&dir.join("design.json"), &to_json(&report))?;
            }
            emit(out, &report.to_string())?;
            Ok(0)
        }
        Command::ListGames => {
            for (name, about) in list_games() {
                writeln!(out, "{name:<10} {about}")?;
            }
            Ok(0)
        }
    }
}

/// Entry point of the `nes` binary: parses `args`, runs the command and
/// returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli.command, &mut lock) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("nes: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_defaults_follow_game() {
        let q = GameSource::Builtin("quadratic".into());
        let (p, t, x0) = mode_defaults(&q, Mode::Stackelberg);
        assert_eq!(p, NesParams::quadratic_stackelberg());
        assert_eq!((t, x0), (300.0, State2::new(0.0, 0.0)));
        let (p, t, _) = mode_defaults(&q, Mode::Nash);
        assert_eq!((p, t), (NesParams::quadratic_nash(), 2000.0));
        let f = GameSource::Builtin("fish-war".into());
        assert_eq!(mode_defaults(&f, Mode::Nash).0, NesParams::fish_war_nash());
        assert_eq!(mode_defaults(&f, Mode::Stackelberg).2, State2::new(1.1, 0.05));
    }

    #[test]
    fn custom_mode_requires_all_params() {
        let mut req = RunRequest::new(GameSource::Builtin("quadratic".into()), Mode::Custom);
        req.params.alpha1 = Some(0.01);
        let err = RunConfig::resolve(&req).unwrap_err();
        assert!(matches!(err, NesError::Usage(ref m) if m.contains("--k1")), "{err}");
        req.params = ParamOverrides {
            alpha1: Some(0.01),
            k1: Some(2.0),
            omega1: Some(10.0),
            alpha2: Some(0.1),
            k2: Some(50.0),
            omega2: Some(100.0),
        };
        let (cfg, _) = RunConfig::resolve(&req).unwrap();
        assert_eq!(cfg.params.k2, 50.0);
        assert_eq!(cfg.dt, auto_step(&cfg.params, DEFAULT_SAMPLES));
    }

    #[test]
    fn zero_duration_is_rejected() {
        let mut req = RunRequest::new(GameSource::Builtin("quadratic".into()), Mode::Stackelberg);
        req.t_end = Some(0.0);
        assert!(matches!(RunConfig::resolve(&req), Err(NesError::EmptyTrajectory(_))));
    }

    #[test]
    fn pair_parsing() {
        assert_eq!(parse_pair("original:partial").unwrap(), (Ladder::Original, Ladder::Partial));
        assert_eq!(parse_pair("rom, avgrom").unwrap(), (Ladder::Rom, Ladder::AvgRom));
        assert!(parse_pair("rom").is_err());
        assert!(parse_pair("rom:nope").is_err());
    }

    #[test]
    fn design_examples() {
        let r = cmd_design(&NesParams::quadratic_stackelberg(), 5.0, None).unwrap();
        assert!(!r.hierarchy.flagged);
        let k = ThresholdConstants {
            upsilon: 1.0,
            c: 1.0,
            c1: 2.0,
            c2: 1.0,
            c3: 3.0,
        };
        let r = cmd_design(&NesParams::fish_war_stackelberg(), 5.0, Some(k)).unwrap();
        assert!(r.hierarchy.flagged);
        let t = r.thresholds.unwrap();
        assert_eq!(t.omega1_star, 2.0);
        assert!((t.k2_star - 1f64.exp().powi(2) / 0.05).abs() < 1e-9);
        assert!((t.omega2_star / (3.0 * (2.0 * 1f64.exp().powi(2)).exp()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_value_sweep_is_usage_error() {
        let g = crate::games::quadratic_game();
        let r = cmd_sweep(&g, &SweepRequest::new(Probe::Omega1, vec![100.0, 400.0]));
        assert!(matches!(r, Err(NesError::Usage(_))));
    }
}
