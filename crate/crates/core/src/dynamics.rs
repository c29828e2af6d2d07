//! Right-hand sides of the nES dynamics and of every approximation derived
//! from them: partially averaged system, boundary-layer model, reduced-order
//! model, its averaged form, and the Nash-mode gradient field.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::equilibria::{best_response, reduced_cost_gradient, BestResponseMemo};
use crate::error::{NesError, Result};
use crate::game::{Game, Partial};
use crate::integrate::{rk4_integrate, IntegrationSpec, Trajectory, VectorField};

/// Joint action `(x1, x2)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct State2 {
    pub x1: f64,
    pub x2: f64,
}

impl State2 {
    pub const fn new(x1: f64, x2: f64) -> Self {
        State2 { x1, x2 }
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }

    /// Euclidean distance.
    pub fn distance(&self, other: State2) -> f64 {
        (self.x1 - other.x1).hypot(self.x2 - other.x2)
    }

    pub fn to_vec(self) -> Vec<f64> {
        vec![self.x1, self.x2]
    }
}

impl From<(f64, f64)> for State2 {
    fn from((x1, x2): (f64, f64)) -> Self {
        State2::new(x1, x2)
    }
}

/// The six nES design parameters. Use [`NesParams::new`] to get a validated
/// set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NesParams {
    pub alpha1: f64,
    pub k1: f64,
    pub omega1: f64,
    pub alpha2: f64,
    pub k2: f64,
    pub omega2: f64,
}

impl NesParams {
    pub fn new(alpha1: f64, k1: f64, omega1: f64, alpha2: f64, k2: f64, omega2: f64) -> Result<Self> {
        let p = NesParams {
            alpha1,
            k1,
            omega1,
            alpha2,
            k2,
            omega2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("alpha1", self.alpha1),
            ("k1", self.k1),
            ("omega1", self.omega1),
            ("alpha2", self.alpha2),
            ("k2", self.k2),
            ("omega2", self.omega2),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(NesError::InvalidParameter(format!("{name} = {v} must be positive and finite")));
            }
        }
        if self.omega1 == self.omega2 {
            return Err(NesError::InvalidParameter(
                "omega1 and omega2 must differ (distinct dither frequencies)".into(),
            ));
        }
        Ok(())
    }

    /// Time-scale separation `ε = 1 / (α2 k2)`.
    pub fn epsilon(&self) -> f64 {
        1.0 / (self.alpha2 * self.k2)
    }

    /// Dither amplitudes `(√(α1 ω1), √(α2 ω2))`, the componentwise speed bound.
    pub fn amplitudes(&self) -> (f64, f64) {
        ((self.alpha1 * self.omega1).sqrt(), (self.alpha2 * self.omega2).sqrt())
    }

    /// Quadratic game, Stackelberg tuning: fast follower, slow leader.
    pub fn quadratic_stackelberg() -> Self {
        NesParams {
            alpha1: 1e-2,
            k1: 2.0,
            omega1: 10.0,
            alpha2: 0.1,
            k2: 500.0,
            omega2: 500.0 * SQRT_2,
        }
    }

    /// Quadratic game, Nash tuning: both players on similar time scales.
    pub fn quadratic_nash() -> Self {
        NesParams {
            alpha1: 1e-2,
            k1: 5.0,
            omega1: 10.0,
            alpha2: 1e-2,
            k2: 5.0,
            omega2: 10.0 * SQRT_2,
        }
    }

    pub fn fish_war_nash() -> Self {
        NesParams {
            alpha1: 1e-2,
            k1: 10.0,
            omega1: 20.0,
            alpha2: 1e-2,
            k2: 10.0,
            omega2: 20.0 * SQRT_2,
        }
    }

    pub fn fish_war_stackelberg() -> Self {
        NesParams {
            alpha1: 1e-2,
            k1: 10.0,
            omega1: 20.0,
            alpha2: 0.05,
            k2: 100.0,
            omega2: 1000.0 * SQRT_2,
        }
    }
}

/// Original nES dynamics:
/// `ẋ1 = √(α1ω1) cos(ω1 t + k1 J_L)`, `ẋ2 = √(α2ω2) cos(ω2 t + k2 J_F)`.
pub fn nes_rhs(t: f64, s: State2, p: &NesParams, g: &Game) -> Result<State2> {
    let (a1, a2) = p.amplitudes();
    let jl = g.leader_cost(s.x1, s.x2)?;
    let jf = g.follower_cost(s.x1, s.x2)?;
    Ok(State2::new(
        a1 * (p.omega1 * t + p.k1 * jl).cos(),
        a2 * (p.omega2 * t + p.k2 * jf).cos(),
    ))
}

/// Follower averaged, leader still dithered:
/// `ẋ2 = -(α2 k2 / 2) ∂x2 J_F`.
pub fn partially_averaged_rhs(t: f64, s: State2, p: &NesParams, g: &Game) -> Result<State2> {
    let (a1, _) = p.amplitudes();
    let jl = g.leader_cost(s.x1, s.x2)?;
    let d2 = g.follower_partial(Partial::D2, s.x1, s.x2)?;
    Ok(State2::new(
        a1 * (p.omega1 * t + p.k1 * jl).cos(),
        -0.5 * p.alpha2 * p.k2 * d2,
    ))
}

/// Boundary-layer model in stretched time, `dy/dτ = -½ ∂x2 J_F(x1, y + h(x1))`.
/// Autonomous, so `tau` is ignored.
pub fn blm_rhs(tau: f64, y: f64, x1_frozen: f64, g: &Game) -> Result<f64> {
    let _ = tau;
    let h = best_response(g, x1_frozen)?;
    blm_rhs_with(y, x1_frozen, h, g)
}

fn blm_rhs_with(y: f64, x1: f64, h: f64, g: &Game) -> Result<f64> {
    Ok(-0.5 * g.follower_partial(Partial::D2, x1, y + h)?)
}

/// Reduced-order model: the leader's dithered loop with the follower on its
/// best response, `√(α1ω1) cos(ω1 t + k1 J_L(x1, h(x1)))`.
pub fn rom_rhs(t: f64, x1: f64, p: &NesParams, g: &Game) -> Result<f64> {
    let h = best_response(g, x1)?;
    rom_rhs_with(t, x1, h, p, g)
}

fn rom_rhs_with(t: f64, x1: f64, h: f64, p: &NesParams, g: &Game) -> Result<f64> {
    let jl = g.leader_cost(x1, h)?;
    Ok((p.alpha1 * p.omega1).sqrt() * (p.omega1 * t + p.k1 * jl).cos())
}

/// Averaged reduced-order model, `-(α1 k1 / 2) dJ̃_L/dx1`.
pub fn averaged_rom_rhs(x1: f64, p: &NesParams, g: &Game) -> Result<f64> {
    Ok(-0.5 * p.alpha1 * p.k1 * reduced_cost_gradient(g, x1)?)
}

/// Simultaneous partial-gradient flow used as the Nash-mode reference field.
pub fn nash_averaged_rhs(s: State2, p: &NesParams, g: &Game) -> Result<State2> {
    Ok(State2::new(
        -0.5 * p.alpha1 * p.k1 * g.leader_partial(Partial::D1, s.x1, s.x2)?,
        -0.5 * p.alpha2 * p.k2 * g.follower_partial(Partial::D2, s.x1, s.x2)?,
    ))
}

const LIE_PANELS: usize = 4096;
const WAVEFORM_TOL: f64 = 1e-9;

// 5-point Gauss-Legendre nodes and weights on [-1, 1]
const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

fn gauss5(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    r * GL5.iter().map(|(x, w)| w * f(m + r * x)).sum::<f64>()
}

fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    debug_assert!(n.is_multiple_of(2));
    let odd: f64 = values.iter().skip(1).step_by(2).sum();
    let even: f64 = values.iter().skip(2).step_by(2).take(n / 2 - 1).sum();
    h / 3.0 * (values[0] + values[n] + 4.0 * odd + 2.0 * even)
}

/// Lie-bracket averaging coefficient
/// `ν_ji = (1/2π) ∫₀^{2π} u_j(θ) ∫₀^θ u_i(s) ds dθ` for 2π-periodic,
/// zero-mean dithers.
///
/// The outer integral is composite Simpson over 4096 panels; the inner one is
/// accumulated panel by panel with 5-point Gauss-Legendre.
pub fn lie_bracket_coeff(u_i: impl Fn(f64) -> f64, u_j: impl Fn(f64) -> f64) -> Result<f64> {
    let h = 2.0 * PI / LIE_PANELS as f64;
    let nodes: Vec<f64> = (0..=LIE_PANELS).map(|k| k as f64 * h).collect();
    for (name, u) in [("u_i", &u_i as &dyn Fn(f64) -> f64), ("u_j", &u_j)] {
        if (u(0.0) - u(2.0 * PI)).abs() > WAVEFORM_TOL {
            return Err(NesError::InvalidParameter(format!("dither {name} is not 2π-periodic")));
        }
        let vals: Vec<f64> = nodes.iter().map(|&t| u(t)).collect();
        let mean = simpson(&vals, h) / (2.0 * PI);
        if mean.abs() > WAVEFORM_TOL {
            return Err(NesError::InvalidParameter(format!("dither {name} has non-zero mean {mean:e}")));
        }
    }
    let mut inner = 0.0;
    let mut outer = Vec::with_capacity(LIE_PANELS + 1);
    outer.push(u_j(0.0) * inner);
    for w in nodes.windows(2) {
        inner += gauss5(&u_i, w[0], w[1]);
        outer.push(u_j(w[1]) * inner);
    }
    Ok(simpson(&outer, h) / (2.0 * PI))
}

/// Quasi-steady-state approximation of the follower along a leader track.
#[derive(Debug, Clone)]
pub struct QssTracks {
    /// `h(x1(t)) + y̆((t - t0)/ε)`.
    pub qss: Trajectory,
    /// `h(x1(t))` alone.
    pub manifold: Trajectory,
}

/// Evaluates the quasi-steady state `h(x1(t)) + y̆((t - t0)/ε)` on the grid of
/// `x1_traj` (component 0), with `y̆` the boundary-layer solution from `y0`
/// for the leader frozen at `x1(t0)`.
pub fn qss_eval(x1_traj: &Trajectory, p: &NesParams, g: &Game, y0: f64) -> Result<QssTracks> {
    if x1_traj.is_empty() {
        return Err(NesError::EmptyTrajectory("leader track has no samples".into()));
    }
    let t0 = x1_traj.t0();
    let eps = p.epsilon();
    let mut hs = Vec::with_capacity(x1_traj.len());
    let memo = BestResponseMemo::new();
    for s in x1_traj.states() {
        hs.push(memo.best_response(g, s[0])?);
    }

    let layer = if y0 == 0.0 {
        None
    } else {
        let x1f = x1_traj.state(0)[0];
        let tau_end = (x1_traj.t_end() - t0) / eps;
        let dtau = (tau_end / 1e6).max(1e-2).min(tau_end);
        let blm = BlmSystem::with_manifold_point(x1f, hs[0], g);
        let spec = IntegrationSpec::new(0.0, tau_end, dtau, vec![y0]).with_labels(&["y"]);
        Some(rk4_integrate(&blm, &spec)?.complete()?)
    };

    let mut qss = x1_traj.empty_like(vec!["x2_qss".into()]);
    let mut manifold = x1_traj.empty_like(vec!["h".into()]);
    for (i, h) in hs.iter().enumerate() {
        let y = match &layer {
            Some(l) => l.interpolate(((x1_traj.time(i) - t0) / eps).min(l.t_end()), 0),
            None => 0.0,
        };
        qss.push(&[h + y]);
        manifold.push(&[*h]);
    }
    Ok(QssTracks { qss, manifold })
}

/// Original nES closed loop on `(x1, x2)`.
pub struct NesSystem<'a> {
    pub params: NesParams,
    pub game: &'a Game,
}

impl<'a> NesSystem<'a> {
    pub fn new(params: NesParams, game: &'a Game) -> Self {
        NesSystem { params, game }
    }
}

impl VectorField for NesSystem<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, t: f64, x: &[f64], dx: &mut [f64]) -> Result<()> {
        let v = nes_rhs(t, State2::new(x[0], x[1]), &self.params, self.game)?;
        dx[0] = v.x1;
        dx[1] = v.x2;
        Ok(())
    }
}

/// Partially averaged system on `(x1, x2)`.
pub struct PartiallyAveragedSystem<'a> {
    pub params: NesParams,
    pub game: &'a Game,
}

impl<'a> PartiallyAveragedSystem<'a> {
    pub fn new(params: NesParams, game: &'a Game) -> Self {
        PartiallyAveragedSystem { params, game }
    }
}

impl VectorField for PartiallyAveragedSystem<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, t: f64, x: &[f64], dx: &mut [f64]) -> Result<()> {
        let v = partially_averaged_rhs(t, State2::new(x[0], x[1]), &self.params, self.game)?;
        dx[0] = v.x1;
        dx[1] = v.x2;
        Ok(())
    }
}

/// Nash-mode averaged gradient flow on `(x1, x2)`.
pub struct NashAveragedSystem<'a> {
    pub params: NesParams,
    pub game: &'a Game,
}

impl<'a> NashAveragedSystem<'a> {
    pub fn new(params: NesParams, game: &'a Game) -> Self {
        NashAveragedSystem { params, game }
    }
}

impl VectorField for NashAveragedSystem<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, _t: f64, x: &[f64], dx: &mut [f64]) -> Result<()> {
        let v = nash_averaged_rhs(State2::new(x[0], x[1]), &self.params, self.game)?;
        dx[0] = v.x1;
        dx[1] = v.x2;
        Ok(())
    }
}

/// Reduced-order model on `x1`. Optionally memoises best-response solves,
/// which the integrator requests densely.
pub struct RomSystem<'a> {
    pub params: NesParams,
    pub game: &'a Game,
    memo: Option<BestResponseMemo>,
}

impl<'a> RomSystem<'a> {
    pub fn new(params: NesParams, game: &'a Game) -> Self {
        RomSystem {
            params,
            game,
            memo: None,
        }
    }

    pub fn with_memo(mut self) -> Self {
        self.memo = Some(BestResponseMemo::new());
        self
    }
}

fn h_of(game: &Game, memo: &Option<BestResponseMemo>, x1: f64) -> Result<f64> {
    match memo {
        Some(m) => m.best_response(game, x1),
        None => best_response(game, x1),
    }
}

impl VectorField for RomSystem<'_> {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, t: f64, x: &[f64], dx: &mut [f64]) -> Result<()> {
        let h = h_of(self.game, &self.memo, x[0])?;
        dx[0] = rom_rhs_with(t, x[0], h, &self.params, self.game)?;
        Ok(())
    }
}

/// Averaged reduced-order model on `x1`.
pub struct AveragedRomSystem<'a> {
    pub params: NesParams,
    pub game: &'a Game,
}

impl<'a> AveragedRomSystem<'a> {
    pub fn new(params: NesParams, game: &'a Game) -> Self {
        AveragedRomSystem { params, game }
    }
}

impl VectorField for AveragedRomSystem<'_> {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, _t: f64, x: &[f64], dx: &mut [f64]) -> Result<()> {
        dx[0] = averaged_rom_rhs(x[0], &self.params, self.game)?;
        Ok(())
    }
}

/// Boundary-layer model on `y = x2 - h(x1)` with the leader frozen.
pub struct BlmSystem<'a> {
    pub x1: f64,
    h: f64,
    pub game: &'a Game,
}

impl<'a> BlmSystem<'a> {
    pub fn new(x1_frozen: f64, game: &'a Game) -> Result<Self> {
        let h = best_response(game, x1_frozen)?;
        Ok(Self::with_manifold_point(x1_frozen, h, game))
    }

    fn with_manifold_point(x1: f64, h: f64, game: &'a Game) -> Self {
        BlmSystem { x1, h, game }
    }

    /// `h(x1)` at the frozen leader action.
    pub fn manifold(&self) -> f64 {
        self.h
    }
}

impl VectorField for BlmSystem<'_> {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, _tau: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        dy[0] = blm_rhs_with(y[0], self.x1, self.h, self.game)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{fish_war_game, quadratic_game, FishWarParams, FISH_WAR_STACKELBERG};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn params_validation() {
        assert!(NesParams::new(1.0, 1.0, 1.0, 1.0, 1.0, 2.0).is_ok());
        assert!(NesParams::new(0.0, 1.0, 1.0, 1.0, 1.0, 2.0).is_err());
        assert!(NesParams::new(1.0, 1.0, -1.0, 1.0, 1.0, 2.0).is_err());
        assert!(NesParams::new(1.0, 1.0, 3.0, 1.0, 1.0, 3.0).is_err());
        let p = NesParams::quadratic_stackelberg();
        assert_eq!(p.epsilon(), 1.0 / (0.1 * 500.0));
        for p in [
            NesParams::quadratic_stackelberg(),
            NesParams::quadratic_nash(),
            NesParams::fish_war_nash(),
            NesParams::fish_war_stackelberg(),
        ] {
            p.validate().unwrap();
        }
    }

    #[test]
    fn nes_rhs_examples() {
        let g = quadratic_game();
        let p = NesParams::quadratic_stackelberg();
        let v = nes_rhs(0.0, State2::new(0.0, 0.0), &p, &g).unwrap();
        assert!(close(v.x1, 0.1f64.sqrt(), 1e-15));
        let want = (0.1 * 500.0 * SQRT_2).sqrt() * (500.0f64 * 1.125).cos();
        assert!(close(v.x2, want, 1e-12));
    }

    #[test]
    fn quarter_phase_gives_zero_velocity() {
        // both costs vanish at (0, -1.5), so the phases are ω1 t and ω2 t
        let g = quadratic_game();
        let p = NesParams::new(0.01, 1.0, 1.0, 0.1, 1.0, 5.0).unwrap();
        let v = nes_rhs(PI / 2.0, State2::new(0.0, -1.5), &p, &g).unwrap();
        assert!(v.x1.abs() < 1e-15 && v.x2.abs() < 1e-14, "{v:?}");
    }

    #[test]
    fn partially_averaged_examples() {
        let g = quadratic_game();
        let p = NesParams::quadratic_stackelberg();
        let s = State2::new(0.0, 0.0);
        let v = partially_averaged_rhs(0.3, s, &p, &g).unwrap();
        assert!(close(v.x2, -37.5, 1e-12));
        assert_eq!(v.x1, nes_rhs(0.3, s, &p, &g).unwrap().x1);
        let on = partially_averaged_rhs(0.3, State2::new(0.7, 2.0 * 0.7 - 1.5), &p, &g).unwrap();
        assert!(on.x2.abs() < 1e-14);
    }

    #[test]
    fn blm_examples() {
        let g = quadratic_game();
        for x1 in [-1.0, 0.0, 2.5] {
            for y in [-1.0, 0.0, 0.3] {
                assert!(close(blm_rhs(0.0, y, x1, &g).unwrap(), -0.5 * y, 1e-12));
            }
        }
        let fw = fish_war_game(FishWarParams::default()).unwrap();
        let u = FISH_WAR_STACKELBERG.x1;
        for y in [-1e-3, 1e-3] {
            let r = blm_rhs(0.0, y, u, &fw).unwrap();
            assert_eq!(r.signum(), -y.signum());
        }
    }

    #[test]
    fn rom_examples() {
        let g = quadratic_game();
        let p = NesParams::quadratic_stackelberg();
        let a = (p.alpha1 * p.omega1).sqrt();
        assert!(close(rom_rhs(0.0, 0.0, &p, &g).unwrap(), a, 1e-15));
        let t = 0.37;
        let want = a * (p.omega1 * t - 0.5 * p.k1).cos();
        assert!(close(rom_rhs(t, 1.0 / 3.0, &p, &g).unwrap(), want, 1e-12));
    }

    #[test]
    fn averaged_rom_examples() {
        let g = quadratic_game();
        let p = NesParams::quadratic_stackelberg();
        assert!(averaged_rom_rhs(1.0 / 3.0, &p, &g).unwrap().abs() < 1e-14);
        assert!(close(averaged_rom_rhs(1.0, &p, &g).unwrap(), -0.06, 1e-14));
        for x1 in [-1.0, 0.2, 0.9] {
            let want = -0.01 * (9.0 * x1 - 3.0);
            assert!(close(averaged_rom_rhs(x1, &p, &g).unwrap(), want, 1e-12));
        }
    }

    #[test]
    fn nash_averaged_examples() {
        let g = quadratic_game();
        let p = NesParams::new(0.01, 10.0, 10.0, 0.01, 10.0, 20.0).unwrap();
        let v = nash_averaged_rhs(State2::new(0.0, 0.0), &p, &g).unwrap();
        assert_eq!(v.x1, 0.0);
        assert!(close(v.x2, -0.075, 1e-15));
        let z = nash_averaged_rhs(State2::new(0.6, -0.3), &p, &g).unwrap();
        assert!(z.x1.abs() < 1e-15 && z.x2.abs() < 1e-15);
    }

    #[test]
    fn lie_bracket_examples() {
        assert!(close(lie_bracket_coeff(f64::cos, f64::sin).unwrap(), 0.5, 1e-10));
        assert!(lie_bracket_coeff(f64::cos, f64::cos).unwrap().abs() < 1e-10);
        assert!(lie_bracket_coeff(|t: f64| 1.0 + t.cos(), f64::sin).is_err());
        assert!(lie_bracket_coeff(|t: f64| t / (2.0 * PI) - 0.5, f64::sin).is_err());
        // self pair (sin, sin): (1/2π)∫ sin θ (1 - cos θ) dθ = 0
        assert!(lie_bracket_coeff(f64::sin, f64::sin).unwrap().abs() < 1e-10);
    }

    #[test]
    fn qss_from_zero_offset_is_the_manifold() {
        let g = quadratic_game();
        let p = NesParams::quadratic_stackelberg();
        let rows: Vec<Vec<f64>> = (0..50).map(|i| vec![0.01 * i as f64]).collect();
        let x1 = Trajectory::from_rows(0.0, 0.1, &["x1"], &rows);
        let tracks = qss_eval(&x1, &p, &g, 0.0).unwrap();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(tracks.qss.state(i)[0], 2.0 * row[0] - 1.5);
            assert_eq!(tracks.manifold.state(i)[0], tracks.qss.state(i)[0]);
        }
    }

    #[test]
    fn qss_boundary_layer_decays_in_stretched_time() {
        let g = quadratic_game();
        let p = NesParams::quadratic_stackelberg();
        let eps = p.epsilon();
        let rows: Vec<Vec<f64>> = (0..200).map(|_| vec![0.2]).collect();
        let x1 = Trajectory::from_rows(0.0, 0.001, &["x1"], &rows);
        let tracks = qss_eval(&x1, &p, &g, 1.0).unwrap();
        for i in 0..rows.len() {
            let t = x1.time(i);
            let y = tracks.qss.state(i)[0] - tracks.manifold.state(i)[0];
            assert!(close(y, (-t / eps / 2.0).exp(), 1e-8), "t={t}");
        }
    }
}
