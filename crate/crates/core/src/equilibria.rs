//! Follower best response, reduced leader cost, and reference equilibria.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{NesError, Result};
use crate::game::{Game, Partial};
use crate::State2;

/// Residual tolerance of every Newton solve here.
pub const SOLVER_TOL: f64 = 1e-10;
const BR_MAX_ITER: usize = 100;
const STACKELBERG_MAX_ITER: usize = 200;
const NASH_MAX_ITER: usize = 100;
const MAX_DOUBLINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EquilibriumKind {
    Nash,
    Stackelberg,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumResult {
    pub point: State2,
    pub kind: EquilibriumKind,
    /// Stationarity magnitudes, keyed by condition.
    pub residuals: BTreeMap<String, f64>,
    pub iterations: usize,
    pub method: String,
}

impl EquilibriumResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.values().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Memo for best-response solves keyed on `x1` quantised to 1e-12; also keeps
/// the most recent solution as a warm start. Safe to share between threads.
#[derive(Debug, Default)]
pub struct BestResponseMemo {
    table: Mutex<HashMap<i64, f64>>,
    last: Mutex<Option<f64>>,
}

impl BestResponseMemo {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(x1: f64) -> Option<i64> {
        let k = (x1 * 1e12).round();
        (k.abs() < 9.0e18).then_some(k as i64)
    }

    pub fn len(&self) -> usize {
        self.table.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn best_response(&self, g: &Game, x1: f64) -> Result<f64> {
        let key = Self::key(x1);
        if let Some(k) = key {
            if let Some(v) = self.table.lock().unwrap().get(&k) {
                return Ok(*v);
            }
        }
        let seed = *self.last.lock().unwrap();
        let v = best_response_from(g, x1, seed)?;
        if let Some(k) = key {
            self.table.lock().unwrap().insert(k, v);
        }
        *self.last.lock().unwrap() = Some(v);
        Ok(v)
    }
}

/// Solves `∂x2 J_F(x1, x2) = 0` for the follower action.
pub fn best_response(g: &Game, x1: f64) -> Result<f64> {
    best_response_from(g, x1, None)
}

/// [`best_response`] with an explicit starting guess.
///
/// An analytic best response is used when the game has one and it passes the
/// residual check. Otherwise a bracket of width 1 around the seed is doubled
/// (at most 60 times, clipped to the feasible slice) until the stationarity
/// residual changes sign, then refined by Newton steps safeguarded with
/// bisection.
pub fn best_response_from(g: &Game, x1: f64, seed: Option<f64>) -> Result<f64> {
    let resid = |x2: f64| g.follower_partial(Partial::D2, x1, x2);
    if let Some(h) = &g.best_response {
        let v = h(x1);
        if v.is_finite() && matches!(resid(v), Ok(r) if r.abs() < SOLVER_TOL) {
            return Ok(v);
        }
    }

    let slice = match &g.follower_slice {
        Some(f) => Some(f(x1).ok_or(NesError::NoBracket { x1 })?),
        None => None,
    };
    let inside = |x2: f64| match slice {
        Some((lo, hi)) => x2 > lo && x2 < hi && g.is_feasible(x1, x2),
        None => g.is_feasible(x1, x2),
    };
    let mut seed = seed.filter(|s| s.is_finite()).unwrap_or(g.x2_hint);
    if !inside(seed) {
        seed = match slice {
            Some((lo, hi)) if inside(0.5 * (lo + hi)) => 0.5 * (lo + hi),
            _ => find_feasible(&inside, seed).ok_or(NesError::NoBracket { x1 })?,
        };
    }
    let r_seed = resid(seed)?;
    if r_seed == 0.0 {
        return Ok(seed);
    }

    let (mut lo, mut hi, mut r_lo, mut r_hi) = (seed, seed, r_seed, r_seed);
    let mut found = false;
    let mut width = 1.0;
    for _ in 0..=MAX_DOUBLINGS {
        let (a, a_clipped) = reach(&inside, &resid, seed, seed - 0.5 * width);
        let (b, b_clipped) = reach(&inside, &resid, seed, seed + 0.5 * width);
        if let Some((a, ra)) = a {
            (lo, r_lo) = (a, ra);
        }
        if let Some((b, rb)) = b {
            (hi, r_hi) = (b, rb);
        }
        if r_lo.signum() != r_seed.signum() || r_lo == 0.0 {
            hi = seed;
            r_hi = r_seed;
            found = true;
            break;
        }
        if r_hi.signum() != r_seed.signum() || r_hi == 0.0 {
            lo = seed;
            r_lo = r_seed;
            found = true;
            break;
        }
        if a_clipped && b_clipped {
            break;
        }
        width *= 2.0;
    }
    if !found {
        return Err(NesError::NoBracket { x1 });
    }
    if r_lo == 0.0 {
        return Ok(lo);
    }
    if r_hi == 0.0 {
        return Ok(hi);
    }
    safeguarded_newton(g, x1, lo, hi, r_lo)
}

/// Moves from `from` toward `to`, returning the farthest point (at most `to`)
/// that is feasible and has an evaluable residual, plus whether the target
/// had to be pulled in.
fn reach(
    inside: &impl Fn(f64) -> bool,
    resid: &impl Fn(f64) -> Result<f64>,
    from: f64,
    to: f64,
) -> (Option<(f64, f64)>, bool) {
    if inside(to) {
        if let Ok(r) = resid(to) {
            if r.is_finite() {
                return (Some((to, r)), false);
            }
        }
    }
    // bisect the feasibility edge between `from` (inside) and `to` (outside)
    let (mut a, mut b) = (from, to);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if inside(m) {
            a = m;
        } else {
            b = m;
        }
    }
    // back off toward `from` until the residual evaluates
    let mut x = a;
    for _ in 0..80 {
        if let Ok(r) = resid(x) {
            if r.is_finite() {
                return (Some((x, r)), true);
            }
        }
        x = from + 0.5 * (x - from);
    }
    (None, true)
}

fn find_feasible(inside: &impl Fn(f64) -> bool, around: f64) -> Option<f64> {
    let mut w = 1.0;
    for _ in 0..12 {
        for m in [64usize, 4096] {
            let pts = (0..=m).map(|i| around + w * (2.0 * i as f64 / m as f64 - 1.0));
            if let Some(p) = pts
                .filter(|p| inside(*p))
                .min_by(|a, b| (a - around).abs().total_cmp(&(b - around).abs()))
            {
                return Some(p);
            }
        }
        w *= 2.0;
    }
    None
}

fn safeguarded_newton(g: &Game, x1: f64, mut lo: f64, mut hi: f64, r_lo: f64) -> Result<f64> {
    let resid = |x2: f64| g.follower_partial(Partial::D2, x1, x2);
    let lo_sign = r_lo.signum();
    let mut x = 0.5 * (lo + hi);
    let mut last_r = f64::INFINITY;
    let mut r = resid(x)?;
    for _ in 0..BR_MAX_ITER {
        if r.abs() < SOLVER_TOL {
            return Ok(x);
        }
        if r.signum() == lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        let slope = g.follower_partial(Partial::D22, x1, x).unwrap_or(f64::NAN);
        let newton = x - r / slope;
        let (a, b) = if lo < hi { (lo, hi) } else { (hi, lo) };
        let inside = newton.is_finite() && newton > a && newton < b;
        // accept Newton only while it keeps halving the residual
        let next = if inside && (r.abs() < 0.5 * last_r.abs() || last_r.is_infinite()) {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if next == x || (b - a) <= 4.0 * f64::EPSILON * (1.0 + x.abs()) {
            return if r.abs() < SOLVER_TOL {
                Ok(x)
            } else {
                Err(NesError::NonConvergence {
                    method: "best response",
                    iterations: BR_MAX_ITER,
                    residual: r.abs(),
                })
            };
        }
        last_r = r;
        x = next;
        r = resid(x)?;
    }
    if r.abs() < SOLVER_TOL {
        return Ok(x);
    }
    Err(NesError::NonConvergence {
        method: "best response",
        iterations: BR_MAX_ITER,
        residual: r.abs(),
    })
}

/// `h'(x1) = -∂²x1x2 J_F / ∂²x2x2 J_F` at `(x1, h(x1))`.
pub fn h_prime(g: &Game, x1: f64) -> Result<f64> {
    let x2 = best_response(g, x1)?;
    h_prime_at(g, x1, x2)
}

fn h_prime_at(g: &Game, x1: f64, x2: f64) -> Result<f64> {
    let d22 = g.follower_partial(Partial::D22, x1, x2)?;
    if d22.abs() < 1e-12 {
        return Err(NesError::Singular {
            what: "follower curvature ∂²x2x2 J_F",
            at: vec![x1, x2],
        });
    }
    Ok(-g.follower_partial(Partial::D12, x1, x2)? / d22)
}

/// Leader cost along the follower's best response, `J_L(x1, h(x1))`.
pub fn reduced_cost(g: &Game, x1: f64) -> Result<f64> {
    let x2 = best_response(g, x1)?;
    g.leader_cost(x1, x2)
}

/// `dJ̃_L/dx1 = ∂x1 J_L + ∂x2 J_L · h'` along the best response.
pub fn reduced_cost_gradient(g: &Game, x1: f64) -> Result<f64> {
    let x2 = best_response(g, x1)?;
    reduced_cost_gradient_at(g, x1, x2)
}

fn reduced_cost_gradient_at(g: &Game, x1: f64, x2: f64) -> Result<f64> {
    let hp = h_prime_at(g, x1, x2)?;
    Ok(g.leader_partial(Partial::D1, x1, x2)? + g.leader_partial(Partial::D2, x1, x2)? * hp)
}

fn fd_step_at(x: f64) -> f64 {
    1e-6 * x.abs().max(1.0)
}

/// Minimises the reduced leader cost near `x1_seed`: Newton on its derivative
/// with a golden-section fallback.
pub fn stackelberg_equilibrium(g: &Game, x1_seed: f64) -> Result<EquilibriumResult> {
    let grad = |x: f64| reduced_cost_gradient(g, x);
    let cost = |x: f64| reduced_cost(g, x).unwrap_or(f64::INFINITY);
    let mut x = x1_seed;
    let mut d = grad(x)?;
    let mut iterations = 0;
    let mut used_golden = false;
    while iterations < STACKELBERG_MAX_ITER && d.abs() >= SOLVER_TOL {
        iterations += 1;
        let h = fd_step_at(x);
        let curvature = match (grad(x + h), grad(x - h)) {
            (Ok(a), Ok(b)) => (a - b) / (2.0 * h),
            _ => f64::NAN,
        };
        let mut accepted = false;
        if curvature > 0.0 && curvature.is_finite() {
            let mut step = -d / curvature;
            for _ in 0..30 {
                if let Ok(dn) = grad(x + step) {
                    if dn.abs() < d.abs() {
                        x += step;
                        d = dn;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
        }
        if !accepted {
            used_golden = true;
            let next = golden_descent(&cost, x, -d.signum()).ok_or_else(|| NesError::NonConvergence {
                method: "stackelberg (no descent bracket)",
                iterations,
                residual: d.abs(),
            })?;
            let dn = grad(next)?;
            if next == x {
                break;
            }
            x = next;
            d = dn;
        }
    }
    if d.abs() >= SOLVER_TOL {
        return Err(NesError::NonConvergence {
            method: "stackelberg",
            iterations,
            residual: d.abs(),
        });
    }
    let x2 = best_response(g, x)?;
    let gap = (x2 - best_response(g, x)?).abs();
    let mut residuals = BTreeMap::new();
    residuals.insert("reduced_gradient".to_string(), d.abs());
    residuals.insert("best_response_gap".to_string(), gap);
    residuals.insert(
        "follower_stationarity".to_string(),
        g.follower_partial(Partial::D2, x, x2)?.abs(),
    );
    Ok(EquilibriumResult {
        point: State2::new(x, x2),
        kind: EquilibriumKind::Stackelberg,
        residuals,
        iterations,
        method: if used_golden {
            "newton+golden-section on reduced cost".into()
        } else {
            "newton on reduced-cost gradient".into()
        },
    })
}

/// Brackets a minimum of `f` starting at `x` and heading in `dir`, then
/// narrows it by golden-section search. Non-evaluable points count as +inf.
fn golden_descent(f: &impl Fn(f64) -> f64, x: f64, dir: f64) -> Option<f64> {
    let dir = if dir == 0.0 { 1.0 } else { dir };
    let fx = f(x);
    let mut step = 1e-3 * x.abs().max(1.0);
    let (mut a, mut b) = (x, x);
    let mut fb = fx;
    let mut c = None;
    for _ in 0..MAX_DOUBLINGS {
        let t = b + dir * step;
        let ft = f(t);
        if ft < fb {
            a = b;
            b = t;
            fb = ft;
            step *= 2.0;
        } else {
            c = Some(t);
            break;
        }
    }
    let c = c?;
    let (mut lo, mut hi) = if a < c { (a, c) } else { (c, a) };
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut p = hi - phi * (hi - lo);
    let mut q = lo + phi * (hi - lo);
    let (mut fp, mut fq) = (f(p), f(q));
    for _ in 0..200 {
        if hi - lo < 1e-12 * (1.0 + lo.abs()) {
            break;
        }
        if fp < fq {
            hi = q;
            q = p;
            fq = fp;
            p = hi - phi * (hi - lo);
            fp = f(p);
        } else {
            lo = p;
            p = q;
            fp = fq;
            q = lo + phi * (hi - lo);
            fq = f(q);
        }
    }
    Some(0.5 * (lo + hi))
}

fn nash_residual(g: &Game, s: State2) -> Result<[f64; 2]> {
    Ok([
        g.leader_partial(Partial::D1, s.x1, s.x2)?,
        g.follower_partial(Partial::D2, s.x1, s.x2)?,
    ])
}

/// Damped Newton on the stationarity map `(∂x1 J_L, ∂x2 J_F)`.
pub fn nash_equilibrium(g: &Game, seed: State2) -> Result<EquilibriumResult> {
    let norm = |r: [f64; 2]| r[0].abs().max(r[1].abs());
    let mut s = seed;
    let mut r = nash_residual(g, s)?;
    let mut iterations = 0;
    while norm(r) >= SOLVER_TOL {
        if iterations == NASH_MAX_ITER {
            return Err(NesError::NonConvergence {
                method: "nash",
                iterations,
                residual: norm(r),
            });
        }
        iterations += 1;
        let h1 = fd_step_at(s.x1);
        let h2 = fd_step_at(s.x2);
        let c1 = {
            let p = nash_residual(g, State2::new(s.x1 + h1, s.x2))?;
            let m = nash_residual(g, State2::new(s.x1 - h1, s.x2))?;
            [(p[0] - m[0]) / (2.0 * h1), (p[1] - m[1]) / (2.0 * h1)]
        };
        let c2 = {
            let p = nash_residual(g, State2::new(s.x1, s.x2 + h2))?;
            let m = nash_residual(g, State2::new(s.x1, s.x2 - h2))?;
            [(p[0] - m[0]) / (2.0 * h2), (p[1] - m[1]) / (2.0 * h2)]
        };
        // Jacobian columns c1, c2
        let det = c1[0] * c2[1] - c2[0] * c1[1];
        let scale = (c1[0].abs() + c2[0].abs()) * (c1[1].abs() + c2[1].abs());
        if !det.is_finite() || det.abs() <= 1e-12 * scale.max(1e-300) {
            return Err(NesError::Singular {
                what: "Nash stationarity Jacobian",
                at: vec![s.x1, s.x2],
            });
        }
        let dx1 = -(c2[1] * r[0] - c2[0] * r[1]) / det;
        let dx2 = -(-c1[1] * r[0] + c1[0] * r[1]) / det;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand = State2::new(s.x1 + lambda * dx1, s.x2 + lambda * dx2);
            if g.is_feasible(cand.x1, cand.x2) {
                if let Ok(rc) = nash_residual(g, cand) {
                    if norm(rc) < (1.0 - 1e-4 * lambda) * norm(r) {
                        s = cand;
                        r = rc;
                        accepted = true;
                        break;
                    }
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(NesError::NonConvergence {
                method: "nash (line search failed)",
                iterations,
                residual: norm(r),
            });
        }
    }
    let mut residuals = BTreeMap::new();
    residuals.insert("leader_stationarity".to_string(), r[0].abs());
    residuals.insert("follower_stationarity".to_string(), r[1].abs());
    Ok(EquilibriumResult {
        point: s,
        kind: EquilibriumKind::Nash,
        residuals,
        iterations,
        method: "damped newton on partial gradients".into(),
    })
}

/// Axis-aligned rectangle `[x1.0, x1.1] × [x2.0, x2.1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub x1: (f64, f64),
    pub x2: (f64, f64),
}

impl Rect {
    pub fn new(x1: (f64, f64), x2: (f64, f64)) -> Self {
        Rect { x1, x2 }
    }

    pub fn around(center: State2, half_width: f64) -> Self {
        Rect::new(
            (center.x1 - half_width, center.x1 + half_width),
            (center.x2 - half_width, center.x2 + half_width),
        )
    }
}

fn grid(range: (f64, f64), step: f64) -> Vec<f64> {
    let n = ((range.1 - range.0) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| range.0 + i as f64 * step).collect()
}

/// Brute-force Nash oracle: the grid point of `rect` minimising
/// `|∂x1 J_L| + |∂x2 J_F|`. Infeasible grid points are skipped.
pub fn grid_oracle_nash(g: &Game, rect: Rect, step: f64) -> State2 {
    let xs = grid(rect.x1, step);
    let ys = grid(rect.x2, step);
    let best = xs
        .par_iter()
        .filter_map(|&a| {
            ys.iter()
                .filter(|&&b| g.is_feasible(a, b))
                .filter_map(|&b| {
                    let r = nash_residual(g, State2::new(a, b)).ok()?;
                    let v = r[0].abs() + r[1].abs();
                    v.is_finite().then_some((v, a, b))
                })
                .min_by(|p, q| p.0.total_cmp(&q.0))
        })
        .min_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    best.map_or(State2::new(f64::NAN, f64::NAN), |(_, a, b)| State2::new(a, b))
}

/// Sampled strong-convexity constants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    /// Minimum sampled `∂²x2x2 J_F`.
    pub m2_estimate: f64,
    /// Minimum sampled `d²J̃_L/dx1²`.
    pub m1_estimate: f64,
    pub rect: Rect,
    pub samples: usize,
}

impl ConvexityReport {
    pub fn follower_strongly_convex(&self) -> bool {
        self.m2_estimate > 0.0
    }

    pub fn reduced_cost_strongly_convex(&self) -> bool {
        self.m1_estimate > 0.0
    }
}

/// Samples `∂²x2x2 J_F` on an `n × n` grid of `rect` and the second derivative
/// of the reduced cost at `n` points of its `x1` range.
pub fn convexity_report(g: &Game, rect: Rect, n: usize) -> Result<ConvexityReport> {
    if n < 2 {
        return Err(NesError::InvalidParameter("need at least 2 samples per axis".into()));
    }
    let at = |range: (f64, f64), i: usize| range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64;
    let mut m2 = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (at(rect.x1, i), at(rect.x2, j));
            if !g.is_feasible(a, b) {
                continue;
            }
            m2 = m2.min(g.follower_partial(Partial::D22, a, b)?);
        }
    }
    let mut m1 = f64::INFINITY;
    for i in 0..n {
        let a = at(rect.x1, i);
        let h = 1e-5 * a.abs().max(1.0);
        let d = (reduced_cost_gradient(g, a + h)? - reduced_cost_gradient(g, a - h)?) / (2.0 * h);
        m1 = m1.min(d);
    }
    Ok(ConvexityReport {
        m2_estimate: m2,
        m1_estimate: m1,
        rect,
        samples: n,
    })
}
