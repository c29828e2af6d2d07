//! Fixed-step RK4 integration, trajectory storage and trajectory metrics.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{NesError, Result};
use crate::{NesParams, State2};

/// A time-dependent vector field `dx/dt = f(t, x)` on `R^dim`.
pub trait VectorField {
    fn dim(&self) -> usize;

    /// Writes `f(t, x)` into `dx`.
    fn eval(&self, t: f64, x: &[f64], dx: &mut [f64]) -> Result<()>;
}

/// Adapts a closure into a [`VectorField`].
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F> FnField<F>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnField { dim, f }
    }
}

impl<F> VectorField for FnField<F>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64, x: &[f64], dx: &mut [f64]) -> Result<()> {
        (self.f)(t, x, dx)
    }
}

/// Uniformly sampled trajectory. Sample `i` sits at `t0 + (i * stride) * step`,
/// so a trajectory recorded every `stride` integration steps reports exactly
/// the times the integrator used.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    t0: f64,
    step: f64,
    stride: usize,
    labels: Vec<String>,
    data: Vec<f64>,
}

impl Trajectory {
    pub fn new(t0: f64, dt: f64, labels: Vec<String>) -> Self {
        Trajectory::strided(t0, dt, 1, labels)
    }

    /// Trajectory sampled every `stride` steps of size `step`.
    pub fn strided(t0: f64, step: f64, stride: usize, labels: Vec<String>) -> Self {
        assert!(step > 0.0, "trajectory dt must be positive");
        assert!(stride > 0, "record stride must be positive");
        assert!(!labels.is_empty(), "trajectory needs at least one component");
        Trajectory {
            t0,
            step,
            stride,
            labels,
            data: Vec::new(),
        }
    }

    /// Empty trajectory on the same time grid with new labels.
    pub fn empty_like(&self, labels: Vec<String>) -> Self {
        Trajectory::strided(self.t0, self.step, self.stride, labels)
    }

    /// Builds a trajectory from rows; panics on ragged or non-finite input.
    pub fn from_rows(t0: f64, dt: f64, labels: &[&str], rows: &[Vec<f64>]) -> Self {
        let mut tr = Trajectory::new(t0, dt, labels.iter().map(|s| s.to_string()).collect());
        for r in rows {
            tr.push(r);
        }
        tr
    }

    pub fn push(&mut self, state: &[f64]) {
        assert_eq!(state.len(), self.dim(), "state dimension mismatch");
        assert!(
            state.iter().all(|v| v.is_finite()),
            "trajectory states must be finite"
        );
        self.data.extend_from_slice(state);
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Spacing between recorded samples.
    pub fn dt(&self) -> f64 {
        self.step * self.stride as f64
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + (i * self.stride) as f64 * self.step
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len().saturating_sub(1))
    }

    pub fn state(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.data[i * d..(i + 1) * d]
    }

    pub fn last(&self) -> Option<&[f64]> {
        (!self.is_empty()).then(|| self.state(self.len() - 1))
    }

    pub fn states(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim())
    }

    /// Values of component `c` across all samples.
    pub fn component(&self, c: usize) -> Vec<f64> {
        self.states().map(|s| s[c]).collect()
    }

    /// Linear interpolation of component `c` at time `t` (clamped to the span).
    pub fn interpolate(&self, t: f64, c: usize) -> f64 {
        let n = self.len();
        assert!(n > 0, "interpolating an empty trajectory");
        let s = ((t - self.t0) / self.dt()).clamp(0.0, (n - 1) as f64);
        let i = (s.floor() as usize).min(n - 1);
        if i + 1 >= n {
            return self.state(n - 1)[c];
        }
        let w = s - i as f64;
        let a = self.state(i)[c];
        let b = self.state(i + 1)[c];
        a + w * (b - a)
    }

    /// New trajectory with `f` applied to each sample.
    pub fn map(&self, labels: &[&str], f: impl Fn(f64, &[f64]) -> Vec<f64>) -> Trajectory {
        let mut out = self.empty_like(labels.iter().map(|s| s.to_string()).collect());
        for i in 0..self.len() {
            out.push(&f(self.time(i), self.state(i)));
        }
        out
    }

    /// Keeps every `stride`-th sample.
    pub fn decimate(&self, stride: usize) -> Trajectory {
        assert!(stride > 0);
        let mut out = Trajectory::strided(self.t0, self.step, self.stride * stride, self.labels.clone());
        for i in (0..self.len()).step_by(stride) {
            out.push(self.state(i));
        }
        out
    }

    /// CSV with header `t,<labels...>`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.len() * 24 * (self.dim() + 1) + 32);
        s.push('t');
        for l in &self.labels {
            s.push(',');
            s.push_str(l);
        }
        s.push('\n');
        for i in 0..self.len() {
            let _ = write!(s, "{}", fmt_g17(self.time(i)));
            for v in self.state(i) {
                let _ = write!(s, ",{}", fmt_g17(*v));
            }
            s.push('\n');
        }
        s
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(self.to_csv().as_bytes())?;
        f.flush()?;
        Ok(())
    }
}

/// Formats with 17 significant digits in scientific notation.
pub fn fmt_g17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Where a run stopped on a domain violation.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub t: f64,
    pub state: Vec<f64>,
    pub error: NesError,
}

/// Result of [`rk4_integrate`]: the recorded samples, plus the violation that
/// cut the run short if there was one.
#[derive(Debug, Clone)]
pub struct Integration {
    pub trajectory: Trajectory,
    pub violation: Option<Violation>,
}

impl Integration {
    /// The trajectory, or the violation as an error.
    pub fn complete(self) -> Result<Trajectory> {
        match self.violation {
            None => Ok(self.trajectory),
            Some(v) => Err(v.error),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationSpec {
    pub t0: f64,
    pub t_end: f64,
    pub dt: f64,
    pub record_stride: usize,
    pub x0: Vec<f64>,
    pub labels: Vec<String>,
}

impl IntegrationSpec {
    pub fn new(t0: f64, t_end: f64, dt: f64, x0: Vec<f64>) -> Self {
        let labels = match x0.len() {
            1 => vec!["x1".to_string()],
            2 => vec!["x1".to_string(), "x2".to_string()],
            n => (0..n).map(|i| format!("x{}", i + 1)).collect(),
        };
        IntegrationSpec {
            t0,
            t_end,
            dt,
            record_stride: 1,
            x0,
            labels,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn with_labels(mut self, labels: &[&str]) -> Self {
        self.labels = labels.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_end.partial_cmp(&self.t0) != Some(std::cmp::Ordering::Greater) {
            return Err(NesError::EmptyTrajectory(format!(
                "t_end ({}) must exceed t0 ({})",
                self.t_end, self.t0
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(NesError::InvalidParameter(format!("dt = {} must be positive", self.dt)));
        }
        if self.dt > self.t_end - self.t0 {
            return Err(NesError::InvalidParameter(format!(
                "dt = {} exceeds the horizon {}",
                self.dt,
                self.t_end - self.t0
            )));
        }
        if self.record_stride == 0 {
            return Err(NesError::InvalidParameter("record_stride must be positive".into()));
        }
        if self.x0.is_empty() || self.labels.len() != self.x0.len() {
            return Err(NesError::InvalidParameter(
                "initial state and labels must be non-empty and of equal length".into(),
            ));
        }
        if let Some(v) = self.x0.iter().find(|v| !v.is_finite()) {
            return Err(NesError::InvalidParameter(format!("non-finite initial state {v}")));
        }
        Ok(())
    }

    /// Number of RK4 steps: `(t_end - t0) / dt` rounded to the nearest integer.
    pub fn steps(&self) -> usize {
        ((self.t_end - self.t0) / self.dt).round().max(1.0) as usize
    }
}

/// Step size that puts `samples_per_period` steps in one period of the faster
/// dither.
pub fn auto_step(p: &NesParams, samples_per_period: usize) -> f64 {
    assert!(samples_per_period >= 8, "need at least 8 samples per dither period");
    2.0 * std::f64::consts::PI / (p.omega1.max(p.omega2) * samples_per_period as f64)
}

/// Classical fixed-step fourth-order Runge-Kutta.
///
/// Step `i` starts at `t0 + i * dt`. A domain violation inside the vector field
/// ends the run early and is reported in [`Integration::violation`]; any other
/// evaluation error is returned. A non-finite state aborts with
/// [`NesError::NonFinite`].
pub fn rk4_integrate<F: VectorField + ?Sized>(rhs: &F, spec: &IntegrationSpec) -> Result<Integration> {
    spec.validate()?;
    let n = rhs.dim();
    if spec.x0.len() != n {
        return Err(NesError::InvalidParameter(format!(
            "initial state has {} components, field has {n}",
            spec.x0.len()
        )));
    }
    let steps = spec.steps();
    let dt = spec.dt;
    let stride = spec.record_stride;
    let mut traj = Trajectory::strided(spec.t0, dt, stride, spec.labels.clone());
    let mut x = spec.x0.clone();
    traj.push(&x);

    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    for i in 0..steps {
        let t = spec.t0 + i as f64 * dt;
        let step = (|| -> Result<()> {
            rhs.eval(t, &x, &mut k1)?;
            for j in 0..n {
                tmp[j] = x[j] + 0.5 * dt * k1[j];
            }
            rhs.eval(t + 0.5 * dt, &tmp, &mut k2)?;
            for j in 0..n {
                tmp[j] = x[j] + 0.5 * dt * k2[j];
            }
            rhs.eval(t + 0.5 * dt, &tmp, &mut k3)?;
            for j in 0..n {
                tmp[j] = x[j] + dt * k3[j];
            }
            rhs.eval(t + dt, &tmp, &mut k4)
        })();
        if let Err(e) = step {
            if e.is_domain() {
                return Ok(Integration {
                    trajectory: traj,
                    violation: Some(Violation {
                        t,
                        state: x,
                        error: e,
                    }),
                });
            }
            return Err(e);
        }
        for j in 0..n {
            x[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(NesError::NonFinite {
                t: spec.t0 + (i + 1) as f64 * dt,
                state: x,
            });
        }
        if (i + 1) % stride == 0 {
            traj.push(&x);
        }
    }
    Ok(Integration {
        trajectory: traj,
        violation: None,
    })
}

/// Supremum over `window` of the Euclidean norm of the difference between the
/// selected components of `a` and `b`. Both are linearly interpolated at every
/// grid time of either trajectory inside the window.
pub fn sup_distance(a: &Trajectory, b: &Trajectory, window: (f64, f64), components: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(NesError::EmptyTrajectory("sup_distance of an empty trajectory".into()));
    }
    let lo = window.0.max(a.t0()).max(b.t0());
    let hi = window.1.min(a.t_end()).min(b.t_end());
    let eps = 1e-9 * a.dt().min(b.dt());
    if (hi + eps).partial_cmp(&lo).is_none_or(|o| o.is_lt()) || window.0 > window.1 {
        return Err(NesError::EmptyTrajectory(format!(
            "window [{}, {}] does not overlap both trajectories",
            window.0, window.1
        )));
    }
    let hi = hi.max(lo);
    for &c in components {
        if c >= a.dim() || c >= b.dim() {
            return Err(NesError::InvalidParameter(format!("component {c} out of range")));
        }
    }
    let dist = |t: f64| -> f64 {
        components
            .iter()
            .map(|&c| {
                let d = a.interpolate(t, c) - b.interpolate(t, c);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    };
    let mut sup = dist(lo).max(dist(hi));
    for tr in [a, b] {
        let first = ((lo - tr.t0()) / tr.dt()).ceil().max(0.0) as usize;
        let mut i = first;
        while i < tr.len() {
            let t = tr.time(i);
            if t > hi {
                break;
            }
            sup = sup.max(dist(t));
            i += 1;
        }
    }
    Ok(sup)
}

/// Componentwise mean of the last `fraction` of the samples.
pub fn final_window_mean(a: &Trajectory, fraction: f64) -> Result<Vec<f64>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(NesError::InvalidParameter(format!(
            "window fraction {fraction} must lie in (0, 1]"
        )));
    }
    if a.is_empty() {
        return Err(NesError::EmptyTrajectory("final_window_mean of an empty trajectory".into()));
    }
    let n = a.len();
    let k = ((fraction * (n - 1) as f64).round() as usize).clamp(1, n);
    let mut mean = vec![0.0; a.dim()];
    for i in n - k..n {
        for (m, v) in mean.iter_mut().zip(a.state(i)) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= k as f64;
    }
    Ok(mean)
}

/// [`final_window_mean`] of a two-component trajectory.
pub fn final_window_mean2(a: &Trajectory, fraction: f64) -> Result<State2> {
    let m = final_window_mean(a, fraction)?;
    if m.len() < 2 {
        return Err(NesError::InvalidParameter("expected a two-component trajectory".into()));
    }
    Ok(State2::new(m[0], m[1]))
}
