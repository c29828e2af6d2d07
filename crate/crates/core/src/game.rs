//! Two-player cost landscapes.

use std::fmt;
use std::sync::Arc;

use crate::boundary::{BoundaryPolicy, Guard};
use crate::error::{NesError, Result};
use crate::State2;

/// A scalar function of `(x1, x2)` evaluated under a boundary guard.
pub type Eval2 = Arc<dyn Fn(f64, f64, &Guard) -> Result<f64> + Send + Sync>;

/// Default central-difference step for first partials.
pub const FD_STEP: f64 = 1e-5;
/// Default step for second partials built from nested central differences.
pub const FD_STEP_SECOND: f64 = 1e-4;

/// A C² cost field with optional analytic partials; missing partials fall
/// back to central differences.
#[derive(Clone)]
pub struct ScalarField2 {
    value: Eval2,
    d1: Option<Eval2>,
    d2: Option<Eval2>,
    d22: Option<Eval2>,
    d12: Option<Eval2>,
    fd_step: f64,
}

impl fmt::Debug for ScalarField2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField2")
            .field("analytic_d1", &self.d1.is_some())
            .field("analytic_d2", &self.d2.is_some())
            .field("analytic_d22", &self.d22.is_some())
            .field("analytic_d12", &self.d12.is_some())
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

/// Which partial derivative to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Partial {
    D1,
    D2,
    D22,
    D12,
}

impl ScalarField2 {
    pub fn new<F>(value: F) -> Self
    where
        F: Fn(f64, f64, &Guard) -> Result<f64> + Send + Sync + 'static,
    {
        ScalarField2 {
            value: Arc::new(value),
            d1: None,
            d2: None,
            d22: None,
            d12: None,
            fd_step: FD_STEP,
        }
    }

    /// Field that never leaves its domain.
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(move |a, b, _| Ok(f(a, b)))
    }

    pub fn with_partial<F>(mut self, which: Partial, f: F) -> Self
    where
        F: Fn(f64, f64, &Guard) -> Result<f64> + Send + Sync + 'static,
    {
        let f: Eval2 = Arc::new(f);
        match which {
            Partial::D1 => self.d1 = Some(f),
            Partial::D2 => self.d2 = Some(f),
            Partial::D22 => self.d22 = Some(f),
            Partial::D12 => self.d12 = Some(f),
        }
        self
    }

    /// Like [`ScalarField2::with_partial`] for partials that never fail.
    pub fn with_pure_partial<F>(self, which: Partial, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        self.with_partial(which, move |a, b, _| Ok(f(a, b)))
    }

    pub fn with_fd_step(mut self, step: f64) -> Self {
        assert!(step > 0.0, "fd_step must be positive");
        self.fd_step = step;
        self
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn has_analytic(&self, which: Partial) -> bool {
        match which {
            Partial::D1 => self.d1.is_some(),
            Partial::D2 => self.d2.is_some(),
            Partial::D22 => self.d22.is_some(),
            Partial::D12 => self.d12.is_some(),
        }
    }

    pub fn eval(&self, x1: f64, x2: f64, guard: &Guard) -> Result<f64> {
        (self.value)(x1, x2, guard)
    }

    fn analytic(&self, which: Partial) -> Option<&Eval2> {
        match which {
            Partial::D1 => self.d1.as_ref(),
            Partial::D2 => self.d2.as_ref(),
            Partial::D22 => self.d22.as_ref(),
            Partial::D12 => self.d12.as_ref(),
        }
    }

    /// Analytic partial if available, otherwise the finite-difference one.
    pub fn partial(&self, which: Partial, x1: f64, x2: f64, guard: &Guard) -> Result<f64> {
        match self.analytic(which) {
            Some(f) => f(x1, x2, guard),
            None => self.partial_fd(which, x1, x2, guard, self.fd_step, FD_STEP_SECOND),
        }
    }

    /// Finite-difference partial, ignoring analytic forms. Second partials
    /// difference the (analytic or FD) first partial with step `h2`.
    pub fn partial_fd(
        &self,
        which: Partial,
        x1: f64,
        x2: f64,
        guard: &Guard,
        h: f64,
        h2: f64,
    ) -> Result<f64> {
        let f = |a: f64, b: f64| self.eval(a, b, guard);
        match which {
            Partial::D1 => {
                let h = scaled_step(h, x1);
                Ok((f(x1 + h, x2)? - f(x1 - h, x2)?) / (2.0 * h))
            }
            Partial::D2 => {
                let h = scaled_step(h, x2);
                Ok((f(x1, x2 + h)? - f(x1, x2 - h)?) / (2.0 * h))
            }
            Partial::D22 => {
                let h2 = scaled_step(h2, x2);
                let g = |b: f64| self.partial(Partial::D2, x1, b, guard);
                Ok((g(x2 + h2)? - g(x2 - h2)?) / (2.0 * h2))
            }
            Partial::D12 => {
                let h2 = scaled_step(h2, x1);
                let g = |a: f64| self.partial(Partial::D2, a, x2, guard);
                Ok((g(x1 + h2)? - g(x1 - h2)?) / (2.0 * h2))
            }
        }
    }
}

/// Difference step at coordinate `x`: `h` for `|x| <= 1`, relative beyond,
/// so that the stencil never collapses to a single float.
pub fn scaled_step(h: f64, x: f64) -> f64 {
    h * x.abs().max(1.0)
}

/// Feasible-set membership test with a human-readable description.
#[derive(Clone)]
pub struct Feasible {
    pred: Arc<dyn Fn(f64, f64) -> bool + Send + Sync>,
    description: String,
}

impl Feasible {
    pub fn new<F>(description: impl Into<String>, pred: F) -> Self
    where
        F: Fn(f64, f64) -> bool + Send + Sync + 'static,
    {
        Feasible {
            pred: Arc::new(pred),
            description: description.into(),
        }
    }

    pub fn everywhere() -> Self {
        Feasible::new("R^2", |_, _| true)
    }

    pub fn contains(&self, x1: f64, x2: f64) -> bool {
        (self.pred)(x1, x2)
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}

impl fmt::Debug for Feasible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Feasible({})", self.description)
    }
}

/// Map `x1 -> x2`.
pub type Map1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Map `x1 -> (lo, hi)`: the open interval of feasible follower actions.
pub type SliceFn = Arc<dyn Fn(f64) -> Option<(f64, f64)> + Send + Sync>;

/// Equilibria a game declares for reference and for seeding solvers.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct References {
    pub nash: Option<State2>,
    pub stackelberg: Option<State2>,
}

/// Leader/follower game.
#[derive(Clone)]
pub struct Game {
    pub name: String,
    pub leader: ScalarField2,
    pub follower: ScalarField2,
    pub best_response: Option<Map1>,
    pub feasible: Feasible,
    /// Known feasible interval of `x2` for a given `x1`, if the game can say.
    pub follower_slice: Option<SliceFn>,
    /// Typical follower action used to seed best-response searches.
    pub x2_hint: f64,
    pub references: References,
    guard: Guard,
}

impl fmt::Debug for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Game")
            .field("name", &self.name)
            .field("feasible", &self.feasible)
            .field("analytic_best_response", &self.best_response.is_some())
            .field("references", &self.references)
            .field("policy", &self.guard.policy())
            .finish()
    }
}

impl Game {
    pub fn new(name: impl Into<String>, leader: ScalarField2, follower: ScalarField2) -> Self {
        Game {
            name: name.into(),
            leader,
            follower,
            best_response: None,
            feasible: Feasible::everywhere(),
            follower_slice: None,
            x2_hint: 0.0,
            references: References::default(),
            guard: Guard::default(),
        }
    }

    pub fn with_best_response<F>(mut self, h: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.best_response = Some(Arc::new(h));
        self
    }

    pub fn with_feasible(mut self, feasible: Feasible) -> Self {
        self.feasible = feasible;
        self
    }

    pub fn with_follower_slice<F>(mut self, slice: F) -> Self
    where
        F: Fn(f64) -> Option<(f64, f64)> + Send + Sync + 'static,
    {
        self.follower_slice = Some(Arc::new(slice));
        self
    }

    pub fn with_x2_hint(mut self, hint: f64) -> Self {
        self.x2_hint = hint;
        self
    }

    pub fn with_references(mut self, references: References) -> Self {
        self.references = references;
        self
    }

    /// Returns a copy evaluated under `policy`, with a fresh clamp counter.
    pub fn with_boundary(mut self, policy: BoundaryPolicy) -> Self {
        self.guard = Guard::new(policy);
        self
    }

    pub fn guard(&self) -> &Guard {
        &self.guard
    }

    pub fn policy(&self) -> BoundaryPolicy {
        self.guard.policy()
    }

    pub fn clamp_count(&self) -> u64 {
        self.guard.clamp_count()
    }

    pub fn is_feasible(&self, x1: f64, x2: f64) -> bool {
        self.feasible.contains(x1, x2)
    }

    fn check(&self, x1: f64, x2: f64) -> Result<()> {
        if self.policy() == BoundaryPolicy::Strict && !self.is_feasible(x1, x2) {
            return Err(NesError::domain(
                x1,
                x2,
                format!("outside feasible set {}", self.feasible.description()),
            ));
        }
        Ok(())
    }

    /// J_L(x1, x2).
    pub fn leader_cost(&self, x1: f64, x2: f64) -> Result<f64> {
        self.check(x1, x2)?;
        self.leader.eval(x1, x2, &self.guard)
    }

    /// J_F(x1, x2).
    pub fn follower_cost(&self, x1: f64, x2: f64) -> Result<f64> {
        self.check(x1, x2)?;
        self.follower.eval(x1, x2, &self.guard)
    }

    pub fn leader_partial(&self, which: Partial, x1: f64, x2: f64) -> Result<f64> {
        self.partial_of(&self.leader, which, x1, x2)
    }

    pub fn follower_partial(&self, which: Partial, x1: f64, x2: f64) -> Result<f64> {
        self.partial_of(&self.follower, which, x1, x2)
    }

    fn partial_of(&self, field: &ScalarField2, which: Partial, x1: f64, x2: f64) -> Result<f64> {
        self.check(x1, x2)?;
        if field.has_analytic(which) {
            return field.partial(which, x1, x2, &self.guard);
        }
        let h = match which {
            Partial::D1 | Partial::D2 => field.fd_step(),
            Partial::D22 | Partial::D12 => FD_STEP_SECOND,
        };
        let stencil: [(f64, f64); 2] = match which {
            Partial::D1 | Partial::D12 => {
                let h = scaled_step(h, x1);
                [(x1 - h, x2), (x1 + h, x2)]
            }
            Partial::D2 | Partial::D22 => {
                let h = scaled_step(h, x2);
                [(x1, x2 - h), (x1, x2 + h)]
            }
        };
        for (a, b) in stencil {
            self.check(a, b)?;
        }
        field.partial(which, x1, x2, &self.guard)
    }
}

/// Central-difference gradient `(∂x1, ∂x2)` of `field` with its `fd_step`.
///
/// Under the game's strict policy a stencil point outside the feasible set is
/// a domain violation.
pub fn grad_fd(game: &Game, field: &ScalarField2, x1: f64, x2: f64) -> Result<(f64, f64)> {
    let h = field.fd_step();
    let (h1, h2) = (scaled_step(h, x1), scaled_step(h, x2));
    for (a, b) in [(x1 - h1, x2), (x1 + h1, x2), (x1, x2 - h2), (x1, x2 + h2)] {
        game.check(a, b)?;
    }
    let g = game.guard();
    Ok((
        field.partial_fd(Partial::D1, x1, x2, g, h, FD_STEP_SECOND)?,
        field.partial_fd(Partial::D2, x1, x2, g, h, FD_STEP_SECOND)?,
    ))
}
