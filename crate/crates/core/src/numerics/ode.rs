//! Linear constant-coefficient systems `dx/dt = A x + b`.
//!
//! Steady states come from a direct solve; the fixed-step RK4 integrator is
//! the independent time-domain route used to cross-check them.

use crate::error::{Error, Result};
use crate::numerics::linalg::{norm2_vec, solve_linear, ComplexMatrix};
use crate::scalar::{ci, cr, Real, C};

/// Decay factor required by [`decay_check`].
pub const DECAY_FACTOR: f64 = 1e-6;

/// Largest RK4 step, in units of `1/‖A‖∞`, used by the squaring propagator.
const PROPAGATOR_STEP: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystemModel<T> {
    pub drift: ComplexMatrix<T>,
    pub inhomogeneity: Vec<C<T>>,
}

impl<T: Real> LinearSystemModel<T> {
    pub fn new(drift: ComplexMatrix<T>, inhomogeneity: Vec<C<T>>) -> Result<Self> {
        if drift.dim() != inhomogeneity.len() {
            return Err(Error::DimensionMismatch { expected: drift.dim(), got: inhomogeneity.len() });
        }
        Ok(Self { drift, inhomogeneity })
    }

    pub fn homogeneous(drift: ComplexMatrix<T>) -> Self {
        let n = drift.dim();
        Self { drift, inhomogeneity: vec![cr(T::zero()); n] }
    }

    pub fn dim(&self) -> usize {
        self.drift.dim()
    }

    /// `A x + b`
    pub fn rhs(&self, x: &[C<T>]) -> Vec<C<T>> {
        let mut y = self.drift.matvec(x);
        for (yi, bi) in y.iter_mut().zip(&self.inhomogeneity) {
            *yi += *bi;
        }
        y
    }
}

/// Sampled trajectory of an initial value problem.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<Vec<C<T>>>,
}

impl<T: Real> Trajectory<T> {
    pub fn final_state(&self) -> &[C<T>] {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Solves `A x + b = 0` and verifies that the drift relaxes onto it.
///
/// Returns [`Error::SingularMatrix`] when the steady state is not unique and
/// [`Error::Unstable`] when some perturbation fails to decay within the
/// largest tested horizon.
pub fn steady_state<T: Real>(model: &LinearSystemModel<T>) -> Result<Vec<C<T>>> {
    let neg_b: Vec<_> = model.inhomogeneity.iter().map(|z| -*z).collect();
    let x = solve_linear(&model.drift, &neg_b)?;
    check_stability(&model.drift, &x)?;
    Ok(x)
}

/// Stability gate: a generic probe and the offset of the steady state from the
/// origin (the perturbation followed by a trajectory started at zero) must
/// both decay. Horizons start at `100/‖A‖∞` and grow by four up to `1e9/‖A‖∞`.
pub(crate) fn check_stability<T: Real>(drift: &ComplexMatrix<T>, steady: &[C<T>]) -> Result<()> {
    let n = drift.dim();
    let norm = drift.norm_inf();
    if norm == T::zero() {
        return Err(Error::Unstable { horizon: f64::INFINITY });
    }
    let generic: Vec<_> = (0..n)
        .map(|k| {
            let t = T::lit(1.0 + 0.37 * k as f64);
            C::new(t.cos(), t.sin()) * T::lit(1.0 + 0.1 * k as f64)
        })
        .collect();
    let mut probes = vec![generic];
    if norm2_vec(steady) > T::zero() {
        probes.push(steady.to_vec());
    }
    check_probes_decay(drift, &probes)
}

/// Escalating-horizon decay test for a single perturbation.
pub(crate) fn check_probe_decays<T: Real>(drift: &ComplexMatrix<T>, probe: &[C<T>]) -> Result<()> {
    if norm2_vec(probe) == T::zero() {
        return Ok(());
    }
    check_probes_decay(drift, &[probe.to_vec()])
}

/// Shares one propagator across horizons: each fourfold increase is two more
/// squarings of the previous power.
fn check_probes_decay<T: Real>(drift: &ComplexMatrix<T>, probes: &[Vec<C<T>>]) -> Result<()> {
    let norm = drift.norm_inf();
    if norm == T::zero() {
        return Err(Error::Unstable { horizon: f64::INFINITY });
    }
    let base = T::lit(100.0) / norm;
    let max_horizon = T::lit(1e9) / norm;
    let steps = (base * norm / T::lit(PROPAGATOR_STEP)).to_f64_lossy().max(1.0);
    let squarings = steps.log2().ceil().max(0.0) as u32;
    let mut prop = rk4_propagator(drift, base / T::lit(2f64.powi(squarings as i32)));
    for _ in 0..squarings {
        prop = prop.matmul(&prop);
    }
    let unstable = Error::Unstable { horizon: max_horizon.to_f64_lossy() };
    let mut pending: Vec<&Vec<C<T>>> = probes.iter().collect();
    let mut horizon = base;
    loop {
        if !prop.is_finite() {
            return Err(unstable);
        }
        pending.retain(|probe| {
            let nx = norm2_vec(&prop.matvec(probe));
            !(nx.is_finite() && nx < T::lit(DECAY_FACTOR) * norm2_vec(probe))
        });
        if pending.is_empty() {
            return Ok(());
        }
        horizon *= T::lit(4.0);
        if horizon > max_horizon {
            return Err(unstable);
        }
        prop = prop.matmul(&prop);
        prop = prop.matmul(&prop);
    }
}

/// Default decay horizon, `100 / min(rate)` over the strictly positive rates.
pub fn default_horizon<T: Real>(rates: &[T]) -> T {
    let min = rates.iter().copied().filter(|r| *r > T::zero()).fold(T::infinity(), T::min);
    T::lit(100.0) / min
}

/// Integrates `dx/dt = A x` from `probe` up to `horizon` and reports whether
/// `‖x(horizon)‖ < 1e-6 ‖probe‖`.
///
/// The classical RK4 one-step map of a linear system is the matrix polynomial
/// `P(h) = Σ_{k≤4} (hA)^k / k!`; the state after `2^m` steps is obtained by
/// squaring `P` `m` times, with the step kept below `0.05/‖A‖∞`.
pub fn decay_check<T: Real>(a: &ComplexMatrix<T>, probe: &[C<T>], horizon: T) -> bool {
    let p0 = norm2_vec(probe);
    if !(p0 > T::zero()) || !(horizon > T::zero()) {
        return false;
    }
    let norm = a.norm_inf();
    if norm == T::zero() {
        return false;
    }
    let steps_needed = (horizon * norm / T::lit(PROPAGATOR_STEP)).to_f64_lossy().max(1.0);
    let squarings = steps_needed.log2().ceil().max(0.0) as u32;
    let h = horizon / T::lit(2f64.powi(squarings as i32));
    let mut prop = rk4_propagator(a, h);
    for _ in 0..squarings {
        prop = prop.matmul(&prop);
        if !prop.is_finite() {
            return false;
        }
    }
    let x = prop.matvec(probe);
    let nx = norm2_vec(&x);
    nx.is_finite() && nx < T::lit(DECAY_FACTOR) * p0
}

fn rk4_propagator<T: Real>(a: &ComplexMatrix<T>, h: T) -> ComplexMatrix<T> {
    let n = a.dim();
    let ha = a.scaled(cr(h));
    let mut term = ComplexMatrix::identity(n);
    let mut sum = ComplexMatrix::identity(n);
    for k in 1..=4 {
        term = term.matmul(&ha).scaled(cr(T::one() / T::lit(k as f64)));
        sum = sum.add(&term);
    }
    sum
}

/// Classical fourth-order Runge–Kutta with a fixed step.
///
/// The step is adjusted down so that an integer number of steps lands exactly
/// on `t_end`; every step is recorded.
pub fn integrate_linear_ivp<T: Real>(
    model: &LinearSystemModel<T>,
    x0: &[C<T>],
    t_end: T,
    dt: T,
) -> Result<Trajectory<T>> {
    let mut times = Vec::new();
    let mut states = Vec::new();
    integrate_with(model, x0, t_end, dt, |t, x| {
        times.push(t);
        states.push(x.to_vec());
    })?;
    Ok(Trajectory { times, states })
}

/// As [`integrate_linear_ivp`] but keeps only the final state.
pub fn integrate_linear_ivp_final<T: Real>(
    model: &LinearSystemModel<T>,
    x0: &[C<T>],
    t_end: T,
    dt: T,
) -> Result<Vec<C<T>>> {
    let mut last = x0.to_vec();
    integrate_with(model, x0, t_end, dt, |_, x| last.copy_from_slice(x))?;
    Ok(last)
}

/// Core RK4 loop; `visit` sees `(t, x)` for the initial state and every step.
pub(crate) fn integrate_with<T: Real, F: FnMut(T, &[C<T>])>(
    model: &LinearSystemModel<T>,
    x0: &[C<T>],
    t_end: T,
    dt: T,
    mut visit: F,
) -> Result<()> {
    if x0.len() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), got: x0.len() });
    }
    if !(dt > T::zero()) || !(t_end > T::zero()) || !dt.is_finite() || !t_end.is_finite() {
        return Err(Error::Domain(format!("need dt > 0 and t_end > 0, got dt = {dt}, t_end = {t_end}")));
    }
    let steps = (t_end / dt).ceil().to_usize().unwrap_or(usize::MAX).max(1);
    let h = t_end / T::lit(steps as f64);
    let half = h / T::lit(2.0);
    let sixth = h / T::lit(6.0);
    let n = model.dim();
    let mut x = x0.to_vec();
    let mut tmp = vec![cr(T::zero()); n];
    visit(T::zero(), &x);
    for step in 1..=steps {
        let k1 = model.rhs(&x);
        for i in 0..n {
            tmp[i] = x[i] + k1[i] * half;
        }
        let k2 = model.rhs(&tmp);
        for i in 0..n {
            tmp[i] = x[i] + k2[i] * half;
        }
        let k3 = model.rhs(&tmp);
        for i in 0..n {
            tmp[i] = x[i] + k3[i] * h;
        }
        let k4 = model.rhs(&tmp);
        for i in 0..n {
            x[i] += (k1[i] + (k2[i] + k3[i]) * T::lit(2.0) + k4[i]) * sixth;
        }
        let t = h * T::lit(step as f64);
        if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Diverged { t: t.to_f64_lossy() });
        }
        visit(t, &x);
    }
    Ok(())
}

/// `-(A + iΔω I)^{-1} v`, the one-sided Fourier transform
/// `∫₀^∞ e^{iΔωτ} x(τ) dτ` of the solution of `dx/dτ = A x`, `x(0) = v`.
pub fn resolvent<T: Real>(a: &ComplexMatrix<T>, v: &[C<T>], delta_omega: T) -> Result<Vec<C<T>>> {
    let shifted = a.shifted(ci(delta_omega));
    let y = solve_linear(&shifted, v)?;
    Ok(y.into_iter().map(|z| -z).collect())
}

/// Component `row` of [`resolvent`].
pub fn resolvent_component<T: Real>(a: &ComplexMatrix<T>, v: &[C<T>], delta_omega: T, row: usize) -> Result<C<T>> {
    if row >= a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: row });
    }
    Ok(resolvent(a, v, delta_omega)?[row])
}
