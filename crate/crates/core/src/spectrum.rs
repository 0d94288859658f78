//! Coherent and incoherent parts of the transmitted light.
//!
//! The transmitted power splits into an elastic delta peak at the probe
//! frequency of weight `2 Γ_out |S1|²` and an incoherent continuum. The
//! continuum comes from the two-time correlators `<σ†(t) X(t+τ)>`, which by
//! the regression theorem obey the mean-field equations with the drive
//! multiplied by `S1*`. Subtracting their `τ → ∞` limits leaves the
//! homogeneous system `dδS/dτ = A δS` and
//!
//! `P_inc(ω) = (2 Γ_out / π) Re[(−(A + iΔ)⁻¹ δS(0))₀]`, `Δ = ω − ω_p`.
//!
//! Densities are reported against `Δ`, the offset from the probe frequency.

use crate::error::{invalid, Error, Result};
use crate::lambda3::{build_r_system, slot, steady_state_3la, RSystem, SteadyState3LA};
use crate::numerics::ode::{check_probe_decays, check_stability};
use crate::numerics::{find_root, integrate_real_line, resolvent_component, solve_linear, ComplexMatrix};
use crate::params::{check_intensity, derive_rates_unchecked, BeamDrive, DriveParams3, ModelParams, Side};
use crate::scalar::{cr, Real, C};
use crate::tla::{self, drift_2la, steady_state_closed};

/// Half-width of the default spectral window in units of `Γ_t`.
pub const DEFAULT_WINDOW: f64 = 20.0;
pub const DEFAULT_GRID_POINTS: usize = 2001;

const QUAD_PANELS: usize = 64;
const QUAD_REL_TOL: f64 = 1e-10;

/// `(2 Γ_out / π) Re[resolvent]` below which a density is treated as zero
/// noise when checking signs.
pub const POSITIVITY_SLACK: f64 = 1e-12;

/// Regression system for the correlators `<σ†(t) X(t+τ)>`, `X` running over the
/// mean-field vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorSystem<T> {
    pub drift: ComplexMatrix<T>,
    /// Mean-field drive scaled by `S1*`.
    pub inhomogeneity: Vec<C<T>>,
    /// `δC(0) = C(0) − C(∞)`.
    pub initial: Vec<C<T>>,
    /// `C(∞) = S1* · x(∞)`.
    pub asymptotic: Vec<C<T>>,
    /// Equal-time values `C(0)` before the shift.
    pub equal_time: Vec<C<T>>,
}

impl<T: Real> CorrelatorSystem<T> {
    fn from_parts(drift: ComplexMatrix<T>, drive: &[C<T>], steady: &[C<T>], equal_time: Vec<C<T>>) -> Self {
        let s1c = steady[0].conj();
        let inhomogeneity = drive.iter().map(|z| *z * s1c).collect();
        let asymptotic: Vec<_> = steady.iter().map(|z| *z * s1c).collect();
        let initial = equal_time.iter().zip(&asymptotic).map(|(a, b)| *a - *b).collect();
        Self { drift, inhomogeneity, initial, asymptotic, equal_time }
    }

    /// `‖(−A⁻¹ b) − C(∞)‖∞`.
    pub fn regression_residual(&self) -> Result<T> {
        let neg: Vec<_> = self.inhomogeneity.iter().map(|z| -*z).collect();
        let x = solve_linear(&self.drift, &neg)?;
        Ok(x.iter().zip(&self.asymptotic).fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm())))
    }

    /// Verifies that the shifted correlators relax.
    pub fn check_decay(&self) -> Result<()> {
        check_probe_decays(&self.drift, &self.initial)
    }

    /// Incoherent spectral density at offset `delta_omega` from the probe.
    pub fn incoherent_density(&self, delta_omega: T, gamma_out: T) -> Result<T> {
        let z = resolvent_component(&self.drift, &self.initial, delta_omega, 0)?;
        Ok(T::lit(2.0) * gamma_out / T::PI() * z.re)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumDecomposition<T> {
    /// Weight of the elastic peak, `2 Γ_out |S1|²`.
    pub coherent_weight: T,
    /// `(Δ, P_inc)` on the requested grid.
    pub incoherent_density: Vec<(T, T)>,
    pub t_coh: T,
    /// `2 Γ_out (S2 − |S1|²) / I` from the equal-time values.
    pub t_inc: T,
    /// `∫ P_inc dω` by quadrature over the whole real line.
    pub incoherent_power: T,
    /// `2 Γ_out S2`, the total transmitted power.
    pub total_power: T,
    pub intensity: T,
}

impl<T: Real> SpectrumDecomposition<T> {
    /// `∫ P_inc dω / I`.
    pub fn t_inc_quadrature(&self) -> T {
        self.incoherent_power / self.intensity
    }

    pub fn min_density(&self) -> T {
        self.incoherent_density.iter().fold(T::infinity(), |m, (_, p)| m.min(*p))
    }
}

/// `2001` offsets uniformly covering `[−20Γ_t, 20Γ_t]`.
pub fn default_omega_grid<T: Real>(gamma_t: T) -> Vec<T> {
    let n = DEFAULT_GRID_POINTS;
    let half = T::lit(DEFAULT_WINDOW) * gamma_t;
    (0..n)
        .map(|k| -half + (half + half) * T::lit(k as f64) / T::lit((n - 1) as f64))
        .collect()
}

pub fn build_correlator_system_2la<T: Real>(p: &ModelParams<T>, beam: &BeamDrive<T>) -> Result<CorrelatorSystem<T>> {
    p.validate()?;
    check_intensity(beam.intensity)?;
    let o = p.seen_from(beam.side);
    let r = derive_rates_unchecked(&o, None);
    let rabi = C::from_polar(beam.rabi, beam.phase);
    let model = drift_2la(&o, rabi);
    let ss = steady_state_closed(&o, &r, rabi);
    let steady = [ss.s1, ss.s1.conj(), cr(ss.s2)];
    let zero = cr(T::zero());
    Ok(CorrelatorSystem::from_parts(model.drift, &model.inhomogeneity, &steady, vec![cr(ss.s2), zero, zero]))
}

/// Correlator system of the driven three-level atom around a given steady
/// state. Slot `j` holds `<σ†(t) X_j(t+τ)>`; at equal times only `σ†σ` (slot of
/// `S1`) and `σ†ν† = |e⟩⟨s| = μ` (slot of `N`) survive.
pub fn build_correlator_system_3la<T: Real>(rsys: &RSystem<T>, ss: &SteadyState3LA<T>) -> CorrelatorSystem<T> {
    let mut equal_time = vec![cr(T::zero()); 8];
    equal_time[slot::S1] = cr(ss.s2());
    equal_time[slot::N] = ss.m1();
    CorrelatorSystem::from_parts(rsys.r_matrix.clone(), &rsys.omega_m, &ss.m, equal_time)
}

/// Elastic transmission `2 Γ_out |S1|² / I`; the `I → 0` limit is
/// `4 Γ_L Γ_R Γ_d / Ξ`.
pub fn coherent_transmission<T: Real>(p: &ModelParams<T>, intensity: T, side: Side) -> Result<T> {
    p.validate()?;
    check_intensity(intensity)?;
    let o = p.seen_from(side);
    let r = derive_rates_unchecked(&o, None);
    if intensity == T::zero() {
        return Ok(T::lit(4.0) * o.gamma_l * o.gamma_r * r.gamma_d / r.xi);
    }
    let beam = BeamDrive::left(&o, intensity)?;
    let ss = steady_state_closed(&o, &r, cr(beam.rabi));
    Ok(T::lit(2.0) * o.gamma_r * ss.s1.norm_sqr() / intensity)
}

/// `4 Γ_in Γ_out Γ_d Ξ / Λ²`.
pub fn coherent_transmission_closed<T: Real>(p: &ModelParams<T>, intensity: T, side: Side) -> Result<T> {
    let (g, lambda, r) = closed_parts(p, intensity, side)?;
    Ok(T::lit(4.0) * g * r.gamma_d * r.xi / (lambda * lambda))
}

/// `4 Γ_in Γ_out (Γ_λ Ξ + 2 Γ_t² Ω²) / Λ²`, finite at `I = 0`.
pub fn incoherent_transmission_closed<T: Real>(p: &ModelParams<T>, intensity: T, side: Side) -> Result<T> {
    let (g, lambda, r) = closed_parts(p, intensity, side)?;
    let om2 = T::lit(2.0) * p.gamma_side(side) * intensity;
    let two = T::lit(2.0);
    Ok(T::lit(4.0) * g * (p.gamma_dephase * r.xi + two * r.gamma_t * r.gamma_t * om2) / (lambda * lambda))
}

fn closed_parts<T: Real>(p: &ModelParams<T>, intensity: T, side: Side) -> Result<(T, T, crate::params::DerivedRates<T>)> {
    p.validate()?;
    check_intensity(intensity)?;
    let r = derive_rates_unchecked(p, None);
    let om2 = T::lit(2.0) * p.gamma_side(side) * intensity;
    let lambda = r.xi + T::lit(2.0) * r.gamma_t * om2;
    Ok((p.gamma_l * p.gamma_r, lambda, r))
}

/// Incoherent spectrum of the two-level atom under a single beam.
pub fn incoherent_spectrum<T: Real>(
    p: &ModelParams<T>,
    beam: &BeamDrive<T>,
    omega_grid: &[T],
) -> Result<SpectrumDecomposition<T>> {
    check_grid(omega_grid)?;
    let sys = build_correlator_system_2la(p, beam)?;
    let o = p.seen_from(beam.side);
    let r = derive_rates_unchecked(&o, None);
    let ss = steady_state_closed(&o, &r, C::from_polar(beam.rabi, beam.phase));
    if beam.intensity == T::zero() {
        return Ok(SpectrumDecomposition {
            coherent_weight: T::zero(),
            incoherent_density: omega_grid.iter().map(|&w| (w, T::zero())).collect(),
            t_coh: coherent_transmission(p, T::zero(), beam.side)?,
            t_inc: incoherent_transmission_closed(p, T::zero(), beam.side)?,
            incoherent_power: T::zero(),
            total_power: T::zero(),
            intensity: T::zero(),
        });
    }
    check_stability(&sys.drift, &sys.initial)?;
    decompose(&sys, o.gamma_r, ss.s1, ss.s2, beam.intensity, r.gamma_t, omega_grid)
}

/// Incoherent spectrum of the driven three-level atom.
///
/// Requires a positive probe intensity.
pub fn spectrum_3la<T: Real>(
    p: &ModelParams<T>,
    d3: &DriveParams3<T>,
    beam: &BeamDrive<T>,
    omega_grid: &[T],
) -> Result<SpectrumDecomposition<T>> {
    check_grid(omega_grid)?;
    if !(beam.intensity > T::zero()) {
        return Err(invalid("intensity", "three-level spectrum needs a positive probe intensity"));
    }
    let rsys = build_r_system(p, d3, beam)?;
    let ss = steady_state_3la(&rsys)?;
    let sys = build_correlator_system_3la(&rsys, &ss);
    sys.check_decay()?;
    let r = derive_rates_unchecked(p, Some(d3));
    decompose(&sys, rsys.gamma_out, ss.s1(), ss.s2(), beam.intensity, r.gamma_t, omega_grid)
}

/// Elastic and inelastic transmission of the driven three-level atom from
/// its steady state alone.
pub fn coherent_split_3la<T: Real>(p: &ModelParams<T>, d3: &DriveParams3<T>, intensity: T, side: Side) -> Result<(T, T)> {
    if !(intensity > T::zero()) {
        return Err(invalid("intensity", "must be positive"));
    }
    let beam = BeamDrive::new(p, side, intensity)?;
    let rsys = build_r_system(p, d3, &beam)?;
    let ss = steady_state_3la(&rsys)?;
    let two = T::lit(2.0);
    let coh = two * rsys.gamma_out * ss.s1().norm_sqr() / intensity;
    let inc = two * rsys.gamma_out * (ss.s2() - ss.s1().norm_sqr()) / intensity;
    Ok((coh, inc))
}

fn check_grid<T: Real>(grid: &[T]) -> Result<()> {
    if grid.iter().any(|w| !w.is_finite()) {
        return Err(invalid("omega_grid", "must be finite"));
    }
    Ok(())
}

fn decompose<T: Real>(
    sys: &CorrelatorSystem<T>,
    gamma_out: T,
    s1: C<T>,
    s2: T,
    intensity: T,
    scale: T,
    grid: &[T],
) -> Result<SpectrumDecomposition<T>> {
    let two = T::lit(2.0);
    let coherent_weight = two * gamma_out * s1.norm_sqr();
    let total_power = two * gamma_out * s2;
    let incoherent_density = grid
        .iter()
        .map(|&w| sys.incoherent_density(w, gamma_out).map(|d| (w, d)))
        .collect::<Result<Vec<_>>>()?;
    let expected = total_power - coherent_weight;
    let tol = T::lit(QUAD_REL_TOL) * total_power.max(T::min_positive_value());
    let mut failure: Option<Error> = None;
    let incoherent_power = integrate_real_line(
        |w| match sys.incoherent_density(w, gamma_out) {
            Ok(d) => d,
            Err(e) => {
                failure.get_or_insert(e);
                T::zero()
            }
        },
        scale,
        tol,
        QUAD_PANELS,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(SpectrumDecomposition {
        coherent_weight,
        incoherent_density,
        t_coh: coherent_weight / intensity,
        t_inc: expected / intensity,
        incoherent_power,
        total_power,
        intensity,
    })
}

/// Split of `ΔT` into elastic and inelastic parts, with the intensity at which
/// the inelastic part changes sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonreciprocityDecomposition<T> {
    pub delta_t_coh: T,
    pub delta_t_inc: T,
    /// `I⁰`, or `None` when the closed form has no positive root.
    pub i_zero: Option<T>,
}

pub fn nonreciprocity_decomposition<T: Real>(p: &ModelParams<T>, intensity: T) -> Result<NonreciprocityDecomposition<T>> {
    let coh = coherent_transmission_closed(p, intensity, Side::Left)? - coherent_transmission_closed(p, intensity, Side::Right)?;
    Ok(NonreciprocityDecomposition {
        delta_t_coh: coh,
        delta_t_inc: delta_t_inc(p, intensity)?,
        i_zero: incoherent_zero(p),
    })
}

pub fn delta_t_inc<T: Real>(p: &ModelParams<T>, intensity: T) -> Result<T> {
    Ok(incoherent_transmission_closed(p, intensity, Side::Left)? - incoherent_transmission_closed(p, intensity, Side::Right)?)
}

/// `(ρ₁, ρ₂)` of the closed-form zero of `ΔT^inc`.
pub fn rho_coefficients<T: Real>(p: &ModelParams<T>) -> (T, T) {
    let r = derive_rates_unchecked(p, None);
    let gt2 = r.gamma_t * r.gamma_t;
    let glr = p.gamma_l * p.gamma_r;
    let rho1 = r.xi * p.gamma_dephase * (p.gamma_r + p.gamma_l) / (T::lit(4.0) * gt2 * glr);
    let rho2 = r.xi * r.xi * (p.gamma_dephase * p.gamma_dephase - r.gamma_d * r.gamma_d) / (T::lit(4.0) * gt2 * gt2 * glr);
    (rho1, rho2)
}

/// `I⁰ = (−ρ₁ + √(ρ₁² − ρ₂)) / 2`.
pub fn incoherent_zero<T: Real>(p: &ModelParams<T>) -> Option<T> {
    if !(p.gamma_l > T::zero() && p.gamma_r > T::zero()) {
        return None;
    }
    let (rho1, rho2) = rho_coefficients(p);
    let disc = rho1 * rho1 - rho2;
    if !(disc >= T::zero()) {
        return None;
    }
    let i0 = (-rho1 + disc.sqrt()) / T::lit(2.0);
    (i0 > T::zero() && i0.is_finite()).then_some(i0)
}

/// Root of `ΔT^inc(I)` located by a logarithmic scan and bracketing solve.
pub fn incoherent_zero_numeric<T: Real>(p: &ModelParams<T>, rel_tol: T) -> Result<T> {
    let scale = tla::critical_point(p)?.intensity;
    let f = |i: T| delta_t_inc(p, i).unwrap_or_else(|_| T::nan());
    let per_decade = 20;
    let grid: Vec<T> = (0..=10 * per_decade)
        .map(|k| scale * T::lit(10f64.powf(-6.0 + k as f64 / per_decade as f64)))
        .collect();
    let mut prev = (grid[0], f(grid[0]));
    for &i in &grid[1..] {
        let fi = f(i);
        if prev.1 * fi <= T::zero() {
            return find_root(f, prev.0, i, rel_tol * i);
        }
        prev = (i, fi);
    }
    Err(Error::NoSignChange { lo: grid[0].to_f64_lossy(), hi: grid[grid.len() - 1].to_f64_lossy() })
}
