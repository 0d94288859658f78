//! Two-level atom coupled asymmetrically to a waveguide.
//!
//! With coherent input the atomic expectation values obey the closed linear
//! system of [`drift_2la`] for `(S1, S1*, S2)`, where `S1 = <σ>` in the frame
//! rotating at the probe frequency and `S2 = <σ†σ>`. Its steady state is known
//! in closed form and determines the photon currents at the three ports:
//!
//! * `j_pa`: net flux entering the atom through the incident-side port,
//! * `j_pb`: net flux leaving through the opposite port,
//! * `j_pd`: flux lost to the nonradiative channel.
//!
//! All formulas are written for incidence from the left. Right incidence is
//! handled by relabeling `Γ_L ↔ Γ_R` ([`ModelParams::seen_from`]).

use crate::error::{invalid, Error, Result};
use crate::numerics::{maximize_scalar, ComplexMatrix, LinearSystemModel};
use crate::params::{check_intensity, derive_rates_unchecked, BeamDrive, DerivedRates, ModelParams, Side};
use crate::scalar::{c, ci, cr, Real, C};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState2LA<T> {
    /// `<σ>` in the probe-rotating frame.
    pub s1: C<T>,
    /// Excited-state population `<σ†σ>`.
    pub s2: T,
    /// `Λ = Ξ + 2 Γ_t |Ω|²` for the drive that produced this state.
    pub lambda: T,
}

/// Steady photon currents and the derived coefficients.
///
/// Coefficients are fluxes divided by the total incident intensity. With two
/// counter-propagating beams `j_pb` is a *net* flux and the transmission may
/// be negative; no clamping is applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortCurrents<T> {
    pub j_pa: T,
    pub j_pb: T,
    pub j_pd: T,
    pub transmission: T,
    pub reflection: T,
    pub loss: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonreciprocityResult<T> {
    pub t_lr: T,
    pub t_rl: T,
    /// `t_lr - t_rl`
    pub delta_t: T,
    /// `2 ΔT / (T_LR + T_RL)`, zero when both transmissions vanish.
    pub delta_t_normalized: T,
}

impl<T: Real> NonreciprocityResult<T> {
    pub fn from_pair(t_lr: T, t_rl: T) -> Self {
        let delta_t = t_lr - t_rl;
        let sum = t_lr + t_rl;
        let delta_t_normalized = if sum == T::zero() { T::zero() } else { T::lit(2.0) * delta_t / sum };
        Self { t_lr, t_rl, delta_t, delta_t_normalized }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint<T> {
    /// Intensity maximizing `|ΔT|`.
    pub intensity: T,
    /// `ΔT` at that intensity.
    pub delta_t: T,
}

/// Which input configuration a transmission curve is evaluated for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario<T> {
    SingleBeam,
    /// Forward beam swept along the grid, fixed backward beam at the probe
    /// frequency with the given relative phase.
    TwoBeam { backward_intensity: T, phase: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoBeamResult<T> {
    pub steady: SteadyState2LA<T>,
    pub currents: PortCurrents<T>,
    pub nonreciprocity: NonreciprocityResult<T>,
}

/// Mean-field drift and drive for `(S1, S1*, S2)` under a complex drive `Ω`.
///
/// For real `Ω` this is the familiar 3×3 Langevin system; a complex `Ω`
/// carries the phase of a coherent superposition of inputs.
pub fn drift_2la<T: Real>(p: &ModelParams<T>, rabi: C<T>) -> LinearSystemModel<T> {
    let r = derive_rates_unchecked(p, None);
    let kappa = c(-r.gamma_t, p.detuning_p);
    let two = T::lit(2.0);
    let i = ci(T::one());
    let zero = cr(T::zero());
    let om = rabi;
    let omc = rabi.conj();
    let drift = ComplexMatrix::from_rows(&[
        [kappa, zero, i * om * two],
        [zero, kappa.conj(), -i * omc * two],
        [i * omc, -i * om, cr(-two * r.gamma_d)],
    ])
    .expect("3x3 rows");
    LinearSystemModel { drift, inhomogeneity: vec![-i * om, i * omc, zero] }
}

/// Closed-form steady state under a complex drive, in the left-incidence frame.
pub(crate) fn steady_state_closed<T: Real>(p: &ModelParams<T>, r: &DerivedRates<T>, rabi: C<T>) -> SteadyState2LA<T> {
    let om2 = rabi.norm_sqr();
    let lambda = r.xi + T::lit(2.0) * r.gamma_t * om2;
    let s1 = -ci(T::one()) * rabi * c(r.gamma_t, p.detuning_p) * (r.gamma_d / lambda);
    let s2 = r.gamma_t * om2 / lambda;
    SteadyState2LA { s1, s2, lambda }
}

fn complex_rabi<T: Real>(beam: &BeamDrive<T>) -> C<T> {
    C::from_polar(beam.rabi, beam.phase)
}

/// Steady state for a single beam.
pub fn steady_state_2la<T: Real>(p: &ModelParams<T>, beam: &BeamDrive<T>) -> Result<SteadyState2LA<T>> {
    p.validate()?;
    check_intensity(beam.intensity)?;
    let r = derive_rates_unchecked(p, None);
    Ok(steady_state_closed(p, &r, complex_rabi(beam)))
}

/// Currents for drives `rabi_in` entering through the incident port and
/// `rabi_out` entering through the opposite port; `p` is already oriented.
fn currents_from_state<T: Real>(
    p: &ModelParams<T>,
    ss: &SteadyState2LA<T>,
    rabi_in: C<T>,
    rabi_out: C<T>,
    total_intensity: T,
) -> PortCurrents<T> {
    let two = T::lit(2.0);
    let j_pa = -two * (rabi_in.conj() * ss.s1).im - two * p.gamma_l * ss.s2;
    let j_pb = two * (rabi_out.conj() * ss.s1).im + two * p.gamma_r * ss.s2;
    let j_pd = two * p.gamma_nonrad * ss.s2;
    let (transmission, reflection, loss) = if total_intensity > T::zero() {
        (j_pb / total_intensity, T::one() - j_pa / total_intensity, j_pd / total_intensity)
    } else {
        // weak-drive limit: Λ → Ξ
        let r = derive_rates_unchecked(p, None);
        let four_gt = T::lit(4.0) * r.gamma_t;
        let t = four_gt * (p.gamma_l * p.gamma_r) / r.xi;
        let d = four_gt * p.gamma_l * p.gamma_nonrad / r.xi;
        (t, T::one() - t - d, d)
    };
    PortCurrents { j_pa, j_pb, j_pd, transmission, reflection, loss }
}

/// Port currents for a single beam, in the frame of the incident side.
pub fn port_currents<T: Real>(p: &ModelParams<T>, beam: &BeamDrive<T>, ss: &SteadyState2LA<T>) -> Result<PortCurrents<T>> {
    p.validate()?;
    check_intensity(beam.intensity)?;
    let oriented = p.seen_from(beam.side);
    Ok(currents_from_state(&oriented, ss, complex_rabi(beam), cr(T::zero()), beam.intensity))
}

/// Single-beam transmission `4 Γ_t Γ_in Γ_out / Λ`.
pub fn transmission<T: Real>(p: &ModelParams<T>, side: Side, intensity: T) -> Result<T> {
    p.validate()?;
    check_intensity(intensity)?;
    Ok(transmission_unchecked(p, side, intensity))
}

fn transmission_unchecked<T: Real>(p: &ModelParams<T>, side: Side, intensity: T) -> T {
    let r = derive_rates_unchecked(p, None);
    let g_in = p.gamma_side(side);
    let om2 = T::lit(2.0) * g_in * intensity;
    let lambda = r.xi + T::lit(2.0) * r.gamma_t * om2;
    T::lit(4.0) * r.gamma_t * p.gamma_l * p.gamma_r / lambda
}

pub fn nonreciprocity<T: Real>(p: &ModelParams<T>, intensity: T) -> Result<NonreciprocityResult<T>> {
    p.validate()?;
    check_intensity(intensity)?;
    Ok(NonreciprocityResult::from_pair(
        transmission_unchecked(p, Side::Left, intensity),
        transmission_unchecked(p, Side::Right, intensity),
    ))
}

/// Closed-form critical intensity `Ξ / (4 Γ_t sqrt(Γ_L Γ_R))` and the
/// nonreciprocity reached there.
pub fn critical_point<T: Real>(p: &ModelParams<T>) -> Result<CriticalPoint<T>> {
    p.validate()?;
    let r = derive_rates_unchecked(p, None);
    let geo = (p.gamma_l * p.gamma_r).sqrt();
    let intensity = r.xi / (T::lit(4.0) * r.gamma_t * geo);
    let delta_t = T::lit(4.0) * r.gamma_t * p.gamma_l * p.gamma_r * (p.gamma_r - p.gamma_l)
        / (r.xi * (p.gamma_r + p.gamma_l + T::lit(2.0) * geo));
    Ok(CriticalPoint { intensity, delta_t })
}

/// Locates the extremum of `ΔT(I)` numerically by golden section on
/// `[0, 10 I_cr]`. Independent of the closed form except for the bracket.
pub fn critical_point_numeric<T: Real>(p: &ModelParams<T>, rel_tol: T) -> Result<CriticalPoint<T>> {
    let cp = critical_point(p)?;
    let sign = if p.gamma_r >= p.gamma_l { T::one() } else { -T::one() };
    let hi = T::lit(10.0) * cp.intensity;
    let (x, _) = maximize_scalar(
        |i| sign * (transmission_unchecked(p, Side::Left, i) - transmission_unchecked(p, Side::Right, i)),
        T::zero(),
        hi,
        rel_tol * cp.intensity,
    );
    let nr = nonreciprocity(p, x)?;
    Ok(CriticalPoint { intensity: x, delta_t: nr.delta_t })
}

/// `ΔT^cr` as a function of `Γ_R` with every other rate held fixed.
pub fn sweep_delta_t_cr_vs_gamma_r<T: Real>(p: &ModelParams<T>, gamma_r_grid: &[T]) -> Result<Vec<(T, T)>> {
    gamma_r_grid
        .iter()
        .map(|&gr| {
            if !(gr > T::zero()) {
                return Err(invalid("gamma_r_grid", format!("entries must be positive, got {gr}")));
            }
            let q = ModelParams { gamma_r: gr, ..*p };
            Ok((gr, critical_point(&q)?.delta_t))
        })
        .collect()
}

/// Forward and backward beams at the same frequency.
///
/// The two inputs act on the atom as one effective drive
/// `Ω_eff = Ω_fwd + Ω_bwd e^{iφ}`; the current at each port gains an
/// interference term `2 Im[Ω_port* S1]` from the beam entering there.
/// Transmission is the output-port flux over `I_fwd + I_bwd`; the reverse
/// direction exchanges `Γ_L ↔ Γ_R` while keeping both intensities.
pub fn two_beam<T: Real>(p: &ModelParams<T>, forward: &BeamDrive<T>, backward: &BeamDrive<T>) -> Result<TwoBeamResult<T>> {
    two_beam_at(p, forward, backward, T::zero())
}

/// As [`two_beam`], with the backward beam offset in frequency by
/// `frequency_offset`. Only a zero offset is supported.
pub fn two_beam_at<T: Real>(
    p: &ModelParams<T>,
    forward: &BeamDrive<T>,
    backward: &BeamDrive<T>,
    frequency_offset: T,
) -> Result<TwoBeamResult<T>> {
    p.validate()?;
    check_intensity(forward.intensity)?;
    check_intensity(backward.intensity)?;
    if forward.side == backward.side {
        return Err(invalid("backward.side", "backward beam must enter through the opposite port"));
    }
    if frequency_offset != T::zero() {
        return Err(Error::Unsupported(format!(
            "backward beam detuned by {frequency_offset} from the forward beam; only overlapping spectra are modeled"
        )));
    }
    let phase = backward.phase - forward.phase;
    let (steady, currents) = two_beam_state(&p.seen_from(forward.side), forward.intensity, backward.intensity, phase);
    let t_lr = two_beam_state(p, forward.intensity, backward.intensity, phase).1.transmission;
    let t_rl = two_beam_state(&p.swapped(), forward.intensity, backward.intensity, phase).1.transmission;
    Ok(TwoBeamResult { steady, currents, nonreciprocity: NonreciprocityResult::from_pair(t_lr, t_rl) })
}

/// Two-beam state and currents in the frame where the forward beam enters on
/// the left of `p`.
fn two_beam_state<T: Real>(p: &ModelParams<T>, i_fwd: T, i_bwd: T, phase: T) -> (SteadyState2LA<T>, PortCurrents<T>) {
    let two = T::lit(2.0);
    let om_f = cr((two * p.gamma_l * i_fwd).sqrt());
    let om_b = C::from_polar((two * p.gamma_r * i_bwd).sqrt(), phase);
    let r = derive_rates_unchecked(p, None);
    let ss = steady_state_closed(p, &r, om_f + om_b);
    let currents = currents_from_state(p, &ss, om_f, om_b, i_fwd + i_bwd);
    (ss, currents)
}

/// Nonreciprocity along an intensity grid.
pub fn transmission_curve<T: Real>(
    p: &ModelParams<T>,
    intensity_grid: &[T],
    scenario: Scenario<T>,
) -> Result<Vec<NonreciprocityResult<T>>> {
    intensity_grid
        .iter()
        .map(|&i| match scenario {
            Scenario::SingleBeam => nonreciprocity(p, i),
            Scenario::TwoBeam { backward_intensity, phase } => {
                let fwd = BeamDrive::left(p, i)?;
                let bwd = BeamDrive::right(p, backward_intensity)?.with_phase(phase);
                Ok(two_beam(p, &fwd, &bwd)?.nonreciprocity)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_linear_ivp_final, steady_state};

    fn standard() -> ModelParams<f64> {
        ModelParams::new(0.03, 0.1, 0.003, 0.003, 0.0).unwrap()
    }

    const I_CR: f64 = 0.0825600468346;

    #[test]
    fn zero_drive() {
        let p = standard();
        let beam = BeamDrive::left(&p, 0.0).unwrap();
        let ss = steady_state_2la(&p, &beam).unwrap();
        assert_eq!(ss.s2, 0.0);
        assert_eq!(ss.s1.norm(), 0.0);
        let cur = port_currents(&p, &beam, &ss).unwrap();
        assert_eq!((cur.j_pa, cur.j_pb, cur.j_pd), (0.0, 0.0, 0.0));
        // analytic weak-drive limit of the coefficients
        assert!((cur.transmission - 0.663423).abs() < 1e-6);
        assert!((cur.transmission + cur.reflection + cur.loss - 1.0).abs() < 1e-15);
    }

    #[test]
    fn population_at_critical_intensity() {
        // Λ = Ξ + 2Γ_tΩ² with Ω² = 2Γ_L I evaluated by hand: Γ_t Ω²/Λ
        let p = standard();
        let ss = steady_state_2la(&p, &BeamDrive::left(&p, I_CR).unwrap()).unwrap();
        let om2 = 2.0 * 0.03 * I_CR;
        let lam = 0.133 * 0.136 * 0.136 + 2.0 * 0.136 * om2;
        assert!((ss.s2 - 0.136 * om2 / lam).abs() < 1e-15);
        assert!((ss.s2 - 0.176945).abs() < 1e-6);
        assert!((ss.lambda - lam).abs() < 1e-17);
    }

    #[test]
    fn closed_form_matches_time_integration() {
        let p = standard();
        let beam = BeamDrive::left(&p, I_CR).unwrap();
        let ss = steady_state_2la(&p, &beam).unwrap();
        let model = drift_2la(&p, cr(beam.rabi));
        let gt = 0.136;
        let x = integrate_linear_ivp_final(&model, &[cr(0.0); 3], 200.0 / gt, 0.01 / gt).unwrap();
        assert!((x[0] - ss.s1).norm() < 1e-8);
        assert!((x[2].re - ss.s2).abs() < 1e-8);
        let direct = steady_state(&model).unwrap();
        assert!((direct[0] - ss.s1).norm() < 1e-12);
        assert!((direct[1] - ss.s1.conj()).norm() < 1e-12);
        assert!((direct[2].re - ss.s2).abs() < 1e-12);
    }

    #[test]
    fn saturation_limit() {
        let p = standard();
        let r = derive_rates_unchecked(&p, None);
        let om2 = 1e6 * r.xi / r.gamma_t;
        let ss = steady_state_closed(&p, &r, cr(om2.sqrt()));
        assert!((ss.s2 - 0.5).abs() < 1e-6);
        assert!(ss.s2 < 0.5);
    }

    #[test]
    fn weak_drive_transmission() {
        let p = standard();
        let t = transmission(&p, Side::Left, 0.0).unwrap();
        assert!((t - 4.0 * 0.136 * 0.03 * 0.1 / 2.459968e-3).abs() < 1e-12);
        assert!((t - 0.663423).abs() < 1e-6);
        let tiny = port_currents(&p, &BeamDrive::left(&p, 1e-12).unwrap(), &steady_state_2la(&p, &BeamDrive::left(&p, 1e-12).unwrap()).unwrap()).unwrap();
        assert!((tiny.transmission - t).abs() < 1e-9);
    }

    #[test]
    fn conservation_left_and_right() {
        let p = standard();
        for &side in &[Side::Left, Side::Right] {
            for &i in &[1e-4, 0.01, I_CR, 3.0] {
                let beam = BeamDrive::new(&p, side, i).unwrap();
                let ss = steady_state_2la(&p, &beam).unwrap();
                let cur = port_currents(&p, &beam, &ss).unwrap();
                assert!((cur.j_pa - cur.j_pb - cur.j_pd).abs() <= 1e-12 * cur.j_pa);
                assert!((cur.transmission - transmission(&p, side, i).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn nonreciprocity_at_critical_intensity() {
        let nr = nonreciprocity(&standard(), I_CR).unwrap();
        assert!((nr.t_lr - 0.428645).abs() < 1e-6);
        assert!((nr.t_rl - 0.234778).abs() < 1e-6);
        assert!((nr.delta_t - 0.193867).abs() < 1e-6);
        assert_eq!(nr.delta_t, nr.t_lr - nr.t_rl);
    }

    #[test]
    fn symmetric_coupling_is_reciprocal() {
        let p = ModelParams::new(0.05, 0.05, 0.003, 0.001, 0.02).unwrap();
        for &i in &[0.0, 0.01, 1.0] {
            assert_eq!(nonreciprocity(&p, i).unwrap().delta_t, 0.0);
        }
        assert_eq!(critical_point(&p).unwrap().delta_t, 0.0);
        assert_eq!(nonreciprocity(&standard(), 0.0).unwrap().delta_t, 0.0);
    }

    #[test]
    fn critical_point_values() {
        let cp = critical_point(&standard()).unwrap();
        assert!((cp.intensity - 0.0825600468).abs() < 1e-10);
        assert!((cp.delta_t - 0.193867).abs() < 1e-6);
        let ll = critical_point(&ModelParams::lossless(0.03, 0.1).unwrap()).unwrap();
        // 0.13³ / (4 · 0.13 · sqrt(0.003)) and 4·0.13·0.003·0.07 / (0.13³ (0.13 + 2 sqrt(0.003)))
        let geo = 0.003f64.sqrt();
        assert!((ll.intensity - 0.13f64.powi(3) / (0.52 * geo)).abs() < 1e-15);
        assert!((ll.intensity - 0.0771376).abs() < 1e-7);
        assert!((ll.delta_t - 0.207494).abs() < 1e-6);
    }

    #[test]
    fn numeric_critical_point_agrees() {
        for p in [standard(), standard().swapped(), ModelParams::new(0.02, 0.07, 0.0, 0.01, 0.03).unwrap()] {
            let cf = critical_point(&p).unwrap();
            let num = critical_point_numeric(&p, 1e-9).unwrap();
            assert!(((num.intensity - cf.intensity) / cf.intensity).abs() < 1e-6);
            assert!((nonreciprocity(&p, cf.intensity).unwrap().delta_t - cf.delta_t).abs() < 1e-12);
        }
    }

    #[test]
    fn delta_t_cr_sign_and_extrema() {
        let p = standard();
        let grid: Vec<f64> = (1..=400).map(|k| k as f64 * 0.001).collect();
        let curve = sweep_delta_t_cr_vs_gamma_r(&p, &grid).unwrap();
        for &(gr, d) in &curve {
            if gr == 0.03 {
                assert_eq!(d, 0.0);
            } else {
                assert_eq!(d.signum(), (gr - 0.03).signum(), "at {gr}");
            }
        }
        let dcr = |gr: f64| critical_point(&ModelParams { gamma_r: gr, ..p }).unwrap().delta_t;
        let (below, vmin) = maximize_scalar(|g| -dcr(g), 1e-4, 0.03, 1e-10);
        let (above, vmax) = maximize_scalar(dcr, 0.03, 0.4, 1e-10);
        assert!(below < 0.03 && above > 0.03 && -vmin < 0.0 && vmax > 0.0);
        let interior_extrema = curve
            .windows(3)
            .filter(|w| (w[1].1 - w[0].1) * (w[2].1 - w[1].1) < 0.0)
            .count();
        assert_eq!(interior_extrema, 2);
        assert!(sweep_delta_t_cr_vs_gamma_r(&p, &[0.1, 0.0]).is_err());
    }

    #[test]
    fn two_beam_reduces_to_single() {
        let p = standard();
        for &i in &[0.001, I_CR, 2.0] {
            let fwd = BeamDrive::left(&p, i).unwrap();
            let bwd = BeamDrive::right(&p, 0.0).unwrap();
            let tb = two_beam(&p, &fwd, &bwd).unwrap();
            let ss = steady_state_2la(&p, &fwd).unwrap();
            let cur = port_currents(&p, &fwd, &ss).unwrap();
            let nr = nonreciprocity(&p, i).unwrap();
            assert_eq!(tb.steady, ss);
            assert_eq!(tb.currents, cur);
            assert!((tb.nonreciprocity.t_lr - nr.t_lr).abs() <= 1e-15);
            assert!((tb.nonreciprocity.t_rl - nr.t_rl).abs() <= 1e-15);
        }
    }

    #[test]
    fn two_beam_sample_point() {
        let p = standard();
        let ib = 0.018 * critical_point(&p).unwrap().intensity;
        let tb = two_beam(&p, &BeamDrive::left(&p, ib).unwrap(), &BeamDrive::right(&p, ib).unwrap()).unwrap();
        assert!((tb.nonreciprocity.t_lr - 0.34540).abs() < 1e-5);
        assert!((tb.nonreciprocity.t_rl + 0.41907).abs() < 1e-5);
        assert!((tb.nonreciprocity.delta_t - 0.76447).abs() < 1e-5);
        let c = tb.currents;
        assert!((c.j_pa - c.j_pb - c.j_pd).abs() < 1e-15);
        assert!((c.transmission + c.reflection + c.loss - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_beam_errors() {
        let p = standard();
        let a = BeamDrive::left(&p, 0.01).unwrap();
        assert!(two_beam(&p, &a, &a).is_err());
        let b = BeamDrive::right(&p, 0.01).unwrap();
        assert!(matches!(two_beam_at(&p, &a, &b, 0.01), Err(Error::Unsupported(_))));
    }

    #[test]
    fn curve_shapes() {
        let p = standard();
        assert_eq!(transmission_curve(&p, &[0.0], Scenario::SingleBeam).unwrap()[0].delta_t, 0.0);
        let grid: Vec<f64> = (0..200).map(|k| I_CR * 0.01 * 2000f64.powf(k as f64 / 199.0)).collect();
        let curve = transmission_curve(&p, &grid, Scenario::SingleBeam).unwrap();
        for w in curve.windows(2) {
            assert!(w[1].t_lr < w[0].t_lr);
            assert!(w[1].t_rl < w[0].t_rl);
            assert!(w[1].delta_t_normalized > w[0].delta_t_normalized);
        }
    }
}
