//! Physical parameters of the isolator models.
//!
//! Every rate and frequency is dimensionless, measured in units of the atomic
//! transition frequency, and the waveguide group velocity is fixed to one.
//! Consequently an intensity (photons per unit length) and a photon flux share
//! the same number, and the Rabi frequency of a coherent beam entering through
//! a port with radiative rate `Γ` is `Ω = sqrt(2 Γ I)`.

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Port through which a beam enters the waveguide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Self {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Rates of the asymmetrically coupled atom plus the probe detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    /// Radiative decay into the left waveguide, `Γ_L`.
    pub gamma_l: T,
    /// Radiative decay into the right waveguide, `Γ_R`.
    pub gamma_r: T,
    /// Nonradiative decay, `Γ_γ`.
    pub gamma_nonrad: T,
    /// Pure dephasing of the excited level, `Γ_λ`.
    pub gamma_dephase: T,
    /// Probe detuning `ω_p - ω_e`.
    pub detuning_p: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(gamma_l: T, gamma_r: T, gamma_nonrad: T, gamma_dephase: T, detuning_p: T) -> Result<Self> {
        let p = Self { gamma_l, gamma_r, gamma_nonrad, gamma_dephase, detuning_p };
        p.validate()?;
        Ok(p)
    }

    /// Lossless atom driven on resonance.
    pub fn lossless(gamma_l: T, gamma_r: T) -> Result<Self> {
        Self::new(gamma_l, gamma_r, T::zero(), T::zero(), T::zero())
    }

    pub fn validate(&self) -> Result<()> {
        finite("gamma_l", self.gamma_l)?;
        finite("gamma_r", self.gamma_r)?;
        finite("gamma_nonrad", self.gamma_nonrad)?;
        finite("gamma_dephase", self.gamma_dephase)?;
        finite("detuning_p", self.detuning_p)?;
        positive("gamma_l", self.gamma_l)?;
        positive("gamma_r", self.gamma_r)?;
        non_negative("gamma_nonrad", self.gamma_nonrad)?;
        non_negative("gamma_dephase", self.gamma_dephase)?;
        Ok(())
    }

    pub fn is_lossless(&self) -> bool {
        self.gamma_nonrad == T::zero() && self.gamma_dephase == T::zero()
    }

    /// Radiative rate of the port on `side`.
    pub fn gamma_side(&self, side: Side) -> T {
        match side {
            Side::Left => self.gamma_l,
            Side::Right => self.gamma_r,
        }
    }

    /// Relabels the ports so that light entering through `side` always enters
    /// through the left port of the returned parameters.
    ///
    /// All closed forms are written for left incidence; right incidence is the
    /// same physics with `Γ_L` and `Γ_R` exchanged.
    pub fn seen_from(&self, side: Side) -> Self {
        match side {
            Side::Left => *self,
            Side::Right => self.swapped(),
        }
    }

    /// Exchange of `Γ_L` and `Γ_R`.
    pub fn swapped(&self) -> Self {
        Self { gamma_l: self.gamma_r, gamma_r: self.gamma_l, ..*self }
    }
}

/// Control field of the Λ-type atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams3<T> {
    /// Control Rabi frequency `Ω_c`.
    pub rabi_c: T,
    /// Control detuning `Δ_c = ω_c - ω_es`.
    pub detuning_c: T,
    /// Pure dephasing of the metastable level, `Γ_λ'`.
    pub gamma_dephase_s: T,
}

impl<T: Real> DriveParams3<T> {
    pub fn new(rabi_c: T, detuning_c: T, gamma_dephase_s: T) -> Result<Self> {
        let d = Self { rabi_c, detuning_c, gamma_dephase_s };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        finite("rabi_c", self.rabi_c)?;
        finite("detuning_c", self.detuning_c)?;
        finite("gamma_dephase_s", self.gamma_dephase_s)?;
        non_negative("rabi_c", self.rabi_c)?;
        non_negative("gamma_dephase_s", self.gamma_dephase_s)?;
        Ok(())
    }
}

/// Combined dissipation and dephasing rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates<T> {
    /// `Γ_d = Γ_L + Γ_R + Γ_γ`
    pub gamma_d: T,
    /// `Γ_t = Γ_d + Γ_λ`
    pub gamma_t: T,
    /// `Γ_s = Γ_t + Γ_λ'` (equal to `Γ_t` without a control drive)
    pub gamma_s: T,
    /// `Ξ = Γ_d (Γ_t² + δω_p²)`
    pub xi: T,
}

pub fn derive_rates<T: Real>(p: &ModelParams<T>, d3: Option<&DriveParams3<T>>) -> Result<DerivedRates<T>> {
    p.validate()?;
    if let Some(d) = d3 {
        d.validate()?;
    }
    Ok(derive_rates_unchecked(p, d3))
}

pub(crate) fn derive_rates_unchecked<T: Real>(p: &ModelParams<T>, d3: Option<&DriveParams3<T>>) -> DerivedRates<T> {
    let gamma_d = p.gamma_l + p.gamma_r + p.gamma_nonrad;
    let gamma_t = gamma_d + p.gamma_dephase;
    let gamma_s = gamma_t + d3.map_or(T::zero(), |d| d.gamma_dephase_s);
    let xi = gamma_d * (gamma_t * gamma_t + p.detuning_p * p.detuning_p);
    DerivedRates { gamma_d, gamma_t, gamma_s, xi }
}

/// `Ω = sqrt(2 Γ I)` with unit group velocity.
pub fn rabi_from_intensity<T: Real>(gamma_side: T, intensity: T) -> Result<T> {
    if !(gamma_side > T::zero()) || !gamma_side.is_finite() {
        return Err(invalid("gamma_side", "must be positive and finite"));
    }
    check_intensity(intensity)?;
    Ok((T::lit(2.0) * gamma_side * intensity).sqrt())
}

/// Inverse of [`rabi_from_intensity`].
pub fn intensity_from_rabi<T: Real>(gamma_side: T, rabi: T) -> Result<T> {
    if !(gamma_side > T::zero()) || !gamma_side.is_finite() {
        return Err(invalid("gamma_side", "must be positive and finite"));
    }
    if !rabi.is_finite() || rabi < T::zero() {
        return Err(Error::Domain(format!("Rabi frequency must be finite and non-negative, got {rabi}")));
    }
    Ok(rabi * rabi / (T::lit(2.0) * gamma_side))
}

/// One coherent, monochromatic input beam at the probe frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamDrive<T> {
    pub side: Side,
    pub intensity: T,
    /// Rabi frequency seen by the atom; `rabi² = 2 Γ_side I`.
    pub rabi: T,
    /// Phase of the field amplitude in radians. Only meaningful relative to a
    /// second beam.
    pub phase: T,
}

impl<T: Real> BeamDrive<T> {
    pub fn new(p: &ModelParams<T>, side: Side, intensity: T) -> Result<Self> {
        let rabi = rabi_from_intensity(p.gamma_side(side), intensity)?;
        Ok(Self { side, intensity, rabi, phase: T::zero() })
    }

    pub fn left(p: &ModelParams<T>, intensity: T) -> Result<Self> {
        Self::new(p, Side::Left, intensity)
    }

    pub fn right(p: &ModelParams<T>, intensity: T) -> Result<Self> {
        Self::new(p, Side::Right, intensity)
    }

    pub fn with_phase(mut self, phase: T) -> Self {
        self.phase = phase;
        self
    }
}

pub(crate) fn check_intensity<T: Real>(intensity: T) -> Result<()> {
    if !intensity.is_finite() || intensity < T::zero() {
        return Err(Error::Domain(format!("intensity must be finite and non-negative, got {intensity}")));
    }
    Ok(())
}

fn finite<T: Real>(field: &'static str, x: T) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be finite, got {x}")))
    }
}

fn positive<T: Real>(field: &'static str, x: T) -> Result<()> {
    if x > T::zero() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be > 0, got {x}")))
    }
}

fn non_negative<T: Real>(field: &'static str, x: T) -> Result<()> {
    if x >= T::zero() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be >= 0, got {x}")))
    }
}
