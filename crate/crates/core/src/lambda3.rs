//! Driven Λ-type three-level atom.
//!
//! Levels `|g⟩`, `|s⟩` (lower) and `|e⟩` (upper); the probe couples `g ↔ e`
//! asymmetrically to the waveguide and a classical control of Rabi frequency
//! `Ω_c` drives `s ↔ e`. Operators follow `σ = |g⟩⟨e|`, `μ† = |s⟩⟨e|` and
//! `ν = |s⟩⟨g|`. The mean-field vector
//!
//! `M = (S1, S1*, S2, M1, M1*, M2, N, N*)`
//!
//! with `M1 = <μ>`, `M2 = <μ†μ>` and `N = <ν†>` (probe-rotating) obeys
//! `dM/dt = R M + Ω_M`, built by [`build_r_system`].

use crate::error::{invalid, Error, Result};
use crate::numerics::{maximize_on_grid, steady_state, ComplexMatrix, LinearSystemModel};
use crate::params::{check_intensity, derive_rates_unchecked, BeamDrive, DriveParams3, ModelParams, Side};
use crate::scalar::{c, ci, cr, Real, C};
use crate::tla::{NonreciprocityResult, PortCurrents};

/// Index of each mean-field component inside `M`.
pub mod slot {
    pub const S1: usize = 0;
    pub const S1_CONJ: usize = 1;
    pub const S2: usize = 2;
    pub const M1: usize = 3;
    pub const M1_CONJ: usize = 4;
    pub const M2: usize = 5;
    pub const N: usize = 6;
    pub const N_CONJ: usize = 7;
}

/// Intensity used in place of `I = 0`, and the one it is checked against.
pub const WEAK_PROBE_INTENSITY: f64 = 1e-12;
pub const WEAK_PROBE_CHECK_INTENSITY: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState3LA<T> {
    pub m: [C<T>; 8],
}

impl<T: Real> SteadyState3LA<T> {
    pub fn s1(&self) -> C<T> {
        self.m[slot::S1]
    }
    pub fn s2(&self) -> T {
        self.m[slot::S2].re
    }
    pub fn m1(&self) -> C<T> {
        self.m[slot::M1]
    }
    pub fn m2(&self) -> T {
        self.m[slot::M2].re
    }
    pub fn n(&self) -> C<T> {
        self.m[slot::N]
    }

    /// Largest violation of the conjugate-pair, realness and `Im M1 = 0`
    /// relations a physical steady state satisfies.
    pub fn invariant_violation(&self) -> T {
        let m = &self.m;
        [
            (m[slot::S1_CONJ] - m[slot::S1].conj()).norm(),
            (m[slot::M1_CONJ] - m[slot::M1].conj()).norm(),
            (m[slot::N_CONJ] - m[slot::N].conj()).norm(),
            m[slot::S2].im.abs(),
            m[slot::M2].im.abs(),
            m[slot::M1].im.abs(),
        ]
        .into_iter()
        .fold(T::zero(), T::max)
    }
}

/// Drift matrix `R` and drive vector `Ω_M`, oriented so the probe enters on
/// the left.
#[derive(Debug, Clone, PartialEq)]
pub struct RSystem<T> {
    pub r_matrix: ComplexMatrix<T>,
    pub omega_m: Vec<C<T>>,
    /// Output-port radiative rate (`Γ_R` of the oriented parameters).
    pub gamma_out: T,
    /// Probe intensity the system was built for.
    pub intensity: T,
}

impl<T: Real> RSystem<T> {
    pub fn model(&self) -> LinearSystemModel<T> {
        LinearSystemModel { drift: self.r_matrix.clone(), inhomogeneity: self.omega_m.clone() }
    }
}

/// `κ₁ = iδω_p − Γ_t`, `κ₂ = iΔ_c − Γ_s`, `κ₃ = i(δω_p − Δ_c) − Γ_λ'`.
pub fn kappas<T: Real>(p: &ModelParams<T>, d3: &DriveParams3<T>) -> [C<T>; 3] {
    let r = derive_rates_unchecked(p, Some(d3));
    [
        c(-r.gamma_t, p.detuning_p),
        c(-r.gamma_s, d3.detuning_c),
        c(-d3.gamma_dephase_s, p.detuning_p - d3.detuning_c),
    ]
}

/// Transcribes the 8×8 mean-field system. The beam's phase is a global phase
/// for a single input and is not carried into the (real-`Ω_L`) matrix.
pub fn build_r_system<T: Real>(p: &ModelParams<T>, d3: &DriveParams3<T>, beam: &BeamDrive<T>) -> Result<RSystem<T>> {
    p.validate()?;
    d3.validate()?;
    check_intensity(beam.intensity)?;
    let oriented = p.seen_from(beam.side);
    let r = derive_rates_unchecked(&oriented, Some(d3));
    let [k1, k2, k3] = kappas(&oriented, d3);
    let z = cr(T::zero());
    let ol = ci(beam.rabi);
    let oc = ci(d3.rabi_c);
    let two = cr(T::lit(2.0));
    let gd2 = cr(-T::lit(2.0) * r.gamma_d);
    #[rustfmt::skip]
    let rows = [
        [k1,  z,       two * ol,  z,         z,   ol,  -oc, z        ],
        [z,   k1.conj(), -two * ol, z,       z,   -ol, z,   oc       ],
        [ol,  -ol,     gd2,       -oc,       oc,  z,   z,   z        ],
        [z,   z,       -oc,       k2.conj(), z,   oc,  ol,  z        ],
        [z,   z,       oc,        z,         k2,  -oc, z,   -ol      ],
        [z,   z,       z,         oc,        -oc, z,   z,   z        ],
        [-oc, z,       z,         ol,        z,   z,   k3,  z        ],
        [z,   oc,      z,         z,         -ol, z,   z,   k3.conj()],
    ];
    let r_matrix = ComplexMatrix::from_rows(&rows)?;
    let mut omega_m = vec![z; 8];
    omega_m[slot::S1] = -ol;
    omega_m[slot::S1_CONJ] = ol;
    Ok(RSystem { r_matrix, omega_m, gamma_out: oriented.gamma_r, intensity: beam.intensity })
}

/// `M(∞) = −R⁻¹ Ω_M`, gated on `R` being nonsingular and stable.
///
/// `Ω_c = 0` always yields [`Error::SingularMatrix`]: the `M2` row of `R`
/// vanishes and the metastable population is left undetermined.
pub fn steady_state_3la<T: Real>(rsys: &RSystem<T>) -> Result<SteadyState3LA<T>> {
    let x = steady_state(&rsys.model())?;
    let mut m = [cr(T::zero()); 8];
    m.copy_from_slice(&x);
    Ok(SteadyState3LA { m })
}

/// Probe transmission `2 Γ_out S2 / I` from the matrix solve.
///
/// At `I = 0` the weak-probe value at `I = 1e-12` is returned after checking
/// it against `I = 1e-10`.
pub fn transmission_3la<T: Real>(p: &ModelParams<T>, d3: &DriveParams3<T>, intensity: T, side: Side) -> Result<T> {
    check_intensity(intensity)?;
    if intensity > T::zero() {
        return transmission_at(p, d3, intensity, side);
    }
    let t1 = transmission_at(p, d3, T::lit(WEAK_PROBE_INTENSITY), side)?;
    let t2 = transmission_at(p, d3, T::lit(WEAK_PROBE_CHECK_INTENSITY), side)?;
    let scale = t1.abs().max(t2.abs());
    if (t1 - t2).abs() > T::lit(1e-4) * scale + T::lit(1e-10) {
        return Err(Error::Domain(format!("weak-probe transmission not converged: {t1} vs {t2}")));
    }
    Ok(t1)
}

fn transmission_at<T: Real>(p: &ModelParams<T>, d3: &DriveParams3<T>, intensity: T, side: Side) -> Result<T> {
    let beam = BeamDrive::new(p, side, intensity)?;
    let rsys = build_r_system(p, d3, &beam)?;
    let ss = steady_state_3la(&rsys)?;
    Ok(T::lit(2.0) * rsys.gamma_out * ss.s2() / intensity)
}

/// Closed-form transmission of the lossless driven atom, with `Δ = δω_p − Δ_c`:
///
/// `4Γ_LΓ_RΔ² / ((Γ_L+Γ_R)²Δ² + (Ω_c² − δω_pΔ)² + 2(Ω_c² + Δ²)Ω_L² + Ω_L⁴)`.
pub fn transmission_lossless<T: Real>(p: &ModelParams<T>, d3: &DriveParams3<T>, intensity: T, side: Side) -> Result<T> {
    p.validate()?;
    d3.validate()?;
    check_intensity(intensity)?;
    if !p.is_lossless() || d3.gamma_dephase_s != T::zero() {
        return Err(invalid("params", "lossless closed form requires Γ_γ = Γ_λ = Γ_λ' = 0"));
    }
    let two = T::lit(2.0);
    let om2 = two * p.gamma_side(side) * intensity;
    let delta = p.detuning_p - d3.detuning_c;
    let d2 = delta * delta;
    let oc2 = d3.rabi_c * d3.rabi_c;
    let sum = p.gamma_l + p.gamma_r;
    let shift = oc2 - p.detuning_p * delta;
    let denom = sum * sum * d2 + shift * shift + two * (oc2 + d2) * om2 + om2 * om2;
    if denom == T::zero() {
        return Err(Error::Domain("lossless transmission is 0/0 at Δ = Ω_c = 0".into()));
    }
    Ok(T::lit(4.0) * p.gamma_l * p.gamma_r * d2 / denom)
}

/// Port currents evaluated from the 3LA steady state exactly as for the 2LA.
pub fn port_currents_3la<T: Real>(p: &ModelParams<T>, beam: &BeamDrive<T>, ss: &SteadyState3LA<T>) -> PortCurrents<T> {
    let o = p.seen_from(beam.side);
    let two = T::lit(2.0);
    let s2 = ss.s2();
    let j_pa = -two * beam.rabi * ss.s1().im - two * o.gamma_l * s2;
    let j_pb = two * o.gamma_r * s2;
    let j_pd = two * o.gamma_nonrad * s2;
    let i = beam.intensity;
    PortCurrents {
        j_pa,
        j_pb,
        j_pd,
        transmission: j_pb / i,
        reflection: T::one() - j_pa / i,
        loss: j_pd / i,
    }
}

/// Nonreciprocity of the driven atom along an intensity grid, with the
/// extremum refined by golden section around the best grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct Nonreciprocity3Sweep<T> {
    pub intensities: Vec<T>,
    pub points: Vec<NonreciprocityResult<T>>,
    /// Extremal `ΔT` (a maximum for `Γ_R > Γ_L`, a minimum otherwise).
    pub max_delta_t: T,
    pub argmax_intensity: T,
}

pub fn nonreciprocity_3la_at<T: Real>(p: &ModelParams<T>, d3: &DriveParams3<T>, intensity: T) -> Result<NonreciprocityResult<T>> {
    Ok(NonreciprocityResult::from_pair(
        transmission_3la(p, d3, intensity, Side::Left)?,
        transmission_3la(p, d3, intensity, Side::Right)?,
    ))
}

pub fn nonreciprocity_3la<T: Real>(
    p: &ModelParams<T>,
    d3: &DriveParams3<T>,
    intensity_grid: &[T],
) -> Result<Nonreciprocity3Sweep<T>> {
    if intensity_grid.is_empty() {
        return Err(invalid("intensity_grid", "must not be empty"));
    }
    let points = intensity_grid
        .iter()
        .map(|&i| nonreciprocity_3la_at(p, d3, i))
        .collect::<Result<Vec<_>>>()?;
    let sign = if p.gamma_r >= p.gamma_l { T::one() } else { -T::one() };
    let mut failure = None;
    let tol = T::lit(1e-10) * intensity_grid.iter().copied().fold(T::zero(), T::max);
    let (x, fx) = maximize_on_grid(
        |i| match nonreciprocity_3la_at(p, d3, i) {
            Ok(nr) => sign * nr.delta_t,
            Err(e) => {
                failure.get_or_insert(e);
                T::neg_infinity()
            }
        },
        intensity_grid,
        tol,
    )
    .ok_or_else(|| invalid("intensity_grid", "no finite nonreciprocity values"))?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Nonreciprocity3Sweep {
        intensities: intensity_grid.to_vec(),
        points,
        max_delta_t: sign * fx,
        argmax_intensity: x,
    })
}
