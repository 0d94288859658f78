//! Nonreciprocal transmission of coherent light through an atom coupled
//! asymmetrically to an open waveguide.
//!
//! Two isolator models are provided:
//!
//! * [`tla`]: a two-level atom, solved in closed form, with port currents,
//!   the critical intensity of maximal nonreciprocity and a two-beam mode;
//! * [`lambda3`]: a Λ-type three-level atom under a classical control drive,
//!   solved through its 8×8 mean-field system.
//!
//! [`spectrum`] splits the transmitted power into its coherent (elastic) and
//! incoherent parts via two-time correlators. Every model is generic over the
//! scalar type; the `*64` aliases below fix it to `f64`, which is what the
//! tolerances quoted throughout the crate assume.
//!
//! Rates and frequencies are in units of the atomic transition frequency and
//! the group velocity is one.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod lambda3;
pub mod numerics;
pub mod params;
pub mod scalar;
pub mod spectrum;
pub mod tla;

pub use error::{Error, Result};
pub use params::{derive_rates, intensity_from_rabi, rabi_from_intensity, BeamDrive, DerivedRates, DriveParams3, ModelParams, Side};
pub use scalar::Real;

pub type ModelParams64 = ModelParams<f64>;
pub type ModelParams32 = ModelParams<f32>;
pub type DriveParams3_64 = DriveParams3<f64>;
pub type BeamDrive64 = BeamDrive<f64>;
pub type DerivedRates64 = DerivedRates<f64>;
pub type Complex64 = num_complex::Complex<f64>;
pub type ComplexMatrix64 = numerics::ComplexMatrix<f64>;
pub type SteadyState2LA64 = tla::SteadyState2LA<f64>;
pub type PortCurrents64 = tla::PortCurrents<f64>;
pub type NonreciprocityResult64 = tla::NonreciprocityResult<f64>;



pub type SteadyState3LA64 = lambda3::SteadyState3LA<f64>;
pub type RSystem64 = lambda3::RSystem<f64>;
pub type CorrelatorSystem64 = spectrum::CorrelatorSystem<f64>;
pub type SpectrumDecomposition64 = spectrum::SpectrumDecomposition<f64>;
