//! Command-line front end for the isolator models: JSON scenario configs,
//! parallel sweeps, spectra, figure tables and a self-check suite. Every
//! command writes CSV tables and a `manifest.json` describing the run.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod run;
pub mod selfcheck;
pub mod table;
