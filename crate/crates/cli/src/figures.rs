//! Data tables behind the published transmission and nonreciprocity plots.
//!
//! Unless a panel varies them, all tables use `Γ_L = 0.03`, `Γ_R = 0.1`,
//! `Γ_γ = Γ_λ = 0.003`, `δω_p = 0`, and for the driven three-level atom
//! `Δ_c = 0.02`, `Ω_c = 0.01`, `Γ_λ' = 0.001`.

use isolator_core::lambda3::nonreciprocity_3la_at;
use isolator_core::spectrum::{coherent_split_3la, coherent_transmission, incoherent_transmission_closed, incoherent_zero, nonreciprocity_decomposition};
use isolator_core::tla::{critical_point, nonreciprocity, port_currents, steady_state_2la, sweep_delta_t_cr_vs_gamma_r, two_beam};
use isolator_core::{BeamDrive, DriveParams3, ModelParams, Side};
use serde::{Deserialize, Serialize};

use crate::config::{GridSpec, Spacing, Units};
use crate::error::RunError;
use crate::run::{at_intensity, check_conservation, Artifact, Runner, SPOT_CHECK_STRIDE};
use crate::table::{Cell, Table};

/// Backward-to-critical intensity ratio of the two-beam panels.
pub const ZETA: f64 = 0.018;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum FigureId {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig4,
    Fig5,
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig2c,
        FigureId::Fig3a,
        FigureId::Fig3b,
        FigureId::Fig3c,
        FigureId::Fig4,
        FigureId::Fig5,
    ];

    pub fn file_name(self) -> &'static str {
        match self {
            FigureId::Fig2a => "fig2a.csv",
            FigureId::Fig2b => "fig2b.csv",
            FigureId::Fig2c => "fig2c.csv",
            FigureId::Fig3a => "fig3a.csv",
            FigureId::Fig3b => "fig3b.csv",
            FigureId::Fig3c => "fig3c.csv",
            FigureId::Fig4 => "fig4.csv",
            FigureId::Fig5 => "fig5.csv",
        }
    }
}

pub fn standard_params() -> ModelParams<f64> {
    ModelParams::new(0.03, 0.1, 0.003, 0.003, 0.0).expect("valid constants")
}

pub fn lossless_params() -> ModelParams<f64> {
    ModelParams::lossless(0.03, 0.1).expect("valid constants")
}

pub fn drive_lossy() -> DriveParams3<f64> {
    DriveParams3::new(0.01, 0.02, 0.001).expect("valid constants")
}

pub fn drive_lossless() -> DriveParams3<f64> {
    DriveParams3::new(0.01, 0.02, 0.0).expect("valid constants")
}

fn log_grid(min: f64, max: f64, count: usize) -> Vec<f64> {
    GridSpec { min, max, count, spacing: Spacing::Log, units: Units::Absolute }.points()
}

fn model_err(ctx: &str) -> impl Fn(isolator_core::Error) -> RunError + '_ {
    move |e| RunError::model(ctx, e)
}

fn single_beam_spot_check(p: &ModelParams<f64>, k: usize, i: f64, ctx: &str) -> Result<(), RunError> {
    if !k.is_multiple_of(SPOT_CHECK_STRIDE) {
        return Ok(());
    }
    for side in [Side::Left, Side::Right] {
        let beam = BeamDrive::new(p, side, i).map_err(model_err(ctx))?;
        let ss = steady_state_2la(p, &beam).map_err(model_err(ctx))?;
        check_conservation(&port_currents(p, &beam, &ss).map_err(model_err(ctx))?, ctx)?;
    }
    Ok(())
}

fn build(columns: &[&str], rows: Vec<Vec<f64>>) -> Table {
    let mut t = Table::new(columns);
    for r in rows {
        t.push(r.into_iter().map(Cell::Num).collect());
    }
    t
}

/// Transmissions and nonreciprocity against `I/I_cr`.
fn fig2a(runner: &Runner) -> Result<Table, RunError> {
    let p = standard_params();
    let icr = critical_point(&p).map_err(model_err("critical point"))?.intensity;
    let x = log_grid(0.01, 20.0, 200);
    let rows = runner.map(x.len(), |k| {
        let i = x[k] * icr;
        let ctx = at_intensity(k, i);
        single_beam_spot_check(&p, k, i, &ctx)?;
        let nr = nonreciprocity(&p, i).map_err(model_err(&ctx))?;
        Ok(vec![x[k], i, nr.t_lr, nr.t_rl, nr.delta_t, nr.delta_t_normalized])
    })?;
    Ok(build(&["i_over_icr", "intensity", "t_lr", "t_rl", "delta_t", "delta_t_norm"], rows))
}

pub const FIG2B_GAMMA_L: [f64; 3] = [0.01, 0.03, 0.05];

/// `ΔT` for three `Γ_L` at `Γ_R = 0.1`, each against its own `I/I_cr`, plus
/// the `Γ_L = 0.03` curve with a backward beam of intensity `ζ I_cr`.
fn fig2b(runner: &Runner) -> Result<Table, RunError> {
    let params: Vec<_> = FIG2B_GAMMA_L
        .iter()
        .map(|&gl| ModelParams::new(gl, 0.1, 0.003, 0.003, 0.0).expect("valid constants"))
        .collect();
    let icrs = params
        .iter()
        .map(|p| critical_point(p).map(|c| c.intensity))
        .collect::<Result<Vec<_>, _>>()
        .map_err(model_err("critical point"))?;
    let std = standard_params();
    let icr = critical_point(&std).map_err(model_err("critical point"))?.intensity;
    let x = log_grid(0.001, 20.0, 300);
    let rows = runner.map(x.len(), |k| {
        let mut row = vec![x[k]];
        for (p, icr) in params.iter().zip(&icrs) {
            let i = x[k] * icr;
            let ctx = at_intensity(k, i);
            single_beam_spot_check(p, k, i, &ctx)?;
            row.push(nonreciprocity(p, i).map_err(model_err(&ctx))?.delta_t);
        }
        let i = x[k] * icr;
        let ctx = at_intensity(k, i);
        let f = BeamDrive::left(&std, i).map_err(model_err(&ctx))?;
        let b = BeamDrive::right(&std, ZETA * icr).map_err(model_err(&ctx))?;
        let tb = two_beam(&std, &f, &b).map_err(model_err(&ctx))?;
        if k % SPOT_CHECK_STRIDE == 0 {
            check_conservation(&tb.currents, &ctx)?;
        }
        row.push(tb.nonreciprocity.delta_t);
        Ok(row)
    })?;
    Ok(build(
        &["i_over_icr", "delta_t_gamma_l_0p01", "delta_t_gamma_l_0p03", "delta_t_gamma_l_0p05", "delta_t_two_beam"],
        rows,
    ))
}

/// `(Γ_γ, Γ_λ, δω_p)` variants of the `ΔT^cr(Γ_R)` panel.
pub const FIG2C_VARIANTS: [(&str, f64, f64, f64); 4] = [
    ("delta_t_cr_base", 0.003, 0.003, 0.0),
    ("delta_t_cr_gamma_nonrad_0p01", 0.01, 0.003, 0.0),
    ("delta_t_cr_gamma_dephase_0p01", 0.003, 0.01, 0.0),
    ("delta_t_cr_detuning_0p05", 0.003, 0.003, 0.05),
];

/// `ΔT^cr` against `Γ_R` at `Γ_L = 0.03`.
fn fig2c(_runner: &Runner) -> Result<Table, RunError> {
    let gr = GridSpec { min: 0.001, max: 0.3, count: 300, spacing: Spacing::Linear, units: Units::Absolute }.points();
    let mut cols = vec!["gamma_r"];
    let mut curves = Vec::new();
    for (name, gg, gl, dw) in FIG2C_VARIANTS {
        cols.push(name);
        let p = ModelParams::new(0.03, 0.1, gg, gl, dw).expect("valid constants");
        curves.push(sweep_delta_t_cr_vs_gamma_r(&p, &gr).map_err(model_err(name))?);
    }
    let rows = (0..gr.len())
        .map(|k| std::iter::once(gr[k]).chain(curves.iter().map(|c| c[k].1)).collect())
        .collect();
    Ok(build(&cols, rows))
}

fn i_zero(p: &ModelParams<f64>) -> Result<f64, RunError> {
    incoherent_zero(p).ok_or_else(|| RunError::model("incoherent zero", isolator_core::Error::Domain("no positive root".into())))
}

/// Coherent and incoherent parts of both transmissions against `I/I⁰`.
fn fig3a(runner: &Runner) -> Result<Table, RunError> {
    let p = standard_params();
    let i0 = i_zero(&p)?;
    let x = log_grid(0.01, 20.0, 200);
    let rows = runner.map(x.len(), |k| {
        let i = x[k] * i0;
        let ctx = at_intensity(k, i);
        single_beam_spot_check(&p, k, i, &ctx)?;
        let nr = nonreciprocity(&p, i).map_err(model_err(&ctx))?;
        let mut row = vec![x[k], i, nr.t_lr, nr.t_rl];
        for side in [Side::Left, Side::Right] {
            row.push(coherent_transmission(&p, i, side).map_err(model_err(&ctx))?);
            row.push(incoherent_transmission_closed(&p, i, side).map_err(model_err(&ctx))?);
        }
        Ok(row)
    })?;
    Ok(build(&["i_over_i0", "intensity", "t_lr", "t_rl", "t_lr_coh", "t_lr_inc", "t_rl_coh", "t_rl_inc"], rows))
}

/// `ΔT^coh`, `ΔT^inc` and `ΔT` against `I/I⁰`.
fn fig3b(runner: &Runner) -> Result<Table, RunError> {
    let p = standard_params();
    let i0 = i_zero(&p)?;
    let x = log_grid(0.01, 20.0, 200);
    let rows = runner.map(x.len(), |k| {
        let i = x[k] * i0;
        let ctx = at_intensity(k, i);
        single_beam_spot_check(&p, k, i, &ctx)?;
        let d = nonreciprocity_decomposition(&p, i).map_err(model_err(&ctx))?;
        let nr = nonreciprocity(&p, i).map_err(model_err(&ctx))?;
        Ok(vec![x[k], i, d.delta_t_coh, d.delta_t_inc, nr.delta_t])
    })?;
    Ok(build(&["i_over_i0", "intensity", "delta_t_coh", "delta_t_inc", "delta_t"], rows))
}

/// Forward transmissions with a backward beam of intensity `ζ I_cr`.
fn fig3c(runner: &Runner) -> Result<Table, RunError> {
    let p = standard_params();
    let icr = critical_point(&p).map_err(model_err("critical point"))?.intensity;
    let x = log_grid(0.001, 20.0, 300);
    let rows = runner.map(x.len(), |k| {
        let i = x[k] * icr;
        let ctx = at_intensity(k, i);
        let f = BeamDrive::left(&p, i).map_err(model_err(&ctx))?;
        let b = BeamDrive::right(&p, ZETA * icr).map_err(model_err(&ctx))?;
        let tb = two_beam(&p, &f, &b).map_err(model_err(&ctx))?;
        if k % SPOT_CHECK_STRIDE == 0 {
            check_conservation(&tb.currents, &ctx)?;
        }
        let nr = tb.nonreciprocity;
        Ok(vec![x[k], i, nr.t_lr, nr.t_rl, nr.delta_t])
    })?;
    Ok(build(&["i_over_icr", "intensity", "t_lr", "t_rl", "delta_t"], rows))
}

/// Driven three-level atom against the two-level atom, lossless and lossy,
/// all against `I/I_cr` of the lossy two-level atom.
fn fig4(runner: &Runner) -> Result<Table, RunError> {
    let (pl, p0) = (standard_params(), lossless_params());
    let (dl, d0) = (drive_lossy(), drive_lossless());
    let icr = critical_point(&pl).map_err(model_err("critical point"))?.intensity;
    let x = log_grid(0.001, 100.0, 300);
    let rows = runner.map(x.len(), |k| {
        let i = x[k] * icr;
        let ctx = at_intensity(k, i);
        single_beam_spot_check(&pl, k, i, &ctx)?;
        let e = model_err(&ctx);
        Ok(vec![
            x[k],
            i,
            nonreciprocity_3la_at(&p0, &d0, i).map_err(&e)?.delta_t,
            nonreciprocity_3la_at(&pl, &dl, i).map_err(&e)?.delta_t,
            nonreciprocity(&p0, i).map_err(&e)?.delta_t,
            nonreciprocity(&pl, i).map_err(&e)?.delta_t,
        ])
    })?;
    Ok(build(&["i_over_icr", "intensity", "delta_t_d0", "delta_t_d", "delta_t_0", "delta_t"], rows))
}

/// Coherent and incoherent parts of the lossless three-level nonreciprocity.
fn fig5(runner: &Runner) -> Result<Table, RunError> {
    let p = lossless_params();
    let d = drive_lossless();
    let icr = critical_point(&standard_params()).map_err(model_err("critical point"))?.intensity;
    let x = log_grid(0.001, 100.0, 300);
    let rows = runner.map(x.len(), |k| {
        let i = x[k] * icr;
        let ctx = at_intensity(k, i);
        let e = model_err(&ctx);
        let (cl, il) = coherent_split_3la(&p, &d, i, Side::Left).map_err(&e)?;
        let (cr, ir) = coherent_split_3la(&p, &d, i, Side::Right).map_err(&e)?;
        let nr = nonreciprocity_3la_at(&p, &d, i).map_err(&e)?;
        Ok(vec![x[k], i, cl - cr, il - ir, nr.delta_t])
    })?;
    Ok(build(&["i_over_icr", "intensity", "delta_t_d0_coh", "delta_t_d0_inc", "delta_t_d0"], rows))
}

pub fn figure(runner: &Runner, id: FigureId) -> Result<Artifact, RunError> {
    let table = match id {
        FigureId::Fig2a => fig2a(runner),
        FigureId::Fig2b => fig2b(runner),
        FigureId::Fig2c => fig2c(runner),
        FigureId::Fig3a => fig3a(runner),
        FigureId::Fig3b => fig3b(runner),
        FigureId::Fig3c => fig3c(runner),
        FigureId::Fig4 => fig4(runner),
        FigureId::Fig5 => fig5(runner),
    }?;
    Ok(Artifact::new(id.file_name(), table))
}

pub fn figures(runner: &Runner, which: &[FigureId]) -> Result<Vec<Artifact>, RunError> {
    let mut ids = if which.is_empty() { FigureId::ALL.to_vec() } else { which.to_vec() };
    ids.sort();
    ids.dedup();
    ids.into_iter().map(|id| figure(runner, id)).collect()
}
