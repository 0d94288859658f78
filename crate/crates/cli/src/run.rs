//! Scenario execution. Grid points are evaluated independently on a rayon
//! pool and gathered back in grid order, so the output never depends on the
//! thread count.

use isolator_core::lambda3::{build_r_system, nonreciprocity_3la_at, port_currents_3la, steady_state_3la};
use isolator_core::spectrum::{build_correlator_system_2la, build_correlator_system_3la, coherent_split_3la, coherent_transmission, incoherent_spectrum, incoherent_transmission_closed, incoherent_zero, incoherent_zero_numeric, rho_coefficients, spectrum_3la, DEFAULT_GRID_POINTS, DEFAULT_WINDOW};
use isolator_core::tla::{critical_point, critical_point_numeric, nonreciprocity, port_currents, steady_state_2la, two_beam, PortCurrents};
use isolator_core::{derive_rates, BeamDrive, DriveParams3, ModelParams, Side};
use rayon::prelude::*;

use crate::config::{GridSpec, ModelKind, Observable, ScenarioConfig, ScenarioKind, Spacing, Units};
use crate::error::RunError;
use crate::table::{Cell, Table};

/// Relative tolerance of the per-run conservation spot check.
pub const CONSERVATION_TOL: f64 = 1e-10;
/// Every `SPOT_CHECK_STRIDE`-th row is re-verified.
pub const SPOT_CHECK_STRIDE: usize = 100;

/// A named output table.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub table: Table,
}

impl Artifact {
    pub fn new(name: impl Into<String>, table: Table) -> Self {
        Self { name: name.into(), table }
    }
}

pub struct Runner {
    pool: rayon::ThreadPool,
}

impl Runner {
    pub fn new(threads: Option<usize>) -> Result<Self, RunError> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            if n == 0 {
                return Err(crate::error::ConfigError::new("threads", "must be at least 1").into());
            }
            b = b.num_threads(n);
        }
        let pool = b
            .build()
            .map_err(|e| RunError::Io { path: "thread pool".into(), source: std::io::Error::other(e) })?;
        Ok(Self { pool })
    }

    /// `f(0..n)` in parallel, results in index order. The first failing index
    /// (in grid order) determines the reported error.
    pub fn map<T, F>(&self, n: usize, f: F) -> Result<Vec<T>, RunError>
    where
        T: Send,
        F: Fn(usize) -> Result<T, RunError> + Sync + Send,
    {
        let results: Vec<Result<T, RunError>> = self.pool.install(|| (0..n).into_par_iter().map(&f).collect());
        results.into_iter().collect()
    }
}

pub(crate) fn at_intensity(k: usize, i: f64) -> String {
    format!("grid index {k} (I = {i:e})")
}

/// `j_pa = j_pb + j_pd` and `T + R + D = 1`.
pub fn check_conservation(c: &PortCurrents<f64>, context: &str) -> Result<(), RunError> {
    let scale = c.j_pa.abs().max(c.j_pb.abs()).max(c.j_pd.abs());
    let flux = (c.j_pa - c.j_pb - c.j_pd).abs();
    let coeff = (c.transmission + c.reflection + c.loss - 1.0).abs();
    if flux > CONSERVATION_TOL * scale || !(coeff <= CONSERVATION_TOL) {
        return Err(RunError::Conservation {
            context: context.to_string(),
            detail: format!("flux residual {flux:e}, coefficient residual {coeff:e}"),
        });
    }
    Ok(())
}

/// Recomputes the port currents for both directions at `intensity` and checks
/// conservation.
pub fn spot_check(cfg: &ScenarioConfig, intensity: f64, context: &str) -> Result<(), RunError> {
    let p = cfg.model_params()?;
    let model = |e| RunError::model(context, e);
    match (cfg.model, cfg.scenario) {
        (ModelKind::TwoLevel, ScenarioKind::SingleBeam) => {
            for side in [Side::Left, Side::Right] {
                let beam = BeamDrive::new(&p, side, intensity).map_err(model)?;
                let ss = steady_state_2la(&p, &beam).map_err(model)?;
                check_conservation(&port_currents(&p, &beam, &ss).map_err(model)?, context)?;
            }
        }
        (ModelKind::TwoLevel, ScenarioKind::TwoBeam) => {
            let ib = cfg.backward_intensity()?;
            let phase = cfg.backward.map(|b| b.phase).unwrap_or(0.0);
            for (fwd, bwd) in [(Side::Left, Side::Right), (Side::Right, Side::Left)] {
                let f = BeamDrive::new(&p, fwd, intensity).map_err(model)?;
                let b = BeamDrive::new(&p, bwd, ib).map_err(model)?.with_phase(phase);
                check_conservation(&two_beam(&p, &f, &b).map_err(model)?.currents, context)?;
            }
        }
        (ModelKind::ThreeLevel, _) => {
            if intensity > 0.0 {
                let d3 = three_level_drive(cfg)?;
                for side in [Side::Left, Side::Right] {
                    let beam = BeamDrive::new(&p, side, intensity).map_err(model)?;
                    let ss = steady_state_3la(&build_r_system(&p, &d3, &beam).map_err(model)?).map_err(model)?;
                    check_conservation(&port_currents_3la(&p, &beam, &ss), context)?;
                }
            }
        }
    }
    Ok(())
}

fn three_level_drive(cfg: &ScenarioConfig) -> Result<DriveParams3<f64>, RunError> {
    cfg.drive_params()?
        .ok_or_else(|| crate::error::ConfigError::new("drive3", "required for model three_level").into())
}

fn echo_columns(cfg: &ScenarioConfig) -> Vec<&'static str> {
    let mut cols = vec!["intensity", "intensity_over_icr", "gamma_l", "gamma_r", "gamma_nonrad", "gamma_dephase", "detuning_p"];
    if cfg.model == ModelKind::ThreeLevel {
        cols.extend(["rabi_c", "detuning_c", "gamma_dephase_s"]);
    }
    if cfg.scenario == ScenarioKind::TwoBeam {
        cols.extend(["backward_intensity", "backward_phase"]);
    }
    cols
}

fn echo_values(cfg: &ScenarioConfig, intensity: f64, icr: f64) -> Result<Vec<Cell>, RunError> {
    let p = &cfg.params;
    let mut v: Vec<Cell> = vec![
        intensity.into(),
        (intensity / icr).into(),
        p.gamma_l.into(),
        p.gamma_r.into(),
        p.gamma_nonrad.into(),
        p.gamma_dephase.into(),
        p.detuning_p.into(),
    ];
    if let Some(d) = cfg.drive3 {
        v.extend([d.rabi_c.into(), d.detuning_c.into(), d.gamma_dephase_s.into()]);
    }
    if cfg.scenario == ScenarioKind::TwoBeam {
        v.push(cfg.backward_intensity()?.into());
        v.push(cfg.backward.map(|b| b.phase).unwrap_or(0.0).into());
    }
    Ok(v)
}

/// Observables of one grid point in canonical order.
fn observe(cfg: &ScenarioConfig, p: &ModelParams<f64>, intensity: f64, ctx: &str) -> Result<Vec<Cell>, RunError> {
    let model = |e| RunError::model(ctx, e);
    let outputs = cfg.ordered_outputs();
    let nr = match (cfg.model, cfg.scenario) {
        (ModelKind::TwoLevel, ScenarioKind::SingleBeam) => nonreciprocity(p, intensity).map_err(model)?,
        (ModelKind::TwoLevel, ScenarioKind::TwoBeam) => {
            let phase = cfg.backward.map(|b| b.phase).unwrap_or(0.0);
            let f = BeamDrive::left(p, intensity).map_err(model)?;
            let b = BeamDrive::right(p, cfg.backward_intensity()?).map_err(model)?.with_phase(phase);
            two_beam(p, &f, &b).map_err(model)?.nonreciprocity
        }
        (ModelKind::ThreeLevel, _) => nonreciprocity_3la_at(p, &three_level_drive(cfg)?, intensity).map_err(model)?,
    };
    let split = if outputs.iter().any(|o| matches!(o, Observable::TCoh | Observable::TInc)) {
        Some(match cfg.model {
            ModelKind::TwoLevel => {
                let mut v = [0.0; 4];
                for (j, side) in [Side::Left, Side::Right].into_iter().enumerate() {
                    v[j] = coherent_transmission(p, intensity, side).map_err(model)?;
                    v[2 + j] = incoherent_transmission_closed(p, intensity, side).map_err(model)?;
                }
                v
            }
            ModelKind::ThreeLevel => {
                let d3 = three_level_drive(cfg)?;
                let (cl, il) = coherent_split_3la(p, &d3, intensity, Side::Left).map_err(model)?;
                let (cr, ir) = coherent_split_3la(p, &d3, intensity, Side::Right).map_err(model)?;
                [cl, cr, il, ir]
            }
        })
    } else {
        None
    };
    let mut row = Vec::new();
    for o in outputs {
        match o {
            Observable::TLr => row.push(nr.t_lr.into()),
            Observable::TRl => row.push(nr.t_rl.into()),
            Observable::DeltaT => row.push(nr.delta_t.into()),
            Observable::DeltaTNorm => row.push(nr.delta_t_normalized.into()),
            Observable::TCoh => {
                let s = split.expect("computed above");
                row.extend([s[0].into(), s[1].into()]);
            }
            Observable::TInc => {
                let s = split.expect("computed above");
                row.extend([s[2].into(), s[3].into()]);
            }
        }
    }
    Ok(row)
}

/// Intensity sweep for the configured model and scenario.
pub fn sweep(runner: &Runner, cfg: &ScenarioConfig, name: &str) -> Result<Artifact, RunError> {
    cfg.validate()?;
    let p = cfg.model_params()?;
    let icr = cfg.critical_intensity()?;
    let grid = cfg.intensities()?;
    let mut columns: Vec<&str> = echo_columns(cfg);
    for o in cfg.ordered_outputs() {
        columns.extend(o.columns());
    }
    let rows = runner.map(grid.len(), |k| {
        let i = grid[k];
        let ctx = at_intensity(k, i);
        if k % SPOT_CHECK_STRIDE == 0 {
            spot_check(cfg, i, &ctx)?;
        }
        let mut row = echo_values(cfg, i, icr)?;
        row.extend(observe(cfg, &p, i, &ctx)?);
        Ok(row)
    })?;
    let mut table = Table::new(&columns);
    for r in rows {
        table.push(r);
    }
    Ok(Artifact::new(name, table))
}

/// Two-beam sweep: adds the forward-incidence port currents to the
/// nonreciprocity columns.
pub fn twobeam(runner: &Runner, cfg: &ScenarioConfig) -> Result<Artifact, RunError> {
    cfg.validate()?;
    if cfg.scenario != ScenarioKind::TwoBeam {
        return Err(crate::error::ConfigError::new("scenario", "twobeam needs scenario two_beam").into());
    }
    let mut art = sweep(runner, cfg, "twobeam.csv")?;
    let p = cfg.model_params()?;
    let grid = cfg.intensities()?;
    let ib = cfg.backward_intensity()?;
    let phase = cfg.backward.map(|b| b.phase).unwrap_or(0.0);
    let extra = runner.map(grid.len(), |k| {
        let ctx = at_intensity(k, grid[k]);
        let model = |e| RunError::model(&ctx, e);
        let f = BeamDrive::left(&p, grid[k]).map_err(model)?;
        let b = BeamDrive::right(&p, ib).map_err(model)?.with_phase(phase);
        let c = two_beam(&p, &f, &b).map_err(model)?.currents;
        Ok([c.j_pa, c.j_pb, c.j_pd, c.reflection, c.loss])
    })?;
    art.table.columns.extend(["j_pa", "j_pb", "j_pd", "reflection", "loss"].map(String::from));
    for (row, e) in art.table.rows.iter_mut().zip(extra) {
        row.extend(e.into_iter().map(Cell::Num));
    }
    Ok(art)
}

fn currents_cells(c: &PortCurrents<f64>) -> [Cell; 6] {
    [c.j_pa.into(), c.j_pb.into(), c.j_pd.into(), c.transmission.into(), c.reflection.into(), c.loss.into()]
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Left => "left",
        Side::Right => "right",
    }
}

/// Two-level steady state and currents for incidence from each side.
pub fn steady2(cfg: &ScenarioConfig) -> Result<Artifact, RunError> {
    cfg.validate()?;
    let p = cfg.model_params()?;
    let i = cfg.probe_intensity()?;
    let ctx = format!("I = {i:e}");
    let model = |e| RunError::model(&ctx, e);
    let mut t = Table::new(&[
        "side", "intensity", "s1_re", "s1_im", "s2", "j_pa", "j_pb", "j_pd", "transmission", "reflection", "loss",
    ]);
    for side in [Side::Left, Side::Right] {
        let beam = BeamDrive::new(&p, side, i).map_err(model)?;
        let ss = steady_state_2la(&p, &beam).map_err(model)?;
        let c = port_currents(&p, &beam, &ss).map_err(model)?;
        check_conservation(&c, &ctx)?;
        let mut row: Vec<Cell> = vec![side_name(side).into(), i.into(), ss.s1.re.into(), ss.s1.im.into(), ss.s2.into()];
        row.extend(currents_cells(&c));
        t.push(row);
    }
    Ok(Artifact::new("steady2.csv", t))
}

/// Three-level steady state (all eight mean-field components) and currents.
pub fn steady3(cfg: &ScenarioConfig) -> Result<Artifact, RunError> {
    cfg.validate()?;
    let p = cfg.model_params()?;
    let d3 = three_level_drive(cfg)?;
    let i = cfg.probe_intensity()?;
    if !(i > 0.0) {
        return Err(crate::error::ConfigError::new("probe.intensity", "steady3 needs a positive probe intensity").into());
    }
    let ctx = format!("I = {i:e}");
    let model = |e| RunError::model(&ctx, e);
    let mut t = Table::new(&[
        "side", "intensity", "s1_re", "s1_im", "s2", "m1_re", "m1_im", "m2", "n_re", "n_im", "j_pa", "j_pb", "j_pd",
        "transmission", "reflection", "loss",
    ]);
    for side in [Side::Left, Side::Right] {
        let beam = BeamDrive::new(&p, side, i).map_err(model)?;
        let ss = steady_state_3la(&build_r_system(&p, &d3, &beam).map_err(model)?).map_err(model)?;
        let c = port_currents_3la(&p, &beam, &ss);
        check_conservation(&c, &ctx)?;
        let mut row: Vec<Cell> = vec![side_name(side).into(), i.into()];
        row.extend([ss.s1().re, ss.s1().im, ss.s2(), ss.m1().re, ss.m1().im, ss.m2(), ss.n().re, ss.n().im].map(Cell::Num));
        row.extend(currents_cells(&c));
        t.push(row);
    }
    Ok(Artifact::new("steady3.csv", t))
}

pub fn default_spectrum_grid() -> GridSpec {
    GridSpec {
        min: -DEFAULT_WINDOW,
        max: DEFAULT_WINDOW,
        count: DEFAULT_GRID_POINTS,
        spacing: Spacing::Linear,
        units: Units::Linewidth,
    }
}

/// Incoherent spectral density on the spectrum grid plus the power budget.
pub fn spectrum(runner: &Runner, cfg: &ScenarioConfig) -> Result<Vec<Artifact>, RunError> {
    cfg.validate()?;
    let p = cfg.model_params()?;
    let i = cfg.probe_intensity()?;
    let side: Side = cfg.probe.side.into();
    let ctx = format!("I = {i:e}");
    let model = |e| RunError::model(&ctx, e);
    let d3 = cfg.drive_params()?;
    let rates = derive_rates(&p, d3.as_ref()).map_err(model)?;
    let grid_spec = cfg.spectrum_grid.unwrap_or_else(default_spectrum_grid);
    let scale = if grid_spec.units == Units::Linewidth { rates.gamma_t } else { 1.0 };
    let omegas: Vec<f64> = grid_spec.points().into_iter().map(|w| w * scale).collect();
    let beam = BeamDrive::new(&p, side, i).map_err(model)?;
    let (budget, sys) = match cfg.model {
        ModelKind::TwoLevel => (
            incoherent_spectrum(&p, &beam, &[]).map_err(model)?,
            build_correlator_system_2la(&p, &beam).map_err(model)?,
        ),
        ModelKind::ThreeLevel => {
            let d3 = three_level_drive(cfg)?;
            let rsys = build_r_system(&p, &d3, &beam).map_err(model)?;
            let ss = steady_state_3la(&rsys).map_err(model)?;
            (spectrum_3la(&p, &d3, &beam, &[]).map_err(model)?, build_correlator_system_3la(&rsys, &ss))
        }
    };
    let gamma_out = p.seen_from(side).gamma_r;
    let values = runner.map(omegas.len(), |k| {
        sys.incoherent_density(omegas[k], gamma_out)
            .map_err(|e| RunError::model(format!("spectrum grid index {k} (Δω = {:e})", omegas[k]), e))
    })?;
    let mut density = Table::new(&["delta_omega", "p_inc"]);
    for (w, d) in omegas.iter().zip(values) {
        density.push(vec![(*w).into(), d.into()]);
    }
    let mut summary = Table::new(&[
        "intensity", "coherent_weight", "incoherent_power", "total_power", "t_coh", "t_inc", "t_inc_quadrature",
    ]);
    summary.push(
        [budget.intensity, budget.coherent_weight, budget.incoherent_power, budget.total_power, budget.t_coh, budget.t_inc, budget.t_inc_quadrature()]
            .map(Cell::Num)
            .to_vec(),
    );
    Ok(vec![Artifact::new("spectrum.csv", density), Artifact::new("spectrum_summary.csv", summary)])
}

/// Critical point (closed form and numeric) and the incoherent zero.
pub fn critical(cfg: &ScenarioConfig) -> Result<Artifact, RunError> {
    cfg.validate()?;
    let p = cfg.model_params()?;
    let model = |e| RunError::model("critical point", e);
    let cp = critical_point(&p).map_err(model)?;
    let num = critical_point_numeric(&p, 1e-10).map_err(model)?;
    let (rho1, rho2) = rho_coefficients(&p);
    let i0 = incoherent_zero(&p).unwrap_or(f64::NAN);
    let i0n = if i0.is_nan() { f64::NAN } else { incoherent_zero_numeric(&p, 1e-13).map_err(model)? };
    let mut t = Table::new(&[
        "i_cr", "delta_t_cr", "i_cr_numeric", "delta_t_cr_numeric", "rho1", "rho2", "i_zero", "i_zero_numeric",
    ]);
    t.push([cp.intensity, cp.delta_t, num.intensity, num.delta_t, rho1, rho2, i0, i0n].map(Cell::Num).to_vec());
    Ok(Artifact::new("critical.csv", t))
}
