//! Invariant suite run by the `selfcheck` command.

use isolator_core::lambda3::{build_r_system, steady_state_3la, transmission_3la, transmission_lossless};
use isolator_core::numerics::integrate_linear_ivp_final;
use isolator_core::spectrum::{build_correlator_system_2la, delta_t_inc, incoherent_spectrum, incoherent_zero, incoherent_zero_numeric, nonreciprocity_decomposition, default_omega_grid};
use isolator_core::tla::{critical_point, critical_point_numeric, drift_2la, nonreciprocity, port_currents, steady_state_2la, two_beam};
use isolator_core::{BeamDrive, Complex64, ModelParams, Side};

use crate::figures::{drive_lossless, lossless_params, standard_params};
use crate::run::check_conservation;
use crate::table::{Cell, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn() -> Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn sample_params() -> Vec<ModelParams<f64>> {
    let mut v = Vec::new();
    for (k, gl) in [0.01, 0.03, 0.07].into_iter().enumerate() {
        for (j, gr) in [0.02, 0.1].into_iter().enumerate() {
            let g = 0.001 * (k + j) as f64;
            v.push(ModelParams::new(gl, gr, g, 0.002, 0.01 * j as f64).expect("valid constants"));
        }
    }
    v
}

fn ode_matches_closed_form() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for p in sample_params() {
        let i = critical_point(&p).map_err(e2s)?.intensity;
        let beam = BeamDrive::left(&p, i).map_err(e2s)?;
        let model = drift_2la(&p, Complex64::new(beam.rabi, 0.0));
        let x = integrate_linear_ivp_final(&model, &[Complex64::new(0.0, 0.0); 3], 600.0, 0.05).map_err(e2s)?;
        let ss = steady_state_2la(&p, &beam).map_err(e2s)?;
        worst = worst.max((x[0] - ss.s1).norm()).max((x[2].re - ss.s2).abs());
    }
    ensure(worst < 1e-8, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:e}"))
}

fn currents_conserved() -> Result<String, String> {
    let mut n = 0;
    for p in sample_params() {
        let icr = critical_point(&p).map_err(e2s)?.intensity;
        for x in [0.0, 0.01, 0.3, 1.0, 7.0, 100.0] {
            for side in [Side::Left, Side::Right] {
                let beam = BeamDrive::new(&p, side, x * icr).map_err(e2s)?;
                let ss = steady_state_2la(&p, &beam).map_err(e2s)?;
                check_conservation(&port_currents(&p, &beam, &ss).map_err(e2s)?, "selfcheck").map_err(e2s)?;
                n += 1;
            }
        }
    }
    Ok(format!("{n} operating points"))
}

fn critical_point_consistent() -> Result<String, String> {
    let p = standard_params();
    let cp = critical_point(&p).map_err(e2s)?;
    let num = critical_point_numeric(&p, 1e-10).map_err(e2s)?;
    let rel = (num.intensity / cp.intensity - 1.0).abs();
    ensure(rel < 1e-6, || format!("argmax off by {rel:e}"))?;
    Ok(format!("I_cr = {:.10e}, ΔT^cr = {:.10e}", cp.intensity, cp.delta_t))
}

fn decomposition_identity() -> Result<String, String> {
    let p = standard_params();
    let icr = critical_point(&p).map_err(e2s)?.intensity;
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let i = icr * 10f64.powf(-3.0 + 5.0 * k as f64 / 99.0);
        let d = nonreciprocity_decomposition(&p, i).map_err(e2s)?;
        let nr = nonreciprocity(&p, i).map_err(e2s)?;
        worst = worst.max((d.delta_t_coh + d.delta_t_inc - nr.delta_t).abs());
    }
    ensure(worst < 1e-12, || format!("residual {worst:e}"))?;
    Ok(format!("residual {worst:e}"))
}

fn incoherent_zero_located() -> Result<String, String> {
    let p = standard_params();
    let i0 = incoherent_zero(&p).ok_or("no positive root")?;
    let num = incoherent_zero_numeric(&p, 1e-13).map_err(e2s)?;
    let v = delta_t_inc(&p, i0).map_err(e2s)?;
    ensure((num - i0).abs() <= 1e-10 && v.abs() < 1e-10, || format!("I0 {i0:e} vs root {num:e}, ΔT^inc(I0) = {v:e}"))?;
    Ok(format!("I0 = {i0:.10e}"))
}

fn spectrum_normalized() -> Result<String, String> {
    let p = standard_params();
    let icr = critical_point(&p).map_err(e2s)?.intensity;
    let mut worst: f64 = 0.0;
    for (x, side) in [(0.3, Side::Left), (1.0, Side::Right), (4.0, Side::Left)] {
        let beam = BeamDrive::new(&p, side, x * icr).map_err(e2s)?;
        let d = incoherent_spectrum(&p, &beam, &default_omega_grid(0.136)).map_err(e2s)?;
        let rel = ((d.coherent_weight + d.incoherent_power) / d.total_power - 1.0).abs();
        worst = worst.max(rel);
        ensure(d.min_density() >= -1e-12, || format!("negative density {:e}", d.min_density()))?;
    }
    ensure(worst < 1e-6, || format!("relative error {worst:e}"))?;
    Ok(format!("relative error {worst:e}"))
}

fn regression_consistent() -> Result<String, String> {
    let p = standard_params();
    let icr = critical_point(&p).map_err(e2s)?.intensity;
    let sys = build_correlator_system_2la(&p, &BeamDrive::left(&p, icr).map_err(e2s)?).map_err(e2s)?;
    let r = sys.regression_residual().map_err(e2s)?;
    ensure(r < 1e-10, || format!("residual {r:e}"))?;
    Ok(format!("residual {r:e}"))
}

fn three_level_closed_form() -> Result<String, String> {
    let p = lossless_params();
    let d = drive_lossless();
    let mut worst: f64 = 0.0;
    for k in 0..8 {
        let i = 1e-4 * 10f64.powf(0.5 * k as f64);
        for side in [Side::Left, Side::Right] {
            let a = transmission_lossless(&p, &d, i, side).map_err(e2s)?;
            let b = transmission_3la(&p, &d, i, side).map_err(e2s)?;
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst < 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:e}"))
}

fn three_level_invariants() -> Result<String, String> {
    let p = standard_params();
    let d = crate::figures::drive_lossy();
    let mut worst: f64 = 0.0;
    for i in [1e-4, 0.021, 0.5] {
        let rs = build_r_system(&p, &d, &BeamDrive::left(&p, i).map_err(e2s)?).map_err(e2s)?;
        worst = worst.max(steady_state_3la(&rs).map_err(e2s)?.invariant_violation());
    }
    ensure(worst < 1e-12, || format!("violation {worst:e}"))?;
    Ok(format!("violation {worst:e}"))
}

fn two_beam_reduces() -> Result<String, String> {
    let p = standard_params();
    let mut worst: f64 = 0.0;
    for i in [0.0, 0.01, 0.08, 2.0] {
        let tb = two_beam(&p, &BeamDrive::left(&p, i).map_err(e2s)?, &BeamDrive::right(&p, 0.0).map_err(e2s)?).map_err(e2s)?;
        let nr = nonreciprocity(&p, i).map_err(e2s)?;
        worst = worst.max((tb.nonreciprocity.t_lr - nr.t_lr).abs()).max((tb.nonreciprocity.t_rl - nr.t_rl).abs());
    }
    ensure(worst <= 1e-15, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:e}"))
}

pub const CHECKS: [(&str, Check); 10] = [
    ("ode_matches_closed_form", ode_matches_closed_form),
    ("currents_conserved", currents_conserved),
    ("critical_point_consistent", critical_point_consistent),
    ("decomposition_identity", decomposition_identity),
    ("incoherent_zero_located", incoherent_zero_located),
    ("spectrum_normalized", spectrum_normalized),
    ("regression_consistent", regression_consistent),
    ("three_level_closed_form", three_level_closed_form),
    ("three_level_invariants", three_level_invariants),
    ("two_beam_reduces", two_beam_reduces),
];

pub fn run_all() -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(name, f)| match f() {
            Ok(detail) => CheckOutcome { name, passed: true, detail },
            Err(detail) => CheckOutcome { name, passed: false, detail },
        })
        .collect()
}

pub fn report(outcomes: &[CheckOutcome]) -> Table {
    let mut t = Table::new(&["check", "status", "detail"]);
    for o in outcomes {
        t.push(vec![o.name.into(), (if o.passed { "pass" } else { "fail" }).into(), Cell::Text(o.detail.clone())]);
    }
    t
}
