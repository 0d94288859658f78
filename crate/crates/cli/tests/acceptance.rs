//! Acceptance suite: one line per criterion, non-zero exit on any failure.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use isolator_core::lambda3::{build_r_system, nonreciprocity_3la, steady_state_3la, transmission_3la, transmission_lossless};
use isolator_core::numerics::{integrate_linear_ivp, integrate_linear_ivp_final, LinearSystemModel};
use isolator_core::spectrum::{
    build_correlator_system_2la, coherent_transmission, coherent_transmission_closed, default_omega_grid,
    incoherent_spectrum, incoherent_transmission_closed, incoherent_zero, incoherent_zero_numeric,
    nonreciprocity_decomposition,
};
use isolator_core::tla::{critical_point, critical_point_numeric, drift_2la, nonreciprocity, port_currents, steady_state_2la, two_beam, transmission};
use isolator_core::{derive_rates, BeamDrive, Complex64, DriveParams3, ModelParams, Side};
use isolator_cli::table::Table;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn standard() -> ModelParams<f64> {
    ModelParams::new(0.03, 0.1, 0.003, 0.003, 0.0).unwrap()
}

fn lossless() -> ModelParams<f64> {
    ModelParams::lossless(0.03, 0.1).unwrap()
}

fn fig4_drive() -> DriveParams3<f64> {
    DriveParams3::new(0.01, 0.02, 0.0).unwrap()
}

fn e2s(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_params(rng: &mut ChaCha8Rng) -> ModelParams<f64> {
    ModelParams::new(
        rng.gen_range(0.01..0.2),
        rng.gen_range(0.01..0.2),
        rng.gen_range(0.0..0.01),
        rng.gen_range(0.0..0.01),
        rng.gen_range(-0.1..0.1),
    )
    .unwrap()
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn zero3() -> [Complex64; 3] {
    [Complex64::new(0.0, 0.0); 3]
}

/// Integrates the mean-field equations from the ground state until the
/// slowest rate has decayed by `e^-40`.
fn relax_2la(p: &ModelParams<f64>, rabi: Complex64) -> Result<Vec<Complex64>, String> {
    let model = drift_2la(p, rabi);
    let r = derive_rates(p, None).map_err(e2s)?;
    let t_end = 40.0 / r.gamma_d;
    let dt = 0.1f64.min(0.5 / model.drift.norm_inf());
    integrate_linear_ivp_final(&model, &zero3(), t_end, dt).map_err(e2s)
}

fn c1_ode_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let p = random_params(&mut rng);
        let beam = BeamDrive::new(&p, if rng.gen() { Side::Left } else { Side::Right }, log_uniform(&mut rng, 1e-4, 1.0))
            .map_err(e2s)?;
        let ss = steady_state_2la(&p, &beam).map_err(e2s)?;
        let x = relax_2la(&p.seen_from(beam.side), Complex64::new(beam.rabi, 0.0))?;
        worst = worst.max((x[0] - ss.s1).norm()).max((x[2].re - ss.s2).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    check(worst <= 1e-8, || format!("max |ODE - closed| = {worst:e}"))?;
    Ok(format!("20 random sets, max |ODE - closed| = {worst:.2e}, {secs:.2} s"))
}

fn c2_conservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut flux, mut coeff): (f64, f64) = (0.0, 0.0);
    for _ in 0..500 {
        let p = random_params(&mut rng);
        let i = log_uniform(&mut rng, 1e-6, 10.0);
        for side in [Side::Left, Side::Right] {
            let beam = BeamDrive::new(&p, side, i).map_err(e2s)?;
            let c = port_currents(&p, &beam, &steady_state_2la(&p, &beam).map_err(e2s)?).map_err(e2s)?;
            let scale = c.j_pa.abs() + c.j_pb.abs() + c.j_pd.abs();
            flux = flux.max((c.j_pa - c.j_pb - c.j_pd).abs() / scale);
            coeff = coeff.max((c.transmission + c.reflection + c.loss - 1.0).abs());
        }
    }
    check(flux <= 1e-12 && coeff <= 1e-12, || format!("flux {flux:e}, T+R+D {coeff:e}"))?;
    Ok(format!("500 samples x 2 directions, flux {flux:.2e}, T+R+D-1 {coeff:.2e}"))
}

const I_CR: f64 = 0.0825600468346;
const DELTA_T_CR: f64 = 0.193866384965;

fn c3_critical_point() -> Outcome {
    let p = standard();
    let cp = critical_point(&p).map_err(e2s)?;
    let num = critical_point_numeric(&p, 1e-10).map_err(e2s)?;
    let ri = (cp.intensity / I_CR - 1.0).abs();
    let rd = (cp.delta_t / DELTA_T_CR - 1.0).abs();
    let rn = (num.intensity / cp.intensity - 1.0).abs();
    check(ri <= 1e-9 && rd <= 1e-9, || format!("closed form I_cr {} ΔT^cr {} off oracle", cp.intensity, cp.delta_t))?;
    check(rn <= 1e-6, || format!("numeric argmax {} off by {rn:e}", num.intensity))?;
    check((cp.delta_t - 0.19).abs() <= 0.02, || format!("ΔT^cr = {} outside 0.19 ± 0.02", cp.delta_t))?;
    Ok(format!("I_cr = {:.10}, ΔT^cr = {:.10}, argmax rel {rn:.1e}", cp.intensity, cp.delta_t))
}

fn c4_decomposition() -> Outcome {
    let p = standard();
    let (mut dt_res, mut t_res): (f64, f64) = (0.0, 0.0);
    for k in 0..100 {
        let i = I_CR * 10f64.powf(-3.0 + 5.0 * k as f64 / 99.0);
        let d = nonreciprocity_decomposition(&p, i).map_err(e2s)?;
        dt_res = dt_res.max((d.delta_t_coh + d.delta_t_inc - nonreciprocity(&p, i).map_err(e2s)?.delta_t).abs());
        for side in [Side::Left, Side::Right] {
            let coh = coherent_transmission(&p, i, side).map_err(e2s)?;
            let inc = incoherent_transmission_closed(&p, i, side).map_err(e2s)?;
            t_res = t_res.max((coh + inc - transmission(&p, side, i).map_err(e2s)?).abs());
        }
    }
    check(dt_res <= 1e-12 && t_res <= 1e-12, || format!("ΔT residual {dt_res:e}, T residual {t_res:e}"))?;
    let (coh, inc) = (
        coherent_transmission(&p, I_CR, Side::Left).map_err(e2s)?,
        incoherent_transmission_closed(&p, I_CR, Side::Left).map_err(e2s)?,
    );
    let coh_closed = coherent_transmission_closed(&p, I_CR, Side::Left).map_err(e2s)?;
    let spec = incoherent_spectrum(&p, &BeamDrive::left(&p, I_CR).map_err(e2s)?, &[]).map_err(e2s)?;
    check((coh - coh_closed).abs() <= 1e-9 && (coh - 0.2708427437).abs() <= 1e-9, || format!("T_coh = {coh}"))?;
    check((inc - spec.t_inc_quadrature()).abs() <= 1e-9 && (inc - 0.1578020808).abs() <= 1e-9, || {
        format!("T_inc = {inc}, from spectrum {}", spec.t_inc_quadrature())
    })?;
    Ok(format!("residuals {dt_res:.1e}/{t_res:.1e}; T_coh = {coh:.10}, T_inc = {inc:.10}"))
}

fn c5_incoherent_zero() -> Outcome {
    let p = standard();
    let i0 = incoherent_zero(&p).ok_or("no positive root")?;
    let root = incoherent_zero_numeric(&p, 1e-13).map_err(e2s)?;
    check((i0 - 0.0785860058970).abs() <= 1e-10, || format!("I0 = {i0}"))?;
    check((root - i0).abs() <= 1e-10, || format!("root {root} vs closed {i0}"))?;
    for k in 0..200 {
        let i = i0 * 10f64.powf(-4.0 + 4.0 * k as f64 / 200.0);
        let d = nonreciprocity_decomposition(&p, i).map_err(e2s)?;
        check(d.delta_t_coh * d.delta_t_inc < 0.0, || {
            format!("same sign at I = {i:e}: {} {}", d.delta_t_coh, d.delta_t_inc)
        })?;
    }
    Ok(format!("I0 = {i0:.12}, |root - I0| = {:.1e}, signs opposite on 200 points below", (root - i0).abs()))
}

fn time_domain_density(p: &ModelParams<f64>, beam: &BeamDrive<f64>, omega: f64) -> Result<(f64, f64), String> {
    let sys = build_correlator_system_2la(p, beam).map_err(e2s)?;
    let gamma_out = p.seen_from(beam.side).gamma_r;
    let r = derive_rates(p, None).map_err(e2s)?;
    let model = LinearSystemModel::homogeneous(sys.drift.clone());
    let dt = 0.05f64.min(0.2 / sys.drift.norm_inf());
    let t_end = 40.0 / r.gamma_d;
    let tr = integrate_linear_ivp(&model, &sys.initial, t_end, dt).map_err(e2s)?;
    // Simpson needs an even interval count; the dropped tail has decayed
    let n = (tr.times.len() - 1) & !1;
    let h = tr.times[1] - tr.times[0];
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=n {
        let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += Complex64::from_polar(1.0, omega * tr.times[k]) * tr.states[k][0] * w;
    }
    let scale = h / 3.0;
    let td = 2.0 * gamma_out / std::f64::consts::PI * (acc * scale).re;
    Ok((td, sys.incoherent_density(omega, gamma_out).map_err(e2s)?))
}

fn c6_spectrum() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut norm, mut min_p): (f64, f64) = (0.0, f64::INFINITY);
    let mut pts = Vec::new();
    for _ in 0..10 {
        let p = random_params(&mut rng);
        let side = if rng.gen() { Side::Left } else { Side::Right };
        let i = log_uniform(&mut rng, 1e-3, 1.0);
        let beam = BeamDrive::new(&p, side, i).map_err(e2s)?;
        let r = derive_rates(&p, None).map_err(e2s)?;
        let d = incoherent_spectrum(&p, &beam, &default_omega_grid(r.gamma_t)).map_err(e2s)?;
        let ss = steady_state_2la(&p, &beam).map_err(e2s)?;
        let expected = 2.0 * p.seen_from(side).gamma_r * ss.s2;
        norm = norm.max(((d.coherent_weight + d.incoherent_power) / expected - 1.0).abs());
        min_p = min_p.min(d.min_density());
        pts.push((p, beam));
    }
    check(norm <= 1e-6, || format!("normalization off by {norm:e}"))?;
    check(min_p >= -1e-12, || format!("min density {min_p:e}"))?;
    let mut worst: f64 = 0.0;
    for (p, beam) in pts.iter().take(5) {
        let r = derive_rates(p, None).map_err(e2s)?;
        let omega = rng.gen_range(-3.0..3.0) * r.gamma_t;
        let (td, fd) = time_domain_density(p, beam, omega)?;
        let peak = (0..41)
            .map(|k| {
                let w = (k as f64 - 20.0) * 0.25 * r.gamma_t;
                build_correlator_system_2la(p, beam).unwrap().incoherent_density(w, p.seen_from(beam.side).gamma_r).unwrap().abs()
            })
            .fold(0.0, f64::max);
        worst = worst.max((td - fd).abs() / peak);
    }
    check(worst <= 1e-6, || format!("time vs frequency domain off by {worst:e} of peak"))?;
    Ok(format!("normalization {norm:.1e}, min P_inc {min_p:.1e}, time-domain {worst:.1e} of peak"))
}

fn c7_three_level_closed_form() -> Outcome {
    let d = fig4_drive();
    let mut worst: f64 = 0.0;
    let mut im_m1: f64 = 0.0;
    for a in 0..20 {
        let i = 1e-4 * 1e4f64.powf(a as f64 / 19.0);
        for b in 0..20 {
            let dw = -0.1 + 0.2 * b as f64 / 19.0;
            let p = ModelParams::new(0.03, 0.1, 0.0, 0.0, dw).map_err(e2s)?;
            for side in [Side::Left, Side::Right] {
                let closed = transmission_lossless(&p, &d, i, side).map_err(e2s)?;
                let matrix = transmission_3la(&p, &d, i, side).map_err(e2s)?;
                worst = worst.max((closed - matrix).abs());
                let rs = build_r_system(&p, &d, &BeamDrive::new(&p, side, i).map_err(e2s)?).map_err(e2s)?;
                im_m1 = im_m1.max(steady_state_3la(&rs).map_err(e2s)?.m1().im.abs());
            }
        }
    }
    check(worst <= 1e-12, || format!("closed vs matrix {worst:e}"))?;
    check(im_m1 <= 1e-12, || format!("|Im M1| = {im_m1:e}"))?;
    let p = ModelParams::new(0.03, 0.1, 0.0, 0.0, 0.02).map_err(e2s)?;
    let mut eit: f64 = 0.0;
    for i in [1e-4, 0.01, 0.021, 1.0] {
        for side in [Side::Left, Side::Right] {
            eit = eit.max(transmission_3la(&p, &d, i, side).map_err(e2s)?.abs());
        }
    }
    check(eit <= 1e-12, || format!("|T| at δω_p = Δ_c is {eit:e}"))?;
    Ok(format!("20x20 grid max {worst:.1e}, EIT |T| {eit:.1e}, |Im M1| {im_m1:.1e}"))
}

fn c8_three_level_ratio() -> Outcome {
    let grid: Vec<f64> = (0..200).map(|k| 1e-4 * 1e4f64.powf(k as f64 / 199.0)).collect();
    let sweep = nonreciprocity_3la(&lossless(), &fig4_drive(), &grid).map_err(e2s)?;
    let two = critical_point(&lossless()).map_err(e2s)?.delta_t;
    let ratio = sweep.max_delta_t / two;
    check((sweep.max_delta_t - 0.3313139).abs() <= 1e-6, || format!("max ΔT^d0 = {}", sweep.max_delta_t))?;
    check((sweep.argmax_intensity / 0.0210747 - 1.0).abs() <= 1e-4, || format!("argmax {}", sweep.argmax_intensity))?;
    check((two - 0.2074944).abs() <= 1e-6, || format!("lossless 2LA ΔT^cr = {two}"))?;
    check((1.5..=1.7).contains(&ratio), || format!("ratio {ratio}"))?;
    Ok(format!("max ΔT^d0 = {:.7} at I = {:.7}, ratio {ratio:.4}", sweep.max_delta_t, sweep.argmax_intensity))
}

/// Two-beam transmission from the relaxed mean-field equations.
fn two_beam_oracle(p: &ModelParams<f64>, i_in: f64, i_b: f64) -> Result<f64, String> {
    let om_f = Complex64::new((2.0 * p.gamma_l * i_in).sqrt(), 0.0);
    let om_b = Complex64::new((2.0 * p.gamma_r * i_b).sqrt(), 0.0);
    let x = relax_2la(p, om_f + om_b)?;
    let j_pb = 2.0 * (om_b.conj() * x[0]).im + 2.0 * p.gamma_r * x[2].re;
    Ok(j_pb / (i_in + i_b))
}

fn c9_two_beam() -> Outcome {
    let p = standard();
    let mut off: f64 = 0.0;
    for k in 0..60 {
        let i = if k == 0 { 0.0 } else { I_CR * 10f64.powf(-3.0 + 5.0 * k as f64 / 59.0) };
        let tb = two_beam(&p, &BeamDrive::left(&p, i).map_err(e2s)?, &BeamDrive::right(&p, 0.0).map_err(e2s)?).map_err(e2s)?;
        let nr = nonreciprocity(&p, i).map_err(e2s)?;
        let beam = BeamDrive::left(&p, i).map_err(e2s)?;
        let single = port_currents(&p, &beam, &steady_state_2la(&p, &beam).map_err(e2s)?).map_err(e2s)?;
        for (a, b) in [
            (tb.nonreciprocity.t_lr, nr.t_lr),
            (tb.nonreciprocity.t_rl, nr.t_rl),
            (tb.nonreciprocity.delta_t, nr.delta_t),
            (tb.currents.j_pa, single.j_pa),
            (tb.currents.j_pb, single.j_pb),
            (tb.currents.j_pd, single.j_pd),
        ] {
            off = off.max((a - b).abs());
        }
    }
    check(off <= 1e-15, || format!("backward-off deviation {off:e}"))?;

    let i_b = 0.018 * I_CR;
    let grid: Vec<f64> = (0..400).map(|k| I_CR * 1e-3 * 2e4f64.powf(k as f64 / 399.0)).collect();
    let dts = grid
        .iter()
        .map(|&i| {
            let f = BeamDrive::left(&p, i)?;
            let b = BeamDrive::right(&p, i_b)?;
            Ok(two_beam(&p, &f, &b)?.nonreciprocity.delta_t)
        })
        .collect::<isolator_core::Result<Vec<f64>>>()
        .map_err(e2s)?;
    let maxima: Vec<usize> = (1..dts.len() - 1).filter(|&k| dts[k] > dts[k - 1] && dts[k] >= dts[k + 1]).collect();
    check(maxima.len() == 1, || format!("{} interior maxima", maxima.len()))?;
    let peak = grid[maxima[0]];
    check(peak / i_b <= 3.0 && i_b / peak <= 3.0, || format!("peak at {} I_b", peak / i_b))?;

    let tb = two_beam(&p, &BeamDrive::left(&p, i_b).map_err(e2s)?, &BeamDrive::right(&p, i_b).map_err(e2s)?).map_err(e2s)?;
    let t_lr = two_beam_oracle(&p, i_b, i_b)?;
    let t_rl = two_beam_oracle(&p.swapped(), i_b, i_b)?;
    let dev = (tb.nonreciprocity.t_lr - t_lr).abs().max((tb.nonreciprocity.t_rl - t_rl).abs());
    check(dev <= 1e-8, || format!("time-domain oracle off by {dev:e}"))?;
    check((t_lr - 0.345403).abs() <= 1e-6 && (t_rl + 0.419064).abs() <= 1e-6, || format!("T_LR {t_lr}, T_RL {t_rl}"))?;
    Ok(format!(
        "backward-off {off:.1e}; single peak at I_in = {:.3} I_b; ODE oracle {dev:.1e} (T_LR {t_lr:.6}, T_RL {t_rl:.6})",
        peak / i_b
    ))
}

fn read(dir: &Path, name: &str) -> Result<Table, String> {
    Table::read_csv(&dir.join(name)).map_err(e2s)
}

fn col(t: &Table, name: &str) -> Result<Vec<f64>, String> {
    t.column(name).ok_or_else(|| format!("missing column {name}"))
}

/// Width in decades of the region where `y` exceeds half its maximum.
fn log_fwhm(x: &[f64], y: &[f64]) -> Result<f64, String> {
    let (k, ymax) = y.iter().copied().enumerate().fold((0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a });
    let half = 0.5 * ymax;
    let lo = (0..k).rev().find(|&j| y[j] < half).ok_or("no lower half-maximum crossing")?;
    let hi = (k..y.len()).find(|&j| y[j] < half).ok_or("no upper half-maximum crossing")?;
    Ok((x[hi] / x[lo]).log10())
}

fn c10_figures() -> Outcome {
    let dir = tempfile::tempdir().map_err(e2s)?;
    let status = Command::new(env!("CARGO_BIN_EXE_isolator"))
        .args(["figures", "--out"])
        .arg(dir.path())
        .status()
        .map_err(e2s)?;
    check(status.success(), || format!("figures exited with {status}"))?;
    let d = dir.path();

    let f2a = read(d, "fig2a.csv")?;
    let (t_lr, t_rl, dt) = (col(&f2a, "t_lr")?, col(&f2a, "t_rl")?, col(&f2a, "delta_t")?);
    check(f2a.rows.len() == 200, || "fig2a row count".into())?;
    check(t_lr.windows(2).all(|w| w[1] < w[0]) && t_rl.windows(2).all(|w| w[1] < w[0]), || {
        "fig2a transmissions not monotone decreasing".into()
    })?;
    let kmax = dt.iter().copied().enumerate().fold((0, f64::MIN), |a, b| if b.1 > a.1 { b } else { a }).0;
    check(kmax > 0 && kmax < dt.len() - 1 && dt[0] < dt[kmax] && dt[dt.len() - 1] < dt[kmax], || {
        "fig2a ΔT has no interior maximum".into()
    })?;

    let f2c = read(d, "fig2c.csv")?;
    let gr = col(&f2c, "gamma_r")?;
    for name in f2c.columns.iter().filter(|c| c.starts_with("delta_t_cr")) {
        let y = col(&f2c, name)?;
        let below = gr.iter().zip(&y).filter(|(g, _)| **g < 0.03 - 1e-9).all(|(_, v)| *v < 0.0);
        let above = gr.iter().zip(&y).filter(|(g, _)| **g > 0.03 + 1e-9).all(|(_, v)| *v > 0.0);
        check(below && above, || format!("fig2c {name} has no sign switch at Γ_R = Γ_L"))?;
    }

    let f3b = read(d, "fig3b.csv")?;
    let (x3, coh, inc) = (col(&f3b, "i_over_i0")?, col(&f3b, "delta_t_coh")?, col(&f3b, "delta_t_inc")?);
    check(x3.iter().zip(coh.iter().zip(&inc)).filter(|(x, _)| **x < 1.0 - 1e-9).all(|(_, (c, i))| c * i < 0.0), || {
        "fig3b parts share a sign below I0".into()
    })?;

    let f4 = read(d, "fig4.csv")?;
    let x4 = col(&f4, "i_over_icr")?;
    let w3 = log_fwhm(&x4, &col(&f4, "delta_t_d0")?)?;
    let w2 = log_fwhm(&x4, &col(&f4, "delta_t_0")?)?;
    check(w3 < w2, || format!("3LA band {w3:.2} decades not narrower than 2LA {w2:.2}"))?;

    for id in isolator_cli::figures::FigureId::ALL {
        check(d.join(id.file_name()).exists(), || format!("{} missing", id.file_name()))?;
    }
    Ok(format!("8 tables; fig2a monotone T and interior ΔT peak; fig2c sign switch; fig4 band {w3:.2} vs {w2:.2} decades"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("closed form vs ODE oracle", c1_ode_oracle),
        ("current conservation", c2_conservation),
        ("critical point", c3_critical_point),
        ("coherent/incoherent decomposition", c4_decomposition),
        ("incoherent zero crossing", c5_incoherent_zero),
        ("spectrum normalization", c6_spectrum),
        ("three-level closed form", c7_three_level_closed_form),
        ("three-level vs two-level nonreciprocity", c8_three_level_ratio),
        ("two-beam", c9_two_beam),
        ("figure reproduction", c10_figures),
    ];
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.2} s): {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.2} s): {detail}", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
