//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson rule on `[a, b]` with absolute error target `tol`.
///
/// Each panel is accepted once `|S_left + S_right - S| <= 15 tol_panel`, with
/// the Richardson correction applied. Fails with
/// [`Error::MaxDepthExceeded`] when a panel would need more than 48 bisections.
pub fn integrate_adaptive<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, tol: T) -> Result<T> {
    if !(a < b) {
        return Err(Error::Domain(format!("integration bounds must satisfy a < b, got [{a}, {b}]")));
    }
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    recurse(&mut f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn recurse<T: Real, F: FnMut(T) -> T>(
    f: &mut F,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: u32,
) -> Result<T> {
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let lm = (a + m) / two;
    let rm = (m + b) / two;
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(Error::Domain(format!("non-finite integrand on [{a}, {b}]")));
    }
    if delta.abs() <= T::lit(15.0) * tol {
        return Ok(left + right + delta / T::lit(15.0));
    }
    if depth == 0 || m <= a || m >= b {
        return Err(Error::MaxDepthExceeded { a: a.to_f64_lossy(), b: b.to_f64_lossy() });
    }
    let half = tol / two;
    Ok(recurse(f, a, m, fa, flm, fm, left, half, depth - 1)? + recurse(f, m, b, fm, frm, fb, right, half, depth - 1)?)
}

fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

/// `∫_{-∞}^{∞} f(x) dx` for integrands decaying at least like `1/x²`.
///
/// Uses `x = scale · tan θ` on `θ ∈ (-π/2, π/2)`, clipped `1e-9` short of the
/// poles, split into `panels` equal sub-intervals that are each integrated
/// adaptively with an equal share of `tol`.
pub fn integrate_real_line<T: Real, F: FnMut(T) -> T>(mut f: F, scale: T, tol: T, panels: usize) -> Result<T> {
    if !(scale > T::zero()) {
        return Err(Error::Domain(format!("scale must be positive, got {scale}")));
    }
    let panels = panels.max(2);
    let edge = T::FRAC_PI_2() - T::lit(1e-9);
    let width = (edge + edge) / T::lit(panels as f64);
    let share = tol / T::lit(panels as f64);
    let mut total = T::zero();
    for k in 0..panels {
        let lo = -edge + width * T::lit(k as f64);
        let hi = if k + 1 == panels { edge } else { lo + width };
        total += integrate_adaptive(
            |theta: T| {
                let c = theta.cos();
                f(scale * theta.tan()) * scale / (c * c)
            },
            lo,
            hi,
            share,
        )?;
    }
    Ok(total)
}
