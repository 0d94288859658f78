//! One-dimensional root finding and extremum search.

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_ROOT_ITER: usize = 500;

/// Bracketing root finder: Illinois-modified regula falsi that falls back to
/// bisection whenever a step fails to halve the bracket.
///
/// Stops on an exact zero or once the bracket is narrower than `tol`.
pub fn find_root<T: Real, F: FnMut(T) -> T>(mut f: F, lo: T, hi: T, tol: T) -> Result<T> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if !(fa * fb < T::zero()) {
        return Err(Error::NoSignChange { lo: a.to_f64_lossy(), hi: b.to_f64_lossy() });
    }
    let two = T::lit(2.0);
    // side that was retained on the previous step: -1 = a, +1 = b
    let mut retained = 0i8;
    let mut bisect_next = false;
    for _ in 0..MAX_ROOT_ITER {
        let width = b - a;
        if width <= tol {
            break;
        }
        let x = if bisect_next {
            a + width / two
        } else {
            let s = b - fb * (b - a) / (fb - fa);
            if s > a && s < b {
                s
            } else {
                a + width / two
            }
        };
        let fx = f(x);
        if fx == T::zero() {
            return Ok(x);
        }
        if fa * fx < T::zero() {
            b = x;
            fb = fx;
            if retained == -1 {
                fa /= two;
            }
            retained = -1;
        } else {
            a = x;
            fa = fx;
            if retained == 1 {
                fb /= two;
            }
            retained = 1;
        }
        bisect_next = (b - a) > width / two;
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
///
/// Converges to the maximizer when `f` is unimodal on the bracket; otherwise
/// it returns the best point the search visited. `tol` bounds the final
/// bracket width.
pub fn maximize_scalar<T: Real, F: FnMut(T) -> T>(mut f: F, lo: T, hi: T, tol: T) -> (T, T) {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let inv_phi = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    let tol = tol.max(T::epsilon() * (a.abs() + b.abs()));
    for _ in 0..400 {
        if b - a <= tol {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
            if f1 > best.1 {
                best = (x1, f1);
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
            if f2 > best.1 {
                best = (x2, f2);
            }
        }
    }
    let mid = (a + b) / T::lit(2.0);
    let fm = f(mid);
    if fm >= best.1 {
        (mid, fm)
    } else {
        best
    }
}

/// Maximizes `f` over a sampled grid, then refines by golden section on the
/// neighbouring cells of the best sample.
pub fn maximize_on_grid<T: Real, F: FnMut(T) -> T>(mut f: F, grid: &[T], tol: T) -> Option<(T, T)> {
    let values: Vec<T> = grid.iter().map(|&x| f(x)).collect();
    let (k, _) = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .fold(None, |best: Option<(usize, T)>, (i, &v)| match best {
            Some((_, bv)) if bv >= v => best,
            _ => Some((i, v)),
        })?;
    let lo = grid[k.saturating_sub(1)];
    let hi = grid[(k + 1).min(grid.len() - 1)];
    if lo == hi {
        return Some((grid[k], values[k]));
    }
    let refined = maximize_scalar(&mut f, lo, hi, tol);
    Some(if refined.1 >= values[k] { refined } else { (grid[k], values[k]) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        let r = find_root(|x: f64| x - 1.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sqrt_two() {
        let r = find_root(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn no_sign_change() {
        assert!(matches!(find_root(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12), Err(Error::NoSignChange { .. })));
    }

    #[test]
    fn flat_then_steep_root_converges() {
        // regula falsi alone stagnates on this shape
        let r = find_root(|x: f64| x.powi(9) - 1e-9, 0.0, 4.0, 1e-13).unwrap();
        assert!((r - 1e-1).abs() < 1e-12);
    }

    #[test]
    fn parabola_maximum() {
        let (x, fx) = maximize_scalar(|x: f64| -(x - 1.0).powi(2), 0.0, 2.0, 1e-10);
        assert!((x - 1.0).abs() < 1e-8);
        assert!(fx <= 0.0 && fx > -1e-15);
    }

    #[test]
    fn constant_function() {
        let (x, fx) = maximize_scalar(|_: f64| 3.5, -1.0, 4.0, 1e-8);
        assert!((-1.0..=4.0).contains(&x));
        assert_eq!(fx, 3.5);
    }

    #[test]
    fn grid_refinement() {
        let grid: Vec<f64> = (0..=20).map(|k| k as f64 * 0.5).collect();
        let (x, _) = maximize_on_grid(|x: f64| -(x - 3.3).powi(2), &grid, 1e-10).unwrap();
        assert!((x - 3.3).abs() < 1e-7);
        assert!(maximize_on_grid(|x: f64| x, &[], 1e-3).is_none());
    }
}
