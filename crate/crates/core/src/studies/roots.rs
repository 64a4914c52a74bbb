//! Bracketing root finder and golden-section maximizer on fallible functions.

use crate::error::{Error, Result};

/// Bisection on `[lo, hi]`, which must bracket a sign change. Returns the
/// midpoint of a final bracket no wider than `tol`, so the function changes
/// sign across `root ± tol`.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(tol > 0.0) || !(hi > lo) {
        return Err(Error::Domain(format!("bad bracket [{lo}, {hi}] or tolerance {tol}")));
    }
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Domain(format!("no sign change on [{lo}, {hi}]")));
    }
    let lo_positive = f_lo > 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `rel_tol` times its midpoint.
pub fn golden_max<F>(mut f: F, mut lo: f64, mut hi: f64, rel_tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while (hi - lo) > rel_tol * (0.5 * (lo + hi)).abs() {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Scans `steps` equal cells of `[lo, hi]` for the first strict sign change
/// of `f` and refines it by bisection. `None` when the sign never flips.
pub fn first_sign_change<F>(mut f: F, lo: f64, hi: f64, steps: usize, tol: f64) -> Result<Option<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let steps = steps.max(1);
    let h = (hi - lo) / steps as f64;
    let mut prev_x = lo;
    let mut prev = f(lo)?;
    for i in 1..=steps {
        let x = if i == steps { hi } else { lo + h * i as f64 };
        let cur = f(x)?;
        if prev != 0.0 && cur != 0.0 && prev.signum() != cur.signum() {
            return bisect(&mut f, prev_x, x, tol).map(Some);
        }
        if cur != 0.0 {
            prev = cur;
            prev_x = x;
        }
    }
    Ok(None)
}
