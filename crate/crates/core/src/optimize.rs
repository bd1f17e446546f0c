//! Deterministic one-dimensional search helpers and parameter grids.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Location and value of a maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Stops once the bracket is narrower than `tol` or after `max_iter`
/// iterations. The endpoints are also compared, so a monotone `f` yields
/// the better end.
pub fn golden_section_max<F>(f: F, lo: f64, hi: f64, tol: f64, max_iter: usize) -> Result<Maximum>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::param(
            "bracket",
            format!("need lo < hi, got [{lo}, {hi}]"),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("must be positive, got {tol}")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..max_iter {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mut best = if fc >= fd {
        Maximum { x: c, value: fc }
    } else {
        Maximum { x: d, value: fd }
    };
    for x in [lo, hi] {
        let v = f(x);
        if v > best.value {
            best = Maximum { x, value: v };
        }
    }
    Ok(best)
}

/// Golden-section search in log x; `tol` is relative.
pub fn golden_section_max_log<F>(
    f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Maximum>
where
    F: Fn(f64) -> f64,
{
    if !(lo > 0.0) {
        return Err(Error::param(
            "bracket",
            format!("log search needs lo > 0, got {lo}"),
        ));
    }
    let m = golden_section_max(|u| f(u.exp()), lo.ln(), hi.ln(), tol, max_iter)?;
    Ok(Maximum {
        x: m.x.exp(),
        value: m.value,
    })
}

/// `n` points from `lo` to `hi` inclusive, evenly spaced.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    check_grid(lo, hi, n)?;
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect())
}

/// `n` points from `lo` to `hi` inclusive, evenly spaced in log.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    check_grid(lo, hi, n)?;
    if !(lo > 0.0) {
        return Err(Error::param(
            "grid",
            format!("log grid needs min > 0, got {lo}"),
        ));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + step * i as f64).exp(),
        })
        .collect())
}

fn check_grid(lo: f64, hi: f64, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::param("points", format!("need at least 2, got {n}")));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::param(
            "grid",
            format!("need min < max, got [{lo}, {hi}]"),
        ));
    }
    Ok(())
}

/// Index of the largest entry; the first one wins ties.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        match best {
            Some(j) if values[j] >= *v => {}
            _ if v.is_nan() => {}
            _ => best = Some(i),
        }
    }
    best
}
