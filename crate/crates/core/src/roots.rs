//! Scalar root finding and maximisation helpers.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub x: f64,
    pub iterations: usize,
}

/// Newton's method kept inside a bracket `[lo, hi]` known to contain a root
/// of `f`, which must be increasing there when `increasing` is set and
/// decreasing otherwise.
///
/// `f` returns the value and derivative. A Newton step that leaves the
/// bracket is pulled back inside it; after three such steps in a row the
/// iteration bisects instead.
pub fn newton_bracketed<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    increasing: bool,
    x0: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Root>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut x = x0.clamp(a, b);
    let mut clamps = 0;
    for it in 1..=max_iter {
        let (fx, dfx) = f(x)?;
        if !fx.is_finite() {
            return Err(Error::NumericFailure(format!("root function is {fx} at {x}")));
        }
        if fx == 0.0 {
            return Ok(Root { x, iterations: it });
        }
        if (fx < 0.0) == increasing {
            a = x;
        } else {
            b = x;
        }
        let mut next = x - fx / dfx;
        if next.is_finite() && next > a && next < b {
            clamps = 0;
        } else {
            clamps += 1;
            next = if clamps >= 3 || !next.is_finite() {
                clamps = 0;
                0.5 * (a + b)
            } else if next <= a {
                a + 0.25 * (b - a)
            } else {
                b - 0.25 * (b - a)
            };
        }
        if (next - x).abs() <= tol || b - a <= tol {
            return Ok(Root { x: next, iterations: it });
        }
        x = next;
    }
    Err(Error::NoConvergence {
        what: "Newton iteration",
        iterations: max_iter,
        last_change: b - a,
    })
}

/// Scans `samples` evenly spaced points of `[lo, hi)` and returns the first
/// interval on which `f` changes sign, or `Some((lo, lo))` when `f(lo)` is
/// within `zero_tol` of zero.
pub fn first_sign_change<F>(mut f: F, lo: f64, hi: f64, samples: usize, zero_tol: f64) -> Result<Option<(f64, f64)>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let f0 = f(lo)?;
    if f0.abs() <= zero_tol {
        return Ok(Some((lo, lo)));
    }
    let mut prev = lo;
    for i in 1..samples {
        let t = lo + (hi - lo) * i as f64 / samples as f64;
        let ft = f(t)?;
        if ft.abs() <= zero_tol {
            // treat as a crossing just below t
            return Ok(Some((prev, t)));
        }
        if (ft < 0.0) != (f0 < 0.0) {
            return Ok(Some((prev, t)));
        }
        prev = t;
    }
    Ok(None)
}

/// Golden-section search for a maximum of a unimodal function on `[a, b]`.
pub fn golden_max<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Bisection on a monotone function for `f(x) = target` inside `[lo, hi]`.
pub fn bisect_monotone<F>(mut f: F, lo: f64, hi: f64, target: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let up = f(b)? >= f(a)?;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol {
            return Ok(m);
        }
        let below = f(m)? < target;
        if below == up {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}
