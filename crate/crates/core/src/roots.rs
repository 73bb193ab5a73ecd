//! Bracketed root finding: bisection down to a coarse width, then a
//! safeguarded Newton polish.

use crate::error::{Error, Result};

/// Root found on a bracket, with the residual `f(root)`.
#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub bracket: (f64, f64),
}

pub fn bisect_newton<F, D>(f: F, df: D, lo: f64, hi: f64, coarse: f64, tol: f64) -> Result<Root>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(Root {
            x: a,
            residual: 0.0,
            bracket: (lo, hi),
        });
    }
    if fb == 0.0 {
        return Ok(Root {
            x: b,
            residual: 0.0,
            bracket: (lo, hi),
        });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket { lo, hi });
    }
    while b - a > coarse {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Ok(Root {
                x: m,
                residual: 0.0,
                bracket: (lo, hi),
            });
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..50 {
        let fx = f(x);
        let d = df(x);
        if fx == 0.0 || d == 0.0 {
            break;
        }
        let mut next = x - fx / d;
        if !(next > a && next < b) {
            next = 0.5 * (a + b);
        }
        if f(next).signum() == fa.signum() {
            a = next;
        } else {
            b = next;
        }
        let step = (next - x).abs();
        x = next;
        if step <= tol * x.abs().max(1.0) {
            break;
        }
    }
    Ok(Root {
        x,
        residual: f(x),
        bracket: (lo, hi),
    })
}

/// Golden-section maximisation of a unimodal function on `[lo, hi]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
