//! Bracketed one-dimensional maximization.

use crate::math::sqrt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `xtol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, xtol: f64) -> Maximum {
    let inv_phi = (sqrt(5.0) - 1.0) / 2.0;
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while b - a > xtol && iterations < 200 {
        if fc >= fd {
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
        iterations += 1;
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    // the midpoint can lose to a probe on a flat top
    let (x, value) = [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .fold((x, fx), |acc, p| if p.1 > acc.1 { p } else { acc });
    Maximum {
        x,
        value,
        iterations,
    }
}
