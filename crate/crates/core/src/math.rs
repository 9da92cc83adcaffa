//! Elementary functions routed through `libm` so the crate stays `no_std`,
//! plus the overflow-safe hyperbolic combinations used throughout.

pub use libm::{
    atan, atan2, cos, cosh, erfc, exp, expm1, fabs as abs, hypot, log, sin, sinh, sqrt, tanh,
};

pub const PI: f64 = core::f64::consts::PI;
pub const TAU: f64 = core::f64::consts::TAU;

/// Below this argument the series branches are used.
pub const SERIES_CUTOFF: f64 = 1e-3;

/// `⌈v⌉` as a count; negative and NaN inputs give 0.
pub fn ceil_usize(v: f64) -> usize {
    libm::ceil(v) as usize
}

/// `sinh(y)/y`, continuous through `y = 0`.
pub fn sinhc(y: f64) -> f64 {
    let y2 = y * y;
    if abs(y) < SERIES_CUTOFF {
        1.0 + y2 / 6.0 * (1.0 + y2 / 20.0 * (1.0 + y2 / 42.0))
    } else {
        sinh(y) / y
    }
}

/// `sin(y)/y`, continuous through `y = 0`.
pub fn sinc(y: f64) -> f64 {
    let y2 = y * y;
    if abs(y) < SERIES_CUTOFF {
        1.0 - y2 / 6.0 * (1.0 - y2 / 20.0 * (1.0 - y2 / 42.0))
    } else {
        sin(y) / y
    }
}

/// `sinh(2y)/(2y) - 1` without cancellation near zero.
pub fn sinhc2_minus_one(y: f64) -> f64 {
    let z = 2.0 * y;
    if abs(z) < 0.1 {
        // z²/6 + z⁴/120 + z⁶/5040 + z⁸/362880
        let z2 = z * z;
        z2 / 6.0 * (1.0 + z2 / 20.0 * (1.0 + z2 / 42.0 * (1.0 + z2 / 72.0)))
    } else {
        sinh(z) / z - 1.0
    }
}

/// `1 / sinh²(y)` for `y > 0`, finite (possibly subnormal) for any large `y`.
pub fn csch_sq(y: f64) -> f64 {
    if y > 20.0 {
        let e = exp(-2.0 * y);
        4.0 * e / ((1.0 - e) * (1.0 - e))
    } else {
        let s = sinh(y);
        1.0 / (s * s)
    }
}

/// `1 / cosh(y)` without overflow.
pub fn sech(y: f64) -> f64 {
    let y = abs(y);
    let e = exp(-y);
    2.0 * e / (1.0 + e * e)
}

/// `coth(y)` for `y > 0`.
pub fn coth(y: f64) -> f64 {
    1.0 / tanh(y)
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a % TAU;
    if r <= -PI {
        r += TAU;
    } else if r > PI {
        r -= TAU;
    }
    r
}

/// Removes `2π` jumps from a sequence of phases sampled along a grid, in place.
pub fn unwrap_phases(phases: &mut [f64]) {
    let mut offset = 0.0;
    for i in 1..phases.len() {
        let raw = phases[i] + offset;
        let jump = raw - phases[i - 1];
        if jump > PI {
            offset -= TAU * libm::round(jump / TAU);
        } else if jump < -PI {
            offset += TAU * libm::round(-jump / TAU);
        }
        phases[i] += offset;
    }
}
