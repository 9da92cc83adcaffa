//! Central differences with Richardson extrapolation (Ridders' tableau).

/// A derivative estimate together with the extrapolation's own error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    pub error: f64,
}

pub fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Richardson-extrapolated central difference starting from step `h0`.
///
/// The step shrinks by a factor 1.4 per row and the full tableau is built;
/// the entry with the smallest error estimate is returned. Stopping at the
/// first row whose diagonal grows can return an early entry whose small
/// error estimate is a coincidence.
pub fn richardson<F: Fn(f64) -> f64>(f: F, x: f64, h0: f64) -> Derivative {
    const SHRINK: f64 = 1.4;
    const SHRINK2: f64 = SHRINK * SHRINK;
    const ROWS: usize = 12;
    let mut table = [[0.0f64; ROWS]; ROWS];
    let mut h = h0;
    table[0][0] = central_difference(&f, x, h);
    let mut best = Derivative {
        value: table[0][0],
        error: f64::INFINITY,
    };
    for i in 1..ROWS {
        h /= SHRINK;
        table[0][i] = central_difference(&f, x, h);
        let mut fac = SHRINK2;
        for j in 1..=i {
            table[j][i] = (table[j - 1][i] * fac - table[j - 1][i - 1]) / (fac - 1.0);
            fac *= SHRINK2;
            let err = (table[j][i] - table[j - 1][i])
                .abs()
                .max((table[j][i] - table[j - 1][i - 1]).abs());
            if err <= best.error {
                best = Derivative {
                    value: table[j][i],
                    error: err,
                };
            }
        }
    }
    best
}
