//! Phase times: the stationary-phase transit time of the transmitted packet,
//! its opaque limit, the scattering time of the symmetric collision and the
//! dimensionless rates `t/τ`.

use alloc::vec::Vec;

use crate::barrier::{self, BarrierConfig, EvanescentWavenumber};
use crate::error::{Error, Result};
use crate::math::{coth, csch_sq, exp, log, sech, sinh, sinhc, sinhc2_minus_one, tanh};
use crate::numdiff::{self, Derivative};

/// Printed next to rate output whenever `n = 1` is requested.
pub const NON_COMMUTING_NOTE: &str = "standard rate at n = 1: lim(alpha->0) R_T(alpha, 1) = 4/3, \
while lim(alpha->0) R_T = 1 + 1/(2n) evaluated at n = 1 gives 3/2; the limits alpha->0 and n->1 do not commute";

/// Above this opacity the rates are evaluated with `e^{-2α}` factored out.
const LARGE_ALPHA: f64 = 20.0;

/// Parameters at the wavenumber where a phase derivative is taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeParams {
    pub k_eval: f64,
    /// `α = √(w² − k²)·L`
    pub alpha: f64,
    /// `n = k²/w²`
    pub n: f64,
    /// classical traversal time `τ = mL/k`
    pub tau: f64,
}

impl TimeParams {
    pub fn new(k_eval: f64, barrier: &BarrierConfig) -> Result<Self> {
        let rho = tunneling_rho(k_eval, barrier)?;
        let w = barrier.w();
        Ok(Self {
            k_eval,
            alpha: rho * barrier.width(),
            n: (k_eval / w) * (k_eval / w),
            tau: barrier.mass() * barrier.width() / k_eval,
        })
    }
}

fn tunneling_rho(k: f64, barrier: &BarrierConfig) -> Result<f64> {
    match barrier::rho(k, barrier)? {
        EvanescentWavenumber::Evanescent { rho, .. } if k > 0.0 => Ok(rho),
        _ => Err(Error::param("k", k, "must lie strictly inside (0, w)")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeMethod {
    /// closed form of the transmitted-packet transit time
    Standard,
    /// opaque limit `2m/(kρ)`
    Opaque,
    /// closed form of the symmetric-collision scattering time
    Scattering,
    /// `(m/k)·d(phase)/dk` by extrapolated central differences
    NumericalDerivative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseTimeResult {
    pub time: f64,
    pub method: TimeMethod,
    pub params: TimeParams,
}

/// Closed-form transit time side by side with `(m/k)·dΘ/dk`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardTransit {
    pub closed_form: PhaseTimeResult,
    pub finite_difference: PhaseTimeResult,
    pub derivative_error: f64,
}

impl StandardTransit {
    pub fn time(&self) -> f64 {
        self.closed_form.time
    }
}

/// Initial difference step that stays inside `(0, w)` and resolves the
/// `k`-scale `ρ/(kL)` on which `ρL` changes by order one.
fn derivative_step(k: f64, rho: f64, barrier: &BarrierConfig) -> f64 {
    let w = barrier.w();
    let mut h = 0.2 * k.min(w - k);
    if barrier.width() > 0.0 {
        h = h.min(0.2 * rho / (k * barrier.width()));
    }
    h
}

/// Transit time of the transmitted peak through the barrier,
///
/// ```text
/// t_T = (2mL / kα) · [w⁴ sinh α cosh α − (2k² − w²) k² α] / [4k²ρ² + w⁴ sinh² α],
/// ```
///
/// evaluated as `τ·R_T(α, n)`, with `(m/k)·dΘ/dk` attached as a cross-check.
pub fn standard_transit_time(k_eval: f64, barrier: &BarrierConfig) -> Result<StandardTransit> {
    let params = TimeParams::new(k_eval, barrier)?;
    let closed = params.tau * rate_standard(params.alpha, params.n)?;
    let rho = tunneling_rho(k_eval, barrier)?;
    let d = theta_derivative(k_eval, barrier, derivative_step(k_eval, rho, barrier));
    let m = barrier.mass();
    Ok(StandardTransit {
        closed_form: PhaseTimeResult {
            time: closed,
            method: TimeMethod::Standard,
            params,
        },
        finite_difference: PhaseTimeResult {
            time: m / k_eval * d.value,
            method: TimeMethod::NumericalDerivative,
            params,
        },
        derivative_error: m / k_eval * d.error,
    })
}

fn theta_derivative(k: f64, barrier: &BarrierConfig, h0: f64) -> Derivative {
    numdiff::richardson(
        |kk| barrier::theta_phase(kk, barrier).unwrap_or(f64::NAN),
        k,
        h0,
    )
}

/// Opaque-limit transit time `2m / (kρ)`; independent of `L`.
pub fn opaque_limit_time(k_eval: f64, barrier: &BarrierConfig) -> Result<PhaseTimeResult> {
    let params = TimeParams::new(k_eval, barrier)?;
    let rho = tunneling_rho(k_eval, barrier)?;
    Ok(PhaseTimeResult {
        time: 2.0 * barrier.mass() / (k_eval * rho),
        method: TimeMethod::Opaque,
        params,
    })
}

/// `G(α) = [sinh α cosh α − α] / sinh² α`.
pub fn g_aux(alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::param("alpha", alpha, "must be non-negative"));
    }
    Ok(if alpha < 1e-3 {
        alpha * g_over_alpha_series(alpha)
    } else if alpha > LARGE_ALPHA {
        coth(alpha) - alpha * csch_sq(alpha)
    } else {
        let s = sinh(alpha);
        alpha * sinhc2_minus_one(alpha) / (s * s)
    })
}

fn g_over_alpha_series(alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    2.0 / 3.0 - a2 * (4.0 / 45.0 - a2 * (4.0 / 315.0 - a2 * 8.0 / 4725.0))
}

/// `G(α)/α`, tending to 2/3 as `α → 0`.
pub fn g_aux_over_alpha(alpha: f64) -> Result<f64> {
    if alpha < 1e-3 {
        if !(alpha >= 0.0) {
            return Err(Error::param("alpha", alpha, "must be non-negative"));
        }
        Ok(g_over_alpha_series(alpha))
    } else {
        Ok(g_aux(alpha)? / alpha)
    }
}

/// Transit time with the spectrum maximum pushed to the barrier top,
/// `(2mL/(wα))·G(α)`; grows as `2m/(w√(w² − k²))` for `α ≫ 1` and tends to
/// `4mL/(3w)` for `α → 0`.
pub fn filter_limit_time(alpha: f64, barrier: &BarrierConfig) -> Result<f64> {
    let pre = 2.0 * barrier.mass() * barrier.width() / barrier.w();
    Ok(pre * g_aux_over_alpha(alpha)?)
}

/// Scattering time of the symmetric collision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringTime {
    /// `−(m/k₀)·dφ/dk` by extrapolated central differences; the binding value.
    pub numerical: PhaseTimeResult,
    pub derivative_error: f64,
    /// `τ·R^φ(α, n) = (2mL/(k₀α))·(nα + sinh α)/(2n − 1 + cosh α)`
    pub closed_form: f64,
    /// `(2mL/(k₀α))·(w² sinh α − αk₀²)/(2k₀² − w² + w² cosh² α)`, the uncorrected form kept for comparison.
    pub printed: f64,
}

impl ScatteringTime {
    pub fn time(&self) -> f64 {
        self.numerical.time
    }

    /// Relative gap between the closed form and the numerical derivative.
    pub fn closed_form_discrepancy(&self) -> f64 {
        relative_gap(self.closed_form, self.numerical.time)
    }

    pub fn printed_discrepancy(&self) -> f64 {
        relative_gap(self.printed, self.numerical.time)
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

/// Delay of the recomposed packet, `−(m/k₀)·dφ/dk` at `k₀`.
///
/// `R_B + T_B = exp(−i[kL + φ])`, so the outgoing peak lags the mirror image
/// of the incident one by `−(m/k₀)·dφ/dk` (positive, since `dφ/dk < 0` below
/// the barrier top).
pub fn scattering_phase_time(k0: f64, barrier: &BarrierConfig) -> Result<ScatteringTime> {
    scattering_phase_time_with_step(k0, barrier, None)
}

/// As [`scattering_phase_time`], starting the extrapolation from step `h0`.
pub fn scattering_phase_time_with_step(
    k0: f64,
    barrier: &BarrierConfig,
    h0: Option<f64>,
) -> Result<ScatteringTime> {
    let params = TimeParams::new(k0, barrier)?;
    let rho = tunneling_rho(k0, barrier)?;
    let m = barrier.mass();
    let (numerical, err) = if barrier.width() == 0.0 {
        (0.0, 0.0)
    } else {
        let h = h0.unwrap_or_else(|| derivative_step(k0, rho, barrier));
        let d = numdiff::richardson(
            |kk| barrier::phi_phase(kk, barrier).unwrap_or(f64::NAN),
            k0,
            h,
        );
        (-m / k0 * d.value, m / k0 * d.error)
    };
    let closed_form = params.tau * rate_scattering(params.alpha, params.n)?;
    Ok(ScatteringTime {
        numerical: PhaseTimeResult {
            time: numerical,
            method: TimeMethod::NumericalDerivative,
            params,
        },
        derivative_error: err,
        closed_form,
        printed: printed_scattering_time(k0, barrier, &params),
    })
}

fn printed_scattering_time(k0: f64, barrier: &BarrierConfig, p: &TimeParams) -> f64 {
    if barrier.width() == 0.0 {
        return 0.0;
    }
    let w2 = barrier.w() * barrier.w();
    let a = p.alpha;
    let ch = crate::math::cosh(a);
    2.0 * barrier.mass() * barrier.width() / (k0 * a) * (w2 * sinh(a) - a * k0 * k0)
        / (2.0 * k0 * k0 - w2 + w2 * ch * ch)
}

fn check_rate_args(alpha: f64, n: f64) -> Result<()> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::param(
            "alpha",
            alpha,
            "must be non-negative and finite",
        ));
    }
    if !(n > 0.0 && n <= 1.0) {
        return Err(Error::param("n", n, "must lie in (0, 1]"));
    }
    Ok(())
}

/// `R_T(α) = t_T/τ = (2/α)·[cosh α sinh α − αn(2n − 1)] / [4n(1 − n) + sinh² α]`.
///
/// At `n = 1, α = 0` returns the `α → 0` limit 4/3 (see [`NON_COMMUTING_NOTE`]).
pub fn rate_standard(alpha: f64, n: f64) -> Result<f64> {
    check_rate_args(alpha, n)?;
    if alpha > LARGE_ALPHA {
        let c2 = csch_sq(alpha);
        return Ok(
            2.0 / alpha * (coth(alpha) - alpha * n * (2.0 * n - 1.0) * c2)
                / (4.0 * n * (1.0 - n) * c2 + 1.0),
        );
    }
    // (2/α)·[sinh(2α)/2 − αn(2n−1)] = 2[(1 − n)(1 + 2n) + (sinh(2α)/(2α) − 1)]
    let num = (1.0 - n) * (1.0 + 2.0 * n) + sinhc2_minus_one(alpha);
    let s = sinh(alpha);
    let den = 4.0 * n * (1.0 - n) + s * s;
    if den == 0.0 {
        return Ok(4.0 / 3.0);
    }
    if n == 1.0 && alpha < 1e-3 {
        // both numerator and denominator are O(α²)
        let a2 = alpha * alpha;
        return Ok(4.0 / 3.0 * (1.0 + a2 / 5.0 + a2 * a2 / 105.0)
            / (1.0 + a2 / 3.0 + 2.0 * a2 * a2 / 45.0));
    }
    Ok(2.0 * num / den)
}

/// `R^φ(α) = t^φ/τ = (2/α)·(nα + sinh α) / (2n − 1 + cosh α)`.
pub fn rate_scattering(alpha: f64, n: f64) -> Result<f64> {
    check_rate_args(alpha, n)?;
    if alpha > LARGE_ALPHA {
        let sh = sech(alpha);
        return Ok(2.0 / alpha * (n * alpha * sh + tanh(alpha)) / ((2.0 * n - 1.0) * sh + 1.0));
    }
    Ok(2.0 * (n + sinhc(alpha)) / (2.0 * n - 1.0 + crate::math::cosh(alpha)))
}

/// `α → 0` limits of both rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateLimits {
    pub n: f64,
    /// `1 + 1/(2n)`
    pub standard: f64,
    /// `1 + 1/n`
    pub scattering: f64,
    /// `Some(4/3)` at `n = 1`, where the limits do not commute.
    pub standard_at_unit_n: Option<f64>,
}

pub fn rate_limits(n: f64) -> Result<RateLimits> {
    check_rate_args(0.0, n)?;
    Ok(RateLimits {
        n,
        standard: 1.0 + 0.5 / n,
        scattering: 1.0 + 1.0 / n,
        standard_at_unit_n: (n == 1.0).then_some(4.0 / 3.0),
    })
}

/// One sample of the rate curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRow {
    pub alpha: f64,
    pub n: f64,
    pub standard: f64,
    pub scattering: f64,
}

/// Both rate curves for every `n` on the shared `α` grid, `n`-major.
pub fn fig3a_curves(n_values: &[f64], alpha_grid: &[f64]) -> Result<Vec<RateRow>> {
    if let Some(&a) = alpha_grid.iter().find(|&&a| !(a > 0.0)) {
        return Err(Error::param("alpha", a, "grid must be positive"));
    }
    let mut rows = Vec::with_capacity(n_values.len() * alpha_grid.len());
    for &n in n_values {
        for &alpha in alpha_grid {
            rows.push(RateRow {
                alpha,
                n,
                standard: rate_standard(alpha, n)?,
                scattering: rate_scattering(alpha, n)?,
            });
        }
    }
    Ok(rows)
}

/// `steps` logarithmically spaced points from `min` to `max` inclusive.
pub fn log_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max > min) {
        return Err(Error::param("alpha-min", min, "need 0 < min < max"));
    }
    if steps < 2 {
        return Err(Error::param(
            "alpha-steps",
            steps as f64,
            "need at least two points",
        ));
    }
    let (lo, hi) = (log(min), log(max));
    Ok((0..steps)
        .map(|i| {
            if i == 0 {
                min
            } else if i == steps - 1 {
                max
            } else {
                exp(lo + (hi - lo) * i as f64 / (steps - 1) as f64)
            }
        })
        .collect())
}
