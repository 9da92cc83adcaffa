//! The transmission-modulated momentum distribution `g(k − k₀)·|T(k, L)|`.

use alloc::vec::Vec;

use crate::barrier::{self, BarrierConfig};
use crate::error::{Error, Result};
use crate::math::{ceil_usize, erfc, exp, sqrt, PI};
use crate::optimize::golden_section_max;
use crate::quadrature::GaussLegendre;
use crate::wavepacket::{self, PacketField, QuadratureSpec};

/// Probability mass of `g²` allowed outside `[0, w]` before a warning is raised.
pub const CONTAINMENT_LIMIT: f64 = 1e-3;

/// Scan density used to seed the maximization.
pub const SCAN_POINTS: usize = 4096;

/// Upper integration limit above the centre, in units of `1/a`, for uncut spectra.
pub const UNCUT_SPAN: f64 = 8.0;

/// Sharp truncation of the spectrum at `k_cut = (1 − δ)·w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub delta: f64,
    pub w: f64,
}

impl Cutoff {
    pub fn k_cut(&self) -> f64 {
        (1.0 - self.delta) * self.w
    }
}

/// `g(k − k₀) = (a²/2π)^{1/4} exp[−a²(k − k₀)²/4]`, optionally truncated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpectrum {
    k0: f64,
    a: f64,
    cutoff: Option<Cutoff>,
}

impl GaussianSpectrum {
    pub fn new(k0: f64, a: f64) -> Result<Self> {
        if !(k0 > 0.0 && k0.is_finite()) {
            return Err(Error::param("k0", k0, "must be positive and finite"));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::param("a", a, "must be positive and finite"));
        }
        Ok(Self {
            k0,
            a,
            cutoff: None,
        })
    }

    /// Truncates the support to `[0, (1 − δ)w]`.
    pub fn with_cutoff(self, delta: f64, w: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::param("delta", delta, "must lie in [0, 1)"));
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::param("w", w, "must be positive and finite"));
        }
        Ok(Self {
            cutoff: Some(Cutoff { delta, w }),
            ..self
        })
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn cutoff(&self) -> Option<Cutoff> {
        self.cutoff
    }

    pub fn amplitude(&self, k: f64) -> f64 {
        let d = k - self.k0;
        sqrt(self.a / sqrt(2.0 * PI)) * exp(-0.25 * self.a * self.a * d * d)
    }

    /// `g′/g = −a²(k − k₀)/2`.
    pub fn log_derivative(&self, k: f64) -> f64 {
        -0.5 * self.a * self.a * (k - self.k0)
    }

    /// Integration interval in `k`: `[0, k_cut]`, or `[0, k₀ + 8/a]` without a cutoff.
    pub fn support(&self) -> (f64, f64) {
        match self.cutoff {
            Some(c) => (0.0, c.k_cut()),
            None => (0.0, self.k0 + UNCUT_SPAN / self.a),
        }
    }

    /// Mass of `g²` (a normal density with standard deviation `1/a`) outside `[lo, hi]`.
    pub fn mass_outside(&self, lo: f64, hi: f64) -> f64 {
        let s = self.a / core::f64::consts::SQRT_2;
        0.5 * erfc((self.k0 - lo) * s) + 0.5 * erfc((hi - self.k0) * s)
    }

    /// Containment of `g²` in the tunneling window `[0, w]`.
    pub fn containment(&self, w: f64) -> Containment {
        let outside = self.mass_outside(0.0, w);
        Containment {
            outside_mass: outside,
            warning: outside > CONTAINMENT_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Containment {
    pub outside_mass: f64,
    pub warning: bool,
}

/// `g(k − k₀)·|T(k, L)|` for `0 < k ≤ w`.
pub fn modulated_spectrum(
    k: f64,
    spectrum: &GaussianSpectrum,
    barrier: &BarrierConfig,
) -> Result<f64> {
    if !(k > 0.0 && k <= barrier.w()) {
        return Err(Error::param("k", k, "must lie in (0, w]"));
    }
    Ok(spectrum.amplitude(k) * barrier::transmission_modulus(k, barrier)?)
}

fn modulated(k: f64, spectrum: &GaussianSpectrum, barrier: &BarrierConfig) -> f64 {
    modulated_spectrum(k, spectrum, barrier).unwrap_or(f64::NAN)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmaxResult {
    /// Global maximizer on `(0, w]`.
    pub k_max: f64,
    /// The global maximum sits at `k = w`.
    pub boundary_dominated: bool,
    /// Best interior local maximum, if any.
    pub interior: Option<f64>,
    pub value_at_kmax: f64,
    pub value_at_w: f64,
    pub containment: Containment,
}

/// Global maximum of the modulated spectrum on `(0, w]`: a dense scan followed
/// by golden-section refinement of every interior local maximum.
pub fn find_kmax(spectrum: &GaussianSpectrum, barrier: &BarrierConfig) -> Result<KmaxResult> {
    let w = barrier.w();
    let containment = spectrum.containment(w);
    let n = SCAN_POINTS;
    let dk = w / n as f64;
    let mut values = Vec::with_capacity(n);
    for i in 1..=n {
        values.push(modulated_spectrum(dk * i as f64, spectrum, barrier)?);
    }
    let value_at_w = values[n - 1];
    let mut best: Option<(f64, f64)> = None;
    for i in 1..n - 1 {
        if values[i] >= values[i - 1] && values[i] > values[i + 1] {
            let lo = dk * i as f64;
            let hi = dk * (i + 2) as f64;
            let m = golden_section_max(|k| modulated(k, spectrum, barrier), lo, hi, 1e-11);
            if best.is_none_or(|(_, v)| m.value > v) {
                best = Some((m.x, m.value));
            }
        }
    }
    let (k_max, value_at_kmax, boundary_dominated) = match best {
        Some((k, v)) if v >= value_at_w => (k, v, false),
        _ => (w, value_at_w, true),
    };
    Ok(KmaxResult {
        k_max,
        boundary_dominated,
        interior: best.map(|b| b.0),
        value_at_kmax,
        value_at_w,
        containment,
    })
}

/// Default `w·a` columns of the `k_max` table.
pub const TABLE1_WA: [f64; 7] = [1.5, 2.0, 4.0, 6.0, 8.0, 10.0, 20.0];

/// Default `L/a` rows of the `k_max` table: `0, 0.1, …, 1.0`.
pub fn table1_default_la() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Cell {
    pub w_a: f64,
    pub l_a: f64,
    pub kmax_a: f64,
    pub boundary_dominated: bool,
    pub containment_warning: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1 {
    pub k0_a: f64,
    pub w_a: Vec<f64>,
    pub l_a: Vec<f64>,
    /// Row-major in `L/a`, one entry per `(L/a, w·a)` pair.
    pub cells: Vec<Table1Cell>,
}

impl Table1 {
    pub fn cell(&self, w_a: f64, l_a: f64) -> Option<&Table1Cell> {
        self.cells
            .iter()
            .find(|c| (c.w_a - w_a).abs() < 1e-12 && (c.l_a - l_a).abs() < 1e-12)
    }
}

/// `k_max·a` on the `(L/a) × (w·a)` grid with `a = 1`, `m = 1`.
pub fn table1_generate(k0_a: f64, wa_list: &[f64], la_list: &[f64]) -> Result<Table1> {
    if wa_list.is_empty() {
        return Err(Error::InvalidGrid("w_a list is empty"));
    }
    if la_list.is_empty() {
        return Err(Error::InvalidGrid("L_a list is empty"));
    }
    let spectrum = GaussianSpectrum::new(k0_a, 1.0)?;
    let mut cells = Vec::with_capacity(wa_list.len() * la_list.len());
    for &l_a in la_list {
        for &w_a in wa_list {
            if !(w_a > k0_a) {
                return Err(Error::param("w_a", w_a, "must exceed k0_a"));
            }
            let b = BarrierConfig::from_wavenumber(w_a, l_a)?;
            let r = find_kmax(&spectrum, &b)?;
            cells.push(Table1Cell {
                w_a,
                l_a,
                kmax_a: r.k_max,
                boundary_dominated: r.boundary_dominated,
                containment_warning: r.containment.warning,
            });
        }
    }
    Ok(Table1 {
        k0_a,
        w_a: wa_list.to_vec(),
        l_a: la_list.to_vec(),
        cells,
    })
}

/// `lim_{k→w} |T|′/|T| = (wL²/4)(1 + w²L²/3)/(1 + w²L²/4)`.
pub fn edge_log_slope_limit(w: f64, width: f64) -> f64 {
    let wl2 = (w * width) * (w * width);
    0.25 * w * width * width * (1.0 + wl2 / 3.0) / (1.0 + 0.25 * wl2)
}

/// The same limit with `w` in place of `w²` inside the brackets (uncorrected form).
pub fn edge_log_slope_printed(w: f64, width: f64) -> f64 {
    let wl = w * width * width;
    0.25 * wl * (1.0 + wl / 3.0) / (1.0 + 0.25 * wl)
}

/// `d/dk ln[g(k − k₀)|T(k, L)|]` at `k = w` from one-sided differences below `w`,
/// extrapolated in the step.
pub fn edge_log_slope_fd(spectrum: &GaussianSpectrum, barrier: &BarrierConfig) -> Result<f64> {
    let w = barrier.w();
    let f =
        |k: f64| -> Result<f64> { Ok(crate::math::log(modulated_spectrum(k, spectrum, barrier)?)) };
    let fw = f(w)?;
    let mut h = 1e-2 * w;
    let mut table: Vec<f64> = Vec::new();
    for _ in 0..6 {
        let mut row = (fw - f(w - h)?) / h;
        // Richardson on an O(h) error series
        let mut factor = 2.0;
        for prev in table.iter_mut() {
            let next = (factor * row - *prev) / (factor - 1.0);
            *prev = row;
            row = next;
            factor *= 2.0;
        }
        table.push(row);
        h *= 0.5;
    }
    Ok(*table.last().unwrap_or(&f64::NAN))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionReport {
    pub k0: f64,
    pub a: f64,
    pub w: f64,
    /// Smallest `L` with a positive slope of `g·|T|` at `k = w`.
    pub l_numeric: f64,
    /// `√(3/2)·a·(1 − k₀/w)`
    pub l_literal: f64,
    /// `√(3/2)·a·√(1 − k₀/w)`
    pub l_rederived: f64,
    /// `−g′/g` at `k = w`, i.e. `a²(w − k₀)/2`.
    pub gaussian_log_slope: f64,
    /// One-sided difference slope of `ln(g|T|)` at `k = w` slightly below and above `L_numeric`.
    pub fd_slope_below: f64,
    pub fd_slope_above: f64,
    /// Limit of `|T|′/|T|` at `L_numeric`, rederived and in the uncorrected form.
    pub limit_at_onset: f64,
    pub printed_limit_at_onset: f64,
}

/// Width at which `g·|T|` acquires a local maximum at `k = w`.
pub fn distortion_onset(spectrum: &GaussianSpectrum, w: f64) -> Result<DistortionReport> {
    let (k0, a) = (spectrum.k0(), spectrum.a());
    if !(k0 < w) {
        return Err(Error::param("w", w, "must exceed k0"));
    }
    let gaussian_log_slope = -spectrum.log_derivative(w);
    let excess = |l: f64| edge_log_slope_limit(w, l) - gaussian_log_slope;
    // the limit is increasing in L and vanishes at L = 0
    let mut hi = a;
    while excess(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e12 * a {
            return Err(Error::Convergence {
                what: "distortion onset bracket",
                achieved: hi,
                tolerance: 1e12 * a,
            });
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let l_numeric = 0.5 * (lo + hi);
    let c = sqrt(1.5) * a;
    let slope_at = |l: f64| -> Result<f64> {
        edge_log_slope_fd(spectrum, &BarrierConfig::from_wavenumber(w, l)?)
    };
    Ok(DistortionReport {
        k0,
        a,
        w,
        l_numeric,
        l_literal: c * (1.0 - k0 / w),
        l_rederived: c * sqrt(1.0 - k0 / w),
        gaussian_log_slope,
        fd_slope_below: slope_at(0.99 * l_numeric)?,
        fd_slope_above: slope_at(1.01 * l_numeric)?,
        limit_at_onset: edge_log_slope_limit(w, l_numeric),
        printed_limit_at_onset: edge_log_slope_printed(w, l_numeric),
    })
}

/// Transit time of a spectrum cut off at `(1 − δ)w` in the opaque limit, `2m/(wδ)`.
pub fn cutoff_time_estimate(delta: f64, barrier: &BarrierConfig) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::Degenerate("cutoff time diverges at delta = 0"));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::param("delta", delta, "must lie in (0, 1]"));
    }
    Ok(2.0 * barrier.mass() / (barrier.w() * delta))
}

/// `ψ(x, 0)` of the (possibly truncated) free spectrum on `x_grid`.
pub fn cutoff_packet_profile(
    spectrum: &GaussianSpectrum,
    x_grid: &[f64],
    quadrature: &QuadratureSpec,
) -> Result<PacketField> {
    let (lo, hi) = spectrum.support();
    if !(hi > lo) {
        return Err(Error::Degenerate("empty spectral support"));
    }
    wavepacket::synthesize_incident(spectrum, x_grid, 0.0, 1.0, quadrature).map(|(f, _)| f)
}

/// `max |ψ|` over `window.0 ≤ |x − x_peak| ≤ window.1`, divided by the peak `|ψ|`.
pub fn tail_amplitude(field: &PacketField, window: (f64, f64)) -> Result<f64> {
    let peak = field.peak();
    let psi = field.psi();
    let centre = field.x()[peak.index];
    let top = psi[peak.index].norm();
    let tail = field
        .x()
        .iter()
        .zip(psi)
        .filter(|(x, _)| {
            let d = (**x - centre).abs();
            d >= window.0 && d <= window.1
        })
        .map(|(_, p)| p.norm())
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.max(v)))
        });
    match tail {
        Some(t) if top > 0.0 => Ok(t / top),
        _ => Err(Error::InvalidGrid("tail window contains no grid points")),
    }
}

/// `∫ g²` over `[lo, hi]` by Gauss–Legendre; a check on [`GaussianSpectrum::mass_outside`].
pub fn spectral_mass(spectrum: &GaussianSpectrum, lo: f64, hi: f64) -> Result<f64> {
    let rule = GaussLegendre::new(32)?;
    let panels = ceil_usize((hi - lo) * spectrum.a()).max(4);
    Ok(rule.integrate(lo, hi, panels, |k| {
        let g = spectrum.amplitude(k);
        g * g
    }))
}
