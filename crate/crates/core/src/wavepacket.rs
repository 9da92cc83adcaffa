//! Spectral synthesis of packets and empirical peak tracking.
//!
//! Every field is `ψ(x, t) = ∫ (dk/2π) A(k, x) e^{−ik²t/(2m)}` evaluated with
//! composite Gauss–Legendre quadrature whose panel count is doubled until the
//! field at a handful of probe points stops changing.

use alloc::vec::Vec;

use crate::barrier::{self, BarrierConfig, Incidence, MatchingSolution};
use crate::error::{Error, Result};
use crate::math::{ceil_usize, cos, sin, PI, TAU};
use crate::phase_times;
use crate::quadrature::GaussLegendre;
use crate::spectral::{self, GaussianSpectrum};
use crate::Complex64;

/// Relative change allowed between successive panel doublings.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// Local maxima of `|ψ|²` above this fraction of the global maximum count as extra peaks.
pub const MULTIMODAL_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Gauss–Legendre nodes per panel.
    pub order: usize,
    /// Starting panel count; estimated from the phase excursion when `None`.
    pub panels: Option<usize>,
    pub tolerance: f64,
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            order: 16,
            panels: None,
            tolerance: DEFAULT_TOLERANCE,
            max_panels: 1 << 14,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerance(tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance < 1.0) {
            return Err(Error::param("tolerance", tolerance, "must lie in (0, 1)"));
        }
        Ok(Self {
            tolerance,
            ..Self::default()
        })
    }
}

/// What the convergence loop settled on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureReport {
    pub k_lo: f64,
    pub k_hi: f64,
    pub panels: usize,
    pub nodes: usize,
    /// Largest probe change at the last doubling, relative to the largest probe.
    pub probe_change: f64,
}

/// Samples of `ψ(x, t)` on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PacketField {
    x: Vec<f64>,
    t: f64,
    psi: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Grid index of the largest `|ψ|²`.
    pub index: usize,
    /// Parabolic sub-grid refinement of the maximum.
    pub position: f64,
    pub density: f64,
}

impl PacketField {
    pub fn new(x: Vec<f64>, t: f64, psi: Vec<Complex64>) -> Result<Self> {
        validate_grid(&x)?;
        if x.len() != psi.len() {
            return Err(Error::InvalidGrid("sample count differs from grid length"));
        }
        Ok(Self { x, t, psi })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn psi(&self) -> &[Complex64] {
        &self.psi
    }

    pub fn density(&self) -> Vec<f64> {
        self.psi.iter().map(|p| p.norm_sqr()).collect()
    }

    /// `∫ |ψ|² dx` by the trapezoid rule.
    pub fn norm(&self) -> f64 {
        trapezoid(&self.x, |i| self.psi[i].norm_sqr())
    }

    /// `∫ x|ψ|² dx / ∫ |ψ|² dx`.
    pub fn centroid(&self) -> f64 {
        trapezoid(&self.x, |i| self.x[i] * self.psi[i].norm_sqr()) / self.norm()
    }

    pub fn peak(&self) -> Peak {
        let d = self.density();
        let index = d
            .iter()
            .enumerate()
            .fold(0, |best, (i, v)| if *v > d[best] { i } else { best });
        let mut position = self.x[index];
        if index > 0 && index + 1 < d.len() {
            let (x0, x1, x2) = (self.x[index - 1], self.x[index], self.x[index + 1]);
            let (y0, y1, y2) = (d[index - 1], d[index], d[index + 1]);
            // vertex of the parabola through three (possibly uneven) points
            let num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
            let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
            if den != 0.0 {
                let v = x1 - 0.5 * num / den;
                if v > x0 && v < x2 {
                    position = v;
                }
            }
        }
        Peak {
            index,
            position,
            density: d[index],
        }
    }

    /// Interior local maxima of `|ψ|²` exceeding `fraction` of the global maximum;
    /// a profile cut by the grid edge does not count as a peak there.
    pub fn local_maxima(&self, fraction: f64) -> Vec<usize> {
        let d = self.density();
        let top = d.iter().cloned().fold(0.0, f64::max);
        (1..d.len().saturating_sub(1))
            .filter(|&i| d[i] > d[i - 1] && d[i] >= d[i + 1] && d[i] > fraction * top)
            .collect()
    }

    pub fn is_multimodal(&self) -> bool {
        self.local_maxima(MULTIMODAL_FRACTION).len() > 1
    }

    /// Samples with `lo ≤ x ≤ hi`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<Self> {
        let keep: Vec<usize> = (0..self.x.len())
            .filter(|&i| self.x[i] >= lo && self.x[i] <= hi)
            .collect();
        if keep.len() < 3 {
            return Err(Error::InvalidGrid(
                "region holds fewer than three grid points",
            ));
        }
        Ok(Self {
            x: keep.iter().map(|&i| self.x[i]).collect(),
            t: self.t,
            psi: keep.iter().map(|&i| self.psi[i]).collect(),
        })
    }
}

fn trapezoid<F: Fn(usize) -> f64>(x: &[f64], f: F) -> f64 {
    (1..x.len())
        .map(|i| 0.5 * (x[i] - x[i - 1]) * (f(i) + f(i - 1)))
        .sum()
}

fn validate_grid(x: &[f64]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::InvalidGrid("empty grid"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGrid("grid contains non-finite points"));
    }
    if x.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidGrid("grid must be strictly increasing"));
    }
    Ok(())
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 || !(hi > lo) {
        return Err(Error::InvalidGrid("need hi > lo and at least two points"));
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect())
}

fn phase(a: f64) -> Complex64 {
    Complex64::new(cos(a), sin(a))
}

/// Integrand evaluated at one node: returns the `x`-dependent amplitude.
trait Integrand {
    type Node;
    fn node(&self, k: f64) -> Result<Self::Node>;
    fn value(&self, node: &Self::Node, k: f64, x: f64) -> Complex64;
}

/// Plane-wave integrand `amp(k)·e^{ik(x − x_ref)}`.
struct PlaneWave<F: Fn(f64) -> Result<Complex64>> {
    amp: F,
    x_ref: f64,
}

impl<F: Fn(f64) -> Result<Complex64>> Integrand for PlaneWave<F> {
    type Node = Complex64;
    fn node(&self, k: f64) -> Result<Complex64> {
        (self.amp)(k)
    }
    fn value(&self, node: &Complex64, k: f64, x: f64) -> Complex64 {
        node * phase(k * (x - self.x_ref))
    }
}

struct Prepared<N> {
    k: f64,
    weight: Complex64,
    node: N,
}

fn prepare<I: Integrand>(
    integrand: &I,
    rule: &GaussLegendre,
    k_lo: f64,
    k_hi: f64,
    panels: usize,
    t: f64,
    mass: f64,
) -> Result<Vec<Prepared<I::Node>>> {
    rule.composite(k_lo, k_hi, panels)
        .into_iter()
        .map(|(k, w)| {
            Ok(Prepared {
                k,
                weight: phase(-k * k * t / (2.0 * mass)) * (w / TAU),
                node: integrand.node(k)?,
            })
        })
        .collect()
}

fn evaluate<I: Integrand>(integrand: &I, nodes: &[Prepared<I::Node>], x: f64) -> Complex64 {
    nodes
        .iter()
        .map(|p| p.weight * integrand.value(&p.node, p.k, x))
        .sum()
}

/// Phase excursion of the integrand across the interval, used to size panels.
fn starting_panels(k_lo: f64, k_hi: f64, x_span: f64, t: f64, mass: f64, a: f64) -> usize {
    let dk = k_hi - k_lo;
    let excursion = x_span * dk + t.abs() * (k_hi * k_hi - k_lo * k_lo) / (2.0 * mass) + PI;
    ceil_usize(excursion / PI).max(ceil_usize(dk * a)).max(4)
}

fn probe_indices(n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..5).map(|i| i * (n - 1) / 4).collect();
    v.dedup();
    v
}

#[allow(clippy::too_many_arguments)]
fn synthesize<I: Integrand>(
    integrand: &I,
    k_lo: f64,
    k_hi: f64,
    x_grid: &[f64],
    x_ref: f64,
    t: f64,
    mass: f64,
    a: f64,
    spec: &QuadratureSpec,
) -> Result<(PacketField, QuadratureReport)> {
    validate_grid(x_grid)?;
    if !(k_hi > k_lo) {
        return Err(Error::Degenerate("empty k interval"));
    }
    if !t.is_finite() {
        return Err(Error::param("t", t, "must be finite"));
    }
    let rule = GaussLegendre::new(spec.order)?;
    let x_span = x_grid.iter().map(|x| (x - x_ref).abs()).fold(0.0, f64::max);
    let mut panels = spec
        .panels
        .unwrap_or_else(|| starting_panels(k_lo, k_hi, x_span, t, mass, a))
        .max(1);
    // probes: five grid points plus the coarse maximum
    let mut probes: Vec<f64> = probe_indices(x_grid.len())
        .iter()
        .map(|&i| x_grid[i])
        .collect();
    let mut nodes = prepare(integrand, &rule, k_lo, k_hi, panels, t, mass)?;
    let coarse_peak = x_grid
        .iter()
        .step_by((x_grid.len() / 64).max(1))
        .map(|&x| (x, evaluate(integrand, &nodes, x).norm()))
        .fold((x_grid[0], -1.0), |b, p| if p.1 > b.1 { p } else { b });
    probes.push(coarse_peak.0);
    let mut previous: Vec<Complex64> = probes
        .iter()
        .map(|&x| evaluate(integrand, &nodes, x))
        .collect();
    let mut change = f64::INFINITY;
    loop {
        panels *= 2;
        if panels > spec.max_panels {
            return Err(Error::Convergence {
                what: "packet quadrature",
                achieved: change,
                tolerance: spec.tolerance,
            });
        }
        nodes = prepare(integrand, &rule, k_lo, k_hi, panels, t, mass)?;
        let current: Vec<Complex64> = probes
            .iter()
            .map(|&x| evaluate(integrand, &nodes, x))
            .collect();
        change = relative_change(&previous, &current);
        previous = current;
        if change < spec.tolerance {
            break;
        }
    }
    let psi = x_grid
        .iter()
        .map(|&x| evaluate(integrand, &nodes, x))
        .collect();
    Ok((
        PacketField {
            x: x_grid.to_vec(),
            t,
            psi,
        },
        QuadratureReport {
            k_lo,
            k_hi,
            panels,
            nodes: nodes.len(),
            probe_change: change,
        },
    ))
}

fn relative_change(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max)
        / scale
}

/// Free packet `∫ (dk/2π) g(k − k₀) e^{ikx − ik²t/(2m)}` over the spectrum's support.
pub fn synthesize_incident(
    spectrum: &GaussianSpectrum,
    x_grid: &[f64],
    t: f64,
    mass: f64,
    quadrature: &QuadratureSpec,
) -> Result<(PacketField, QuadratureReport)> {
    let (lo, hi) = spectrum.support();
    let integrand = PlaneWave {
        amp: |k| Ok(Complex64::from(spectrum.amplitude(k))),
        x_ref: 0.0,
    };
    synthesize(
        &integrand,
        lo,
        hi,
        x_grid,
        0.0,
        t,
        mass,
        spectrum.a(),
        quadrature,
    )
}

/// Transmitted packet `∫₀^w (dk/2π) g(k − k₀)|T| e^{ik(x − L/2) − ik²t/(2m) + iΘ}` for `x ≥ L/2`.
pub fn synthesize_transmitted(
    spectrum: &GaussianSpectrum,
    barrier: &BarrierConfig,
    x_grid: &[f64],
    t: f64,
    quadrature: &QuadratureSpec,
) -> Result<(PacketField, QuadratureReport)> {
    let h = 0.5 * barrier.width();
    if x_grid.first().is_some_and(|&x| x < h) {
        return Err(Error::InvalidGrid("transmitted packet needs x >= L/2"));
    }
    transmitted_like(spectrum, barrier, x_grid, t, quadrature, true)
}

/// The transmitted packet with `Θ` removed: same spectral weights, no phase delay.
/// Subtracting its arrival from the transmitted one isolates the phase time.
pub fn synthesize_filtered_reference(
    spectrum: &GaussianSpectrum,
    barrier: &BarrierConfig,
    x_grid: &[f64],
    t: f64,
    quadrature: &QuadratureSpec,
) -> Result<(PacketField, QuadratureReport)> {
    transmitted_like(spectrum, barrier, x_grid, t, quadrature, false)
}

fn transmitted_like(
    spectrum: &GaussianSpectrum,
    barrier: &BarrierConfig,
    x_grid: &[f64],
    t: f64,
    quadrature: &QuadratureSpec,
    with_phase: bool,
) -> Result<(PacketField, QuadratureReport)> {
    let w = barrier.w();
    let hi = match spectrum.cutoff() {
        Some(c) => c.k_cut().min(w),
        None => w,
    };
    let integrand = PlaneWave {
        amp: |k| {
            let s = barrier::symmetric_amplitudes(k, barrier)?;
            let theta = if with_phase { s.theta } else { 0.0 };
            Ok(phase(theta) * (spectrum.amplitude(k) * s.modulus))
        },
        x_ref: 0.5 * barrier.width(),
    };
    synthesize(
        &integrand,
        0.0,
        hi,
        x_grid,
        0.5 * barrier.width(),
        t,
        barrier.mass(),
        spectrum.a(),
        quadrature,
    )
}

/// Both stationary solutions at one wavenumber.
pub struct CollisionNode {
    left: MatchingSolution,
    right: MatchingSolution,
    /// `R_B + T_B` seen from the left exterior.
    sum_left: Complex64,
    /// `R_B + T_B` seen from the right exterior.
    sum_right: Complex64,
    even: Complex64,
    odd: Complex64,
}

impl CollisionNode {
    pub fn new(k: f64, barrier: &BarrierConfig) -> Result<Self> {
        let left = barrier::solve_matching(k, barrier, Incidence::Left)?;
        let right = barrier::solve_matching(k, barrier, Incidence::Right)?;
        Ok(Self {
            sum_left: left.reflection + right.transmission,
            sum_right: right.reflection + left.transmission,
            even: left.even + right.even,
            odd: left.odd + right.odd,
            left,
            right,
        })
    }

    pub fn sum_left(&self) -> Complex64 {
        self.sum_left
    }

    pub fn sum_right(&self) -> Complex64 {
        self.sum_right
    }

    pub fn residual(&self) -> f64 {
        self.left.residual.max(self.right.residual)
    }
}

struct Collision<'a> {
    barrier: &'a BarrierConfig,
    spectrum: &'a GaussianSpectrum,
}

impl Integrand for Collision<'_> {
    type Node = CollisionNode;
    fn node(&self, k: f64) -> Result<CollisionNode> {
        CollisionNode::new(k, self.barrier)
    }
    fn value(&self, n: &CollisionNode, k: f64, x: f64) -> Complex64 {
        let h = 0.5 * self.barrier.width();
        let g = self.spectrum.amplitude(k);
        let v = if x < -h {
            phase(k * x) + n.sum_left * phase(-k * x)
        } else if x > h {
            phase(-k * x) + n.sum_right * phase(k * x)
        } else {
            let (ch, sh) = n.left.interior_basis(x);
            n.even * ch + n.odd * sh
        };
        v * g
    }
}

/// Earliest time at which the collision field is defined: both packets reach
/// their barrier edge at `t = −mL/(2k₀)`.
pub fn collision_start(spectrum: &GaussianSpectrum, barrier: &BarrierConfig) -> f64 {
    -barrier.mass() * barrier.width() / (2.0 * spectrum.k0())
}

/// Symmetric collision of a packet from the left with its mirror image from the right.
pub fn synthesize_collision(
    spectrum: &GaussianSpectrum,
    barrier: &BarrierConfig,
    x_grid: &[f64],
    t: f64,
    quadrature: &QuadratureSpec,
) -> Result<(PacketField, QuadratureReport)> {
    let t0 = collision_start(spectrum, barrier);
    if t < t0 - 1e-12 * t0.abs().max(1.0) {
        return Err(Error::param("t", t, "must not precede -mL/(2k0)"));
    }
    let integrand = Collision { barrier, spectrum };
    let hi = spectrum.k0() + spectral::UNCUT_SPAN / spectrum.a();
    synthesize(
        &integrand,
        0.0,
        hi,
        x_grid,
        0.0,
        t,
        barrier.mass(),
        spectrum.a(),
        quadrature,
    )
}

/// `max_x | |ψ(x)| − |ψ(−x)| |` relative to `max |ψ|`, on a grid symmetric about 0.
pub fn mirror_residual(field: &PacketField) -> Result<f64> {
    let x = field.x();
    let n = x.len();
    let scale = field.psi().iter().map(|p| p.norm()).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for i in 0..n / 2 + 1 {
        let j = n - 1 - i;
        if (x[i] + x[j]).abs() > 1e-12 * (1.0 + x[i].abs()) {
            return Err(Error::InvalidGrid("grid is not symmetric about x = 0"));
        }
        worst = worst.max((field.psi()[i].norm() - field.psi()[j].norm()).abs());
    }
    Ok(if scale > 0.0 { worst / scale } else { 0.0 })
}

/// Outgoing spectral density `|g·(R_B + T_B)|` against `g` at the quadrature nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutgoingSpectrumCheck {
    pub max_modulus_error: f64,
    pub incoming_weight: f64,
    pub outgoing_weight: f64,
    pub max_residual: f64,
}

impl OutgoingSpectrumCheck {
    pub fn weight_error(&self) -> f64 {
        (self.outgoing_weight - self.incoming_weight).abs() / self.incoming_weight
    }
}

pub fn outgoing_spectrum_check(
    spectrum: &GaussianSpectrum,
    barrier: &BarrierConfig,
    quadrature: &QuadratureSpec,
) -> Result<OutgoingSpectrumCheck> {
    let rule = GaussLegendre::new(quadrature.order)?;
    let hi = spectrum.k0() + spectral::UNCUT_SPAN / spectrum.a();
    let panels = quadrature
        .panels
        .unwrap_or_else(|| ceil_usize(4.0 * hi * spectrum.a()).max(16));
    let mut out = OutgoingSpectrumCheck {
        max_modulus_error: 0.0,
        incoming_weight: 0.0,
        outgoing_weight: 0.0,
        max_residual: 0.0,
    };
    for (k, w) in rule.composite(0.0, hi, panels) {
        let n = CollisionNode::new(k, barrier)?;
        let g = spectrum.amplitude(k);
        for s in [n.sum_left, n.sum_right] {
            let out_g = (g * s).norm();
            out.max_modulus_error = out.max_modulus_error.max((out_g - g).abs());
            out.outgoing_weight += 0.5 * w * out_g * out_g;
        }
        out.incoming_weight += w * g * g;
        out.max_residual = out.max_residual.max(n.residual());
    }
    Ok(out)
}

/// Peak arrival at a plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Arrival {
    At(f64),
    NoArrival,
}

impl Arrival {
    pub fn time(&self) -> Option<f64> {
        match self {
            Arrival::At(t) => Some(*t),
            Arrival::NoArrival => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalRecord {
    /// `(t, x_peak)` per field.
    pub peaks: Vec<(f64, f64)>,
    /// First crossing of the plane in the direction of increasing `x`.
    pub arrival: Arrival,
    /// Some field in the region had more than one significant peak.
    pub multimodal: bool,
    /// One of the two fields bracketing the arrival had more than one significant peak.
    pub multimodal_at_arrival: bool,
}

/// Peak position per time inside `region`, and the time the peak first moves
/// across `plane` from below.
pub fn track_peak(fields: &[PacketField], region: (f64, f64), plane: f64) -> Result<ArrivalRecord> {
    if fields.len() < 3 {
        return Err(Error::InvalidGrid(
            "peak tracking needs at least three time samples",
        ));
    }
    if !(region.1 > region.0) {
        return Err(Error::InvalidGrid("empty tracking region"));
    }
    if fields.windows(2).any(|f| f[1].t() <= f[0].t()) {
        return Err(Error::InvalidGrid(
            "fields must be ordered by increasing time",
        ));
    }
    let mut peaks = Vec::with_capacity(fields.len());
    let mut modes = Vec::with_capacity(fields.len());
    for f in fields {
        let r = f.restrict(region.0, region.1)?;
        modes.push(r.is_multimodal());
        peaks.push((f.t(), r.peak().position));
    }
    let crossing = peaks
        .windows(2)
        .position(|p| p[0].1 < plane && p[1].1 >= plane);
    let arrival = crossing.map_or(Arrival::NoArrival, |i| {
        let ((t0, x0), (t1, x1)) = (peaks[i], peaks[i + 1]);
        Arrival::At(t0 + (plane - x0) * (t1 - t0) / (x1 - x0))
    });
    Ok(ArrivalRecord {
        peaks,
        arrival,
        multimodal: modes.iter().any(|&m| m),
        multimodal_at_arrival: crossing.is_some_and(|i| modes[i] || modes[i + 1]),
    })
}

/// Transmitted-peak arrival against the stationary-phase transit time at `k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpmComparison {
    pub k_max: f64,
    pub boundary_dominated: bool,
    /// Transit time at `k_max`; absent when `k_max = w`.
    pub spm_time: Option<f64>,
    /// `mL/k_max`
    pub tau: f64,
    pub plane: f64,
    pub transmitted: ArrivalRecord,
    pub reference: ArrivalRecord,
    /// Arrival of the transmitted peak minus that of the phase-free reference.
    pub empirical_delay: Option<f64>,
    /// The transmitted field is multimodal around its arrival.
    pub multimodal: bool,
    /// `k_max` more than one spectral width `1/a` above `k₀`, multimodal, or at `w`.
    pub filter_effect: bool,
    /// Largest accepted panel count; 0 when the fields were supplied.
    pub panels: usize,
}

impl SpmComparison {
    /// `(empirical − spm)/τ`.
    pub fn discrepancy(&self) -> Option<f64> {
        Some((self.empirical_delay? - self.spm_time?) / self.tau)
    }
}

/// Transmitted fields and their phase-free references at the same times.
pub fn transmitted_series(
    spectrum: &GaussianSpectrum,
    barrier: &BarrierConfig,
    x_grid: &[f64],
    times: &[f64],
    quadrature: &QuadratureSpec,
) -> Result<(Vec<PacketField>, Vec<PacketField>, usize)> {
    let mut transmitted = Vec::with_capacity(times.len());
    let mut reference = Vec::with_capacity(times.len());
    let mut panels = 0;
    for &t in times {
        let (f, r) = synthesize_transmitted(spectrum, barrier, x_grid, t, quadrature)?;
        panels = panels.max(r.panels);
        transmitted.push(f);
        reference.push(synthesize_filtered_reference(spectrum, barrier, x_grid, t, quadrature)?.0);
    }
    Ok((transmitted, reference, panels))
}

/// Runs the transmitted packet and its phase-free reference over `times`,
/// tracks both peaks in `x ∈ [L/2, x_grid.last]` and compares the arrival
/// delay at `x = L/2 + plane_offset` with the transit time at `k_max`.
pub fn spm_comparison(
    spectrum: &GaussianSpectrum,
    barrier: &BarrierConfig,
    x_grid: &[f64],
    times: &[f64],
    plane_offset: f64,
    quadrature: &QuadratureSpec,
) -> Result<SpmComparison> {
    let (transmitted, reference, panels) =
        transmitted_series(spectrum, barrier, x_grid, times, quadrature)?;
    let mut c =
        spm_comparison_from_fields(spectrum, barrier, &transmitted, &reference, plane_offset)?;
    c.panels = panels;
    Ok(c)
}

/// [`spm_comparison`] on fields already synthesized by [`transmitted_series`].
pub fn spm_comparison_from_fields(
    spectrum: &GaussianSpectrum,
    barrier: &BarrierConfig,
    transmitted: &[PacketField],
    reference: &[PacketField],
    plane_offset: f64,
) -> Result<SpmComparison> {
    let km = spectral::find_kmax(spectrum, barrier)?;
    let h = 0.5 * barrier.width();
    let plane = h + plane_offset;
    let last = transmitted
        .first()
        .and_then(|f| f.x().last().copied())
        .ok_or(Error::InvalidGrid("no fields to track"))?;
    let region = (h, last);
    let transmitted = track_peak(transmitted, region, plane)?;
    let reference = track_peak(reference, region, plane)?;
    let empirical_delay = match (transmitted.arrival.time(), reference.arrival.time()) {
        (Some(a), Some(b)) => Some(a - b),
        _ => None,
    };
    let spm_time = if km.boundary_dominated {
        None
    } else {
        Some(phase_times::standard_transit_time(km.k_max, barrier)?.time())
    };
    let multimodal = transmitted.multimodal_at_arrival;
    let filter_effect =
        km.boundary_dominated || multimodal || (km.k_max - spectrum.k0()) * spectrum.a() > 1.0;
    Ok(SpmComparison {
        k_max: km.k_max,
        boundary_dominated: km.boundary_dominated,
        spm_time,
        tau: barrier.mass() * barrier.width() / km.k_max,
        plane,
        transmitted,
        reference,
        empirical_delay,
        multimodal,
        filter_effect,
        panels: 0,
    })
}

/// Empirical scattering time of the collision against `−(m/k₀)dφ/dk`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionDelay {
    pub predicted: f64,
    /// Outgoing arrival minus free arrival at the same plane, plus `mL/k₀`.
    pub empirical: Option<f64>,
    pub outgoing: ArrivalRecord,
    pub free: ArrivalRecord,
}

/// Tracks the right-moving outgoing collision packet across `plane > L/2` and a
/// free packet across the same plane.
pub fn collision_delay(
    spectrum: &GaussianSpectrum,
    barrier: &BarrierConfig,
    x_grid: &[f64],
    times: &[f64],
    plane: f64,
    quadrature: &QuadratureSpec,
) -> Result<CollisionDelay> {
    let h = 0.5 * barrier.width();
    if !(plane > h) {
        return Err(Error::param("plane", plane, "must lie beyond L/2"));
    }
    let region = (h, *x_grid.last().ok_or(Error::InvalidGrid("empty grid"))?);
    let mut outgoing = Vec::with_capacity(times.len());
    let mut free = Vec::with_capacity(times.len());
    let uncut = GaussianSpectrum::new(spectrum.k0(), spectrum.a())?;
    for &t in times {
        outgoing.push(synthesize_collision(spectrum, barrier, x_grid, t, quadrature)?.0);
        free.push(synthesize_incident(&uncut, x_grid, t, barrier.mass(), quadrature)?.0);
    }
    let outgoing = track_peak(&outgoing, region, plane)?;
    let free = track_peak(&free, region, plane)?;
    let predicted = phase_times::scattering_phase_time(spectrum.k0(), barrier)?.time();
    let empirical = match (outgoing.arrival.time(), free.arrival.time()) {
        (Some(a), Some(b)) => Some(a - b + barrier.mass() * barrier.width() / spectrum.k0()),
        _ => None,
    };
    Ok(CollisionDelay {
        predicted,
        empirical,
        outgoing,
        free,
    })
}
