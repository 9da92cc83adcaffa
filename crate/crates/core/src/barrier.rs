//! Exact single-wavenumber scattering by the rectangular barrier
//! `V(x) = V₀` on `[-L/2, L/2]`, zero elsewhere, with `ħ = 1`.
//!
//! All amplitudes are evaluated from the denominator of the matching solution
//!
//! ```text
//! D(k) = cosh(ρL) + i (ρ² − k²)/(2k) · sinh(ρL)/ρ,    ρ = √(w² − k²)
//! ```
//!
//! in a form that stays finite for large `ρL` (the dominant `e^{ρL}` is
//! factored out) and continuous through the threshold `k = w` (the ratio
//! `sinh(ρL)/ρ` is taken by series near `ρ = 0`, and continues to
//! `sin(qL)/q` above the barrier).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math::{self, atan, atan2, cos, cosh, exp, hypot, sin, sinc, sinhc, sqrt};

/// `ρL` above which the hyperbolic functions are carried with `e^{-ρL}` factored out.
const SCALED_REGIME: f64 = 20.0;

/// Barrier height and width together with the particle mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierConfig {
    mass: f64,
    height: f64,
    width: f64,
    w: f64,
}

impl BarrierConfig {
    pub fn new(mass: f64, height: f64, width: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::param("mass", mass, "must be positive and finite"));
        }
        if !(height > 0.0 && height.is_finite()) {
            return Err(Error::param(
                "height",
                height,
                "must be positive and finite",
            ));
        }
        if !(width >= 0.0 && width.is_finite()) {
            return Err(Error::param(
                "width",
                width,
                "must be non-negative and finite",
            ));
        }
        Ok(Self {
            mass,
            height,
            width,
            w: sqrt(2.0 * mass * height),
        })
    }

    /// Unit mass, barrier given by its wavenumber `w = √(2 m V₀)`.
    ///
    /// With lengths measured in units of the packet width this is the
    /// `(w·a, L/a)` parameterization used by the tables and the CLI.
    pub fn from_wavenumber(w: f64, width: f64) -> Result<Self> {
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::param("w", w, "must be positive and finite"));
        }
        let mut b = Self::new(1.0, 0.5 * w * w, width)?;
        b.w = w;
        Ok(b)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// `w = √(2 m V₀)`.
    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn with_width(&self, width: f64) -> Result<Self> {
        if !(width >= 0.0 && width.is_finite()) {
            return Err(Error::param(
                "width",
                width,
                "must be non-negative and finite",
            ));
        }
        Ok(Self { width, ..*self })
    }

    /// `ρ(k)·L`, the opacity parameter α, for `0 ≤ k ≤ w`.
    pub fn alpha(&self, k: f64) -> Result<f64> {
        match rho(k, self)? {
            EvanescentWavenumber::Evanescent { rho, .. } => Ok(rho * self.width),
            EvanescentWavenumber::Threshold { .. } => Ok(0.0),
            EvanescentWavenumber::Oscillatory { .. } => {
                Err(Error::param("k", k, "α is defined only for k ≤ w"))
            }
        }
    }
}

/// Under-barrier decay constant, or its continuation above the barrier top.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvanescentWavenumber {
    /// `k < w`: `ρ = √(w² − k²) > 0`.
    Evanescent { k: f64, rho: f64 },
    /// `k = w`: `ρ = 0`, removable limits apply.
    Threshold { k: f64 },
    /// `k > w`: `ρ = i q` with `q = √(k² − w²)`.
    Oscillatory { k: f64, q: f64 },
}

impl EvanescentWavenumber {
    pub fn k(&self) -> f64 {
        match *self {
            Self::Evanescent { k, .. } | Self::Threshold { k } | Self::Oscillatory { k, .. } => k,
        }
    }

    /// `ρ` for `k ≤ w`, `None` above the barrier.
    pub fn rho(&self) -> Option<f64> {
        match *self {
            Self::Evanescent { rho, .. } => Some(rho),
            Self::Threshold { .. } => Some(0.0),
            Self::Oscillatory { .. } => None,
        }
    }

    /// Signed `ρ² = w² − k²`.
    pub fn rho_squared(&self) -> f64 {
        match *self {
            Self::Evanescent { rho, .. } => rho * rho,
            Self::Threshold { .. } => 0.0,
            Self::Oscillatory { q, .. } => -q * q,
        }
    }
}

pub fn rho(k: f64, barrier: &BarrierConfig) -> Result<EvanescentWavenumber> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::param("k", k, "must be non-negative and finite"));
    }
    let w = barrier.w;
    let rho2 = (w - k) * (w + k);
    Ok(if rho2 > 0.0 {
        EvanescentWavenumber::Evanescent { k, rho: sqrt(rho2) }
    } else if rho2 == 0.0 {
        EvanescentWavenumber::Threshold { k }
    } else {
        EvanescentWavenumber::Oscillatory { k, q: sqrt(-rho2) }
    })
}

/// `cosh(ρL)` and `sinh(ρL)/ρ` for one wavenumber, both multiplied by
/// `e^{-ln_scale}` (`ln_scale = ρL` in the scaled regime, zero otherwise).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Kernel {
    pub k: f64,
    pub w: f64,
    pub width: f64,
    /// signed ρ²
    pub rho2: f64,
    pub c: f64,
    pub s: f64,
    pub ln_scale: f64,
}

impl Kernel {
    pub fn new(k: f64, barrier: &BarrierConfig) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::param("k", k, "must be positive and finite"));
        }
        let w = barrier.w;
        let l = barrier.width;
        let rho2 = (w - k) * (w + k);
        let y = sqrt(rho2.abs()) * l;
        let (c, s, ln_scale) = if rho2 >= 0.0 {
            if y > SCALED_REGIME {
                let e = exp(-2.0 * y);
                (0.5 * (1.0 + e), l * (1.0 - e) / (2.0 * y), y)
            } else {
                (cosh(y), l * sinhc(y), 0.0)
            }
        } else {
            (cos(y), l * sinc(y), 0.0)
        };
        Ok(Self {
            k,
            w,
            width: l,
            rho2,
            c,
            s,
            ln_scale,
        })
    }

    pub fn scale(&self) -> f64 {
        if self.ln_scale == 0.0 {
            1.0
        } else {
            exp(-self.ln_scale)
        }
    }

    /// `w² sinh(ρL) / (2kρ)`, scaled.
    pub fn x(&self) -> f64 {
        self.w * self.w * self.s / (2.0 * self.k)
    }

    /// Scaled matching denominator `D`.
    pub fn denominator(&self) -> Complex64 {
        let k = self.k;
        Complex64::new(self.c, (self.rho2 - k * k) * self.s / (2.0 * k))
    }

    /// `e^{-ikL}`
    pub fn plane_wave(&self) -> Complex64 {
        let a = -self.k * self.width;
        Complex64::new(cos(a), sin(a))
    }
}

/// Standard single-packet transmission modulus `|T(k, L)|`.
///
/// Hyperbolic branch below the barrier top, removable limit at `k = w`,
/// trigonometric continuation above it.
pub fn transmission_modulus(k: f64, barrier: &BarrierConfig) -> Result<f64> {
    let kern = Kernel::new(k, barrier)?;
    let scale = kern.scale();
    Ok(scale / hypot(scale, kern.x()))
}

/// Transmission phase `Θ(k, L) = arctan[(2k² − w²) tanh(ρL) / (2kρ)]`.
///
/// This is `−arg D`, so `|T| e^{iΘ}` is the transmitted amplitude relative
/// to the plane wave `e^{ik(x − L/2)}`. Computed with a two-argument arctangent;
/// principal value above the barrier (use [`crate::math::unwrap_phases`] along
/// a grid there).
pub fn theta_phase(k: f64, barrier: &BarrierConfig) -> Result<f64> {
    let kern = Kernel::new(k, barrier)?;
    let w = kern.w;
    Ok(atan2((2.0 * k * k - w * w) * kern.s / (2.0 * k), kern.c))
}

/// The transmission phase with `kρ` (not `2kρ`) in the denominator.
///
/// Kept for comparison only: it is not the phase of the matching solution
/// and its derivative does not reproduce the transit-time closed form.
pub fn theta_phase_printed(k: f64, barrier: &BarrierConfig) -> Result<f64> {
    let kern = Kernel::new(k, barrier)?;
    let w = kern.w;
    Ok(atan((2.0 * k * k - w * w) * (kern.s / kern.c) / k))
}

/// Phase `φ(k, L)` of the summed symmetric-collision amplitude,
/// `R_B + T_B = exp(−i[kL + φ])`, for `0 < k ≤ w`.
///
/// `φ = arctan{2kρ sinh(ρL) / [w² + (k² − ρ²) cosh(ρL)]}` with the branch in
/// `[0, π)`; the numerator is non-negative in this range, so the branch is
/// continuous in both `k` and `L` and `φ(L = 0) = 0`.
pub fn phi_phase(k: f64, barrier: &BarrierConfig) -> Result<f64> {
    let kern = Kernel::new(k, barrier)?;
    if kern.rho2 < 0.0 {
        return Err(Error::param("k", k, "φ is defined for 0 < k ≤ w"));
    }
    Ok(phi_from_kernel(&kern))
}

fn phi_from_kernel(kern: &Kernel) -> f64 {
    let (k, w) = (kern.k, kern.w);
    // ρ sinh(ρL) = ρ² · sinh(ρL)/ρ
    let num = 2.0 * k * kern.rho2 * kern.s;
    let den = w * w * kern.scale() + (2.0 * k * k - w * w) * kern.c;
    atan2(num, den)
}

/// Reflection and transmission amplitudes of the symmetric collision and
/// their sum at one wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringAmplitudes {
    pub k: f64,
    /// `|T|`
    pub modulus: f64,
    /// `Θ`
    pub theta: f64,
    /// `R_B`, coefficient of the reflected plane wave.
    pub reflection: Complex64,
    /// `T_B`, coefficient of the transmitted plane wave.
    pub transmission: Complex64,
    /// `R_B + T_B`
    pub sum: Complex64,
    /// `φ`; principal value of `−arg(sum) − kL` above the barrier top.
    pub phi: f64,
    /// Zero barrier width: nothing is reflected.
    pub zero_width: bool,
}

/// `R_B`, `T_B` and `R_B + T_B` for a packet incident from either side.
///
/// `R_B = e^{−ikL} (−i w² sinh(ρL)/(2kρ)) / D` and `T_B = e^{−ikL} / D`, which
/// coincide with the exponential forms
/// `R_B = e^{−ikL} e^{iΘ_c}(1 − e^{2ρL}) / (1 − e^{2ρL} e^{2iΘ_c})` and
/// `T_B = e^{−ikL} e^{ρL}(1 − e^{2iΘ_c}) / (1 − e^{2ρL} e^{2iΘ_c})`
/// with `e^{iΘ_c} = (k + iρ)²/w²` (see [`interface_form_amplitudes`]).
pub fn symmetric_amplitudes(k: f64, barrier: &BarrierConfig) -> Result<ScatteringAmplitudes> {
    let kern = Kernel::new(k, barrier)?;
    let d = kern.denominator();
    let pw = kern.plane_wave();
    let scale = kern.scale();
    let x = kern.x();
    let transmission = pw * scale / d;
    let reflection = pw * Complex64::new(0.0, -x) / d;
    let sum = pw * Complex64::new(scale, -x) / d;
    let phi = if kern.rho2 >= 0.0 {
        phi_from_kernel(&kern)
    } else {
        math::wrap_angle(-(sum.arg()) - k * kern.width)
    };
    Ok(ScatteringAmplitudes {
        k,
        modulus: scale / hypot(scale, x),
        theta: atan2(-d.im, d.re),
        reflection,
        transmission,
        sum,
        phi,
        zero_width: barrier.width == 0.0,
    })
}

/// `exp(−i[kL + φ])`, the closed form of the summed amplitude.
pub fn summed_amplitude_closed_form(k: f64, barrier: &BarrierConfig) -> Result<Complex64> {
    let phi = phi_phase(k, barrier)?;
    let a = -(k * barrier.width + phi);
    Ok(Complex64::new(cos(a), sin(a)))
}

/// Interface angle `Θ_c = atan2(2kρ, k² − ρ²) = 2·arg(k + iρ)` for `0 < k ≤ w`.
pub fn interface_angle(k: f64, barrier: &BarrierConfig) -> Result<f64> {
    match rho(k, barrier)? {
        EvanescentWavenumber::Oscillatory { .. } => {
            Err(Error::param("k", k, "interface angle needs k ≤ w"))
        }
        r => {
            let rho = r.rho().unwrap_or(0.0);
            Ok(2.0 * atan2(rho, k))
        }
    }
}

/// `(R_B, T_B, R_B + T_B)` from the exponential representation, with the
/// dominant `e^{2ρL}` divided out. Requires `0 < k < w` and `L > 0`.
pub fn interface_form_amplitudes(
    k: f64,
    barrier: &BarrierConfig,
) -> Result<(Complex64, Complex64, Complex64)> {
    if barrier.width == 0.0 {
        return Err(Error::Degenerate("exponential form is 0/0 at L = 0"));
    }
    let r = rho(k, barrier)?;
    let rho = match r {
        EvanescentWavenumber::Evanescent { rho, .. } => rho,
        _ => return Err(Error::param("k", k, "exponential form needs 0 < k < w")),
    };
    if k == 0.0 {
        return Err(Error::param("k", k, "must be positive"));
    }
    let y = rho * barrier.width;
    let theta_c = 2.0 * atan2(rho, k);
    let e1 = Complex64::new(cos(theta_c), sin(theta_c));
    let e2 = e1 * e1;
    let q = exp(-2.0 * y);
    let pw = Complex64::new(cos(k * barrier.width), -sin(k * barrier.width));
    let den = Complex64::new(q, 0.0) - e2;
    let refl = pw * e1 * (q - 1.0) / den;
    let trans = pw * exp(-y) * (Complex64::new(1.0, 0.0) - e2) / den;
    let ey = exp(-y);
    let sum = pw * (Complex64::new(1.0, 0.0) + e1 * ey) / (e1 + ey);
    Ok((refl, trans, sum))
}

/// `R_B` and `T_B` evaluated verbatim from the uncorrected exponential forms,
/// with `Θ` from [`theta_phase_printed`] and `e^{iΘ}` (not `e^{2iΘ}`) in the
/// denominators. Diagnostic only: these are not unimodular when summed.
pub fn printed_symmetric_amplitudes(
    k: f64,
    barrier: &BarrierConfig,
) -> Result<(Complex64, Complex64)> {
    if barrier.width == 0.0 {
        return Err(Error::Degenerate("printed form is 0/0 at L = 0"));
    }
    let rho = match rho(k, barrier)? {
        EvanescentWavenumber::Evanescent { rho, .. } => rho,
        _ => return Err(Error::param("k", k, "printed form needs 0 < k < w")),
    };
    let theta = theta_phase_printed(k, barrier)?;
    let y = rho * barrier.width;
    let e1 = Complex64::new(cos(theta), sin(theta));
    let one = Complex64::new(1.0, 0.0);
    let pw = Complex64::new(cos(k * barrier.width), -sin(k * barrier.width));
    let a2 = exp(2.0 * y);
    let den = one - e1 * a2;
    Ok((
        pw * e1 * (1.0 - a2) / den,
        pw * exp(y) * (one - e1 * e1) / den,
    ))
}

/// Standard single-packet amplitudes from an independent 2×2 transfer-matrix product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleAmplitudes {
    /// coefficient of `e^{ikx}` for `x > L/2`
    pub transmission: Complex64,
    /// coefficient of `e^{−ikx}` for `x < −L/2`
    pub reflection: Complex64,
}

/// Plane-wave transfer matrices across `x = −L/2` and `x = +L/2`.
///
/// Each region carries `A e^{iκx} + B e^{−iκx}` with `κ = √(2m(E − V))`
/// (complex under the barrier); at `κ = 0` the basis `{1, x}` is used.
pub fn transfer_matrix_oracle(k: f64, barrier: &BarrierConfig) -> Result<OracleAmplitudes> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::param("k", k, "must be positive and finite"));
    }
    let w = barrier.w;
    let kin = Complex64::new(k * k - w * w, 0.0).sqrt();
    let kout = Complex64::new(k, 0.0);
    let x1 = -0.5 * barrier.width;
    let x2 = 0.5 * barrier.width;
    let m = mat_mul(
        mat_mul(region_inverse(kout, x2), region_matrix(kin, x2)),
        mat_mul(region_inverse(kin, x1), region_matrix(kout, x1)),
    );
    if m[1][1].norm() == 0.0 {
        return Err(Error::Singular);
    }
    let reflection = -m[1][0] / m[1][1];
    // M11 + M12·R = det(M)/M22 and det(M) = 1; the direct sum cancels catastrophically
    let transmission = m[1][1].inv();
    Ok(OracleAmplitudes {
        transmission,
        reflection,
    })
}

type Mat2 = [[Complex64; 2]; 2];

fn mat_mul(a: Mat2, b: Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn region_matrix(kappa: Complex64, x: f64) -> Mat2 {
    let i = Complex64::new(0.0, 1.0);
    if kappa.norm() == 0.0 {
        let one = Complex64::new(1.0, 0.0);
        return [
            [one, Complex64::new(x, 0.0)],
            [Complex64::new(0.0, 0.0), one],
        ];
    }
    let ep = (i * kappa * x).exp();
    let em = (-i * kappa * x).exp();
    [[ep, em], [i * kappa * ep, -i * kappa * em]]
}

fn region_inverse(kappa: Complex64, x: f64) -> Mat2 {
    let i = Complex64::new(0.0, 1.0);
    if kappa.norm() == 0.0 {
        let one = Complex64::new(1.0, 0.0);
        return [
            [one, Complex64::new(-x, 0.0)],
            [Complex64::new(0.0, 0.0), one],
        ];
    }
    let ep = (i * kappa * x).exp();
    let em = (-i * kappa * x).exp();
    let det = -2.0 * i * kappa;
    [
        [-i * kappa * em / det, -em / det],
        [-i * kappa * ep / det, ep / det],
    ]
}

/// Side from which the plane wave arrives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Incidence {
    /// `e^{ikx}` arriving from `x < −L/2`.
    Left,
    /// `e^{−ikx}` arriving from `x > L/2`.
    Right,
}

/// Continuity-matched stationary solution for one incidence side.
///
/// Interior field is `even·ch(x) + odd·sh(x)` with `ch = cosh(ρx)` and
/// `sh = sinh(ρx)/ρ` (continued analytically through `ρ = 0` and above the barrier).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingSolution {
    pub k: f64,
    pub incidence: Incidence,
    pub reflection: Complex64,
    pub transmission: Complex64,
    pub even: Complex64,
    pub odd: Complex64,
    /// Largest value/derivative mismatch at the two interfaces.
    pub residual: f64,
    rho2: f64,
    half_width: f64,
}

impl MatchingSolution {
    /// `φ(k, x)` and `dφ/dx` in every region.
    pub fn field(&self, x: f64) -> (Complex64, Complex64) {
        let k = self.k;
        let i = Complex64::new(0.0, 1.0);
        let h = self.half_width;
        let e = |kx: f64| Complex64::new(cos(kx), sin(kx));
        let sign = match self.incidence {
            Incidence::Left => 1.0,
            Incidence::Right => -1.0,
        };
        // upstream side: incoming + reflected; downstream side: transmitted
        let upstream = sign * x < -h;
        let downstream = sign * x > h;
        if upstream {
            let v = e(sign * k * x) + self.reflection * e(-sign * k * x);
            let d = i * sign * k * (e(sign * k * x) - self.reflection * e(-sign * k * x));
            (v, d)
        } else if downstream {
            let v = self.transmission * e(sign * k * x);
            (v, i * sign * k * v)
        } else {
            let (ch, sh) = interior_basis(self.rho2, x);
            (
                self.even * ch + self.odd * sh,
                self.even * self.rho2 * sh + self.odd * ch,
            )
        }
    }

    /// `(cosh(ρx), sinh(ρx)/ρ)` for this wavenumber.
    pub(crate) fn interior_basis(&self, x: f64) -> (f64, f64) {
        interior_basis(self.rho2, x)
    }

    /// Interior field only, at any `x` (used at the interfaces themselves).
    pub fn interior(&self, x: f64) -> (Complex64, Complex64) {
        let (ch, sh) = interior_basis(self.rho2, x);
        (
            self.even * ch + self.odd * sh,
            self.even * self.rho2 * sh + self.odd * ch,
        )
    }
}

/// `(cosh(ρx), sinh(ρx)/ρ)` with signed `ρ²`.
pub(crate) fn interior_basis(rho2: f64, x: f64) -> (f64, f64) {
    let y = sqrt(rho2.abs()) * x;
    if rho2 >= 0.0 {
        (cosh(y), x * sinhc(y))
    } else {
        (cos(y), x * sinc(y))
    }
}

/// Solves the four continuity conditions at `x = ±L/2` for one incidence side.
pub fn solve_matching(
    k: f64,
    barrier: &BarrierConfig,
    incidence: Incidence,
) -> Result<MatchingSolution> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::param("k", k, "must be positive and finite"));
    }
    if barrier.width == 0.0 {
        return Err(Error::Degenerate("no interior region at L = 0"));
    }
    let w = barrier.w;
    let rho2 = (w - k) * (w + k);
    let h = 0.5 * barrier.width;
    let i = Complex64::new(0.0, 1.0);
    let zero = Complex64::new(0.0, 0.0);
    let e = |kx: f64| Complex64::new(cos(kx), sin(kx));
    let sign = match incidence {
        Incidence::Left => 1.0,
        Incidence::Right => -1.0,
    };
    // upstream interface xu, downstream interface xd
    let xu = -sign * h;
    let xd = sign * h;
    let (chu, shu) = interior_basis(rho2, xu);
    let (chd, shd) = interior_basis(rho2, xd);
    let ku = sign * k;
    // unknowns: [R, even, odd, T]
    let a = [
        [
            e(-ku * xu),
            -Complex64::from(chu),
            -Complex64::from(shu),
            zero,
        ],
        [
            -i * ku * e(-ku * xu),
            -Complex64::from(rho2 * shu),
            -Complex64::from(chu),
            zero,
        ],
        [
            zero,
            Complex64::from(chd),
            Complex64::from(shd),
            -e(ku * xd),
        ],
        [
            zero,
            Complex64::from(rho2 * shd),
            Complex64::from(chd),
            -i * ku * e(ku * xd),
        ],
    ];
    let b = [-e(ku * xu), -i * ku * e(ku * xu), zero, zero];
    let sol = solve_linear(a, b)?;
    let mut out = MatchingSolution {
        k,
        incidence,
        reflection: sol[0],
        transmission: sol[3],
        even: sol[1],
        odd: sol[2],
        residual: 0.0,
        rho2,
        half_width: h,
    };
    let mut residual: f64 = 0.0;
    for (xi, upstream) in [(xu, true), (xd, false)] {
        let (vi, di) = out.interior(xi);
        let (vo, dout) = exterior_at(&out, xi, upstream);
        let scale = 1.0 + vo.norm().max(vi.norm());
        residual = residual.max((vi - vo).norm() / scale);
        residual = residual.max((di - dout).norm() / (k.max(1.0) * scale));
    }
    out.residual = residual;
    Ok(out)
}

fn exterior_at(sol: &MatchingSolution, x: f64, upstream: bool) -> (Complex64, Complex64) {
    let k = sol.k;
    let i = Complex64::new(0.0, 1.0);
    let sign = match sol.incidence {
        Incidence::Left => 1.0,
        Incidence::Right => -1.0,
    };
    let e = |kx: f64| Complex64::new(cos(kx), sin(kx));
    if upstream {
        let v = e(sign * k * x) + sol.reflection * e(-sign * k * x);
        let d = i * sign * k * (e(sign * k * x) - sol.reflection * e(-sign * k * x));
        (v, d)
    } else {
        let v = sol.transmission * e(sign * k * x);
        (v, i * sign * k * v)
    }
}

fn solve_linear<const N: usize>(
    mut a: [[Complex64; N]; N],
    mut b: [Complex64; N],
) -> Result<[Complex64; N]> {
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&r1, &r2| a[r1][col].norm().total_cmp(&a[r2][col].norm()))
            .unwrap_or(col);
        if a[pivot][col].norm() < 1e-300 {
            return Err(Error::Singular);
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..N {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (v, p) in a[row].iter_mut().zip(pivot_row).skip(col) {
                *v -= f * p;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = [Complex64::new(0.0, 0.0); N];
    for row in (0..N).rev() {
        let mut acc = b[row];
        for c in row + 1..N {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// Interior amplitudes of the decaying/growing exponentials for both incidence sides.
///
/// Left: `α_L e^{−ρx} + β_L e^{ρx}`; right: `α_R e^{ρx} + β_R e^{−ρx}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteriorCoefficients {
    pub alpha_left: Complex64,
    pub beta_left: Complex64,
    pub alpha_right: Complex64,
    pub beta_right: Complex64,
    /// Largest continuity residual over both solutions and both interfaces.
    pub residual: f64,
    pub left: MatchingSolution,
    pub right: MatchingSolution,
}

pub fn interior_matching(k: f64, barrier: &BarrierConfig) -> Result<InteriorCoefficients> {
    let rho = match rho(k, barrier)? {
        EvanescentWavenumber::Evanescent { rho, .. } if k > 0.0 => rho,
        _ => return Err(Error::param("k", k, "interior matching needs 0 < k < w")),
    };
    let left = solve_matching(k, barrier, Incidence::Left)?;
    let right = solve_matching(k, barrier, Incidence::Right)?;
    Ok(InteriorCoefficients {
        alpha_left: 0.5 * (left.even - left.odd / rho),
        beta_left: 0.5 * (left.even + left.odd / rho),
        alpha_right: 0.5 * (right.even + right.odd / rho),
        beta_right: 0.5 * (right.even - right.odd / rho),
        residual: left.residual.max(right.residual),
        left,
        right,
    })
}
