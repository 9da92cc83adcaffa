//! Stationary-phase tunneling times for the one-dimensional rectangular barrier.
//!
//! The crate is `no_std` (it needs `alloc`) and deterministic. Every public
//! quantity is expressed in units where `ħ = 1`; the CLI companion crate
//! further fixes `m = 1` and measures lengths in units of the packet width `a`.
//!
//! Layout:
//!
//! * [`barrier`]: single-wavenumber scattering data (|T|, Θ, the symmetric
//!   collision amplitudes and their unimodular sum, a transfer-matrix oracle
//!   and the interface matching solver).
//! * [`phase_times`]: transit, opaque-limit and scattering phase times and the
//!   dimensionless rate curves.
//! * [`spectral`]: the transmission-modulated momentum distribution, its
//!   maximum, the distortion onset and cut-off spectra.
//! * [`wavepacket`]: direct spectral synthesis of packets and peak tracking.

#![cfg_attr(not(any(test, feature = "std")), no_std)]
// `!(x > 0.0)` is how NaN gets rejected alongside out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod barrier;
pub mod error;
pub mod math;
pub mod numdiff;
pub mod optimize;
pub mod phase_times;
pub mod quadrature;
pub mod spectral;
pub mod wavepacket;

pub use barrier::{
    BarrierConfig, EvanescentWavenumber, InteriorCoefficients, ScatteringAmplitudes,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use phase_times::{PhaseTimeResult, TimeMethod, TimeParams};
pub use spectral::{DistortionReport, GaussianSpectrum, KmaxResult};
pub use wavepacket::{PacketField, QuadratureSpec};
