//! Delay-violation-probability bounds and effective rates for a two-user
//! downlink NOMA system (and its OMA baseline) over α-μ fading.
//!
//! Every closed-form quantity is paired with an independent evaluation path:
//! direct quadrature over the fading law, Mellin–Barnes contour integrals for
//! the Meijer-G / bivariate Fox-H forms, and Monte Carlo sampling.
//!
//! Module map:
//!
//! * [`channel`]: α-μ gain densities, minimum-gain law, moments, sampling.
//! * [`specfun`]: log-gamma, contour integrals, quadrature kernels.
//! * [`effrate`]: effective/ergodic rates, SNR approximations, power search.
//! * [`snc`]: service-process Mellin transforms and the delay bound.
//! * [`sim`]: Monte Carlo rate estimates and a slotted fluid-queue simulator.

pub mod channel;
pub mod effrate;
mod error;
pub mod sim;
pub mod snc;
pub mod specfun;

pub use channel::{AlphaMuChannel, ChannelPair, DeterministicGain, GainLaw, MinGain};
pub use effrate::{DelayQos, EvalStrategy, NomaSystem, Provenance, RateResult, User};
pub use error::{Error, Result};

/// Converts a power ratio in decibels to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
