//! High- and low-SNR approximations of the NOMA effective rate.

use std::f64::consts::{LN_2, LOG2_E};

use super::{NomaSystem, Provenance, RateResult, User};
use crate::channel::{gain_moment, min_gain_moment};
use crate::specfun::{digamma, ln_gamma_real};
use crate::{Error, Result};

/// High-SNR rate.
///
/// Strong user: `log2(a_s ρ) - (1/ν) log2[(μ^{1/α}/Ω)^{2ν} Γ(μ - 2ν/α)/Γ(μ)]`,
/// valid only for `αμ > 2ν`. Weak user: the interference-limited ceiling
/// `log2(1 + a_w/a_s)`.
pub fn er_high_snr(sys: &NomaSystem, user: User) -> Result<RateResult> {
    let value = match user {
        User::Weak => (1.0 + sys.a_w() / sys.a_s()).log2(),
        User::Strong => {
            if !(sys.rho() > 0.0) {
                return Err(Error::InvalidParameter(
                    "high-SNR rate needs a positive SNR".into(),
                ));
            }
            let ch = sys.pair().strong();
            let (alpha, mu, omega) = (ch.alpha() as f64, ch.mu() as f64, ch.omega());
            let nu = sys.nu();
            if alpha * mu <= 2.0 * nu {
                return Err(Error::ValidityViolation {
                    alpha_mu: alpha * mu,
                    two_nu: 2.0 * nu,
                });
            }
            let scale = 2.0 * (mu.log2() / alpha - omega.log2());
            let gamma_term = if nu == 0.0 {
                // limit ν → 0: -(2/α) ψ(μ) / ln 2
                -2.0 * digamma(mu) / (alpha * LN_2)
            } else {
                (ln_gamma_real(mu - 2.0 * nu / alpha) - ln_gamma_real(mu)) / (nu * LN_2)
            };
            (sys.a_s() * sys.rho()).log2() - scale - gamma_term
        }
    };
    Ok(RateResult::new(value, Provenance::ClosedForm, 0.0))
}

/// First and second derivatives of the effective rate in `ρ` at `ρ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub first: f64,
    pub second: f64,
}

pub fn er_derivatives(sys: &NomaSystem, user: User) -> Result<Derivatives> {
    let nu = sys.nu();
    let (a_s, a_w) = (sys.a_s(), sys.a_w());
    Ok(match user {
        User::Strong => {
            let ch = sys.pair().strong();
            let (m1, m2) = (gain_moment(ch, 1), gain_moment(ch, 2));
            Derivatives {
                first: LOG2_E * a_s * m1,
                second: LOG2_E * a_s * a_s * (nu * m1 * m1 - (nu + 1.0) * m2),
            }
        }
        User::Weak => {
            let (m1, m2) = (
                min_gain_moment(sys.pair(), 1)?,
                min_gain_moment(sys.pair(), 2)?,
            );
            Derivatives {
                first: LOG2_E * a_w * m1,
                second: LOG2_E * a_w * (nu * a_w * m1 * m1 - ((nu + 1.0) * a_w + 2.0 * a_s) * m2),
            }
        }
    })
}

/// Second-order Taylor value `ρ Ṙ + ρ² R̈ / 2`.
pub fn er_low_snr(sys: &NomaSystem, user: User) -> Result<RateResult> {
    let d = er_derivatives(sys, user)?;
    let rho = sys.rho();
    Ok(RateResult::new(
        rho * d.first + 0.5 * rho * rho * d.second,
        Provenance::ClosedForm,
        0.0,
    ))
}

/// `(E_b/σ²)_min = 1/Ṙ`, as a linear ratio.
pub fn min_energy_per_bit(sys: &NomaSystem, user: User) -> Result<f64> {
    let d = er_derivatives(sys, user)?;
    if !(d.first > 0.0) {
        return Err(Error::Degenerate(
            "first derivative of the rate is not positive",
        ));
    }
    Ok(1.0 / d.first)
}

/// Wideband slope `-2 Ṙ² ln 2 / R̈` in bits/s/Hz per 3 dB.
pub fn wideband_slope(sys: &NomaSystem, user: User) -> Result<f64> {
    let d = er_derivatives(sys, user)?;
    if !(d.second < 0.0) {
        return Err(Error::Degenerate(
            "second derivative of the rate is not negative",
        ));
    }
    Ok(-2.0 * d.first * d.first * LN_2 / d.second)
}
