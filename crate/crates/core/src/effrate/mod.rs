//! Effective rates of the two NOMA users and the OMA baseline.
//!
//! The effective rate at delay exponent `ν` is
//! `R = -(1/ν) log2 E[(1 + γ)^-ν]` with SINRs
//!
//! * strong user: `γ_s = a_s ρ g_s`
//! * weak user: `γ_w = a_w ρ g_min / (a_s ρ g_min + 1)`
//! * OMA user `i`: `ρ g_i`, with exponent `ν/2` for the half-slot share.
//!
//! Two evaluation strategies exist. Quadrature averages the kernel over the
//! fading law; the closed form goes through Meijer-G (strong user, OMA,
//! ergodic rates) or bivariate Fox-H (weak user) contour integrals.

mod approx;
pub(crate) mod closed;
mod search;

use std::f64::consts::LN_2;

pub use approx::{
    er_derivatives, er_high_snr, er_low_snr, min_energy_per_bit, wideband_slope, Derivatives,
};
pub use search::{power_search, PowerChoice, DEFAULT_R_TARGET};

use crate::channel::{AlphaMuChannel, ChannelPair, GainLaw};
use crate::specfun::{ContourConfig, Estimate, GammaMixture};
use crate::{Error, Result};

/// Delay-QoS exponent `θ` with block product `TB`; `ν = θ·TB / ln 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayQos {
    theta: f64,
    block_time_bandwidth: f64,
}

impl DelayQos {
    pub fn new(theta: f64, block_time_bandwidth: f64) -> Result<Self> {
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "theta must be nonnegative, got {theta}"
            )));
        }
        if !(block_time_bandwidth > 0.0 && block_time_bandwidth.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "block time-bandwidth product must be positive, got {block_time_bandwidth}"
            )));
        }
        Ok(Self {
            theta,
            block_time_bandwidth,
        })
    }

    /// `θ` with `TB = 1`.
    pub fn with_theta(theta: f64) -> Result<Self> {
        Self::new(theta, 1.0)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn block_time_bandwidth(&self) -> f64 {
        self.block_time_bandwidth
    }

    pub fn nu(&self) -> f64 {
        self.theta * self.block_time_bandwidth / LN_2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum User {
    Strong,
    Weak,
}

impl User {
    pub const BOTH: [User; 2] = [User::Strong, User::Weak];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalStrategy {
    ClosedForm,
    #[default]
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl From<EvalStrategy> for Provenance {
    fn from(s: EvalStrategy) -> Self {
        match s {
            EvalStrategy::ClosedForm => Provenance::ClosedForm,
            EvalStrategy::Quadrature => Provenance::Quadrature,
        }
    }
}

/// A rate in bits per channel use with its origin and an absolute error
/// estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    pub value: f64,
    pub provenance: Provenance,
    pub error: f64,
}

impl RateResult {
    fn new(value: f64, provenance: Provenance, error: f64) -> Self {
        Self {
            value,
            provenance,
            error: error.abs(),
        }
    }
}

/// A two-user downlink: channels, strong-user power share `a_s`, linear SNR
/// `ρ` and delay QoS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NomaSystem {
    pair: ChannelPair,
    a_s: f64,
    rho: f64,
    qos: DelayQos,
}

impl NomaSystem {
    /// `a_s` must satisfy `0 < a_s < a_w = 1 - a_s`.
    pub fn new(pair: ChannelPair, a_s: f64, rho: f64, qos: DelayQos) -> Result<Self> {
        if !(a_s > 0.0 && a_s < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "strong-user power share must lie in (0, 0.5), got {a_s}"
            )));
        }
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "SNR must be nonnegative, got {rho}"
            )));
        }
        Ok(Self {
            pair,
            a_s,
            rho,
            qos,
        })
    }

    pub fn pair(&self) -> &ChannelPair {
        &self.pair
    }

    pub fn a_s(&self) -> f64 {
        self.a_s
    }

    pub fn a_w(&self) -> f64 {
        1.0 - self.a_s
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn qos(&self) -> &DelayQos {
        &self.qos
    }

    pub fn nu(&self) -> f64 {
        self.qos.nu()
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.pair, self.a_s, rho, self.qos)
    }

    pub fn with_a_s(&self, a_s: f64) -> Result<Self> {
        Self::new(self.pair, a_s, self.rho, self.qos)
    }

    pub fn with_qos(&self, qos: DelayQos) -> Self {
        Self { qos, ..*self }
    }

    /// NOMA SINR of `user` as a function of that user's effective gain.
    pub fn sinr(&self, user: User, g: f64) -> f64 {
        match user {
            User::Strong => self.a_s * self.rho * g,
            User::Weak => self.a_w() * self.rho * g / (self.a_s * self.rho * g + 1.0),
        }
    }

    /// `ln(1 + γ)` for `user`, written to avoid cancellation at small `ρ`.
    pub fn ln1p_sinr(&self, user: User, g: f64) -> f64 {
        match user {
            User::Strong => (self.a_s * self.rho * g).ln_1p(),
            User::Weak => (self.rho * g).ln_1p() - (self.a_s * self.rho * g).ln_1p(),
        }
    }

    /// Channel whose own gain drives the OMA rate of `user`.
    pub fn oma_channel(&self, user: User) -> &AlphaMuChannel {
        match user {
            User::Strong => self.pair.strong(),
            User::Weak => self.pair.weak(),
        }
    }
}

/// `-(1/ν') log2(1 + m)` from `m = E[(1+γ)^-ν - 1]`, with `ν'` the prefactor.
fn rate_from_expm1(m: Estimate, prefactor_nu: f64, provenance: Provenance) -> RateResult {
    let value = -m.value.ln_1p() / (prefactor_nu * LN_2);
    let error = m.error / ((1.0 + m.value) * prefactor_nu * LN_2);
    RateResult::new(value, provenance, error)
}

/// `E[(1+γ)^-ϖ - 1]` for the NOMA SINR of `user` by quadrature.
pub(crate) fn noma_mellin_expm1(sys: &NomaSystem, user: User, varpi: f64) -> Result<Estimate> {
    let kernel = |g: f64| (-varpi * sys.ln1p_sinr(user, g)).exp_m1();
    match user {
        User::Strong => sys.pair.strong().expect(kernel),
        User::Weak => sys.pair.min_gain().expect(kernel),
    }
}

/// `E[(1+γ)^-ϖ]` by quadrature on the kernel itself, for when the value is
/// too small for the `expm1` form to carry relative precision.
pub(crate) fn noma_mellin_direct(sys: &NomaSystem, user: User, varpi: f64) -> Result<Estimate> {
    let kernel = |g: f64| (-varpi * sys.ln1p_sinr(user, g)).exp();
    match user {
        User::Strong => sys.pair.strong().expect(kernel),
        User::Weak => sys.pair.min_gain().expect(kernel),
    }
}

/// `ln E[(1+γ)^-ϖ]` and its absolute error through the closed forms.
pub(crate) fn noma_ln_mellin_closed(
    sys: &NomaSystem,
    user: User,
    varpi: f64,
    cfg_meijer: &ContourConfig,
    cfg_fox: &ContourConfig,
) -> Result<(f64, f64)> {
    let alpha = sys.pair.alpha();
    match user {
        User::Strong => {
            let comp = sys.pair.strong().components()[0];
            closed::mellin_component(alpha, &comp, sys.a_s * sys.rho, varpi, cfg_meijer)
        }
        User::Weak => {
            let comps = sys.pair.min_gain().components();
            let m = closed::weak_mellin(alpha, &comps, sys.rho, sys.a_s, varpi, cfg_fox)?;
            if !(m.value > 0.0) {
                return Err(Error::NonConvergence {
                    what: "Fox-H Mellin transform lost positivity",
                    previous: m.value,
                    last: m.value,
                });
            }
            Ok((m.value.ln(), m.error / m.value))
        }
    }
}

/// Effective rate of `user` under NOMA.
pub fn er_noma(sys: &NomaSystem, user: User, strategy: EvalStrategy) -> Result<RateResult> {
    let nu = sys.nu();
    if nu == 0.0 {
        return ergodic_rate(sys, user, strategy);
    }
    if sys.rho == 0.0 {
        return Ok(RateResult::new(0.0, strategy.into(), 0.0));
    }
    match strategy {
        EvalStrategy::Quadrature => {
            let m = noma_mellin_expm1(sys, user, nu)?;
            Ok(rate_from_expm1(m, nu, Provenance::Quadrature))
        }
        EvalStrategy::ClosedForm => {
            let (ln_m, rel) = noma_ln_mellin_closed(
                sys,
                user,
                nu,
                &ContourConfig::meijer(),
                &ContourConfig::fox(),
            )?;
            Ok(RateResult::new(
                -ln_m / (nu * LN_2),
                Provenance::ClosedForm,
                rel / (nu * LN_2),
            ))
        }
    }
}

/// Effective rate of `user` under OMA: full power, half the slot, so the
/// exponent inside the expectation is `ν/2`.
pub fn er_oma(sys: &NomaSystem, user: User, strategy: EvalStrategy) -> Result<RateResult> {
    let nu = sys.nu();
    let ch = sys.oma_channel(user);
    if nu == 0.0 {
        let c = ergodic_of(ch, sys.rho, strategy)?;
        return Ok(RateResult::new(0.5 * c.value, c.provenance, 0.5 * c.error));
    }
    if sys.rho == 0.0 {
        return Ok(RateResult::new(0.0, strategy.into(), 0.0));
    }
    let varpi = 0.5 * nu;
    match strategy {
        EvalStrategy::Quadrature => {
            let m = ch.expect(|g| (-varpi * (sys.rho * g).ln_1p()).exp_m1())?;
            Ok(rate_from_expm1(m, nu, Provenance::Quadrature))
        }
        EvalStrategy::ClosedForm => {
            let comp = ch.components()[0];
            let (ln_m, rel) = closed::mellin_component(
                ch.alpha(),
                &comp,
                sys.rho,
                varpi,
                &ContourConfig::meijer(),
            )?;
            Ok(RateResult::new(
                -ln_m / (nu * LN_2),
                Provenance::ClosedForm,
                rel / (nu * LN_2),
            ))
        }
    }
}

fn ergodic_of(ch: &AlphaMuChannel, c: f64, strategy: EvalStrategy) -> Result<RateResult> {
    if c == 0.0 {
        return Ok(RateResult::new(0.0, strategy.into(), 0.0));
    }
    let e = match strategy {
        EvalStrategy::Quadrature => {
            let e = ch.expect(|g| (c * g).ln_1p())?;
            Estimate {
                value: e.value / LN_2,
                error: e.error / LN_2,
            }
        }
        EvalStrategy::ClosedForm => {
            closed::ergodic_component(ch.alpha(), &ch.components()[0], c, &ContourConfig::meijer())?
        }
    };
    Ok(RateResult::new(e.value, strategy.into(), e.error))
}

/// Ergodic rate `E[log2(1 + γ)]` of `user` under NOMA.
pub fn ergodic_rate(sys: &NomaSystem, user: User, strategy: EvalStrategy) -> Result<RateResult> {
    match (user, strategy) {
        (User::Strong, _) => ergodic_of(sys.pair.strong(), sys.a_s * sys.rho, strategy),
        (User::Weak, _) if sys.rho == 0.0 => Ok(RateResult::new(0.0, strategy.into(), 0.0)),
        (User::Weak, EvalStrategy::Quadrature) => {
            let e = sys
                .pair
                .min_gain()
                .expect(|g| sys.ln1p_sinr(User::Weak, g))?;
            Ok(RateResult::new(
                e.value / LN_2,
                Provenance::Quadrature,
                e.error / LN_2,
            ))
        }
        (User::Weak, EvalStrategy::ClosedForm) => {
            let cfg = ContourConfig::meijer();
            let alpha = sys.pair.alpha();
            let mut value = 0.0;
            let mut error = 0.0;
            for comp in sys.pair.min_gain().components() {
                let full = closed::ergodic_component(alpha, &comp, sys.rho, &cfg)?;
                let interference =
                    closed::ergodic_component(alpha, &comp, sys.a_s * sys.rho, &cfg)?;
                value += comp.weight * (full.value - interference.value);
                error += comp.weight * (full.error + interference.error);
            }
            Ok(RateResult::new(value, Provenance::ClosedForm, error))
        }
    }
}

/// Sum of both users' rates from `rate`.
fn sum_rate<F>(sys: &NomaSystem, rate: F) -> Result<f64>
where
    F: Fn(&NomaSystem, User) -> Result<RateResult>,
{
    Ok(rate(sys, User::Strong)?.value + rate(sys, User::Weak)?.value)
}

/// NOMA sum effective rate.
pub fn sum_er_noma(sys: &NomaSystem, strategy: EvalStrategy) -> Result<f64> {
    sum_rate(sys, |s, u| er_noma(s, u, strategy))
}

/// Ergodic sum rate minus effective sum rate under NOMA.
pub fn rate_loss(sys: &NomaSystem) -> Result<f64> {
    let ergodic = sum_rate(sys, |s, u| ergodic_rate(s, u, EvalStrategy::Quadrature))?;
    let effective = sum_er_noma(sys, EvalStrategy::Quadrature)?;
    Ok(ergodic - effective)
}

/// NOMA minus OMA sum effective rate.
pub fn noma_oma_gap(sys: &NomaSystem) -> Result<f64> {
    let noma = sum_er_noma(sys, EvalStrategy::Quadrature)?;
    let oma = sum_rate(sys, |s, u| er_oma(s, u, EvalStrategy::Quadrature))?;
    Ok(noma - oma)
}
