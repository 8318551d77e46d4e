//! α-μ fading links and the minimum of two of them.
//!
//! A gain `g` is α-μ distributed when `g = (Ω^α Y / μ)^{2/α}` with
//! `Y ~ Gamma(μ, 1)`. With integer `μ` the distribution function has the
//! finite form `1 - e^{-y} Σ_{j<μ} y^j / j!`, `y = μ g^{α/2} / Ω^α`, and the
//! minimum of two links with common `(α, μ)` is a finite mixture of α-μ-like
//! laws with `Ω^α` replaced by `Ω̃ = 1 / (Ω_s^-α + Ω_w^-α)`.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::specfun::gamma::{ln_factorial, ln_gamma_real};
use crate::specfun::quad::{gamma_mixture_expectation, Estimate, GammaComponent, GammaMixture};
use crate::{Error, Result};

/// One α-μ fading link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaMuChannel {
    alpha: u32,
    mu: u32,
    omega: f64,
}

impl AlphaMuChannel {
    pub fn new(alpha: u32, mu: u32, omega: f64) -> Result<Self> {
        if alpha == 0 || mu == 0 {
            return Err(Error::InvalidChannel(format!(
                "alpha and mu must be at least 1, got alpha={alpha}, mu={mu}"
            )));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidChannel(format!(
                "omega must be positive, got {omega}"
            )));
        }
        Ok(Self { alpha, mu, omega })
    }

    /// Like [`AlphaMuChannel::new`] but takes real `alpha`/`mu` and rejects
    /// non-integers, for configuration input.
    pub fn from_real(alpha: f64, mu: f64, omega: f64) -> Result<Self> {
        let to_int = |name: &str, v: f64| -> Result<u32> {
            if v.fract() != 0.0 || !(1.0..=u32::MAX as f64).contains(&v) {
                return Err(Error::InvalidChannel(format!(
                    "{name} must be a positive integer, got {v}"
                )));
            }
            Ok(v as u32)
        };
        Self::new(to_int("alpha", alpha)?, to_int("mu", mu)?, omega)
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn mu(&self) -> u32 {
        self.mu
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `Ω^α`, the scale that actually enters the law.
    pub fn omega_alpha(&self) -> f64 {
        self.omega.powi(self.alpha as i32)
    }

    fn y(&self, x: f64) -> f64 {
        self.mu as f64 * x.powf(0.5 * self.alpha as f64) / self.omega_alpha()
    }
}

impl GammaMixture for AlphaMuChannel {
    fn components(&self) -> Vec<GammaComponent> {
        vec![GammaComponent {
            weight: 1.0,
            shape: self.mu as f64,
            scale: self.omega_alpha() / self.mu as f64,
            power: 2.0 / self.alpha as f64,
        }]
    }
}

/// Strong and weak links sharing `(α, μ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelPair {
    strong: AlphaMuChannel,
    weak: AlphaMuChannel,
    omega_tilde: f64,
}

impl ChannelPair {
    /// Requires `weak.Ω^α < strong.Ω^α`.
    pub fn new(strong: AlphaMuChannel, weak: AlphaMuChannel) -> Result<Self> {
        let pair = Self::new_unordered(strong, weak)?;
        if weak.omega_alpha() >= strong.omega_alpha() {
            return Err(Error::InvalidChannel(format!(
                "weak link must be weaker: Ω_w^α = {} is not below Ω_s^α = {}",
                weak.omega_alpha(),
                strong.omega_alpha()
            )));
        }
        Ok(pair)
    }

    /// Skips the ordering check so symmetric pairs can be built for testing.
    pub fn new_unordered(strong: AlphaMuChannel, weak: AlphaMuChannel) -> Result<Self> {
        if strong.alpha != weak.alpha || strong.mu != weak.mu {
            return Err(Error::InvalidChannel(format!(
                "links must share alpha and mu: ({}, {}) vs ({}, {})",
                strong.alpha, strong.mu, weak.alpha, weak.mu
            )));
        }
        let omega_tilde = 1.0 / (strong.omega_alpha().recip() + weak.omega_alpha().recip());
        Ok(Self {
            strong,
            weak,
            omega_tilde,
        })
    }

    pub fn strong(&self) -> &AlphaMuChannel {
        &self.strong
    }

    pub fn weak(&self) -> &AlphaMuChannel {
        &self.weak
    }

    pub fn alpha(&self) -> u32 {
        self.strong.alpha
    }

    pub fn mu(&self) -> u32 {
        self.strong.mu
    }

    /// `1 / (Ω_s^-α + Ω_w^-α)`.
    pub fn omega_tilde(&self) -> f64 {
        self.omega_tilde
    }

    pub fn min_gain(&self) -> MinGain {
        MinGain { pair: *self }
    }
}

/// Law of `min(g_s, g_w)` for a [`ChannelPair`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinGain {
    pair: ChannelPair,
}

impl MinGain {
    pub fn pair(&self) -> &ChannelPair {
        &self.pair
    }

    /// The `2μ` mixture terms as `(A, B, m)`: `f_A · (e^{-y_B} y_B^m / m!)`
    /// with `A`, `B` ranging over the two links.
    fn terms(&self) -> impl Iterator<Item = (&AlphaMuChannel, &AlphaMuChannel, u32)> + '_ {
        let p = &self.pair;
        let mu = p.mu();
        [(&p.strong, &p.weak), (&p.weak, &p.strong)]
            .into_iter()
            .flat_map(move |(a, b)| (0..mu).map(move |m| (a, b, m)))
    }
}

impl GammaMixture for MinGain {
    fn components(&self) -> Vec<GammaComponent> {
        let p = &self.pair;
        let mu = p.mu() as f64;
        let wt = p.omega_tilde;
        self.terms()
            .map(|(a, b, m)| {
                let shape = mu + m as f64;
                let ln_w = shape * wt.ln() + ln_gamma_real(shape)
                    - mu * a.omega_alpha().ln()
                    - ln_gamma_real(mu)
                    - ln_factorial(m)
                    - m as f64 * b.omega_alpha().ln();
                GammaComponent {
                    weight: ln_w.exp(),
                    shape,
                    scale: wt / mu,
                    power: 2.0 / p.alpha() as f64,
                }
            })
            .collect()
    }
}

/// A gain that never fades; handy as a reference service process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterministicGain(pub f64);

/// Anything that can average a kernel over its gain and draw gains.
pub trait GainLaw: Sync {
    fn expect<F: Fn(f64) -> f64>(&self, kernel: F) -> Result<Estimate>;
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;
}

impl GainLaw for AlphaMuChannel {
    fn expect<F: Fn(f64) -> f64>(&self, kernel: F) -> Result<Estimate> {
        gamma_mixture_expectation(&self.components(), kernel)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        sample_gain(self, rng)
    }
}

impl GainLaw for MinGain {
    fn expect<F: Fn(f64) -> f64>(&self, kernel: F) -> Result<Estimate> {
        gamma_mixture_expectation(&self.components(), kernel)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        sample_gain(&self.pair.strong, rng).min(sample_gain(&self.pair.weak, rng))
    }
}

impl GainLaw for DeterministicGain {
    fn expect<F: Fn(f64) -> f64>(&self, kernel: F) -> Result<Estimate> {
        Ok(Estimate::exact(kernel(self.0)))
    }

    fn sample<R: Rng + ?Sized>(&self, _rng: &mut R) -> f64 {
        self.0
    }
}

/// Density of the gain. Fails only at `x = 0` for `α = μ = 1`, where it
/// diverges.
pub fn gain_pdf(ch: &AlphaMuChannel, x: f64) -> Result<f64> {
    let (alpha, mu) = (ch.alpha as f64, ch.mu as f64);
    let exponent = 0.5 * alpha * mu - 1.0;
    let ln_const = alpha.ln() + mu * mu.ln()
        - std::f64::consts::LN_2
        - mu * ch.omega_alpha().ln()
        - ln_gamma_real(mu);
    if x == 0.0 {
        return match exponent.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => Ok(0.0),
            Some(std::cmp::Ordering::Equal) => Ok(ln_const.exp()),
            _ => Err(Error::UnboundedAtOrigin),
        };
    }
    if !(x > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gain must be nonnegative, got {x}"
        )));
    }
    Ok((ln_const + exponent * x.ln() - ch.y(x)).exp())
}

/// `P(μ, y)`, the regularized lower incomplete gamma function at integer
/// shape.
fn lower_regularized(mu: u32, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    let m = mu as f64;
    if y < m + 1.0 {
        // series: y^μ e^{-y} / Γ(μ+1) Σ y^k / ((μ+1)...(μ+k))
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            term *= y / (m + k);
            sum += term;
            k += 1.0;
        }
        (m * y.ln() - y - ln_gamma_real(m + 1.0)).exp() * sum
    } else {
        1.0 - upper_regularized(mu, y)
    }
}

/// `Q(μ, y) = e^{-y} Σ_{j<μ} y^j / j!`.
fn upper_regularized(mu: u32, y: f64) -> f64 {
    if y <= 0.0 {
        return 1.0;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..mu {
        term *= y / j as f64;
        sum += term;
    }
    (sum.ln() - y).exp()
}

pub fn gain_cdf(ch: &AlphaMuChannel, x: f64) -> f64 {
    lower_regularized(ch.mu, ch.y(x.max(0.0)))
}

pub fn gain_survival(ch: &AlphaMuChannel, x: f64) -> f64 {
    upper_regularized(ch.mu, ch.y(x.max(0.0)))
}

/// Density of `min(g_s, g_w)`: `f_s S_w + f_w S_s`.
pub fn min_gain_pdf(pair: &ChannelPair, x: f64) -> Result<f64> {
    if x == 0.0 && pair.alpha() == 1 && pair.mu() == 1 {
        return Err(Error::UnboundedAtOrigin);
    }
    let (s, w) = (&pair.strong, &pair.weak);
    Ok(gain_pdf(s, x)? * gain_survival(w, x) + gain_pdf(w, x)? * gain_survival(s, x))
}

/// `E[g^k] = Ω^{2k} Γ(μ + 2k/α) / (μ^{2k/α} Γ(μ))`.
pub fn gain_moment(ch: &AlphaMuChannel, k: u32) -> f64 {
    mixture_moment(&ch.components(), k)
}

/// `E[g_min^k]` for `k ∈ {1, 2}`.
pub fn min_gain_moment(pair: &ChannelPair, k: u32) -> Result<f64> {
    if !(1..=2).contains(&k) {
        return Err(Error::UnsupportedOrder(k));
    }
    Ok(mixture_moment(&pair.min_gain().components(), k))
}

fn mixture_moment(components: &[GammaComponent], k: u32) -> f64 {
    components
        .iter()
        .map(|c| {
            let r = c.power * k as f64;
            c.weight
                * (r * c.scale.ln() + ln_gamma_real(c.shape + r) - ln_gamma_real(c.shape)).exp()
        })
        .sum()
}

/// Draws `(Ω^α Y / μ)^{2/α}` with `Y ~ Gamma(μ, 1)`.
pub fn sample_gain<R: Rng + ?Sized>(ch: &AlphaMuChannel, rng: &mut R) -> f64 {
    let y: f64 = Gamma::new(ch.mu as f64, 1.0)
        .expect("mu >= 1 is a valid gamma shape")
        .sample(rng);
    (ch.omega_alpha() * y / ch.mu as f64).powf(2.0 / ch.alpha as f64)
}
