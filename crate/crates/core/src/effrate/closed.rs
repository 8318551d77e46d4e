//! Contour-integral closed forms for expectations over one generalized-gamma
//! component `x = (s·Y)^{2/α}`, `Y ~ Gamma(k)`.
//!
//! With `z = 1 / (4 c^α s²)` and `Δ(n, y) = {(y + j)/n : j < n}`:
//!
//! ```text
//! E[(1 + c x)^-ϖ]  = α^ϖ G^{2+α,α}_{α,2+α}[z | Δ(α, 1-αk/2); Δ(2,0), Δ(α, ϖ-αk/2)]
//!                    / (√2 (2π)^{α-1/2} Γ(k) Γ(ϖ) (s c^{α/2})^k)
//! E[log2(1 + c x)] = G^{2+2α,α}_{2α,2+2α}[z | ζ, ζ+1/α; Δ(2,0), ζ, ζ]
//!                    / (√2 ln2 (2π)^{α-1/2} Γ(k) (s c^{α/2})^k),   ζ = Δ(α, -αk/2)
//! ```
//!
//! The weak-user kernel `((1 + ρx)/(1 + a_s ρx))^-ϖ` has no univariate form;
//! its expectation is `N(z1, z2) / Γ(k)` with `N` the normalized bivariate
//! Fox-H value and `z_i = c_i s^{2/α}`.

use std::f64::consts::{LN_2, PI};

use crate::specfun::quad::Estimate;
use crate::specfun::{
    fox_h2_normalized, ln_gamma_real, meijer_g_scaled, ContourConfig, FoxH2Spec, GammaComponent,
    MeijerGSpec,
};
use crate::{Error, Result};

fn delta(n: u32, y: f64) -> impl Iterator<Item = f64> {
    (0..n).map(move |j| (y + j as f64) / n as f64)
}

fn ln_common(alpha: f64, comp: &GammaComponent, c: f64) -> f64 {
    -0.5 * LN_2
        - (alpha - 0.5) * (2.0 * PI).ln()
        - ln_gamma_real(comp.shape)
        - comp.shape * (comp.scale.ln() + 0.5 * alpha * c.ln())
}

fn z_arg(alpha: f64, comp: &GammaComponent, c: f64) -> f64 {
    (-(4f64.ln()) - alpha * c.ln() - 2.0 * comp.scale.ln()).exp()
}

/// `E[(1 + c x)^-ϖ]` for one component, in natural-log form with the
/// relative error of the value.
pub(crate) fn mellin_component(
    alpha: u32,
    comp: &GammaComponent,
    c: f64,
    varpi: f64,
    cfg: &ContourConfig,
) -> Result<(f64, f64)> {
    let a = alpha as f64;
    let k = comp.shape;
    let spec = MeijerGSpec::new(
        delta(alpha, 1.0 - 0.5 * a * k).collect(),
        [0.0, 0.5]
            .into_iter()
            .chain(delta(alpha, varpi - 0.5 * a * k))
            .collect(),
        2 + alpha as usize,
        alpha as usize,
    )?;
    let g = meijer_g_scaled(&spec, z_arg(a, comp, c), cfg)?;
    if !(g.mantissa > 0.0) {
        return Err(Error::NonConvergence {
            what: "Meijer-G Mellin transform lost positivity",
            previous: g.mantissa,
            last: g.mantissa,
        });
    }
    let ln_value = varpi * a.ln() + g.ln_value() + ln_common(a, comp, c) - ln_gamma_real(varpi);
    Ok((ln_value, g.error / g.mantissa))
}

/// `E[log2(1 + c x)]` for one component.
pub(crate) fn ergodic_component(
    alpha: u32,
    comp: &GammaComponent,
    c: f64,
    cfg: &ContourConfig,
) -> Result<Estimate> {
    let a = alpha as f64;
    let k = comp.shape;
    let zeta: Vec<f64> = delta(alpha, -0.5 * a * k).collect();
    let chi = delta(alpha, 1.0 - 0.5 * a * k);
    let spec = MeijerGSpec::new(
        zeta.iter().copied().chain(chi).collect(),
        [0.0, 0.5]
            .into_iter()
            .chain(zeta.iter().copied())
            .chain(zeta.iter().copied())
            .collect(),
        2 + 2 * alpha as usize,
        alpha as usize,
    )?;
    let g = meijer_g_scaled(&spec, z_arg(a, comp, c), cfg)?;
    let scale = (g.ln_scale + ln_common(a, comp, c) - LN_2.ln()).exp();
    Ok(Estimate {
        value: g.mantissa * scale,
        error: g.error * scale,
    })
}

/// `E[((1 + ρx)/(1 + a_s ρx))^-ϖ]` over a mixture of components.
pub(crate) fn weak_mellin(
    alpha: u32,
    components: &[GammaComponent],
    rho: f64,
    a_s: f64,
    varpi: f64,
    cfg: &ContourConfig,
) -> Result<Estimate> {
    let mut value = 0.0;
    let mut error = 0.0;
    for comp in components {
        let spec = FoxH2Spec::new(alpha, comp.shape, varpi)?;
        let base = comp.scale.powf(comp.power);
        let n = fox_h2_normalized(&spec, rho * base, a_s * rho * base, cfg)?;
        let w = comp.weight * (-ln_gamma_real(comp.shape)).exp();
        value += w * n.value;
        error += w * n.error;
    }
    Ok(Estimate { value, error })
}
