//! Special functions and quadrature.

pub mod contour;
pub mod gamma;
pub mod quad;

pub use contour::{
    fox_h2, fox_h2_normalized, meijer_g, meijer_g_scaled, ContourConfig, ContourValue, FoxH2Spec,
    MeijerGSpec, ScaledValue,
};
pub use gamma::{digamma, ln_factorial, ln_gamma, ln_gamma_real, pochhammer, recip_gamma};
pub use quad::{
    gamma_mixture_expectation, integrate, integrate_half_line, laguerre_expectation, Estimate,
    GammaComponent, GammaMixture, LaguerreRule,
};
