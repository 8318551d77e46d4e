//! Mellin–Barnes contour integrals: univariate Meijer-G and the bivariate
//! Fox-H family that shows up in the weak-user closed forms.
//!
//! Integrands are built in log space, evaluated on straight vertical lines
//! with the trapezoid rule, and rescaled by their largest exponent before
//! summation. Conjugate symmetry (`f(c - it) = conj f(c + it)` for real
//! parameters and positive arguments) halves the work.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::gamma::{ln_gamma_real, ln_gamma_unchecked, pochhammer, recip_gamma};
use crate::{Error, Result};

/// Contour placement and resolution.
///
/// `None` fields are chosen automatically: the offset at the real-axis
/// saddle of the integrand inside the pole-free gap (kept clear of the
/// poles), half-height where the integrand has decayed by `e^-45`
/// relative to its peak, and a step that resolves both the nearest pole and
/// the oscillation of `z^s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourConfig {
    pub offset: Option<f64>,
    pub offset2: Option<f64>,
    pub half_height: Option<f64>,
    /// Minimum trapezoid nodes across `[-T, T]`.
    pub nodes: usize,
    /// Relative error above which evaluation reports non-convergence.
    pub rel_tol: f64,
}

impl ContourConfig {
    pub const MIN_NODES: usize = 64;

    pub fn meijer() -> Self {
        Self {
            offset: None,
            offset2: None,
            half_height: None,
            nodes: Self::MIN_NODES,
            rel_tol: 1e-6,
        }
    }

    pub fn fox() -> Self {
        Self {
            rel_tol: 1e-4,
            ..Self::meijer()
        }
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.nodes < Self::MIN_NODES {
            return Err(Error::ContourFailure(format!(
                "node count {} below minimum {}",
                self.nodes,
                Self::MIN_NODES
            )));
        }
        if let Some(t) = self.half_height {
            if !(t > 0.0) {
                return Err(Error::ContourFailure(
                    "truncation height must be positive".into(),
                ));
            }
        }
        Ok(())
    }
}

impl Default for ContourConfig {
    fn default() -> Self {
        Self::meijer()
    }
}

/// `mantissa · e^ln_scale`, with `error` on the same scale as `mantissa`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    pub mantissa: f64,
    pub error: f64,
    pub ln_scale: f64,
}

impl ScaledValue {
    pub fn value(&self) -> f64 {
        self.mantissa * self.ln_scale.exp()
    }

    pub fn error(&self) -> f64 {
        self.error * self.ln_scale.exp()
    }

    /// Natural log of the value; the value must be positive.
    pub fn ln_value(&self) -> f64 {
        self.mantissa.ln() + self.ln_scale
    }
}

/// A contour integral with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourValue {
    pub value: f64,
    pub error: f64,
}

impl From<ScaledValue> for ContourValue {
    fn from(s: ScaledValue) -> Self {
        Self {
            value: s.value(),
            error: s.error(),
        }
    }
}

const DECAY_DROP: f64 = 45.0;
const MAX_HALF_HEIGHT: f64 = 400.0;
const MAX_REFINEMENTS: u32 = 4;

/// Trapezoid step that resolves a pole at distance `dist` and `z^{it}`.
fn auto_step(dist: f64, ln_z_abs: f64) -> f64 {
    let d = 0.8 * dist;
    (2.0 * PI * d / (40.0 + d * ln_z_abs)).min(0.25)
}

/// Smallest `T` such that `re_log(t) < peak - DECAY_DROP` for `t >= T`,
/// found by marching in unit steps.
fn decay_height<F: Fn(f64) -> f64>(re_log: F) -> f64 {
    let mut peak = re_log(0.0);
    let mut t = 0.0;
    let mut below = 0;
    while t < MAX_HALF_HEIGHT {
        t += 1.0;
        let v = re_log(t);
        peak = peak.max(v);
        if v < peak - DECAY_DROP {
            below += 1;
            if below >= 3 {
                return t;
            }
        } else {
            below = 0;
        }
    }
    MAX_HALF_HEIGHT
}

/// `(1/π) Re ∫_0^T e^{L(t)} dt` by the trapezoid rule on the precomputed
/// log-integrand samples at spacing `h`, returned in scaled form.
fn half_line_sum(logs: &[Complex64], h: f64) -> (f64, f64) {
    let peak = logs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    let mut acc = 0.0;
    for (j, l) in logs.iter().enumerate() {
        let w = if j == 0 { 0.5 } else { 1.0 };
        acc += w * (l - peak).exp().re;
    }
    (acc * h / PI, peak)
}

/// Minimizer of a convex function on `[a, b]`, where a missing end means
/// the interval is unbounded on that side.
fn convex_argmin<F: Fn(f64) -> f64>(phi: F, a: Option<f64>, b: Option<f64>) -> f64 {
    const REACH: f64 = 1e7;
    let (mut lo, mut hi) = match (a, b) {
        (Some(a), Some(b)) => (a, b),
        (Some(a), None) => (a, a + 1.0),
        (None, Some(b)) => (b - 1.0, b),
        (None, None) => (-1.0, 1.0),
    };
    if b.is_none() {
        while phi(hi) < phi(0.5 * (lo + hi)) && hi - lo < REACH {
            hi = lo + 2.0 * (hi - lo);
        }
    }
    if a.is_none() {
        while phi(lo) < phi(0.5 * (lo + hi)) && hi - lo < REACH {
            lo = hi - 2.0 * (hi - lo);
        }
    }
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (phi(x1), phi(x2));
    while hi - lo > 1e-3 * (1.0 + x1.abs()) {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = phi(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = phi(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Univariate Meijer-G parameterization `G^{m,n}_{p,q}(z | a; b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeijerGSpec {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub m: usize,
    pub n: usize,
}

impl MeijerGSpec {
    pub fn new(a: Vec<f64>, b: Vec<f64>, m: usize, n: usize) -> Result<Self> {
        if m > b.len() || n > a.len() {
            return Err(Error::ContourFailure(format!(
                "index mismatch: m={m}, n={n}, p={}, q={}",
                a.len(),
                b.len()
            )));
        }
        let spec = Self { a, b, m, n };
        let (lo, hi) = spec.gap();
        if lo >= hi {
            return Err(Error::ContourFailure(format!(
                "pole families overlap: left poles reach {lo}, right poles start at {hi}"
            )));
        }
        Ok(spec)
    }

    /// Open interval of admissible contour offsets.
    pub fn gap(&self) -> (f64, f64) {
        let lo = self.a[..self.n]
            .iter()
            .map(|a| a - 1.0)
            .fold(f64::NEG_INFINITY, f64::max);
        let hi = self.b[..self.m]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        (lo, hi)
    }

    fn offset(&self, cfg: &ContourConfig, ln_z: f64) -> Result<f64> {
        let (lo, hi) = self.gap();
        let c = match cfg.offset {
            Some(c) => c,
            None => {
                let (a, b) = match (lo.is_finite(), hi.is_finite()) {
                    (true, true) => {
                        let margin = (0.25 * (hi - lo)).min(0.5);
                        (Some(lo + margin), Some(hi - margin))
                    }
                    (true, false) => (Some(lo + 0.5), None),
                    (false, true) => (None, Some(hi - 0.5)),
                    (false, false) => (None, None),
                };
                convex_argmin(|c| self.ln_integrand(Complex64::new(c, 0.0), ln_z).re, a, b)
            }
        };
        if c <= lo || c >= hi {
            return Err(Error::ContourFailure(format!(
                "offset {c} is outside the pole-free gap ({lo}, {hi})"
            )));
        }
        Ok(c)
    }

    fn ln_integrand(&self, s: Complex64, ln_z: f64) -> Complex64 {
        let mut acc = s * ln_z;
        for (j, &b) in self.b.iter().enumerate() {
            if j < self.m {
                acc += ln_gamma_unchecked(b - s);
            } else {
                acc -= ln_gamma_unchecked(1.0 - b + s);
            }
        }
        for (j, &a) in self.a.iter().enumerate() {
            if j < self.n {
                acc += ln_gamma_unchecked(1.0 - a + s);
            } else {
                acc -= ln_gamma_unchecked(a - s);
            }
        }
        acc
    }
}

/// Meijer-G by Mellin–Barnes quadrature, in scaled form.
pub fn meijer_g_scaled(spec: &MeijerGSpec, z: f64, cfg: &ContourConfig) -> Result<ScaledValue> {
    cfg.validate()?;
    if !(z > 0.0) {
        return Err(Error::ContourFailure(format!(
            "argument must be positive, got {z}"
        )));
    }
    let (lo, hi) = spec.gap();
    let ln_z = z.ln();
    let c = spec.offset(cfg, ln_z)?;
    let f = |t: f64| spec.ln_integrand(Complex64::new(c, t), ln_z);
    let height = cfg.half_height.unwrap_or_else(|| decay_height(|t| f(t).re));
    let dist = (c - lo).min(hi - c);
    let mut h = auto_step(dist, ln_z.abs()).min(2.0 * height / cfg.nodes as f64);

    let mut previous: Option<(f64, f64)> = None;
    for _ in 0..=MAX_REFINEMENTS {
        let count = (height / h).ceil() as usize + 1;
        let logs: Vec<Complex64> = (0..count).map(|j| f(j as f64 * h)).collect();
        let (mantissa, scale) = half_line_sum(&logs, h);
        if let Some((prev_m, prev_scale)) = previous {
            let prev = prev_m * (prev_scale - scale).exp();
            let err = (mantissa - prev).abs();
            if err <= cfg.rel_tol * mantissa.abs() {
                return Ok(ScaledValue {
                    mantissa,
                    error: err,
                    ln_scale: scale,
                });
            }
            if mantissa == 0.0 || !mantissa.is_finite() {
                break;
            }
        }
        previous = Some((mantissa, scale));
        h *= 0.5;
    }
    let (m, s) = previous.unwrap_or((f64::NAN, 0.0));
    Err(Error::NonConvergence {
        what: "Meijer-G contour refinement",
        previous: m * s.exp(),
        last: m * s.exp(),
    })
}

/// Meijer-G value with error estimate.
pub fn meijer_g(spec: &MeijerGSpec, z: f64, cfg: &ContourConfig) -> Result<ContourValue> {
    meijer_g_scaled(spec, z, cfg).map(ContourValue::from)
}

/// The bivariate Fox-H family
///
/// ```text
/// H[(1-shape; κ, κ) | (1-ϖ,1);(0,1) | (1+ϖ,1);(0,1) | z1, z2],   κ = 2/α
/// ```
///
/// in the `(p1,q1:p2,q2:p3,q3) = (1,0:1,1:1,1)`,
/// `(m1,n1:m2,n2:m3,n3) = (0,1:1,1:1,1)` convention, i.e.
///
/// ```text
/// (2πi)^-2 ∫∫ Γ(shape + κ(s1+s2)) Γ(-s1) Γ(ϖ+s1) Γ(-s2) Γ(s2-ϖ) z1^s1 z2^s2 ds1 ds2.
/// ```
///
/// The poles of `Γ(s2 - ϖ)` at `ϖ, ϖ-1, ...` must stay left of the `s2`
/// contour while those of `Γ(-s2)` stay right; for `ϖ > 0` no straight line
/// does that, so the `s2` line sits in `(-1, 0)` and the residues at the
/// crossed poles `s2 = ϖ - k` are added back as single contour integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoxH2Spec {
    pub alpha: u32,
    /// `μ + y` in the weak-user closed forms.
    pub shape: f64,
    pub varpi: f64,
}

impl FoxH2Spec {
    pub fn new(alpha: u32, shape: f64, varpi: f64) -> Result<Self> {
        if alpha == 0 || !(shape > 0.0) || !(varpi > 0.0) {
            return Err(Error::ContourFailure(format!(
                "invalid Fox-H parameters alpha={alpha}, shape={shape}, varpi={varpi}"
            )));
        }
        Ok(Self {
            alpha,
            shape,
            varpi,
        })
    }

    fn kappa(&self) -> f64 {
        2.0 / self.alpha as f64
    }

    /// `Re(s1 + s2)` must exceed `-outer_bound()` to keep the outer gamma's
    /// poles left of both contours.
    fn outer_bound(&self) -> f64 {
        self.shape / self.kappa()
    }

    fn offsets(&self, cfg: &ContourConfig) -> Result<(f64, f64)> {
        let w = self.varpi;
        let beta = self.outer_bound();
        let c1 = cfg.offset.unwrap_or(-0.5 * w.min(0.5 * beta));
        if !(c1 > -w && c1 < 0.0) {
            return Err(Error::ContourFailure(format!(
                "s1 offset {c1} outside (-{w}, 0)"
            )));
        }
        let lower = (-1.0f64).max(-beta - c1);
        let frac_pole = w - w.ceil();
        let c2 = match cfg.offset2 {
            Some(c2) => c2,
            None => {
                if frac_pole > lower && frac_pole < 0.0 {
                    if frac_pole - lower > -frac_pole {
                        0.5 * (lower + frac_pole)
                    } else {
                        0.5 * frac_pole
                    }
                } else {
                    0.5 * lower
                }
            }
        };
        let on_pole = ((w - c2) - (w - c2).round()).abs() < 1e-9;
        if !(c2 > lower && c2 < 0.0) || on_pole {
            return Err(Error::ContourFailure(format!(
                "s2 offset {c2} outside ({lower}, 0) or on a pole"
            )));
        }
        Ok((c1, c2))
    }

    /// Number of `Γ(s2 - ϖ)` poles to the right of the `s2` line.
    fn crossed_poles(&self, c2: f64) -> u32 {
        (self.varpi - c2).ceil() as u32
    }
}

struct FoxGrid {
    inner1: Vec<Complex64>,
    inner2: Vec<Complex64>,
    outer: Vec<Complex64>,
}

/// `ℋ / (Γ(ϖ) Γ(-ϖ))`, finite for every `ϖ > 0` including integers.
pub fn fox_h2_normalized(
    spec: &FoxH2Spec,
    z1: f64,
    z2: f64,
    cfg: &ContourConfig,
) -> Result<ContourValue> {
    cfg.validate()?;
    if !(z1 > 0.0 && z2 > 0.0) {
        return Err(Error::ContourFailure(format!(
            "arguments must be positive, got ({z1}, {z2})"
        )));
    }
    let (c1, c2) = spec.offsets(cfg)?;
    let w = spec.varpi;
    let kappa = spec.kappa();
    let a = spec.shape;
    let (ln_z1, ln_z2) = (z1.ln(), z2.ln());

    let inner1 = |t: f64| {
        let s = Complex64::new(c1, t);
        ln_gamma_unchecked(-s) + ln_gamma_unchecked(w + s) + s * ln_z1
    };
    let inner2 = |t: f64| {
        let s = Complex64::new(c2, t);
        ln_gamma_unchecked(-s) + ln_gamma_unchecked(s - w) + s * ln_z2
    };
    let outer = |re: f64, t: f64| ln_gamma_unchecked(a + kappa * Complex64::new(re, t));

    let height = cfg.half_height.unwrap_or_else(|| {
        let h1 = decay_height(|t| inner1(t).re + outer(c1 + c2, t).re);
        let h2 = decay_height(|t| inner2(t).re + outer(c1 + c2, t).re);
        let anti = decay_height(|t| inner1(t).re + inner2(-t).re);
        h1.max(h2).max(anti)
    });

    let d1 = (-c1).min(w + c1);
    let frac = w - c2;
    let d2 = (-c2)
        .min((frac - frac.round()).abs())
        .min(c1 + c2 + spec.outer_bound());
    let dist = d1.min(d2);
    let ln_z_abs = ln_z1.abs().max(ln_z2.abs()) + kappa * PI;
    let mut h = auto_step(dist, ln_z_abs).min(2.0 * height / cfg.nodes as f64);

    let recip_gw = recip_gamma(w);
    let recip_gmw = recip_gamma(-w);
    let crossed = spec.crossed_poles(c2);

    let mut previous: Option<f64> = None;
    let mut cancellation = 1.0;
    for _ in 0..=MAX_REFINEMENTS {
        let n = (height / h).ceil() as usize;
        let grid = FoxGrid {
            inner1: (0..=n).map(|j| inner1(j as f64 * h)).collect(),
            inner2: (0..=2 * n)
                .map(|j| inner2((j as f64 - n as f64) * h))
                .collect(),
            outer: (0..=3 * n)
                .map(|j| outer(c1 + c2, (j as f64 - n as f64) * h))
                .collect(),
        };
        let (double, double_abs) = double_line(&grid, h);

        let mut total = recip_gmw * double;
        let mut magnitude = (recip_gmw * double_abs).abs();
        for k in 0..crossed {
            let kk = k as f64;
            let coef = if k % 2 == 0 { 1.0 } else { -1.0 } * pochhammer(-w, k)
                / ln_gamma_real(kk + 1.0).exp()
                * ((w - kk) * ln_z2).exp();
            let logs: Vec<Complex64> = (0..=n)
                .map(|j| {
                    let t = j as f64 * h;
                    inner1(t) + outer(c1 + w - kk, t)
                })
                .collect();
            let (m, scale) = half_line_sum(&logs, h);
            let term = coef * m * scale.exp();
            total += term;
            magnitude += term.abs();
        }
        total *= recip_gw;
        magnitude *= recip_gw.abs();
        cancellation = magnitude / total.abs().max(f64::MIN_POSITIVE);

        if let Some(prev) = previous {
            let err = (total - prev).abs();
            if err <= cfg.rel_tol * total.abs() {
                return Ok(ContourValue {
                    value: total,
                    error: err,
                });
            }
        }
        previous = Some(total);
        h *= 0.5;
    }
    let last = previous.unwrap_or(f64::NAN);
    log::debug!("fox_h2 failed to converge; cancellation ratio {cancellation:e}");
    Err(Error::NonConvergence {
        what: "bivariate Fox-H contour refinement",
        previous: last,
        last,
    })
}

/// `(2π)^-2 ∫∫` over the two lines using the factorized grid, plus the
/// matching sum of magnitudes.
fn double_line(grid: &FoxGrid, h: f64) -> (f64, f64) {
    let peak = grid
        .inner1
        .par_iter()
        .enumerate()
        .map(|(j1, l1)| {
            let mut best = f64::NEG_INFINITY;
            for (j2, l2) in grid.inner2.iter().enumerate() {
                let v = l1.re + l2.re + grid.outer[j1 + j2].re;
                best = best.max(v);
            }
            best
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    let (sum, abs) = grid
        .inner1
        .par_iter()
        .enumerate()
        .map(|(j1, l1)| {
            let weight = if j1 == 0 { 1.0 } else { 2.0 };
            let mut row = 0.0;
            let mut row_abs = 0.0;
            for (j2, l2) in grid.inner2.iter().enumerate() {
                let l = l1 + l2 + grid.outer[j1 + j2] - peak;
                if l.re < -DECAY_DROP - 5.0 {
                    continue;
                }
                let v = l.exp();
                row += v.re;
                row_abs += v.norm();
            }
            (weight * row, weight * row_abs)
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
    let scale = peak.exp() * h * h / (4.0 * PI * PI);
    (sum * scale, abs * scale)
}

/// The bivariate Fox-H value itself; undefined when `ϖ` is an integer
/// (the `Γ(-ϖ)` factor of the crossed residues has a pole there).
pub fn fox_h2(spec: &FoxH2Spec, z1: f64, z2: f64, cfg: &ContourConfig) -> Result<ContourValue> {
    let w = spec.varpi;
    if w == w.round() {
        return Err(Error::Pole(-w));
    }
    let normalized = fox_h2_normalized(spec, z1, z2, cfg)?;
    // Γ(ϖ)Γ(-ϖ) = -π / (ϖ sin(πϖ))
    let factor = -PI / (w * (PI * w).sin());
    Ok(ContourValue {
        value: normalized.value * factor,
        error: normalized.error * factor.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::ln_gamma_real;
    use approx::assert_relative_eq;

    fn log_grid() -> impl Iterator<Item = f64> {
        (0..=24).map(|k| 10f64.powf(-3.0 + 0.25 * k as f64))
    }

    #[test]
    fn exponential_reduction() {
        // G^{1,0}_{0,1}[z | -; 0] = e^-z
        let spec = MeijerGSpec::new(vec![], vec![0.0], 1, 0).unwrap();
        for z in log_grid() {
            let g = meijer_g_scaled(&spec, z, &ContourConfig::meijer()).unwrap();
            assert!((g.ln_value() + z).abs() < 1e-8, "z={z}: {}", g.ln_value());
        }
    }

    #[test]
    fn binomial_reduction() {
        // G^{1,1}_{1,1}[z | 1+y; 0] = Γ(-y) (1+z)^y
        for y in [-0.4, -1.3, -2.75] {
            let spec = MeijerGSpec::new(vec![1.0 + y], vec![0.0], 1, 1).unwrap();
            for z in log_grid() {
                let g = meijer_g_scaled(&spec, z, &ContourConfig::meijer()).unwrap();
                let want = ln_gamma_real(-y) + y * z.ln_1p();
                assert!((g.ln_value() - want).abs() < 1e-8, "y={y} z={z}");
            }
        }
    }

    #[test]
    fn node_doubling_stays_within_error_estimate() {
        let spec = MeijerGSpec::new(vec![0.3, 0.8], vec![0.0, 0.5, 0.25], 3, 1).unwrap();
        let base = meijer_g(&spec, 0.37, &ContourConfig::meijer()).unwrap();
        let fine = meijer_g(&spec, 0.37, &ContourConfig::meijer().with_nodes(4096)).unwrap();
        assert!(
            (base.value - fine.value).abs()
                <= base.error.max(fine.error).max(1e-15 * base.value.abs())
        );

        let fox = FoxH2Spec::new(2, 2.0, 1.5).unwrap();
        let base = fox_h2_normalized(&fox, 0.8, 0.2, &ContourConfig::fox()).unwrap();
        let fine =
            fox_h2_normalized(&fox, 0.8, 0.2, &ContourConfig::fox().with_nodes(2048)).unwrap();
        assert!(
            (base.value - fine.value).abs()
                <= base.error.max(fine.error).max(1e-12 * base.value.abs())
        );
    }

    #[test]
    fn overlapping_pole_families_are_rejected() {
        // a_1 - 1 = 0.5 > b_1 = 0
        assert!(matches!(
            MeijerGSpec::new(vec![1.5], vec![0.0], 1, 1),
            Err(Error::ContourFailure(_))
        ));
        let spec = MeijerGSpec::new(vec![], vec![0.0], 1, 0).unwrap();
        let cfg = ContourConfig {
            offset: Some(0.5),
            ..ContourConfig::meijer()
        };
        assert!(matches!(
            meijer_g(&spec, 1.0, &cfg),
            Err(Error::ContourFailure(_))
        ));
        let cfg = ContourConfig::meijer().with_nodes(8);
        assert!(matches!(
            meijer_g(&spec, 1.0, &cfg),
            Err(Error::ContourFailure(_))
        ));
    }

    #[test]
    fn fox_normalization_relation() {
        let cfg = ContourConfig::fox();
        let spec = FoxH2Spec::new(2, 1.0, 0.6).unwrap();
        let raw = fox_h2(&spec, 3.0, 0.7, &cfg).unwrap();
        let norm = fox_h2_normalized(&spec, 3.0, 0.7, &cfg).unwrap();
        // Γ(ϖ)Γ(-ϖ) = -π / (ϖ sin πϖ)
        let factor = -PI / (0.6 * (PI * 0.6).sin());
        assert_relative_eq!(raw.value, norm.value * factor, max_relative = 1e-12);

        let integer = FoxH2Spec::new(2, 1.0, 2.0).unwrap();
        assert!(matches!(
            fox_h2(&integer, 1.0, 1.0, &cfg),
            Err(Error::Pole(_))
        ));
        assert!(fox_h2_normalized(&integer, 1.0, 1.0, &cfg).is_ok());
    }

    #[test]
    fn fox_matches_gamma_expectation() {
        // ℋ/(Γ(ϖ)Γ(-ϖ)) = Γ(a) E[(1 + z1 Y^κ)^-ϖ (1 + z2 Y^κ)^ϖ],  Y ~ Gamma(a)
        use crate::specfun::quad::integrate_half_line;
        let cases = [
            (2u32, 1.0, 0.72, 10.0, 2.0),
            (2, 2.0, 1.5, 3.0, 0.6),
            (1, 1.0, 0.5, 31.6, 7.9),
            (3, 3.0, 2.0, 100.0, 24.0),
            (2, 1.5, 2.42, 1.0, 0.2),
            (1, 2.0, 0.05, 5.0, 1.0),
        ];
        for (alpha, a, w, z1, z2) in cases {
            let kappa = 2.0 / alpha as f64;
            let spec = FoxH2Spec::new(alpha, a, w).unwrap();
            let got = fox_h2_normalized(&spec, z1, z2, &ContourConfig::fox()).unwrap();
            let want = integrate_half_line(
                |y: f64| {
                    if y == 0.0 {
                        return 0.0;
                    }
                    let x = y.powf(kappa);
                    let ln = (a - 1.0) * y.ln() - y - w * (z1 * x).ln_1p() + w * (z2 * x).ln_1p();
                    ln.exp()
                },
                0.0,
                1e-13,
            )
            .unwrap()
            .value;
            assert!(
                (got.value - want).abs() <= 1e-6 * want.abs(),
                "alpha={alpha} a={a} w={w}: {} vs {want}",
                got.value
            );
        }
    }
}
