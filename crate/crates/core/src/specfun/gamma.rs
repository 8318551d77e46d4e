//! Log-gamma on the complex plane and a few real helpers built on it.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

// B_{2k} / (2k (2k - 1)), k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

// Stirling's series is used once |z| reaches this radius.
const ASYMPTOTIC_RADIUS: f64 = 15.0;

fn stirling(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + series
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// `ln sin(pi z)` without overflow for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    // sin(pi z) = e^{-i pi z} (e^{2 i pi z} - 1) / (2i), |e^{2 i pi z}| <= 1 here
    let i = Complex64::i();
    let w = (2.0 * PI * i * z).exp();
    -i * PI * z + ((w - 1.0) / (2.0 * i)).ln()
}

/// Log-gamma of a complex argument.
///
/// For `Re z >= 1/2` the result is the analytic continuation of `ln Γ` from
/// the positive real axis. Left of that line it comes from the reflection
/// formula, so the imaginary part is only meaningful modulo `2π`; `exp` of
/// the result is always `Γ(z)`.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole(z.re));
    }
    Ok(ln_gamma_unchecked(z))
}

pub(crate) fn ln_gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let reflected = ln_gamma_unchecked(1.0 - z);
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - reflected;
    }
    if z.norm() >= ASYMPTOTIC_RADIUS {
        return stirling(z);
    }
    let shift = (ASYMPTOTIC_RADIUS - z.re).ceil().max(0.0) as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut w = z;
    for _ in 0..shift {
        acc += w.ln();
        w += 1.0;
    }
    stirling(w) - acc
}

/// `ln Γ(x)` for real `x > 0`.
pub fn ln_gamma_real(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma_real needs a positive argument, got {x}");
    if x >= ASYMPTOTIC_RADIUS {
        let inv = 1.0 / x;
        let inv2 = inv * inv;
        let mut series = 0.0;
        let mut pow = inv;
        for c in STIRLING {
            series += pow * c;
            pow *= inv2;
        }
        return (x - 0.5) * x.ln() - x + HALF_LN_2PI + series;
    }
    let shift = (ASYMPTOTIC_RADIUS - x).ceil() as usize;
    let mut prod = 1.0;
    let mut w = x;
    for _ in 0..shift {
        prod *= w;
        w += 1.0;
    }
    ln_gamma_real(w) - prod.ln()
}

/// `1/Γ(x)` for any real `x`; zero at the poles.
pub fn recip_gamma(x: f64) -> f64 {
    if x > 0.0 {
        return (-ln_gamma_real(x)).exp();
    }
    if x == x.round() {
        return 0.0;
    }
    // 1/Γ(x) = Γ(1-x) sin(πx) / π
    (ln_gamma_real(1.0 - x)).exp() * (PI * x).sin() / PI
}

/// Digamma `ψ(x)` for real `x > 0`.
pub fn digamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "digamma needs a positive argument, got {x}");
    let mut shift = 0.0;
    let mut w = x;
    while w < 16.0 {
        shift -= 1.0 / w;
        w += 1.0;
    }
    let inv2 = 1.0 / (w * w);
    let series = inv2
        * (1.0 / 12.0
            - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 / 132.0))));
    shift + w.ln() - 0.5 / w - series
}

/// Rising factorial `(x)_k = x (x+1) ... (x+k-1)`.
pub fn pochhammer(x: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (x + j as f64))
}

/// `ln k!`
pub fn ln_factorial(k: u32) -> f64 {
    ln_gamma_real(k as f64 + 1.0)
}
