//! Quadrature for expectations over generalized-gamma fading laws.
//!
//! An α-μ gain is `g = (c·Y)^p` with `Y ~ Gamma(k, 1)`, `c = Ω^α/μ` and
//! `p = 2/α`; the minimum of two α-μ gains is a finite mixture of such laws.
//! Three integrators live here:
//!
//! * [`gamma_mixture_expectation`]: trapezoid rule in `t = ln y`. The
//!   integrand is analytic in a strip around the real `t` axis, so the rule
//!   converges geometrically even when the kernel varies on scales far below
//!   the mean gain (high SNR, large Mellin exponents).
//! * [`laguerre_expectation`]: generalized Gauss–Laguerre with order doubling.
//!   Fast for smooth kernels at moderate SNR; used as an independent check.
//! * [`integrate`] / [`integrate_half_line`]: adaptive Gauss–Kronrod (7, 15)
//!   for raw integrands such as `kernel(x)·pdf(x)`.

use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;

use super::gamma::ln_gamma_real;
use crate::{Error, Result};

/// Value with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, error: 0.0 }
    }
}

/// One generalized-gamma term: `weight · law of (scale·Y)^power`, `Y ~ Gamma(shape)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaComponent {
    pub weight: f64,
    pub shape: f64,
    pub scale: f64,
    pub power: f64,
}

impl GammaComponent {
    #[inline]
    pub fn gain(&self, y: f64) -> f64 {
        (self.scale * y).powf(self.power)
    }
}

/// Fading laws that decompose into generalized-gamma components.
pub trait GammaMixture {
    fn components(&self) -> Vec<GammaComponent>;
}

const TRAP_START_STEP: f64 = 0.125;
const TRAP_MAX_LEVELS: u32 = 10;
const TRAP_REL_TOL: f64 = 1e-13;
const TAIL_REL: f64 = 1e-18;

/// `E[kernel(g)]` for a single component with unit weight.
fn component_expectation<F>(comp: &GammaComponent, kernel: &F) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    let k = comp.shape;
    let ln_norm = ln_gamma_real(k);
    let ln_scale = comp.scale.ln();
    let f = |t: f64| -> f64 {
        let w = (k * t - t.exp() - ln_norm).exp();
        if w == 0.0 {
            return 0.0;
        }
        let x = (comp.power * (ln_scale + t)).exp();
        w * kernel(x)
    };

    let h0 = TRAP_START_STEP;
    let t0 = k.ln();
    let mut samples = vec![f(t0)];
    let mut l1 = samples[0].abs();

    // right tail: the weight decays doubly exponentially past the mode
    let mut hi = t0;
    loop {
        hi += h0;
        let v = f(hi);
        l1 += v.abs();
        samples.push(v);
        if hi.exp() > k + 10.0 && v.abs() <= TAIL_REL * l1 {
            break;
        }
        if hi > 12.0 {
            break;
        }
    }
    let mut lo = t0;
    let mut quiet = 0;
    loop {
        lo -= h0;
        let v = f(lo);
        l1 += v.abs();
        samples.push(v);
        // a kernel that vanishes at the mode can still carry mass further left
        if lo < t0 - 1.0 && l1 > 0.0 && v.abs() <= TAIL_REL * l1 {
            quiet += 1;
            if quiet >= 4 {
                break;
            }
        } else {
            quiet = 0;
        }
        if l1 == 0.0 && k * lo - ln_norm < -750.0 {
            break;
        }
        if lo < -2000.0 {
            return Err(Error::NonConvergence {
                what: "left tail of gamma-mixture integrand",
                previous: l1,
                last: v,
            });
        }
    }

    let mut h = h0;
    let mut sum: f64 = samples.iter().sum();
    let mut abs_sum: f64 = samples.iter().map(|v| v.abs()).sum();
    let mut estimate = sum * h;
    let n0 = ((hi - lo) / h0).round() as usize;
    for level in 1..=TRAP_MAX_LEVELS {
        let n = n0 << (level - 1);
        let mut mid = 0.0;
        let mut mid_abs = 0.0;
        for i in 0..n {
            let v = f(lo + (i as f64 + 0.5) * h);
            mid += v;
            mid_abs += v.abs();
        }
        sum += mid;
        abs_sum += mid_abs;
        h *= 0.5;
        let refined = sum * h;
        let diff = (refined - estimate).abs();
        if diff <= TRAP_REL_TOL * abs_sum * h && level >= 2 {
            return Ok(Estimate {
                value: refined,
                error: diff,
            });
        }
        estimate = refined;
        if level == TRAP_MAX_LEVELS {
            return Err(Error::NonConvergence {
                what: "trapezoid refinement in log-gain variable",
                previous: refined + diff,
                last: refined,
            });
        }
    }
    unreachable!()
}

/// `E[kernel(g)]` for a mixture of generalized-gamma components.
pub fn gamma_mixture_expectation<F>(components: &[GammaComponent], kernel: F) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    let mut value = 0.0;
    let mut error = 0.0;
    for comp in components {
        let e = component_expectation(comp, &kernel)?;
        value += comp.weight * e.value;
        error += comp.weight * e.error;
    }
    Ok(Estimate { value, error })
}

/// Nodes and normalized weights for `y^(shape-1) e^(-y) / Γ(shape)` on `(0, ∞)`.
#[derive(Debug, Clone)]
pub struct LaguerreRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl LaguerreRule {
    /// Golub–Welsch: eigen-decomposition of the Jacobi matrix of the
    /// generalized Laguerre polynomials with parameter `shape - 1`.
    pub fn new(order: usize, shape: f64) -> Self {
        assert!(order > 0 && shape > 0.0);
        let a = shape - 1.0;
        let mut jacobi = DMatrix::<f64>::zeros(order, order);
        for i in 0..order {
            let fi = i as f64;
            jacobi[(i, i)] = 2.0 * fi + a + 1.0;
            if i + 1 < order {
                let off = ((fi + 1.0) * (fi + 1.0 + a)).sqrt();
                jacobi[(i, i + 1)] = off;
                jacobi[(i + 1, i)] = off;
            }
        }
        let eig = jacobi.symmetric_eigen();
        let mut pairs: Vec<(f64, f64)> = (0..order)
            .map(|j| (eig.eigenvalues[j], eig.eigenvectors[(0, j)].powi(2)))
            .collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1 / total).collect(),
        }
    }

    /// Shared, lazily built rule. Tables are immutable once constructed.
    pub fn cached(order: usize, shape: f64) -> Arc<LaguerreRule> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, u64), Arc<LaguerreRule>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let key = (order, shape.to_bits());
        if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&key) {
            return Arc::clone(rule);
        }
        let rule = Arc::new(LaguerreRule::new(order, shape));
        cache
            .lock()
            .expect("rule cache poisoned")
            .entry(key)
            .or_insert(rule)
            .clone()
    }
}

pub const LAGUERRE_MAX_ORDER: usize = 512;
pub const LAGUERRE_REL_TOL: f64 = 1e-9;

fn laguerre_at_order<F>(components: &[GammaComponent], kernel: &F, order: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    components
        .iter()
        .map(|comp| {
            let rule = LaguerreRule::cached(order, comp.shape);
            let s: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .filter(|(_, w)| **w > 0.0)
                .map(|(y, w)| w * kernel(comp.gain(*y)))
                .sum();
            comp.weight * s
        })
        .sum()
}

/// Gauss–Laguerre estimate of `E[kernel(g)]`, doubling the order from
/// `order` until successive estimates agree to `1e-9` relative.
pub fn laguerre_expectation<L, F>(law: &L, kernel: F, order: usize) -> Result<Estimate>
where
    L: GammaMixture + ?Sized,
    F: Fn(f64) -> f64,
{
    let components = law.components();
    let mut n = order.max(2);
    let mut previous = laguerre_at_order(&components, &kernel, n);
    loop {
        let next_order = n * 2;
        if next_order > LAGUERRE_MAX_ORDER {
            let last = laguerre_at_order(&components, &kernel, n);
            return Err(Error::NonConvergence {
                what: "Gauss-Laguerre order doubling",
                previous,
                last,
            });
        }
        let current = laguerre_at_order(&components, &kernel, next_order);
        let diff = (current - previous).abs();
        if diff <= LAGUERRE_REL_TOL * current.abs() {
            return Ok(Estimate {
                value: current,
                error: diff,
            });
        }
        previous = current;
        n = next_order;
    }
}

// Gauss–Kronrod (7, 15) nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kron += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kron * half, ((kron - gauss) * half).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

const GK_MAX_PANELS: usize = 20_000;

/// Adaptive Gauss–Kronrod on `[a, b]`, bisecting the worst panel until the
/// summed error estimate is below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    let (value, error) = kronrod(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if heap.len() >= GK_MAX_PANELS {
            return Err(Error::NonConvergence {
                what: "adaptive Gauss-Kronrod panel budget",
                previous: total_err,
                last: total,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = kronrod(&f, worst.a, mid);
        let (rv, re) = kronrod(&f, mid, worst.b);
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
        if mid <= worst.a || mid >= worst.b {
            break;
        }
    }
    // re-sum to shed accumulated rounding from the running updates
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(Estimate { value, error })
}

/// `∫_0^∞ f(x) dx` via `x = u/(1-u)` and [`integrate`].
pub fn integrate_half_line<F>(f: F, abs_tol: f64, rel_tol: f64) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    integrate(
        |u| {
            let one_minus = 1.0 - u;
            let x = u / one_minus;
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v / (one_minus * one_minus)
            }
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    )
}
