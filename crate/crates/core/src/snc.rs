//! Delay-violation bounds from stochastic network calculus.
//!
//! With per-slot service `N log2(1 + γ)` bits and constant arrivals of `λ`
//! bits per slot, the service process enters only through its Mellin
//! transform `M(s) = E[(1 + γ)^-ϖ]`, `ϖ = N s / ln 2`, and
//!
//! ```text
//! P(delay > ϑ) ≤ inf_{s > 0} M(s)^ϑ / (1 - e^{λ s} M(s))
//! ```
//!
//! over the stable region `e^{λ s} M(s) < 1`. Everything is carried in logs.

use std::f64::consts::LN_2;

use crate::effrate::{noma_ln_mellin_closed, noma_mellin_direct, noma_mellin_expm1};
use crate::specfun::ContourConfig;
use crate::{Error, EvalStrategy, NomaSystem, Provenance, Result, User};

/// Range and resolution of the search over `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SSearch {
    pub s_min: f64,
    pub s_max: f64,
    pub grid_points: usize,
    pub rel_tol: f64,
}

impl Default for SSearch {
    fn default() -> Self {
        Self {
            s_min: 1e-6,
            s_max: 5.0,
            grid_points: 200,
            rel_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SncConfig {
    system: NomaSystem,
    symbols_per_slot: u32,
    arrival_rate: f64,
    search: SSearch,
}

impl SncConfig {
    /// `arrival_rate` is in bits per slot.
    pub fn new(system: NomaSystem, symbols_per_slot: u32, arrival_rate: f64) -> Result<Self> {
        Self::with_search(system, symbols_per_slot, arrival_rate, SSearch::default())
    }

    pub fn with_search(
        system: NomaSystem,
        symbols_per_slot: u32,
        arrival_rate: f64,
        search: SSearch,
    ) -> Result<Self> {
        if symbols_per_slot == 0 {
            return Err(Error::InvalidParameter(
                "symbols per slot must be positive".into(),
            ));
        }
        if !(arrival_rate > 0.0 && arrival_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "arrival rate must be positive, got {arrival_rate}"
            )));
        }
        if !(search.s_min > 0.0 && search.s_max.is_finite() && search.s_max > search.s_min) {
            return Err(Error::InvalidParameter(format!(
                "invalid s range [{}, {}]",
                search.s_min, search.s_max
            )));
        }
        if search.grid_points < 2 || !(search.rel_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "s grid needs two points and a positive tolerance".into(),
            ));
        }
        Ok(Self {
            system,
            symbols_per_slot,
            arrival_rate,
            search,
        })
    }

    pub fn system(&self) -> &NomaSystem {
        &self.system
    }

    pub fn symbols_per_slot(&self) -> u32 {
        self.symbols_per_slot
    }

    pub fn arrival_rate(&self) -> f64 {
        self.arrival_rate
    }

    pub fn search(&self) -> &SSearch {
        &self.search
    }

    pub fn with_arrival_rate(&self, arrival_rate: f64) -> Result<Self> {
        Self::with_search(
            self.system,
            self.symbols_per_slot,
            arrival_rate,
            self.search,
        )
    }

    /// `ϖ = N s / ln 2`.
    pub fn varpi(&self, s: f64) -> f64 {
        self.symbols_per_slot as f64 * s / LN_2
    }
}

/// A service-process Mellin transform value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinValue {
    pub value: f64,
    pub s: f64,
    pub varpi: f64,
    pub provenance: Provenance,
    /// Absolute error estimate of `value`.
    pub error: f64,
}

impl MellinValue {
    pub fn ln_value(&self) -> f64 {
        self.value.ln()
    }
}

pub fn mellin_strong(cfg: &SncConfig, s: f64, strategy: EvalStrategy) -> Result<MellinValue> {
    mellin(cfg, User::Strong, s, strategy)
}

pub fn mellin_weak(cfg: &SncConfig, s: f64, strategy: EvalStrategy) -> Result<MellinValue> {
    mellin(cfg, User::Weak, s, strategy)
}

/// `E[(1 + γ)^-ϖ]` for `user` at `s`.
pub fn mellin(cfg: &SncConfig, user: User, s: f64, strategy: EvalStrategy) -> Result<MellinValue> {
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "s must be positive, got {s}"
        )));
    }
    let varpi = cfg.varpi(s);
    let sys = &cfg.system;
    let (value, error) = if sys.rho() == 0.0 {
        (1.0, 0.0)
    } else {
        match strategy {
            EvalStrategy::Quadrature => {
                let m = noma_mellin_expm1(sys, user, varpi)?;
                if 1.0 + m.value > 0.1 {
                    (1.0 + m.value, m.error)
                } else {
                    let d = noma_mellin_direct(sys, user, varpi)?;
                    (d.value, d.error)
                }
            }
            EvalStrategy::ClosedForm => {
                let (ln_m, rel) = noma_ln_mellin_closed(
                    sys,
                    user,
                    varpi,
                    &ContourConfig::meijer(),
                    &ContourConfig::fox(),
                )?;
                let v = ln_m.exp();
                (v, rel * v)
            }
        }
    };
    Ok(MellinValue {
        value,
        s,
        varpi,
        provenance: strategy.into(),
        error,
    })
}

/// Upper bound on `P(delay > ϑ)` with the `s` that attains it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DvpBound {
    pub target_delay: f64,
    pub bound: f64,
    pub minimizer_s: Option<f64>,
    /// Whether some `s` in the search range keeps the queue stable.
    pub feasible: bool,
}

impl DvpBound {
    /// Natural log of the (clamped) bound; 0 when infeasible.
    pub fn ln_bound(&self) -> f64 {
        self.bound.ln()
    }
}

/// `ln M(s)` on demand for one (cfg, user), by quadrature.
struct LnMellin<'a> {
    cfg: &'a SncConfig,
    user: User,
}

impl LnMellin<'_> {
    fn at(&self, s: f64) -> Result<f64> {
        Ok(mellin(self.cfg, self.user, s, EvalStrategy::Quadrature)?.ln_value())
    }

    /// Log of the bracket, `+inf` outside the stable region.
    fn ln_bracket(&self, s: f64, delay: f64) -> Result<f64> {
        Ok(ln_bracket(self.at(s)?, self.cfg.arrival_rate * s, delay))
    }
}

fn ln_bracket(ln_m: f64, lambda_s: f64, delay: f64) -> f64 {
    let ln_k = lambda_s + ln_m;
    if !(ln_k < 0.0) {
        return f64::INFINITY;
    }
    let decay = if delay == 0.0 { 0.0 } else { delay * ln_m };
    decay - (-ln_k.exp_m1()).ln()
}

/// The bound at a single target delay.
pub fn dvp_bound(cfg: &SncConfig, user: User, target_delay: u32) -> Result<DvpBound> {
    Ok(dvp_curve(cfg, user, &[target_delay as f64])?.remove(0))
}

/// The bound at each delay in `delays` (slots; real values interpolate
/// between integer delays). The `s` grid is evaluated once and shared.
pub fn dvp_curve(cfg: &SncConfig, user: User, delays: &[f64]) -> Result<Vec<DvpBound>> {
    let f = LnMellin { cfg, user };
    let search = cfg.search;
    let ln_lo = search.s_min.ln();
    let step = (search.s_max.ln() - ln_lo) / (search.grid_points - 1) as f64;
    let grid: Vec<(f64, f64)> = (0..search.grid_points)
        .map(|i| {
            let s = (ln_lo + i as f64 * step).exp();
            Ok((s, f.at(s)?))
        })
        .collect::<Result<_>>()?;

    delays
        .iter()
        .map(|&delay| {
            let values: Vec<f64> = grid
                .iter()
                .map(|&(s, ln_m)| ln_bracket(ln_m, cfg.arrival_rate * s, delay))
                .collect();
            let (best, &best_val) = values
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("grid has points");
            if !best_val.is_finite() {
                return Ok(DvpBound {
                    target_delay: delay,
                    bound: 1.0,
                    minimizer_s: None,
                    feasible: false,
                });
            }
            let lo = grid[best.saturating_sub(1)].0.ln();
            let hi = grid[(best + 1).min(grid.len() - 1)].0.ln();
            let (s_star, val) =
                golden_min(|u| f.ln_bracket(u.exp(), delay), lo, hi, search.rel_tol)?;
            let (s_star, val) = if val <= best_val {
                (s_star.exp(), val)
            } else {
                (grid[best].0, best_val)
            };
            Ok(DvpBound {
                target_delay: delay,
                bound: val.exp().min(1.0),
                minimizer_s: Some(s_star),
                feasible: true,
            })
        })
        .collect()
}

/// Golden-section minimization of `f` on `[a, b]` in the (log-s) variable.
fn golden_min<F>(f: F, mut a: f64, mut b: f64, rel_tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    // tolerance on s itself: |Δ ln s| ≈ |Δs| / s
    while b - a > rel_tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Least-squares slope of `ln p` against delay, over points with
/// `0 < p < 1`. `None` with fewer than two usable points.
pub fn fit_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, p)| *p > 0.0 && *p < 1.0)
        .map(|&(d, p)| (d, p.ln()))
        .collect();
    if usable.len() < 2 {
        return None;
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Asymptotic decay rate of the bound in ϑ: `-ln M(s)` at the largest
/// stable `s`, i.e. `λ s_max` where `e^{λ s} M(s) = 1`.
pub fn bound_decay_rate(cfg: &SncConfig, user: User) -> Result<Option<f64>> {
    let f = LnMellin { cfg, user };
    let lambda = cfg.arrival_rate;
    let k = |s: f64| -> Result<f64> { Ok(lambda * s + f.at(s)?) };
    let search = cfg.search;
    let ln_lo = search.s_min.ln();
    let step = (search.s_max.ln() - ln_lo) / (search.grid_points - 1) as f64;
    let mut last_stable = None;
    for i in 0..search.grid_points {
        let s = (ln_lo + i as f64 * step).exp();
        if k(s)? < 0.0 {
            last_stable = Some(i);
        } else if last_stable.is_some() {
            break;
        }
    }
    let Some(i) = last_stable else {
        return Ok(None);
    };
    if i + 1 == search.grid_points {
        return Ok(Some(-f.at(search.s_max)?));
    }
    let (mut a, mut b) = (
        (ln_lo + i as f64 * step).exp(),
        (ln_lo + (i + 1) as f64 * step).exp(),
    );
    while (b - a) > search.rel_tol * a {
        let m = 0.5 * (a + b);
        if k(m)? < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(Some(lambda * a))
}
