//! Monte Carlo oracles: sampled effective rates and a slotted fluid queue.
//!
//! Random streams are ChaCha8 seeded from the plan's 64-bit seed, with one
//! stream id per batch, so results depend only on the plan and not on how
//! batches are scheduled across threads.

use std::f64::consts::LN_2;
use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::GainLaw;
use crate::snc::SncConfig;
use crate::{Error, NomaSystem, Provenance, RateResult, Result, User};

/// Seed, total sample (or slot) count, and the number of independent
/// batches it is split into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimPlan {
    seed: u64,
    samples: u64,
    batches: u32,
}

impl SimPlan {
    pub const MIN_BATCHES: u32 = 10;

    pub fn new(seed: u64, samples: u64, batches: u32) -> Result<Self> {
        if batches < Self::MIN_BATCHES {
            return Err(Error::InvalidParameter(format!(
                "need at least {} batches for error bars, got {batches}",
                Self::MIN_BATCHES
            )));
        }
        if samples < batches as u64 {
            return Err(Error::InvalidParameter(format!(
                "{samples} samples cannot fill {batches} batches"
            )));
        }
        Ok(Self {
            seed,
            samples,
            batches,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn samples(&self) -> u64 {
        self.samples
    }

    pub fn batches(&self) -> u32 {
        self.batches
    }

    /// Independent generator for batch `b`.
    pub fn rng(&self, b: u32) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(b as u64);
        rng
    }

    /// Sample count of batch `b`; sizes differ by at most one.
    pub fn batch_len(&self, b: u32) -> u64 {
        let base = self.samples / self.batches as u64;
        base + u64::from((b as u64) < self.samples % self.batches as u64)
    }
}

/// Sample mean with its batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
}

/// `E[f(g)]` over draws of `law`.
pub fn mc_expectation<L, F>(law: &L, f: F, plan: &SimPlan) -> McEstimate
where
    L: GainLaw,
    F: Fn(f64) -> f64 + Sync,
{
    let means: Vec<(f64, u64)> = (0..plan.batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = plan.rng(b);
            let n = plan.batch_len(b);
            let sum: f64 = (0..n).map(|_| f(law.sample(&mut rng))).sum();
            (sum / n as f64, n)
        })
        .collect();
    let total = plan.samples as f64;
    let mean = means.iter().map(|(m, n)| m * *n as f64).sum::<f64>() / total;
    let k = means.len() as f64;
    let var = means.iter().map(|(m, _)| (m - mean).powi(2)).sum::<f64>() / (k - 1.0);
    McEstimate {
        mean,
        std_error: (var / k).sqrt(),
    }
}

/// Sampled effective rate of `user`, drawing that user's effective gain
/// from `law`.
pub fn mc_effective_rate_with<L: GainLaw>(
    law: &L,
    sys: &NomaSystem,
    user: User,
    plan: &SimPlan,
) -> Result<RateResult> {
    let nu = sys.nu();
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter(
            "sampled effective rate needs theta > 0".into(),
        ));
    }
    let m = mc_expectation(law, |g| (-nu * sys.ln1p_sinr(user, g)).exp_m1(), plan);
    Ok(RateResult {
        value: -m.mean.ln_1p() / (nu * LN_2),
        provenance: Provenance::MonteCarlo,
        error: m.std_error / ((1.0 + m.mean) * nu * LN_2),
    })
}

/// Sampled NOMA effective rate: the strong user sees `g_s`, the weak user
/// `min(g_s, g_w)` with independent links.
pub fn mc_effective_rate(sys: &NomaSystem, user: User, plan: &SimPlan) -> Result<RateResult> {
    match user {
        User::Strong => mc_effective_rate_with(sys.pair().strong(), sys, user, plan),
        User::Weak => mc_effective_rate_with(&sys.pair().min_gain(), sys, user, plan),
    }
}

/// Per-slot service in bits for `user`.
pub fn slot_service(cfg: &SncConfig, user: User, g: f64) -> f64 {
    cfg.symbols_per_slot() as f64 * cfg.system().ln1p_sinr(user, g) / LN_2
}

/// Bits from slots in `measure` still queued more than `ϑ` slots after
/// arrival, for `ϑ = 0..=max_delay`.
///
/// Each slot `k` first admits `lambda` bits, then serves up to
/// `services[k]`: `B(k+1) = max(0, B(k) + λ - s(k))`. Service is FIFO, so
/// the slot-`k` bits sit at the tail of `B(k+1)` and the amount of them
/// left after slot `k + ϑ` is `clamp(B(k+1) - Σ_{j=k+1}^{k+ϑ} d(j), 0, λ)`.
/// `measure` must end at least `max_delay` slots before the trace does.
pub fn fluid_queue_violations(
    services: &[f64],
    lambda: f64,
    max_delay: usize,
    measure: Range<usize>,
) -> Vec<f64> {
    assert!(
        measure.end + max_delay <= services.len(),
        "measurement window must leave max_delay slots of trace"
    );
    let mut backlog_after = Vec::with_capacity(services.len());
    let mut departures = Vec::with_capacity(services.len());
    let mut b = 0.0f64;
    for &s in services {
        let d = (b + lambda).min(s);
        b = b + lambda - d;
        departures.push(d);
        backlog_after.push(b);
    }
    let mut violated = vec![0.0; max_delay + 1];
    for k in measure {
        let mut left = backlog_after[k];
        for (delay, v) in violated.iter_mut().enumerate() {
            if delay > 0 {
                left -= departures[k + delay];
            }
            if left <= 0.0 {
                break;
            }
            *v += left.min(lambda);
        }
    }
    violated
}

/// One point of an empirical delay CCDF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CcdfPoint {
    pub delay: u32,
    pub probability: f64,
    /// 99% Wilson interval.
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelayCcdf {
    pub points: Vec<CcdfPoint>,
    /// Slots whose arrivals were measured.
    pub slots: u64,
    pub bits_delivered: f64,
    pub mean_service: f64,
}

const Z_99: f64 = 2.575_829_303_548_900_4;

/// 99% Wilson score interval for a proportion observed over `n` trials.
pub fn wilson_interval(p: f64, n: f64) -> (f64, f64) {
    let z2 = Z_99 * Z_99;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z_99 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Empirical `P(delay > ϑ)`, `ϑ = 0..=max_delay`, from `plan.batches()`
/// independent traces totalling `plan.samples()` slots. Each trace drops
/// its first 10% of slots as warm-up and its last `max_delay` slots to
/// avoid censoring.
pub fn queue_dvp(cfg: &SncConfig, user: User, plan: &SimPlan, max_delay: u32) -> Result<DelayCcdf> {
    let max_delay = max_delay as usize;
    let lambda = cfg.arrival_rate();
    let sys = cfg.system();
    let traces: Vec<(Vec<f64>, u64, f64, f64)> = (0..plan.batches())
        .into_par_iter()
        .map(|b| {
            let len = plan.batch_len(b) as usize;
            let warmup = len / 10;
            if warmup + max_delay >= len {
                return Err(Error::InvalidParameter(format!(
                    "trace of {len} slots is too short for warm-up and delay {max_delay}"
                )));
            }
            let mut rng = plan.rng(b);
            let services: Vec<f64> = (0..len)
                .map(|_| {
                    let g = match user {
                        User::Strong => sys.pair().strong().sample(&mut rng),
                        User::Weak => sys.pair().min_gain().sample(&mut rng),
                    };
                    slot_service(cfg, user, g)
                })
                .collect();
            let measure = warmup..len - max_delay;
            let measured = measure.len() as u64;
            let delivered: f64 = services.iter().sum::<f64>().min(lambda * len as f64);
            let mean = services.iter().sum::<f64>() / len as f64;
            let violated = fluid_queue_violations(&services, lambda, max_delay, measure);
            Ok((violated, measured, delivered, mean))
        })
        .collect::<Result<_>>()?;

    let slots: u64 = traces.iter().map(|t| t.1).sum();
    let mean_service = traces.iter().map(|t| t.3).sum::<f64>() / traces.len() as f64;
    if lambda >= mean_service {
        log::warn!(
            "arrival rate {lambda} bits/slot is not below the mean service {mean_service}; the queue is unstable"
        );
    }
    let n = slots as f64;
    let points = (0..=max_delay)
        .map(|d| {
            let bits: f64 = traces.iter().map(|t| t.0[d]).sum();
            let p = (bits / (lambda * n)).clamp(0.0, 1.0);
            let (lower, upper) = wilson_interval(p, n);
            CcdfPoint {
                delay: d as u32,
                probability: p,
                lower,
                upper,
            }
        })
        .collect();
    Ok(DelayCcdf {
        points,
        slots,
        bits_delivered: traces.iter().map(|t| t.2).sum(),
        mean_service,
    })
}

/// Sample mean of the per-slot service of `user`, in bits per slot.
pub fn mean_service(cfg: &SncConfig, user: User, plan: &SimPlan) -> McEstimate {
    let sys = cfg.system();
    match user {
        User::Strong => mc_expectation(sys.pair().strong(), |g| slot_service(cfg, user, g), plan),
        User::Weak => mc_expectation(&sys.pair().min_gain(), |g| slot_service(cfg, user, g), plan),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_validation_and_batches() {
        assert!(SimPlan::new(1, 100, 9).is_err());
        assert!(SimPlan::new(1, 5, 10).is_err());
        let plan = SimPlan::new(1, 103, 10).unwrap();
        assert_eq!((0..10).map(|b| plan.batch_len(b)).sum::<u64>(), 103);
        assert_eq!(plan.batch_len(0), 11);
        assert_eq!(plan.batch_len(9), 10);
    }

    #[test]
    fn constant_service_queue() {
        // service 3 per slot, arrivals 2: never any backlog
        let v = fluid_queue_violations(&[3.0; 20], 2.0, 3, 0..10);
        assert!(v.iter().all(|&x| x == 0.0));
        // service 1, arrivals 2: backlog grows by 1 every slot
        let v = fluid_queue_violations(&[1.0; 20], 2.0, 2, 0..1);
        // slot 0: B(1) = 1, one of its bits waits; d(1) = 1 clears it
        assert_eq!(v, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson_interval(0.01, 1e4);
        assert!(lo < 0.01 && 0.01 < hi);
        let (lo, hi) = wilson_interval(0.0, 1e4);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 1e-3);
    }
}
