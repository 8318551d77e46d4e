use std::f64::consts::LN_2;

use approx::assert_relative_eq;
use noma_effrate::channel::gain_cdf;
use noma_effrate::effrate::er_noma;
use noma_effrate::sim::*;
use noma_effrate::snc::{dvp_curve, SncConfig};
use noma_effrate::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn system(alpha: u32, mu: u32, a_s: f64, rho_db: f64, theta: f64) -> NomaSystem {
    let pair = ChannelPair::new(
        AlphaMuChannel::new(alpha, mu, 1.0).unwrap(),
        AlphaMuChannel::new(alpha, mu, 0.1f64.sqrt()).unwrap(),
    )
    .unwrap();
    NomaSystem::new(
        pair,
        a_s,
        db_to_linear(rho_db),
        DelayQos::with_theta(theta).unwrap(),
    )
    .unwrap()
}

/// Departures through slot `t` from the min-plus form
/// `D(t) = min_{0 <= u <= t+1} [A(u) + S(u..=t)]`, where `A(u) = λu` counts
/// arrivals in slots before `u`.
fn cumulative_departures(services: &[f64], lambda: f64) -> Vec<f64> {
    (0..services.len())
        .map(|t| {
            (0..=t + 1)
                .map(|u| lambda * u as f64 + services[u..t + 1].iter().sum::<f64>())
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

#[test]
fn lindley_recursion_matches_cumulative_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let services: Vec<f64> = (0..400).map(|_| rng.random_range(0..7) as f64).collect();
    let lambda = 3.0;
    let max_delay = 12;
    let measure = 20..380;
    let departures = cumulative_departures(&services, lambda);
    let mut expected = vec![0.0; max_delay + 1];
    for k in measure.clone() {
        let arrived = lambda * (k + 1) as f64;
        for (d, e) in expected.iter_mut().enumerate() {
            *e += (arrived - departures[k + d]).clamp(0.0, lambda);
        }
    }
    let got = fluid_queue_violations(&services, lambda, max_delay, measure);
    assert_eq!(got, expected);
    assert!(expected[0] > 0.0 && expected[max_delay] < expected[0]);
}

#[test]
fn deterministic_gain_gives_exact_rate() {
    let sys = system(2, 1, 0.2, 10.0, 1.0);
    let plan = SimPlan::new(1, 1000, 10).unwrap();
    let r = mc_effective_rate_with(&DeterministicGain(1.0), &sys, User::Strong, &plan).unwrap();
    assert_relative_eq!(r.value, (1.0 + 0.2 * 10.0f64).log2(), max_relative = 1e-12);
    assert!(r.error < 1e-12);
    assert_eq!(r.provenance, Provenance::MonteCarlo);
}

#[test]
fn sampled_rate_matches_quadrature() {
    for user in User::BOTH {
        let sys = system(2, 2, 0.2, 10.0, 1.0);
        let plan = SimPlan::new(9, 1_000_000, 20).unwrap();
        let mc = mc_effective_rate(&sys, user, &plan).unwrap();
        let q = er_noma(&sys, user, EvalStrategy::Quadrature).unwrap();
        assert!(
            (mc.value - q.value).abs() < 4.0 * mc.error,
            "{user:?}: sampled {} ± {} vs {}",
            mc.value,
            mc.error,
            q.value
        );
    }
}

#[test]
fn standard_error_halves_with_four_times_the_samples() {
    let sys = system(2, 1, 0.2, 10.0, 1.0);
    let se = |n| {
        // average over seeds to steady the batch-means estimate
        (0..8)
            .map(|seed| {
                mc_effective_rate(&sys, User::Strong, &SimPlan::new(seed, n, 40).unwrap())
                    .unwrap()
                    .error
            })
            .sum::<f64>()
            / 8.0
    };
    let ratio = se(100_000) / se(400_000);
    assert!((ratio - 2.0).abs() < 0.3, "ratio {ratio}");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let sys = system(3, 2, 0.3, 20.0, 0.5);
    let plan = SimPlan::new(77, 200_000, 16).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| mc_effective_rate(&sys, User::Weak, &plan).unwrap())
    };
    assert_eq!(run(1), run(6));
}

#[test]
fn simulator_gains_follow_the_channel_law() {
    let ch = AlphaMuChannel::new(3, 2, 0.9).unwrap();
    let plan = SimPlan::new(3, 20_000, 10).unwrap();
    let mut rng = plan.rng(4);
    let mut xs: Vec<f64> = (0..20_000).map(|_| ch.sample(&mut rng)).collect();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = gain_cdf(&ch, x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    assert!(d < 1.628 / n.sqrt(), "KS distance {d}");
}

#[test]
fn empirical_delay_stays_below_the_bound() {
    for (alpha, mu) in [(2, 1), (2, 2)] {
        for user in User::BOTH {
            let sys = system(alpha, mu, 0.2, 10.0, 1.0);
            let probe = SncConfig::new(sys, 168, 1.0).unwrap();
            let mean = mean_service(&probe, user, &SimPlan::new(2, 200_000, 10).unwrap()).mean;
            let cfg = probe.with_arrival_rate(0.7 * mean).unwrap();
            let ccdf = queue_dvp(&cfg, user, &SimPlan::new(5, 400_000, 10).unwrap(), 30).unwrap();
            let delays: Vec<f64> = ccdf.points.iter().map(|p| p.delay as f64).collect();
            let bound = dvp_curve(&cfg, user, &delays).unwrap();
            for (p, b) in ccdf.points.iter().zip(&bound) {
                assert!(
                    p.lower <= b.bound,
                    "({alpha},{mu}) {user:?} delay {}: {} > {}",
                    p.delay,
                    p.lower,
                    b.bound
                );
            }
            for w in ccdf.points.windows(2) {
                assert!(w[1].probability <= w[0].probability);
            }
            assert!(ccdf
                .points
                .iter()
                .all(|p| p.lower <= p.probability && p.probability <= p.upper));
            assert!(ccdf.mean_service > cfg.arrival_rate());
        }
    }
}

#[test]
fn service_is_scaled_spectral_efficiency() {
    let sys = system(2, 1, 0.2, 10.0, 1.0);
    let cfg = SncConfig::new(sys, 100, 1.0).unwrap();
    assert_relative_eq!(
        slot_service(&cfg, User::Strong, 1.0),
        100.0 * (1.0 + 2.0f64).ln() / LN_2,
        max_relative = 1e-14
    );
}

#[test]
fn short_traces_are_rejected() {
    let cfg = SncConfig::new(system(2, 1, 0.2, 10.0, 1.0), 10, 1.0).unwrap();
    assert!(queue_dvp(&cfg, User::Strong, &SimPlan::new(1, 200, 10).unwrap(), 30).is_err());
}

#[test]
fn tiny_arrivals_never_wait() {
    let cfg = SncConfig::new(system(2, 2, 0.2, 10.0, 1.0), 168, 1e-3).unwrap();
    let ccdf = queue_dvp(
        &cfg,
        User::Strong,
        &SimPlan::new(1, 100_000, 10).unwrap(),
        5,
    )
    .unwrap();
    assert!(
        ccdf.points[0].probability < 1e-3,
        "{}",
        ccdf.points[0].probability
    );
}

#[test]
fn doubling_arrivals_raises_the_curve() {
    for user in User::BOTH {
        let probe = SncConfig::new(system(2, 1, 0.2, 10.0, 1.0), 168, 1.0).unwrap();
        let mean = mean_service(&probe, user, &SimPlan::new(2, 100_000, 10).unwrap()).mean;
        let plan = SimPlan::new(8, 300_000, 10).unwrap();
        let low = queue_dvp(
            &probe.with_arrival_rate(0.35 * mean).unwrap(),
            user,
            &plan,
            20,
        )
        .unwrap();
        let high = queue_dvp(
            &probe.with_arrival_rate(0.7 * mean).unwrap(),
            user,
            &plan,
            20,
        )
        .unwrap();
        for (l, h) in low.points.iter().zip(&high.points) {
            assert!(h.probability >= l.probability, "{user:?} delay {}", l.delay);
        }
        assert!(high.points[0].probability > low.points[0].probability);
    }
}
