use std::f64::consts::{LN_2, LOG2_E};

use approx::assert_relative_eq;
use noma_effrate::channel::gain_pdf;
use noma_effrate::effrate::{
    er_derivatives, er_high_snr, er_low_snr, er_noma, er_oma, ergodic_rate, min_energy_per_bit,
    noma_oma_gap, power_search, rate_loss, sum_er_noma, wideband_slope, DEFAULT_R_TARGET,
};
use noma_effrate::specfun::integrate_half_line;
use noma_effrate::{
    db_to_linear, AlphaMuChannel, ChannelPair, DelayQos, DeterministicGain, Error, EvalStrategy,
    GainLaw, NomaSystem, User,
};
use proptest::prelude::*;

const Q: EvalStrategy = EvalStrategy::Quadrature;
const CF: EvalStrategy = EvalStrategy::ClosedForm;

fn pair_with(alpha: u32, mu: u32, omega_w_sq: f64) -> ChannelPair {
    ChannelPair::new(
        AlphaMuChannel::new(alpha, mu, 1.0).unwrap(),
        AlphaMuChannel::new(alpha, mu, omega_w_sq.sqrt()).unwrap(),
    )
    .unwrap()
}

fn system(alpha: u32, mu: u32, a_s: f64, rho_db: f64, theta: f64) -> NomaSystem {
    NomaSystem::new(
        pair_with(alpha, mu, 0.1),
        a_s,
        db_to_linear(rho_db),
        DelayQos::with_theta(theta).unwrap(),
    )
    .unwrap()
}

fn rate(sys: &NomaSystem, user: User) -> f64 {
    er_noma(sys, user, Q).unwrap().value
}

#[test]
fn vanishing_theta_recovers_ergodic_rate() {
    for (alpha, mu) in [(1, 1), (2, 1), (3, 2)] {
        let sys = system(alpha, mu, 0.24, 10.0, 1e-9);
        for user in User::BOTH {
            let c = ergodic_rate(&sys, user, Q).unwrap().value;
            assert!((rate(&sys, user) - c).abs() < 1e-6, "{alpha},{mu},{user:?}");
        }
    }
    let sys = system(2, 1, 0.24, 10.0, 0.0);
    assert_eq!(
        er_noma(&sys, User::Weak, Q).unwrap(),
        ergodic_rate(&sys, User::Weak, Q).unwrap()
    );
}

#[test]
fn tiny_power_share_gives_no_strong_rate() {
    let sys = system(2, 1, 1e-12, 10.0, 0.5);
    assert!(rate(&sys, User::Strong) < 1e-9);
}

#[test]
fn oma_limits_and_symmetry() {
    let sys = system(2, 1, 0.24, 10.0, 1e-9);
    for user in User::BOTH {
        let ch = sys.oma_channel(user);
        let half = 0.5 * ch.expect(|g| (sys.rho() * g).ln_1p()).unwrap().value / LN_2;
        assert!((er_oma(&sys, user, Q).unwrap().value - half).abs() < 1e-6);
    }

    let ch = AlphaMuChannel::new(3, 2, 1.0).unwrap();
    let sym = NomaSystem::new(
        ChannelPair::new_unordered(ch, ch).unwrap(),
        0.3,
        10.0,
        DelayQos::with_theta(1.0).unwrap(),
    )
    .unwrap();
    assert_eq!(
        er_oma(&sym, User::Strong, Q).unwrap().value,
        er_oma(&sym, User::Weak, Q).unwrap().value
    );
}

#[test]
fn oma_matches_density_quadrature() {
    let sys = system(2, 1, 0.24, 10.0, 1.0);
    let nu = sys.nu();
    for user in User::BOTH {
        let ch = *sys.oma_channel(user);
        let m = integrate_half_line(
            |x| {
                if x == 0.0 {
                    return gain_pdf(&ch, 0.0).unwrap();
                }
                gain_pdf(&ch, x).unwrap() * (1.0 + sys.rho() * x).powf(-0.5 * nu)
            },
            0.0,
            1e-13,
        )
        .unwrap()
        .value;
        let want = -m.log2() / nu;
        for strategy in [Q, CF] {
            let got = er_oma(&sys, user, strategy).unwrap().value;
            assert_relative_eq!(got, want, max_relative = 1e-6);
        }
    }
}

#[test]
fn high_snr_values() {
    for (a_s, want) in [(0.2, 5f64.log2()), (0.24, (1.0f64 / 0.24).log2())] {
        let sys = system(3, 2, a_s, 30.0, 0.7);
        assert_relative_eq!(
            er_high_snr(&sys, User::Weak).unwrap().value,
            want,
            max_relative = 1e-14
        );
    }
    assert_relative_eq!(
        er_high_snr(&system(2, 1, 0.24, 0.0, 1.0), User::Weak)
            .unwrap()
            .value,
        2.058_893_689,
        max_relative = 1e-9
    );

    let sys = system(2, 2, 0.24, 40.0, 0.5);
    let approx = er_high_snr(&sys, User::Strong).unwrap().value;
    assert!((approx - rate(&sys, User::Strong)).abs() < 0.05);

    // αμ = 1 < 2ν ≈ 1.44
    assert!(matches!(
        er_high_snr(&system(1, 1, 0.24, 40.0, 0.5), User::Strong),
        Err(Error::ValidityViolation { .. })
    ));
}

#[test]
fn high_snr_strong_theta_limit_is_continuous() {
    let at_zero = er_high_snr(&system(2, 3, 0.24, 30.0, 0.0), User::Strong)
        .unwrap()
        .value;
    let near = er_high_snr(&system(2, 3, 0.24, 30.0, 1e-7), User::Strong)
        .unwrap()
        .value;
    assert!((at_zero - near).abs() < 1e-6);
}

#[test]
fn weak_rate_saturates_at_high_snr() {
    for (alpha, mu) in [(1, 1), (2, 1), (2, 3), (3, 2)] {
        for theta in [0.1, 0.5, 1.0] {
            let sys = system(alpha, mu, 0.24, 60.0, theta);
            let ceiling = er_high_snr(&sys, User::Weak).unwrap().value;
            let exact = rate(&sys, User::Weak);
            assert!(exact <= ceiling + 1e-12);
            if alpha * mu > 1 {
                assert!(
                    ceiling - exact < 0.02,
                    "{alpha},{mu},{theta}: {exact} vs {ceiling}"
                );
            }
        }
    }
}

#[test]
fn derivative_values() {
    let sys = system(2, 1, 0.24, 0.0, 0.5);
    let d = er_derivatives(&sys, User::Strong).unwrap();
    assert_relative_eq!(d.first, LOG2_E * 0.24, max_relative = 1e-14);
    let d0 = er_derivatives(&system(2, 1, 0.24, 0.0, 0.0), User::Strong).unwrap();
    assert_relative_eq!(d0.second, -LOG2_E * 0.24 * 0.24 * 2.0, max_relative = 1e-14);
}

/// First and second derivative at 0 from one-sided differences with steps
/// `h` and `2h` (using `R(0) = 0`), Richardson-extrapolated to remove the
/// leading `O(h)` bias.
fn finite_difference(sys: &NomaSystem, user: User, h: f64) -> (f64, f64) {
    let at = |rho: f64| rate(&sys.with_rho(rho).unwrap(), user);
    let (r1, r2, r4) = (at(h), at(2.0 * h), at(4.0 * h));
    let first = |h: f64, a: f64, b: f64| (4.0 * a - b) / (2.0 * h);
    let second = |h: f64, a: f64, b: f64| (b - 2.0 * a) / (h * h);
    let d1 = (4.0 * first(h, r1, r2) - first(2.0 * h, r2, r4)) / 3.0;
    let d2 = 2.0 * second(h, r1, r2) - second(2.0 * h, r2, r4);
    (d1, d2)
}

#[test]
fn derivatives_match_finite_differences() {
    for (alpha, mu, theta) in [(2, 1, 0.5), (1, 2, 1.0), (3, 3, 0.1), (2, 2, 2.0)] {
        let sys = system(alpha, mu, 0.24, 0.0, theta);
        for user in User::BOTH {
            let d = er_derivatives(&sys, user).unwrap();
            let (first, second) = finite_difference(&sys, user, 1e-3);
            assert_relative_eq!(d.first, first, max_relative = 1e-3);
            assert_relative_eq!(d.second, second, max_relative = 1e-3);
        }
    }
}

#[test]
fn low_snr_taylor_value() {
    assert_eq!(
        er_low_snr(
            &system(2, 1, 0.24, 0.0, 0.5).with_rho(0.0).unwrap(),
            User::Weak
        )
        .unwrap()
        .value,
        0.0
    );
    let sys = system(2, 1, 0.24, 0.0, 0.5).with_rho(1e-3).unwrap();
    for user in User::BOTH {
        assert_relative_eq!(
            er_low_snr(&sys, user).unwrap().value,
            rate(&sys, user),
            max_relative = 1e-3
        );
    }
    // the sum grows like ρ (Ṙ_s + Ṙ_w)
    let slope: f64 = User::BOTH
        .iter()
        .map(|&u| er_derivatives(&sys, u).unwrap().first)
        .sum();
    let tiny = sys.with_rho(1e-6).unwrap();
    let sum = sum_er_noma(&tiny, Q).unwrap();
    assert_relative_eq!(sum / 1e-6, slope, max_relative = 1e-5);
}

#[test]
fn energy_per_bit() {
    let sys = system(2, 1, 0.24, 0.0, 0.5);
    assert_relative_eq!(
        min_energy_per_bit(&sys, User::Strong).unwrap(),
        1.0 / (0.24 * LOG2_E),
        max_relative = 1e-14
    );
    assert_relative_eq!(
        min_energy_per_bit(&sys, User::Strong).unwrap(),
        2.888,
        max_relative = 1e-3
    );
    let other = system(2, 1, 0.24, 0.0, 3.0);
    for user in User::BOTH {
        assert_eq!(
            min_energy_per_bit(&sys, user).unwrap(),
            min_energy_per_bit(&other, user).unwrap()
        );
    }
    assert_relative_eq!(
        min_energy_per_bit(&sys, User::Weak).unwrap(),
        1.0 / (0.76 * LOG2_E / 11.0),
        max_relative = 1e-13
    );
}

#[test]
fn wideband_slope_values() {
    let sys = system(2, 1, 0.24, 0.0, 0.0);
    assert_relative_eq!(
        wideband_slope(&sys, User::Strong).unwrap(),
        1.0,
        max_relative = 1e-14
    );
    let mut last = f64::INFINITY;
    for theta in [0.0, 0.1, 0.5, 1.0, 2.0, 5.0] {
        let s = wideband_slope(&system(2, 1, 0.24, 0.0, theta), User::Strong).unwrap();
        assert!(s < last);
        last = s;
    }
}

#[test]
fn weak_wideband_slope_matches_rate_curve() {
    // least-squares fit of R = aρ + bρ²/2 over ρ in [-40, -30] dB
    for (alpha, mu) in [(2, 1), (3, 2)] {
        let sys = system(alpha, mu, 0.24, 0.0, 0.5);
        let pts: Vec<(f64, f64)> = (0..=10)
            .map(|k| {
                let rho = db_to_linear(-40.0 + k as f64);
                (rho, rate(&sys.with_rho(rho).unwrap(), User::Weak))
            })
            .collect();
        let (mut s11, mut s12, mut s22, mut t1, mut t2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(x, y) in &pts {
            let (f1, f2) = (x, 0.5 * x * x);
            s11 += f1 * f1;
            s12 += f1 * f2;
            s22 += f2 * f2;
            t1 += f1 * y;
            t2 += f2 * y;
        }
        let det = s11 * s22 - s12 * s12;
        let a = (t1 * s22 - t2 * s12) / det;
        let b = (s11 * t2 - s12 * t1) / det;
        let fitted = -2.0 * a * a * LN_2 / b;
        assert_relative_eq!(
            wideband_slope(&sys, User::Weak).unwrap(),
            fitted,
            max_relative = 0.05
        );
    }
}

#[test]
fn exponential_integral_oracle() {
    // e^{1/c} E1(1/c) / ln 2 from mpmath
    let table = [
        (0.1, 0.132_097_967_802_192_38),
        (1.0, 0.860_347_382_270_885_95),
        (10.0, 2.906_514_808_414_804_98),
        (100.0, 5.884_048_233_683_473_45),
        (1000.0, 9.143_619_491_037_330_82),
    ];
    for (c, want) in table {
        let sys = system(2, 1, 0.24, 0.0, 0.5).with_rho(c / 0.24).unwrap();
        for strategy in [Q, CF] {
            let got = ergodic_rate(&sys, User::Strong, strategy).unwrap().value;
            assert_relative_eq!(got, want, max_relative = 1e-9);
        }
    }
}

#[test]
fn deterministic_gain_ergodic() {
    let g = DeterministicGain(3.0);
    let c = g.expect(|x| (x).ln_1p() / LN_2).unwrap();
    assert_eq!(c.value, 4f64.log2());
    assert_eq!(c.error, 0.0);
}

#[test]
fn closed_form_ergodic_rates_match_quadrature() {
    for (alpha, mu) in [(1, 1), (2, 1), (2, 3), (3, 2), (4, 4)] {
        for rho_db in [-10.0, 0.0, 10.0, 20.0, 30.0] {
            let sys = system(alpha, mu, 0.24, rho_db, 0.5);
            for user in User::BOTH {
                let q = ergodic_rate(&sys, user, Q).unwrap().value;
                let c = ergodic_rate(&sys, user, CF).unwrap().value;
                assert_relative_eq!(c, q, max_relative = 1e-6);
            }
        }
    }
}

#[test]
fn rate_loss_behaviour() {
    assert!(rate_loss(&system(2, 1, 0.24, 10.0, 1e-9)).unwrap() < 1e-6);
    let loss = |theta, rho_db| rate_loss(&system(2, 1, 0.24, rho_db, theta)).unwrap();
    assert!(loss(2.0, 10.0) > loss(0.5, 10.0));
    assert!(loss(0.5, 30.0) > loss(0.5, 10.0));
    assert!(loss(0.5, 10.0) >= 0.0);
}

#[test]
fn noma_beats_oma_at_moderate_delay_constraints() {
    for rho_db in [10.0, 20.0, 30.0, 40.0] {
        let gap = noma_oma_gap(&system(2, 1, 0.24, rho_db, 0.5)).unwrap();
        assert!(gap > 0.0, "{rho_db} dB: {gap}");
    }
}

#[test]
fn noma_oma_gap_is_small_under_stringent_delay() {
    for rho_db in [10.0, 20.0] {
        let gap = noma_oma_gap(&system(2, 1, 0.24, rho_db, 2.0)).unwrap();
        assert!(gap.abs() < 0.1, "{rho_db} dB: {gap}");
    }
}

#[test]
fn oma_overtakes_noma_when_delay_exponent_dominates_fading() {
    // With ν > αμ/2 both OMA users scale like log2(ρ)/ν, while the NOMA weak
    // user saturates, so OMA wins at high SNR.
    let sys = system(2, 1, 0.24, 40.0, 2.0);
    assert!(sys.nu() > 1.0);
    assert!(noma_oma_gap(&sys).unwrap() < 0.0);
}

#[test]
fn noma_oma_gap_shrinks_as_weak_link_improves() {
    let gap = |w2: f64| {
        let sys = NomaSystem::new(
            pair_with(2, 1, w2),
            0.24,
            db_to_linear(20.0),
            DelayQos::with_theta(1.0).unwrap(),
        )
        .unwrap();
        noma_oma_gap(&sys).unwrap()
    };
    assert!(gap(0.1) > gap(0.3));
    assert!(gap(0.3) > gap(0.6));
}

fn standard_grid() -> Vec<f64> {
    (1..=24).map(|k| k as f64 / 100.0).collect()
}

#[test]
fn power_search_finds_largest_admissible_share() {
    for rho_db in [10.0, 20.0, 30.0] {
        let best = power_search(
            &system(2, 1, 0.1, rho_db, 0.5),
            &standard_grid(),
            DEFAULT_R_TARGET,
        )
        .unwrap();
        assert_eq!(best.a_s, 0.24, "{rho_db} dB");
    }
}

#[test]
fn rayleigh_optimum_leaves_the_grid_edge_at_40_db() {
    // Under Rayleigh fading at 40 dB the strong user's effective rate is
    // dominated by deep fades, so extra power buys it little; the optimum
    // moves to small a_s, though a_s = 0.24 stays within 0.5% of it.
    let best = power_search(
        &system(2, 1, 0.1, 40.0, 0.5),
        &standard_grid(),
        DEFAULT_R_TARGET,
    )
    .unwrap();
    let at_edge = best.sweep.iter().find(|(a, _)| *a == 0.24).unwrap().1;
    assert!(best.a_s < 0.24);
    assert!(best.sum_rate - at_edge < 5e-3 * best.sum_rate);
}

#[test]
fn power_search_on_nakagami_family() {
    for rho_db in [10.0, 20.0, 30.0, 40.0] {
        let best = power_search(
            &system(2, 2, 0.1, rho_db, 0.5),
            &standard_grid(),
            DEFAULT_R_TARGET,
        )
        .unwrap();
        assert_eq!(best.a_s, 0.24, "{rho_db} dB");
    }
}

#[test]
fn power_search_edge_cases() {
    let sys = system(2, 2, 0.1, 10.0, 0.5);
    assert_eq!(
        power_search(&sys, &[0.1], DEFAULT_R_TARGET).unwrap().a_s,
        0.1
    );
    assert_eq!(
        power_search(&sys, &[], DEFAULT_R_TARGET),
        Err(Error::EmptyGrid)
    );
    assert!(power_search(&sys, &[0.3], DEFAULT_R_TARGET).is_err());
    let grid = [0.2, 0.05, 0.15];
    let best = power_search(&sys, &grid, DEFAULT_R_TARGET).unwrap();
    let brute = grid
        .iter()
        .map(|&a| (a, sum_er_noma(&sys.with_a_s(a).unwrap(), Q).unwrap()))
        .fold(
            (0.0, f64::NEG_INFINITY),
            |b, c| if c.1 > b.1 { c } else { b },
        );
    assert_eq!(best.a_s, brute.0);
    assert_eq!(best.sum_rate, brute.1);
}

#[test]
fn strategy_agreement_on_acceptance_grid() {
    for alpha in 1..=3 {
        for mu in 1..=3 {
            for rho_db in [0.0, 10.0, 20.0] {
                let sys = system(alpha, mu, 0.24, rho_db, 0.5);
                let q = rate(&sys, User::Strong);
                let c = er_noma(&sys, User::Strong, CF).unwrap().value;
                assert_relative_eq!(c, q, max_relative = 1e-5);
                let q = rate(&sys, User::Weak);
                let c = er_noma(&sys, User::Weak, CF).unwrap().value;
                assert_relative_eq!(c, q, max_relative = 1e-3);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn jensen_bound(alpha in 1u32..=4, mu in 1u32..=4, a_s in 0.01f64..0.49, rho_db in -20.0f64..40.0, theta in 0.01f64..5.0) {
        let sys = system(alpha, mu, a_s, rho_db, theta);
        for user in User::BOTH {
            let c = ergodic_rate(&sys, user, Q).unwrap().value;
            prop_assert!(rate(&sys, user) <= c + 1e-9);
        }
    }

    #[test]
    fn rate_nonincreasing_in_theta(alpha in 1u32..=4, mu in 1u32..=4, a_s in 0.01f64..0.49, rho_db in -20.0f64..40.0) {
        for user in User::BOTH {
            let rates: Vec<f64> = [0.1, 0.5, 1.0, 2.0].iter().map(|&t| rate(&system(alpha, mu, a_s, rho_db, t), user)).collect();
            for w in rates.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-12, "{:?}", rates);
            }
        }
    }

    #[test]
    fn derivatives_are_theta_free_in_first_order(alpha in 1u32..=4, mu in 1u32..=4, a_s in 0.01f64..0.49, t1 in 0.0f64..5.0, t2 in 0.0f64..5.0) {
        for user in User::BOTH {
            let d1 = er_derivatives(&system(alpha, mu, a_s, 0.0, t1), user).unwrap();
            let d2 = er_derivatives(&system(alpha, mu, a_s, 0.0, t2), user).unwrap();
            prop_assert_eq!(d1.first, d2.first);
            prop_assert!(d1.second < 0.0);
        }
    }
}
