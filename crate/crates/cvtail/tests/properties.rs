//! Property tests for the library's structural invariants.

use cvtail::asymptotics::chi2_sf;
use cvtail::cli::input::split_parts;
use cvtail::distributions::{
    exp_conditional_moments, exponential_quantile, gpd_cdf, gpd_quantile, GpdParams,
};
use cvtail::empirical::quantile_type7;
use cvtail::empirics::{statistic_cv, statistic_mw, statistic_su, statistic_t_m, Sample};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn statistics_are_scale_invariant(
        raw in prop::collection::vec(0.01f64..1e4, 4..60),
        lambda in prop_oneof![Just(1e-3), 0.001f64..1000.0, Just(1e6)],
    ) {
        let sample = Sample::new(raw).unwrap();
        let scaled = sample.scaled(lambda).unwrap();
        let pairs = [
            (statistic_cv(&sample).unwrap(), statistic_cv(&scaled).unwrap()),
            (statistic_mw(&sample).unwrap(), statistic_mw(&scaled).unwrap()),
        ];
        for (a, b) in pairs {
            prop_assert!((a - b).abs() <= 1e-11 * a.abs().max(1.0), "{a} vs {b}");
        }
        // SU errors only when every value equals the median
        if let Ok(a) = statistic_su(&sample) {
            let b = statistic_su(&scaled).unwrap();
            prop_assert!((a - b).abs() <= 1e-11 * a.abs().max(1.0));
        }
    }

    #[test]
    fn tm_zero_is_squared_greenwood(raw in prop::collection::vec(0.01f64..1e3, 4..50)) {
        let sample = Sample::new(raw).unwrap();
        let tm = statistic_t_m(&sample, 0, 2).unwrap();
        let cv = statistic_cv(&sample).unwrap();
        let n = sample.n() as f64;
        prop_assert_eq!(tm.value, n * ((cv - 1.0) * (cv - 1.0)));
    }

    #[test]
    fn exponential_sampler_scales_exactly(
        seed in any::<u64>(),
        u in 1e-12f64..0.999_999,
        lambda in 0.001f64..1000.0,
    ) {
        let _ = seed;
        // quantile transform is a single multiply by the mean
        let unit = exponential_quantile(1.0, u);
        prop_assert_eq!(exponential_quantile(lambda, u), lambda * unit);
    }

    #[test]
    fn gpd_sampler_scales_linearly_in_beta(
        xi in 0.0f64..1.5,
        beta in 0.01f64..10.0,
        lambda in 0.001f64..1000.0,
        seed in any::<u64>(),
    ) {
        use cvtail::distributions::sample_gpd;
        use cvtail::RandomSource;
        let unit = sample_gpd(&GpdParams::new(xi, beta).unwrap(), 20, RandomSource::new(seed)).unwrap();
        let scaled = sample_gpd(&GpdParams::new(xi, lambda * beta).unwrap(), 20, RandomSource::new(seed)).unwrap();
        for (x, y) in unit.values().iter().zip(scaled.values()) {
            prop_assert!((y - lambda * x).abs() <= 1e-12 * (lambda * x), "{y} vs {}", lambda * x);
        }
    }

    #[test]
    fn gpd_quantile_inverts_cdf(
        xi in 0.0f64..2.0,
        beta in 0.01f64..100.0,
        u in 0.0f64..0.999,
    ) {
        let params = GpdParams::new(xi, beta).unwrap();
        let x = gpd_quantile(&params, u).unwrap();
        prop_assert!(x >= 0.0);
        let round = gpd_cdf(&params, x);
        prop_assert!((round - u).abs() <= 1e-9, "u={u} x={x} F(x)={round}");
    }

    #[test]
    fn conditional_moment_recurrence(t in 0.0f64..10.0, mu in 0.1f64..10.0) {
        let m = exp_conditional_moments(t, mu).unwrap();
        for k in 1..5usize {
            // E[X^k 1_{X>t}] >= t^k Pr{X>t}
            prop_assert!(m[k] >= t.powi(k as i32) * m[0] * (1.0 - 1e-12));
        }
    }

    #[test]
    fn chi2_sf_monotone_in_x(nu in 0.2f64..50.0, a in 0.0f64..40.0, b in 0.0f64..40.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let p_lo = chi2_sf(lo, nu).unwrap();
        let p_hi = chi2_sf(hi, nu).unwrap();
        prop_assert!((0.0..=1.0).contains(&p_lo));
        prop_assert!(p_hi <= p_lo + 1e-12);
    }

    #[test]
    fn quantiles_monotone_in_level(
        mut draws in prop::collection::vec(-1e3f64..1e3, 2..80),
        p in 0.0f64..1.0,
        q in 0.0f64..1.0,
    ) {
        draws.sort_unstable_by(f64::total_cmp);
        let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
        let v_lo = quantile_type7(&draws, lo).unwrap();
        let v_hi = quantile_type7(&draws, hi).unwrap();
        prop_assert!(v_lo <= v_hi);
        prop_assert!(v_lo >= draws[0] && v_hi <= draws[draws.len() - 1]);
    }

    #[test]
    fn split_parts_partitions(returns in prop::collection::vec(-10.0f64..10.0, 0..100)) {
        let parts = split_parts(&returns);
        prop_assert_eq!(
            parts.positive.len() + parts.negative.len() + parts.zeros,
            returns.len()
        );
        prop_assert!(parts.positive.iter().all(|&x| x > 0.0));
        prop_assert!(parts.negative.iter().all(|&x| x > 0.0));
    }
}
