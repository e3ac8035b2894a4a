//! Property-based invariants over randomized inputs: monotonicity and range
//! of the worst-case laws, reflection symmetry, level inversion at the
//! critical values, quantile round-trips, and the moving-block sandwich.

mod common;

use common::two_pass_variance;
use gsig::bounds::{moving_block_bounds, BlockConfig};
use gsig::gnormal::{
    critical_value, max_rejection_lower, max_rejection_two_sided, max_rejection_upper,
    std_normal_cdf, std_normal_quantile,
};
use gsig::rules::decide;
use gsig::{TestKind, TestSpec, VarianceBand};
use proptest::prelude::*;

fn arb_band() -> impl Strategy<Value = VarianceBand> {
    (0.05f64..3.0, 1.0f64..5.0)
        .prop_map(|(lo, ratio)| VarianceBand::new(lo, lo * ratio).unwrap())
}

fn arb_kind() -> impl Strategy<Value = TestKind> {
    prop_oneof![
        Just(TestKind::I),
        Just(TestKind::II),
        Just(TestKind::III)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn upper_law_lives_in_the_unit_interval_and_never_increases(
        band in arb_band(),
        a in -15.0f64..15.0,
        step in 0.0f64..5.0,
    ) {
        let lo_val = max_rejection_upper(a, band);
        let hi_val = max_rejection_upper(a + step, band);
        prop_assert!((0.0..=1.0).contains(&lo_val));
        prop_assert!((0.0..=1.0).contains(&hi_val));
        prop_assert!(hi_val <= lo_val);
    }

    #[test]
    fn lower_law_is_the_reflection(band in arb_band(), c in -20.0f64..20.0) {
        prop_assert_eq!(max_rejection_lower(c, band), max_rejection_upper(-c, band));
    }

    #[test]
    fn two_sided_law_caps_the_doubled_tail(band in arb_band(), c in -10.0f64..10.0) {
        let two = max_rejection_two_sided(c, band);
        prop_assert!(two <= 1.0);
        prop_assert!(two <= 2.0 * max_rejection_upper(c, band) + 1e-15);
        // One-sided never beats two-sided mass at the same cutoff.
        prop_assert!(max_rejection_upper(c.abs(), band) <= two + 1e-15);
    }

    #[test]
    fn widening_the_top_of_the_band_raises_the_tail(
        lo in 0.05f64..2.0,
        up1 in 1.0f64..4.0,
        extra in 0.0f64..2.0,
        c in -6.0f64..6.0,
    ) {
        let narrow = VarianceBand::new(lo, lo * up1).unwrap();
        let wide = VarianceBand::new(lo, lo * up1 + extra).unwrap();
        prop_assert!(
            max_rejection_upper(c, wide) >= max_rejection_upper(c, narrow) - 1e-15
        );
    }

    #[test]
    fn critical_values_achieve_the_level(
        band in arb_band(),
        kind in arb_kind(),
        alpha in 0.005f64..0.45,
    ) {
        let spec = TestSpec::new(kind, 0.0, alpha).unwrap();
        let c = critical_value(spec, band);
        let achieved = match kind {
            TestKind::I => max_rejection_upper(c, band),
            TestKind::II => max_rejection_lower(c, band),
            TestKind::III => max_rejection_two_sided(c, band),
        };
        prop_assert!((achieved - alpha).abs() <= 1e-9);
    }

    #[test]
    fn cdf_is_monotone_and_round_trips(p in 1e-9f64..1.0) {
        prop_assume!(p < 1.0 - 1e-9);
        let x = std_normal_quantile(p).unwrap();
        prop_assert!((std_normal_cdf(x) - p).abs() <= 1e-9);
        prop_assert!(std_normal_cdf(x + 0.25) >= std_normal_cdf(x));
    }

    #[test]
    fn rejection_agrees_with_the_p_value(
        band in arb_band(),
        kind in arb_kind(),
        alpha in 0.01f64..0.45,
        shift in -2.0f64..2.0,
        seed_vals in proptest::collection::vec(-3.0f64..3.0, 16..64),
    ) {
        let spec = TestSpec::new(kind, 0.0, alpha).unwrap();
        let data: Vec<f64> = seed_vals.iter().map(|v| v + shift).collect();
        let report = decide(&data, spec, band).unwrap();
        // Skip razor-edge ties where the comparison is not numerically
        // meaningful.
        prop_assume!((report.robust_p_value - alpha).abs() > 1e-12);
        prop_assert_eq!(report.reject_robust, report.robust_p_value < alpha);
    }

    #[test]
    fn moving_block_bounds_sandwich_every_window(
        data in proptest::collection::vec(-50.0f64..50.0, 8..120),
        m_frac in 0.0f64..1.0,
        probe_frac in 0.0f64..1.0,
    ) {
        let n = data.len();
        let m = 2 + ((n - 2) as f64 * m_frac) as usize;
        let est = moving_block_bounds(&data, BlockConfig::new(m)).unwrap();
        let windows = n - m + 1;
        let probe = ((windows - 1) as f64 * probe_frac) as usize;
        let v = two_pass_variance(&data[probe..probe + m]);
        let tol = 1e-9 * v.max(1.0);
        prop_assert!(est.sigma_lower_sq() <= v + tol);
        prop_assert!(v <= est.sigma_upper_sq() + tol);
    }
}
