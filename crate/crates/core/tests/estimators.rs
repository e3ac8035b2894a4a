//! Statistical validation of the band estimators: Monte Carlo unbiasedness
//! of the block extremes, the pooled-variance mean identity, the straddling
//! window sandwich, and agreement of the rolling moving-block computation
//! with brute-force two-pass recomputation on large data.

mod common;

use common::two_pass_variance;
use gsig::bounds::{moving_block_bounds, pooled_variance_mean, subsample_bounds, BlockConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn rolling_blocks_match_two_pass_on_large_data() {
    // Heteroscedastic data so the window variances span two decades; the
    // rolling pass must track brute-force recomputation everywhere.
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let n = 10_000;
    let data: Vec<f64> = (0..n)
        .map(|i| {
            let scale = if (i / 500) % 2 == 0 { 3.0 } else { 0.3 };
            let drift = (i as f64 / 700.0).sin() * 5.0;
            drift + scale * rng.sample::<f64, _>(rand_distr::StandardNormal)
        })
        .collect();

    for m in [2, 17, 503, 2500, 9_999, 10_000] {
        let est = moving_block_bounds(&data, BlockConfig::new(m)).unwrap();
        let mut direct_min = f64::INFINITY;
        let mut direct_max = f64::NEG_INFINITY;
        for window in data.windows(m) {
            let v = two_pass_variance(window);
            direct_min = direct_min.min(v);
            direct_max = direct_max.max(v);
        }
        let rel_lo = (est.sigma_lower_sq() - direct_min).abs() / direct_min.max(1e-300);
        let rel_hi = (est.sigma_upper_sq() - direct_max).abs() / direct_max.max(1e-300);
        assert!(rel_lo <= 1e-10, "m = {m}: lower off by {rel_lo:e}");
        assert!(rel_hi <= 1e-10, "m = {m}: upper off by {rel_hi:e}");
    }
}

#[test]
fn block_extremes_are_unbiased_for_separated_regimes() {
    // Two regimes of 2000 draws each at variances 1 and 0.25. With blocks
    // this long the block variances concentrate far from each other, so the
    // max/min estimators inherit unbiasedness for the regime variances.
    let reps = 2000;
    let m = 2000;
    let mut uppers = Vec::with_capacity(reps);
    let mut lowers = Vec::with_capacity(reps);
    let wide = Normal::new(0.0, 1.0).unwrap();
    let tight = Normal::new(0.0, 0.5).unwrap();
    for rep in 0..reps {
        let mut rng = ChaCha8Rng::seed_from_u64(20_000 + rep as u64);
        let mut data: Vec<f64> = (0..m).map(|_| wide.sample(&mut rng)).collect();
        data.extend((0..m).map(|_| tight.sample(&mut rng)));
        let est = subsample_bounds(&data, 2).unwrap();
        uppers.push(est.sigma_upper_sq());
        lowers.push(est.sigma_lower_sq());
    }
    let (mean_up, se_up) = mean_and_se(&uppers);
    let (mean_lo, se_lo) = mean_and_se(&lowers);
    assert!(
        (mean_up - 1.0).abs() <= 3.0 * se_up,
        "upper estimate mean {mean_up} vs 1.0 (se {se_up})"
    );
    assert!(
        (mean_lo - 0.25).abs() <= 3.0 * se_lo,
        "lower estimate mean {mean_lo} vs 0.25 (se {se_lo})"
    );
}

#[test]
fn pooled_variance_mean_matches_monte_carlo() {
    // A pooled sample with a common mean and two spreads: the average
    // sample variance over replications must land on the pooling formula.
    let (n1, n2) = (60usize, 140usize);
    let (var1, var2) = (1.0, 0.25);
    let expected = pooled_variance_mean(n1, var1, n2, var2).unwrap();
    assert!((expected - (60.0 * 1.0 + 140.0 * 0.25) / 200.0).abs() < 1e-15);

    let reps = 2000;
    let mut variances = Vec::with_capacity(reps);
    let d1 = Normal::new(2.0, var1.sqrt()).unwrap();
    let d2 = Normal::new(2.0, var2.sqrt()).unwrap();
    for rep in 0..reps {
        let mut rng = ChaCha8Rng::seed_from_u64(777_000 + rep as u64);
        let mut data: Vec<f64> = (0..n1).map(|_| d1.sample(&mut rng)).collect();
        data.extend((0..n2).map(|_| d2.sample(&mut rng)));
        variances.push(two_pass_variance(&data));
    }
    let (mean, se) = mean_and_se(&variances);
    assert!(
        (mean - expected).abs() <= 3.0 * se,
        "pooled variance mean {mean} vs formula {expected} (se {se})"
    );
}

#[test]
fn straddling_windows_average_between_regime_variances() {
    // Windows that overlap the change point mix the two variances, so their
    // average must land strictly between them.
    let reps = 400;
    let (len, m) = (1000usize, 200usize);
    let wide = Normal::new(0.0, 1.0).unwrap();
    let tight = Normal::new(0.0, 0.5).unwrap();
    // Straddle fractions: window starts putting 25%, 50%, 75% of the window
    // past the change point.
    for start in [len - m * 3 / 4, len - m / 2, len - m / 4] {
        let mut vals = Vec::with_capacity(reps);
        for rep in 0..reps {
            let mut rng = ChaCha8Rng::seed_from_u64(31_337 + rep as u64);
            let mut data: Vec<f64> = (0..len).map(|_| wide.sample(&mut rng)).collect();
            data.extend((0..len).map(|_| tight.sample(&mut rng)));
            vals.push(two_pass_variance(&data[start..start + m]));
        }
        let (mean, se) = mean_and_se(&vals);
        assert!(
            mean > 0.25 + 3.0 * se && mean < 1.0 - 3.0 * se,
            "straddling window at {start}: mean {mean} not inside (0.25, 1) (se {se})"
        );
    }
}
