//! Estimating the variance band from data.
//!
//! When the band is not known a priori it has to come from the sample, under
//! the working assumption that the noise scale switches between two unknown
//! values and each regime lasts at least a block length. Block-wise variances
//! then bracket the two scales: their maximum is (asymptotically) the largest
//! unbiased estimate of the upper variance and their minimum the smallest
//! unbiased estimate of the lower one. Both the disjoint-block and the
//! overlapping moving-block versions are provided, plus the pooled-variance
//! identity that explains why the full-sample variance lands strictly between
//! the two regimes.

use crate::error::{Error, Result};
use crate::gnormal::{TestSpec, VarianceBand};
use crate::rules::{self, BandUsed, TestReport};

/// Floor applied to an estimated lower scale before it enters a
/// [`VarianceBand`]; zero-variance estimates are legal but a band requires a
/// positive lower edge.
const SIGMA_FLOOR: f64 = 1e-12;

/// Block length for the moving-block estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockConfig {
    block_length: usize,
}

impl BlockConfig {
    pub fn new(block_length: usize) -> Self {
        Self { block_length }
    }

    /// Default block length `ceil(sqrt(n))`, the usual compromise between
    /// regime resolution and per-block variance noise.
    pub fn auto(n: usize) -> Self {
        Self {
            block_length: ((n as f64).sqrt().ceil() as usize).max(2),
        }
    }

    pub fn block_length(self) -> usize {
        self.block_length
    }
}

/// Which estimator produced a [`BandEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandMethod {
    Subsample,
    MovingBlock,
}

/// Estimated variance band, in variance (not standard deviation) units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandEstimate {
    sigma_lower_sq: f64,
    sigma_upper_sq: f64,
    method: BandMethod,
    blocks: usize,
    block_length: usize,
}

impl BandEstimate {
    pub fn sigma_lower_sq(self) -> f64 {
        self.sigma_lower_sq
    }

    pub fn sigma_upper_sq(self) -> f64 {
        self.sigma_upper_sq
    }

    pub fn method(self) -> BandMethod {
        self.method
    }

    /// Number of blocks inspected: `k` disjoint blocks for
    /// [`BandMethod::Subsample`], `n - m + 1` windows for
    /// [`BandMethod::MovingBlock`].
    pub fn blocks(self) -> usize {
        self.blocks
    }

    pub fn block_length(self) -> usize {
        self.block_length
    }

    /// Convert to standard-deviation units, flooring the lower edge at a
    /// tiny positive value. The flag reports whether the floor was applied.
    pub fn to_band(self) -> (VarianceBand, bool) {
        let lower = self.sigma_lower_sq.sqrt();
        let upper = self.sigma_upper_sq.sqrt();
        let clamped = lower < SIGMA_FLOOR;
        let lower = lower.max(SIGMA_FLOOR);
        let upper = upper.max(lower);
        let band = VarianceBand::new(lower, upper)
            .expect("floored estimates always form a valid band");
        (band, clamped)
    }
}

/// Expected value of the pooled sample variance when `n1` observations have
/// variance `var1` and `n2` have variance `var2`:
/// `(n1 * var1 + n2 * var2) / (n1 + n2)`.
///
/// Always lies between the two inputs, which is why a single full-sample
/// variance under a regime switch estimates neither scale.
pub fn pooled_variance_mean(n1: usize, var1: f64, n2: usize, var2: f64) -> Result<f64> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidConfig(format!(
            "pool sizes must be positive, got {n1} and {n2}"
        )));
    }
    let bad = |v: f64| !v.is_finite() || v < 0.0;
    if bad(var1) || bad(var2) {
        return Err(Error::InvalidConfig(format!(
            "variances must be finite and nonnegative, got {var1} and {var2}"
        )));
    }
    Ok((n1 as f64 * var1 + n2 as f64 * var2) / (n1 + n2) as f64)
}

fn unbiased_variance(block: &[f64]) -> f64 {
    let m = block.len();
    let mean = block.iter().sum::<f64>() / m as f64;
    let sum_sq = block.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    sum_sq / (m - 1) as f64
}

/// Split `data` into `k` consecutive equal blocks and return the extremes of
/// the `k` unbiased block variances.
///
/// Requires `k >= 1`, a length divisible by `k` and blocks of at least two
/// observations.
pub fn subsample_bounds(data: &[f64], k: usize) -> Result<BandEstimate> {
    let n = data.len();
    if k == 0 || !n.is_multiple_of(k) {
        return Err(Error::InvalidSubsampleCount { k, n });
    }
    let m = n / k;
    if m < 2 {
        return Err(Error::InsufficientData {
            required: 2 * k,
            actual: n,
        });
    }
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for block in data.chunks_exact(m) {
        let v = unbiased_variance(block);
        lower = lower.min(v);
        upper = upper.max(v);
    }
    Ok(BandEstimate {
        sigma_lower_sq: lower,
        sigma_upper_sq: upper,
        method: BandMethod::Subsample,
        blocks: k,
        block_length: m,
    })
}

/// Error-free sum: `a + b` as a rounded head plus the exact rounding error.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let a_part = s - b;
    let b_part = s - a_part;
    (s, (a - a_part) + (b - b_part))
}

/// Error-free product by Dekker splitting; exact for inputs far from
/// overflow, with no reliance on a fused multiply-add.
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    fn split(x: f64) -> (f64, f64) {
        let t = 134_217_729.0 * x; // 2^27 + 1
        let hi = t - (t - x);
        (hi, x - hi)
    }
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

/// Unevaluated sum `hi + lo` carrying roughly twice working precision.
///
/// The rolling window statistics cancel catastrophically on nearly constant
/// windows (`sum_sq` and `sum^2 / m` agree to many digits), so a single
/// rounding of either operand would destroy the relative accuracy of small
/// window variances. Keeping both sums as double-doubles and assembling the
/// variance in the same arithmetic leaves only the final rounding.
#[derive(Debug, Clone, Copy, Default)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn renorm(hi: f64, lo: f64) -> Self {
        let (h, l) = two_sum(hi, lo);
        Self { hi: h, lo: l }
    }

    fn from_product(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        Self { hi, lo }
    }

    fn add_f64(self, x: f64) -> Self {
        let (s, e) = two_sum(self.hi, x);
        Self::renorm(s, self.lo + e)
    }

    fn add(self, other: Self) -> Self {
        let (s, e) = two_sum(self.hi, other.hi);
        Self::renorm(s, e + self.lo + other.lo)
    }

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn sqr(self) -> Self {
        let (p, e) = two_prod(self.hi, self.hi);
        Self::renorm(p, e + 2.0 * self.hi * self.lo)
    }

    fn div_by(self, d: f64) -> Self {
        let q1 = self.hi / d;
        let (p, e) = two_prod(q1, d);
        let remainder = self.add(Self { hi: -p, lo: -e });
        Self::renorm(q1, (remainder.hi + remainder.lo) / d)
    }

    fn sum_of(values: impl Iterator<Item = f64>) -> Self {
        values.fold(Self::default(), Self::add_f64)
    }

    fn sum_of_squares(values: impl Iterator<Item = f64>) -> Self {
        values.fold(Self::default(), |acc, v| acc.add(Self::from_product(v, v)))
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Unbiased variances of every overlapping window of length `m`, reduced to
/// their (min, max), in O(n) time.
///
/// The window sums of `x` and `x^2` roll: each slide subtracts the leaving
/// element and adds the entering one. Both sums are held in double-double
/// precision (their per-element contributions are error-free products, so
/// entering and leaving values cancel exactly), keeping rounding drift many
/// orders below the 1e-10 relative agreement the tests demand against
/// per-window recomputation, even for windows of near-zero variance. Data
/// are pre-centered by the global mean, which leaves every window variance
/// unchanged but shrinks the magnitudes being cancelled.
pub fn moving_block_bounds(data: &[f64], cfg: BlockConfig) -> Result<BandEstimate> {
    let n = data.len();
    let m = cfg.block_length();
    if m < 2 || m > n {
        return Err(Error::InvalidBlockLength {
            block_length: m,
            n,
        });
    }
    let global_mean = data.iter().sum::<f64>() / n as f64;
    let y: Vec<f64> = data.iter().map(|x| x - global_mean).collect();

    let variance_of = |sum: DoubleDouble, sum_sq: DoubleDouble| -> f64 {
        let mean_square = sum.sqr().div_by(m as f64);
        (sum_sq.add(mean_square.neg()).value() / (m - 1) as f64).max(0.0)
    };

    let mut s = DoubleDouble::sum_of(y[..m].iter().copied());
    let mut q = DoubleDouble::sum_of_squares(y[..m].iter().copied());
    let mut lower = variance_of(s, q);
    let mut upper = lower;

    for start in 1..=(n - m) {
        let leaving = y[start - 1];
        let entering = y[start + m - 1];
        s = s.add_f64(-leaving).add_f64(entering);
        q = q
            .add(DoubleDouble::from_product(leaving, leaving).neg())
            .add(DoubleDouble::from_product(entering, entering));
        let v = variance_of(s, q);
        lower = lower.min(v);
        upper = upper.max(v);
    }

    Ok(BandEstimate {
        sigma_lower_sq: lower,
        sigma_upper_sq: upper,
        method: BandMethod::MovingBlock,
        blocks: n - m + 1,
        block_length: m,
    })
}

/// Estimate the band with [`moving_block_bounds`], then run both tests with
/// the estimated band; the report marks the band as estimated (and whether
/// the lower edge had to be floored).
pub fn estimate_then_test(data: &[f64], cfg: BlockConfig, spec: TestSpec) -> Result<TestReport> {
    let estimate = moving_block_bounds(data, cfg)?;
    let (band, clamped) = estimate.to_band();
    let stats = rules::sample_stats(data)?;
    Ok(rules::report_from_stats(
        stats,
        spec,
        BandUsed::Estimated { band, clamped },
    ))
}
