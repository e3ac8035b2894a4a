//! Rejection rules and test evaluation.
//!
//! A rule compares the statistic `sqrt(n) * (mean - mu0)` against a fixed
//! threshold. The robust rules threshold at the worst-case critical values
//! from [`crate::gnormal`]; the classical rules plug the sample standard
//! deviation into the textbook normal thresholds. [`decide`] evaluates both
//! families on the same data and reports them side by side, which is what the
//! Monte Carlo harness feeds on.

use crate::error::{Error, Result};
use crate::gnormal::{self, TestKind, TestSpec, VarianceBand};

/// How a statistic is compared against a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Greater,
    Less,
    AbsGreater,
}

impl Comparison {
    fn for_kind(kind: TestKind) -> Self {
        match kind {
            TestKind::I => Comparison::Greater,
            TestKind::II => Comparison::Less,
            TestKind::III => Comparison::AbsGreater,
        }
    }
}

/// Which family a rule belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Robust,
    Classical,
}

/// A materialized rejection rule: reject when the statistic clears
/// `threshold` in the direction given by `comparison`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RejectionRule {
    method: Method,
    kind: TestKind,
    threshold: f64,
    comparison: Comparison,
}

impl RejectionRule {
    fn new(method: Method, kind: TestKind, threshold: f64) -> Self {
        Self {
            method,
            kind,
            threshold,
            comparison: Comparison::for_kind(kind),
        }
    }

    pub fn method(self) -> Method {
        self.method
    }

    pub fn kind(self) -> TestKind {
        self.kind
    }

    pub fn threshold(self) -> f64 {
        self.threshold
    }

    pub fn comparison(self) -> Comparison {
        self.comparison
    }

    /// Comparisons are strict: a statistic exactly on the threshold does not
    /// reject.
    pub fn rejects(self, statistic: f64) -> bool {
        match self.comparison {
            Comparison::Greater => statistic > self.threshold,
            Comparison::Less => statistic < self.threshold,
            Comparison::AbsGreater => statistic.abs() > self.threshold,
        }
    }
}

/// Size, mean and unbiased sample variance (divisor `n - 1`) of one dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleStats {
    n: usize,
    mean: f64,
    sample_variance: f64,
}

impl SampleStats {
    /// For callers that accumulate the moments in a streaming pass (the
    /// Monte Carlo engine) instead of materializing the data.
    pub(crate) fn from_parts(n: usize, mean: f64, sample_variance: f64) -> Self {
        Self {
            n,
            mean,
            sample_variance,
        }
    }

    pub fn n(self) -> usize {
        self.n
    }

    pub fn mean(self) -> f64 {
        self.mean
    }

    pub fn sample_variance(self) -> f64 {
        self.sample_variance
    }

    pub fn sample_std(self) -> f64 {
        self.sample_variance.sqrt()
    }
}

/// Two-pass mean and unbiased variance. Needs at least two observations.
pub fn sample_stats(data: &[f64]) -> Result<SampleStats> {
    if data.len() < 2 {
        return Err(Error::InsufficientData {
            required: 2,
            actual: data.len(),
        });
    }
    let n = data.len();
    let mean = data.iter().sum::<f64>() / n as f64;
    let sum_sq = data.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    Ok(SampleStats {
        n,
        mean,
        sample_variance: sum_sq / (n - 1) as f64,
    })
}

/// The worst-case-calibrated rule: threshold from
/// [`gnormal::critical_value`], direction from the test kind.
pub fn robust_rule(spec: TestSpec, band: VarianceBand) -> RejectionRule {
    RejectionRule::new(
        Method::Robust,
        spec.kind(),
        gnormal::critical_value(spec, band),
    )
}

/// The textbook rule with the sample standard deviation plugged in: kind `I`
/// thresholds at `s * quantile(1 - alpha)`, kind `II` at `s * quantile(alpha)`
/// and kind `III` at `s * quantile(1 - alpha / 2)`.
///
/// A zero sample variance yields a zero threshold.
pub fn classical_rule(spec: TestSpec, stats: SampleStats) -> RejectionRule {
    let quantile_arg = match spec.kind() {
        TestKind::I => 1.0 - spec.alpha(),
        TestKind::II => spec.alpha(),
        TestKind::III => 1.0 - spec.alpha() / 2.0,
    };
    // 0 < alpha < 0.5 keeps the argument inside (0, 1).
    let z = gnormal::std_normal_quantile(quantile_arg).expect("level lies in (0, 1)");
    RejectionRule::new(Method::Classical, spec.kind(), stats.sample_std() * z)
}

/// The maximal false rejection probability evaluated at the observed
/// statistic: the smallest level at which the robust test of this kind would
/// reject it.
///
/// Kind `I` applies the upper law, kind `II` the lower law, kind `III` the
/// two-sided law at `|statistic|`. This inverts the robust decision: the test
/// rejects at level `alpha` exactly when the value is below `alpha` (up to a
/// tie on the threshold itself).
pub fn robust_p_value(statistic: f64, kind: TestKind, band: VarianceBand) -> f64 {
    match kind {
        TestKind::I => gnormal::max_rejection_upper(statistic, band),
        TestKind::II => gnormal::max_rejection_lower(statistic, band),
        TestKind::III => gnormal::max_rejection_two_sided(statistic.abs(), band),
    }
}

/// Where the band used by a decision came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandUsed {
    /// Supplied by the caller.
    Given(VarianceBand),
    /// Produced by one of the [`crate::bounds`] estimators. `clamped` records
    /// that the estimated lower scale was at or below zero and was raised to
    /// a tiny positive floor to keep the band valid.
    Estimated { band: VarianceBand, clamped: bool },
}

impl BandUsed {
    pub fn band(self) -> VarianceBand {
        match self {
            BandUsed::Given(b) | BandUsed::Estimated { band: b, .. } => b,
        }
    }

    pub fn is_estimated(self) -> bool {
        matches!(self, BandUsed::Estimated { .. })
    }
}

/// The full outcome of one test evaluation.
///
/// Both decisions are always present so that method comparisons run on
/// identical data. The robust p-value is an extension of the worst-case
/// calculus, not part of the classical output; it is tied to the robust
/// decision as documented on [`robust_p_value`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestReport {
    pub spec: TestSpec,
    pub band_used: BandUsed,
    pub n: usize,
    pub statistic: f64,
    pub threshold_robust: f64,
    pub threshold_classical: f64,
    pub reject_robust: bool,
    pub reject_classical: bool,
    pub robust_p_value: f64,
}

pub(crate) fn report_from_stats(
    stats: SampleStats,
    spec: TestSpec,
    band_used: BandUsed,
) -> TestReport {
    let band = band_used.band();
    let statistic = (stats.n() as f64).sqrt() * (stats.mean() - spec.mu0());
    let robust = robust_rule(spec, band);
    let classical = classical_rule(spec, stats);
    TestReport {
        spec,
        band_used,
        n: stats.n(),
        statistic,
        threshold_robust: robust.threshold(),
        threshold_classical: classical.threshold(),
        reject_robust: robust.rejects(statistic),
        reject_classical: classical.rejects(statistic),
        robust_p_value: robust_p_value(statistic, spec.kind(), band),
    }
}

/// Evaluate both the robust and the classical test on `data`.
pub fn decide(data: &[f64], spec: TestSpec, band: VarianceBand) -> Result<TestReport> {
    let stats = sample_stats(data)?;
    Ok(report_from_stats(stats, spec, BandUsed::Given(band)))
}
