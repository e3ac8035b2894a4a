//! Monte Carlo engine: realized rejection rates under manipulation.
//!
//! Every repetition generates one adversarial dataset, evaluates the robust
//! and the classical kind `I` test on it (paired design: same data, both
//! decisions) and counts rejections. Two named scenarios cover the designs of
//! interest: in [`Scenario::Sim1`] the adversary aims at the classical
//! threshold and demonstrates the inflation of the classical type I error; in
//! [`Scenario::Sim2`] it aims at the robust threshold and shows the robust
//! test holding its level.
//!
//! # Reproducibility contract
//!
//! Every repetition owns a private ChaCha8 stream seeded by
//! `mix(mix(mix(mix(seed) ^ n) ^ mu.to_bits()) ^ rep)` where `mix` is the
//! SplitMix64 finalizer (add the golden-ratio increment, then two
//! xor-shift-multiply rounds). Counts are merged by integer addition, so
//! results are bit-identical for any thread count, scheduling order or
//! partition of repetitions, and any two cells touching different `(n, mu)`
//! pairs are statistically independent. Changing the mixer would silently
//! change every table, so it is frozen here and documented in the README.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::adversary::{self, NoiseModel, Strategy};
use crate::error::{Error, Result};
use crate::gnormal::{self, TestKind, TestSpec, VarianceBand};
use crate::rules::{self, SampleStats};

/// The `n` grid used by the type-I-error tables.
pub const DEFAULT_N_GRID: [usize; 12] = [
    50, 100, 150, 200, 300, 400, 500, 600, 700, 800, 900, 1000,
];

/// Default repetition budget per cell.
pub const DEFAULT_REPS: u64 = 5000;

/// What threshold the adversary aims its switching policy at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdversaryTarget {
    /// The classical known-sigma threshold `sigma_upper * quantile(1 -
    /// alpha)`. The adversary must fix its aim before any data exist, so the
    /// in-sample `S_n` of the classical rule is replaced by `sigma_upper`.
    ClassicalThreshold,
    /// The robust threshold `c1`.
    RobustThreshold,
    /// An explicit threshold on the statistic scale.
    Fixed(f64),
}

/// Named experimental designs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    /// Adversary targets the classical threshold.
    Sim1,
    /// Adversary targets the robust threshold.
    Sim2,
    /// Adversary targets whatever [`AdversaryTarget`] is supplied.
    Custom(AdversaryTarget),
}

impl Scenario {
    pub fn adversary_target(self) -> AdversaryTarget {
        match self {
            Scenario::Sim1 => AdversaryTarget::ClassicalThreshold,
            Scenario::Sim2 => AdversaryTarget::RobustThreshold,
            Scenario::Custom(target) => target,
        }
    }
}

/// Full description of one simulation study.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    scenario: Scenario,
    band: VarianceBand,
    mu0: f64,
    alpha: f64,
    n_list: Vec<usize>,
    mu_list: Vec<f64>,
    reps: u64,
    seed: u64,
    noise: NoiseModel,
    strategy_override: Option<Strategy>,
}

impl SimulationConfig {
    /// Validated configuration. `n_list` must be nonempty with every entry at
    /// least 2; `mu_list` may be empty unless a power curve over `mu` is
    /// requested.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        scenario: Scenario,
        band: VarianceBand,
        mu0: f64,
        alpha: f64,
        n_list: Vec<usize>,
        mu_list: Vec<f64>,
        reps: u64,
        seed: u64,
        noise: NoiseModel,
    ) -> Result<Self> {
        // Reuse TestSpec's validation for alpha and mu0.
        TestSpec::new(TestKind::I, mu0, alpha)?;
        if reps == 0 {
            return Err(Error::InvalidConfig("reps must be at least 1".into()));
        }
        if n_list.is_empty() {
            return Err(Error::InvalidConfig("n_list must be nonempty".into()));
        }
        if let Some(&bad) = n_list.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidConfig(format!(
                "every n must be at least 2, got {bad}"
            )));
        }
        if let Scenario::Custom(AdversaryTarget::Fixed(c)) = scenario {
            if !c.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "fixed adversary threshold must be finite, got {c}"
                )));
            }
        }
        if let Some(&bad) = mu_list.iter().find(|m| !m.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "every mu must be finite, got {bad}"
            )));
        }
        Ok(Self {
            scenario,
            band,
            mu0,
            alpha,
            n_list,
            mu_list,
            reps,
            seed,
            noise,
            strategy_override: None,
        })
    }

    /// The standard type-I-error study: band (0.5, 1), `mu0 = 0`, level 5%,
    /// the default `n` grid, adversary on the given scenario's target.
    pub fn standard(scenario: Scenario, reps: u64, seed: u64) -> Result<Self> {
        Self::new(
            scenario,
            VarianceBand::new(0.5, 1.0).expect("constant band is valid"),
            0.0,
            0.05,
            DEFAULT_N_GRID.to_vec(),
            Vec::new(),
            reps,
            seed,
            NoiseModel::StandardNormal,
        )
    }

    /// Replace the kind-I optimal adversary with another generation strategy
    /// (honest baselines, or the other optimal policies). The adversary
    /// target of the scenario is then ignored.
    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy_override = Some(strategy);
        self
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn band(&self) -> VarianceBand {
        self.band
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_list(&self) -> &[usize] {
        &self.n_list
    }

    pub fn mu_list(&self) -> &[f64] {
        &self.mu_list
    }

    pub fn reps(&self) -> u64 {
        self.reps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn noise(&self) -> NoiseModel {
        self.noise
    }

    fn test_spec(&self) -> TestSpec {
        TestSpec::new(TestKind::I, self.mu0, self.alpha).expect("validated at construction")
    }

    /// The threshold the adversary's switching policy compares against.
    pub fn resolved_adversary_c(&self) -> f64 {
        match self.scenario.adversary_target() {
            AdversaryTarget::ClassicalThreshold => {
                self.band.sigma_upper()
                    * gnormal::std_normal_quantile(1.0 - self.alpha)
                        .expect("level lies in (0, 1)")
            }
            AdversaryTarget::RobustThreshold => gnormal::critical_value(self.test_spec(), self.band),
            AdversaryTarget::Fixed(c) => c,
        }
    }

    fn strategy(&self) -> Strategy {
        self.strategy_override.unwrap_or(Strategy::Optimal {
            kind: TestKind::I,
            c: self.resolved_adversary_c(),
        })
    }
}

/// Paired rejection counts for one `(n, mu)` cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellResult {
    pub n: usize,
    pub mu: f64,
    pub reps: u64,
    pub reject_robust: u64,
    pub reject_classical: u64,
}

impl CellResult {
    pub fn rate_robust(&self) -> f64 {
        self.reject_robust as f64 / self.reps as f64
    }

    pub fn rate_classical(&self) -> f64 {
        self.reject_classical as f64 / self.reps as f64
    }

    /// Binomial standard error `sqrt(rate * (1 - rate) / reps)`.
    pub fn se_robust(&self) -> f64 {
        binomial_se(self.rate_robust(), self.reps)
    }

    pub fn se_classical(&self) -> f64 {
        binomial_se(self.rate_classical(), self.reps)
    }
}

pub fn binomial_se(rate: f64, reps: u64) -> f64 {
    (rate * (1.0 - rate) / reps as f64).sqrt()
}

/// A type-I-error table: one row per `n`, all at `mu = mu0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub alpha: f64,
    /// Robust threshold `c1` shared by every row.
    pub threshold_robust: f64,
    /// Threshold the adversary aimed at.
    pub adversary_c: f64,
    pub cells: Vec<CellResult>,
}

/// One point of a power curve: the paired empirical rates plus the
/// large-sample approximation for overlay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPoint {
    pub cell: CellResult,
    pub approx: f64,
}

/// Which axis a power curve walks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerAxis {
    /// Fix `n`, sweep the configured `mu_list`.
    VaryMu { n: usize },
    /// Fix `mu`, sweep the configured `n_list`.
    VaryN { mu: f64 },
}

/// SplitMix64 finalizer; full-avalanche mixing for substream derivation.
fn mix(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Substream seed for repetition `rep` of cell `(n, mu)`. Frozen: see the
/// module documentation.
fn substream_seed(master: u64, n: usize, mu: f64, rep: u64) -> u64 {
    let mut h = mix(master);
    h = mix(h ^ n as u64);
    h = mix(h ^ mu.to_bits());
    mix(h ^ rep)
}

/// Run all repetitions of one `(n, mu)` cell.
///
/// Each repetition generates `n` observations under the configured adversary
/// (kind-I optimal at [`SimulationConfig::resolved_adversary_c`] unless
/// overridden), accumulates mean and variance in one streaming pass
/// (Welford), and evaluates both rules on the resulting statistic.
/// Repetitions run in parallel; counts merge by addition, so the result does
/// not depend on the worker count.
pub fn run_cell(n: usize, mu: f64, cfg: &SimulationConfig) -> Result<CellResult> {
    let spec = cfg.test_spec();
    let band = cfg.band();
    let robust = rules::robust_rule(spec, band);
    let strategy = cfg.strategy();
    let mu0 = cfg.mu0();
    let noise = cfg.noise();
    let master = cfg.seed();

    let (reject_robust, reject_classical) = (0..cfg.reps())
        .into_par_iter()
        .map(|rep| -> Result<(u64, u64)> {
            let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(master, n, mu, rep));
            let mut mean = 0.0;
            let mut m2 = 0.0;
            adversary::run_path(n, mu, mu0, strategy, noise, band, &mut rng, |i, _, z, _| {
                let delta = z - mean;
                mean += delta / i as f64;
                m2 += delta * (z - mean);
            })?;
            let stats = SampleStats::from_parts(n, mean, m2 / (n - 1) as f64);
            let statistic = (n as f64).sqrt() * (mean - mu0);
            let classical = rules::classical_rule(spec, stats);
            Ok((
                robust.rejects(statistic) as u64,
                classical.rejects(statistic) as u64,
            ))
        })
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;

    Ok(CellResult {
        n,
        mu,
        reps: cfg.reps(),
        reject_robust,
        reject_classical,
    })
}

/// Type-I-error table: [`run_cell`] at `mu = mu0` for every `n` in the
/// configured grid.
pub fn run_table(cfg: &SimulationConfig) -> Result<SimulationReport> {
    let cells = cfg
        .n_list()
        .iter()
        .map(|&n| run_cell(n, cfg.mu0(), cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimulationReport {
        alpha: cfg.alpha(),
        threshold_robust: gnormal::critical_value(cfg.test_spec(), cfg.band()),
        adversary_c: cfg.resolved_adversary_c(),
        cells,
    })
}

/// Empirical power along one axis, with the large-sample approximation
/// attached to every point. All alternatives must lie above `mu0`.
pub fn power_curve(cfg: &SimulationConfig, axis: PowerAxis) -> Result<Vec<PowerPoint>> {
    let spec = cfg.test_spec();
    let points: Vec<(usize, f64)> = match axis {
        PowerAxis::VaryMu { n } => cfg.mu_list().iter().map(|&mu| (n, mu)).collect(),
        PowerAxis::VaryN { mu } => cfg.n_list().iter().map(|&n| (n, mu)).collect(),
    };
    if points.is_empty() {
        return Err(Error::InvalidConfig(
            "power curve needs a nonempty grid along its axis".into(),
        ));
    }
    if let Some(&(_, bad)) = points.iter().find(|&&(_, mu)| mu <= cfg.mu0()) {
        return Err(Error::InvalidConfig(format!(
            "power curve alternatives must exceed mu0 = {}, got {bad}",
            cfg.mu0()
        )));
    }
    points
        .into_iter()
        .map(|(n, mu)| {
            let cell = run_cell(n, mu, cfg)?;
            let approx = gnormal::asymptotic_power(n as u64, mu, spec, cfg.band())?;
            Ok(PowerPoint { cell, approx })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_cfg(scenario: Scenario, n_list: Vec<usize>, reps: u64, seed: u64) -> SimulationConfig {
        SimulationConfig::new(
            scenario,
            VarianceBand::new(0.5, 1.0).unwrap(),
            0.0,
            0.05,
            n_list,
            Vec::new(),
            reps,
            seed,
            NoiseModel::StandardNormal,
        )
        .unwrap()
    }

    #[test]
    fn config_validation() {
        let band = VarianceBand::new(0.5, 1.0).unwrap();
        let bad_reps = SimulationConfig::new(
            Scenario::Sim1,
            band,
            0.0,
            0.05,
            vec![100],
            vec![],
            0,
            1,
            NoiseModel::StandardNormal,
        );
        assert!(bad_reps.is_err());

        let empty_grid = SimulationConfig::new(
            Scenario::Sim1,
            band,
            0.0,
            0.05,
            vec![],
            vec![],
            10,
            1,
            NoiseModel::StandardNormal,
        );
        assert!(empty_grid.is_err());

        let tiny_n = SimulationConfig::new(
            Scenario::Sim1,
            band,
            0.0,
            0.05,
            vec![100, 1],
            vec![],
            10,
            1,
            NoiseModel::StandardNormal,
        );
        assert!(tiny_n.is_err());

        let bad_c = SimulationConfig::new(
            Scenario::Custom(AdversaryTarget::Fixed(f64::NAN)),
            band,
            0.0,
            0.05,
            vec![100],
            vec![],
            10,
            1,
            NoiseModel::StandardNormal,
        );
        assert!(bad_c.is_err());
    }

    #[test]
    fn adversary_targets_resolve_to_the_right_thresholds() {
        let cfg = quick_cfg(Scenario::Sim1, vec![100], 10, 1);
        assert!((cfg.resolved_adversary_c() - 1.6448536269514722).abs() < 1e-9);

        let cfg = quick_cfg(Scenario::Sim2, vec![100], 10, 1);
        assert!((cfg.resolved_adversary_c() - 1.7804643416920256).abs() < 1e-9);

        let cfg = quick_cfg(Scenario::Custom(AdversaryTarget::Fixed(0.25)), vec![100], 10, 1);
        assert_eq!(cfg.resolved_adversary_c(), 0.25);
    }

    #[test]
    fn counts_do_not_depend_on_worker_count() {
        let cfg = quick_cfg(Scenario::Sim1, vec![50], 300, 42);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_cell(50, 0.0, &cfg))
            .unwrap();
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(|| run_cell(50, 0.0, &cfg))
            .unwrap();
        assert_eq!(single, many);

        // And identical reruns in the ambient pool.
        let again = run_cell(50, 0.0, &cfg).unwrap();
        assert_eq!(single, again);
    }

    #[test]
    fn distinct_cells_get_distinct_substreams() {
        let mut seen = std::collections::HashSet::new();
        for n in [50usize, 100, 1000] {
            for mu in [0.0, 0.1, -0.1] {
                for rep in 0..50u64 {
                    assert!(seen.insert(substream_seed(42, n, mu, rep)));
                }
            }
        }
    }

    #[test]
    fn single_repetition_smoke() {
        let cfg = quick_cfg(Scenario::Sim2, vec![50], 1, 7);
        let report = run_table(&cfg).unwrap();
        assert_eq!(report.cells.len(), 1);
        let cell = report.cells[0];
        assert_eq!(cell.reps, 1);
        assert!(cell.rate_robust() == 0.0 || cell.rate_robust() == 1.0);
        assert!(cell.rate_classical() == 0.0 || cell.rate_classical() == 1.0);
        assert_eq!(cell.se_robust(), 0.0);
    }

    #[test]
    fn degenerate_band_holds_level_for_both_methods() {
        let cfg = SimulationConfig::new(
            Scenario::Sim1,
            VarianceBand::degenerate(1.0).unwrap(),
            0.0,
            0.05,
            vec![400],
            vec![],
            4000,
            11,
            NoiseModel::StandardNormal,
        )
        .unwrap();
        let cell = run_cell(400, 0.0, &cfg).unwrap();
        let tol = 3.0 * binomial_se(0.05, 4000);
        assert!((cell.rate_robust() - 0.05).abs() < tol);
        assert!((cell.rate_classical() - 0.05).abs() < tol);
    }

    #[test]
    fn sim1_inflates_classical_but_not_robust() {
        let cfg = quick_cfg(Scenario::Sim1, vec![200], 3000, 5);
        let cell = run_cell(200, 0.0, &cfg).unwrap();
        assert!(cell.rate_classical() > 0.058);
        assert!(cell.rate_robust() < 0.055);
        assert!(cell.rate_robust() <= cell.rate_classical());
    }

    #[test]
    fn power_curve_shapes() {
        let band = VarianceBand::new(0.5, 1.0).unwrap();
        let cfg = SimulationConfig::new(
            Scenario::Sim2,
            band,
            0.0,
            0.05,
            vec![100],
            vec![0.3, 0.6],
            500,
            3,
            NoiseModel::StandardNormal,
        )
        .unwrap();
        let curve = power_curve(&cfg, PowerAxis::VaryMu { n: 100 }).unwrap();
        assert_eq!(curve.len(), 2);
        assert!(curve[0].cell.rate_robust() <= curve[1].cell.rate_robust() + 0.05);
        assert!(curve.iter().all(|p| (0.0..=1.0).contains(&p.approx)));

        // Separated alternative: everything rejects.
        let cfg = SimulationConfig::new(
            Scenario::Sim2,
            band,
            0.0,
            0.05,
            vec![50],
            vec![10.0],
            200,
            3,
            NoiseModel::StandardNormal,
        )
        .unwrap();
        let curve = power_curve(&cfg, PowerAxis::VaryN { mu: 10.0 }).unwrap();
        assert!(curve[0].cell.rate_robust() > 0.99);
        assert!(curve[0].cell.rate_classical() > 0.99);

        // Alternatives at or below mu0 are refused.
        let cfg = SimulationConfig::new(
            Scenario::Sim2,
            band,
            0.0,
            0.05,
            vec![50],
            vec![0.0],
            200,
            3,
            NoiseModel::StandardNormal,
        )
        .unwrap();
        assert!(power_curve(&cfg, PowerAxis::VaryMu { n: 50 }).is_err());
    }

    #[test]
    fn strategy_override_is_honored() {
        // An honest constant-scale strategy at the lower edge cannot inflate
        // anything; both rates end up at or below the nominal level region.
        let cfg = quick_cfg(Scenario::Sim1, vec![200], 2000, 9)
            .with_strategy(Strategy::Constant { sigma: 0.5 });
        let cell = run_cell(200, 0.0, &cfg).unwrap();
        // The robust threshold is calibrated for the worst case, so an
        // honest lower-edge world rejects far less often than alpha.
        assert!(cell.rate_robust() < 0.02);
        // The classical test is exact here up to finite-n noise.
        assert!((cell.rate_classical() - 0.05).abs() < 3.0 * binomial_se(0.05, 2000) + 0.01);
    }
}
