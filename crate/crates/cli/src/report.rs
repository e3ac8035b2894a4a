//! JSON documents mirroring the library's report types. Field names and the
//! `schema_version` are a stable contract; numbers serialize in shortest
//! round-trip form, so parsing them back recovers the exact doubles.

use gsig::bounds::{BandEstimate, BandMethod};
use gsig::mc::{CellResult, Scenario, SimulationConfig, SimulationReport};
use gsig::rules::{BandUsed, TestReport};
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct BandDoc {
    pub sigma_lower: f64,
    pub sigma_upper: f64,
    /// "given" or "estimated".
    pub source: &'static str,
    /// True when an estimated lower edge was raised from zero.
    pub clamped: bool,
    pub degenerate: bool,
}

impl From<BandUsed> for BandDoc {
    fn from(used: BandUsed) -> Self {
        let band = used.band();
        let clamped = matches!(used, BandUsed::Estimated { clamped: true, .. });
        Self {
            sigma_lower: band.sigma_lower(),
            sigma_upper: band.sigma_upper(),
            source: if used.is_estimated() {
                "estimated"
            } else {
                "given"
            },
            clamped,
            degenerate: band.is_degenerate(),
        }
    }
}

#[derive(Serialize)]
pub struct TestDoc {
    pub schema_version: u32,
    pub kind: String,
    pub mu0: f64,
    pub alpha: f64,
    pub n: usize,
    pub statistic: f64,
    pub band: BandDoc,
    pub threshold_robust: f64,
    pub threshold_classical: f64,
    pub reject_robust: bool,
    pub reject_classical: bool,
    pub robust_p_value: f64,
}

impl From<TestReport> for TestDoc {
    fn from(r: TestReport) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind: r.spec.kind().to_string(),
            mu0: r.spec.mu0(),
            alpha: r.spec.alpha(),
            n: r.n,
            statistic: r.statistic,
            band: r.band_used.into(),
            threshold_robust: r.threshold_robust,
            threshold_classical: r.threshold_classical,
            reject_robust: r.reject_robust,
            reject_classical: r.reject_classical,
            robust_p_value: r.robust_p_value,
        }
    }
}

#[derive(Serialize)]
pub struct EstimateDoc {
    pub schema_version: u32,
    pub method: &'static str,
    pub block_length: usize,
    pub blocks: usize,
    pub sigma_lower_sq: f64,
    pub sigma_upper_sq: f64,
    pub sigma_lower: f64,
    pub sigma_upper: f64,
    pub clamped: bool,
    pub degenerate: bool,
}

impl From<BandEstimate> for EstimateDoc {
    fn from(e: BandEstimate) -> Self {
        let (band, clamped) = e.to_band();
        Self {
            schema_version: SCHEMA_VERSION,
            method: match e.method() {
                BandMethod::Subsample => "subsample",
                BandMethod::MovingBlock => "moving-block",
            },
            block_length: e.block_length(),
            blocks: e.blocks(),
            sigma_lower_sq: e.sigma_lower_sq(),
            sigma_upper_sq: e.sigma_upper_sq(),
            sigma_lower: band.sigma_lower(),
            sigma_upper: band.sigma_upper(),
            clamped,
            degenerate: band.is_degenerate(),
        }
    }
}

#[derive(Serialize)]
pub struct CellDoc {
    pub n: usize,
    pub mu: f64,
    pub reps: u64,
    pub reject_robust: u64,
    pub reject_classical: u64,
    pub rate_robust: f64,
    pub rate_classical: f64,
    pub se_robust: f64,
    pub se_classical: f64,
}

impl From<&CellResult> for CellDoc {
    fn from(c: &CellResult) -> Self {
        Self {
            n: c.n,
            mu: c.mu,
            reps: c.reps,
            reject_robust: c.reject_robust,
            reject_classical: c.reject_classical,
            rate_robust: c.rate_robust(),
            rate_classical: c.rate_classical(),
            se_robust: c.se_robust(),
            se_classical: c.se_classical(),
        }
    }
}

#[derive(Serialize)]
pub struct SimulationDoc {
    pub schema_version: u32,
    pub scenario: String,
    pub alpha: f64,
    pub mu0: f64,
    pub sigma_lower: f64,
    pub sigma_upper: f64,
    pub reps: u64,
    pub seed: u64,
    pub threshold_robust: f64,
    pub adversary_c: f64,
    pub cells: Vec<CellDoc>,
}

impl SimulationDoc {
    pub fn new(cfg: &SimulationConfig, report: &SimulationReport) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            scenario: match cfg.scenario() {
                Scenario::Sim1 => "sim1".into(),
                Scenario::Sim2 => "sim2".into(),
                Scenario::Custom(_) => "custom".into(),
            },
            alpha: report.alpha,
            mu0: cfg.mu0(),
            sigma_lower: cfg.band().sigma_lower(),
            sigma_upper: cfg.band().sigma_upper(),
            reps: cfg.reps(),
            seed: cfg.seed(),
            threshold_robust: report.threshold_robust,
            adversary_c: report.adversary_c,
            cells: report.cells.iter().map(CellDoc::from).collect(),
        }
    }
}
