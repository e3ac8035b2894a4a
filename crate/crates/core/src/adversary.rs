//! Data generation with an adaptively chosen noise scale.
//!
//! Observations follow `Z_i = sigma_i * eps_i + mu` where `eps_i` is i.i.d.
//! mean-zero unit-variance noise and `sigma_i` may be picked inside the band
//! before `eps_i` is revealed, using everything observed so far. The optimal
//! policies switch between the band edges on a threshold of the running
//! centered sum `xi_{i-1} = sum(Z_l - mu0, l < i)`; they asymptotically attain
//! the worst-case rejection probabilities in [`crate::gnormal`]. Honest
//! baselines (constant scale, independent coin flips between the edges,
//! deterministic alternation) share the same generator so simulations compare
//! like against like.
//!
//! Predictability is the load-bearing invariant: `sigma_i` never depends on
//! `eps_i` or anything later. [`strategy_trace`] discloses every step so the
//! property can be audited by replay.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::gnormal::{TestKind, VarianceBand};

/// Distribution of the unit noise `eps_i`.
///
/// Standard normal is the default; Rademacher (a fair ±1 coin) exists so the
/// generator can be checked against the exact lattice oracle in
/// [`crate::oracle`], where a two-point noise keeps the state space finite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseModel {
    StandardNormal,
    Rademacher,
}

/// How the scale is chosen at each step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    /// The worst-case policy against the rejection region of the given kind
    /// with threshold `c` (on the scale of the statistic, i.e. compared
    /// against `xi_{i-1} / sqrt(n)`).
    Optimal { kind: TestKind, c: f64 },
    /// Honest baseline: a fixed scale inside the band.
    Constant { sigma: f64 },
    /// Honest baseline: each step independently uses the upper edge with
    /// probability `p_upper`, the lower edge otherwise.
    IidRandom { p_upper: f64 },
    /// Honest baseline: upper edge on odd steps, lower on even steps.
    Alternating,
}

/// Position of the generator before step `i`: `xi` is the running centered
/// sum over the first `i - 1` observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathState {
    /// 1-based index of the observation about to be generated.
    pub i: usize,
    /// `sum(Z_l - mu0)` over `l = 1 .. i-1`; zero at `i = 1`.
    pub xi: f64,
}

/// One disclosed generation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    /// Scale chosen before the noise was drawn.
    pub sigma: f64,
    /// Emitted observation.
    pub z: f64,
    /// Running centered sum after this step.
    pub xi: f64,
}

/// The scale the optimal policy picks at `state`, for a test of `kind` with
/// threshold `c` and horizon `n`.
///
/// The first step is a free choice (the asymptotics do not depend on it); it
/// is pinned to the upper edge for reproducibility. From step two on the
/// policy compares `xi_{i-1} / sqrt(n)` against `c`:
///
/// * kind `I`: upper edge while the sum is at or below `c` (push upward
///   until the region is reached, then freeze with the small scale),
/// * kind `II`: the mirror image (upper edge at or above `c`),
/// * kind `III`: upper edge while `|xi_{i-1}| / sqrt(n)` is at or below `c`.
///
/// Ties take the upper edge in all three cases.
pub fn optimal_sigma(
    kind: TestKind,
    state: PathState,
    n: usize,
    c: f64,
    band: VarianceBand,
) -> f64 {
    if state.i <= 1 {
        return band.sigma_upper();
    }
    let scaled = state.xi / (n as f64).sqrt();
    let pick_upper = match kind {
        TestKind::I => scaled <= c,
        TestKind::II => scaled >= c,
        TestKind::III => scaled.abs() <= c,
    };
    if pick_upper {
        band.sigma_upper()
    } else {
        band.sigma_lower()
    }
}

fn validate_strategy(strategy: Strategy, band: VarianceBand) -> Result<()> {
    match strategy {
        Strategy::Optimal { c, .. } => {
            if !c.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "optimal-strategy threshold must be finite, got {c}"
                )));
            }
        }
        Strategy::Constant { sigma } => {
            if !(sigma >= band.sigma_lower() && sigma <= band.sigma_upper()) {
                return Err(Error::SigmaOutsideBand {
                    sigma,
                    lower: band.sigma_lower(),
                    upper: band.sigma_upper(),
                });
            }
        }
        Strategy::IidRandom { p_upper } => {
            if !(0.0..=1.0).contains(&p_upper) {
                return Err(Error::InvalidConfig(format!(
                    "p_upper must lie in [0, 1], got {p_upper}"
                )));
            }
        }
        Strategy::Alternating => {}
    }
    Ok(())
}

fn choose_sigma<R: Rng + ?Sized>(
    strategy: Strategy,
    state: PathState,
    n: usize,
    band: VarianceBand,
    rng: &mut R,
) -> f64 {
    match strategy {
        Strategy::Optimal { kind, c } => optimal_sigma(kind, state, n, c, band),
        Strategy::Constant { sigma } => sigma,
        Strategy::IidRandom { p_upper } => {
            if rng.gen_bool(p_upper) {
                band.sigma_upper()
            } else {
                band.sigma_lower()
            }
        }
        Strategy::Alternating => {
            if state.i % 2 == 1 {
                band.sigma_upper()
            } else {
                band.sigma_lower()
            }
        }
    }
}

fn draw_noise<R: Rng + ?Sized>(noise: NoiseModel, rng: &mut R) -> f64 {
    match noise {
        NoiseModel::StandardNormal => rng.sample(StandardNormal),
        NoiseModel::Rademacher => {
            if rng.gen::<bool>() {
                1.0
            } else {
                -1.0
            }
        }
    }
}

/// Drives one path, invoking `on_step(i, sigma_i, z_i, xi_i)` per
/// observation. Any per-step randomness (an `IidRandom` coin, then the noise)
/// is drawn from `rng` in that fixed order, so paths are reproducible from
/// the seed alone.
#[allow(clippy::too_many_arguments)]
pub(crate) fn run_path<R, F>(
    n: usize,
    mu: f64,
    mu0: f64,
    strategy: Strategy,
    noise: NoiseModel,
    band: VarianceBand,
    rng: &mut R,
    mut on_step: F,
) -> Result<()>
where
    R: Rng + ?Sized,
    F: FnMut(usize, f64, f64, f64),
{
    validate_strategy(strategy, band)?;
    let mut xi = 0.0;
    for i in 1..=n {
        let sigma = choose_sigma(strategy, PathState { i, xi }, n, band, rng);
        let eps = draw_noise(noise, rng);
        let z = sigma * eps + mu;
        xi += z - mu0;
        on_step(i, sigma, z, xi);
    }
    Ok(())
}

/// Generate `n` observations `Z_i = sigma_i * eps_i + mu`, with `sigma_i`
/// chosen by `strategy` (which centers its running sum at `mu0`).
///
/// Deterministic given the seed of `rng` and all parameters.
pub fn generate_sequence<R: Rng + ?Sized>(
    n: usize,
    mu: f64,
    mu0: f64,
    strategy: Strategy,
    noise: NoiseModel,
    band: VarianceBand,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(n);
    run_path(n, mu, mu0, strategy, noise, band, rng, |_, _, z, _| {
        out.push(z)
    })?;
    Ok(out)
}

/// Like [`generate_sequence`] under the null (`mu = mu0`), but disclosing
/// every step: the chosen scale, the observation and the running sum.
///
/// The scale sequence is reproducible from the emitted observations alone,
/// which is how tests audit that no policy peeks at its own noise.
pub fn strategy_trace<R: Rng + ?Sized>(
    n: usize,
    mu0: f64,
    strategy: Strategy,
    noise: NoiseModel,
    band: VarianceBand,
    rng: &mut R,
) -> Result<Vec<TraceStep>> {
    let mut out = Vec::with_capacity(n);
    run_path(n, mu0, mu0, strategy, noise, band, rng, |_, sigma, z, xi| {
        out.push(TraceStep { sigma, z, xi })
    })?;
    Ok(out)
}
