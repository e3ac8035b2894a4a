//! Independent numerical checks of the closed-form worst-case laws.
//!
//! Two entirely different routes to the same quantities:
//!
//! * Exact dynamic programming under two-point (Rademacher) noise. With
//!   `eps_i = ±1` every partial sum lives on the integer lattice `p *
//!   sigma_upper + q * sigma_lower`, so the supremum over *all* adaptive
//!   variance policies at a finite horizon is computable exactly by backward
//!   induction, with no sampling and no asymptotics. As the horizon grows it
//!   converges to the closed-form law, and the gap between the supremum and
//!   the threshold policy quantifies how much the simple policy gives up at
//!   finite `n`.
//! * An explicit finite-difference solve of the nonlinear heat equation
//!   `u_t = (sigma_upper^2 * pos(u_xx) - sigma_lower^2 * neg(u_xx)) / 2`,
//!   whose solution at `(t, x) = (1, 0)` with step data at `c` is exactly the
//!   worst-case upper law. The solver never touches the closed form except
//!   for its initial and boundary data, which are taken at an interior start
//!   time `t0 > 0` where the profile is smooth.

use crate::adversary::{optimal_sigma, PathState};
use crate::error::{Error, Result};
use crate::gnormal::{self, TestKind, VarianceBand};

/// Largest horizon the dynamic program accepts; the layer sweep is cubic in
/// the horizon, and 200 already resolves the asymptotic limit to a few 1e-3.
pub const DP_MAX_HORIZON: usize = 200;

/// Exact lattice coordinates of a partial sum under two-point noise: `p` net
/// steps at the upper edge, `q` net steps at the lower edge. The sum is
/// reconstructed as `p * sigma_upper + q * sigma_lower` only when it is
/// compared against a threshold, so states never collide through floating
/// point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeState {
    pub p: i64,
    pub q: i64,
}

impl LatticeState {
    pub fn xi(self, band: VarianceBand) -> f64 {
        self.p as f64 * band.sigma_upper() + self.q as f64 * band.sigma_lower()
    }
}

fn check_dp_inputs(n: usize, c: f64) -> Result<()> {
    if n == 0 || n > DP_MAX_HORIZON {
        return Err(Error::HorizonTooLarge {
            n,
            max: DP_MAX_HORIZON,
        });
    }
    if !c.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "threshold must be finite, got {c}"
        )));
    }
    Ok(())
}

fn terminal_indicator(kind: TestKind, scaled: f64, c: f64) -> f64 {
    let reject = match kind {
        TestKind::I => scaled > c,
        TestKind::II => scaled < c,
        TestKind::III => scaled.abs() > c,
    };
    if reject {
        1.0
    } else {
        0.0
    }
}

/// Shared backward induction. `policy = None` maximizes over the scale at
/// every state (the exact supremum); `policy = Some(kind)` forces the
/// threshold policy of that kind and scores its kind's rejection event.
fn dp_value(n: usize, c: f64, band: VarianceBand, policy: Option<TestKind>) -> Result<f64> {
    check_dp_inputs(n, c)?;
    let up = band.sigma_upper();
    let event_kind = policy.unwrap_or(TestKind::I);
    let root_n = (n as f64).sqrt();
    let half = n as i64;
    let width = 2 * n + 1;
    let idx = move |p: i64, q: i64| ((p + half) as usize) * width + (q + half) as usize;

    // Layer n: the rejection indicator on every reachable state.
    let mut upper_layer = vec![0.0f64; width * width];
    for p in -half..=half {
        let q_reach = half - p.abs();
        for q in -q_reach..=q_reach {
            let xi = LatticeState { p, q }.xi(band);
            upper_layer[idx(p, q)] = terminal_indicator(event_kind, xi / root_n, c);
        }
    }

    // Layers n-1 down to 0: states after i observations, choosing the scale
    // of observation i + 1.
    let mut lower_layer = vec![0.0f64; width * width];
    for i in (0..n).rev() {
        let reach = i as i64;
        for p in -reach..=reach {
            let q_reach = reach - p.abs();
            for q in -q_reach..=q_reach {
                let value_up = 0.5 * (upper_layer[idx(p + 1, q)] + upper_layer[idx(p - 1, q)]);
                let value_lo = 0.5 * (upper_layer[idx(p, q + 1)] + upper_layer[idx(p, q - 1)]);
                lower_layer[idx(p, q)] = match policy {
                    None => value_up.max(value_lo),
                    Some(kind) => {
                        let state = PathState {
                            i: i + 1,
                            xi: LatticeState { p, q }.xi(band),
                        };
                        if optimal_sigma(kind, state, n, c, band) == up {
                            value_up
                        } else {
                            value_lo
                        }
                    }
                };
            }
        }
        std::mem::swap(&mut upper_layer, &mut lower_layer);
    }
    Ok(upper_layer[idx(0, 0)])
}

/// Exact supremum, over all adaptive scale policies, of the probability that
/// `xi_n / sqrt(n)` exceeds `c` under two-point noise.
///
/// This is the finite-horizon quantity whose limit is the closed-form upper
/// law; no strategy of any kind (threshold or not) can beat it, which is what
/// makes it an oracle for both the law and the policies.
pub fn dp_max_rejection(n: usize, c: f64, band: VarianceBand) -> Result<f64> {
    dp_value(n, c, band, None)
}

/// Exact rejection probability of the threshold policy of the given kind
/// under two-point noise, scored against that kind's rejection event.
///
/// Never exceeds [`dp_max_rejection`] for kind `I`, and matches it exactly
/// on a degenerate band where there is nothing to choose.
pub fn dp_policy_value(n: usize, c: f64, band: VarianceBand, kind: TestKind) -> Result<f64> {
    dp_value(n, c, band, Some(kind))
}

/// Discretization of the nonlinear heat equation solve.
///
/// The march starts at `t0 > 0` (where the self-similar profile is smooth)
/// and ends at time 1. Stability of the explicit scheme additionally
/// requires `dt <= dx^2 / sigma_upper^2`, which depends on the band and is
/// therefore enforced by [`g_heat_solve`] rather than here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeGrid {
    half_width: f64,
    dx: f64,
    dt: f64,
    t0: f64,
}

impl PdeGrid {
    pub fn new(half_width: f64, dx: f64, dt: f64, t0: f64) -> Result<Self> {
        let ok = half_width > 0.0
            && half_width.is_finite()
            && dx > 0.0
            && dx < half_width
            && dt > 0.0
            && dt.is_finite()
            && t0 > 0.0
            && t0 < 1.0;
        if !ok {
            return Err(Error::InvalidGrid(format!(
                "need 0 < dx < half_width, dt > 0 and 0 < t0 < 1; \
                 got half_width={half_width}, dx={dx}, dt={dt}, t0={t0}"
            )));
        }
        Ok(Self {
            half_width,
            dx,
            dt,
            t0,
        })
    }

    /// Grid that meets the solver's preconditions for this `(c, band)`:
    /// `dx = 0.01`, `dt` at half the stability bound, `t0 = 0.01`, domain
    /// reaching eight upper-scale standard deviations past the threshold.
    pub fn auto(c: f64, band: VarianceBand) -> Self {
        let dx = 0.01;
        let up = band.sigma_upper();
        Self {
            half_width: c.max(0.0) + 8.0 * up,
            dx,
            dt: 0.5 * dx * dx / (up * up),
            t0: 0.01,
        }
    }

    /// One refinement level: half the space step, a quarter of the time step
    /// (preserving the stability margin).
    pub fn refined(self) -> Self {
        Self {
            half_width: self.half_width,
            dx: self.dx / 2.0,
            dt: self.dt / 4.0,
            t0: self.t0,
        }
    }

    pub fn half_width(self) -> f64 {
        self.half_width
    }

    pub fn dx(self) -> f64 {
        self.dx
    }

    pub fn dt(self) -> f64 {
        self.dt
    }

    pub fn t0(self) -> f64 {
        self.t0
    }
}

/// Solve the nonlinear heat equation forward from `t0` to 1 and return
/// `u(1, 0)`, the worst-case probability of ending above `c`.
///
/// Explicit scheme: at every node the discrete second difference picks the
/// diffusion coefficient (`sigma_upper^2` when it is `>= 0`, `sigma_lower^2`
/// otherwise; at exactly zero the choice is irrelevant since the flux
/// vanishes). Dirichlet boundaries follow the exact profile, and the domain
/// must reach at least `c + 8 * sigma_upper` so the boundary error is
/// negligible against the 1e-3 accuracy target.
pub fn g_heat_solve(c: f64, band: VarianceBand, grid: PdeGrid) -> Result<f64> {
    if !c.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "threshold must be finite, got {c}"
        )));
    }
    let up_sq = band.sigma_upper() * band.sigma_upper();
    let lo_sq = band.sigma_lower() * band.sigma_lower();
    let stability_bound = grid.dx * grid.dx / up_sq;
    if grid.dt > stability_bound {
        return Err(Error::UnstableGrid {
            dt: grid.dt,
            bound: stability_bound,
        });
    }
    let required = c + 8.0 * band.sigma_upper();
    if grid.half_width < required {
        return Err(Error::InvalidGrid(format!(
            "half_width {} too small: the domain must reach c + 8 * sigma_upper = {required}",
            grid.half_width
        )));
    }

    let m = (grid.half_width / grid.dx).ceil() as usize;
    let nodes = 2 * m + 1;
    let x_at = |j: usize| (j as f64 - m as f64) * grid.dx;
    let profile_at =
        |t: f64, x: f64| gnormal::self_similar_profile((x - c) / t.sqrt(), band);

    let mut u: Vec<f64> = (0..nodes).map(|j| profile_at(grid.t0, x_at(j))).collect();
    let mut u_next = vec![0.0f64; nodes];
    let inv_dx_sq = 1.0 / (grid.dx * grid.dx);

    let mut t = grid.t0;
    while t < 1.0 - 1e-12 {
        let step = grid.dt.min(1.0 - t);
        let t_next = t + step;
        for j in 1..nodes - 1 {
            let second = (u[j + 1] - 2.0 * u[j] + u[j - 1]) * inv_dx_sq;
            let coef = if second >= 0.0 { up_sq } else { lo_sq };
            u_next[j] = u[j] + 0.5 * step * coef * second;
        }
        u_next[0] = profile_at(t_next, x_at(0));
        u_next[nodes - 1] = profile_at(t_next, x_at(nodes - 1));
        std::mem::swap(&mut u, &mut u_next);
        t = t_next;
    }
    Ok(u[m])
}
