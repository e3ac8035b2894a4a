//! Robust one-sample significance tests under variance uncertainty.
//!
//! The classical z-test for a mean assumes the observation noise has one fixed
//! standard deviation. This crate targets the harder setting where the noise
//! scale is only known to lie in a band `[sigma_lower, sigma_upper]` and may
//! drift inside that band while the data are collected, possibly in response
//! to the data themselves (the p-hacking setting: whoever runs the experiment
//! tunes the noise to push the test statistic across its threshold). Under
//! such manipulation the classical test no longer holds its nominal level.
//!
//! The crate provides:
//!
//! * [`gnormal`]: worst-case tail laws of the normalized sample mean under an
//!   adaptive variance, and the enlarged critical values that restore the
//!   level guarantee.
//! * [`rules`]: rejection rules, test decisions and a robust p-value, with
//!   the classical test evaluated side by side on the same data.
//! * [`bounds`]: estimators for the band when it is not known a priori.
//! * [`adversary`]: data generators implementing the optimal manipulation
//!   strategies, used to stress both tests.
//! * [`mc`]: a deterministic, parallel Monte Carlo harness measuring realized
//!   rejection rates and power.
//! * [`oracle`]: two independent numerical checks (exact dynamic programming
//!   on a lattice, and a finite-difference solver for the nonlinear heat
//!   equation governing the worst case) that validate the closed forms.

pub mod adversary;
pub mod bounds;
mod error;
pub mod gnormal;
pub mod mc;
pub mod oracle;
pub mod rules;

pub use error::{Error, Result};
pub use gnormal::{TestKind, TestSpec, VarianceBand};
