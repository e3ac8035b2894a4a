//! Reference implementations used to cross-check the library from the
//! outside: an independently coded normal CDF (Maclaurin series stitched to
//! a Laplace continued fraction), adaptive Simpson quadrature, a bisection
//! quantile, an exact binomial tail, and naive two-pass block variances.
//! Nothing here shares an algorithm with the crate under test.
#![allow(dead_code)]

use std::f64::consts::{PI, SQRT_2};

/// erf by its Maclaurin series; accurate to a few ulp for |z| <= 2.5.
fn erf_series(z: f64) -> f64 {
    let z_sq = z * z;
    let mut term = z;
    let mut sum = z;
    let mut k = 0u32;
    while term.abs() > 1e-18 * sum.abs().max(1.0) && k < 200 {
        term *= -z_sq * (2 * k + 1) as f64 / (((k + 1) * (2 * k + 3)) as f64);
        sum += term;
        k += 1;
    }
    2.0 / PI.sqrt() * sum
}

/// erfc by the Laplace continued fraction (modified Lentz); full relative
/// precision for z >= 2.5, converging in ~40 terms.
fn erfc_continued_fraction(z: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = tiny;
    let mut c = f;
    let mut d = 0.0;
    for n in 1..1000 {
        let a = if n == 1 { 1.0 } else { (n - 1) as f64 / 2.0 };
        d = z + a * d;
        if d == 0.0 {
            d = tiny;
        }
        c = z + a / c;
        if c == 0.0 {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    (-z * z).exp() / PI.sqrt() * f
}

/// Standard normal CDF, independent of the library implementation. Absolute
/// error a few 1e-15; full relative precision in the lower tail.
pub fn normal_cdf_oracle(x: f64) -> f64 {
    let z = x / SQRT_2;
    if z < -2.5 {
        0.5 * erfc_continued_fraction(-z)
    } else if z > 2.5 {
        1.0 - 0.5 * erfc_continued_fraction(z)
    } else {
        0.5 * (1.0 + erf_series(z))
    }
}

/// Standard normal quantile by bisection against the oracle CDF.
pub fn normal_quantile_oracle(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0);
    let mut lo = -42.0;
    let mut hi = 42.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf_oracle(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn normal_density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, fm, flm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, fb, frm, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson quadrature with Richardson acceptance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fb = f(b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fb, fm, whole, tol, 60)
}

/// Exact P(sigma * (sum of n fair signs) / sqrt(n) > c), by direct
/// enumeration of the binomial pmf via the multiplicative recurrence.
pub fn rademacher_tail_oracle(n: usize, sigma: f64, c: f64) -> f64 {
    let mut pmf = 0.5f64.powi(n as i32);
    let mut total = 0.0;
    let root_n = (n as f64).sqrt();
    for heads in 0..=n {
        let walk = sigma * (2 * heads as i64 - n as i64) as f64;
        if walk / root_n > c {
            total += pmf;
        }
        if heads < n {
            pmf *= (n - heads) as f64 / (heads + 1) as f64;
        }
    }
    total
}

/// Unbiased sample variance by the plain two-pass formula.
pub fn two_pass_variance(block: &[f64]) -> f64 {
    let m = block.len();
    assert!(m >= 2);
    let mean = block.iter().sum::<f64>() / m as f64;
    block.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1) as f64
}
