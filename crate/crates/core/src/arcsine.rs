//! The standard arcsine law on `(-sqrt 2, sqrt 2)`.
//!
//! Moments are computed both in closed form and by quadrature. The quadrature
//! substitutes `x = sqrt(2) sin(theta)`, which turns
//! `(1/pi) int x^m / sqrt(2 - x^2) dx` into the smooth integral
//! `(sqrt 2)^m / pi * int_{-pi/2}^{pi/2} sin^m(theta) d(theta)`,
//! evaluated with composite Gauss-Legendre panels.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::moments::{limit_moment, Independence};

/// Gauss-Legendre nodes per panel.
const NODES_PER_PANEL: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Panels in the first pass; doubled until successive estimates agree.
    pub panel_count: usize,
    pub tolerance: f64,
    /// Give up once the panel count would exceed this.
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            panel_count: 64,
            tolerance: 1e-10,
            max_panels: 1 << 14,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerance(tolerance: f64) -> Self {
        QuadratureSpec {
            tolerance,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::invalid(format!(
                "quadrature tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.panel_count < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 panels, got {}",
                self.panel_count
            )));
        }
        Ok(())
    }
}

pub fn arcsine_pdf(x: f64) -> Result<f64> {
    if x.is_nan() || x.abs() >= SQRT_2 {
        return Err(Error::Domain { x });
    }
    Ok(1.0 / (PI * (2.0 - x * x).sqrt()))
}

/// `0` for odd `m`, `(2k-1)!!/k!` for `m = 2k`.
pub fn arcsine_moment_closed(m: usize) -> BigRational {
    limit_moment(m, Independence::Monotone)
}

/// Nodes and weights of the n-point Gauss-Legendre rule on `[-1, 1]`,
/// found by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-like initial guess for the i-th root, descending from 1.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            deriv = dp;
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        if dp != 0.0 {
            deriv = dp;
        }
        let weight = 2.0 / ((1.0 - x * x) * deriv * deriv);
        rule.push((x, weight));
    }
    rule.reverse();
    rule
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p_prev, mut p) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
        p_prev = p;
        p = next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

fn composite(rule: &[(f64, f64)], panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let (a, b) = (-FRAC_PI_2, FRAC_PI_2);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let panel: f64 = rule
            .iter()
            .map(|&(x, w)| w * f(mid + 0.5 * h * x))
            .sum();
        total += 0.5 * h * panel;
    }
    total
}

/// `(1/pi) int_{-sqrt 2}^{sqrt 2} x^m / sqrt(2 - x^2) dx`, numerically.
pub fn arcsine_moment_quadrature(m: usize, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    let rule = gauss_legendre(NODES_PER_PANEL);
    let exponent = i32::try_from(m).map_err(|_| Error::invalid("moment order too large"))?;
    let integrand = |theta: f64| theta.sin().powi(exponent);
    let scale = SQRT_2.powi(exponent) / PI;

    let mut panels = spec.panel_count;
    let mut estimate = scale * composite(&rule, panels, integrand);
    loop {
        let doubled = panels * 2;
        if doubled > spec.max_panels {
            return Err(Error::Convergence {
                estimate,
                error_bound: f64::INFINITY,
                panels,
            });
        }
        let refined = scale * composite(&rule, doubled, integrand);
        let error_bound = (refined - estimate).abs();
        if error_bound <= spec.tolerance {
            return Ok(refined);
        }
        if doubled * 2 > spec.max_panels {
            return Err(Error::Convergence {
                estimate: refined,
                error_bound,
                panels: doubled,
            });
        }
        panels = doubled;
        estimate = refined;
    }
}
