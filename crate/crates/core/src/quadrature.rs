//! Periodic quadrature with nested-grid error estimates and deterministic
//! reductions.
//!
//! Every rule here works on the uniform grid `u_j = j·period/n`. Because
//! `n` is a power of two, the even-indexed nodes form the `n/2` grid, so a
//! single pass yields both the `n` and the `n/2` estimate; their difference
//! is the reported error.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic quadrature rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    /// Equal weights; spectrally accurate for smooth periodic integrands.
    #[default]
    Trapezoid,
    /// Composite Simpson on the periodic grid (alternating 2/3, 4/3 weights).
    Simpson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Grid resolution per periodic factor.
    pub n: usize,
    /// Maximum number of grid doublings.
    pub refinement: usize,
    /// Convergence tolerance on the nested-grid difference.
    pub tol: f64,
    pub rule: Rule,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            n: 512,
            refinement: 2,
            tol: 1e-6,
            rule: Rule::Trapezoid,
        }
    }
}

impl QuadratureConfig {
    pub fn with_n(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 32 || !self.n.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "grid resolution must be a power of two >= 32, got {}",
                self.n
            )));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// Value of an integral invariant together with its convergence estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub invariant: String,
    pub value: f64,
    pub estimated_error: f64,
    pub n_used: usize,
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::default();
    values.into_iter().for_each(|x| acc.add(x));
    acc.value()
}

/// Weight of node `j` on an `n`-point periodic grid of spacing `h`.
pub(crate) fn weight(rule: Rule, j: usize, h: f64) -> f64 {
    match rule {
        Rule::Trapezoid => h,
        Rule::Simpson => {
            if j % 2 == 1 {
                4.0 * h / 3.0
            } else {
                2.0 * h / 3.0
            }
        }
    }
}

/// Pair of sums over an `n` grid and its nested `n/2` subgrid.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Nested {
    pub fine: f64,
    pub coarse: f64,
}

impl Nested {
    pub fn error(&self) -> f64 {
        (self.fine - self.coarse).abs()
    }
}

impl std::ops::Add for Nested {
    type Output = Nested;

    fn add(self, rhs: Nested) -> Nested {
        Nested {
            fine: self.fine + rhs.fine,
            coarse: self.coarse + rhs.coarse,
        }
    }
}

/// One-dimensional periodic sum of pre-evaluated samples `f(u_j)`.
pub(crate) fn nested_sum_1d(rule: Rule, period: f64, values: &[f64]) -> Nested {
    let n = values.len();
    let h = period / n as f64;
    let fine = compensated_sum(values.iter().enumerate().map(|(j, v)| weight(rule, j, h) * v));
    let coarse = compensated_sum(
        values
            .iter()
            .step_by(2)
            .enumerate()
            .map(|(j, v)| weight(rule, j, 2.0 * h) * v),
    );
    Nested { fine, coarse }
}

/// Row-parallel double sum over an `n × n` periodic grid. `row(i, out)` must
/// fill `out[j]` with the integrand at `(u_i, u_j)` (already multiplied by
/// any inner Jacobian). Rows are reduced in index order, so the result does
/// not depend on the thread count.
pub(crate) fn nested_sum_2d<F>(rule: Rule, period_outer: f64, period_inner: f64, n: usize, row: F) -> Nested
where
    F: Fn(usize, &mut [f64]) + Sync,
{
    let h_out = period_outer / n as f64;
    let h_in = period_inner / n as f64;
    let rows: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map_init(
            || vec![0.0; n],
            |buf, i| {
                row(i, buf);
                let fine = compensated_sum(buf.iter().enumerate().map(|(j, v)| weight(rule, j, h_in) * v));
                let coarse = if i % 2 == 0 {
                    compensated_sum(
                        buf.iter()
                            .step_by(2)
                            .enumerate()
                            .map(|(j, v)| weight(rule, j, 2.0 * h_in) * v),
                    )
                } else {
                    0.0
                };
                (fine, coarse)
            },
        )
        .collect();
    let fine = compensated_sum(rows.iter().enumerate().map(|(i, r)| weight(rule, i, h_out) * r.0));
    let coarse = compensated_sum(
        rows.iter()
            .step_by(2)
            .enumerate()
            .map(|(i, r)| weight(rule, i, 2.0 * h_out) * r.1),
    );
    Nested { fine, coarse }
}

/// Runs `eval` on `n, 2n, 4n, …` until the nested error meets `q.tol` or
/// the refinement budget is spent. `scale` multiplies the raw sums.
pub(crate) fn refine<F>(name: &str, q: &QuadratureConfig, scale: f64, mut eval: F) -> Result<InvariantReport>
where
    F: FnMut(usize) -> Result<Nested>,
{
    q.validate()?;
    let mut n = q.n;
    let mut pass = 0;
    loop {
        let nested = eval(n)?;
        let value = scale * nested.fine;
        let err = (scale * nested.error()).abs();
        if err <= q.tol {
            return Ok(InvariantReport {
                invariant: name.to_string(),
                value,
                estimated_error: err,
                n_used: n,
            });
        }
        if pass == q.refinement {
            return Err(Error::ToleranceNotMet {
                what: name.to_string(),
                achieved: err,
                tol: q.tol,
            });
        }
        pass += 1;
        n *= 2;
    }
}

/// Gauss–Legendre nodes and weights on `[a, b]`.
pub(crate) fn gauss_legendre(m: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(m);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((mid - half * x, half * w));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn trapezoid_is_spectral_on_periodic_integrand() {
        let n = 64;
        let vals: Vec<f64> = (0..n)
            .map(|j| (2.0 * PI * j as f64 / n as f64).cos().exp())
            .collect();
        let s = nested_sum_1d(Rule::Trapezoid, 2.0 * PI, &vals);
        // ∫ e^{cos u} du = 2π I0(1)
        let exact = 2.0 * PI * 1.266_065_877_752_008_4;
        assert!((s.fine - exact).abs() < 1e-13);
    }

    #[test]
    fn simpson_weights_sum_to_period() {
        let vals = vec![1.0; 32];
        let s = nested_sum_1d(Rule::Simpson, 3.0, &vals);
        assert!((s.fine - 3.0).abs() < 1e-14);
        assert!((s.coarse - 3.0).abs() < 1e-14);
    }

    #[test]
    fn double_sum_is_thread_count_independent() {
        let f = |i: usize, out: &mut [f64]| {
            for (j, o) in out.iter_mut().enumerate() {
                *o = ((i * 7 + j * 13) % 17) as f64 * 1e-3 + (i as f64).sin();
            }
        };
        let a = nested_sum_2d(Rule::Trapezoid, 1.0, 1.0, 64, f);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| nested_sum_2d(Rule::Trapezoid, 1.0, 1.0, 64, f));
        assert_eq!(a.fine.to_bits(), b.fine.to_bits());
        assert_eq!(a.coarse.to_bits(), b.coarse.to_bits());
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(v), 2.0);
    }

    #[test]
    fn gauss_legendre_integrates_sine() {
        let nodes = gauss_legendre(16, 0.0, PI);
        let s: f64 = nodes.iter().map(|(x, w)| w * x.sin()).sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::with_n(48).validate().is_err());
        assert!(QuadratureConfig::with_n(16).validate().is_err());
        assert!(QuadratureConfig::with_n(64).validate().is_ok());
    }
}
