//! Gauss-integral invariants: writhe, total torsion, twist, linking and
//! self-linking numbers, and the closure `Lk = Wr + Tw`.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{offset_curve, ClosedCurve, CurveJet, Framing};
use crate::error::{Error, Result};
use crate::frenet::frenet_at;
use crate::quadrature::{nested_sum_1d, nested_sum_2d, refine, InvariantReport, Nested, QuadratureConfig, Rule};
use crate::spectral::derivative_vec;
use crate::Vec3;

/// Rounding residual above which a linking number is rejected.
pub const LK_ROUNDING_LIMIT: f64 = 0.1;

/// Integer-valued Gauss integral with its distance to the nearest integer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkingReport {
    pub lk: i64,
    pub value: f64,
    pub residual: f64,
    pub estimated_error: f64,
    pub n_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalugareanuReport {
    pub lk: i64,
    pub wr: f64,
    pub tw: f64,
    /// `|lk − wr − tw|`.
    pub residual: f64,
}

/// `det(a', b', a − b)/|a − b|³`.
pub(crate) fn gauss_integrand(pa: &Vec3, da: &Vec3, pb: &Vec3, db: &Vec3) -> f64 {
    let d = pa - pb;
    let r2 = d.norm_squared();
    da.cross(db).dot(&d) / (r2 * r2.sqrt())
}

/// Slope `A(s)` of the writhe integrand's kink `g(s, s+h) ≈ A(s)|h|` on
/// the diagonal, `A = det(f', f'', f''')/(12|f'|³)`.
pub(crate) fn diagonal_kink(jet: &CurveJet) -> f64 {
    jet.d1.cross(&jet.d2).dot(&jet.d3) / (12.0 * jet.d1.norm().powi(3))
}

/// Euler–Maclaurin correction for the kink: each trapezoid row with the
/// diagonal set to zero underestimates the row integral by `h²A/6`.
pub(crate) fn diagonal_correction(rule: Rule, period: f64, kinks: &[f64]) -> Nested {
    if rule != Rule::Trapezoid {
        return Nested { fine: 0.0, coarse: 0.0 };
    }
    let n = kinks.len();
    let h = period / n as f64;
    let fine = crate::quadrature::compensated_sum(kinks.iter().map(|a| h * h * h * a / 6.0));
    let coarse = crate::quadrature::compensated_sum(kinks.iter().step_by(2).map(|a| 8.0 * h * h * h * a / 6.0));
    Nested { fine, coarse }
}

pub(crate) fn grid_jets(curve: &ClosedCurve, n: usize) -> Vec<CurveJet> {
    curve.grid(n).into_par_iter().map(|u| curve.jet(u)).collect()
}

/// Smallest distance between samples that are not grid neighbours.
pub(crate) fn min_nonadjacent_distance(points: &[Vec3]) -> f64 {
    let n = points.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut m = f64::INFINITY;
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                m = m.min((points[i] - points[j]).norm());
            }
            m
        })
        .reduce(|| f64::INFINITY, f64::min)
}

/// `Wr = (1/4π) ∬ det(f'(s), f'(t), f(s) − f(t))/|f(s) − f(t)|³ ds dt`.
pub fn writhe(curve: &ClosedCurve, q: &QuadratureConfig) -> Result<InvariantReport> {
    q.validate()?;
    let distance = min_nonadjacent_distance(&curve.sample_positions(q.n));
    if distance < 1e-9 * curve.length() {
        return Err(Error::NearSelfIntersection { distance });
    }
    let period = curve.period();
    refine("writhe", q, 1.0 / (4.0 * PI), |n| {
        let jets = grid_jets(curve, n);
        let main = nested_sum_2d(q.rule, period, period, n, |i, out| {
            let a = &jets[i];
            for (j, (o, b)) in out.iter_mut().zip(&jets).enumerate() {
                *o = if i == j {
                    0.0
                } else {
                    gauss_integrand(&a.pos, &a.d1, &b.pos, &b.d1)
                };
            }
        });
        let kinks: Vec<f64> = jets.iter().map(diagonal_kink).collect();
        Ok(main + diagonal_correction(q.rule, period, &kinks))
    })
}

/// `Tω = (1/2π) ∫ τ ds`.
pub fn total_torsion(curve: &ClosedCurve, q: &QuadratureConfig) -> Result<InvariantReport> {
    let period = curve.period();
    refine("total_torsion", q, 1.0 / TAU, |n| {
        let values = curve
            .grid(n)
            .into_par_iter()
            .map(|u| {
                let fr = frenet_at(curve, u)?;
                Ok(fr.tau * curve.eval(u, 1).d1.norm())
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(nested_sum_1d(q.rule, period, &values))
    })
}

/// Nested pair whose coarse value is an independent evaluation at `n/2`,
/// for integrands that are themselves resolution dependent.
pub(crate) fn independent_nested<F>(rule: Rule, period: f64, n: usize, values: F) -> Result<Nested>
where
    F: Fn(usize) -> Result<Vec<f64>>,
{
    let fine = nested_sum_1d(rule, period, &values(n)?).fine;
    let coarse = nested_sum_1d(rule, period, &values(n / 2)?).fine;
    Ok(Nested { fine, coarse })
}

/// `Tw = (1/2π) ∫ e2' · (e1 × e2) du`, with `e2'` obtained by spectral
/// differentiation of the sampled framing.
pub fn twist(curve: &ClosedCurve, framing: &Framing, q: &QuadratureConfig) -> Result<InvariantReport> {
    framing.check_curve(curve)?;
    let period = curve.period();
    refine("twist", q, 1.0 / TAU, |n| {
        independent_nested(q.rule, period, n, |m| {
            let grid = curve.grid(m);
            let e2 = grid
                .par_iter()
                .map(|&u| framing.e2_at(curve, u))
                .collect::<Result<Vec<Vec3>>>()?;
            let de2 = derivative_vec(&e2);
            let scale = TAU / period;
            Ok(grid
                .iter()
                .enumerate()
                .map(|(j, &u)| {
                    let e1 = curve.eval(u, 1).d1.normalize();
                    scale * de2[j].dot(&e1.cross(&e2[j]))
                })
                .collect())
        })
    })
}

/// Clustering map `t = t* + (P/2π)(θ − sin θ)` and its derivative; it
/// concentrates nodes around `θ = 0` while keeping the integrand periodic.
fn clustered(t_star: f64, period: f64, theta: f64) -> (f64, f64) {
    let k = period / TAU;
    (t_star + k * (theta - theta.sin()), k * (1.0 - theta.cos()))
}

/// Parameter of the point of `c` closest to `x`, with its distance.
fn closest_parameter(c: &ClosedCurve, coarse: &[(f64, Vec3)], x: &Vec3) -> (f64, f64) {
    let (mut t, _) = coarse
        .iter()
        .map(|(t, p)| (*t, (p - x).norm_squared()))
        .fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let step = c.period() / coarse.len() as f64;
    let start = t;
    for _ in 0..30 {
        let j = c.eval(t, 2);
        let w = j.pos - x;
        let g = j.d1.dot(&w);
        let dg = j.d2.dot(&w) + j.d1.norm_squared();
        if dg <= 0.0 {
            break;
        }
        let dt = (g / dg).clamp(-step, step);
        t -= dt;
        if (t - start).abs() > 2.0 * step {
            t = start;
            break;
        }
        if dt.abs() < 1e-14 * c.period() {
            break;
        }
    }
    (t, (c.position(t) - x).norm())
}

/// Two-curve Gauss integral, rounded to the nearest integer.
pub fn linking_number(c1: &ClosedCurve, c2: &ClosedCurve, q: &QuadratureConfig) -> Result<LinkingReport> {
    q.validate()?;
    // the inner curve is evaluated n times per row
    let (c1, c2) = if c2.eval_cost() > c1.eval_cost() { (c2, c1) } else { (c1, c2) };
    let scale = c1.length().max(c2.length());
    let p1 = c1.period();
    let p2 = c2.period();
    let coarse: Vec<(f64, Vec3)> = c2.grid(1024).into_iter().map(|t| (t, c2.position(t))).collect();
    let mut n = q.n;
    let mut pass = 0;
    let (value, err) = loop {
        let rows: Vec<(CurveJet, f64, f64)> = c1
            .grid(n)
            .into_par_iter()
            .map(|s| {
                let jet = c1.eval(s, 1);
                let (t, d) = closest_parameter(c2, &coarse, &jet.pos);
                (jet, t, d)
            })
            .collect();
        let distance = rows.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
        if distance < 1e-6 * scale {
            return Err(Error::CurvesIntersect { distance });
        }
        let thetas: Vec<f64> = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
        let sums = nested_sum_2d(q.rule, p1, TAU, n, |i, out| {
            let (a, t_star, _) = &rows[i];
            for (o, &theta) in out.iter_mut().zip(&thetas) {
                let (t, w) = clustered(*t_star, p2, theta);
                *o = if w == 0.0 {
                    0.0
                } else {
                    let b = c2.eval(t, 1);
                    w * gauss_integrand(&a.pos, &a.d1, &b.pos, &b.d1)
                };
            }
        });
        let value = sums.fine / (4.0 * PI);
        let err = sums.error() / (4.0 * PI);
        if err <= q.tol || pass == q.refinement {
            break (value, err);
        }
        pass += 1;
        n *= 2;
    };
    let lk = value.round();
    let residual = (value - lk).abs();
    if residual > LK_ROUNDING_LIMIT {
        return Err(Error::ToleranceNotMet {
            what: "linking number rounding".into(),
            achieved: residual,
            tol: LK_ROUNDING_LIMIT,
        });
    }
    Ok(LinkingReport {
        lk: lk as i64,
        value,
        residual,
        estimated_error: err,
        n_used: n,
    })
}

/// `Sl = Lk(K, K + ε e2)` with the principal normal `e2`.
pub fn self_linking(curve: &ClosedCurve, epsilon: f64, q: &QuadratureConfig) -> Result<LinkingReport> {
    let pushed = offset_curve(curve, &Framing::principal(curve), epsilon)?;
    linking_number(curve, &pushed, q)
}

/// Computes `Lk`, `Wr` and `Tw` independently for the ribbon
/// `K ∪ K + ε e2`.
pub fn calugareanu_report(
    curve: &ClosedCurve,
    framing: &Framing,
    epsilon: f64,
    q: &QuadratureConfig,
) -> Result<CalugareanuReport> {
    let pushed = offset_curve(curve, framing, epsilon)?;
    let lk = linking_number(curve, &pushed, q)?.lk;
    let wr = writhe(curve, q)?.value;
    let tw = twist(curve, framing, q)?.value;
    Ok(CalugareanuReport {
        lk,
        wr,
        tw,
        residual: (lk as f64 - wr - tw).abs(),
    })
}
