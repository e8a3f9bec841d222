//! Chord and tangent directions on the unit sphere: the two-point Gauss
//! map, tangent indicatrices, and the signed areas of the chord surface and
//! the swept semicircle surface.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{arclength_parameters, ClosedCurve, CurveJet};
use crate::error::{Error, Result};
use crate::frenet::{frame_from_jet, frenet_at, kappa_of, kappa_threshold, DEFAULT_KAPPA_REL};
use crate::invariants::{diagonal_correction, diagonal_kink, grid_jets, min_nonadjacent_distance};
use crate::quadrature::{gauss_legendre, nested_sum_1d, nested_sum_2d, refine, InvariantReport, QuadratureConfig};
use crate::Vec3;

/// A point of the unit sphere with the parameters it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalSample {
    pub point: Vec3,
    pub s: f64,
    pub t: f64,
}

/// `φ(s, t) = (f(s) − f(t))/|f(s) − f(t)|`.
pub fn gauss_map(curve: &ClosedCurve, s: f64, t: f64) -> Result<SphericalSample> {
    let d = curve.position(s) - curve.position(t);
    let scale = curve.length();
    if d.norm() <= 1e-12 * scale {
        return Err(Error::DiagonalPoint);
    }
    Ok(SphericalSample {
        point: d.normalize(),
        s,
        t,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" | "pos" => Ok(Sign::Plus),
            "-" | "minus" | "neg" => Ok(Sign::Minus),
            other => Err(Error::InvalidParams(format!("sign must be + or -, got `{other}`"))),
        }
    }
}

/// Closed spherical polyline `±v(s)`, sampled at uniform arc length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatrixCurve {
    pub sign: Sign,
    /// Arc length of the source curve at each sample.
    pub s: Vec<f64>,
    pub points: Vec<Vec3>,
}

impl IndicatrixCurve {
    /// Smallest great-circle distance between consecutive samples,
    /// including the closing pair.
    pub fn min_spacing(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|j| {
                let (a, b) = (self.points[j], self.points[(j + 1) % n]);
                a.cross(&b).norm().atan2(a.dot(&b))
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,x,y,z\n");
        for (s, p) in self.s.iter().zip(&self.points) {
            writeln!(out, "{},{},{},{}", s, p.x, p.y, p.z).unwrap();
        }
        out
    }
}

/// `C₊` or `C₋`: `n` samples of `±v(s)` in the direction of increasing `s`.
pub fn tangent_indicatrix(curve: &ClosedCurve, sign: Sign, n: usize) -> Result<IndicatrixCurve> {
    let params = arclength_parameters(curve, n)?;
    let points = params
        .iter()
        .map(|a| curve.eval(a.u, 1).d1.normalize() * sign.value())
        .collect();
    Ok(IndicatrixCurve {
        sign,
        s: params.iter().map(|a| a.s).collect(),
        points,
    })
}

/// `φ·(φ_t × φ_s)` at `(s, t)` from the partial derivatives
/// `φ_s = Π f'(s)/d`, `φ_t = −Π f'(t)/d`, with `Π` the projection
/// orthogonal to `φ`.
fn chord_area_density(a: &CurveJet, b: &CurveJet) -> f64 {
    let chord = a.pos - b.pos;
    let d = chord.norm();
    let phi = chord / d;
    let project = |x: Vec3| x - phi * phi.dot(&x);
    let phi_s = project(a.d1) / d;
    let phi_t = -project(b.d1) / d;
    phi.dot(&phi_t.cross(&phi_s))
}

/// Signed area of `φ(D)`, `D = {s < t < s + L}`, which equals `4π·Wr`.
pub fn writhe_surface_area(curve: &ClosedCurve, q: &QuadratureConfig) -> Result<InvariantReport> {
    q.validate()?;
    let distance = min_nonadjacent_distance(&curve.sample_positions(q.n));
    if distance < 1e-9 * curve.length() {
        return Err(Error::NearSelfIntersection { distance });
    }
    let period = curve.period();
    refine("writhe_surface_area", q, 1.0, |n| {
        let jets = grid_jets(curve, n);
        // row i holds t = s_i + k·h for k = 0..n, the k = 0 column being the diagonal
        let main = nested_sum_2d(q.rule, period, period, n, |i, out| {
            let a = &jets[i];
            out[0] = 0.0;
            for (k, o) in out.iter_mut().enumerate().skip(1) {
                *o = chord_area_density(a, &jets[(i + k) % n]);
            }
        });
        let kinks: Vec<f64> = jets.iter().map(diagonal_kink).collect();
        Ok(main + diagonal_correction(q.rule, period, &kinks))
    })
}

/// `w(s, t) = cos t·v(s) + sin t·e2(s)`.
pub fn swept_point(curve: &ClosedCurve, s: f64, t: f64) -> Result<Vec3> {
    let fr = frenet_at(curve, s)?;
    Ok(fr.e1 * t.cos() + fr.e2 * t.sin())
}

/// Gauss–Legendre nodes used across the semicircle `t ∈ [0, π]`.
const SWEEP_NODES: usize = 16;

/// Signed area of `S' = {w(s, t) : 0 ≤ t ≤ π}`, integrating the Frenet
/// reduction `−τ sin t` of `w·(w_s × w_t)`. Equals `−4π·Tω`.
pub fn swept_area(curve: &ClosedCurve, q: &QuadratureConfig) -> Result<InvariantReport> {
    let nodes = gauss_legendre(SWEEP_NODES, 0.0, PI);
    let period = curve.period();
    refine("swept_area", q, 1.0, |n| {
        let values = curve
            .grid(n)
            .into_par_iter()
            .map(|u| {
                let fr = frenet_at(curve, u)?;
                let inner: f64 = nodes.iter().map(|(t, w)| w * (-fr.tau * t.sin())).sum();
                Ok(inner * curve.eval(u, 1).d1.norm())
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(nested_sum_1d(q.rule, period, &values))
    })
}

/// The raw determinant `w·(w_s × w_t)` per unit arc length and the reduced
/// form `−τ sin t`, at `(u, t)`. The raw path differentiates the frame
/// vectors from the curve jet instead of using the Frenet equations.
pub fn swept_density_pair(curve: &ClosedCurve, u: f64, t: f64) -> Result<(f64, f64)> {
    let jet = curve.jet(u);
    let fr = frame_from_jet(&jet, kappa_threshold(curve, DEFAULT_KAPPA_REL)).ok_or(Error::CurvatureVanishes {
        u,
        kappa: kappa_of(&jet),
    })?;
    let speed = jet.d1.norm();
    let b = jet.d1.cross(&jet.d2);
    let db = jet.d1.cross(&jet.d3);
    let de1 = (jet.d2 - fr.e1 * fr.e1.dot(&jet.d2)) / speed;
    let de3 = (db - fr.e3 * fr.e3.dot(&db)) / b.norm();
    let de2 = de3.cross(&fr.e1) + fr.e3.cross(&de1);
    let (st, ct) = t.sin_cos();
    let w = fr.e1 * ct + fr.e2 * st;
    let w_s = (de1 * ct + de2 * st) / speed;
    let w_t = -fr.e1 * st + fr.e2 * ct;
    Ok((w.dot(&w_s.cross(&w_t)), -fr.tau * st))
}

/// Largest `|raw − reduced|` of [`swept_density_pair`] over an `m × m` grid
/// of `[0, period) × [0, π]`.
pub fn swept_density_residual(curve: &ClosedCurve, m: usize) -> Result<f64> {
    let ts: Vec<f64> = (0..m).map(|k| PI * k as f64 / (m - 1).max(1) as f64).collect();
    let r = curve
        .grid(m)
        .into_par_iter()
        .map(|u| {
            ts.iter().try_fold(0.0f64, |acc, &t| {
                let (raw, reduced) = swept_density_pair(curve, u, t)?;
                Ok(acc.max((raw - reduced).abs()))
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(r.into_iter().fold(0.0, f64::max))
}

/// Limit of `(Area(S) − Area(S'))/4π` to the nearest integer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleAreaReport {
    pub k: i64,
    pub residual: f64,
    pub area_s: InvariantReport,
    pub area_s_prime: InvariantReport,
}

/// Largest accepted distance of the cycle area quotient from an integer.
pub const CYCLE_ROUNDING_LIMIT: f64 = 0.1;

/// `S ∪ (−S')` is a closed cycle, so its area is `4πk`.
pub fn cycle_area_check(curve: &ClosedCurve, q: &QuadratureConfig) -> Result<CycleAreaReport> {
    let area_s = writhe_surface_area(curve, q)?;
    let area_s_prime = swept_area(curve, q)?;
    let x = (area_s.value - area_s_prime.value) / (2.0 * TAU);
    let residual = (x - x.round()).abs();
    if residual > CYCLE_ROUNDING_LIMIT {
        return Err(Error::ToleranceNotMet {
            what: "cycle area".into(),
            achieved: residual,
            tol: CYCLE_ROUNDING_LIMIT,
        });
    }
    Ok(CycleAreaReport {
        k: x.round() as i64,
        residual,
        area_s,
        area_s_prime,
    })
}
