use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::ClosedCurve;
use crate::error::{Error, Result};
use crate::frenet::{frame_from_jet, frenet_at, kappa_of, kappa_threshold, DEFAULT_KAPPA_REL};
use crate::invariants::independent_nested;
use crate::quadrature::{refine, InvariantReport, QuadratureConfig};
use crate::spectral::derivative_vec;
use crate::Vec3;

use super::geometry::{normals_from_frame, sphere_from_frame, tangent_circle_at, Circle3, ExtendedPoint, SphereOrPlane};
use super::inversion::Inversion;
use super::tube::{tube_report, DEFAULT_DELTA_REL};

/// The positive unit normal of `Σ(x,x,x,P)` sampled along the curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalSample {
    pub u: f64,
    pub x: Vec3,
    /// Unit tangent.
    pub v: Vec3,
    pub n: Vec3,
    /// Arc-length derivative of `n` along the curve.
    pub dn_ds: Vec3,
    /// Part of `dn_ds` due to the turning of `Σ` itself: `dn_ds` minus the
    /// shape-operator term `(o/R)·v` of the sphere at `x`.
    pub rotation_ds: Vec3,
    /// Normal at `P`; absent when `Σ` is a plane.
    pub n_p: Option<Vec3>,
    pub speed: f64,
    /// Signed curvature `o/R` of `Σ`, zero for a plane.
    pub shape: f64,
}

/// Samples `n` on `m` uniform parameter values. Normals are made
/// sign-consistent along the curve before `dn/ds` is taken by spectral
/// differentiation.
pub fn normal_field(curve: &ClosedCurve, p: ExtendedPoint, m: usize) -> Result<Vec<NormalSample>> {
    if m < 8 {
        return Err(Error::InvalidParams(format!("normal field needs m >= 8, got {m}")));
    }
    let threshold = kappa_threshold(curve, DEFAULT_KAPPA_REL);
    let mut samples = curve
        .grid(m)
        .into_par_iter()
        .map(|u| {
            let jet = curve.jet(u);
            let fr = frame_from_jet(&jet, threshold).ok_or(Error::CurvatureVanishes {
                u,
                kappa: kappa_of(&jet),
            })?;
            let pair = normals_from_frame(&jet.pos, &fr, p)?;
            let shape = match sphere_from_frame(&jet.pos, &fr, p)? {
                SphereOrPlane::Sphere {
                    radius, orientation, ..
                } => f64::from(orientation) / radius,
                SphereOrPlane::Plane { .. } => 0.0,
            };
            Ok(NormalSample {
                u,
                x: jet.pos,
                v: fr.e1,
                n: pair.n_at_x,
                dn_ds: Vec3::zeros(),
                rotation_ds: Vec3::zeros(),
                n_p: pair.n_at_p,
                speed: jet.d1.norm(),
                shape,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    for j in 1..m {
        if samples[j].n.dot(&samples[j - 1].n) < 0.0 {
            let s = &mut samples[j];
            s.n = -s.n;
            s.n_p = s.n_p.map(|v| -v);
            s.shape = -s.shape;
        }
    }
    let dn = derivative_vec(&samples.iter().map(|s| s.n).collect::<Vec<_>>());
    let scale = TAU / curve.period();
    for (s, d) in samples.iter_mut().zip(dn) {
        s.dn_ds = d * (scale / s.speed);
        s.rotation_ds = s.dn_ds - s.v * s.shape;
    }
    Ok(samples)
}

fn require_admissible(curve: &ClosedCurve, p: ExtendedPoint) -> Result<()> {
    if let ExtendedPoint::Finite(p) = p {
        let delta = DEFAULT_DELTA_REL * curve.length();
        let t = tube_report(curve, &p, 1024, delta, false)?;
        if !t.admissible {
            return Err(Error::TubeViolation {
                distance: t.refined_distance,
                delta,
            });
        }
    }
    Ok(())
}

/// Total angle variation `∫ v·(n × dn/ds) ds` of the normal of
/// `Σ(x,x,x,P)`. For `P = ∞` the normal is the binormal and the value is
/// `∫ τ ds`.
pub fn angle_variation(curve: &ClosedCurve, p: ExtendedPoint, q: &QuadratureConfig) -> Result<InvariantReport> {
    require_admissible(curve, p)?;
    let period = curve.period();
    refine("angle_variation", q, 1.0, |n| {
        independent_nested(q.rule, period, n, |m| {
            Ok(normal_field(curve, p, m)?
                .iter()
                .map(|s| s.v.dot(&s.n.cross(&s.dn_ds)) * s.speed)
                .collect())
        })
    })
}

/// Samples used for the Hausdorff distance in [`sphere_pencil_residual`].
const PENCIL_SAMPLES: usize = 64;

/// Distance between `Σ(u,P) ∩ Σ(u+h,P)` and `Γ(u,u,P)`: the sampled
/// Hausdorff distance, or the one-sided distance from the intersection when
/// `Γ(u,u,P)` is a line.
pub fn sphere_pencil_residual(curve: &ClosedCurve, u: f64, h: f64, p: &Vec3) -> Result<f64> {
    let (x0, x1) = (curve.position(u), curve.position(u + h));
    let s0 = sphere_from_frame(&x0, &frenet_at(curve, u)?, (*p).into())?;
    let s1 = sphere_from_frame(&x1, &frenet_at(curve, u + h)?, (*p).into())?;
    let meet = s0.intersect(&s1)?;
    let gamma = tangent_circle_at(&x0, &curve.eval(u, 1).d1.normalize(), (*p).into())?;
    let one_sided = |a: &Circle3, b: &Circle3| {
        a.sample(PENCIL_SAMPLES)
            .map(|pts| pts.iter().map(|y| b.distance_to(y)).fold(0.0, f64::max))
    };
    let forward = one_sided(&meet, &gamma).unwrap_or(0.0);
    Ok(match one_sided(&gamma, &meet) {
        Some(back) => forward.max(back),
        None => forward,
    })
}

/// Largest pointwise residual of an identity over the curve samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointwiseReport {
    pub max_residual: f64,
    /// Samples skipped because `Σ` degenerated to a plane there.
    pub excluded: usize,
    pub samples: usize,
}

/// Pointwise check of `τ̃ ds̃/ds + v·(n × dn/ds) = 0`, where `τ̃` is the
/// torsion of the inverted curve at the image point and `ds̃/ds` the
/// conformal factor of the inversion.
pub fn rotation_identity_residual(curve: &ClosedCurve, inv: &Inversion, m: usize) -> Result<PointwiseReport> {
    let p = ExtendedPoint::Finite(inv.center);
    require_admissible(curve, p)?;
    let field = normal_field(curve, p, m)?;
    pointwise(&field, |s| {
        let image = inv.map_jet(&curve.jet(s.u), 3);
        let fr = frame_from_jet(&image, 0.0).ok_or(Error::CurvatureVanishes {
            u: s.u,
            kappa: kappa_of(&image),
        })?;
        Ok(s.n_p.map(|_| (fr.tau * inv.stretch(&s.x) + s.v.dot(&s.n.cross(&s.dn_ds))).abs()))
    })
}

/// Pointwise check that the binormal of the inverted curve at `x̃` equals
/// `−n_P(x)`.
pub fn binormal_relation_residual(curve: &ClosedCurve, inv: &Inversion, m: usize) -> Result<PointwiseReport> {
    let p = ExtendedPoint::Finite(inv.center);
    require_admissible(curve, p)?;
    let field = normal_field(curve, p, m)?;
    pointwise(&field, |s| {
        let image = inv.map_jet(&curve.jet(s.u), 2);
        let fr = frame_from_jet(&image, 0.0).ok_or(Error::CurvatureVanishes {
            u: s.u,
            kappa: kappa_of(&image),
        })?;
        Ok(s.n_p.map(|np| (fr.e3 + np).norm()))
    })
}

fn pointwise<F>(field: &[NormalSample], residual: F) -> Result<PointwiseReport>
where
    F: Fn(&NormalSample) -> Result<Option<f64>> + Sync + Send,
{
    let r = field.par_iter().map(residual).collect::<Result<Vec<_>>>()?;
    Ok(PointwiseReport {
        max_residual: r.iter().flatten().fold(0.0, |a, &b| a.max(b)),
        excluded: r.iter().filter(|x| x.is_none()).count(),
        samples: r.len(),
    })
}
