use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::frenet::{frenet_at, kappa_of};
use crate::Vec3;

use super::{ClosedCurve, FourierSeries};

/// Samples used to represent an offset curve `f + ε e2`.
const OFFSET_SAMPLES: usize = 2048;

#[derive(Debug, Clone)]
pub(crate) enum FramingKind {
    /// Frenet principal normal.
    Principal,
    /// Unit normal field given at `u_j = j·period/N`, interpolated
    /// trigonometrically and re-projected onto the normal plane.
    Sampled { samples: Vec<Vec3>, series: FourierSeries },
}

/// Unit normal vector field `e2` along a specific curve.
#[derive(Debug, Clone)]
pub struct Framing {
    curve_fingerprint: u64,
    kind: FramingKind,
}

impl Framing {
    pub fn principal(curve: &ClosedCurve) -> Self {
        Self {
            curve_fingerprint: curve.fingerprint(),
            kind: FramingKind::Principal,
        }
    }

    /// Explicit field; each sample must be unit length and orthogonal to
    /// `f'` within 1e-10.
    pub fn from_samples(curve: &ClosedCurve, samples: Vec<Vec3>) -> Result<Self> {
        if samples.len() < super::MIN_SAMPLES {
            return Err(Error::TooFewSamples {
                got: samples.len(),
                min: super::MIN_SAMPLES,
            });
        }
        for (u, e2) in curve.grid(samples.len()).into_iter().zip(&samples) {
            let t = curve.eval(u, 1).d1.normalize();
            if (e2.norm() - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidFraming(format!("|e2| = {} at u = {u}", e2.norm())));
            }
            if e2.dot(&t).abs() > 1e-10 {
                return Err(Error::InvalidFraming(format!("e2 not normal at u = {u}")));
            }
        }
        let series = FourierSeries::interpolate(&samples);
        Ok(Self {
            curve_fingerprint: curve.fingerprint(),
            kind: FramingKind::Sampled { samples, series },
        })
    }

    /// Principal normal rotated about the tangent by `2π·turns·u/period`,
    /// sampled at `n` points.
    pub fn rotated_principal(curve: &ClosedCurve, turns: i64, n: usize) -> Result<Self> {
        let mut samples = Vec::with_capacity(n);
        for u in curve.grid(n) {
            let fr = frenet_at(curve, u)?;
            let theta = TAU * turns as f64 * u / curve.period();
            samples.push(fr.e2 * theta.cos() + fr.e3 * theta.sin());
        }
        Self::from_samples(curve, samples)
    }

    /// The explicit samples, or `None` for the principal framing.
    pub fn samples(&self) -> Option<&[Vec3]> {
        match &self.kind {
            FramingKind::Principal => None,
            FramingKind::Sampled { samples, .. } => Some(samples),
        }
    }

    pub fn is_principal(&self) -> bool {
        matches!(self.kind, FramingKind::Principal)
    }

    pub fn check_curve(&self, curve: &ClosedCurve) -> Result<()> {
        if self.curve_fingerprint != curve.fingerprint() {
            return Err(Error::FramingMismatch);
        }
        Ok(())
    }

    /// `e2(u)`. Errors where the principal normal is undefined.
    pub fn e2_at(&self, curve: &ClosedCurve, u: f64) -> Result<Vec3> {
        match &self.kind {
            FramingKind::Principal => Ok(frenet_at(curve, u)?.e2),
            FramingKind::Sampled { series, .. } => {
                let t = curve.eval(u, 1).d1.normalize();
                let raw = series.eval(TAU * u / curve.period(), 0).pos;
                let v = raw - t * raw.dot(&t);
                Ok(v.normalize())
            }
        }
    }
}

/// Admissible offset bounds for a ribbon `f + ε e2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetBounds {
    /// `1/max κ`, the smallest osculating radius.
    pub osculating_radius: f64,
    /// Half the smallest distance between points at least `π/max κ`
    /// apart in arc length.
    pub half_self_distance: f64,
}

impl OffsetBounds {
    pub fn limit(&self) -> f64 {
        self.osculating_radius.min(self.half_self_distance)
    }
}

pub fn max_offset(curve: &ClosedCurve) -> OffsetBounds {
    let n = 512;
    let grid = curve.grid(n);
    let kmax = grid.iter().map(|&u| kappa_of(&curve.jet(u))).fold(0.0, f64::max);
    let pts: Vec<Vec3> = grid.iter().map(|&u| curve.position(u)).collect();
    let mut s = vec![0.0; n];
    for i in 1..n {
        s[i] = s[i - 1] + (pts[i] - pts[i - 1]).norm();
    }
    let total = s[n - 1] + (pts[0] - pts[n - 1]).norm();
    let min_sep = (PI / kmax).min(0.5 * total);
    let mut dmin = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            let ds = s[j] - s[i];
            if ds.min(total - ds) >= min_sep * (1.0 - 1e-9) {
                dmin = dmin.min((pts[i] - pts[j]).norm());
            }
        }
    }
    OffsetBounds {
        osculating_radius: 1.0 / kmax,
        half_self_distance: 0.5 * dmin,
    }
}

/// Ribbon edge `u ↦ f(u) + ε e2(u)`, returned as a sampled curve.
pub fn offset_curve(curve: &ClosedCurve, framing: &Framing, epsilon: f64) -> Result<ClosedCurve> {
    framing.check_curve(curve)?;
    let bounds = max_offset(curve);
    if epsilon.abs() >= bounds.osculating_radius {
        return Err(Error::OffsetTooLarge {
            epsilon,
            bound: bounds.osculating_radius,
            bound_name: "osculating radius",
        });
    }
    if epsilon.abs() >= bounds.half_self_distance {
        return Err(Error::OffsetTooLarge {
            epsilon,
            bound: bounds.half_self_distance,
            bound_name: "half self-distance",
        });
    }
    let n = match &framing.kind {
        FramingKind::Principal => OFFSET_SAMPLES,
        FramingKind::Sampled { samples, .. } => OFFSET_SAMPLES.max(samples.len()),
    };
    let points = curve
        .grid(n)
        .into_iter()
        .map(|u| Ok(curve.position(u) + framing.e2_at(curve, u)? * epsilon))
        .collect::<Result<Vec<_>>>()?;
    ClosedCurve::from_samples(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::make_preset;

    #[test]
    fn circle_offset_is_concentric() {
        let c = make_preset("circle", &Default::default()).unwrap();
        let f = Framing::principal(&c);
        let o = offset_curve(&c, &f, 0.1).unwrap();
        for u in o.grid(64) {
            assert!((o.position(u).norm() - 0.9).abs() < 1e-12);
        }
    }

    #[test]
    fn circle_offset_too_large() {
        let c = make_preset("circle", &Default::default()).unwrap();
        let f = Framing::principal(&c);
        assert!(matches!(offset_curve(&c, &f, 2.0), Err(Error::OffsetTooLarge { .. })));
    }

    #[test]
    fn trefoil_offset_distance() {
        let c = make_preset("trefoil", &Default::default()).unwrap();
        let f = Framing::principal(&c);
        let o = offset_curve(&c, &f, 0.01).unwrap();
        // sampled Hausdorff distance between K and the offset
        let a = c.sample_positions(400);
        let b = o.sample_positions(400);
        let dir = |x: &[Vec3], y: &[Vec3]| {
            x.iter()
                .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        let h = dir(&a, &b).max(dir(&b, &a));
        // nearest-sample distance overestimates by at most half a sample gap
        assert!((h - 0.01).abs() < 0.04, "h = {h}");
        for u in c.grid(97) {
            assert!(((o.position(u) - c.position(u)).norm() - 0.01).abs() < 1e-10);
        }
    }

    #[test]
    fn framing_mismatch_detected() {
        let c = make_preset("circle", &Default::default()).unwrap();
        let e = make_preset("ellipse", &Default::default()).unwrap();
        let f = Framing::principal(&c);
        assert_eq!(offset_curve(&e, &f, 0.01).unwrap_err(), Error::FramingMismatch);
    }

    #[test]
    fn non_unit_field_rejected() {
        let c = make_preset("circle", &Default::default()).unwrap();
        let bad = vec![Vec3::new(0.0, 0.0, 2.0); 32];
        assert!(matches!(Framing::from_samples(&c, bad), Err(Error::InvalidFraming(_))));
    }
}
