use serde::{Deserialize, Serialize};

use crate::curve::{ClosedCurve, CurveJet};
use crate::error::{Error, Result};
use crate::Vec3;

/// Inversion `x ↦ P + r²(x − P)/|x − P|²` in the sphere of center `P`,
/// radius `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inversion {
    pub center: Vec3,
    pub radius: f64,
}

impl Inversion {
    pub fn new(center: Vec3, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParams(format!("inversion radius must be > 0, got {radius}")));
        }
        if !center.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidParams("inversion center must be finite".into()));
        }
        Ok(Self { center, radius })
    }

    pub fn apply(&self, x: &Vec3) -> Result<Vec3> {
        let w = x - self.center;
        let d2 = w.norm_squared();
        if d2.sqrt() <= 1e-12 * self.radius {
            return Err(Error::CenterHit);
        }
        Ok(self.center + w * (self.radius * self.radius / d2))
    }

    /// Conformal factor `|dI(x)| = r²/|x − P|²`.
    pub fn stretch(&self, x: &Vec3) -> f64 {
        self.radius * self.radius / (x - self.center).norm_squared()
    }

    /// Pushes a curve jet through the inversion by the chain rule.
    pub(crate) fn map_jet(&self, jet: &CurveJet, order: u8) -> CurveJet {
        let w = [jet.pos - self.center, jet.d1, jet.d2, jet.d3];
        // s = |w|², q = 1/s
        let s0 = w[0].dot(&w[0]);
        let s1 = 2.0 * w[0].dot(&w[1]);
        let s2 = 2.0 * (w[1].dot(&w[1]) + w[0].dot(&w[2]));
        let s3 = 2.0 * (3.0 * w[1].dot(&w[2]) + w[0].dot(&w[3]));
        let q0 = 1.0 / s0;
        let q1 = -s1 * q0 * q0;
        let q2 = 2.0 * s1 * s1 * q0 * q0 * q0 - s2 * q0 * q0;
        let q3 = -6.0 * s1 * s1 * s1 * q0.powi(4) + 6.0 * s1 * s2 * q0.powi(3) - s3 * q0 * q0;
        let r2 = self.radius * self.radius;
        let mut out = CurveJet {
            pos: self.center + w[0] * (q0 * r2),
            ..CurveJet::default()
        };
        if order >= 1 {
            out.d1 = (w[1] * q0 + w[0] * q1) * r2;
        }
        if order >= 2 {
            out.d2 = (w[2] * q0 + w[1] * (2.0 * q1) + w[0] * q2) * r2;
        }
        if order >= 3 {
            out.d3 = (w[3] * q0 + w[2] * (3.0 * q1) + w[1] * (3.0 * q2) + w[0] * q3) * r2;
        }
        out
    }
}

pub fn invert_point(inv: &Inversion, x: &Vec3) -> Result<Vec3> {
    inv.apply(x)
}

/// Image of a curve under an inversion, with derivatives obtained by
/// differentiating the composition analytically.
pub fn invert_curve(inv: &Inversion, curve: &ClosedCurve) -> Result<ClosedCurve> {
    let n = 1024;
    let dmin = curve
        .sample_positions(n)
        .iter()
        .map(|p| (p - inv.center).norm())
        .fold(f64::INFINITY, f64::min);
    if dmin <= 1e-6 * inv.radius {
        return Err(Error::CenterOnCurve { distance: dmin });
    }
    Ok(curve.inverted(*inv))
}
