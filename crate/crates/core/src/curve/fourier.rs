use crate::spectral::real_coefficients;
use crate::Vec3;

use super::CurveJet;

/// Vector-valued trigonometric series on `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct FourierSeries {
    pub constant: Vec3,
    /// `cos[k-1]` multiplies `cos kθ`.
    pub cos: Vec<Vec3>,
    /// `sin[k-1]` multiplies `sin kθ`.
    pub sin: Vec<Vec3>,
}

impl FourierSeries {
    pub fn new(constant: Vec3, mut cos: Vec<Vec3>, mut sin: Vec<Vec3>) -> Self {
        let k = cos.len().max(sin.len());
        cos.resize(k, Vec3::zeros());
        sin.resize(k, Vec3::zeros());
        Self { constant, cos, sin }
    }

    /// Trigonometric interpolant of uniform periodic samples. Trailing modes
    /// at the round-off floor of the transform (relative size 1e-15) are
    /// dropped.
    pub fn interpolate(points: &[Vec3]) -> Self {
        let comp = |i: usize| real_coefficients(&points.iter().map(|p| p[i]).collect::<Vec<_>>());
        let (x0, xa, xb) = comp(0);
        let (y0, ya, yb) = comp(1);
        let (z0, za, zb) = comp(2);
        let cos: Vec<Vec3> = (0..xa.len()).map(|k| Vec3::new(xa[k], ya[k], za[k])).collect();
        let sin: Vec<Vec3> = (0..xb.len()).map(|k| Vec3::new(xb[k], yb[k], zb[k])).collect();
        let mut series = Self::new(Vec3::new(x0, y0, z0), cos, sin);
        series.trim(1e-15);
        series
    }

    fn trim(&mut self, rel: f64) {
        let amp = |k: usize| self.cos[k].norm() + self.sin[k].norm();
        let max = (0..self.cos.len()).map(amp).fold(0.0, f64::max);
        let cutoff = rel * max;
        let mut keep = self.cos.len();
        while keep > 0 && amp(keep - 1) <= cutoff {
            keep -= 1;
        }
        self.cos.truncate(keep);
        self.sin.truncate(keep);
    }

    pub fn max_frequency(&self) -> usize {
        self.cos.len()
    }

    pub fn eval(&self, theta: f64, order: u8) -> CurveJet {
        let mut jet = CurveJet {
            pos: self.constant,
            ..CurveJet::default()
        };
        let (s1, c1) = theta.sin_cos();
        let (mut s, mut c) = (0.0, 1.0);
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            // advance (c, s) = (cos kθ, sin kθ) by one rotation step
            let kf = (k + 1) as f64;
            if k % 64 == 63 {
                (s, c) = (kf * theta).sin_cos();
            } else {
                let cn = c * c1 - s * s1;
                s = s * c1 + c * s1;
                c = cn;
            }
            let even = a * c + b * s;
            jet.pos += even;
            if order >= 1 {
                let odd = b * c - a * s;
                jet.d1 += odd * kf;
                if order >= 2 {
                    jet.d2 -= even * (kf * kf);
                    if order >= 3 {
                        jet.d3 -= odd * (kf * kf * kf);
                    }
                }
            }
        }
        jet
    }
}
