use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::spectral::real_coefficients;

use super::ClosedCurve;

/// Parameter value `u` at arc length `s` from `u = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcLengthSample {
    pub u: f64,
    pub s: f64,
}

/// Spectral representation of the cumulative arc length
/// `S(u) = a0·u + Σ (a_k sin kωu − b_k (cos kωu − 1))/(kω)`.
struct ArcLengthMap {
    omega: f64,
    a0: f64,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl ArcLengthMap {
    fn new(curve: &ClosedCurve, n: usize) -> Self {
        let mut m = (8 * n).max(2048).next_power_of_two();
        loop {
            let speeds: Vec<f64> = curve.grid(m).into_iter().map(|u| curve.eval(u, 1).d1.norm()).collect();
            let (a0, mut a, mut b) = real_coefficients(&speeds);
            let tail_start = a.len() - a.len() / 8;
            let tail = (tail_start..a.len()).map(|k| a[k].abs() + b[k].abs()).fold(0.0, f64::max);
            if tail <= 1e-14 * a0 || m >= 1 << 17 {
                let keep = (0..a.len()).rev().find(|&k| a[k].abs() + b[k].abs() > 1e-17 * a0).map_or(0, |k| k + 1);
                a.truncate(keep);
                b.truncate(keep);
                return Self {
                    omega: TAU / curve.period(),
                    a0,
                    a,
                    b,
                };
            }
            m *= 2;
        }
    }

    fn length(&self, period: f64) -> f64 {
        self.a0 * period
    }

    fn value_and_speed(&self, u: f64) -> (f64, f64) {
        let mut s = self.a0 * u;
        let mut v = self.a0;
        for (k, (ak, bk)) in self.a.iter().zip(&self.b).enumerate() {
            let kw = (k + 1) as f64 * self.omega;
            let (sn, cs) = (kw * u).sin_cos();
            s += (ak * sn - bk * (cs - 1.0)) / kw;
            v += ak * cs + bk * sn;
        }
        (s, v)
    }
}

/// Parameters of `n` points uniformly spaced in arc length, starting at
/// `u = 0`.
pub fn arclength_parameters(curve: &ClosedCurve, n: usize) -> Result<Vec<ArcLengthSample>> {
    if n == 0 {
        return Err(Error::InvalidParams("sample count must be positive".into()));
    }
    let map = ArcLengthMap::new(curve, n);
    let period = curve.period();
    let length = map.length(period);
    let mut out = Vec::with_capacity(n);
    let mut u = 0.0;
    for k in 0..n {
        let target = length * k as f64 / n as f64;
        let mut converged = false;
        for _ in 0..60 {
            let (s, v) = map.value_and_speed(u);
            let du = (s - target) / v;
            u = (u - du).clamp(0.0, period);
            if du.abs() <= 1e-15 * period {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::ToleranceNotMet {
                what: "inverse arc-length solve".into(),
                achieved: (map.value_and_speed(u).0 - target).abs(),
                tol: 1e-15 * length,
            });
        }
        out.push(ArcLengthSample { u, s: target });
    }
    Ok(out)
}

/// Sampled curve with `n` points uniform in arc length.
pub fn resample_arclength(curve: &ClosedCurve, n: usize) -> Result<ClosedCurve> {
    let params = arclength_parameters(curve, n)?;
    ClosedCurve::from_samples(params.iter().map(|p| curve.position(p.u)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::make_preset;
    use std::collections::BTreeMap;
    use std::f64::consts::PI;

    fn speed_spread(c: &ClosedCurve, n: usize) -> f64 {
        let speeds: Vec<f64> = c.grid(n).into_iter().map(|u| c.eval(u, 1).d1.norm()).collect();
        let lo = speeds.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = speeds.iter().copied().fold(0.0, f64::max);
        (hi - lo) / hi
    }

    #[test]
    fn circle_length_preserved() {
        let c = make_preset("circle", &BTreeMap::new()).unwrap();
        let r = resample_arclength(&c, 128).unwrap();
        assert!((r.length() - 2.0 * PI).abs() < 1e-8 * 2.0 * PI);
    }

    #[test]
    fn trefoil_speed_is_uniform() {
        let c = make_preset("trefoil", &BTreeMap::new()).unwrap();
        let r = resample_arclength(&c, 512).unwrap();
        assert!(speed_spread(&r, 512) < 1e-6);
        assert!((r.length() - c.length()).abs() < 1e-8 * c.length());
        let rr = resample_arclength(&r, 512).unwrap();
        assert!((rr.length() - r.length()).abs() < 1e-8 * r.length());
    }

    #[test]
    fn parameters_are_monotone() {
        let c = make_preset("ellipse", &BTreeMap::new()).unwrap();
        let p = arclength_parameters(&c, 64).unwrap();
        assert_eq!(p[0].u, 0.0);
        assert!(p.windows(2).all(|w| w[1].u > w[0].u));
    }
}
