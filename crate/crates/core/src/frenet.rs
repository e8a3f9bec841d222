//! Frenet–Serret apparatus: frames, curvature, torsion and curvature scans.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::curve::{arclength_parameters, ClosedCurve, CurveJet};
use crate::error::{Error, Result};
use crate::Vec3;

/// Default curvature threshold relative to `1/L`.
pub const DEFAULT_KAPPA_REL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetFrame {
    pub e1: Vec3,
    pub e2: Vec3,
    pub e3: Vec3,
    pub kappa: f64,
    pub tau: f64,
}

/// Curvature `|f'×f''|/|f'|³` from a jet.
pub fn kappa_of(jet: &CurveJet) -> f64 {
    let speed = jet.d1.norm();
    jet.d1.cross(&jet.d2).norm() / (speed * speed * speed)
}

/// Absolute curvature threshold `kappa_rel / L` for a curve.
pub fn kappa_threshold(curve: &ClosedCurve, kappa_rel: f64) -> f64 {
    kappa_rel / curve.length()
}

/// Frame from a jet; `None` when the curvature is at or below `threshold`.
pub fn frame_from_jet(jet: &CurveJet, threshold: f64) -> Option<FrenetFrame> {
    let b = jet.d1.cross(&jet.d2);
    let b2 = b.norm_squared();
    let speed = jet.d1.norm();
    let kappa = b2.sqrt() / (speed * speed * speed);
    if !(kappa > threshold) {
        return None;
    }
    let e1 = jet.d1 / speed;
    let e3 = b / b2.sqrt();
    let e2 = e3.cross(&e1);
    let tau = b.dot(&jet.d3) / b2;
    Some(FrenetFrame { e1, e2, e3, kappa, tau })
}

pub fn frenet_at(curve: &ClosedCurve, u: f64) -> Result<FrenetFrame> {
    frenet_at_with(curve, u, DEFAULT_KAPPA_REL)
}

pub fn frenet_at_with(curve: &ClosedCurve, u: f64, kappa_rel: f64) -> Result<FrenetFrame> {
    let jet = curve.jet(u);
    frame_from_jet(&jet, kappa_threshold(curve, kappa_rel)).ok_or(Error::CurvatureVanishes {
        u,
        kappa: kappa_of(&jet),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub u: f64,
    pub s: f64,
    pub kappa: f64,
    /// Absent where the curvature is below threshold.
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureProfile {
    pub samples: Vec<ProfileSample>,
    pub min_kappa: f64,
    pub min_kappa_location: f64,
    pub threshold: f64,
}

impl CurvatureProfile {
    pub fn nowhere_vanishing(&self) -> bool {
        self.min_kappa > self.threshold
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,s,kappa,tau\n");
        for p in &self.samples {
            let tau = p.tau.map_or_else(|| "NaN".to_string(), |t| t.to_string());
            writeln!(out, "{},{},{},{}", p.u, p.s, p.kappa, tau).unwrap();
        }
        out
    }
}

/// Curvature and torsion at `n` points uniform in arc length.
pub fn frenet_scan(curve: &ClosedCurve, n: usize) -> Result<CurvatureProfile> {
    frenet_scan_with(curve, n, DEFAULT_KAPPA_REL)
}

pub fn frenet_scan_with(curve: &ClosedCurve, n: usize, kappa_rel: f64) -> Result<CurvatureProfile> {
    if n < 16 {
        return Err(Error::InvalidParams(format!("frenet_scan needs n >= 16, got {n}")));
    }
    let threshold = kappa_threshold(curve, kappa_rel);
    let samples: Vec<ProfileSample> = arclength_parameters(curve, n)?
        .into_iter()
        .map(|a| {
            let jet = curve.jet(a.u);
            let frame = frame_from_jet(&jet, threshold);
            ProfileSample {
                u: a.u,
                s: a.s,
                kappa: kappa_of(&jet),
                tau: frame.map(|f| f.tau),
            }
        })
        .collect();
    let (min_kappa, min_kappa_location) = samples
        .iter()
        .fold((f64::INFINITY, 0.0), |acc, p| if p.kappa < acc.0 { (p.kappa, p.u) } else { acc });
    Ok(CurvatureProfile {
        samples,
        min_kappa,
        min_kappa_location,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{make_preset, mirror_curve, resample_arclength};
    use crate::spectral::derivative_vec;
    use std::collections::BTreeMap;

    fn preset(name: &str, kv: &[(&str, f64)]) -> ClosedCurve {
        let p: BTreeMap<String, f64> = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        make_preset(name, &p).unwrap()
    }

    #[test]
    fn circle_radius_two() {
        let c = preset("circle", &[("R", 2.0)]);
        for u in [0.0, 1.0, 4.0] {
            let f = frenet_at(&c, u).unwrap();
            assert!((f.kappa - 0.5).abs() < 1e-15);
            assert!(f.tau.abs() < 1e-15);
        }
    }

    #[test]
    fn ellipse_vertex() {
        let c = preset("ellipse", &[("a", 2.0), ("b", 1.0)]);
        let f = frenet_at(&c, 0.0).unwrap();
        assert!((f.kappa - 2.0).abs() < 1e-14);
        assert!(f.tau.abs() < 1e-14);
    }

    /// Sixth-order central differences of analytic positions.
    fn fd_derivs(c: &ClosedCurve, u: f64, h: f64) -> (Vec3, Vec3, Vec3) {
        let p = |k: f64| c.position(u + k * h);
        let d1 = (p(3.0) - p(-3.0) - (p(2.0) - p(-2.0)) * 9.0 + (p(1.0) - p(-1.0)) * 45.0) / (60.0 * h);
        let d2 = ((p(3.0) + p(-3.0)) * 2.0 - (p(2.0) + p(-2.0)) * 27.0 + (p(1.0) + p(-1.0)) * 270.0 - p(0.0) * 490.0)
            / (180.0 * h * h);
        let d3 = ((p(4.0) - p(-4.0)) * 7.0 - (p(3.0) - p(-3.0)) * 72.0 + (p(2.0) - p(-2.0)) * 338.0
            - (p(1.0) - p(-1.0)) * 488.0)
            / (240.0 * h * h * h);
        (d1, d2, d3)
    }

    #[test]
    fn trefoil_matches_finite_difference_oracle() {
        let c = preset("trefoil", &[]);
        let (d1, d2, d3) = fd_derivs(&c, 0.0, 1e-3);
        let b = d1.cross(&d2);
        let kappa = b.norm() / d1.norm().powi(3);
        let tau = b.dot(&d3) / b.norm_squared();
        let f = frenet_at(&c, 0.0).unwrap();
        assert!((f.kappa - kappa).abs() < 1e-6, "{} vs {}", f.kappa, kappa);
        assert!((f.tau - tau).abs() < 1e-6, "{} vs {}", f.tau, tau);
    }

    #[test]
    fn frame_is_orthonormal_and_right_handed() {
        let c = preset("torus_knot", &[("p", 2.0), ("q", 5.0)]);
        for u in c.grid(50) {
            let f = frenet_at(&c, u).unwrap();
            for (a, b) in [(f.e1, f.e2), (f.e2, f.e3), (f.e1, f.e3)] {
                assert!(a.dot(&b).abs() < 1e-10);
            }
            for e in [f.e1, f.e2, f.e3] {
                assert!((e.norm() - 1.0).abs() < 1e-10);
            }
            assert!((f.e1.cross(&f.e2) - f.e3).norm() < 1e-10);
        }
    }

    #[test]
    fn inflection_raises() {
        let c = preset("twisted_unknot", &[("amplitude", 1.0)]);
        assert!(matches!(frenet_at(&c, 0.0), Err(Error::CurvatureVanishes { .. })));
    }

    #[test]
    fn scans() {
        let c = preset("circle", &[]);
        let p = frenet_scan(&c, 64).unwrap();
        assert!(p.samples.iter().all(|s| (s.kappa - 1.0).abs() < 1e-14));
        assert!(p.nowhere_vanishing());

        let flat = preset("twisted_unknot", &[("amplitude", 1.0)]);
        let p = frenet_scan(&flat, 64).unwrap();
        assert!(!p.nowhere_vanishing());
        assert_eq!(p.min_kappa_location, 0.0);

        let t = preset("trefoil", &[]);
        let p = frenet_scan(&t, 256).unwrap();
        let p4 = frenet_scan(&t, 1024).unwrap();
        assert!(p.nowhere_vanishing() && p4.nowhere_vanishing());
        assert!((p.min_kappa - p4.min_kappa).abs() < 1e-3 * p4.min_kappa);
        assert!(frenet_scan(&t, 8).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let p = frenet_scan(&preset("ellipse", &[]), 32).unwrap();
        let csv = p.to_csv();
        assert!(csv.starts_with("u,s,kappa,tau\n"));
        assert_eq!(csv.lines().count(), 33);
    }

    #[test]
    fn planar_presets_have_zero_torsion() {
        for name in ["circle", "ellipse", "planar_flower"] {
            let c = preset(name, &[]);
            for u in c.grid(128) {
                assert!(frenet_at(&c, u).unwrap().tau.abs() < 1e-10, "{name}");
            }
        }
    }

    #[test]
    fn mirror_flips_torsion_only() {
        let c = preset("trefoil", &[]);
        let m = mirror_curve(&c);
        for u in c.grid(64) {
            let (a, b) = (frenet_at(&c, u).unwrap(), frenet_at(&m, u).unwrap());
            assert!((a.kappa - b.kappa).abs() < 1e-10);
            assert!((a.tau + b.tau).abs() < 1e-10);
        }
    }

    #[test]
    fn frenet_equations_hold_on_arclength_samples() {
        let n = 1024;
        let c = resample_arclength(&preset("trefoil", &[]), n).unwrap();
        let speed = c.length() / c.period();
        let frames: Vec<FrenetFrame> = c.grid(n).into_iter().map(|u| frenet_at(&c, u).unwrap()).collect();
        let scale = c.period() / (2.0 * std::f64::consts::PI) / speed;
        let d = |sel: fn(&FrenetFrame) -> Vec3| {
            derivative_vec(&frames.iter().map(sel).collect::<Vec<_>>())
                .into_iter()
                .map(|v| v * scale)
                .collect::<Vec<_>>()
        };
        let (de1, de2, de3) = (d(|f| f.e1), d(|f| f.e2), d(|f| f.e3));
        for (j, f) in frames.iter().enumerate() {
            assert!((de1[j] - f.e2 * f.kappa).norm() < 1e-5);
            assert!((de2[j] + f.e1 * f.kappa - f.e3 * f.tau).norm() < 1e-5);
            assert!((de3[j] + f.e2 * f.tau).norm() < 1e-5);
        }
    }
}
