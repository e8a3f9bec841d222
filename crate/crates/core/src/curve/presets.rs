use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::Vec3;

use super::CurveJet;

/// Analytic test curves with closed-form derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    /// Circle of radius `radius` in the xy-plane.
    Circle { radius: f64 },
    /// `(a cos u, b sin u, 0)`.
    Ellipse { a: f64, b: f64 },
    /// `((R + r cos qu) cos pu, (R + r cos qu) sin pu, r sin qu)`.
    TorusKnot { p: u32, q: u32, major: f64, minor: f64 },
    /// Polar rose-like planar curve `ρ(u) = R + amplitude·cos(petals·u)`.
    PlanarFlower { petals: u32, radius: f64, amplitude: f64 },
    /// `(cos u − (A/4) cos 2u, sin u, h sin 2u)`. At `A = 1` the second
    /// derivative vanishes at `u = 0`, so the curvature has a zero there.
    TwistedUnknot { amplitude: f64, height: f64 },
}

pub const PRESET_NAMES: &[&str] = &[
    "circle",
    "ellipse",
    "torus_knot",
    "trefoil",
    "planar_flower",
    "twisted_unknot",
];

fn take(params: &mut BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    params.remove(key).unwrap_or(default)
}

fn as_count(name: &str, v: f64) -> Result<u32> {
    if v.fract() != 0.0 || v < 1.0 || v > u32::MAX as f64 {
        return Err(Error::InvalidParams(format!("{name} must be a positive integer, got {v}")));
    }
    Ok(v as u32)
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Preset {
    /// Builds a preset from its identifier and a parameter map. Missing
    /// parameters take their documented defaults; unknown keys are rejected.
    pub fn from_params(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let mut p = params.clone();
        if let Some((k, v)) = p.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("parameter {k} is not finite ({v})")));
        }
        let preset = match name {
            "circle" => Preset::Circle {
                radius: take(&mut p, "R", 1.0),
            },
            "ellipse" => Preset::Ellipse {
                a: take(&mut p, "a", 2.0),
                b: take(&mut p, "b", 1.0),
            },
            "torus_knot" | "trefoil" => Preset::TorusKnot {
                p: as_count("p", take(&mut p, "p", 2.0))?,
                q: as_count("q", take(&mut p, "q", 3.0))?,
                major: take(&mut p, "R", 2.0),
                minor: take(&mut p, "r", 0.5),
            },
            "planar_flower" => Preset::PlanarFlower {
                petals: as_count("petals", take(&mut p, "petals", 5.0))?,
                radius: take(&mut p, "R", 1.0),
                amplitude: take(&mut p, "amplitude", 0.03),
            },
            "twisted_unknot" => Preset::TwistedUnknot {
                amplitude: take(&mut p, "amplitude", 0.5),
                height: take(&mut p, "height", 0.5),
            },
            other => return Err(Error::UnknownPreset(other.to_string())),
        };
        if let Some(k) = p.keys().next() {
            return Err(Error::InvalidParams(format!("unknown parameter `{k}` for preset {name}")));
        }
        preset.validate()?;
        Ok(preset)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        match *self {
            Preset::Circle { radius } if radius <= 0.0 => bad(format!("circle radius must be > 0, got {radius}")),
            Preset::Ellipse { a, b } if a <= 0.0 || b <= 0.0 => bad(format!("ellipse axes must be > 0, got a={a}, b={b}")),
            Preset::TorusKnot { p, q, major, minor } => {
                if gcd(p, q) != 1 {
                    bad(format!("gcd(p, q) must be 1 for a knot, got p={p}, q={q}"))
                } else if !(minor > 0.0 && minor < major) {
                    bad(format!("torus knot needs 0 < r < R, got R={major}, r={minor}"))
                } else {
                    Ok(())
                }
            }
            Preset::PlanarFlower { radius, amplitude, .. } => {
                if radius <= 0.0 || amplitude < 0.0 || amplitude >= radius {
                    bad(format!("planar flower needs 0 <= amplitude < R, got R={radius}, amplitude={amplitude}"))
                } else {
                    Ok(())
                }
            }
            Preset::TwistedUnknot { height, .. } if height == 0.0 => bad("twisted unknot height must be nonzero".into()),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Circle { .. } => "circle",
            Preset::Ellipse { .. } => "ellipse",
            Preset::TorusKnot { .. } => "torus_knot",
            Preset::PlanarFlower { .. } => "planar_flower",
            Preset::TwistedUnknot { .. } => "twisted_unknot",
        }
    }

    /// Parameter map in the same keys `from_params` accepts.
    pub fn params(&self) -> BTreeMap<String, f64> {
        let kv: Vec<(&str, f64)> = match *self {
            Preset::Circle { radius } => vec![("R", radius)],
            Preset::Ellipse { a, b } => vec![("a", a), ("b", b)],
            Preset::TorusKnot { p, q, major, minor } => {
                vec![("p", p as f64), ("q", q as f64), ("R", major), ("r", minor)]
            }
            Preset::PlanarFlower { petals, radius, amplitude } => {
                vec![("petals", petals as f64), ("R", radius), ("amplitude", amplitude)]
            }
            Preset::TwistedUnknot { amplitude, height } => vec![("amplitude", amplitude), ("height", height)],
        };
        kv.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    pub fn period(&self) -> f64 {
        TAU
    }

    pub(crate) fn eval(&self, u: f64) -> CurveJet {
        match *self {
            Preset::Circle { radius } => {
                let (s, c) = u.sin_cos();
                let r = radius;
                CurveJet {
                    pos: Vec3::new(r * c, r * s, 0.0),
                    d1: Vec3::new(-r * s, r * c, 0.0),
                    d2: Vec3::new(-r * c, -r * s, 0.0),
                    d3: Vec3::new(r * s, -r * c, 0.0),
                }
            }
            Preset::Ellipse { a, b } => {
                let (s, c) = u.sin_cos();
                CurveJet {
                    pos: Vec3::new(a * c, b * s, 0.0),
                    d1: Vec3::new(-a * s, b * c, 0.0),
                    d2: Vec3::new(-a * c, -b * s, 0.0),
                    d3: Vec3::new(a * s, -b * c, 0.0),
                }
            }
            Preset::TorusKnot { p, q, major, minor } => {
                let (p, q) = (p as f64, q as f64);
                let (sq, cq) = (q * u).sin_cos();
                let rho = [
                    major + minor * cq,
                    -minor * q * sq,
                    -minor * q * q * cq,
                    minor * q * q * q * sq,
                ];
                let mut jet = modulated_rotation(rho, p, u);
                jet.pos.z = minor * sq;
                jet.d1.z = minor * q * cq;
                jet.d2.z = -minor * q * q * sq;
                jet.d3.z = -minor * q * q * q * cq;
                jet
            }
            Preset::PlanarFlower { petals, radius, amplitude } => {
                let m = petals as f64;
                let (sm, cm) = (m * u).sin_cos();
                let rho = [
                    radius + amplitude * cm,
                    -amplitude * m * sm,
                    -amplitude * m * m * cm,
                    amplitude * m * m * m * sm,
                ];
                modulated_rotation(rho, 1.0, u)
            }
            Preset::TwistedUnknot { amplitude, height } => {
                let (s, c) = u.sin_cos();
                let (s2, c2) = (2.0 * u).sin_cos();
                let a = amplitude;
                let h = height;
                CurveJet {
                    pos: Vec3::new(c - 0.25 * a * c2, s, h * s2),
                    d1: Vec3::new(-s + 0.5 * a * s2, c, 2.0 * h * c2),
                    d2: Vec3::new(-c + a * c2, -s, -4.0 * h * s2),
                    d3: Vec3::new(s - 2.0 * a * s2, -c, -8.0 * h * c2),
                }
            }
        }
    }
}

/// Jet of `ρ(u)·(cos pu, sin pu, 0)` given the jet of `ρ`.
fn modulated_rotation(rho: [f64; 4], p: f64, u: f64) -> CurveJet {
    let (s, c) = (p * u).sin_cos();
    // derivatives of (cos pu, sin pu)
    let w = [
        Vec3::new(c, s, 0.0),
        Vec3::new(-s, c, 0.0) * p,
        Vec3::new(-c, -s, 0.0) * (p * p),
        Vec3::new(s, -c, 0.0) * (p * p * p),
    ];
    CurveJet {
        pos: w[0] * rho[0],
        d1: w[1] * rho[0] + w[0] * rho[1],
        d2: w[2] * rho[0] + w[1] * (2.0 * rho[1]) + w[0] * rho[2],
        d3: w[3] * rho[0] + w[2] * (3.0 * rho[1]) + w[1] * (3.0 * rho[2]) + w[0] * rho[3],
    }
}
