//! Closed parametric space curves.
//!
//! A [`ClosedCurve`] is an immutable, cheaply clonable handle around one of
//! several representations: analytic presets, trigonometric series (which
//! also back uniformly sampled curves), and derived curves (inversion
//! images, mirror images, similarity transforms). All of them evaluate
//! position and derivatives up to order three.

mod arclength;
mod fourier;
mod framing;
mod presets;
mod spec;

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use nalgebra::Rotation3;

use crate::conformal::Inversion;
use crate::error::{Error, Result};
use crate::quadrature::compensated_sum;
use crate::Vec3;

pub use arclength::{arclength_parameters, resample_arclength, ArcLengthSample};
pub use framing::{max_offset, offset_curve, Framing, OffsetBounds};
pub use presets::{Preset, PRESET_NAMES};
pub use spec::{load_curve, CurveSpec};

pub(crate) use fourier::FourierSeries;

/// Position and first three derivatives at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurveJet {
    pub pos: Vec3,
    pub d1: Vec3,
    pub d2: Vec3,
    pub d3: Vec3,
}

pub const MIN_SAMPLES: usize = 16;

#[derive(Debug)]
enum Kind {
    Preset(Preset),
    Fourier {
        series: FourierSeries,
        samples: Option<Vec<Vec3>>,
    },
    Inverted {
        inversion: Inversion,
        base: ClosedCurve,
    },
    Mirrored(ClosedCurve),
    Similarity {
        base: ClosedCurve,
        rotation: Rotation3<f64>,
        scale: f64,
        translation: Vec3,
    },
}

#[derive(Debug)]
struct Inner {
    kind: Kind,
    period: f64,
    length: OnceLock<f64>,
}

#[derive(Debug, Clone)]
pub struct ClosedCurve {
    inner: Arc<Inner>,
}

impl ClosedCurve {
    fn wrap(kind: Kind, period: f64) -> Self {
        Self {
            inner: Arc::new(Inner {
                kind,
                period,
                length: OnceLock::new(),
            }),
        }
    }

    pub fn from_preset(preset: Preset) -> Result<Self> {
        preset.validate()?;
        Ok(Self::wrap(Kind::Preset(preset), preset.period()))
    }

    /// Curve through uniformly spaced periodic samples (last point not
    /// repeated), parametrized on `[0, 2π)` by the trigonometric interpolant.
    pub fn from_samples(points: Vec<Vec3>) -> Result<Self> {
        if points.len() < MIN_SAMPLES {
            return Err(Error::TooFewSamples {
                got: points.len(),
                min: MIN_SAMPLES,
            });
        }
        if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::ParseError("sample coordinates must be finite".into()));
        }
        check_simple(&points)?;
        let series = FourierSeries::interpolate(&points);
        let curve = Self::wrap(
            Kind::Fourier {
                series,
                samples: Some(points),
            },
            TAU,
        );
        curve.check_regular()?;
        Ok(curve)
    }

    /// Curve `c0 + Σ_k cos_k cos(ku) + sin_k sin(ku)` on `[0, 2π)`; the
    /// slices are indexed from frequency one.
    pub fn from_fourier(constant: Vec3, cos: Vec<Vec3>, sin: Vec<Vec3>) -> Result<Self> {
        let all_finite = std::iter::once(&constant)
            .chain(&cos)
            .chain(&sin)
            .all(|v| v.iter().all(|c| c.is_finite()));
        if !all_finite {
            return Err(Error::ParseError("Fourier coefficients must be finite".into()));
        }
        let curve = Self::wrap(
            Kind::Fourier {
                series: FourierSeries::new(constant, cos, sin),
                samples: None,
            },
            TAU,
        );
        curve.check_regular()?;
        Ok(curve)
    }

    pub(crate) fn inverted(&self, inversion: Inversion) -> Self {
        Self::wrap(
            Kind::Inverted {
                inversion,
                base: self.clone(),
            },
            self.period(),
        )
    }

    /// Reflection through the plane `z = 0`, same parametrization.
    pub fn mirror(&self) -> Self {
        Self::wrap(Kind::Mirrored(self.clone()), self.period())
    }

    /// `x ↦ scale·R·x + translation`.
    pub fn similarity(&self, rotation: Rotation3<f64>, scale: f64, translation: Vec3) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParams(format!("scale must be > 0, got {scale}")));
        }
        Ok(Self::wrap(
            Kind::Similarity {
                base: self.clone(),
                rotation,
                scale,
                translation,
            },
            self.period(),
        ))
    }

    pub fn period(&self) -> f64 {
        self.inner.period
    }

    /// Rough relative cost of one evaluation, in Fourier modes.
    pub(crate) fn eval_cost(&self) -> usize {
        match &self.inner.kind {
            Kind::Preset(_) => 1,
            Kind::Fourier { series, .. } => series.max_frequency(),
            Kind::Inverted { base, .. } | Kind::Mirrored(base) | Kind::Similarity { base, .. } => base.eval_cost(),
        }
    }

    pub fn preset(&self) -> Option<Preset> {
        match self.inner.kind {
            Kind::Preset(p) => Some(p),
            _ => None,
        }
    }

    /// Evaluates derivatives up to `order` (the rest of the jet is zero).
    pub fn eval(&self, u: f64, order: u8) -> CurveJet {
        match &self.inner.kind {
            Kind::Preset(p) => p.eval(u),
            Kind::Fourier { series, .. } => series.eval(u, order),
            Kind::Inverted { inversion, base } => inversion.map_jet(&base.eval(u, order), order),
            Kind::Mirrored(base) => {
                let mut j = base.eval(u, order);
                for v in [&mut j.pos, &mut j.d1, &mut j.d2, &mut j.d3] {
                    v.z = -v.z;
                }
                j
            }
            Kind::Similarity {
                base,
                rotation,
                scale,
                translation,
            } => {
                let j = base.eval(u, order);
                let m = rotation.matrix() * *scale;
                CurveJet {
                    pos: m * j.pos + translation,
                    d1: m * j.d1,
                    d2: m * j.d2,
                    d3: m * j.d3,
                }
            }
        }
    }

    pub fn jet(&self, u: f64) -> CurveJet {
        self.eval(u, 3)
    }

    pub fn position(&self, u: f64) -> Vec3 {
        self.eval(u, 0).pos
    }

    /// Uniform parameter grid `u_j = j·period/n`.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let h = self.period() / n as f64;
        (0..n).map(|j| j as f64 * h).collect()
    }

    pub fn sample_positions(&self, n: usize) -> Vec<Vec3> {
        self.grid(n).into_iter().map(|u| self.position(u)).collect()
    }

    /// Total length, by periodic trapezoid quadrature of `|f'|`.
    pub fn length(&self) -> f64 {
        *self.inner.length.get_or_init(|| {
            let n = 4096;
            let h = self.period() / n as f64;
            h * compensated_sum(self.grid(n).into_iter().map(|u| self.eval(u, 1).d1.norm()))
        })
    }

    pub fn centroid(&self) -> Vec3 {
        let pts = self.sample_positions(1024);
        pts.iter().sum::<Vec3>() / pts.len() as f64
    }

    /// Largest distance of a sampled point from the centroid.
    pub fn bounding_radius(&self) -> f64 {
        let c = self.centroid();
        self.sample_positions(1024)
            .iter()
            .map(|p| (p - c).norm())
            .fold(0.0, f64::max)
    }

    /// Stable hash of the curve's geometry at a few parameter values.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.period().to_bits().hash(&mut h);
        for u in self.grid(16) {
            for c in self.position(u + 0.123).iter() {
                c.to_bits().hash(&mut h);
            }
        }
        h.finish()
    }

    fn check_regular(&self) -> Result<()> {
        let n = match &self.inner.kind {
            Kind::Fourier { series, .. } => (4 * series.max_frequency()).max(256),
            _ => 256,
        };
        let speeds: Vec<(f64, f64)> = self
            .grid(n)
            .into_iter()
            .map(|u| (u, self.eval(u, 1).d1.norm()))
            .collect();
        let scale = speeds.iter().map(|s| s.1).fold(0.0, f64::max);
        let (u, smin) = speeds.iter().copied().fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        if !(scale > 0.0) || smin <= 1e-10 * scale {
            return Err(Error::RegularityViolation { u });
        }
        Ok(())
    }
}

fn check_simple(points: &[Vec3]) -> Result<()> {
    let n = points.len();
    let scale = points.iter().map(|p| p.norm()).fold(0.0, f64::max).max(1.0);
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if (points[i] - points[j]).norm() <= 1e-14 * scale {
                return Err(Error::NotSimple { i, j });
            }
        }
    }
    Ok(())
}

/// Builds a preset curve by identifier (see [`PRESET_NAMES`]).
pub fn make_preset(name: &str, params: &BTreeMap<String, f64>) -> Result<ClosedCurve> {
    ClosedCurve::from_preset(Preset::from_params(name, params)?)
}

pub fn mirror_curve(curve: &ClosedCurve) -> ClosedCurve {
    curve.mirror()
}
