use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Vec3;

use super::{ClosedCurve, Kind, Preset};

/// Serialized curve description.
///
/// ```json
/// {"type":"preset","name":"torus_knot","params":{"p":2,"q":3,"R":2.0,"r":0.5}}
/// {"type":"samples","points":[[1,0,0],[0,1,0],...]}
/// {"type":"fourier","cos":[[cx,cy,cz],...],"sin":[[0,0,0],[sx,sy,sz],...]}
/// ```
///
/// Fourier arrays are indexed by frequency: `cos[0]` is the constant term
/// and `sin[0]` must be zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum CurveSpec {
    Preset {
        name: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
    Samples {
        points: Vec<[f64; 3]>,
    },
    Fourier {
        cos: Vec<[f64; 3]>,
        #[serde(default)]
        sin: Vec<[f64; 3]>,
    },
}

impl CurveSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("curve spec serializes")
    }
}

fn v3(a: &[f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

fn arr(v: &Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

pub fn load_curve(spec: &CurveSpec) -> Result<ClosedCurve> {
    match spec {
        CurveSpec::Preset { name, params } => ClosedCurve::from_preset(Preset::from_params(name, params)?),
        CurveSpec::Samples { points } => ClosedCurve::from_samples(points.iter().map(v3).collect()),
        CurveSpec::Fourier { cos, sin } => {
            if let Some(s0) = sin.first() {
                if s0.iter().any(|&c| c != 0.0) {
                    return Err(Error::ParseError("sin[0] multiplies sin(0) and must be zero".into()));
                }
            }
            let constant = cos.first().map(v3).unwrap_or_else(Vec3::zeros);
            let c = cos.iter().skip(1).map(v3).collect();
            let s = sin.iter().skip(1).map(v3).collect();
            ClosedCurve::from_fourier(constant, c, s)
        }
    }
}

impl ClosedCurve {
    /// Serializable description. Presets, sampled and Fourier curves
    /// round-trip exactly; derived curves are written as `n` samples.
    pub fn to_spec(&self, n: usize) -> CurveSpec {
        match &self.inner.kind {
            Kind::Preset(p) => CurveSpec::Preset {
                name: p.name().to_string(),
                params: p.params(),
            },
            Kind::Fourier {
                samples: Some(points), ..
            } => CurveSpec::Samples {
                points: points.iter().map(arr).collect(),
            },
            Kind::Fourier { series, samples: None } => {
                let mut cos = vec![arr(&series.constant)];
                cos.extend(series.cos.iter().map(arr));
                let mut sin = vec![[0.0; 3]];
                sin.extend(series.sin.iter().map(arr));
                CurveSpec::Fourier { cos, sin }
            }
            _ => CurveSpec::Samples {
                points: self.sample_positions(n).iter().map(arr).collect(),
            },
        }
    }
}
