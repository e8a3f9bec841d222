//! Residual suites that check the inversion and integrality identities on a
//! given curve, packaged as serializable reports.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::conformal::{
    angle_variation, binormal_relation_residual, find_admissible_center_seeded, invert_curve,
    rotation_identity_residual, sphere_pencil_residual, Inversion,
};
use crate::curve::{ClosedCurve, CurveSpec};
use crate::error::{Error, Result};
use crate::indicatrix::cycle_area_check;
use crate::invariants::{total_torsion, writhe};
use crate::quadrature::QuadratureConfig;
use crate::Vec3;

/// Identity checked by a suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// `Wr(I(K)) = −Wr(K)`.
    WritheInversion,
    /// `Tω(I(K)) + Tω(K) ∈ ℤ`.
    TwistModZ,
    /// `Wr + Tω ∈ ℤ`, and the cycle area agrees.
    Integrality,
    /// `∫ τ ds̃` over `I(K)` equals `−∫ v·(n × dn)` over `K`.
    #[serde(rename = "prop4")]
    AngleVariation,
    /// Osculating spheres of nearby points meet near `Γ(x,x,P)`.
    #[serde(rename = "lemma1")]
    SpherePencil,
    /// The binormal of `I(K)` is `−n_P`.
    BinormalRelation,
}

impl Theorem {
    pub const ALL: [Theorem; 6] = [
        Theorem::WritheInversion,
        Theorem::TwistModZ,
        Theorem::Integrality,
        Theorem::AngleVariation,
        Theorem::SpherePencil,
        Theorem::BinormalRelation,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::WritheInversion => "writhe_inversion",
            Theorem::TwistModZ => "twist_mod_z",
            Theorem::Integrality => "integrality",
            Theorem::AngleVariation => "prop4",
            Theorem::SpherePencil => "lemma1",
            Theorem::BinormalRelation => "binormal_relation",
        }
    }

    /// Number of inversion centers the suite uses when they are chosen
    /// automatically.
    pub fn default_centers(self) -> usize {
        match self {
            Theorem::WritheInversion | Theorem::TwistModZ => 3,
            Theorem::AngleVariation => 2,
            Theorem::SpherePencil | Theorem::BinormalRelation => 1,
            Theorem::Integrality => 0,
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "angle_variation" => return Ok(Theorem::AngleVariation),
            "sphere_pencil" => return Ok(Theorem::SpherePencil),
            _ => {}
        }
        Theorem::ALL
            .into_iter()
            .find(|t| t.id() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown theorem `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    /// Pass when `value <= tolerance`.
    #[serde(rename = "<=")]
    AtMost,
    /// Pass when `value >= tolerance`.
    #[serde(rename = ">=")]
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Residual {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            comparison: Comparison::AtMost,
            pass: value <= tolerance,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            comparison: Comparison::AtLeast,
            pass: value >= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyInputs {
    pub curve: CurveSpec,
    pub centers: Vec<[f64; 3]>,
    /// Inversion radius; `None` means the distance from each center to the
    /// curve's centroid.
    pub radius: Option<f64>,
    pub config: QuadratureConfig,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub theorem: Theorem,
    pub inputs: VerifyInputs,
    pub residuals: Vec<Residual>,
    pub pass: bool,
    /// Wall-clock seconds; only filled in on request so that reports stay
    /// byte-identical between runs.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub runtime_seconds: Option<f64>,
}

/// How inversion centers are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum Centers {
    Given(Vec<Vec3>),
    /// Seeded search for this many admissible centers.
    Auto(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub config: QuadratureConfig,
    pub centers: Centers,
    pub radius: Option<f64>,
    pub seed: u64,
    /// Tolerance for the integrated identities.
    pub tol: f64,
    /// Tolerance for pointwise identities.
    pub pointwise_tol: f64,
    /// Samples for pointwise identities.
    pub samples: usize,
}

impl VerifyOptions {
    pub fn for_theorem(theorem: Theorem) -> Self {
        Self {
            config: QuadratureConfig::default(),
            centers: Centers::Auto(theorem.default_centers()),
            radius: None,
            seed: 0,
            tol: 1e-3,
            pointwise_tol: 1e-4,
            samples: 2048,
        }
    }
}

/// Margin, relative to the curve length, kept from the curvature tube by
/// automatically chosen centers.
pub const AUTO_CENTER_MARGIN: f64 = 0.05;

/// Trials per automatically chosen center.
pub const AUTO_CENTER_TRIALS: usize = 200;

/// `count` admissible centers from consecutive seeds.
pub fn auto_centers(curve: &ClosedCurve, count: usize, seed: u64) -> Result<Vec<Vec3>> {
    let delta = AUTO_CENTER_MARGIN * curve.length();
    (0..count as u64)
        .map(|i| find_admissible_center_seeded(curve, AUTO_CENTER_TRIALS, delta, seed.wrapping_add(i)))
        .collect()
}

fn inversion_for(curve: &ClosedCurve, center: &Vec3, radius: Option<f64>) -> Result<Inversion> {
    Inversion::new(*center, radius.unwrap_or_else(|| (center - curve.centroid()).norm()))
}

fn distance_to_integer(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Runs one suite.
pub fn verify(theorem: Theorem, curve: &ClosedCurve, opts: &VerifyOptions) -> Result<VerificationReport> {
    opts.config.validate()?;
    let centers = match &opts.centers {
        Centers::Given(c) => c.clone(),
        Centers::Auto(k) => auto_centers(curve, *k, opts.seed)?,
    };
    if theorem.default_centers() > 0 && centers.is_empty() {
        return Err(Error::InvalidParams(format!("{theorem} needs at least one inversion center")));
    }
    let q = &opts.config;
    let mut residuals = Vec::new();
    let label = |i: usize, what: &str| format!("{what}[{i}]");
    match theorem {
        Theorem::WritheInversion => {
            let w = writhe(curve, q)?.value;
            for (i, c) in centers.iter().enumerate() {
                let img = invert_curve(&inversion_for(curve, c, opts.radius)?, curve)?;
                let wi = writhe(&img, q)?.value;
                residuals.push(Residual::at_most(label(i, "|Wr(I(K)) + Wr(K)|"), (wi + w).abs(), opts.tol));
            }
        }
        Theorem::TwistModZ => {
            let t = total_torsion(curve, q)?.value;
            for (i, c) in centers.iter().enumerate() {
                let img = invert_curve(&inversion_for(curve, c, opts.radius)?, curve)?;
                let ti = total_torsion(&img, q)?.value;
                residuals.push(Residual::at_most(
                    label(i, "dist(Tω(I(K)) + Tω(K), ℤ)"),
                    distance_to_integer(ti + t),
                    opts.tol,
                ));
            }
        }
        Theorem::Integrality => {
            let s = writhe(curve, q)?.value + total_torsion(curve, q)?.value;
            residuals.push(Residual::at_most("dist(Wr + Tω, ℤ)", distance_to_integer(s), opts.tol));
            let cycle = cycle_area_check(curve, q)?;
            residuals.push(Residual::at_most("cycle area residual", cycle.residual, opts.tol));
            residuals.push(Residual::at_most(
                "|k − round(Wr + Tω)|",
                (cycle.k - s.round() as i64).abs() as f64,
                0.0,
            ));
        }
        Theorem::AngleVariation => {
            for (i, c) in centers.iter().enumerate() {
                let inv = inversion_for(curve, c, opts.radius)?;
                let img = invert_curve(&inv, curve)?;
                let torsion = TAU * total_torsion(&img, q)?.value;
                let angle = angle_variation(curve, (*c).into(), q)?.value;
                residuals.push(Residual::at_most(
                    label(i, "|∫τ̃ ds̃ + ∫v·(n×dn)|"),
                    (torsion + angle).abs(),
                    opts.tol,
                ));
                let p = rotation_identity_residual(curve, &inv, opts.samples)?;
                residuals.push(Residual::at_most(
                    label(i, "max |τ̃ ds̃/ds + v·(n×dn/ds)|"),
                    p.max_residual,
                    opts.pointwise_tol,
                ));
            }
        }
        Theorem::SpherePencil => {
            let hs = [1e-2, 5e-3, 2.5e-3];
            for (i, c) in centers.iter().enumerate() {
                for k in 0..4 {
                    let u = curve.period() * (k as f64 + 0.5) / 4.0;
                    let r = hs
                        .iter()
                        .map(|&h| sphere_pencil_residual(curve, u, h, c))
                        .collect::<Result<Vec<f64>>>()?;
                    let slope = (r[0] / r[2]).ln() / (hs[0] / hs[2]).ln();
                    residuals.push(Residual::at_least(format!("order[{i}] at u={u:.6}"), slope, 0.9));
                }
            }
        }
        Theorem::BinormalRelation => {
            for (i, c) in centers.iter().enumerate() {
                let p = binormal_relation_residual(curve, &inversion_for(curve, c, opts.radius)?, opts.samples)?;
                residuals.push(Residual::at_most(
                    label(i, "max |e3(I(K)) + n_P|"),
                    p.max_residual,
                    opts.pointwise_tol,
                ));
            }
        }
    }
    let pass = residuals.iter().all(|r| r.pass);
    Ok(VerificationReport {
        schema: "1".into(),
        theorem,
        inputs: VerifyInputs {
            curve: curve.to_spec(q.n),
            centers: centers.iter().map(|c| [c.x, c.y, c.z]).collect(),
            radius: opts.radius,
            config: *q,
            seed: opts.seed,
        },
        residuals,
        pass,
        runtime_seconds: None,
    })
}
