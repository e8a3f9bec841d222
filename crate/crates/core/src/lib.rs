//! Writhe, twist, total torsion and linking numbers of closed space curves,
//! together with the conformal geometry (sphere inversions, osculating
//! circles and spheres, curvature tubes) needed to study how these
//! quantities behave under Möbius transformations.

pub mod conformal;
pub mod curve;
pub mod error;
pub mod frenet;
pub mod indicatrix;
pub mod invariants;
pub mod quadrature;
pub(crate) mod spectral;
pub mod verify;

pub use curve::{ClosedCurve, CurveJet, CurveSpec, Framing};
pub use error::{Error, Result};
pub use quadrature::{InvariantReport, QuadratureConfig, Rule};

/// Point or vector in ℝ³.
pub type Vec3 = nalgebra::Vector3<f64>;
