use thiserror::Error;

/// Errors raised by curve construction, geometry and quadrature.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("parse error: {0}")]
    ParseError(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("curve is not regular: |f'| vanishes near u = {u}")]
    RegularityViolation { u: f64 },

    #[error("too few samples: got {got}, need at least {min}")]
    TooFewSamples { got: usize, min: usize },

    #[error("curve is not simple at sampling resolution: samples {i} and {j} coincide")]
    NotSimple { i: usize, j: usize },

    #[error("{what}: tolerance {tol:e} not met (estimate {achieved:e})")]
    ToleranceNotMet {
        what: String,
        achieved: f64,
        tol: f64,
    },

    #[error("offset {epsilon} too large: {bound_name} bound is {bound}")]
    OffsetTooLarge {
        epsilon: f64,
        bound: f64,
        bound_name: &'static str,
    },

    #[error("curvature vanishes at u = {u} (kappa = {kappa:e})")]
    CurvatureVanishes { u: f64, kappa: f64 },

    #[error("curve nearly self-intersects: sample distance {distance:e}")]
    NearSelfIntersection { distance: f64 },

    #[error("framing was built for a different curve")]
    FramingMismatch,

    #[error("invalid framing: {0}")]
    InvalidFraming(String),

    #[error("curves intersect or nearly touch: distance {distance:e}")]
    CurvesIntersect { distance: f64 },

    #[error("point coincides with the inversion center")]
    CenterHit,

    #[error("inversion center lies on the curve (distance {distance:e})")]
    CenterOnCurve { distance: f64 },

    #[error("points are collinear")]
    CollinearPoints,

    #[error("points coincide")]
    CoincidentPoints,

    #[error("point coincides with the curve point")]
    PointOnCurvePoint,

    #[error("degenerate sphere: point lies on the osculating circle")]
    DegenerateSphere,

    #[error("spheres do not intersect in a circle")]
    NonIntersecting,

    #[error("center is within {distance:e} of the curvature tube (need > {delta:e})")]
    TubeViolation { distance: f64, delta: f64 },

    #[error("no admissible center found after {trials} trials")]
    SearchExhausted { trials: usize },

    #[error("parameters lie on the diagonal")]
    DiagonalPoint,
}

impl Error {
    /// True for malformed or out-of-range input, false for numerical failures.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::UnknownPreset(_)
                | Error::InvalidParams(_)
                | Error::ParseError(_)
                | Error::InvalidConfig(_)
                | Error::RegularityViolation { .. }
                | Error::TooFewSamples { .. }
                | Error::NotSimple { .. }
                | Error::InvalidFraming(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
