//! Sphere inversions and the circles, spheres and tubes built from a curve's
//! osculating data.

mod geometry;
mod inversion;
mod rotation;
mod tube;

pub use geometry::{
    circle_through, osculating_circle, osculating_sphere, point_circle_distance, sphere_normals, tangent_circle,
    Circle3, ExtendedPoint, NormalPair, SphereOrPlane, PLANE_THRESHOLD,
};
pub use inversion::{invert_curve, invert_point, Inversion};
pub use rotation::{
    angle_variation, binormal_relation_residual, normal_field, rotation_identity_residual, sphere_pencil_residual,
    NormalSample, PointwiseReport,
};
pub use tube::{
    curvature_tube_distance, curvature_tube_distance_with, find_admissible_center, find_admissible_center_seeded,
    regularize_curvature, TubeReport, DEFAULT_DELTA_REL,
};
