use serde::{Deserialize, Serialize};

use crate::curve::ClosedCurve;
use crate::error::{Error, Result};
use crate::frenet::{frenet_at, FrenetFrame};
use crate::Vec3;

/// A point of ℝ³ ∪ {∞}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtendedPoint {
    Finite(Vec3),
    Infinity,
}

impl From<Vec3> for ExtendedPoint {
    fn from(v: Vec3) -> Self {
        ExtendedPoint::Finite(v)
    }
}

/// Oriented circle or line. A circle is traversed counterclockwise about
/// `axis`; a line is traversed along `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Circle3 {
    Circle { center: Vec3, radius: f64, axis: Vec3 },
    Line { point: Vec3, direction: Vec3 },
}

/// Unit vector orthogonal to `a`.
fn orthogonal_unit(a: &Vec3) -> Vec3 {
    let trial = if a.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    (trial - a * a.dot(&trial)).normalize()
}

/// Distance from `y` to the circle of given center, unit axis and radius.
pub fn point_circle_distance(center: &Vec3, axis: &Vec3, radius: f64, y: &Vec3) -> f64 {
    let w = y - center;
    let h = w.dot(axis);
    let rho = (w - axis * h).norm();
    (h * h + (rho - radius) * (rho - radius)).sqrt()
}

impl Circle3 {
    pub fn distance_to(&self, y: &Vec3) -> f64 {
        match self {
            Circle3::Circle { center, radius, axis } => point_circle_distance(center, axis, *radius, y),
            Circle3::Line { point, direction } => {
                let w = y - point;
                (w - direction * w.dot(direction)).norm()
            }
        }
    }

    /// `k` equally spaced points in traversal order; `None` for lines.
    pub fn sample(&self, k: usize) -> Option<Vec<Vec3>> {
        match self {
            Circle3::Circle { center, radius, axis } => {
                let b1 = orthogonal_unit(axis);
                let b2 = axis.cross(&b1);
                Some(
                    (0..k)
                        .map(|j| {
                            let (s, c) = (std::f64::consts::TAU * j as f64 / k as f64).sin_cos();
                            center + (b1 * c + b2 * s) * *radius
                        })
                        .collect(),
                )
            }
            Circle3::Line { .. } => None,
        }
    }
}

/// Sphere or plane. A sphere with `orientation = +1` has the outward unit
/// normal as positive normal, `-1` the inward one; a plane carries its
/// positive unit normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SphereOrPlane {
    Sphere { center: Vec3, radius: f64, orientation: i8 },
    Plane { point: Vec3, normal: Vec3 },
}

impl SphereOrPlane {
    /// Positive unit normal at a point of the surface.
    pub fn normal_at(&self, y: &Vec3) -> Vec3 {
        match self {
            SphereOrPlane::Sphere {
                center,
                radius,
                orientation,
            } => (y - center) * (*orientation as f64 / radius),
            SphereOrPlane::Plane { normal, .. } => *normal,
        }
    }

    /// Unsigned distance from `y` to the surface.
    pub fn distance_to(&self, y: &Vec3) -> f64 {
        match self {
            SphereOrPlane::Sphere { center, radius, .. } => ((y - center).norm() - radius).abs(),
            SphereOrPlane::Plane { point, normal } => (y - point).dot(normal).abs(),
        }
    }

    /// Intersection circle with another sphere or plane.
    pub fn intersect(&self, other: &SphereOrPlane) -> Result<Circle3> {
        use SphereOrPlane::*;
        match (*self, *other) {
            (
                Sphere {
                    center: c0, radius: r0, ..
                },
                Sphere {
                    center: c1, radius: r1, ..
                },
            ) => {
                let d = (c1 - c0).norm();
                if d <= 1e-12 * r0.max(r1) {
                    return Err(Error::NonIntersecting);
                }
                let m = (c1 - c0) / d;
                let a = (d * d + r0 * r0 - r1 * r1) / (2.0 * d);
                let h2 = r0 * r0 - a * a;
                if h2 <= 0.0 {
                    return Err(Error::NonIntersecting);
                }
                Ok(Circle3::Circle {
                    center: c0 + m * a,
                    radius: h2.sqrt(),
                    axis: m,
                })
            }
            (Sphere { center, radius, .. }, Plane { point, normal }) | (Plane { point, normal }, Sphere { center, radius, .. }) => {
                let t = (center - point).dot(&normal);
                let h2 = radius * radius - t * t;
                if h2 <= 0.0 {
                    return Err(Error::NonIntersecting);
                }
                Ok(Circle3::Circle {
                    center: center - normal * t,
                    radius: h2.sqrt(),
                    axis: normal,
                })
            }
            // two planes meet in a line, never in a circle
            (Plane { .. }, Plane { .. }) => Err(Error::NonIntersecting),
        }
    }
}

/// Normals of `Σ(x,x,x,P)` at `x` and at `P`, and the normal of the plane
/// in which `n(x)` rotates (the unit tangent `v(x)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalPair {
    pub n_at_x: Vec3,
    /// Absent when `Σ` is a plane.
    pub n_at_p: Option<Vec3>,
    pub rotation_plane_normal: Vec3,
}

/// `Γ(x, y, z)`, oriented by the traversal `x → y → z`; the line through
/// `x` and `y` when `z = ∞`.
pub fn circle_through(x: &Vec3, y: &Vec3, z: ExtendedPoint) -> Result<Circle3> {
    let scale = x.norm().max(y.norm()).max(1.0);
    if (y - x).norm() <= 1e-12 * scale {
        return Err(Error::CoincidentPoints);
    }
    let z = match z {
        ExtendedPoint::Infinity => {
            return Ok(Circle3::Line {
                point: *x,
                direction: (y - x).normalize(),
            })
        }
        ExtendedPoint::Finite(z) => z,
    };
    if (z - x).norm() <= 1e-12 * scale || (z - y).norm() <= 1e-12 * scale {
        return Err(Error::CoincidentPoints);
    }
    let a = x - z;
    let b = y - z;
    let axb = a.cross(&b);
    if axb.norm() <= 1e-12 * a.norm() * b.norm() {
        return Err(Error::CollinearPoints);
    }
    let center = z + (b * a.norm_squared() - a * b.norm_squared()).cross(&axb) / (2.0 * axb.norm_squared());
    Ok(Circle3::Circle {
        center,
        radius: (x - center).norm(),
        axis: (y - x).cross(&(z - x)).normalize(),
    })
}

/// `Γ(x, x, y)`: the circle tangent to the curve at `x = f(u)` through `y`,
/// oriented by `v(u)`.
pub fn tangent_circle(curve: &ClosedCurve, u: f64, y: ExtendedPoint) -> Result<Circle3> {
    let jet = curve.eval(u, 1);
    tangent_circle_at(&jet.pos, &jet.d1.normalize(), y)
}

pub(crate) fn tangent_circle_at(x: &Vec3, v: &Vec3, y: ExtendedPoint) -> Result<Circle3> {
    let line = Circle3::Line { point: *x, direction: *v };
    let y = match y {
        ExtendedPoint::Infinity => return Ok(line),
        ExtendedPoint::Finite(y) => y,
    };
    let d = y - x;
    if d.norm() <= 1e-12 * x.norm().max(1.0) {
        return Err(Error::PointOnCurvePoint);
    }
    let m = d - v * d.dot(v);
    if m.norm() <= 1e-12 * d.norm() {
        return Ok(line);
    }
    let m = m.normalize();
    let rho = d.norm_squared() / (2.0 * m.dot(&d));
    Ok(Circle3::Circle {
        center: x + m * rho,
        radius: rho,
        axis: v.cross(&m),
    })
}

/// `Γ(x, x, x)`: center `f + e2/κ`, radius `1/κ`, axis `e3`.
pub fn osculating_circle(curve: &ClosedCurve, u: f64) -> Result<Circle3> {
    let fr = frenet_at(curve, u)?;
    let x = curve.position(u);
    Ok(Circle3::Circle {
        center: x + fr.e2 / fr.kappa,
        radius: 1.0 / fr.kappa,
        axis: fr.e3,
    })
}

/// Relative threshold on `|e3·(c − P)|/|c − P|` below which `Σ(x,x,x,P)`
/// is taken to be the osculating plane.
pub const PLANE_THRESHOLD: f64 = 1e-10;

/// `Σ(x,x,x,P)` from the Frenet data at `x`.
///
/// The positive side follows the disc convention: of the two pieces into
/// which `Γ(x,x,x)` cuts the sphere, the one not containing `P` must induce
/// the orientation of `Γ(x,x,x)` on its boundary. For a sphere centered on
/// the binormal line through the osculating center `c`, that piece is the
/// cap on the side of the osculating plane opposite to `P`, so the normal is
/// outward exactly when `P` lies below the plane (`e3·(P − c) < 0`).
pub(crate) fn sphere_from_frame(x: &Vec3, fr: &FrenetFrame, p: ExtendedPoint) -> Result<SphereOrPlane> {
    let rho = 1.0 / fr.kappa;
    let c = x + fr.e2 * rho;
    let p = match p {
        ExtendedPoint::Infinity => {
            return Ok(SphereOrPlane::Plane {
                point: *x,
                normal: fr.e3,
            })
        }
        ExtendedPoint::Finite(p) => p,
    };
    if point_circle_distance(&c, &fr.e3, rho, &p) <= 1e-9 * rho {
        return Err(Error::DegenerateSphere);
    }
    let w = c - p;
    let den = fr.e3.dot(&w);
    if den.abs() < PLANE_THRESHOLD * w.norm() {
        // P in the osculating plane: the disc side is the disc itself when P
        // is outside it, and the unbounded side when P is inside.
        let normal = if w.norm() > rho { fr.e3 } else { -fr.e3 };
        return Ok(SphereOrPlane::Plane { point: *x, normal });
    }
    let lambda = (rho * rho - w.norm_squared()) / (2.0 * den);
    Ok(SphereOrPlane::Sphere {
        center: c + fr.e3 * lambda,
        radius: (rho * rho + lambda * lambda).sqrt(),
        orientation: if den > 0.0 { 1 } else { -1 },
    })
}

/// `Σ(x,x,x,P)`; the osculating plane when `P = ∞`.
pub fn osculating_sphere(curve: &ClosedCurve, u: f64, p: ExtendedPoint) -> Result<SphereOrPlane> {
    let fr = frenet_at(curve, u)?;
    sphere_from_frame(&curve.position(u), &fr, p)
}

pub(crate) fn normals_from_frame(x: &Vec3, fr: &FrenetFrame, p: ExtendedPoint) -> Result<NormalPair> {
    let sigma = sphere_from_frame(x, fr, p)?;
    let n_at_p = match (sigma, p) {
        (SphereOrPlane::Sphere { .. }, ExtendedPoint::Finite(p)) => Some(sigma.normal_at(&p)),
        _ => None,
    };
    Ok(NormalPair {
        n_at_x: sigma.normal_at(x),
        n_at_p,
        rotation_plane_normal: fr.e1,
    })
}

/// Positive unit normals of `Σ(x,x,x,P)` at `x` and `P`.
pub fn sphere_normals(curve: &ClosedCurve, u: f64, p: ExtendedPoint) -> Result<NormalPair> {
    let fr = frenet_at(curve, u)?;
    normals_from_frame(&curve.position(u), &fr, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::{invert_curve, Inversion};
    use crate::curve::make_preset;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn preset(name: &str) -> ClosedCurve {
        make_preset(name, &BTreeMap::new()).unwrap()
    }

    fn unpack(c: Circle3) -> (Vec3, f64, Vec3) {
        match c {
            Circle3::Circle { center, radius, axis } => (center, radius, axis),
            Circle3::Line { .. } => panic!("expected a circle"),
        }
    }

    #[test]
    fn circumcircle_examples() {
        let (c, r, a) = unpack(
            circle_through(
                &Vec3::new(1.0, 0.0, 0.0),
                &Vec3::new(0.0, 1.0, 0.0),
                Vec3::new(-1.0, 0.0, 0.0).into(),
            )
            .unwrap(),
        );
        assert!(c.norm() < 1e-15);
        assert!((r - 1.0).abs() < 1e-15);
        assert!((a - Vec3::z()).norm() < 1e-15);

        let l = circle_through(&Vec3::zeros(), &Vec3::x(), ExtendedPoint::Infinity).unwrap();
        assert_eq!(
            l,
            Circle3::Line {
                point: Vec3::zeros(),
                direction: Vec3::x()
            }
        );
        assert_eq!(
            circle_through(&Vec3::zeros(), &Vec3::x(), (Vec3::x() * 2.0).into()),
            Err(Error::CollinearPoints)
        );
        assert_eq!(
            circle_through(&Vec3::zeros(), &Vec3::zeros(), Vec3::x().into()),
            Err(Error::CoincidentPoints)
        );
    }

    #[test]
    fn tangent_circle_examples() {
        let circle = preset("circle");
        let (c, r, a) = unpack(tangent_circle(&circle, 0.0, Vec3::new(-1.0, 0.0, 0.0).into()).unwrap());
        assert!(c.norm() < 1e-15 && (r - 1.0).abs() < 1e-15 && (a - Vec3::z()).norm() < 1e-15);

        let t = preset("trefoil");
        assert!(matches!(
            tangent_circle(&t, 0.3, ExtendedPoint::Infinity).unwrap(),
            Circle3::Line { .. }
        ));
        let y = Vec3::new(5.0, 5.0, 5.0);
        let g = tangent_circle(&t, 0.0, y.into()).unwrap();
        let (c, _, _) = unpack(g);
        let j = t.eval(0.0, 1);
        assert!(g.distance_to(&j.pos) < 1e-12);
        assert!(g.distance_to(&y) < 1e-12);
        assert!((c - j.pos).dot(&j.d1.normalize()).abs() < 1e-9);
        assert_eq!(tangent_circle(&t, 0.0, j.pos.into()), Err(Error::PointOnCurvePoint));
    }

    #[test]
    fn osculating_circle_examples() {
        let c2 = make_preset("circle", &[("R".to_string(), 2.0)].into()).unwrap();
        for u in [0.0, 1.0, 2.5] {
            let (c, r, a) = unpack(osculating_circle(&c2, u).unwrap());
            assert!(c.norm() < 1e-14 && (r - 2.0).abs() < 1e-14 && (a - Vec3::z()).norm() < 1e-14);
        }
        let (c, r, _) = unpack(osculating_circle(&preset("ellipse"), 0.0).unwrap());
        assert!((c - Vec3::new(1.5, 0.0, 0.0)).norm() < 1e-14 && (r - 0.5).abs() < 1e-14);
    }

    #[test]
    fn osculating_circle_is_limit_of_circumcircles() {
        let t = preset("trefoil");
        let osc = osculating_circle(&t, 0.0).unwrap();
        let pts = osc.sample(64).unwrap();
        let mut prev = f64::INFINITY;
        for h in [1e-2, 5e-3, 2.5e-3] {
            let g = circle_through(&t.position(-h), &t.position(0.0), t.position(h).into()).unwrap();
            let gp = g.sample(64).unwrap();
            let d = pts
                .iter()
                .map(|p| g.distance_to(p))
                .chain(gp.iter().map(|p| osc.distance_to(p)))
                .fold(0.0, f64::max);
            assert!(d < prev && d < 10.0 * h, "h = {h}: {d}");
            prev = d;
        }
    }

    #[test]
    fn inversion_maps_circles_to_circles() {
        let circle = preset("circle");
        let inv = Inversion::new(Vec3::new(3.0, 0.0, 0.0), 1.0).unwrap();
        let img = invert_curve(&inv, &circle).unwrap();
        let pts = img.sample_positions(16);
        let g = circle_through(&pts[0], &pts[5], pts[11].into()).unwrap();
        // the image of the unit circle under this inversion has diameter
        // from I(1,0,0) = (2.5,0,0) to I(−1,0,0) = (2.75,0,0)
        let (c, r, _) = unpack(g);
        assert!((c - Vec3::new(2.625, 0.0, 0.0)).norm() < 1e-12 && (r - 0.125).abs() < 1e-12);
        assert!(pts.iter().all(|p| g.distance_to(p) < 1e-7));

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let center = Vec3::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let inv = Inversion::new(Vec3::new(12.0, 1.0, -2.0), rng.gen_range(0.5..4.0)).unwrap();
            let axis = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 1.0).normalize();
            let g = Circle3::Circle {
                center,
                radius: 1.3,
                axis,
            };
            let img: Vec<Vec3> = g.sample(16).unwrap().iter().map(|p| inv.apply(p).unwrap()).collect();
            let h = circle_through(&img[0], &img[5], img[10].into()).unwrap();
            assert!(img.iter().all(|p| h.distance_to(p) < 1e-7));
        }
    }

    #[test]
    fn sphere_through_unit_circle_and_pole() {
        let c = preset("circle");
        let s = osculating_sphere(&c, 0.0, Vec3::z().into()).unwrap();
        match s {
            SphereOrPlane::Sphere { center, radius, .. } => {
                assert!(center.norm() < 1e-15 && (radius - 1.0).abs() < 1e-15);
            }
            _ => panic!("expected sphere"),
        }
        // P = (0,0,1) lies on the +e3 side of the osculating plane z = 0, so
        // the disc piece avoiding P is the lower hemisphere. Its outward
        // normal induces the clockwise boundary orientation about e3 = ẑ,
        // opposite to the circle's, so the positive normal points inward.
        let n = sphere_normals(&c, 0.0, Vec3::z().into()).unwrap();
        assert!((n.n_at_x - Vec3::new(-1.0, 0.0, 0.0)).norm() < 1e-15);
        assert!((n.n_at_p.unwrap() - Vec3::new(0.0, 0.0, -1.0)).norm() < 1e-15);
        // below the plane the lower hemisphere contains P; the upper cap is
        // used and the normal is outward
        let n = sphere_normals(&c, 0.0, (-Vec3::z()).into()).unwrap();
        assert!((n.n_at_x - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn plane_at_infinity_and_degeneracy() {
        let t = preset("trefoil");
        for u in t.grid(32) {
            let n = sphere_normals(&t, u, ExtendedPoint::Infinity).unwrap();
            assert!((n.n_at_x - frenet_at(&t, u).unwrap().e3).norm() < 1e-9);
            assert!(n.n_at_p.is_none());
        }
        let c = preset("circle");
        assert_eq!(
            osculating_sphere(&c, 0.3, Vec3::new(0.0, -1.0, 0.0).into()),
            Err(Error::DegenerateSphere)
        );
    }

    #[test]
    fn generic_sphere_contains_circle_and_point() {
        let t = preset("trefoil");
        let p = Vec3::new(3.0, -4.0, 2.5);
        let s = osculating_sphere(&t, 0.0, p.into()).unwrap();
        let osc = osculating_circle(&t, 0.0).unwrap();
        assert!(s.distance_to(&p) < 1e-8);
        assert!(s.distance_to(&t.position(0.0)) < 1e-8);
        for q in osc.sample(8).unwrap() {
            assert!(s.distance_to(&q) < 1e-8);
        }
    }

    #[test]
    fn normal_is_tangent_to_curve() {
        let names = ["trefoil", "ellipse", "twisted_unknot", "planar_flower"];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let c = preset(names[rng.gen_range(0..names.len())]);
            let u = rng.gen_range(0.0..c.period());
            let p = Vec3::new(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0));
            let n = sphere_normals(&c, u, p.into()).unwrap();
            let v = c.eval(u, 1).d1.normalize();
            assert!(n.n_at_x.dot(&v).abs() < 1e-8);
            assert!((n.n_at_x.norm() - 1.0).abs() < 1e-10);
            assert!((n.rotation_plane_normal - v).norm() < 1e-12);
        }
    }

    #[test]
    fn normal_is_continuous_across_the_osculating_plane() {
        let c = preset("circle");
        for p in [Vec3::new(3.0, 0.0, 0.0), Vec3::new(0.2, 0.1, 0.0)] {
            let above = sphere_normals(&c, 0.0, (p + Vec3::z() * 1e-6).into()).unwrap().n_at_x;
            let below = sphere_normals(&c, 0.0, (p - Vec3::z() * 1e-6).into()).unwrap().n_at_x;
            let on = sphere_normals(&c, 0.0, p.into()).unwrap().n_at_x;
            assert!((above - below).norm() < 1e-5);
            assert!((above - on).norm() < 1e-5);
        }
    }

    #[test]
    fn intersections() {
        let a = SphereOrPlane::Sphere {
            center: Vec3::zeros(),
            radius: 1.0,
            orientation: 1,
        };
        let b = SphereOrPlane::Sphere {
            center: Vec3::x(),
            radius: 1.0,
            orientation: 1,
        };
        let (c, r, ax) = unpack(a.intersect(&b).unwrap());
        assert!((c - Vec3::new(0.5, 0.0, 0.0)).norm() < 1e-15);
        assert!((r - 0.75f64.sqrt()).abs() < 1e-15);
        assert!((ax - Vec3::x()).norm() < 1e-15);
        assert_eq!(a.intersect(&a), Err(Error::NonIntersecting));
        let pl = SphereOrPlane::Plane {
            point: Vec3::new(0.0, 0.0, 0.6),
            normal: Vec3::z(),
        };
        let (c, r, _) = unpack(a.intersect(&pl).unwrap());
        assert!((c - Vec3::new(0.0, 0.0, 0.6)).norm() < 1e-15 && (r - 0.8).abs() < 1e-15);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        #[test]
        fn normals_are_unit_and_contain_the_tangent(
            u in 0.0f64..std::f64::consts::TAU,
            x in -6.0f64..6.0, y in -6.0f64..6.0, z in -6.0f64..6.0,
        ) {
            let c = make_preset("trefoil", &BTreeMap::new()).unwrap();
            let p = Vec3::new(x, y, z);
            proptest::prop_assume!((c.position(u) - p).norm() > 1e-3);
            let pair = sphere_normals(&c, u, ExtendedPoint::Finite(p)).unwrap();
            let t = c.jet(u).d1.normalize();
            proptest::prop_assert!(pair.n_at_x.dot(&t).abs() < 1e-8);
            proptest::prop_assert!((pair.n_at_x.norm() - 1.0).abs() < 1e-10);
            proptest::prop_assert!((pair.rotation_plane_normal.norm() - 1.0).abs() < 1e-10);
            if let Some(np) = pair.n_at_p {
                proptest::prop_assert!((np.norm() - 1.0).abs() < 1e-10);
            }
        }
    }
}
