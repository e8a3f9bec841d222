use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{mirror_curve, ClosedCurve};
use crate::error::{Error, Result};
use crate::frenet::{frame_from_jet, kappa_of, kappa_threshold, DEFAULT_KAPPA_REL};
use crate::Vec3;

use super::geometry::point_circle_distance;
use super::inversion::{invert_curve, Inversion};

/// Default admissibility margin relative to the curve length.
pub const DEFAULT_DELTA_REL: f64 = 1e-3;

/// Distance from a point to the curvature tube `⋃ Γ(x,x,x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeReport {
    /// Minimum over the `n` sampled osculating circles.
    pub distance: f64,
    pub argmin: f64,
    /// `distance` improved by golden-section search around each discrete
    /// local minimum; never larger than `distance`.
    pub refined_distance: f64,
    pub refined_argmin: f64,
    pub delta: f64,
    /// `refined_distance > delta`.
    pub admissible: bool,
    pub n: usize,
}

/// Distance from `p` to the osculating circle at `u`. With `lenient`, the
/// tangent line stands in where the curvature vanishes.
fn circle_distance_at(curve: &ClosedCurve, u: f64, p: &Vec3, threshold: f64, lenient: bool) -> Result<f64> {
    let jet = curve.jet(u);
    match frame_from_jet(&jet, threshold) {
        Some(fr) => {
            let rho = 1.0 / fr.kappa;
            Ok(point_circle_distance(&(jet.pos + fr.e2 * rho), &fr.e3, rho, p))
        }
        None if lenient => {
            let v = jet.d1.normalize();
            let w = p - jet.pos;
            Ok((w - v * w.dot(&v)).norm())
        }
        None => Err(Error::CurvatureVanishes {
            u,
            kappa: kappa_of(&jet),
        }),
    }
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-13 * (1.0 + a.abs()) {
            break;
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

pub(crate) fn tube_report(curve: &ClosedCurve, p: &Vec3, n: usize, delta: f64, lenient: bool) -> Result<TubeReport> {
    if n < 3 {
        return Err(Error::InvalidParams(format!("tube scan needs n >= 3, got {n}")));
    }
    let threshold = kappa_threshold(curve, DEFAULT_KAPPA_REL);
    let grid = curve.grid(n);
    let d = grid
        .par_iter()
        .map(|&u| circle_distance_at(curve, u, p, threshold, lenient))
        .collect::<Result<Vec<f64>>>()?;
    let (j0, distance) = d
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let h = curve.period() / n as f64;
    let (mut refined_argmin, mut refined_distance) = (grid[j0], distance);
    for j in 0..n {
        let (prev, next) = (d[(j + n - 1) % n], d[(j + 1) % n]);
        if d[j] <= prev && d[j] <= next {
            let f = |u: f64| circle_distance_at(curve, u, p, threshold, true).unwrap_or(f64::INFINITY);
            let (u, v) = golden_section(f, grid[j] - h, grid[j] + h);
            if v < refined_distance {
                refined_distance = v;
                refined_argmin = u.rem_euclid(curve.period());
            }
        }
    }
    Ok(TubeReport {
        distance,
        argmin: grid[j0],
        refined_distance,
        refined_argmin,
        delta,
        admissible: refined_distance > delta,
        n,
    })
}

/// Distance from `p` to the curvature tube, sampled at `n` osculating
/// circles, with the default margin `1e-3·L`.
pub fn curvature_tube_distance(curve: &ClosedCurve, p: &Vec3, n: usize) -> Result<TubeReport> {
    curvature_tube_distance_with(curve, p, n, DEFAULT_DELTA_REL * curve.length())
}

pub fn curvature_tube_distance_with(curve: &ClosedCurve, p: &Vec3, n: usize, delta: f64) -> Result<TubeReport> {
    tube_report(curve, p, n, delta, false)
}

/// Circles scanned per candidate during center searches.
const SEARCH_SAMPLES: usize = 1024;

/// Seeded search for a point at distance more than `delta` from the
/// curvature tube, using seed 0.
pub fn find_admissible_center(curve: &ClosedCurve, trials: usize, delta: f64) -> Result<Vec3> {
    find_admissible_center_seeded(curve, trials, delta, 0)
}

/// Candidate `i` is a random direction on the sphere of radius
/// `r0·(1 + i/4)` about the centroid, `r0 = 1.5 × bounding radius`.
pub fn find_admissible_center_seeded(curve: &ClosedCurve, trials: usize, delta: f64, seed: u64) -> Result<Vec3> {
    if trials == 0 {
        return Err(Error::InvalidParams("trials must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centroid = curve.centroid();
    let r0 = 1.5 * curve.bounding_radius();
    for i in 0..trials {
        let z: f64 = rng.gen_range(-1.0..=1.0);
        let phi: f64 = rng.gen_range(0.0..TAU);
        let s = (1.0 - z * z).sqrt();
        let p = centroid + Vec3::new(s * phi.cos(), s * phi.sin(), z) * (r0 * (1.0 + 0.25 * i as f64));
        if tube_report(curve, &p, SEARCH_SAMPLES, delta, true)?.refined_distance > delta {
            return Ok(p);
        }
    }
    Err(Error::SearchExhausted { trials })
}

/// Candidates tried by [`regularize_curvature`].
const REGULARIZE_TRIALS: usize = 64;

/// Approximates the curve by one with nowhere vanishing curvature: inverts
/// in a huge sphere tangent to the plane `z = 0` and reflects back through
/// that plane.
///
/// The inversion center is `P = (c_x + ξ, c_y + η, D)` with `c` the
/// centroid, `D = distance_factor × diameter` and the radius equal to `D`;
/// `(ξ, η)` starts at zero and is then drawn from `[−d/4, d/4]²` until `P`
/// is admissible. Near the tangency point the inversion agrees with the
/// reflection in `z = 0` up to `O(d²/D)`, so the result converges to the
/// input as the factor grows.
pub fn regularize_curvature(curve: &ClosedCurve, distance_factor: f64) -> Result<ClosedCurve> {
    if !(distance_factor.is_finite() && distance_factor > 0.0) {
        return Err(Error::InvalidParams(format!("distance factor must be > 0, got {distance_factor}")));
    }
    let centroid = curve.centroid();
    let diameter = 2.0 * curve.bounding_radius();
    let height = distance_factor * diameter;
    let delta = DEFAULT_DELTA_REL * curve.length();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for i in 0..REGULARIZE_TRIALS {
        let (xi, eta) = if i == 0 {
            (0.0, 0.0)
        } else {
            let q = 0.25 * diameter;
            (rng.gen_range(-q..=q), rng.gen_range(-q..=q))
        };
        let p = Vec3::new(centroid.x + xi, centroid.y + eta, height);
        if tube_report(curve, &p, SEARCH_SAMPLES, delta, true)?.refined_distance > delta {
            let inv = Inversion::new(p, height)?;
            return Ok(mirror_curve(&invert_curve(&inv, curve)?));
        }
    }
    Err(Error::SearchExhausted {
        trials: REGULARIZE_TRIALS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::make_preset;
    use crate::frenet::frenet_scan;
    use crate::invariants::writhe;
    use crate::QuadratureConfig;
    use std::collections::BTreeMap;

    fn preset(name: &str, kv: &[(&str, f64)]) -> ClosedCurve {
        let p: BTreeMap<String, f64> = kv.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        make_preset(name, &p).unwrap()
    }

    #[test]
    fn unit_circle_distances() {
        let c = preset("circle", &[]);
        let r = curvature_tube_distance(&c, &Vec3::zeros(), 64).unwrap();
        assert!((r.distance - 1.0).abs() < 1e-14);
        let r = curvature_tube_distance(&c, &Vec3::new(1.0, 0.0, 0.5), 64).unwrap();
        assert!((r.distance - 0.5).abs() < 1e-14);
        assert!(r.admissible);
    }

    #[test]
    fn nested_grids_are_monotone() {
        let c = preset("trefoil", &[]);
        let p = Vec3::new(0.4, -0.3, 1.7);
        let mut prev = f64::INFINITY;
        for n in [64, 128, 256, 512, 1024] {
            let r = curvature_tube_distance(&c, &p, n).unwrap();
            assert!(r.distance <= prev);
            assert!(r.refined_distance <= r.distance);
            prev = r.distance;
        }
    }

    #[test]
    fn vanishing_curvature_is_reported() {
        let c = preset("twisted_unknot", &[("amplitude", 1.0)]);
        assert!(matches!(
            curvature_tube_distance(&c, &Vec3::new(0.0, 0.0, 5.0), 64),
            Err(Error::CurvatureVanishes { .. })
        ));
    }

    #[test]
    fn circle_center_search() {
        let c = preset("circle", &[]);
        let p = find_admissible_center(&c, 10, 0.1).unwrap();
        assert!(curvature_tube_distance(&c, &p, 256).unwrap().distance > 0.1);
        assert_eq!(
            find_admissible_center(&c, 5, 1e12),
            Err(Error::SearchExhausted { trials: 5 })
        );
    }

    #[test]
    fn trefoil_center_search() {
        let c = preset("trefoil", &[]);
        let delta = 0.05 * c.length();
        let p = find_admissible_center(&c, 200, delta).unwrap();
        let a = curvature_tube_distance_with(&c, &p, 1024, delta).unwrap();
        let b = curvature_tube_distance_with(&c, &p, 2048, delta).unwrap();
        assert!(a.admissible && b.admissible);
        assert!((a.refined_distance - b.refined_distance).abs() < 1e-6);
        // same seed, same answer
        assert_eq!(find_admissible_center(&c, 200, delta).unwrap(), p);
    }

    #[test]
    fn regularization() {
        let c = preset("twisted_unknot", &[("amplitude", 1.0)]);
        assert!(!frenet_scan(&c, 256).unwrap().nowhere_vanishing());
        let r = regularize_curvature(&c, 100.0).unwrap();
        assert!(frenet_scan(&r, 256).unwrap().nowhere_vanishing());

        let deviation = |f: f64| {
            let r = regularize_curvature(&c, f).unwrap();
            c.grid(256)
                .iter()
                .map(|&u| (r.position(u) - c.position(u)).norm())
                .fold(0.0, f64::max)
        };
        let devs: Vec<f64> = [10.0, 100.0, 1000.0].iter().map(|&f| deviation(f)).collect();
        assert!(devs[0] > devs[1] && devs[1] > devs[2], "{devs:?}");

        let q = QuadratureConfig::default();
        let w0 = writhe(&c, &q).unwrap().value;
        let w1 = writhe(&regularize_curvature(&c, 1000.0).unwrap(), &q).unwrap().value;
        assert!((w0 - w1).abs() < 1e-3, "{w0} vs {w1}");
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(16))]
        #[test]
        fn tube_distance_shrinks_on_nested_grids(
            x in -4.0f64..4.0, y in -4.0f64..4.0, z in -2.0f64..2.0,
        ) {
            let c = make_preset("trefoil", &BTreeMap::new()).unwrap();
            let p = Vec3::new(x, y, z);
            let mut last = f64::INFINITY;
            for n in [64, 128, 256, 512] {
                let d = curvature_tube_distance(&c, &p, n).unwrap().distance;
                proptest::prop_assert!(d <= last);
                last = d;
            }
        }
    }
}
