//! One-dimensional analogues of the construction, used as demos and
//! cross-checks of the projection idea.
//!
//! For the circle in the Euclidean plane, intersecting the tangent
//! half-planes over a finite cyclic subgroup yields a regular polygon whose
//! faces project onto a tiling of the circle by equal arcs. For the
//! hyperbola in the Minkowski plane the same naive intersection collapses
//! to a point; taking the union over the group of the per-coset
//! intersections instead produces an unbounded polygon whose boundary over
//! the cone projects onto a tiling of the hyperbola.

use crate::error::{Error, Result};

/// Euclidean or Minkowski pairing of plane points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlaneForm {
    Euclidean,
    Minkowski,
}

impl PlaneForm {
    pub fn dot(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        match self {
            PlaneForm::Euclidean => a[0] * b[0] + a[1] * b[1],
            PlaneForm::Minkowski => a[0] * b[0] - a[1] * b[1],
        }
    }
}

/// Circle construction: the tangent polygon of the order-m subgroup.
#[derive(Clone, Debug)]
pub struct CircleDomain {
    /// Polygon vertices, in rotation order.
    pub vertices: Vec<[f64; 2]>,
    /// Projected faces: (midpoint angle, arc length).
    pub arcs: Vec<(f64, f64)>,
}

/// Intersection of the half-planes `<a, g> <= 1` over the cyclic subgroup
/// generated by the rotation through `2 pi / m`: a regular m-gon with
/// vertex radius `1 / cos(pi / m)` whose faces project onto arcs of length
/// `2 pi / m`.
pub fn circle_domain(m: u32) -> Result<CircleDomain> {
    if m < 3 {
        return Err(Error::UnboundedPolygon(m));
    }
    let step = 2.0 * std::f64::consts::PI / m as f64;
    let radius = 1.0 / (step / 2.0).cos();
    let vertices = (0..m)
        .map(|j| {
            let phi = (j as f64 + 0.5) * step;
            [radius * phi.cos(), radius * phi.sin()]
        })
        .collect();
    let arcs = (0..m).map(|j| (j as f64 * step, step)).collect();
    Ok(CircleDomain { vertices, arcs })
}

/// Hyperbola point `z(t, eps) = eps (sinh t, cosh t)`.
pub fn hyperbola_point(t: f64, eps: f64) -> [f64; 2] {
    [eps * t.sinh(), eps * t.cosh()]
}

/// One face of the hyperbola construction.
#[derive(Clone, Debug)]
pub struct HyperbolaFace {
    /// Branch index: the face sits on the boundary of the k-th strip.
    pub k: i64,
    /// Upper (+1) or lower (-1) branch of the cone.
    pub eps: f64,
    /// Endpoints of the segment in the plane.
    pub endpoints: [[f64; 2]; 2],
    /// Parameter interval of the projection onto the hyperbola.
    pub projected: (f64, f64),
}

#[derive(Clone, Debug)]
pub struct HyperbolaDomain {
    pub spacing: f64,
    pub faces: Vec<HyperbolaFace>,
}

/// Union-of-strips construction for the subgroup generated by `z(d, 1)` and
/// `z(d, -1)`: the boundary faces over the cone for `|k| <= branches - 1`
/// (faces for the outermost strips are clipped by truncation and skipped).
/// Each face projects onto a parameter segment of length `d`.
pub fn hyperbola_domain(d: f64, branches: i64) -> Result<HyperbolaDomain> {
    if !(d > 0.0) {
        return Err(Error::InvalidCutoff(d));
    }
    if branches < 2 {
        return Err(Error::UnboundedPolygon(branches.max(0) as u32));
    }
    // The k-th strip is the boost of {|y| <= 1}; on y = 1 it covers
    // x in [tanh((k-1/2) d) .. ] centered at tanh-coordinates of k d. Its
    // face over the upper cone is the segment between the boosted images of
    // +-tanh(d/2).
    let half = (d / 2.0).tanh();
    let mut faces = Vec::new();
    for k in -(branches - 1)..=(branches - 1) {
        for eps in [1.0, -1.0] {
            let boost = |x: f64| -> [f64; 2] {
                // Boost by k*d applied to (x, 1), sign-flipped for the lower
                // branch.
                let kd = (k as f64) * d;
                let (s, c) = (kd.sinh(), kd.cosh());
                [eps * (c * x + s), eps * (s * x + c)]
            };
            faces.push(HyperbolaFace {
                k,
                eps,
                endpoints: [boost(-half), boost(half)],
                projected: (k as f64 * d - d / 2.0, k as f64 * d + d / 2.0),
            });
        }
    }
    Ok(HyperbolaDomain { spacing: d, faces })
}

/// Radius of the truncated naive intersection of all tangent half-planes
/// `<a, g> >= -1` over `|k| <= branches`: the largest coordinate norm over
/// the clipped polygon. Tends to zero as the truncation grows, showing the
/// naive construction collapses to the origin.
pub fn hyperbola_naive_intersection_radius(d: f64, branches: i64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::InvalidCutoff(d));
    }
    // Clip a big box by every half-plane <a, z(kd, eps)> >= -1 in the
    // Minkowski pairing.
    let form = PlaneForm::Minkowski;
    let big = 1e3;
    let mut poly: Vec<[f64; 2]> = vec![[-big, -big], [big, -big], [big, big], [-big, big]];
    for k in -branches..=branches {
        for eps in [1.0, -1.0] {
            let g = hyperbola_point(k as f64 * d, eps);
            // Keep region form.dot(a, g) >= -1.
            let mut out: Vec<[f64; 2]> = Vec::new();
            let n = poly.len();
            for i in 0..n {
                let cur = poly[i];
                let prev = poly[(i + n - 1) % n];
                let fc = form.dot(cur, g) + 1.0;
                let fp = form.dot(prev, g) + 1.0;
                if (fc >= 0.0) != (fp >= 0.0) {
                    let t = fp / (fp - fc);
                    out.push([
                        prev[0] + t * (cur[0] - prev[0]),
                        prev[1] + t * (cur[1] - prev[1]),
                    ]);
                }
                if fc >= 0.0 {
                    out.push(cur);
                }
            }
            poly = out;
            if poly.is_empty() {
                return Ok(0.0);
            }
        }
    }
    Ok(poly
        .iter()
        .map(|p| (p[0] * p[0] + p[1] * p[1]).sqrt())
        .fold(0.0f64, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn hexagon_example() {
        let domain = circle_domain(6).unwrap();
        assert_eq!(domain.vertices.len(), 6);
        let r = 2.0 / 3f64.sqrt();
        for v in &domain.vertices {
            assert!(((v[0] * v[0] + v[1] * v[1]).sqrt() - r).abs() < 1e-12);
        }
        for (_, len) in &domain.arcs {
            assert!((len - PI / 3.0).abs() < 1e-12);
        }
        // Arcs tile the circle.
        let total: f64 = domain.arcs.iter().map(|(_, l)| l).sum();
        assert!((total - 2.0 * PI).abs() < 1e-12);

        let square = circle_domain(4).unwrap();
        for v in &square.vertices {
            assert!(((v[0] * v[0] + v[1] * v[1]).sqrt() - 2f64.sqrt()).abs() < 1e-12);
        }

        assert!(matches!(circle_domain(2), Err(Error::UnboundedPolygon(2))));
    }

    #[test]
    fn polygon_edges_are_tangent() {
        let domain = circle_domain(7).unwrap();
        for j in 0..7 {
            let a = domain.vertices[j];
            let b = domain.vertices[(j + 1) % 7];
            let d = [b[0] - a[0], b[1] - a[1]];
            let dist = (a[0] * d[1] - a[1] * d[0]).abs() / (d[0] * d[0] + d[1] * d[1]).sqrt();
            assert!((dist - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hyperbola_faces_project_to_equal_segments() {
        let d = 0.8;
        let domain = hyperbola_domain(d, 5).unwrap();
        for face in &domain.faces {
            let (lo, hi) = face.projected;
            assert!((hi - lo - d).abs() < 1e-12);
            // Endpoints project onto the stated parameter interval ends:
            // a = eps (sinh s, cosh s) has s = atanh(x/y).
            for (end, s_expected) in face.endpoints.iter().zip([lo, hi]) {
                let s = (end[0] / end[1]).atanh();
                assert!((s - s_expected).abs() < 1e-12);
                // And lies on the boosted unit-distance line: <a, g> = -1
                // with g the strip's hyperbola point... via the Minkowski
                // form.
                let g = hyperbola_point(face.k as f64 * d, face.eps);
                assert!((PlaneForm::Minkowski.dot(*end, g) + 1.0).abs() < 1e-9);
            }
        }
        // The face of the 0th strip has midpoint z(0, +1) = (0, 1).
        let center = domain
            .faces
            .iter()
            .find(|f| f.k == 0 && f.eps > 0.0)
            .unwrap();
        let mid = [
            (center.endpoints[0][0] + center.endpoints[1][0]) / 2.0,
            (center.endpoints[0][1] + center.endpoints[1][1]) / 2.0,
        ];
        assert!(mid[0].abs() < 1e-12);
        // Midpoint of the chord sits slightly inside the hyperbola point
        // (0, 1) radially; its projection parameter is 0.
        assert!((mid[0] / mid[1]).abs() < 1e-12);
    }

    #[test]
    fn faces_are_group_translates() {
        // The k-th face is the boost image of the 0th: equivariance of the
        // construction under z(d, 1).
        let d = 0.6;
        let domain = hyperbola_domain(d, 4).unwrap();
        let f0 = domain.faces.iter().find(|f| f.k == 0 && f.eps > 0.0).unwrap();
        let f1 = domain.faces.iter().find(|f| f.k == 1 && f.eps > 0.0).unwrap();
        let (s, c) = (d.sinh(), d.cosh());
        for (a, b) in f0.endpoints.iter().zip(f1.endpoints.iter()) {
            let boosted = [c * a[0] + s * a[1], s * a[0] + c * a[1]];
            assert!((boosted[0] - b[0]).abs() + (boosted[1] - b[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn naive_intersection_collapses() {
        let d = 0.7;
        let r10 = hyperbola_naive_intersection_radius(d, 10).unwrap();
        let r20 = hyperbola_naive_intersection_radius(d, 20).unwrap();
        let r40 = hyperbola_naive_intersection_radius(d, 40).unwrap();
        assert!(r20 < r10);
        assert!(r40 < r20);
        // cosh(40 * 0.7) is astronomically large; only the origin survives.
        assert!(r40 < 1e-8, "naive intersection keeps radius {r40}");
    }
}
