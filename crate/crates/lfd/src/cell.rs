//! Convex cells of the chart arrangement: bounded intersections of affine
//! half-spaces in R^3 with vertex enumeration, splitting, facet extraction
//! and volume.
//!
//! Vertices are recomputed from plane triples after every split and snapped
//! at `SNAP_TOL`; planes without supporting vertices are dropped so cells
//! stay lean through long split chains. Cells thinner than `MIN_VOLUME` are
//! treated as empty, which removes lower-dimensional slivers.

use crate::num::SNAP_TOL;

/// Minimum volume for a cell to count as three-dimensional.
pub const MIN_VOLUME: f64 = 1e-12;
/// Side tolerance for classifying vertices against a plane.
const SIDE_TOL: f64 = 1e-9;

/// Origin tag for a plane of the arrangement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlaneLabel {
    /// Artificial bounding plane; must not survive into the final boundary.
    Box,
    /// Wedge plane `t = sign * tan(theta/2)`.
    Wedge(i8),
    /// Tangent-face plane of the cutter `(site, window index)`.
    Cutter { site: usize, m: i64 },
}

/// Closed half-space `n . c <= d` with unit normal.
#[derive(Clone, Copy, Debug)]
pub struct Plane {
    pub n: [f64; 3],
    pub d: f64,
    pub label: PlaneLabel,
}

impl Plane {
    pub fn new(n: [f64; 3], d: f64, label: PlaneLabel) -> Self {
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        debug_assert!(len > 1e-12, "degenerate plane normal");
        Self {
            n: [n[0] / len, n[1] / len, n[2] / len],
            d: d / len,
            label,
        }
    }

    pub fn flipped(&self) -> Self {
        Self {
            n: [-self.n[0], -self.n[1], -self.n[2]],
            d: -self.d,
            label: self.label,
        }
    }

    /// Signed excess `n . c - d`; negative inside.
    pub fn side(&self, c: [f64; 3]) -> f64 {
        self.n[0] * c[0] + self.n[1] * c[1] + self.n[2] * c[2] - self.d
    }
}

pub fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = sub(a, b);
    dot(d, d).sqrt()
}

/// Solves the 3x3 system n_i . x = d_i by Cramer's rule.
fn plane_triple_point(p: &Plane, q: &Plane, r: &Plane) -> Option<[f64; 3]> {
    let det = dot(p.n, cross(q.n, r.n));
    if det.abs() < 1e-10 {
        return None;
    }
    let nx = cross(q.n, r.n);
    let ny = cross(r.n, p.n);
    let nz = cross(p.n, q.n);
    Some([
        (p.d * nx[0] + q.d * ny[0] + r.d * nz[0]) / det,
        (p.d * nx[1] + q.d * ny[1] + r.d * nz[1]) / det,
        (p.d * nx[2] + q.d * ny[2] + r.d * nz[2]) / det,
    ])
}

fn plane_basis(n: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let axis = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let u = cross(n, axis);
    let ul = dot(u, u).sqrt();
    let u = [u[0] / ul, u[1] / ul, u[2] / ul];
    (u, cross(n, u))
}

/// One facet of a cell: the supporting plane and the polygon on it, ordered
/// counterclockwise seen from outside the cell.
#[derive(Clone, Debug)]
pub struct Facet {
    pub plane: Plane,
    pub polygon: Vec<[f64; 3]>,
    pub area: f64,
}

impl Facet {
    pub fn centroid(&self) -> [f64; 3] {
        let n = self.polygon.len() as f64;
        let mut c = [0.0; 3];
        for v in &self.polygon {
            c = [c[0] + v[0], c[1] + v[1], c[2] + v[2]];
        }
        [c[0] / n, c[1] / n, c[2] / n]
    }
}

/// Bounded convex cell with enumerated vertices.
#[derive(Clone, Debug)]
pub struct Cell {
    planes: Vec<Plane>,
    vertices: Vec<[f64; 3]>,
}

impl Cell {
    /// Builds the cell, returning `None` when it is empty or degenerate.
    pub fn from_planes(planes: Vec<Plane>) -> Option<Cell> {
        let vertices = enumerate_vertices(&planes);
        Cell::from_parts(planes, vertices)
    }

    fn from_parts(planes: Vec<Plane>, mut vertices: Vec<[f64; 3]>) -> Option<Cell> {
        let mut kept: Vec<[f64; 3]> = Vec::with_capacity(vertices.len());
        for v in vertices.drain(..) {
            if !kept.iter().any(|u| dist(*u, v) < SNAP_TOL) {
                kept.push(v);
            }
        }
        if kept.len() < 4 {
            return None;
        }
        let mut cell = Cell { planes, vertices: kept };
        if cell.volume() < MIN_VOLUME {
            return None;
        }
        cell.drop_redundant_planes();
        Some(cell)
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn planes(&self) -> &[Plane] {
        &self.planes
    }

    pub fn centroid(&self) -> [f64; 3] {
        let n = self.vertices.len() as f64;
        let mut c = [0.0; 3];
        for v in &self.vertices {
            c = [c[0] + v[0], c[1] + v[1], c[2] + v[2]];
        }
        [c[0] / n, c[1] / n, c[2] / n]
    }

    pub fn contains(&self, p: [f64; 3], tol: f64) -> bool {
        self.planes.iter().all(|pl| pl.side(p) <= tol)
    }

    /// Splits along `plane`: (inside `n.c <= d`, outside). Either side may
    /// be absent; the cutting plane is appended to both parts.
    ///
    /// Vertices are carried over incrementally: surviving old vertices plus
    /// the section of the cutting plane with the old plane pairs.
    pub fn split(&self, plane: &Plane) -> (Option<Cell>, Option<Cell>) {
        let sides: Vec<f64> = self.vertices.iter().map(|v| plane.side(*v)).collect();
        let max_side = sides.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min_side = sides.iter().cloned().fold(f64::INFINITY, f64::min);
        if max_side <= SIDE_TOL {
            return (Some(self.clone()), None);
        }
        if min_side >= -SIDE_TOL {
            return (None, Some(self.clone()));
        }
        let n = self.planes.len();
        let mut cut: Vec<[f64; 3]> = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let Some(p) = plane_triple_point(plane, &self.planes[i], &self.planes[j]) else {
                    continue;
                };
                if self.planes.iter().any(|pl| pl.side(p) > SIDE_TOL) {
                    continue;
                }
                if cut.iter().any(|v| dist(*v, p) < SNAP_TOL) {
                    continue;
                }
                cut.push(p);
            }
        }
        let mut inside_planes = self.planes.clone();
        inside_planes.push(*plane);
        let mut outside_planes = self.planes.clone();
        outside_planes.push(plane.flipped());
        let inside_verts: Vec<[f64; 3]> = self
            .vertices
            .iter()
            .zip(&sides)
            .filter(|(_, s)| **s <= SIDE_TOL)
            .map(|(v, _)| *v)
            .chain(cut.iter().copied())
            .collect();
        let outside_verts: Vec<[f64; 3]> = self
            .vertices
            .iter()
            .zip(&sides)
            .filter(|(_, s)| **s >= -SIDE_TOL)
            .map(|(v, _)| *v)
            .chain(cut)
            .collect();
        let inside = Cell::from_parts(inside_planes, inside_verts);
        let outside = Cell::from_parts(outside_planes, outside_verts);
        // A sliver side is not cut away: the whole cell goes to the other
        // side, so that dropped volume never leaves phantom gaps behind.
        match (inside, outside) {
            (Some(i), Some(o)) => (Some(i), Some(o)),
            (Some(_), None) => (Some(self.clone()), None),
            (None, Some(_)) => (None, Some(self.clone())),
            (None, None) => {
                // Both sides degenerate can only happen for a cell at the
                // volume floor; keep it on the side of its centroid.
                if plane.side(self.centroid()) <= 0.0 {
                    (Some(self.clone()), None)
                } else {
                    (None, Some(self.clone()))
                }
            }
        }
    }

    fn drop_redundant_planes(&mut self) {
        let vertices = std::mem::take(&mut self.vertices);
        self.planes.retain(|pl| {
            vertices.iter().filter(|v| pl.side(**v).abs() <= 10.0 * SIDE_TOL).count() >= 3
        });
        self.vertices = vertices;
    }

    /// Facet polygons, one per plane supporting at least three vertices with
    /// positive area.
    pub fn facets(&self) -> Vec<Facet> {
        let mut out = Vec::new();
        for pl in &self.planes {
            let on_plane: Vec<[f64; 3]> = self
                .vertices
                .iter()
                .copied()
                .filter(|v| pl.side(*v).abs() <= 10.0 * SIDE_TOL)
                .collect();
            if on_plane.len() < 3 {
                continue;
            }
            let (u, v) = plane_basis(pl.n);
            let mut fc = [0.0; 3];
            for p in &on_plane {
                fc = [fc[0] + p[0], fc[1] + p[1], fc[2] + p[2]];
            }
            let n = on_plane.len() as f64;
            let fc = [fc[0] / n, fc[1] / n, fc[2] / n];
            let mut poly = on_plane;
            poly.sort_by(|a, b| {
                let pa = sub(*a, fc);
                let pb = sub(*b, fc);
                dot(pa, v).atan2(dot(pa, u)).total_cmp(&dot(pb, v).atan2(dot(pb, u)))
            });
            let mut area_vec = [0.0; 3];
            for i in 1..poly.len() - 1 {
                let a = sub(poly[i], poly[0]);
                let b = sub(poly[i + 1], poly[0]);
                let c = cross(a, b);
                area_vec = [area_vec[0] + c[0], area_vec[1] + c[1], area_vec[2] + c[2]];
            }
            // Counterclockwise seen from outside the cell.
            if dot(area_vec, pl.n) < 0.0 {
                poly.reverse();
                area_vec = [-area_vec[0], -area_vec[1], -area_vec[2]];
            }
            let area = 0.5 * dot(area_vec, area_vec).sqrt();
            if area < 1e-12 {
                continue;
            }
            out.push(Facet { plane: *pl, polygon: poly, area });
        }
        out
    }

    /// Euclidean volume via fans from the centroid over the facets.
    pub fn volume(&self) -> f64 {
        let c = self.centroid();
        let mut vol = 0.0;
        for f in self.facets_raw() {
            for i in 1..f.len() - 1 {
                let a = sub(f[0], c);
                let b = sub(f[i], c);
                let d = sub(f[i + 1], c);
                vol += dot(a, cross(b, d)).abs() / 6.0;
            }
        }
        vol
    }

    // Volume is needed while the cell may still be degenerate, so gather
    // plane polygons without the area/orientation pass.
    fn facets_raw(&self) -> Vec<Vec<[f64; 3]>> {
        let mut out = Vec::new();
        for pl in &self.planes {
            let on_plane: Vec<[f64; 3]> = self
                .vertices
                .iter()
                .copied()
                .filter(|v| pl.side(*v).abs() <= 10.0 * SIDE_TOL)
                .collect();
            if on_plane.len() < 3 {
                continue;
            }
            let (u, v) = plane_basis(pl.n);
            let mut fc = [0.0; 3];
            for p in &on_plane {
                fc = [fc[0] + p[0], fc[1] + p[1], fc[2] + p[2]];
            }
            let n = on_plane.len() as f64;
            let fc = [fc[0] / n, fc[1] / n, fc[2] / n];
            let mut poly = on_plane;
            poly.sort_by(|a, b| {
                let pa = sub(*a, fc);
                let pb = sub(*b, fc);
                dot(pa, v).atan2(dot(pa, u)).total_cmp(&dot(pb, v).atan2(dot(pb, u)))
            });
            out.push(poly);
        }
        out
    }
}

fn enumerate_vertices(planes: &[Plane]) -> Vec<[f64; 3]> {
    let n = planes.len();
    let mut vertices: Vec<[f64; 3]> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let Some(p) = plane_triple_point(&planes[i], &planes[j], &planes[k]) else {
                    continue;
                };
                if planes.iter().any(|pl| pl.side(p) > SIDE_TOL) {
                    continue;
                }
                if vertices.iter().any(|v| dist(*v, p) < SNAP_TOL) {
                    continue;
                }
                vertices.push(p);
            }
        }
    }
    vertices
}

/// Distance from a point to a convex polygon embedded in 3-space.
pub fn point_polygon_distance(p: [f64; 3], polygon: &[[f64; 3]], normal: [f64; 3]) -> f64 {
    let a0 = polygon[0];
    let off = dot(sub(p, a0), normal);
    let proj = [p[0] - off * normal[0], p[1] - off * normal[1], p[2] - off * normal[2]];
    let n = polygon.len();
    let mut side_sign = 0.0f64;
    let mut inside = true;
    for i in 0..n {
        let (a, b) = (polygon[i], polygon[(i + 1) % n]);
        let edge = sub(b, a);
        let s = dot(sub(proj, a), cross(normal, edge));
        if i == 0 {
            side_sign = s.signum();
        } else if s.signum() != side_sign && s.abs() > 1e-15 {
            inside = false;
            break;
        }
    }
    if inside {
        return off.abs();
    }
    let mut best = f64::INFINITY;
    for i in 0..n {
        let (a, b) = (polygon[i], polygon[(i + 1) % n]);
        let e = sub(b, a);
        let t = (dot(sub(p, a), e) / dot(e, e)).clamp(0.0, 1.0);
        let q = [a[0] + t * e[0], a[1] + t * e[1], a[2] + t * e[2]];
        best = best.min(dist(p, q));
    }
    best
}

/// Intersection area of two convex polygons on a common plane
/// (Sutherland-Hodgman clip in plane coordinates).
pub fn coplanar_overlap_area(a: &[[f64; 3]], b: &[[f64; 3]], normal: [f64; 3]) -> f64 {
    let (u, v) = plane_basis(normal);
    let to2d = |p: [f64; 3]| -> (f64, f64) { (dot(p, u), dot(p, v)) };
    let mut subject: Vec<(f64, f64)> = a.iter().map(|&p| to2d(p)).collect();
    let clipper: Vec<(f64, f64)> = b.iter().map(|&p| to2d(p)).collect();
    let signed_area = |poly: &[(f64, f64)]| -> f64 {
        let mut s = 0.0;
        for i in 0..poly.len() {
            let (x1, y1) = poly[i];
            let (x2, y2) = poly[(i + 1) % poly.len()];
            s += x1 * y2 - x2 * y1;
        }
        0.5 * s
    };
    let orient = if signed_area(&clipper) < 0.0 { -1.0 } else { 1.0 };
    let m = clipper.len();
    for i in 0..m {
        if subject.len() < 3 {
            return 0.0;
        }
        let (ax, ay) = clipper[i];
        let (bx, by) = clipper[(i + 1) % m];
        let excess = |p: (f64, f64)| orient * ((bx - ax) * (p.1 - ay) - (by - ay) * (p.0 - ax));
        let mut output = Vec::new();
        for j in 0..subject.len() {
            let cur = subject[j];
            let prev = subject[(j + subject.len() - 1) % subject.len()];
            let (fc, fp) = (excess(cur), excess(prev));
            if (fc >= 0.0) != (fp >= 0.0) {
                let t = fp / (fp - fc);
                output.push((prev.0 + t * (cur.0 - prev.0), prev.1 + t * (cur.1 - prev.1)));
            }
            if fc >= 0.0 {
                output.push(cur);
            }
        }
        subject = output;
    }
    if subject.len() < 3 {
        0.0
    } else {
        signed_area(&subject).abs()
    }
}
