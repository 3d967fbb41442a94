//! Carves the fundamental polyhedron in the flat chart of the identity
//! tangent face and verifies its properties.
//!
//! The region to carve is the wedge slab `|t| <= tan(theta/2)` minus the
//! interiors of the translated prisms. Each prism contributes a union of
//! inner half-spaces over its constraint window; a chart point survives a
//! prism iff it lies in at least one of them. Cells are split by the affine
//! cutter planes; the component-of-the-preimage condition (the argument
//! window) is decided per convex piece at an interior probe, which is exact
//! because a convex set inside the affine half-space cannot straddle two
//! argument branches: between branches the defining inequality fails.
//!
//! The carve is certified afterwards: every orbit point dropped by the
//! cutoff has reach bound below the minimal margin `|w| - |z|` of the carved
//! region, so no dropped prism could have cut it.

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use crate::cell::{coplanar_overlap_area, dist, point_polygon_distance, Cell, Facet, Plane, PlaneLabel};
use crate::cover::GroupElement;
use crate::error::{Error, Result};
use crate::halfspace::{chart_from, chart_to, ChartPoint, Region};
use crate::num::{dist_to_multiple, SplitMix64, GEO_TOL, SNAP_TOL};
use crate::orbit::OrbitAtlas;
use crate::triangle::LiftedGroup;

/// Outward offset used to probe whether a facet borders the exterior.
const BOUNDARY_PROBE: f64 = 1e-5;

/// Identifier of a boundary face of the carved domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FaceLabel {
    /// Wedge face at `t = sign * tan(theta/2)`; cut by the wedge rotation
    /// to the power `-sign`.
    Wedge(i8),
    /// Face cut by the element `rep(site) * rd^m`.
    Cutter { site: usize, m: i64 },
}

impl FaceLabel {
    /// The group element whose tangent face carries this boundary face.
    pub fn element(&self, atlas: &OrbitAtlas) -> GroupElement {
        let theta = atlas.wedge_angle;
        match *self {
            FaceLabel::Wedge(sign) => {
                GroupElement::rotation_about_origin(-2.0 * sign as f64 * theta)
            }
            FaceLabel::Cutter { site, m } => {
                atlas.sites[site].rep * GroupElement::rotation_about_origin(2.0 * m as f64 * theta)
            }
        }
    }

    pub fn word(&self, atlas: &OrbitAtlas) -> String {
        match *self {
            FaceLabel::Wedge(sign) => format!("rd^{}", -sign),
            FaceLabel::Cutter { site, m } => {
                let w = &atlas.sites[site].word;
                if m == 0 {
                    w.clone()
                } else if w == "e" {
                    format!("rd^{m}")
                } else {
                    format!("{w}*rd^{m}")
                }
            }
        }
    }
}

/// One affine cutter plane with its group element.
#[derive(Clone, Debug)]
pub struct Cutter {
    pub site: usize,
    pub m: i64,
    pub element: GroupElement,
    pub plane: Plane,
}

/// The cutter planes of the arrangement: the two wedge planes from the base
/// prism plus one plane per (site, window index).
#[derive(Clone, Debug)]
pub struct CutterSet {
    pub wedge_top: Plane,
    pub wedge_bottom: Plane,
    pub cutters: Vec<Cutter>,
    /// Window half-width used per site.
    pub window: i64,
}

/// Affine trace of the inner half-space of `g` on the chart:
/// `<proj(g), (z, 1 + i t)> <= -1`.
fn cutter_plane(g: &GroupElement, label: PlaneLabel) -> Plane {
    let p = g.project();
    Plane::new([p.z.re, p.z.im, -p.w.im], p.w.re - 1.0, label)
}

/// Builds the cutter list for every non-base site. The per-site window is
/// centered so every index whose argument branch can open over the slab is
/// present.
pub fn cutter_set(atlas: &OrbitAtlas) -> Result<CutterSet> {
    if atlas.is_empty() {
        return Err(Error::EmptyAtlas);
    }
    let theta = atlas.wedge_angle;
    let tan_half = (0.5 * theta).tan();
    let half_width = ((std::f64::consts::PI + 0.5 * theta) / theta).ceil() as i64 + 1;
    let mut cutters = Vec::new();
    for (site_idx, site) in atlas.sites.iter().enumerate().skip(1) {
        let center = (site.rep.alpha() / theta).round() as i64;
        for m in center - half_width..=center + half_width {
            let element = site.rep * GroupElement::rotation_about_origin(2.0 * m as f64 * theta);
            let plane = cutter_plane(&element, PlaneLabel::Cutter { site: site_idx, m });
            cutters.push(Cutter { site: site_idx, m, element, plane });
        }
    }
    Ok(CutterSet {
        wedge_top: Plane::new([0.0, 0.0, 1.0], tan_half, PlaneLabel::Wedge(1)),
        wedge_bottom: Plane::new([0.0, 0.0, -1.0], tan_half, PlaneLabel::Wedge(-1)),
        cutters,
        window: half_width,
    })
}

/// One boundary facet of the carved complex.
#[derive(Clone, Debug)]
pub struct BoundaryFacet {
    pub label: FaceLabel,
    pub cell: usize,
    pub polygon: Vec<[f64; 3]>,
    pub outward: [f64; 3],
    pub area: f64,
}

/// The carved fundamental polyhedron: a finite union of convex chart cells
/// with labeled boundary.
#[derive(Clone, Debug)]
pub struct DomainComplex {
    pub cells: Vec<Cell>,
    pub boundary: Vec<BoundaryFacet>,
    pub wedge_angle: f64,
    /// Certified lower bound for `|w| - |z|` over the carved region.
    pub margin: f64,
    /// Sites whose prisms were actually carved against (the rest were
    /// excluded by the reach bound).
    pub active_sites: usize,
    pub cutter_planes: usize,
}

impl DomainComplex {
    /// Euclidean volume of the region in chart coordinates.
    pub fn volume(&self) -> f64 {
        self.cells.iter().map(Cell::volume).sum()
    }

    /// Group-invariant volume: the Lorentz volume of the radial projection
    /// of the region onto the covered quadric. In quadric coordinates
    /// `(z, alpha)` the Lorentz volume form is exactly Lebesgue, and the
    /// projection from the chart has Jacobian `(1 + t^2 - |z|^2)^{-2}`, so
    /// this integrates that weight over the cells. Fundamental domains of
    /// the same group agree in this volume whatever the base point.
    pub fn invariant_volume(&self) -> f64 {
        let weight = |p: [f64; 3]| -> f64 {
            let lambda2 = 1.0 + p[2] * p[2] - p[0] * p[0] - p[1] * p[1];
            1.0 / (lambda2 * lambda2)
        };
        let mut total = 0.0;
        for cell in &self.cells {
            let c = cell.centroid();
            for f in cell.facets() {
                for i in 1..f.polygon.len() - 1 {
                    total += integrate_tet(c, f.polygon[0], f.polygon[i], f.polygon[i + 1], &weight, 24);
                }
            }
        }
        total
    }

    pub fn vertex_list(&self) -> Vec<[f64; 3]> {
        let mut out: Vec<[f64; 3]> = Vec::new();
        for cell in &self.cells {
            for v in cell.vertices() {
                if !out.iter().any(|u| dist(*u, *v) < SNAP_TOL) {
                    out.push(*v);
                }
            }
        }
        out
    }

    pub fn contains_point(&self, p: [f64; 3], tol: f64) -> bool {
        self.cells.iter().any(|c| c.contains(p, tol))
    }

    /// Number of connected components (cells glued along overlapping
    /// facets). Candidate pairs come from a bucket map over supporting
    /// planes: only facets on the same plane with opposite orientation can
    /// glue.
    pub fn component_count(&self) -> usize {
        let n = self.cells.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        // Key a plane by its quantized unoriented normal and offset.
        let key = |p: &Plane| -> PlaneKey {
            let sign = if p.n[0].abs() > 1e-9 {
                p.n[0].signum()
            } else if p.n[1].abs() > 1e-9 {
                p.n[1].signum()
            } else {
                p.n[2].signum()
            };
            let q = |v: f64| (sign * v / 1e-7).round() as i64;
            (q(p.n[0]), q(p.n[1]), q(p.n[2]), q(p.d))
        };
        type PlaneKey = (i64, i64, i64, i64);
        let mut buckets: BTreeMap<PlaneKey, Vec<(usize, Facet)>> = BTreeMap::new();
        for (i, cell) in self.cells.iter().enumerate() {
            for f in cell.facets() {
                buckets.entry(key(&f.plane)).or_default().push((i, f));
            }
        }
        for group in buckets.values() {
            for (a, fa) in group {
                for (b, fb) in group {
                    if a >= b || crate::cell::dot(fa.plane.n, fb.plane.n) > 0.0 {
                        continue;
                    }
                    if coplanar_overlap_area(&fa.polygon, &fb.polygon, fa.plane.n) > 1e-10 {
                        let (ra, rb) = (find(&mut parent, *a), find(&mut parent, *b));
                        parent[ra] = rb;
                    }
                }
            }
        }
        let mut roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }
}

/// Leaf size below which the quadrature stops subdividing; the degree-2
/// rule is far beyond percent accuracy at this scale.
const QUAD_LEAF: f64 = 0.02;

/// Integral of `weight` over a tetrahedron by longest-edge bisection down to
/// leaf size (with a recursion cap), and a degree-2 four-point rule on the
/// leaves.
fn integrate_tet(
    a: [f64; 3],
    b: [f64; 3],
    c: [f64; 3],
    d: [f64; 3],
    weight: &dyn Fn([f64; 3]) -> f64,
    depth: u32,
) -> f64 {
    // Bisect the longest edge while it exceeds the leaf size.
    let verts = [a, b, c, d];
    let mut best = (0usize, 1usize);
    let mut best_len = -1.0f64;
    for i in 0..4 {
        for j in i + 1..4 {
            let l = dist(verts[i], verts[j]);
            if l > best_len {
                best_len = l;
                best = (i, j);
            }
        }
    }
    if depth > 0 && best_len > QUAD_LEAF {
        let (i, j) = best;
        let mid = [
            (verts[i][0] + verts[j][0]) / 2.0,
            (verts[i][1] + verts[j][1]) / 2.0,
            (verts[i][2] + verts[j][2]) / 2.0,
        ];
        let mut first = verts;
        first[j] = mid;
        let mut second = verts;
        second[i] = mid;
        return integrate_tet(first[0], first[1], first[2], first[3], weight, depth - 1)
            + integrate_tet(second[0], second[1], second[2], second[3], weight, depth - 1);
    }
    let vol = {
        let ab = crate::cell::sub(b, a);
        let ac = crate::cell::sub(c, a);
        let ad = crate::cell::sub(d, a);
        crate::cell::dot(ab, crate::cell::cross(ac, ad)).abs() / 6.0
    };
    // Degree-2 rule: four points at barycentric (alpha, beta, beta, beta).
    let alpha = 0.585_410_196_624_968_5;
    let beta = 0.138_196_601_125_010_5;
    let verts = [a, b, c, d];
    let mut sum = 0.0;
    for i in 0..4 {
        let mut p = [0.0; 3];
        for (j, v) in verts.iter().enumerate() {
            let w = if i == j { alpha } else { beta };
            p = [p[0] + w * v[0], p[1] + w * v[1], p[2] + w * v[2]];
        }
        sum += weight(p);
    }
    vol * sum / 4.0
}

fn in_cone(p: [f64; 3]) -> bool {
    p[0] * p[0] + p[1] * p[1] < 1.0 + p[2] * p[2] - 1e-12
}

/// An interior probe point of the cell lying inside the cone.
///
/// First the centroid; failing that, the fiber of the cell over the point
/// of its axis projection closest to the axis — if the cell meets the cone
/// at all, that fiber reaches it except in contrived waist-straddling
/// configurations, which surface later as labeling errors rather than
/// silent defects.
fn cone_probe(cell: &Cell) -> Option<[f64; 3]> {
    let c = cell.centroid();
    if in_cone(c) {
        return Some(c);
    }
    let projected: Vec<(f64, f64)> = cell.vertices().iter().map(|v| (v[0], v[1])).collect();
    let hull = hull2d(&projected);
    let q = closest_to_origin(&hull);
    // Pull slightly toward the projected centroid to stay off the boundary.
    let q = (q.0 + 1e-6 * (c[0] - q.0), q.1 + 1e-6 * (c[1] - q.1));
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for pl in cell.planes() {
        let rem = pl.d - pl.n[0] * q.0 - pl.n[1] * q.1;
        if pl.n[2].abs() < 1e-12 {
            continue;
        }
        let bound = rem / pl.n[2];
        if pl.n[2] > 0.0 {
            hi = hi.min(bound);
        } else {
            lo = lo.max(bound);
        }
    }
    if lo <= hi {
        for t in [hi, lo, 0.5 * (lo + hi)] {
            let p = [q.0, q.1, t];
            if in_cone(p) && cell.contains(p, 1e-7) {
                return Some(p);
            }
        }
    }
    // Centroid-vertex blends as a last resort.
    for v in cell.vertices() {
        for lambda in [0.5, 0.75, 0.9] {
            let p = [
                c[0] + lambda * (v[0] - c[0]),
                c[1] + lambda * (v[1] - c[1]),
                c[2] + lambda * (v[2] - c[2]),
            ];
            if in_cone(p) {
                return Some(p);
            }
        }
    }
    None
}

fn hull2d(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Closest point of a convex polygon to the origin (the origin itself when
/// inside).
fn closest_to_origin(hull: &[(f64, f64)]) -> (f64, f64) {
    let n = hull.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    if n == 1 {
        return hull[0];
    }
    let mut inside = n >= 3;
    let mut best = hull[0];
    let mut best_d = best.0 * best.0 + best.1 * best.1;
    for i in 0..n {
        let a = hull[i];
        let b = hull[(i + 1) % n];
        let e = (b.0 - a.0, b.1 - a.1);
        if inside && e.0 * (-a.1) - e.1 * (-a.0) < 0.0 {
            inside = false;
        }
        let len2 = e.0 * e.0 + e.1 * e.1;
        if len2 < 1e-24 {
            continue;
        }
        let t = ((-a.0) * e.0 + (-a.1) * e.1) / len2;
        let t = t.clamp(0.0, 1.0);
        let p = (a.0 + t * e.0, a.1 + t * e.1);
        let d = p.0 * p.0 + p.1 * p.1;
        if d < best_d {
            best_d = d;
            best = p;
        }
    }
    if inside {
        (0.0, 0.0)
    } else {
        best
    }
}

/// Honest membership of a chart point in the inner half-space of `g_inv`'s
/// inverse: affine side plus the argument branch.
fn inner_at(g_inv: &GroupElement, p: [f64; 3]) -> bool {
    let b = g_inv.act(&chart_from(&ChartPoint::from_coords(p)));
    b.alpha.abs() < FRAC_PI_2 && b.r * b.alpha.cos() >= 1.0 - GEO_TOL
}

/// Conservative lower bound for `|w| - |z| = sqrt(1 + t^2) - |z|` over the
/// cell.
fn cell_margin_bound(cell: &Cell) -> f64 {
    let mut t_min = f64::INFINITY;
    let mut t_max = f64::NEG_INFINITY;
    let mut z_max: f64 = 0.0;
    for v in cell.vertices() {
        t_min = t_min.min(v[2]);
        t_max = t_max.max(v[2]);
        z_max = z_max.max((v[0] * v[0] + v[1] * v[1]).sqrt());
    }
    let t_abs_min = if t_min <= 0.0 && t_max >= 0.0 {
        0.0
    } else {
        t_min.abs().min(t_max.abs())
    };
    (1.0 + t_abs_min * t_abs_min).sqrt() - z_max
}

/// Carves the fundamental polyhedron for the group against the atlas.
pub fn carve(group: &LiftedGroup, atlas: &OrbitAtlas) -> Result<DomainComplex> {
    let theta = group.wedge_angle;
    debug_assert!((theta - atlas.wedge_angle).abs() < 1e-12);
    if atlas.is_empty() {
        return Err(Error::EmptyAtlas);
    }
    let tan_half = (0.5 * theta).tan();
    let r_box = 1.0 / (0.5 * theta).cos() + 0.25;
    let half_width = ((std::f64::consts::PI + 0.5 * theta) / theta).ceil() as i64 + 1;

    let seed = Cell::from_planes(vec![
        Plane::new([1.0, 0.0, 0.0], r_box, PlaneLabel::Box),
        Plane::new([-1.0, 0.0, 0.0], r_box, PlaneLabel::Box),
        Plane::new([0.0, 1.0, 0.0], r_box, PlaneLabel::Box),
        Plane::new([0.0, -1.0, 0.0], r_box, PlaneLabel::Box),
        Plane::new([0.0, 0.0, 1.0], tan_half, PlaneLabel::Wedge(1)),
        Plane::new([0.0, 0.0, -1.0], tan_half, PlaneLabel::Wedge(-1)),
    ])
    .expect("wedge slab box is non-degenerate");

    let mut cells = vec![seed];
    let mut active_sites = 0usize;

    for (site_idx, site) in atlas.sites.iter().enumerate().skip(1) {
        // Sites are sorted by radius, so reach bounds are non-increasing:
        // once no cell can be reached, later sites cannot cut either.
        let global_bound = cells.iter().map(cell_margin_bound).fold(f64::INFINITY, f64::min);
        if site.reach < global_bound - GEO_TOL {
            break;
        }
        // Cells the prism cannot reach pass through untouched; the reach
        // bound also guarantees they never abut material this prism removes,
        // so skipping their subdivision keeps the complex conforming.
        let mut untouched: Vec<Cell> = Vec::new();
        let mut pieces: Vec<(Cell, bool)> = Vec::new();
        for cell in cells.drain(..) {
            if site.reach < cell_margin_bound(&cell) - GEO_TOL {
                untouched.push(cell);
            } else {
                pieces.push((cell, false));
            }
        }
        if !pieces.is_empty() {
            active_sites += 1;
        }
        // Cutters are generated on demand; the break above keeps far sites
        // from ever materializing theirs. Every piece is split by every
        // window plane, kept or not, so that facets of neighbouring pieces
        // conform along shared planes.
        let center = (site.rep.alpha() / theta).round() as i64;
        for m in center - half_width..=center + half_width {
            if pieces.is_empty() {
                break;
            }
            let element = site.rep * GroupElement::rotation_about_origin(2.0 * m as f64 * theta);
            let plane = cutter_plane(&element, PlaneLabel::Cutter { site: site_idx, m });
            let g_inv = element.inverse();
            let mut next = Vec::with_capacity(pieces.len());
            for (cell, kept) in pieces.drain(..) {
                let (inside, outside) = cell.split(&plane);
                if let Some(cin) = inside {
                    // A convex piece inside the affine half-space sits on a
                    // single argument branch; one interior probe decides it.
                    let honest = kept
                        || cone_probe(&cin).map(|p| inner_at(&g_inv, p)).unwrap_or(false);
                    next.push((cin, honest));
                }
                if let Some(cout) = outside {
                    next.push((cout, kept));
                }
            }
            pieces = next;
        }
        // Whatever lies in no inner half-space of this prism is interior to
        // it and drops out of the domain.
        cells = untouched;
        cells.extend(pieces.into_iter().filter_map(|(c, kept)| kept.then_some(c)));
        if cells.is_empty() {
            return Err(Error::CarveUnstable("every cell was consumed".into()));
        }
    }

    // Certify before any boundary work: an under-cut carve (region not yet
    // margin-deep inside the cone, or dropped sites able to reach it) has no
    // meaningful boundary to label. This also subsumes unbounded-toward-the-
    // box and outside-the-cone states, whose margin bounds are negative.
    let margin = cells.iter().map(cell_margin_bound).fold(f64::INFINITY, f64::min);
    if margin <= atlas.cutoff.max(atlas.excluded_reach_max) {
        return Err(Error::CutoffTooLarge { cutoff: atlas.cutoff, margin });
    }
    for cell in &cells {
        for f in cell.facets() {
            if f.plane.label == PlaneLabel::Box {
                return Err(Error::CarveUnstable(format!(
                    "unbounded toward the box plane with normal {:?}",
                    f.plane.n
                )));
            }
        }
        for v in cell.vertices() {
            if v[0] * v[0] + v[1] * v[1] > 1.0 + v[2] * v[2] + 1e-6 {
                return Err(Error::CarveUnstable("vertex outside the cone".into()));
            }
        }
    }

    let boundary = extract_boundary(&cells, atlas)?;
    Ok(DomainComplex {
        cells,
        boundary,
        wedge_angle: theta,
        margin,
        active_sites,
        cutter_planes: (atlas.len() - 1) * (2 * half_width as usize + 1),
    })
}

/// Certifies that the cutoff could not have dropped a prism able to cut the
/// carved region: every excluded orbit point has reach below the region's
/// margin.
pub fn stability_certificate(atlas: &OrbitAtlas, complex: &DomainComplex) -> Result<f64> {
    let needed = atlas.cutoff.max(atlas.excluded_reach_max);
    if complex.margin > needed {
        Ok(complex.margin)
    } else {
        Err(Error::CutoffTooLarge { cutoff: atlas.cutoff, margin: complex.margin })
    }
}

fn extract_boundary(cells: &[Cell], atlas: &OrbitAtlas) -> Result<Vec<BoundaryFacet>> {
    let mut out = Vec::new();
    for (cell_idx, cell) in cells.iter().enumerate() {
        for facet in cell.facets() {
            let c = facet.centroid();
            let n = facet.plane.n;
            let mut internal = false;
            for scale in [BOUNDARY_PROBE, 10.0 * BOUNDARY_PROBE] {
                let probe = [c[0] + scale * n[0], c[1] + scale * n[1], c[2] + scale * n[2]];
                if cells
                    .iter()
                    .enumerate()
                    .any(|(j, other)| j != cell_idx && other.contains(probe, GEO_TOL))
                {
                    internal = true;
                    break;
                }
            }
            if internal {
                continue;
            }
            let label = face_label(&facet, atlas)?;
            out.push(BoundaryFacet {
                label,
                cell: cell_idx,
                outward: n,
                area: facet.area,
                polygon: facet.polygon,
            });
        }
    }
    out.sort_by(|a, b| a.label.cmp(&b.label).then(a.cell.cmp(&b.cell)));
    Ok(out)
}

/// Finds the honest face label: the cutting element whose tangent face
/// contains the facet on the correct argument branch. Split history gives a
/// candidate site; coincident planes within the window differ only in the
/// branch index, which the on-face test resolves.
fn face_label(facet: &Facet, atlas: &OrbitAtlas) -> Result<FaceLabel> {
    match facet.plane.label {
        PlaneLabel::Wedge(sign) => Ok(FaceLabel::Wedge(sign)),
        PlaneLabel::Box => Err(Error::CarveUnstable("box facet in boundary".into())),
        PlaneLabel::Cutter { site, .. } => {
            let theta = atlas.wedge_angle;
            let rep = atlas.sites[site].rep;
            let center = (rep.alpha() / theta).round() as i64;
            let half_width = ((std::f64::consts::PI + 0.5 * theta) / theta).ceil() as i64 + 1;
            // Probe points pulled slightly toward the facet centroid, so a
            // transversally-crossing face cannot fool the test.
            let c = facet.centroid();
            let probes: Vec<[f64; 3]> = facet
                .polygon
                .iter()
                .take(3)
                .map(|v| {
                    [
                        v[0] + 0.02 * (c[0] - v[0]),
                        v[1] + 0.02 * (c[1] - v[1]),
                        v[2] + 0.02 * (c[2] - v[2]),
                    ]
                })
                .chain(std::iter::once(c))
                .collect();
            for m in center - half_width..=center + half_width {
                let g = rep * GroupElement::rotation_about_origin(2.0 * m as f64 * theta);
                let g_inv = g.inverse();
                let on_face = probes.iter().all(|&p| {
                    let b = g_inv.act(&chart_from(&ChartPoint::from_coords(p)));
                    b.alpha.abs() < FRAC_PI_2 && (b.r * b.alpha.cos() - 1.0).abs() <= 1e-6
                });
                if on_face {
                    return Ok(FaceLabel::Cutter { site, m });
                }
            }
            // Diagnostics for the failure path.
            {
                let b = rep.inverse().act(&chart_from(&ChartPoint::from_coords(c)));
                eprintln!(
                    "unlabeled facet: site {site} plane-m {:?} centroid {:?} area {:.3e} local alpha {:.4} r {:.4} rcos(delta) {:.6}",
                    facet.plane.label,
                    c,
                    facet.area,
                    b.alpha,
                    b.r,
                    b.r * crate::num::dist_to_multiple(b.alpha, theta).cos(),
                );
            }
            Err(Error::CarveUnstable("boundary facet without an honest label".into()))
        }
    }
}

/// Direct membership of a chart point in the carved domain, evaluated from
/// the prism predicates (independent of the cell complex). The `shell`
/// tolerance is measured on the defining inequalities.
pub fn membership(atlas: &OrbitAtlas, point: &ChartPoint, shell: f64) -> Region {
    let theta = atlas.wedge_angle;
    let tan_half = (0.5 * theta).tan();
    let r = (1.0 + point.t * point.t).sqrt();
    if point.z.norm() >= r {
        return Region::Exterior;
    }
    let margin_pt = r - point.z.norm();
    let wedge_slack = tan_half - point.t.abs();
    if wedge_slack < -shell {
        return Region::Exterior;
    }
    let mut on_boundary = wedge_slack <= shell;
    let a = chart_from(point);
    for site in atlas.sites.iter().skip(1) {
        if site.reach < margin_pt - shell {
            continue; // the prism cannot reach this point
        }
        let b = site.rep.inverse().act(&a);
        let delta = dist_to_multiple(b.alpha, theta);
        let slack = b.r * delta.cos() - 1.0;
        if slack < -shell {
            return Region::Exterior;
        }
        if slack <= shell {
            on_boundary = true;
        }
    }
    if on_boundary {
        Region::Boundary
    } else {
        Region::Interior
    }
}

/// Result of the adaptive carve: the atlas that passed the stability
/// certificate together with the carved complex.
#[derive(Clone, Debug)]
pub struct CarvedDomain {
    pub atlas: OrbitAtlas,
    pub complex: DomainComplex,
    pub cutoff_used: f64,
    pub attempts: u32,
}

/// Carves with the given initial cutoff, shrinking it until the stability
/// certificate passes. A failed certificate reports the achieved margin,
/// which gives the next cutoff directly; carves that fail outright halve.
/// Fails below the cutoff floor of 1e-3.
pub fn carve_adaptive(group: &LiftedGroup, initial_cutoff: f64) -> Result<CarvedDomain> {
    if !(initial_cutoff > 0.0) {
        return Err(Error::InvalidCutoff(initial_cutoff));
    }
    let mut cutoff = initial_cutoff;
    let mut attempts = 0;
    loop {
        attempts += 1;
        let atlas = crate::orbit::enumerate_orbit(group, cutoff)?;
        let outcome = carve(group, &atlas).and_then(|complex| {
            stability_certificate(&atlas, &complex).map(|_| complex)
        });
        match outcome {
            Ok(complex) => {
                return Ok(CarvedDomain { atlas, complex, cutoff_used: cutoff, attempts });
            }
            Err(e) => {
                let next = match &e {
                    // The margin of the failed carve says how deep the
                    // cutoff must go; 0.8 leaves certification headroom.
                    Error::CutoffTooLarge { margin, .. } if *margin > 0.0 => {
                        (0.5 * cutoff).min(0.8 * margin)
                    }
                    _ => 0.5 * cutoff,
                };
                cutoff = next;
                if cutoff < 1e-3 {
                    return Err(e);
                }
            }
        }
    }
}

/// One matched pair of boundary faces.
#[derive(Clone, Debug)]
pub struct FacePair {
    pub face_a: FaceLabel,
    pub face_b: FaceLabel,
    pub word_a: String,
    pub word_b: String,
    /// The element carrying face A onto face B (the inverse of A's label).
    pub mapping_word: String,
    /// Setwise surface distance between the mapped face A and face B.
    pub residual: f64,
    /// Distance of one mapped flag (vertex, edge midpoint, face centroid).
    pub flag_residual: f64,
}

/// The face identification scheme of the carved domain.
#[derive(Clone, Debug)]
pub struct FacePairing {
    pub pairs: Vec<FacePair>,
}

impl FacePairing {
    /// Partner lookup; the pairing is an involution.
    pub fn partner(&self, label: FaceLabel) -> Option<FaceLabel> {
        for p in &self.pairs {
            if p.face_a == label {
                return Some(p.face_b);
            }
            if p.face_b == label {
                return Some(p.face_a);
            }
        }
        None
    }
}

fn map_chart_point(g_inv: &GroupElement, p: [f64; 3]) -> Result<[f64; 3]> {
    let moved = g_inv.act(&chart_from(&ChartPoint::from_coords(p)));
    Ok(chart_to(&moved)?.coords())
}

/// Matches every boundary face with the face of the inverse label and
/// verifies the identification geometrically.
pub fn face_pairing(complex: &DomainComplex, atlas: &OrbitAtlas) -> Result<FacePairing> {
    let mut groups: BTreeMap<FaceLabel, Vec<&BoundaryFacet>> = BTreeMap::new();
    for f in &complex.boundary {
        groups.entry(f.label).or_default().push(f);
    }
    let labels: Vec<FaceLabel> = groups.keys().copied().collect();
    let mut matched: BTreeMap<FaceLabel, ()> = BTreeMap::new();
    let mut pairs = Vec::new();
    let mut unmatched = 0usize;

    for &label in &labels {
        if matched.contains_key(&label) {
            continue;
        }
        let g = label.element(atlas);
        let target = g.inverse();
        let partner = labels
            .iter()
            .copied()
            .find(|l| l.element(atlas).approx_eq(&target, 1e-6) && !matched.contains_key(l));
        let Some(partner) = partner else {
            unmatched += 1;
            continue;
        };

        // Setwise check, both directions: every mapped sample point must lie
        // on the partner's facet union.
        let g_inv = g.inverse();
        let partner_inv = partner.element(atlas).inverse();
        let residual_ab = face_map_residual(&groups[&label], &groups[&partner], &g_inv)?;
        let residual_ba = face_map_residual(&groups[&partner], &groups[&label], &partner_inv)?;
        let residual = residual_ab.max(residual_ba);

        // One identified flag: vertex, edge midpoint, face centroid.
        let fa = groups[&label][0];
        let v0 = fa.polygon[0];
        let v1 = fa.polygon[1];
        let edge_mid = [(v0[0] + v1[0]) / 2.0, (v0[1] + v1[1]) / 2.0, (v0[2] + v1[2]) / 2.0];
        let flag_residual = [v0, edge_mid, fa.polygon[2]]
            .into_iter()
            .map(|p| {
                map_chart_point(&g_inv, p).map(|q| {
                    groups[&partner]
                        .iter()
                        .map(|f| point_polygon_distance(q, &f.polygon, f.outward))
                        .fold(f64::INFINITY, f64::min)
                })
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0f64, f64::max);

        matched.insert(label, ());
        matched.insert(partner, ());
        pairs.push(FacePair {
            face_a: label,
            face_b: partner,
            word_a: label.word(atlas),
            word_b: partner.word(atlas),
            mapping_word: partner.word(atlas),
            residual,
            flag_residual,
        });
    }
    if unmatched > 0 {
        return Err(Error::PairingIncomplete(unmatched));
    }
    Ok(FacePairing { pairs })
}

fn face_map_residual(
    from: &[&BoundaryFacet],
    to: &[&BoundaryFacet],
    g_inv: &GroupElement,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for facet in from {
        // Vertices plus the centroid; edge midpoints follow by convexity.
        let c = facet
            .polygon
            .iter()
            .fold([0.0; 3], |acc, v| [acc[0] + v[0], acc[1] + v[1], acc[2] + v[2]]);
        let n = facet.polygon.len() as f64;
        let samples: Vec<[f64; 3]> = facet
            .polygon
            .iter()
            .copied()
            .chain(std::iter::once([c[0] / n, c[1] / n, c[2] / n]))
            .collect();
        for p in samples {
            let q = map_chart_point(g_inv, p)?;
            let d = to
                .iter()
                .map(|f| point_polygon_distance(q, &f.polygon, f.outward))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
    }
    Ok(worst)
}

/// Tiling verification by sampling: every sampled group point must be
/// covered by at least one translate of the carved domain, and interior
/// points by exactly one.
#[derive(Clone, Copy, Debug)]
pub struct TilingReport {
    pub samples: usize,
    pub covered: usize,
    pub interior_double: usize,
}

pub fn verify_tiling(atlas: &OrbitAtlas, samples: usize, seed: u64) -> Result<TilingReport> {
    let theta = atlas.wedge_angle;
    let mut rng = SplitMix64::new(seed);
    let mut covered = 0usize;
    let mut interior_double = 0usize;
    for _ in 0..samples {
        let z = loop {
            let z = Complex64::new(rng.range(-0.5, 0.5), rng.range(-0.5, 0.5));
            if z.norm() <= 0.5 {
                break z;
            }
        };
        let a = GroupElement::normalized(z, rng.range(-std::f64::consts::PI, std::f64::consts::PI));
        let (roof, achievers) = crate::halfspace::family_roof(atlas, &a)?;
        let fiber = a.as_cover().at_height(roof);
        let mut hit = 0usize;
        let mut interior_hits = 0usize;
        for (site_idx, m) in &achievers {
            let g = atlas.sites[*site_idx].rep
                * GroupElement::rotation_about_origin(2.0 * *m as f64 * theta);
            let pulled = g.inverse().act(&fiber);
            let Ok(cp) = chart_to(&pulled) else { continue };
            match membership(atlas, &cp, 1e-7) {
                Region::Interior => {
                    hit += 1;
                    interior_hits += 1;
                }
                Region::Boundary => hit += 1,
                Region::Exterior => {}
            }
        }
        if hit >= 1 {
            covered += 1;
        }
        if interior_hits >= 2 {
            interior_double += 1;
        }
    }
    Ok(TilingReport { samples, covered, interior_double })
}
