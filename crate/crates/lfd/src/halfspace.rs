//! Tangent half-spaces in the covered cone, the prisms they intersect to,
//! and the flat chart of the identity tangent face.
//!
//! For a group element `g`, the covered cone splits along the lift of the
//! affine tangent slice at `g` into an inner part (beyond the tangent plane,
//! away from the cone apex) and an outer part. In local coordinates
//! `b = g^{-1} a` the face is `r cos(alpha) = 1` with `|alpha| < pi/2`; the
//! extra argument window picks the component of the preimage that actually
//! contains `g`. Both sides are treated as closed, overlapping exactly on
//! the face; predicates snap within `GEO_TOL`.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use crate::cover::{CoverPoint, GroupElement, PseudoVector};
use crate::error::{Error, Result};
use crate::num::{dist_to_multiple, gcd_u64, GEO_TOL};
use crate::orbit::{OrbitAtlas, OrbitSite};

/// The tangent half-space pair attached to a group element.
#[derive(Clone, Copy, Debug)]
pub struct TangentHalfSpace {
    g: GroupElement,
}

impl TangentHalfSpace {
    pub fn new(g: GroupElement) -> Self {
        Self { g }
    }

    pub fn at_identity() -> Self {
        Self { g: GroupElement::identity() }
    }

    pub fn element(&self) -> GroupElement {
        self.g
    }

    fn local(&self, a: &CoverPoint) -> CoverPoint {
        self.g.inverse().act(a)
    }

    /// Closed inner side: `|alpha| < pi/2` and `r cos(alpha) >= 1`.
    pub fn contains_inner(&self, a: &CoverPoint) -> bool {
        let b = self.local(a);
        b.alpha.abs() < FRAC_PI_2 && b.r * b.alpha.cos() >= 1.0 - GEO_TOL
    }

    /// Closed outer side: `|alpha| >= pi/2` or `r cos(alpha) <= 1`.
    pub fn contains_outer(&self, a: &CoverPoint) -> bool {
        let b = self.local(a);
        b.alpha.abs() >= FRAC_PI_2 || b.r * b.alpha.cos() <= 1.0 + GEO_TOL
    }

    /// On the tangent face itself.
    pub fn on_face(&self, a: &CoverPoint) -> bool {
        let b = self.local(a);
        b.alpha.abs() < FRAC_PI_2 && (b.r * b.alpha.cos() - 1.0).abs() <= GEO_TOL
    }

    /// Strictly inside the inner side (off the face).
    pub fn strictly_inner(&self, a: &CoverPoint) -> bool {
        let b = self.local(a);
        b.alpha.abs() < FRAC_PI_2 && b.r * b.alpha.cos() > 1.0 + GEO_TOL
    }
}

/// Point of the flat chart of the identity tangent face: `(z, t)` with the
/// face point `(z, alpha = atan t, r = sqrt(1 + t^2))`, i.e. `w = 1 + i t`.
///
/// The flat metric of the chart has signature (2,1): plus on the two `z`
/// directions, minus on `t`.
#[derive(Clone, Copy, Debug)]
pub struct ChartPoint {
    pub z: Complex64,
    pub t: f64,
}

impl ChartPoint {
    pub fn new(z: Complex64, t: f64) -> Self {
        Self { z, t }
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.z.re, self.z.im, self.t]
    }

    pub fn from_coords(c: [f64; 3]) -> Self {
        Self { z: Complex64::new(c[0], c[1]), t: c[2] }
    }
}

/// Chart coordinates of a point on the identity tangent face.
pub fn chart_to(a: &CoverPoint) -> Result<ChartPoint> {
    if a.alpha.abs() >= FRAC_PI_2 || (a.r * a.alpha.cos() - 1.0).abs() > 1e-6 {
        return Err(Error::NotOnFace);
    }
    Ok(ChartPoint { z: a.z, t: a.alpha.tan() })
}

/// Cover point over a chart point; inverse of `chart_to`.
pub fn chart_from(c: &ChartPoint) -> CoverPoint {
    CoverPoint {
        z: c.z,
        alpha: c.t.atan(),
        r: (1.0 + c.t * c.t).sqrt(),
    }
}

/// Projection of a chart point into the ambient space: `(z, 1 + i t)`.
pub fn chart_embed(c: &ChartPoint) -> PseudoVector {
    PseudoVector::new(c.z, Complex64::new(1.0, c.t))
}

/// Classification of a point against a prism.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Interior,
    Boundary,
    Exterior,
}

/// The prism over an orbit point: the intersection of the outer half-spaces
/// of the coset of elements carrying the base point there.
///
/// All constraints share the local radius; the m-th constraint acts on the
/// local argument by a shift of `m theta`, so a finite window of indices
/// decides membership on any argument-bounded region.
#[derive(Clone, Debug)]
pub struct Prism {
    /// Coset representative.
    pub rep: GroupElement,
    /// Orbit point (shadow of `rep`).
    pub point: Complex64,
    /// Wedge angle `theta`.
    pub theta: f64,
}

impl Prism {
    pub fn new(site: &OrbitSite, theta: f64) -> Self {
        Self { rep: site.rep, point: site.point, theta }
    }

    pub fn base(theta: f64) -> Self {
        Self {
            rep: GroupElement::identity(),
            point: Complex64::new(0.0, 0.0),
            theta,
        }
    }

    /// Window half-width covering every binding constraint for local
    /// arguments up to `a_abs`.
    pub fn window_bound(theta: f64, a_abs: f64) -> i64 {
        ((a_abs + std::f64::consts::PI) / theta).ceil() as i64 + 1
    }

    fn local(&self, a: &CoverPoint) -> CoverPoint {
        self.rep.inverse().act(a)
    }

    /// Membership of a cone point, decided over the finite window.
    pub fn classify(&self, a: &CoverPoint) -> Region {
        self.classify_with_window(a, None)
    }

    /// Same, with a window override for stability checks.
    pub fn classify_with_window(&self, a: &CoverPoint, window: Option<i64>) -> Region {
        let b = self.local(a);
        let window = window.unwrap_or_else(|| Self::window_bound(self.theta, b.alpha.abs()));
        let mut on_face = false;
        for m in -window..=window {
            let alpha_m = b.alpha + m as f64 * self.theta;
            if alpha_m.abs() >= FRAC_PI_2 {
                continue;
            }
            let v = b.r * alpha_m.cos();
            if v > 1.0 + GEO_TOL {
                return Region::Exterior;
            }
            if v >= 1.0 - GEO_TOL {
                on_face = true;
            }
        }
        if on_face {
            Region::Boundary
        } else {
            Region::Interior
        }
    }

    /// Height of the prism roof over a quadric point: the supremum of `r`
    /// over the fiber ray staying inside the prism, as the minimum of the
    /// per-constraint fiber heights over the window (`+inf` for constraints
    /// whose argument window exempts the fiber).
    pub fn section_height(&self, a: &GroupElement) -> f64 {
        self.section_with_window(a, None).0
    }

    /// Same, with the achieving window indices (ties within `GEO_TOL`),
    /// and an optional window override for monotonicity checks.
    pub fn section_with_window(&self, a: &GroupElement, window: Option<i64>) -> (f64, Vec<i64>) {
        let b = self.local(&a.as_cover());
        let window = window.unwrap_or_else(|| Self::window_bound(self.theta, b.alpha.abs()));
        let mut best = f64::INFINITY;
        let mut achievers = Vec::new();
        for m in -window..=window {
            let alpha_m = b.alpha + m as f64 * self.theta;
            if alpha_m.abs() >= FRAC_PI_2 {
                continue; // exempt: this constraint never cuts the fiber
            }
            let h = a.r() / (b.r * alpha_m.cos());
            if h < best - GEO_TOL {
                best = h;
                achievers.clear();
                achievers.push(m);
            } else if h <= best + GEO_TOL {
                achievers.push(m);
            }
        }
        (best, achievers)
    }

    /// Closed form of the roof height: the binding constraint is the one
    /// bringing the local argument nearest to the wedge lattice.
    pub fn section_height_direct(&self, a: &GroupElement) -> f64 {
        let b = self.local(&a.as_cover());
        let delta = dist_to_multiple(b.alpha, self.theta);
        a.r() / (b.r * delta.cos())
    }
}

/// Roof of the whole prism family over a quadric point: the maximum of the
/// prism sections, with every achieving (site, window index) pair.
pub fn family_roof(atlas: &OrbitAtlas, a: &GroupElement) -> Result<(f64, Vec<(usize, i64)>)> {
    if atlas.is_empty() {
        return Err(Error::EmptyAtlas);
    }
    let mut best = f64::NEG_INFINITY;
    let mut heights = Vec::with_capacity(atlas.len());
    for site in &atlas.sites {
        let prism = Prism::new(site, atlas.wedge_angle);
        let h = prism.section_height_direct(a);
        heights.push(h);
        if h > best {
            best = h;
        }
    }
    let mut achievers = Vec::new();
    for (idx, &h) in heights.iter().enumerate() {
        if h >= best - GEO_TOL {
            let prism = Prism::new(&atlas.sites[idx], atlas.wedge_angle);
            let (hw, ms) = prism.section_with_window(a, None);
            debug_assert!((hw - h).abs() <= 1e-9 * h.max(1.0));
            for m in ms {
                achievers.push((idx, m));
            }
        }
    }
    Ok((best, achievers))
}

/// Vertices of the star polygon traced by the projected prism boundary over
/// the base point: `2p` vertices for odd `k`, `p` for even `k`, all at
/// radius `1 / cos(theta/2)` with `theta = pi k / p`, listed in edge order.
/// Consecutive vertices share an edge line tangent to the unit circle.
pub fn star_polygon(p: u32, k: u32) -> Result<Vec<Complex64>> {
    if !(p > k && k >= 1 && gcd_u64(p as u64, k as u64) == 1) {
        return Err(Error::BadStarParameters { p, k });
    }
    let theta = std::f64::consts::PI * k as f64 / p as f64;
    let radius = 1.0 / (0.5 * theta).cos();
    let count = if k % 2 == 1 { 2 * p } else { p };
    Ok((0..count)
        .map(|j| Complex64::from_polar(radius, (2 * j + 1) as f64 * 0.5 * theta))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::SplitMix64;
    use crate::orbit::enumerate_orbit;
    use crate::triangle::{lifted_group, LiftedGroup, TriangleSignature, VertexChoice};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn e12() -> LiftedGroup {
        lifted_group(
            TriangleSignature::new([2, 3, 7]).unwrap(),
            [0, 0, 0],
            VertexChoice::Auto,
        )
        .unwrap()
    }

    #[test]
    fn identity_half_space_examples() {
        let hs = TangentHalfSpace::at_identity();
        // Deep on the inner side.
        let a = CoverPoint::new(c(0.0, 0.0), 0.0, 2.0);
        assert!(hs.contains_inner(&a) && !hs.contains_outer(&a) && !hs.on_face(&a));
        // A full half-turn of argument is outer regardless of r.
        let b = CoverPoint::new(c(0.0, 0.0), PI, 1.0);
        assert!(hs.contains_outer(&b) && !hs.contains_inner(&b));
        // The tangency point itself.
        let e = CoverPoint::new(c(0.0, 0.0), 0.0, 1.0);
        assert!(hs.on_face(&e) && hs.contains_inner(&e) && hs.contains_outer(&e));
    }

    #[test]
    fn translated_half_space_matches_local_form() {
        // Equivariance: membership at g equals membership of g^{-1} a at the
        // identity.
        let mut rng = SplitMix64::new(21);
        for _ in 0..300 {
            let g = GroupElement::normalized(c(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)), rng.range(-3.0, 3.0));
            let z = c(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0));
            let a = CoverPoint::new(z, rng.range(-4.0, 4.0), z.norm() + rng.range(0.1, 2.0));
            let hs = TangentHalfSpace::new(g);
            let local = g.inverse().act(&a);
            assert_eq!(hs.contains_inner(&a), TangentHalfSpace::at_identity().contains_inner(&local));
            assert_eq!(hs.contains_outer(&a), TangentHalfSpace::at_identity().contains_outer(&local));
        }
    }

    #[test]
    fn chart_examples() {
        let e = GroupElement::identity().as_cover();
        let c0 = chart_to(&e).unwrap();
        assert!(c0.z.norm() < 1e-15 && c0.t.abs() < 1e-15);

        let a = CoverPoint::new(c(0.0, 0.0), PI / 4.0, 2f64.sqrt());
        let c1 = chart_to(&a).unwrap();
        assert!((c1.t - 1.0).abs() < 1e-12);

        // Off-face points are rejected.
        assert!(chart_to(&CoverPoint::new(c(0.0, 0.0), 0.0, 2.0)).is_err());

        // The chart metric is flat of signature (2,1).
        let p = ChartPoint::new(c(0.3, -0.1), 0.45);
        let dz = 1e-5;
        let fd = |dp: [f64; 3]| -> f64 {
            let q = ChartPoint::new(p.z + c(dp[0], dp[1]), p.t + dp[2]);
            let (u, v) = (chart_embed(&q), chart_embed(&p));
            let d = PseudoVector::new(u.z - v.z, u.w - v.w);
            d.quad()
        };
        assert!((fd([dz, 0.0, 0.0]) / (dz * dz) - 1.0).abs() < 1e-6);
        assert!((fd([0.0, dz, 0.0]) / (dz * dz) - 1.0).abs() < 1e-6);
        assert!((fd([0.0, 0.0, dz]) / (dz * dz) + 1.0).abs() < 1e-6);
    }

    #[test]
    fn base_prism_wedge_reduction() {
        // On the identity face, membership in the base prism reduces to
        // |alpha| <= theta/2, and the roof estimate r <= 1/cos(theta/2)
        // holds with equality on the wedge edge.
        let group = e12();
        let theta = group.wedge_angle;
        let prism = Prism::base(theta);
        for alpha in [-0.9, -0.3, 0.0, 0.2, 0.8, 1.4] {
            let alpha = alpha * theta; // spans beyond the wedge
            let a = CoverPoint::new(c(0.0, 0.0), alpha, 1.0 / alpha.cos());
            let expected = if alpha.abs() <= theta / 2.0 + 1e-12 {
                Region::Boundary // face points of the slab are on the prism wall
            } else {
                Region::Exterior
            };
            assert_eq!(prism.classify(&a), expected, "alpha = {alpha}");
        }
        // Everything inside the prism obeys the roof estimate.
        let bound = 1.0 / (0.5 * theta).cos();
        let mut rng = SplitMix64::new(31);
        for _ in 0..2000 {
            let g = GroupElement::normalized(c(rng.range(-1.5, 1.5), rng.range(-1.5, 1.5)), rng.range(-4.0, 4.0));
            let roof = prism.section_height(&g);
            let h = roof * rng.next_f64();
            if h <= 0.0 {
                continue;
            }
            let p = g.as_cover().at_height(h.max(1e-6));
            assert!(prism.classify(&p) != Region::Exterior);
            assert!(p.r <= bound + 1e-9);
        }
    }

    #[test]
    fn section_height_examples() {
        let group = e12();
        let theta = group.wedge_angle;
        let prism = Prism::base(theta);
        // At the identity the r <= 1 constraint binds.
        let (h, achievers) = prism.section_with_window(&GroupElement::identity(), None);
        assert!((h - 1.0).abs() < 1e-12);
        assert_eq!(achievers, vec![0]);
        // On the wedge edge both neighbouring constraints bind.
        let edge = GroupElement::normalized(c(0.0, 0.0), theta / 2.0);
        let (h, achievers) = prism.section_with_window(&edge, None);
        assert!((h - 1.0 / (0.5 * theta).cos()).abs() < 1e-12);
        assert_eq!(achievers.len(), 2);
        // Widening the window never increases the value.
        let mut rng = SplitMix64::new(41);
        for _ in 0..200 {
            let g = GroupElement::normalized(c(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)), rng.range(-3.0, 3.0));
            let base_window = Prism::window_bound(theta, g.alpha().abs() + 0.1);
            let (h1, _) = prism.section_with_window(&g, Some(base_window));
            let (h2, _) = prism.section_with_window(&g, Some(base_window + 5));
            assert!(h2 <= h1 + 1e-12);
            // And the closed form agrees.
            assert!((prism.section_height_direct(&g) - h1).abs() < 1e-9);
        }
    }

    #[test]
    fn prism_points_obey_reach_bound() {
        // Sampled points of translated prisms satisfy
        // |w| - |z| <= |w - conj(x) z| <= f(|x|). The conjugate pairing is
        // the rotation-equivariant one under our disk identification z/w;
        // for real orbit points it coincides with x z.
        let group = e12();
        let atlas = enumerate_orbit(&group, 0.6).unwrap();
        let mut rng = SplitMix64::new(51);
        for site in atlas.sites.iter().take(8) {
            let prism = Prism::new(site, group.wedge_angle);
            for _ in 0..200 {
                let g = GroupElement::normalized(
                    c(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)),
                    rng.range(-3.0, 3.0),
                );
                let roof = prism.section_height(&g);
                let p = g.as_cover().at_height(roof * rng.range(0.05, 1.0));
                let v = p.project();
                let lhs = v.w.norm() - v.z.norm();
                let mid = (v.w - site.point.conj() * v.z).norm();
                assert!(lhs <= mid + 1e-9);
                assert!(mid <= site.reach + 1e-9, "reach bound failed at x = {}", site.point);
            }
        }
    }

    #[test]
    fn prisms_translate_equivariantly() {
        // The prism of g(u) is the g-translate of the base prism.
        let group = e12();
        let atlas = enumerate_orbit(&group, 0.6).unwrap();
        let site = &atlas.sites[3];
        let base = Prism::base(group.wedge_angle);
        let moved = Prism::new(site, group.wedge_angle);
        let mut rng = SplitMix64::new(61);
        for _ in 0..200 {
            let z = c(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0));
            let a = CoverPoint::new(z, rng.range(-3.0, 3.0), z.norm() + rng.range(0.05, 2.0));
            assert_eq!(base.classify(&a), moved.classify(&site.rep.act(&a)));
        }
    }

    #[test]
    fn local_finiteness_via_reach() {
        // Any prism containing a point has reach above the point's margin,
        // so only finitely many candidates (those with large reach) need
        // probing.
        let group = e12();
        let atlas = enumerate_orbit(&group, 0.3).unwrap();
        let mut rng = SplitMix64::new(71);
        for _ in 0..50 {
            let z = c(rng.range(-0.4, 0.4), rng.range(-0.4, 0.4));
            let a = CoverPoint::new(z, rng.range(-2.0, 2.0), z.norm() + rng.range(0.1, 1.5));
            let v = a.project();
            let margin = v.w.norm() - v.z.norm();
            let mut members = 0;
            for site in &atlas.sites {
                let prism = Prism::new(site, group.wedge_angle);
                if prism.classify(&a) != Region::Exterior {
                    members += 1;
                    assert!(site.reach >= margin - 1e-9, "containment breaches the reach bound");
                }
            }
            let candidates = atlas.sites.iter().filter(|s| s.reach >= margin - 1e-9).count();
            assert!(members <= candidates);
        }
    }

    #[test]
    fn family_roof_examples() {
        let group = e12();
        let atlas = enumerate_orbit(&group, 0.5).unwrap();
        // At the identity the base prism achieves the roof with height 1.
        let (h, achievers) = family_roof(&atlas, &GroupElement::identity()).unwrap();
        assert!((h - 1.0).abs() < 1e-9);
        assert!(achievers.iter().any(|&(idx, m)| idx == 0 && m == 0));
        // The roof dominates the base prism everywhere.
        let base = Prism::base(group.wedge_angle);
        let mut rng = SplitMix64::new(81);
        for _ in 0..100 {
            let g = GroupElement::normalized(c(rng.range(-0.8, 0.8), rng.range(-0.8, 0.8)), rng.range(-2.0, 2.0));
            let (h, _) = family_roof(&atlas, &g).unwrap();
            assert!(h >= base.section_height(&g) - 1e-12);
            assert!(h.is_finite());
        }
        // Equivariance under the wedge rotation: the roof point moves with
        // the group element.
        let rd = group.wedge_rotation;
        for _ in 0..50 {
            let g = GroupElement::normalized(c(rng.range(-0.6, 0.6), rng.range(-0.6, 0.6)), rng.range(-2.0, 2.0));
            let (h, _) = family_roof(&atlas, &g).unwrap();
            let moved = rd * g;
            let (hm, _) = family_roof(&atlas, &moved).unwrap();
            let lift = rd.act(&g.as_cover().at_height(h));
            assert!((lift.r - hm * moved.r() / moved.r()).abs() < 1e-9);
            assert!((hm - lift.r).abs() < 1e-9);
        }
        assert!(matches!(
            family_roof(
                &OrbitAtlas { sites: vec![], cutoff: 0.1, wedge_angle: 1.0, excluded_reach_max: 0.0 },
                &GroupElement::identity()
            ),
            Err(Error::EmptyAtlas)
        ));
    }

    #[test]
    fn star_polygon_examples() {
        let v = star_polygon(7, 1).unwrap();
        assert_eq!(v.len(), 14);
        let r = 1.0 / (PI / 14.0).cos();
        assert!(v.iter().all(|p| (p.norm() - r).abs() < 1e-12));

        assert_eq!(star_polygon(4, 1).unwrap().len(), 8);
        assert_eq!(star_polygon(5, 2).unwrap().len(), 5);
        assert_eq!(star_polygon(7, 3).unwrap().len(), 14);

        // Each edge lies on a line tangent to the unit circle: the distance
        // from the origin to the edge line is 1.
        for (p, k) in [(7u32, 1u32), (5, 2), (7, 3)] {
            let v = star_polygon(p, k).unwrap();
            let n = v.len();
            for j in 0..n {
                let (a, b) = (v[j], v[(j + 1) % n]);
                let d = b - a;
                let dist = (a.re * d.im - a.im * d.re).abs() / d.norm();
                assert!((dist - 1.0).abs() < 1e-9, "({p},{k}) edge {j}");
            }
        }

        assert!(star_polygon(5, 5).is_err());
        assert!(star_polygon(6, 2).is_err());
        assert!(star_polygon(3, 0).is_err());
    }

    proptest! {
        #[test]
        fn sides_partition_the_cone(
            re in -1.2..1.2f64, im in -1.2..1.2f64, alpha in -5.0..5.0f64, extra in 0.05..2.0f64,
            gre in -1.0..1.0f64, gim in -1.0..1.0f64, galpha in -3.0..3.0f64,
        ) {
            let z = c(re, im);
            let a = CoverPoint::new(z, alpha, z.norm() + extra);
            let hs = TangentHalfSpace::new(GroupElement::normalized(c(gre, gim), galpha));
            let inner = hs.contains_inner(&a);
            let outer = hs.contains_outer(&a);
            prop_assert!(inner || outer);
            if inner && outer {
                prop_assert!(hs.on_face(&a));
            }
        }

        #[test]
        fn chart_round_trip(re in -0.9..0.9f64, im in -0.9..0.9f64, t in -3.0..3.0f64) {
            let z = c(re, im);
            prop_assume!(z.norm_sqr() < 1.0 + t * t);
            let p = ChartPoint::new(z, t);
            let back = chart_to(&chart_from(&p)).unwrap();
            prop_assert!((back.z - p.z).norm() < 1e-12);
            prop_assert!((back.t - p.t).abs() < 1e-12);
        }
    }
}
