//! Hyperbolic triangle groups, their finite-level lifts, and the level
//! computation.
//!
//! A lift is specified constructively: each vertex rotation is lifted to the
//! cover and multiplied by a deck offset. The level comes out of the gcd of
//! the deck indices picked up by the relator words; the product relator's
//! index is always measured, never assumed.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::cover::GroupElement;
use crate::error::{Error, Result};
use crate::num::gcd_u64;

/// Cone orders of a triangle group; hyperbolic means `1/a1 + 1/a2 + 1/a3 < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TriangleSignature {
    orders: [u32; 3],
}

impl TriangleSignature {
    pub fn new(orders: [u32; 3]) -> Result<Self> {
        if orders.iter().any(|&a| a < 2) {
            return Err(Error::BadConeOrder);
        }
        // Exact integer form of 1/a1 + 1/a2 + 1/a3 < 1.
        let [a, b, c] = orders.map(u64::from);
        if b * c + a * c + a * b >= a * b * c {
            return Err(Error::SignatureNotHyperbolic(orders[0], orders[1], orders[2]));
        }
        Ok(Self { orders })
    }

    pub fn orders(&self) -> [u32; 3] {
        self.orders
    }

    /// `1 - sum 1/a_i`, the area of the triangle in units of pi.
    pub fn defect(&self) -> f64 {
        1.0 - self.orders.iter().map(|&a| 1.0 / a as f64).sum::<f64>()
    }
}

impl std::fmt::Display for TriangleSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.orders[0], self.orders[1], self.orders[2])
    }
}

/// A hyperbolic triangle realized in the disk together with the lifted
/// vertex rotations (no deck offsets yet).
#[derive(Clone, Debug)]
pub struct TriangleGeometry {
    pub signature: TriangleSignature,
    pub vertices: [Complex64; 3],
    pub rotations: [GroupElement; 3],
    /// True if the rotation angles had to be negated to satisfy the product
    /// relation downstairs.
    pub flipped: bool,
}

fn mobius_is_identity(g: &GroupElement, tol: f64) -> bool {
    let probes = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.31, 0.0),
        Complex64::new(-0.12, 0.4),
    ];
    probes.iter().all(|&p| (g.mobius(p) - p).norm() <= tol)
}

/// Places the triangle with the first vertex at the origin, the second on the
/// positive real axis, the third in the upper half-disk, and returns the
/// vertex rotations oriented so that their product projects to the identity.
pub fn build_triangle(signature: TriangleSignature) -> Result<TriangleGeometry> {
    let [a1, a2, a3] = signature.orders();
    let angles = [PI / a1 as f64, PI / a2 as f64, PI / a3 as f64];
    let (sa, sb) = (angles[0], angles[1]);
    let sc = angles[2];

    // Hyperbolic law of cosines for a triangle given by its angles.
    let side = |a: f64, b: f64, c: f64| -> f64 {
        let cosh = (a.cos() * b.cos() + c.cos()) / (a.sin() * b.sin());
        cosh.acosh()
    };
    let c12 = side(sa, sb, sc); // between vertices 1 and 2
    let c13 = side(sa, sc, sb); // between vertices 1 and 3

    let x1 = Complex64::new(0.0, 0.0);
    let x2 = Complex64::new((c12 / 2.0).tanh(), 0.0);
    let x3 = Complex64::from_polar((c13 / 2.0).tanh(), sa);
    let vertices = [x1, x2, x3];

    for sign in [1.0f64, -1.0] {
        let rotations = [
            GroupElement::rotation_about(x1, sign * 2.0 * PI / a1 as f64)?,
            GroupElement::rotation_about(x2, sign * 2.0 * PI / a2 as f64)?,
            GroupElement::rotation_about(x3, sign * 2.0 * PI / a3 as f64)?,
        ];
        let product = rotations[0] * rotations[1] * rotations[2];
        if mobius_is_identity(&product, 1e-9) {
            return Ok(TriangleGeometry {
                signature,
                vertices,
                rotations,
                flipped: sign < 0.0,
            });
        }
    }
    // Both orientations failed; the placement above makes this unreachable
    // for hyperbolic signatures.
    Err(Error::SignatureNotHyperbolic(a1, a2, a3))
}

/// A word in the vertex rotations: (generator index, power) pairs.
pub type Word = [(usize, i64)];

/// Evaluates a relator word in the cover and reads off its deck index.
///
/// The word must project to the identity of the disk action (checked to
/// 1e-6); the result is the integer `m` with word value `(0, -m pi, 1)`.
pub fn central_exponent(geometry: &TriangleGeometry, word: &Word) -> Result<i64> {
    let mut value = GroupElement::identity();
    for &(idx, pow) in word {
        value = value * geometry.rotations[idx].pow(pow);
    }
    if !mobius_is_identity(&value, 1e-6) {
        let probe = Complex64::new(0.31, 0.0);
        return Err(Error::NotARelator((value.mobius(probe) - probe).norm()));
    }
    value
        .central_index(1e-6)
        .ok_or(Error::NotARelator(value.z().norm()))
}

/// Which vertex carries the base point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexChoice {
    /// Admissible vertex of largest cone order (ties: lowest index).
    Auto,
    /// Explicit vertex, 0-based.
    Index(usize),
}

/// A finite-level lift of a triangle group, conjugated so the chosen fixed
/// point sits at the disk origin.
#[derive(Clone, Debug)]
pub struct LiftedGroup {
    pub signature: TriangleSignature,
    pub offsets: [i64; 3],
    /// Triangle vertices after the conjugation (vertex `base_vertex` is 0).
    pub vertices: [Complex64; 3],
    /// Lifted generators after the conjugation.
    pub generators: [GroupElement; 3],
    /// Level: index of the deck subgroup met by the lift.
    pub level: u32,
    /// Deck index of the product relator of the unlifted rotations.
    pub product_exponent: i64,
    /// Index of the vertex fixed at the origin.
    pub base_vertex: usize,
    /// Cone order of the base vertex.
    pub isotropy_order: u32,
    /// Wedge angle `pi * level / isotropy_order`.
    pub wedge_angle: f64,
    /// Generator of the lifted isotropy group of the origin.
    pub wedge_rotation: GroupElement,
}

impl LiftedGroup {
    /// Power of the isotropy generator, `(0, -m theta, 1)`.
    pub fn wedge_power(&self, m: i64) -> GroupElement {
        GroupElement::rotation_about_origin(2.0 * m as f64 * self.wedge_angle)
    }

    /// Largest relation residual of the lifted generators, in group
    /// coordinates; construction keeps this below 1e-9.
    pub fn relation_residual(&self) -> f64 {
        let [a1, a2, a3] = self.signature.orders();
        let mut worst: f64 = 0.0;
        for (i, &a) in [a1, a2, a3].iter().enumerate() {
            let lhs = self.generators[i].pow(a as i64);
            let rhs = GroupElement::central(1 + a as i64 * self.offsets[i]);
            worst = worst.max(lhs.dist(&rhs));
        }
        let prod = self.generators[0] * self.generators[1] * self.generators[2];
        let rhs = GroupElement::central(self.product_exponent + self.offsets.iter().sum::<i64>());
        worst.max(prod.dist(&rhs))
    }
}

/// Level of the lift with the given offsets: the gcd of the deck indices of
/// the relator lifts.
pub fn level_of(signature: TriangleSignature, offsets: [i64; 3], product_exponent: i64) -> u32 {
    let [a1, a2, a3] = signature.orders();
    let values = [
        1 + a1 as i64 * offsets[0],
        1 + a2 as i64 * offsets[1],
        1 + a3 as i64 * offsets[2],
        product_exponent + offsets.iter().sum::<i64>(),
    ];
    values
        .iter()
        .fold(0u64, |g, &v| gcd_u64(g, v.unsigned_abs())) as u32
}

/// Builds the lift, computes the level, selects the base vertex and
/// conjugates the whole group so that it sits at the origin.
pub fn lifted_group(
    signature: TriangleSignature,
    offsets: [i64; 3],
    choice: VertexChoice,
) -> Result<LiftedGroup> {
    let geometry = build_triangle(signature)?;
    let m = central_exponent(&geometry, &[(0, 1), (1, 1), (2, 1)])?;
    let level = level_of(signature, offsets, m);
    let orders = signature.orders();

    let admissible = |i: usize| -> bool {
        orders[i] > level && gcd_u64(orders[i] as u64, level as u64) == 1
    };
    let base_vertex = match choice {
        VertexChoice::Index(i) => {
            if i >= 3 {
                return Err(Error::BadVertexIndex(i + 1));
            }
            if !admissible(i) {
                return Err(Error::NoAdmissibleFixedPoint { level });
            }
            i
        }
        VertexChoice::Auto => (0..3)
            .filter(|&i| admissible(i))
            .max_by_key(|&i| (orders[i], std::cmp::Reverse(i)))
            .ok_or(Error::NoAdmissibleFixedPoint { level })?,
    };

    // Lift with deck offsets, then move the base vertex to the origin.
    let lifted = [
        geometry.rotations[0] * GroupElement::central(offsets[0]),
        geometry.rotations[1] * GroupElement::central(offsets[1]),
        geometry.rotations[2] * GroupElement::central(offsets[2]),
    ];
    let shift = GroupElement::translation_to(geometry.vertices[base_vertex])?.inverse();
    let conj = |g: &GroupElement| shift * *g * shift.inverse();
    let generators = [conj(&lifted[0]), conj(&lifted[1]), conj(&lifted[2])];
    let mut vertices = geometry.vertices.map(|v| shift.mobius(v));
    // Snap the base vertex onto the origin exactly.
    vertices[base_vertex] = Complex64::new(0.0, 0.0);

    let p = orders[base_vertex];
    let theta = PI * level as f64 / p as f64;
    let group = LiftedGroup {
        signature,
        offsets,
        vertices,
        generators,
        level,
        product_exponent: m,
        base_vertex,
        isotropy_order: p,
        wedge_angle: theta,
        wedge_rotation: GroupElement::rotation_about_origin(2.0 * theta),
    };
    debug_assert!(group.relation_residual() < 1e-9);
    Ok(group)
}

/// Outcome of the offset search for a target level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OffsetSearch {
    Found([i64; 3]),
    Unrealizable,
}

impl OffsetSearch {
    pub fn found(&self) -> Option<[i64; 3]> {
        match self {
            OffsetSearch::Found(s) => Some(*s),
            OffsetSearch::Unrealizable => None,
        }
    }
}

/// Exhaustive search for offsets realizing the target level inside the box
/// `|s_i| <= bound`. Coordinates are enumerated in the balanced order
/// 0, 1, -1, 2, -2, ... and the first hit is returned, so the smallest
/// offsets win.
pub fn find_lift_offsets(
    signature: TriangleSignature,
    target_level: u32,
    bound: i64,
) -> Result<OffsetSearch> {
    let geometry = build_triangle(signature)?;
    let m = central_exponent(&geometry, &[(0, 1), (1, 1), (2, 1)])?;
    let balanced: Vec<i64> = std::iter::once(0)
        .chain((1..=bound).flat_map(|v| [v, -v]))
        .collect();
    for &s1 in &balanced {
        for &s2 in &balanced {
            for &s3 in &balanced {
                if level_of(signature, [s1, s2, s3], m) == target_level {
                    return Ok(OffsetSearch::Found([s1, s2, s3]));
                }
            }
        }
    }
    Ok(OffsetSearch::Unrealizable)
}
