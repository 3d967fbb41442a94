//! Arithmetic in the flat space of signature (2,2), its negative cone, and
//! the universal cover of the unit quadric.
//!
//! The quadric `{|z|^2 - |w|^2 = -1}` in `C^2` is a copy of SU(1,1); its
//! universal cover is coordinatized by `(z, alpha, r)` where `alpha` is the
//! lifted argument of the second coordinate and `r = |w|`. All products keep
//! the argument exact, so central deck transformations stay distinguishable
//! from the identity. The correction term added to the arguments during a
//! product is the principal argument of `1 + conj(z_g) z_h / (w_g w_h)`,
//! which lies in (-pi/2, pi/2) whenever both factors sit inside the cone.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::Mul;

use crate::error::{Error, Result};

/// Point of the (2,2)-signature space, stored as two complex coordinates.
#[derive(Clone, Copy, Debug)]
pub struct PseudoVector {
    pub z: Complex64,
    pub w: Complex64,
}

impl PseudoVector {
    pub fn new(z: Complex64, w: Complex64) -> Self {
        Self { z, w }
    }

    /// The indefinite scalar product `Re(z1 conj(z2) - w1 conj(w2))`.
    pub fn dot(&self, other: &PseudoVector) -> f64 {
        (self.z * other.z.conj() - self.w * other.w.conj()).re
    }

    pub fn quad(&self) -> f64 {
        self.dot(self)
    }

    /// On the quadric `<a,a> = -1`, up to `tol`.
    pub fn on_quadric(&self, tol: f64) -> bool {
        (self.quad() + 1.0).abs() <= tol
    }

    /// Inside the negative cone, `|z| < |w|`.
    pub fn in_cone(&self) -> bool {
        self.quad() < 0.0
    }
}

/// The indefinite scalar product as a free function; symmetric in its
/// arguments.
pub fn bilinear_form(a: &PseudoVector, b: &PseudoVector) -> f64 {
    a.dot(b)
}

/// Point of the universal cover of the cone: `|z| < r`, argument `alpha`
/// lifted to the real line.
#[derive(Clone, Copy, Debug)]
pub struct CoverPoint {
    pub z: Complex64,
    pub alpha: f64,
    pub r: f64,
}

impl CoverPoint {
    pub fn new(z: Complex64, alpha: f64, r: f64) -> Self {
        debug_assert!(r > 0.0 && z.norm() < r, "point outside the covered cone");
        Self { z, alpha, r }
    }

    /// Covering projection onto the cone: `(z, r e^{i alpha})`.
    pub fn project(&self) -> PseudoVector {
        PseudoVector::new(self.z, Complex64::from_polar(self.r, self.alpha))
    }

    /// Radial retraction onto the covered quadric: divide `z` and `r` by
    /// `sqrt(r^2 - |z|^2)`. Idempotent.
    pub fn section(&self) -> GroupElement {
        let lambda = (self.r * self.r - self.z.norm_sqr()).sqrt();
        GroupElement {
            z: self.z / lambda,
            alpha: self.alpha,
            r: self.r / lambda,
        }
    }

    /// The point on the same fiber ray with prescribed `r` coordinate.
    pub fn at_height(&self, r: f64) -> CoverPoint {
        CoverPoint {
            z: self.z * (r / self.r),
            alpha: self.alpha,
            r,
        }
    }
}

/// Element of the covered group: a cover point satisfying `|z|^2 = r^2 - 1`.
///
/// `r` is stored redundantly and renormalized after every product so the
/// constraint never drifts.
#[derive(Clone, Copy, Debug)]
pub struct GroupElement {
    z: Complex64,
    alpha: f64,
    r: f64,
}

impl GroupElement {
    /// Canonical constructor: `r` is recomputed from `z`.
    pub fn normalized(z: Complex64, alpha: f64) -> Self {
        Self {
            z,
            alpha,
            r: (1.0 + z.norm_sqr()).sqrt(),
        }
    }

    pub fn identity() -> Self {
        Self {
            z: Complex64::new(0.0, 0.0),
            alpha: 0.0,
            r: 1.0,
        }
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Second coordinate `w = r e^{i alpha}` of the projection.
    pub fn w(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.alpha)
    }

    pub fn as_cover(&self) -> CoverPoint {
        CoverPoint {
            z: self.z,
            alpha: self.alpha,
            r: self.r,
        }
    }

    pub fn project(&self) -> PseudoVector {
        self.as_cover().project()
    }

    /// Lifted left action on the covered cone.
    ///
    /// Projects to the linear action on `C^2`; the argument of the result is
    /// `alpha_g + alpha_a` plus a correction in (-pi/2, pi/2).
    pub fn act(&self, a: &CoverPoint) -> CoverPoint {
        let wg = self.w();
        let wa = Complex64::from_polar(a.r, a.alpha);
        let z = wg.conj() * a.z + self.z * wa;
        let q = (self.z.conj() * a.z) / (wg * wa);
        let corr = Complex64::new(1.0 + q.re, q.im);
        debug_assert!(
            q.norm() >= 1.0 || corr.arg().abs() < FRAC_PI_2,
            "argument correction left its branch"
        );
        CoverPoint {
            z,
            alpha: self.alpha + a.alpha + corr.arg(),
            r: self.r * a.r * corr.norm(),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            z: -self.z,
            alpha: -self.alpha,
            r: self.r,
        }
    }

    /// Integer power by repeated multiplication; exponents stay small here.
    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { *self };
        let mut acc = GroupElement::identity();
        for _ in 0..n.unsigned_abs() {
            acc = acc * base;
        }
        acc
    }

    /// Action on the unit disk through the covered Moebius transformation
    /// `xi -> (conj(w) xi + z) / (conj(z) xi + w)`.
    pub fn mobius(&self, xi: Complex64) -> Complex64 {
        let w = self.w();
        (w.conj() * xi + self.z) / (self.z.conj() * xi + w)
    }

    /// Image of the disk origin; the "shadow" of the element.
    pub fn shadow(&self) -> Complex64 {
        self.z / self.w()
    }

    /// Lifted rotation about the disk origin through angle `t`; evaluates to
    /// `(0, -t/2, 1)`.
    pub fn rotation_about_origin(t: f64) -> Self {
        Self {
            z: Complex64::new(0.0, 0.0),
            alpha: -0.5 * t,
            r: 1.0,
        }
    }

    /// The hyperbolic translation moving the origin to `x`, lifted with zero
    /// argument. Unique positive translation along the geodesic from 0 to `x`.
    pub fn translation_to(x: Complex64) -> Result<Self> {
        if x.norm() >= 1.0 {
            return Err(Error::PointOutsideDisk(x.norm()));
        }
        let lambda = (1.0 - x.norm_sqr()).sqrt();
        Ok(Self {
            z: x / lambda,
            alpha: 0.0,
            r: 1.0 / lambda,
        })
    }

    /// Lifted rotation about `x` through angle `t`, conjugated from the
    /// rotation about the origin by the translation moving 0 to `x`.
    ///
    /// Any other conjugator differs by a rotation fixing `x` and yields the
    /// same element. At `t = 2 pi` the result is `(0, -pi, 1)` for every `x`.
    pub fn rotation_about(x: Complex64, t: f64) -> Result<Self> {
        let g = Self::translation_to(x)?;
        Ok(g * Self::rotation_about_origin(t) * g.inverse())
    }

    /// The m-th power of the positive generator of the deck group:
    /// `(0, -m pi, 1)`. Projects to the identity of the disk action for all m.
    pub fn central(m: i64) -> Self {
        Self {
            z: Complex64::new(0.0, 0.0),
            alpha: -(m as f64) * PI,
            r: 1.0,
        }
    }

    /// Recognizes a central element within `tol`, returning its deck index.
    pub fn central_index(&self, tol: f64) -> Option<i64> {
        if self.z.norm() > tol || (self.r - 1.0).abs() > tol {
            return None;
        }
        let m = (-self.alpha / PI).round() as i64;
        if (self.alpha + m as f64 * PI).abs() <= tol {
            Some(m)
        } else {
            None
        }
    }

    /// Coordinate distance `|dz| + |dalpha| + |dr|`; used for matching.
    pub fn dist(&self, other: &Self) -> f64 {
        (self.z - other.z).norm() + (self.alpha - other.alpha).abs() + (self.r - other.r).abs()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dist(other) <= tol
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: GroupElement) -> GroupElement {
        let c = self.act(&rhs.as_cover());
        debug_assert!((c.r - (1.0 + c.z.norm_sqr()).sqrt()).abs() < 1e-9);
        GroupElement::normalized(c.z, c.alpha)
    }
}
