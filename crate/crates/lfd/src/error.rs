use thiserror::Error;

/// Errors surfaced by the construction pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("base point must lie in the open unit disk, |x| = {0} >= 1")]
    PointOutsideDisk(f64),

    #[error("signature ({0},{1},{2}) is not hyperbolic: 1/a1 + 1/a2 + 1/a3 must be < 1")]
    SignatureNotHyperbolic(u32, u32, u32),

    #[error("cone orders must all be >= 2")]
    BadConeOrder,

    #[error("word does not project to a central element (residual {0:.3e})")]
    NotARelator(f64),

    #[error("no vertex admits the base-point role at level {level}: need order > level, coprime to it")]
    NoAdmissibleFixedPoint { level: u32 },

    #[error("fixed-vertex index must be 1, 2 or 3, got {0}")]
    BadVertexIndex(usize),

    #[error("orbit cutoff must be positive, got {0}")]
    InvalidCutoff(f64),

    #[error("orbit enumeration exceeded {0} sites; increase the cutoff")]
    AtlasTooLarge(usize),

    #[error("orbit atlas is empty")]
    EmptyAtlas,

    #[error("point is not on the identity tangent face")]
    NotOnFace,

    #[error("star polygon needs p > k >= 1 with gcd(p,k) = 1, got p = {p}, k = {k}")]
    BadStarParameters { p: u32, k: u32 },

    #[error("cutoff {cutoff:.3e} too large for a stable carve (boundary margin {margin:.3e}); rerun with a smaller cutoff")]
    CutoffTooLarge { cutoff: f64, margin: f64 },

    #[error("carved region is not compact or left the cone: {0}")]
    CarveUnstable(String),

    #[error("face pairing incomplete: {0} unmatched faces")]
    PairingIncomplete(usize),

    #[error("regular m-gon needs m >= 3, got {0}: the tangent intersection is unbounded")]
    UnboundedPolygon(u32),
}

pub type Result<T> = std::result::Result<T, Error>;
