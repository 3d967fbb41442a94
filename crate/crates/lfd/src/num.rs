//! Small numeric utilities shared across the crate: tolerances, a seedable
//! generator for deterministic sampling, and angle/lattice helpers.

/// Tolerance for algebraic identities (normalization, group axioms).
pub const ALG_TOL: f64 = 1e-12;
/// Tolerance for geometric predicates (half-space membership, face snapping).
pub const GEO_TOL: f64 = 1e-9;
/// Tolerance for merging nearby points (orbit dedup, mesh vertices).
pub const SNAP_TOL: f64 = 1e-7;

/// Distance from `x` to the nearest integer multiple of `step` (step > 0).
pub fn dist_to_multiple(x: f64, step: f64) -> f64 {
    let m = (x / step).round();
    (x - m * step).abs()
}

/// Nearest integer multiple index: the `m` minimizing |x - m step|.
pub fn nearest_multiple(x: f64, step: f64) -> i64 {
    (x / step).round() as i64
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Rounds `v` to `digits` significant decimal digits. Keeps zero and
/// non-finite values unchanged.
pub fn round_sig(v: f64, digits: i32) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let scale = digits - 1 - v.abs().log10().floor() as i32;
    let factor = 10f64.powi(scale);
    (v * factor).round() / factor
}

/// SplitMix64: tiny deterministic generator for sampling in tests and
/// verification passes. Not cryptographic.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}
