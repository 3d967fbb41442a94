//! Orbit enumeration for the base point of a lifted group.
//!
//! Breadth-first search over words in the generators, one coset
//! representative per orbit point. Points are pruned by the reach bound
//! `f(t) = sqrt(1 - t^2) / cos(theta/2)`: a prism based at `x` can only meet
//! cone points whose margin `|w| - |z|` is below `f(|x|)`, so points with
//! `f(|x|) <= cutoff` cannot influence a region whose margin exceeds the
//! cutoff. The search expands past the kept radius by a fixed hyperbolic
//! slack so that kept points are not missed through detours.

use num_complex::Complex64;
use std::collections::{HashMap, VecDeque};

use crate::cover::GroupElement;
use crate::error::{Error, Result};
use crate::num::SNAP_TOL;
use crate::triangle::LiftedGroup;

/// Hyperbolic slack added to the expansion radius beyond the kept radius.
const EXPANSION_SLACK: f64 = 2.0;
/// Hard cap on visited orbit points; exceeding it means the cutoff is far
/// too small for this group.
const MAX_SITES: usize = 1_200_000;

/// One enumerated orbit point with its first-found coset representative.
#[derive(Clone, Debug)]
pub struct OrbitSite {
    /// Position in the unit disk.
    pub point: Complex64,
    /// Group element mapping the base point onto `point`.
    pub rep: GroupElement,
    /// How `rep` was written in the generators.
    pub word: String,
    /// Reach bound `f(|point|)`.
    pub reach: f64,
}

/// The enumerated orbit, sorted by `(|x|, arg x)`; the base point is first.
#[derive(Clone, Debug)]
pub struct OrbitAtlas {
    pub sites: Vec<OrbitSite>,
    pub cutoff: f64,
    /// Wedge angle of the group the atlas was built for.
    pub wedge_angle: f64,
    /// Largest reach bound seen among visited points that were dropped by
    /// the cutoff; always <= cutoff.
    pub excluded_reach_max: f64,
}

impl OrbitAtlas {
    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    /// Reach bound `f(t) = sqrt(1 - t^2) / cos(theta/2)`.
    pub fn reach_bound(wedge_angle: f64, t: f64) -> f64 {
        (1.0 - t * t).max(0.0).sqrt() / (0.5 * wedge_angle).cos()
    }
}

/// Spatial hash over the disk for tolerance-based dedup.
struct PointSet {
    cell: f64,
    map: HashMap<(i64, i64), Vec<Complex64>>,
}

impl PointSet {
    fn new(cell: f64) -> Self {
        Self { cell, map: HashMap::new() }
    }

    fn key(&self, p: Complex64) -> (i64, i64) {
        ((p.re / self.cell).floor() as i64, (p.im / self.cell).floor() as i64)
    }

    fn contains(&self, p: Complex64, tol: f64) -> bool {
        let (kx, ky) = self.key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = self.map.get(&(kx + dx, ky + dy)) {
                    if bucket.iter().any(|&q| (p - q).norm() < tol) {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn insert(&mut self, p: Complex64) {
        let key = self.key(p);
        self.map.entry(key).or_default().push(p);
    }
}

fn generator_list(group: &LiftedGroup) -> Vec<(String, GroupElement)> {
    let mut gens = Vec::new();
    for (i, &order) in group.signature.orders().iter().enumerate() {
        for j in 1..order as i64 {
            gens.push((format!("g{}^{}", i + 1, j), group.generators[i].pow(j)));
        }
    }
    gens
}

/// Enumerates the orbit of the origin, keeping points with reach above the
/// cutoff. Deterministic: identical input produces an identical atlas.
pub fn enumerate_orbit(group: &LiftedGroup, cutoff: f64) -> Result<OrbitAtlas> {
    if !(cutoff > 0.0) {
        return Err(Error::InvalidCutoff(cutoff));
    }
    let theta = group.wedge_angle;
    let cos_half = (0.5 * theta).cos();

    // Euclidean keep radius from f(|x|) > cutoff, then hyperbolic slack.
    let keep_r2 = 1.0 - (cutoff * cos_half).powi(2);
    let expand_r = if keep_r2 <= 0.0 {
        0.0
    } else {
        let keep_r = keep_r2.sqrt().min(1.0 - 1e-12);
        let d_expand = 2.0 * keep_r.atanh() + EXPANSION_SLACK;
        (d_expand / 2.0).tanh()
    };

    let gens = generator_list(group);
    let mut seen = PointSet::new(10.0 * SNAP_TOL);
    let mut queue = VecDeque::new();
    let mut excluded_reach_max: f64 = 0.0;

    let origin = OrbitSite {
        point: Complex64::new(0.0, 0.0),
        rep: GroupElement::identity(),
        word: "e".to_string(),
        reach: OrbitAtlas::reach_bound(theta, 0.0),
    };
    seen.insert(origin.point);
    queue.push_back(origin.clone());
    let mut visited = vec![origin];

    while let Some(site) = queue.pop_front() {
        for (label, gen) in &gens {
            let rep = *gen * site.rep;
            let point = rep.shadow();
            if point.norm() > expand_r || seen.contains(point, SNAP_TOL) {
                continue;
            }
            if visited.len() >= MAX_SITES {
                return Err(Error::AtlasTooLarge(MAX_SITES));
            }
            let word = if site.word == "e" {
                label.clone()
            } else {
                format!("{label}*{}", site.word)
            };
            let next = OrbitSite {
                point,
                rep,
                word,
                reach: OrbitAtlas::reach_bound(theta, point.norm()),
            };
            seen.insert(point);
            visited.push(next.clone());
            queue.push_back(next);
        }
    }

    let mut sites = Vec::new();
    for site in visited {
        if site.reach > cutoff {
            sites.push(site);
        } else {
            excluded_reach_max = excluded_reach_max.max(site.reach);
        }
    }
    sites.sort_by(|a, b| {
        a.point
            .norm()
            .total_cmp(&b.point.norm())
            .then(a.point.arg().total_cmp(&b.point.arg()))
    });

    Ok(OrbitAtlas {
        sites,
        cutoff,
        wedge_angle: theta,
        excluded_reach_max,
    })
}

/// Central elements reachable as words of bounded length, as deck indices.
///
/// Used to certify the computed level: the smallest positive index found
/// must equal the level, and every found index must be a multiple of it.
pub fn central_words(group: &LiftedGroup, max_length: usize) -> Vec<i64> {
    let letters: Vec<GroupElement> = group
        .generators
        .iter()
        .flat_map(|g| [*g, g.inverse()])
        .collect();

    let quant = |g: &GroupElement| -> (i64, i64, i64) {
        (
            (g.z().re / 1e-6).round() as i64,
            (g.z().im / 1e-6).round() as i64,
            (g.alpha() / 1e-6).round() as i64,
        )
    };

    let mut found = Vec::new();
    let mut seen = HashMap::new();
    let mut frontier = vec![GroupElement::identity()];
    seen.insert(quant(&GroupElement::identity()), ());

    for _ in 0..max_length {
        let mut next = Vec::new();
        for g in &frontier {
            for l in &letters {
                let h = *l * *g;
                let key = quant(&h);
                if seen.contains_key(&key) {
                    continue;
                }
                seen.insert(key, ());
                if let Some(m) = h.central_index(1e-6) {
                    found.push(m);
                }
                next.push(h);
            }
        }
        frontier = next;
    }
    found.sort_unstable();
    found.dedup();
    found
}

/// Checks that bounded words realize exactly the deck subgroup of the
/// computed level: some word evaluates to the level-th deck power and no
/// word evaluates to a smaller positive power.
pub fn level_certificate(group: &LiftedGroup, max_length: usize) -> bool {
    let found = central_words(group, max_length);
    let k = group.level as i64;
    let min_pos = found.iter().copied().filter(|&m| m > 0).min();
    min_pos == Some(k) && found.iter().all(|&m| m % k == 0)
}
