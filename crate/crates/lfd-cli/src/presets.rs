//! Named presets: the three classical series of finite-level triangle
//! groups, indexed the way the corresponding singularity series are.
//!
//! Series E is based at 10, Z at 9, Q at 8; the residue of n mod 4 selects
//! the signature family and the level formula. Each catalog entry is tagged
//! realizable or not by the offset search.

use lfd::triangle::{find_lift_offsets, OffsetSearch, TriangleSignature};

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: String,
    pub series: char,
    pub n: u32,
    pub level: u32,
    pub signature: [u32; 3],
    pub realizable: bool,
    pub offsets: Option<[i64; 3]>,
}

fn series_entry(series: char, base: u32, n: u32) -> Option<(u32, [u32; 3])> {
    let diff = n.checked_sub(base)?;
    let (level, signature) = match n % 4 {
        r if r == (base + 2) % 4 => {
            // (2, 3, ...) family: level = (n - base) / 2.
            if diff % 2 != 0 {
                return None;
            }
            let k = diff / 2;
            let last = match series {
                'E' => k + 6,
                'Z' => 2 * k + 6,
                _ => 3 * k + 6,
            };
            (k, [2, 3, last])
        }
        r if r == base % 4 => {
            // (3, 3, ...) family: level = (n - base) / 4.
            if diff % 4 != 0 {
                return None;
            }
            let k = diff / 4;
            let last = match series {
                'E' => k + 3,
                'Z' => 2 * k + 3,
                _ => 3 * k + 3,
            };
            (k, [3, 3, last])
        }
        _ => {
            // (2, 4, ...) family: level = (n - base) / 3.
            if diff % 3 != 0 {
                return None;
            }
            let k = diff / 3;
            let last = match series {
                'E' => k + 4,
                'Z' => 2 * k + 4,
                _ => 3 * k + 4,
            };
            (k, [2, 4, last])
        }
    };
    if level == 0 {
        return None;
    }
    Some((level, signature))
}

/// The preset catalog for n up to the given bound.
pub fn catalog(max_n: u32) -> Vec<Preset> {
    let mut out = Vec::new();
    for (series, base) in [('E', 10u32), ('Z', 9), ('Q', 8)] {
        for n in base + 1..=max_n {
            let Some((level, signature)) = series_entry(series, base, n) else {
                continue;
            };
            if TriangleSignature::new(signature).is_err() {
                continue;
            }
            let offsets = TriangleSignature::new(signature)
                .ok()
                .and_then(|sig| find_lift_offsets(sig, level, 5).ok())
                .and_then(|s| match s {
                    OffsetSearch::Found(o) => Some(o),
                    OffsetSearch::Unrealizable => None,
                });
            out.push(Preset {
                name: format!("{series}_{n}"),
                series,
                n,
                level,
                signature,
                realizable: offsets.is_some(),
                offsets,
            });
        }
    }
    out.sort_by_key(|p| (p.series, p.n));
    out
}

/// Looks a preset up by name, e.g. `E_12` (case-insensitive, `E12` works).
pub fn find(name: &str) -> Option<Preset> {
    let wanted = name.trim().to_uppercase().replace('_', "");
    catalog(40)
        .into_iter()
        .find(|p| format!("{}{}", p.series, p.n) == wanted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows() {
        let e12 = find("E_12").unwrap();
        assert_eq!((e12.level, e12.signature), (1, [2, 3, 7]));
        assert!(e12.realizable);
        assert_eq!(e12.offsets, Some([0, 0, 0]));

        let z13 = find("Z_13").unwrap();
        assert_eq!((z13.level, z13.signature), (1, [3, 3, 5]));
        assert!(z13.realizable);

        let q10 = find("Q_10").unwrap();
        assert_eq!((q10.level, q10.signature), (1, [2, 3, 9]));
        assert!(q10.realizable);

        let e14 = find("E_14").unwrap();
        assert_eq!((e14.level, e14.signature), (1, [3, 3, 4]));

        let e18 = find("E_18").unwrap();
        assert_eq!((e18.level, e18.signature), (2, [3, 3, 5]));
        assert!(e18.realizable);

        // The level formula cannot reach level 3 for (2,3,9).
        let e16 = find("E_16").unwrap();
        assert_eq!((e16.level, e16.signature), (3, [2, 3, 9]));
        assert!(!e16.realizable);
    }

    #[test]
    fn catalog_is_sorted_and_named() {
        let all = catalog(30);
        assert!(all.len() > 10);
        for p in &all {
            assert_eq!(p.name, format!("{}_{}", p.series, p.n));
            assert!(p.level >= 1);
        }
        let names: Vec<&str> = all.iter().map(|p| p.name.as_str()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
    }
}
