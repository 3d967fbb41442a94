//! Acceptance suite: one check per shipping criterion, each printing its own
//! pass/fail line. Run with `cargo test -p lfd-cli --test acceptance --
//! --nocapture` to see the lines.

use std::time::Instant;

use lfd::analogue::{circle_domain, hyperbola_domain, hyperbola_naive_intersection_radius};
use lfd::carve::{carve_adaptive, verify_tiling};
use lfd::cover::{GroupElement, PseudoVector};
use lfd::halfspace::{star_polygon, Prism, Region};
use lfd::mesh::{euclidean_mesh, rotation_residual};
use lfd::num::SplitMix64;
use lfd::orbit::{central_words, enumerate_orbit};
use lfd::triangle::{
    find_lift_offsets, lifted_group, LiftedGroup, OffsetSearch, TriangleSignature, VertexChoice,
};
use num_complex::Complex64;

use lfd_cli::config::RunConfig;
use lfd_cli::export::{obj_string, report_json_string};
use lfd_cli::pipeline::run_pipeline;

type CheckResult = Result<String, String>;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_element(rng: &mut SplitMix64) -> GroupElement {
    GroupElement::normalized(c64(rng.range(-2.0, 2.0), rng.range(-2.0, 2.0)), rng.range(-6.0, 6.0))
}

fn ensure(cond: bool, msg: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

fn e12() -> LiftedGroup {
    lifted_group(TriangleSignature::new([2, 3, 7]).unwrap(), [0, 0, 0], VertexChoice::Auto).unwrap()
}

/// Independent matrix model of the projected group.
fn matrix_product(g: &PseudoVector, h: &PseudoVector) -> PseudoVector {
    // [[conj(w), z], [conj(z), w]] acting column-wise; the product point is
    // read back from the product matrix.
    PseudoVector::new(
        g.w.conj() * h.z + g.z * h.w,
        g.w * h.w + g.z.conj() * h.z,
    )
}

fn criterion_1_group_law() -> CheckResult {
    let start = Instant::now();
    let mut rng = SplitMix64::new(10_001);
    let mut worst_assoc: f64 = 0.0;
    for _ in 0..10_000 {
        let (g, h, k) = (random_element(&mut rng), random_element(&mut rng), random_element(&mut rng));
        worst_assoc = worst_assoc.max(((g * h) * k).dist(&(g * (h * k))));
    }
    ensure(worst_assoc <= 1e-9, &format!("associativity residual {worst_assoc:.3e}"))?;

    let mut worst_hom: f64 = 0.0;
    for _ in 0..10_000 {
        let (g, h) = (random_element(&mut rng), random_element(&mut rng));
        let lhs = (g * h).project();
        let rhs = matrix_product(&g.project(), &h.project());
        worst_hom = worst_hom.max((lhs.z - rhs.z).norm() + (lhs.w - rhs.w).norm());
    }
    ensure(worst_hom <= 1e-9, &format!("projection homomorphism residual {worst_hom:.3e}"))?;

    let deck = GroupElement::central(1);
    let mut worst_turn: f64 = 0.0;
    for _ in 0..100 {
        let x = loop {
            let x = c64(rng.range(-0.9, 0.9), rng.range(-0.9, 0.9));
            if x.norm() <= 0.9 {
                break x;
            }
        };
        let full = GroupElement::rotation_about(x, 2.0 * std::f64::consts::PI).unwrap();
        worst_turn = worst_turn.max(full.dist(&deck));
    }
    ensure(worst_turn <= 1e-9, &format!("full-turn residual {worst_turn:.3e}"))?;

    let elapsed = start.elapsed();
    ensure(elapsed.as_secs_f64() < 5.0, &format!("took {elapsed:?}, budget 5 s"))?;
    Ok(format!(
        "assoc {worst_assoc:.1e}, hom {worst_hom:.1e}, full-turn {worst_turn:.1e}, {elapsed:?}"
    ))
}

fn criterion_2_star_polygons() -> CheckResult {
    let cases = [(7u32, 1u32, 14usize), (4, 1, 8), (5, 2, 5), (7, 3, 14)];
    for (p, k, expected) in cases {
        let vertices = star_polygon(p, k).map_err(|e| e.to_string())?;
        ensure(
            vertices.len() == expected,
            &format!("({p},{k}): {} vertices, expected {expected}", vertices.len()),
        )?;
        let radius = 1.0 / (std::f64::consts::PI * k as f64 / (2.0 * p as f64)).cos();
        for v in &vertices {
            ensure(
                (v.norm() - radius).abs() <= 1e-9,
                &format!("({p},{k}): vertex radius {} vs {radius}", v.norm()),
            )?;
        }
    }
    Ok("counts 14/8/5/14, radii exact".to_string())
}

fn criterion_3_prism_bounds() -> CheckResult {
    let group = e12();
    let theta = group.wedge_angle;
    let bound = 1.0 / (0.5 * theta).cos();
    let base = Prism::base(theta);
    let mut rng = SplitMix64::new(30_003);
    let mut worst: f64 = 0.0;
    for _ in 0..100_000 {
        let g = GroupElement::normalized(
            c64(rng.range(-1.5, 1.5), rng.range(-1.5, 1.5)),
            rng.range(-4.0, 4.0),
        );
        let roof = base.section_height(&g);
        let h = (roof * rng.next_f64()).max(1e-9);
        let p = g.as_cover().at_height(h);
        if base.classify(&p) == Region::Exterior {
            return Err("sampled point left the base prism".into());
        }
        worst = worst.max(p.r);
    }
    ensure(worst <= bound + 1e-9, &format!("roof estimate violated: r = {worst} > {bound}"))?;

    let atlas = enumerate_orbit(&group, 0.5).map_err(|e| e.to_string())?;
    let mut worst_gap: f64 = f64::NEG_INFINITY;
    let sites: Vec<_> = atlas.sites.iter().take(10).collect();
    for i in 0..10_000 {
        let site = sites[i % sites.len()];
        let prism = Prism::new(site, theta);
        let g = GroupElement::normalized(
            c64(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)),
            rng.range(-3.0, 3.0),
        );
        let roof = prism.section_height(&g);
        let p = g.as_cover().at_height((roof * rng.next_f64()).max(1e-9));
        let v = p.project();
        let lower = v.w.norm() - v.z.norm();
        // Rotation-equivariant pairing of the orbit point with the
        // coordinates; coincides with x z for real x.
        let mid = (v.w - site.point.conj() * v.z).norm();
        if lower > mid + 1e-9 {
            return Err(format!("margin bound violated: {lower} > {mid}"));
        }
        if mid > site.reach + 1e-9 {
            return Err(format!("reach bound violated: {mid} > {}", site.reach));
        }
        worst_gap = worst_gap.max(mid - site.reach);
    }
    Ok(format!("10^5 roof samples max r {worst:.6}, 10^4 reach samples slack {worst_gap:.1e}"))
}

fn criterion_4_end_to_end() -> CheckResult {
    let start = Instant::now();
    let mut cfg = RunConfig::default();
    cfg.signature = [2, 3, 7];
    cfg.level = 1;
    cfg.samples = 500;
    cfg.out_dir = std::env::temp_dir().join("lfd-acceptance/e12");
    let _ = std::fs::remove_dir_all(&cfg.out_dir);
    let out = lfd_cli::run_and_export(&cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(elapsed.as_secs_f64() < 120.0, &format!("pipeline took {elapsed:?}"))?;
    ensure(out.mesh.is_closed, "boundary mesh is not closed")?;
    ensure(
        out.report.carve.as_ref().is_some_and(|c| c.cells > 0),
        "no cells carved",
    )?;
    // Complete involution: every boundary face has a partner and partners
    // point back.
    let mut labels: Vec<_> = out.carved.complex.boundary.iter().map(|f| f.label).collect();
    labels.sort();
    labels.dedup();
    for &l in &labels {
        let p = out.pairing.partner(l).ok_or(format!("unmatched face {l:?}"))?;
        ensure(out.pairing.partner(p) == Some(l), "pairing is not an involution")?;
    }
    Ok(format!(
        "{} cells, {} faces paired, closed mesh, {elapsed:?}",
        out.report.carve.as_ref().unwrap().cells,
        labels.len()
    ))
}

fn criterion_5_tiling() -> CheckResult {
    let group = e12();
    let carved = carve_adaptive(&group, 0.1).map_err(|e| e.to_string())?;
    let report = verify_tiling(&carved.atlas, 1000, 50_005).map_err(|e| e.to_string())?;
    ensure(
        report.covered == report.samples,
        &format!("covered {}/{}", report.covered, report.samples),
    )?;
    ensure(
        report.interior_double == 0,
        &format!("{} interior double covers", report.interior_double),
    )?;
    Ok(format!("{}/{} covered, 0 interior double covers", report.covered, report.samples))
}

fn criterion_6_volume_consistency() -> CheckResult {
    let sig335 = TriangleSignature::new([3, 3, 5]).unwrap();
    let order3 = lifted_group(sig335, [0, 0, 0], VertexChoice::Index(0)).unwrap();
    let order5 = lifted_group(sig335, [0, 0, 0], VertexChoice::Index(2)).unwrap();
    let v3 = carve_adaptive(&order3, 0.1).map_err(|e| e.to_string())?.complex.invariant_volume();
    let v5 = carve_adaptive(&order5, 0.1).map_err(|e| e.to_string())?.complex.invariant_volume();
    let vertex_gap = (v3 - v5).abs() / v5;
    ensure(vertex_gap < 0.01, &format!("base-vertex volumes differ by {:.2}%", 100.0 * vertex_gap))?;

    // Ratio across three presets, one of level 2.
    let presets = [
        ([2u32, 3, 7], [0i64, 0, 0]),
        ([3, 3, 4], [0, 0, 0]),
        ([3, 3, 5], [1, 1, 1]), // level 2
    ];
    let mut ratios = Vec::new();
    let mut levels = Vec::new();
    for (sig, offsets) in presets {
        let group = lifted_group(TriangleSignature::new(sig).unwrap(), offsets, VertexChoice::Auto)
            .unwrap();
        let volume = carve_adaptive(&group, 0.1).map_err(|e| e.to_string())?.complex.invariant_volume();
        ratios.push(volume / (group.level as f64 * group.signature.defect()));
        levels.push(group.level);
    }
    ensure(levels.contains(&2), "no level-2 preset in the comparison")?;
    let (lo, hi) = (
        ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    let spread = (hi - lo) / lo;
    ensure(spread < 0.01, &format!("ratio spread {:.2}%", 100.0 * spread))?;
    Ok(format!(
        "vertex volumes within {:.3}%, ratios {:.6}..{:.6} (spread {:.3}%)",
        100.0 * vertex_gap,
        lo,
        hi,
        100.0 * spread
    ))
}

fn criterion_7_symmetry() -> CheckResult {
    let group = e12();
    let carved = carve_adaptive(&group, 0.1).map_err(|e| e.to_string())?;
    let mesh = euclidean_mesh(&carved.complex, &carved.atlas);
    let corners = mesh.corner_vertices();
    ensure(corners.len() >= 7, "too few polyhedron corners")?;
    let residual = rotation_residual(&corners, 2.0 * std::f64::consts::PI / 7.0);
    ensure(residual <= 1e-6, &format!("rotation residual {residual:.3e}"))?;
    Ok(format!("{} corners, Hausdorff residual {residual:.1e}", corners.len()))
}

fn criterion_8_level_machinery() -> CheckResult {
    let sig237 = TriangleSignature::new([2, 3, 7]).unwrap();
    match find_lift_offsets(sig237, 1, 2).map_err(|e| e.to_string())? {
        OffsetSearch::Found([0, 0, 0]) => {}
        other => return Err(format!("(2,3,7) level 1 gave {other:?}")),
    }
    let sig335 = TriangleSignature::new([3, 3, 5]).unwrap();
    let offsets335 = match find_lift_offsets(sig335, 2, 2).map_err(|e| e.to_string())? {
        OffsetSearch::Found(s) => s,
        OffsetSearch::Unrealizable => return Err("(3,3,5) level 2 reported unrealizable".into()),
    };
    let sig239 = TriangleSignature::new([2, 3, 9]).unwrap();
    match find_lift_offsets(sig239, 3, 20).map_err(|e| e.to_string())? {
        OffsetSearch::Unrealizable => {}
        OffsetSearch::Found(s) => return Err(format!("(2,3,9) level 3 claimed offsets {s:?}")),
    }

    // Deck-word certificates for the level-1 and level-2 presets: the
    // smallest positive deck index among bounded words equals the level and
    // everything found is a multiple of it.
    for (sig, offsets, depth) in [(sig237, [0i64, 0, 0], 6usize), (sig335, offsets335, 9)] {
        let group = lifted_group(sig, offsets, VertexChoice::Auto).unwrap();
        let found = central_words(&group, depth);
        let k = group.level as i64;
        let min_pos = found.iter().copied().filter(|&m| m > 0).min();
        ensure(
            min_pos == Some(k),
            &format!("{sig}: smallest deck word {min_pos:?}, level {k}"),
        )?;
        ensure(
            found.iter().all(|&m| m % k == 0),
            &format!("{sig}: non-multiple deck index among {found:?}"),
        )?;
    }
    Ok(format!("(2,3,7)->[0,0,0], (3,3,5)^2 -> {offsets335:?}, (2,3,9)^3 unrealizable, certificates hold"))
}

fn criterion_9_analogues() -> CheckResult {
    let hexagon = circle_domain(6).map_err(|e| e.to_string())?;
    let radius = 2.0 / 3f64.sqrt();
    for v in &hexagon.vertices {
        let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
        ensure((r - radius).abs() <= 1e-12, &format!("hexagon vertex radius {r}"))?;
    }
    for (_, len) in &hexagon.arcs {
        ensure(
            (len - std::f64::consts::PI / 3.0).abs() <= 1e-12,
            &format!("arc length {len}"),
        )?;
    }

    let d = 0.73;
    let strip = hyperbola_domain(d, 6).map_err(|e| e.to_string())?;
    for face in &strip.faces {
        let (lo, hi) = face.projected;
        ensure((hi - lo - d).abs() <= 1e-12, &format!("face projects to length {}", hi - lo))?;
        // Independent check through the actual endpoints.
        let s0 = (face.endpoints[0][0] / face.endpoints[0][1]).atanh();
        let s1 = (face.endpoints[1][0] / face.endpoints[1][1]).atanh();
        ensure(((s1 - s0).abs() - d).abs() <= 1e-12, "endpoint parameters disagree")?;
    }
    let naive = hyperbola_naive_intersection_radius(d, 40).map_err(|e| e.to_string())?;
    ensure(naive <= 1e-8, &format!("naive intersection radius {naive:.3e}"))?;
    Ok(format!(
        "hexagon radius 2/sqrt(3), arcs pi/3, faces project to length {d}, naive radius {naive:.1e}"
    ))
}

fn criterion_10_determinism() -> CheckResult {
    let base = std::env::temp_dir().join("lfd-acceptance");
    let mut texts = Vec::new();
    for run in ["det-a", "det-b"] {
        let mut cfg = RunConfig::default();
        cfg.signature = [2, 3, 7];
        cfg.level = 1;
        cfg.samples = 300;
        cfg.out_dir = base.join(run);
        let _ = std::fs::remove_dir_all(&cfg.out_dir);
        let out = run_pipeline(&cfg).map_err(|e| e.to_string())?;
        texts.push((report_json_string(&out.report), obj_string(&out.mesh, &out.pairing)));
    }
    ensure(texts[0].0 == texts[1].0, "reports differ between runs")?;
    ensure(texts[0].1 == texts[1].1, "OBJ files differ between runs")?;
    Ok(format!(
        "byte-identical report ({} bytes) and OBJ ({} bytes)",
        texts[0].0.len(),
        texts[0].1.len()
    ))
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, fn() -> CheckResult)> = vec![
        ("group law residuals", criterion_1_group_law),
        ("star polygons", criterion_2_star_polygons),
        ("prism bounds", criterion_3_prism_bounds),
        ("end-to-end (2,3,7) level 1", criterion_4_end_to_end),
        ("tiling", criterion_5_tiling),
        ("volume consistency", criterion_6_volume_consistency),
        ("rotational symmetry", criterion_7_symmetry),
        ("level machinery", criterion_8_level_machinery),
        ("one-dimensional analogues", criterion_9_analogues),
        ("determinism", criterion_10_determinism),
    ];
    let mut failures = 0;
    for (idx, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", idx + 1),
            Err(reason) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {reason}", idx + 1);
            }
        }
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
