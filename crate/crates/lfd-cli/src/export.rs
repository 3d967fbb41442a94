//! File exporters: OBJ mesh, JSON report, SVG projections. All output is
//! generated through deterministic string builders so byte-identical runs
//! can be asserted.

use std::fmt::Write as _;
use std::path::Path;

use lfd::analogue::{CircleDomain, HyperbolaDomain};
use lfd::carve::FacePairing;
use lfd::mesh::Mesh;

use crate::pipeline::{PipelineError, Report, Timings};

fn io_err<T>(r: std::io::Result<T>, path: &Path) -> Result<T, PipelineError> {
    r.map_err(|e| PipelineError::Io(format!("{}: {e}", path.display())))
}

/// Wavefront OBJ: vertices with exactly nine decimal places, triangulated
/// faces grouped per boundary face, comments mapping groups to generator
/// words and their pairing partners.
pub fn obj_string(mesh: &Mesh, pairing: &FacePairing) -> String {
    let mut out = String::new();
    out.push_str("# fundamental domain boundary mesh\n");
    out.push_str(&format!(
        "# {} vertices, {} faces, euler characteristic {}\n",
        mesh.vertices.len(),
        mesh.faces.len(),
        mesh.euler_characteristic
    ));
    for (i, face) in mesh.faces.iter().enumerate() {
        let partner = pairing
            .partner(face.label)
            .and_then(|p| mesh.faces.iter().find(|f| f.label == p))
            .map(|f| f.word.clone())
            .unwrap_or_else(|| "unpaired".to_string());
        out.push_str(&format!("# face group {i}: cut by {} pairs-with {partner}\n", face.word));
    }
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {:.9} {:.9} {:.9}", v[0], v[1], v[2]);
    }
    let tris = mesh.triangles();
    let mut current_face = usize::MAX;
    for (face_idx, tri) in tris {
        if face_idx != current_face {
            let _ = writeln!(out, "g face_{face_idx}");
            current_face = face_idx;
        }
        let _ = writeln!(out, "f {} {} {}", tri[0] + 1, tri[1] + 1, tri[2] + 1);
    }
    out
}

pub fn write_obj(path: &Path, mesh: &Mesh, pairing: &FacePairing) -> Result<(), PipelineError> {
    io_err(std::fs::write(path, obj_string(mesh, pairing)), path)
}

pub fn report_json_string(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn write_report(path: &Path, report: &Report) -> Result<(), PipelineError> {
    io_err(std::fs::write(path, report_json_string(report)), path)
}

pub fn write_timings(path: &Path, timings: &Timings) -> Result<(), PipelineError> {
    let mut s = serde_json::to_string_pretty(timings).expect("timings serialize");
    s.push('\n');
    io_err(std::fs::write(path, s), path)
}

fn svg_header(out: &mut String, width: f64, height: f64) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width:.2} {height:.2}\" \
         width=\"{width:.2}\" height=\"{height:.2}\">"
    );
}

fn polygon_path(points: &[(f64, f64)]) -> String {
    let mut d = String::new();
    for (i, (x, y)) in points.iter().enumerate() {
        let cmd = if i == 0 { 'M' } else { 'L' };
        let _ = write!(d, "{cmd}{x:.6} {y:.6} ");
    }
    d.push('Z');
    d
}

/// Two orthographic projections of the mesh: down the rotational axis and
/// perpendicular to it, side by side.
pub fn svg_string(mesh: &Mesh) -> String {
    const SCALE: f64 = 180.0;
    const PANEL: f64 = 420.0;
    let mut out = String::new();
    svg_header(&mut out, 2.0 * PANEL, PANEL);
    let _ = writeln!(
        out,
        "<style>path{{fill:#9db7d4;fill-opacity:0.35;stroke:#1f3a5f;stroke-width:0.8}}</style>"
    );
    for (panel, along_axis) in [(0.0, true), (PANEL, false)] {
        let _ = writeln!(out, "<g transform=\"translate({},{})\">", panel + PANEL / 2.0, PANEL / 2.0);
        let project = |v: [f64; 3]| -> (f64, f64) {
            if along_axis {
                (SCALE * v[0], -SCALE * v[1])
            } else {
                (SCALE * v[0], -SCALE * v[2])
            }
        };
        // Back-to-front is irrelevant for a wireframe-with-fill sketch;
        // faces are emitted in catalog order for determinism.
        for face in &mesh.faces {
            let pts: Vec<(f64, f64)> = face.polygon.iter().map(|&i| project(mesh.vertices[i])).collect();
            let _ = writeln!(out, "<path d=\"{}\"/>", polygon_path(&pts));
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    out
}

pub fn write_svg(path: &Path, mesh: &Mesh) -> Result<(), PipelineError> {
    io_err(std::fs::write(path, svg_string(mesh)), path)
}

/// SVG of the circle-group demo: tangent polygon, unit circle, projected
/// arcs.
pub fn svg_circle_domain(domain: &CircleDomain) -> String {
    const SCALE: f64 = 120.0;
    const PANEL: f64 = 360.0;
    let mut out = String::new();
    svg_header(&mut out, PANEL, PANEL);
    let _ = writeln!(out, "<g transform=\"translate({0},{0})\">", PANEL / 2.0);
    let _ = writeln!(
        out,
        "<circle cx=\"0\" cy=\"0\" r=\"{:.6}\" fill=\"none\" stroke=\"#888\" stroke-width=\"0.6\"/>",
        SCALE
    );
    let pts: Vec<(f64, f64)> = domain
        .vertices
        .iter()
        .map(|v| (SCALE * v[0], -SCALE * v[1]))
        .collect();
    let _ = writeln!(
        out,
        "<path d=\"{}\" fill=\"none\" stroke=\"#1f3a5f\" stroke-width=\"1.2\"/>",
        polygon_path(&pts)
    );
    for (mid, len) in &domain.arcs {
        let (a, b) = (mid - len / 2.0, mid + len / 2.0);
        let steps = 24;
        let arc: Vec<(f64, f64)> = (0..=steps)
            .map(|i| {
                let t = a + (b - a) * i as f64 / steps as f64;
                (SCALE * t.cos(), -SCALE * t.sin())
            })
            .collect();
        let mut d = String::new();
        for (i, (x, y)) in arc.iter().enumerate() {
            let cmd = if i == 0 { 'M' } else { 'L' };
            let _ = write!(d, "{cmd}{x:.6} {y:.6} ");
        }
        let _ = writeln!(out, "<path d=\"{d}\" fill=\"none\" stroke=\"#c03030\" stroke-width=\"2.0\"/>");
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    out
}

/// SVG of the hyperbola demo: both cone branches, the strip boundaries and
/// the projected faces.
pub fn svg_hyperbola_domain(domain: &HyperbolaDomain) -> String {
    const SCALE: f64 = 60.0;
    const PANEL: f64 = 520.0;
    let mut out = String::new();
    svg_header(&mut out, PANEL, PANEL);
    let _ = writeln!(out, "<g transform=\"translate({0},{0})\">", PANEL / 2.0);
    // Hyperbola branches.
    for eps in [1.0f64, -1.0] {
        let steps = 64;
        let pts: Vec<(f64, f64)> = (0..=steps)
            .map(|i| {
                let t = -2.5 + 5.0 * i as f64 / steps as f64;
                (SCALE * eps * t.sinh(), -SCALE * eps * t.cosh())
            })
            .collect();
        let mut d = String::new();
        for (i, (x, y)) in pts.iter().enumerate() {
            let cmd = if i == 0 { 'M' } else { 'L' };
            let _ = write!(d, "{cmd}{x:.6} {y:.6} ");
        }
        let _ = writeln!(out, "<path d=\"{d}\" fill=\"none\" stroke=\"#888\" stroke-width=\"0.6\"/>");
    }
    for face in &domain.faces {
        let (a, b) = (face.endpoints[0], face.endpoints[1]);
        let _ = writeln!(
            out,
            "<line x1=\"{:.6}\" y1=\"{:.6}\" x2=\"{:.6}\" y2=\"{:.6}\" stroke=\"#1f3a5f\" stroke-width=\"1.4\"/>",
            SCALE * a[0],
            -SCALE * a[1],
            SCALE * b[0],
            -SCALE * b[1]
        );
    }
    let _ = writeln!(out, "</g>");
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use lfd::analogue::circle_domain;

    #[test]
    fn obj_vertex_formatting_is_fixed_width() {
        // The formatting contract: the value 1 prints with nine decimals.
        let line = format!("v {:.9} {:.9} {:.9}", 1.0, 0.25, -0.5);
        assert_eq!(line, "v 1.000000000 0.250000000 -0.500000000");
    }

    #[test]
    fn circle_svg_contains_polygon() {
        let svg = svg_circle_domain(&circle_domain(6).unwrap());
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("circle"));
        assert!(svg.matches("<path").count() >= 7); // polygon + 6 arcs
        assert!(svg.ends_with("</svg>\n"));
    }
}
