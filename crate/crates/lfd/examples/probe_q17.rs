use lfd::carve::{carve, stability_certificate};
use lfd::orbit::enumerate_orbit;
use lfd::triangle::{lifted_group, TriangleSignature, VertexChoice};

fn main() {
    let sig = TriangleSignature::new([2, 4, 13]).unwrap();
    let group = lifted_group(sig, [1, -1, -1], VertexChoice::Auto).unwrap();
    println!("level {} p {} theta {:.4} tan_half {:.4}", group.level, group.isotropy_order, group.wedge_angle, (group.wedge_angle/2.0).tan());
    let mut cutoff = 0.1;
    for _ in 0..6 {
        let t0 = std::time::Instant::now();
        let atlas = match enumerate_orbit(&group, cutoff) {
            Ok(a) => a,
            Err(e) => { println!("cutoff {cutoff:.4}: atlas error {e}"); break; }
        };
        print!("cutoff {:.4}: atlas {} ({:?})", cutoff, atlas.len(), t0.elapsed());
        match carve(&group, &atlas) {
            Ok(c) => {
                let cert = stability_certificate(&atlas, &c);
                println!(" cells {} margin {:.4} cert {:?}", c.cells.len(), c.margin, cert.is_ok());
                if cert.is_ok() { break; }
                cutoff = (0.5 * cutoff).min(0.8 * c.margin);
            }
            Err(e) => { println!(" carve error {e}"); cutoff *= 0.5; }
        }
    }
}
