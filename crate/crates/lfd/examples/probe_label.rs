use lfd::cover::GroupElement;
use lfd::halfspace::{chart_from, ChartPoint};
use lfd::orbit::enumerate_orbit;
use lfd::triangle::{lifted_group, TriangleSignature, VertexChoice};
use std::f64::consts::FRAC_PI_2;

fn main() {
    let sig = TriangleSignature::new([2, 4, 13]).unwrap();
    let group = lifted_group(sig, [1, -1, -1], VertexChoice::Auto).unwrap();
    let theta = group.wedge_angle;
    let atlas = enumerate_orbit(&group, 0.1).unwrap();
    // Re-run the carve manually to catch the failing facet.
    match lfd::carve::carve(&group, &atlas) {
        Ok(c) => println!("carved fine: {} cells", c.cells.len()),
        Err(e) => println!("carve error: {e}"),
    }
    // Inspect every boundary-candidate plane by brute force: for a grid of
    // face points of each site's cutters, check which ones have NO honest
    // branch in the scan window.
    let half_width = ((std::f64::consts::PI + 0.5 * theta) / theta).ceil() as i64 + 1;
    println!("half_width {half_width}, theta {theta:.4}");
    for (si, site) in atlas.sites.iter().enumerate().skip(1).take(6) {
        let center = (site.rep.alpha() / theta).round() as i64;
        println!("site {si}: |x| {:.4} rep.alpha {:.4} center {center} reach {:.4}", site.point.norm(), site.rep.alpha(), site.reach);
    }
    // Find the failing facet via extract-boundary by hand: carve again but
    // with labels checked loosely.
    let _ = (chart_from(&ChartPoint::new(num_complex::Complex64::new(0.0,0.0), 0.0)), FRAC_PI_2, GroupElement::identity());
}
