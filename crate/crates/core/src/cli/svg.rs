use std::f64::consts::TAU;
use std::fmt::Write;

use crate::csa::ArcRecord;
use crate::curves::CurveSegment;
use crate::digigeom::{polar_angle, RealPoint};
use crate::raster::BinaryImage;

const PALETTE: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#17becf"];

/// SVG of `img` with its object pixels in gray, each arc drawn as a
/// coloured circular arc along its fitted circle and each centre marked
/// with a cross. One SVG unit is one pixel; pixel (x, y) covers the unit
/// square at (x, y).
pub fn overlay_svg(img: &BinaryImage, arcs: &[ArcRecord]) -> String {
    let (w, h) = (img.width(), img.height());
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r##"<g fill="#b0b0b0" shape-rendering="crispEdges">"##);
    // one rectangle per horizontal run keeps the file small
    for y in 0..h {
        let row = &img.bits()[y * w..(y + 1) * w];
        let mut x = 0;
        while x < w {
            if !row[x] {
                x += 1;
                continue;
            }
            let start = x;
            while x < w && row[x] {
                x += 1;
            }
            let _ = writeln!(s, r#"<rect x="{start}" y="{y}" width="{}" height="1"/>"#, x - start);
        }
    }
    s.push_str("</g>\n");
    s.push_str("<g fill=\"none\" stroke-width=\"1.5\">\n");
    for (i, arc) in arcs.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        for seg in std::iter::once(&arc.segment).chain(&arc.joined) {
            let _ = writeln!(s, r#"<path stroke="{color}" d="{}"/>"#, arc_path(arc, seg));
        }
        let (cx, cy) = (arc.center.x + 0.5, arc.center.y + 0.5);
        let _ = writeln!(
            s,
            r#"<path stroke="{color}" d="M{:.2} {cy:.2}H{:.2}M{cx:.2} {:.2}V{:.2}"/>"#,
            cx - 3.0,
            cx + 3.0,
            cy - 3.0,
            cy + 3.0
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

/// Path data for the part of the arc's circle that `seg` covers.
fn arc_path(arc: &ArcRecord, seg: &CurveSegment) -> String {
    let (c, r) = (arc.center, arc.radius);
    let at = |t: f64| RealPoint::new(c.x + r * t.cos() + 0.5, c.y + r * t.sin() + 0.5);
    if seg.is_closed() {
        let (a, b) = (at(0.0), at(TAU / 2.0));
        return format!(
            "M{:.2} {:.2}A{r:.2} {r:.2} 0 1 1 {:.2} {:.2}A{r:.2} {r:.2} 0 1 1 {:.2} {:.2}Z",
            a.x, a.y, b.x, b.y, a.x, a.y
        );
    }
    let px = seg.pixels();
    let angle = |i: usize| polar_angle(c, px[i].into());
    let (ta, tm, tb) = (angle(0), angle(px.len() / 2), angle(px.len() - 1));
    // angles grow clockwise on screen, which is SVG's positive sweep
    let forward = (tb - ta).rem_euclid(TAU);
    let (sweep, span) = if (tm - ta).rem_euclid(TAU) <= forward {
        (1, forward)
    } else {
        (0, TAU - forward)
    };
    let large = u8::from(span > TAU / 2.0);
    let (a, b) = (at(ta), at(tb));
    format!("M{:.2} {:.2}A{r:.2} {r:.2} 0 {large} {sweep} {:.2} {:.2}", a.x, a.y, b.x, b.y)
}
