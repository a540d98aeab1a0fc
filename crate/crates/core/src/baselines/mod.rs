//! Two classic comparison detectors: the randomized Hough transform and
//! the effective voting method. Both report whole circles.

mod evm;
mod rht;

use crate::csa::{ArcRecord, ArcSource};
use crate::curves::CurveSegment;
use crate::digigeom::{circle_curve, CircleParams};
use crate::raster::{BinaryImage, Pixel};

pub use evm::{evm_detect, EvmConfig};
pub use rht::{rht_detect, RhtConfig};

/// Object pixels of `img` within `tol` of the circle, in raster order.
pub fn pixels_near_circle(img: &BinaryImage, circle: &CircleParams, tol: f64) -> Vec<Pixel> {
    let mut out = Vec::new();
    let (cx, cy, r) = (circle.center.x, circle.center.y, circle.radius);
    let outer = r + tol;
    let inner = (r - tol).max(0.0);
    let y0 = ((cy - outer).floor() as i64).max(0);
    let y1 = ((cy + outer).ceil() as i64).min(img.height() as i64 - 1);
    for y in y0..=y1 {
        let dy = y as f64 - cy;
        let span_out = outer * outer - dy * dy;
        if span_out < 0.0 {
            continue;
        }
        let xo = span_out.sqrt();
        let xi = if inner * inner - dy * dy > 0.0 {
            (inner * inner - dy * dy).sqrt()
        } else {
            -1.0
        };
        // two intervals, left and right of the centre (they merge when the
        // inner disc misses this row)
        let ranges = if xi < 0.0 {
            vec![((cx - xo).floor(), (cx + xo).ceil())]
        } else {
            vec![((cx - xo).floor(), (cx - xi).ceil()), ((cx + xi).floor(), (cx + xo).ceil())]
        };
        let mut last = i64::MIN;
        for (a, b) in ranges {
            let a = (a as i64).max(0).max(last + 1);
            let b = (b as i64).min(img.width() as i64 - 1);
            for x in a..=b {
                let p = Pixel::new(x as i32, y as i32);
                if img.get(p) && circle.distance_to(p.into()) <= tol {
                    out.push(p);
                }
            }
            last = last.max(b);
        }
    }
    out
}

/// Share of the circumference covered by object pixels lying on the
/// circle (within one pixel), capped at 1.
pub fn existing_rate(img: &BinaryImage, circle: &CircleParams) -> f64 {
    if circle.radius <= 0.0 {
        return 0.0;
    }
    let n = pixels_near_circle(img, circle, 1.0).len() as f64;
    (n / (std::f64::consts::TAU * circle.radius)).min(1.0)
}

/// Whole-circle record for a baseline detection.
pub(crate) fn circle_record(circle: CircleParams, absorbed: Vec<Pixel>) -> ArcRecord {
    let c = Pixel::new(circle.center.x.round() as i32, circle.center.y.round() as i32);
    let r = (circle.radius.round() as i32).max(1);
    let ring = circle_curve(c, r).expect("radius is positive");
    ArcRecord {
        segment: CurveSegment::from_parts(ring, true).cut_at_top_left(),
        center: circle.center,
        radius: circle.radius,
        source: ArcSource::Hough,
        merged_from: 1,
        sagitta: None,
        joined: vec![],
        absorbed,
    }
}
