use crate::curves::CurveSegment;
use crate::digigeom::{sagitta_estimate, triangle_area2, CircleParams, RealPoint};
use crate::error::{Error, Result};
use crate::raster::Pixel;

use super::{ArcRecord, ArcSource};

/// Index of the pixel closest to the perpendicular bisector of the chord
/// between the run's two ends; ties go to the pixel nearer the middle.
pub(crate) fn foot_index(pixels: &[Pixel]) -> Result<usize> {
    let k = pixels.len();
    if k < 3 {
        return Err(Error::SegmentTooShort { len: k, min: 3 });
    }
    let (a, b) = (pixels[0], pixels[k - 1]);
    if a == b {
        return Err(Error::Degenerate("chord endpoints coincide"));
    }
    if pixels.iter().all(|&c| triangle_area2(a, c, b) == 0) {
        return Err(Error::Degenerate("all pixels lie on the chord"));
    }
    let (pa, pb) = (RealPoint::from(a), RealPoint::from(b));
    let mid = RealPoint::new((pa.x + pb.x) / 2.0, (pa.y + pb.y) / 2.0);
    let len = pa.dist(pb);
    let (ux, uy) = ((pb.x - pa.x) / len, (pb.y - pa.y) / len);
    let off = |c: Pixel| ((f64::from(c.x) - mid.x) * ux + (f64::from(c.y) - mid.y) * uy).abs();
    let centre = k / 2;
    Ok((0..k)
        .min_by(|&i, &j| {
            off(pixels[i])
                .total_cmp(&off(pixels[j]))
                .then(i.abs_diff(centre).cmp(&j.abs_diff(centre)))
        })
        .expect("non-empty"))
}

/// The pixel where the sagitta meets the curve.
pub fn find_sagitta_foot(seg: &CurveSegment) -> Result<Pixel> {
    Ok(seg.pixels()[foot_index(seg.pixels())?])
}

/// Part of the curve used for the sagitta: all of it, unless its ends
/// nearly meet, in which case the first half.
fn sagitta_span(seg: &CurveSegment) -> &[Pixel] {
    let px = seg.pixels();
    let k = px.len();
    let chord = RealPoint::from(px[0]).dist(px[k - 1].into());
    if seg.is_closed() || 4.0 * chord < k as f64 {
        &px[..=k / 2]
    } else {
        px
    }
}

/// Centre and radius from the sagitta of the arc's chord.
pub fn estimate_params(seg: &CurveSegment) -> Result<ArcRecord> {
    if seg.len() < 3 {
        return Err(Error::SegmentTooShort {
            len: seg.len(),
            min: 3,
        });
    }
    let span = sagitta_span(seg);
    let foot = span[foot_index(span)?];
    let est = sagitta_estimate(span[0], span[span.len() - 1], foot)?;
    Ok(ArcRecord {
        segment: seg.clone(),
        center: est.center,
        radius: est.radius,
        source: ArcSource::Sagitta,
        merged_from: 1,
        sagitta: Some(CircleParams::new(est.center, est.radius)),
        joined: vec![],
        absorbed: Vec::new(),
    })
}
