use crate::curves::{partition_len, CurveSegment, SegmentList};
use crate::digigeom::{is_digitally_straight, is_straight_run, real_angle, RealPoint};
use crate::raster::Pixel;

use super::CsaConfig;

/// Drops every digitally straight segment.
pub fn remove_straight(list: &SegmentList, cfg: &CsaConfig) -> SegmentList {
    SegmentList {
        entries: list
            .entries
            .iter()
            .filter(|e| !is_digitally_straight(&e.segment, cfg.tau_h))
            .cloned()
            .collect(),
        junctions: list.junctions.clone(),
    }
}

/// Largest gap between the angle the end-to-end chord subtends at a
/// central-region pixel and the angle it subtends at the middle pixel
/// `pixels[k / 2]`. `None` for runs shorter than three pixels.
pub fn central_deviation(pixels: &[Pixel]) -> Option<f64> {
    let k = pixels.len();
    let regions = partition_len(k).ok()?;
    let a = RealPoint::from(pixels[0]);
    let b = RealPoint::from(pixels[k - 1]);
    let phi_m = real_angle(a, pixels[k / 2].into(), b);
    Some(
        pixels[regions.central]
            .iter()
            .map(|&c| (real_angle(a, c.into(), b) - phi_m).abs())
            .fold(0.0, f64::max),
    )
}

/// The chord test. When the two ends nearly meet (a closed curve, or a
/// chord shorter than a quarter of the pixel count) the angles along the
/// curve carry almost no information, so each half is tested instead.
pub fn passes_chord_test(pixels: &[Pixel], closed: bool, cfg: &CsaConfig) -> bool {
    let k = pixels.len();
    if k < 3 {
        return false;
    }
    let chord = RealPoint::from(pixels[0]).dist(pixels[k - 1].into());
    if closed || 4.0 * chord < k as f64 {
        let mid = k / 2;
        return passes_chord_test(&pixels[..=mid], false, cfg)
            && passes_chord_test(&pixels[mid..], false, cfg);
    }
    central_deviation(pixels).is_some_and(|d| d <= cfg.delta_phi)
}

/// Certifies circular runs of `seg`. A run shorter than `tau_c` or
/// digitally straight is dropped; one passing the chord test is kept
/// whole; any other is cut into halves (the first taking the middle pixel
/// when the length is odd) and each half is examined the same way.
pub fn verify_circularity(seg: &CurveSegment, cfg: &CsaConfig) -> Vec<CurveSegment> {
    let mut out = Vec::new();
    if seg.len() >= cfg.tau_c
        && !is_digitally_straight(seg, cfg.tau_h)
        && passes_chord_test(seg.pixels(), seg.is_closed(), cfg)
    {
        out.push(seg.clone());
        return out;
    }
    split(seg.pixels(), cfg, &mut out);
    out
}

fn split(pixels: &[Pixel], cfg: &CsaConfig, out: &mut Vec<CurveSegment>) {
    let k = pixels.len();
    let h = k.div_ceil(2);
    for half in [&pixels[..h], &pixels[h..]] {
        if half.len() < cfg.tau_c || is_straight_run(half, cfg.tau_h) {
            continue;
        }
        if passes_chord_test(half, false, cfg) {
            out.push(CurveSegment::from_parts(half.to_vec(), false));
        } else {
            split(half, cfg, out);
        }
    }
}
