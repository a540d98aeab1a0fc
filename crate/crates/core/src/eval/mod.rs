//! Scoring detections against ground truth: pixel-level error rates,
//! one-to-one primitive matching, and the synthetic scenes that supply
//! the ground truth.

mod scene;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::csa::ArcRecord;
use crate::digigeom::{CircleParams, RealPoint};
use crate::error::Result;
use crate::raster::{line_pixels, BinaryImage, Pixel};

pub use scene::{random_scene_spec, synth_scene, CircleSpec, GroundTruth, Primitive, SceneSpec};

/// Pixel counts and the error rates derived from them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// Curve pixels in the scene.
    pub n_c: usize,
    /// Pixels on true circular arcs.
    pub n_g: usize,
    /// Pixels reported as arc pixels.
    pub n_p: usize,
    /// Reported pixels not on a true arc.
    pub n_fa: usize,
    /// True arc pixels not reported.
    pub n_fr: usize,
    /// False acceptances per hundred true arc pixels. `None` when there
    /// are no true arc pixels yet some were reported (the rate is
    /// unbounded).
    pub e1: Option<f64>,
    /// False rejections per hundred true arc pixels.
    pub e2: f64,
    /// Share of curve pixels classified correctly.
    pub ad: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_s: Option<f64>,
}

impl MetricsReport {
    pub fn from_counts(n_c: usize, n_g: usize, n_p: usize, n_fa: usize, n_fr: usize) -> Self {
        let pct = |n: usize| {
            if n_g == 0 {
                (n == 0).then_some(0.0)
            } else {
                Some(100.0 * n as f64 / n_g as f64)
            }
        };
        let ad = if n_c == 0 {
            1.0
        } else {
            (n_c as f64 - (n_fa + n_fr) as f64) / n_c as f64
        };
        MetricsReport {
            n_c,
            n_g,
            n_p,
            n_fa,
            n_fr,
            e1: pct(n_fa),
            // n_fr never exceeds n_g, so this is defined whenever n_g is 0
            e2: pct(n_fr).unwrap_or(0.0),
            ad,
            elapsed_s: None,
        }
    }

    pub const CSV_HEADER: &'static str = "n_c,n_g,n_p,n_fa,n_fr,E1,E2,AD";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.3},{:.3}",
            self.n_c,
            self.n_g,
            self.n_p,
            self.n_fa,
            self.n_fr,
            fmt_e1(self.e1),
            self.e2,
            self.ad
        )
    }
}

/// E1 for tables: three decimals, `inf` when unbounded.
pub fn fmt_e1(e1: Option<f64>) -> String {
    e1.map_or_else(|| "inf".to_string(), |v| format!("{v:.3}"))
}

/// Compares a mask of reported arc pixels against the truth.
pub fn compute_metrics(detected: &BinaryImage, truth: &GroundTruth) -> Result<MetricsReport> {
    detected.same_size(&truth.arc_mask)?;
    let n_fa = detected.difference_count(&truth.arc_mask)?;
    let n_fr = truth.arc_mask.difference_count(detected)?;
    Ok(MetricsReport::from_counts(
        truth.all_curves_mask.count(),
        truth.arc_mask.count(),
        detected.count(),
        n_fa,
        n_fr,
    ))
}

/// Tolerances for calling a detection a match: the centre within `center`
/// pixels and the radius within the larger of `radius` pixels and
/// `radius_rel` times the true radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub center: f64,
    pub radius: f64,
    pub radius_rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            center: 2.0,
            radius: 2.0,
            radius_rel: 0.0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub matched: usize,
    pub missed: usize,
    pub spurious: usize,
    /// `(truth index, detection index)` of each match.
    pub pairs: Vec<(usize, usize)>,
}

impl MatchReport {
    /// Matched share of the true primitives (1 when there are none).
    pub fn match_rate(&self) -> f64 {
        let n = self.matched + self.missed;
        if n == 0 {
            1.0
        } else {
            self.matched as f64 / n as f64
        }
    }
}

/// Greedy one-to-one matching: every (truth, detection) pair within
/// tolerance is ranked by centre distance, then radius difference, and
/// taken in that order while both sides are still free.
pub fn match_primitives(detected: &[CircleParams], truth: &[Primitive], tol: &Tolerance) -> MatchReport {
    let mut cands = Vec::new();
    for (i, t) in truth.iter().enumerate() {
        let allowed = tol.radius.max(tol.radius_rel * t.radius);
        for (j, d) in detected.iter().enumerate() {
            let dc = d.center.dist(t.center);
            let dr = (d.radius - t.radius).abs();
            if dc <= tol.center && dr <= allowed {
                cands.push((dc, dr, i, j));
            }
        }
    }
    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then((a.2, a.3).cmp(&(b.2, b.3))));
    let mut used_t = vec![false; truth.len()];
    let mut used_d = vec![false; detected.len()];
    let mut pairs = Vec::new();
    for (_, _, i, j) in cands {
        if !used_t[i] && !used_d[j] {
            used_t[i] = true;
            used_d[j] = true;
            pairs.push((i, j));
        }
    }
    pairs.sort_unstable();
    MatchReport {
        matched: pairs.len(),
        missed: truth.len() - pairs.len(),
        spurious: detected.len() - pairs.len(),
        pairs,
    }
}

/// Circles of a detection list, for matching.
pub fn circles_of(arcs: &[ArcRecord]) -> Vec<CircleParams> {
    arcs.iter().map(ArcRecord::circle).collect()
}

/// Union of the pixels each arc claimed in the original image.
pub fn detected_mask(arcs: &[ArcRecord], width: usize, height: usize) -> BinaryImage {
    let mut img = BinaryImage::new(width, height);
    for p in arcs.iter().flat_map(|a| &a.absorbed) {
        img.set(*p, true);
    }
    img
}

/// Number of reported arcs lying on a true straight line: at least half
/// their pixels within one pixel of a line and not within one pixel of
/// a true arc.
pub fn arcs_on_lines(arcs: &[ArcRecord], truth: &GroundTruth) -> usize {
    let line_px: HashSet<Pixel> = truth
        .lines
        .iter()
        .flat_map(|&[a, b]| line_pixels(a, b))
        .collect();
    let near = |set: &dyn Fn(Pixel) -> bool, p: Pixel| {
        set(p) || p.neighbors().any(|n| set(n))
    };
    let on_line = |p: Pixel| line_px.contains(&p);
    let on_arc = |p: Pixel| truth.arc_mask.get(p);
    arcs.iter()
        .filter(|a| {
            let px = a.segment.pixels();
            let hits = px
                .iter()
                .filter(|&&p| near(&on_line, p) && !near(&on_arc, p))
                .count();
            2 * hits >= px.len()
        })
        .count()
}

/// Centre error of a detection against a primitive.
pub fn center_error(detected: &CircleParams, truth: &Primitive) -> f64 {
    detected.center.dist(truth.center)
}

/// Circle of a primitive.
pub fn primitive_circle(p: &Primitive) -> CircleParams {
    CircleParams::new(RealPoint::new(p.center.x, p.center.y), p.radius)
}
