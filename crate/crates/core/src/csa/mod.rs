//! The chord-and-sagitta detector.
//!
//! Stages: thinning and skeleton clean-up, curve tracing, removal of
//! straight curves, chord-angle certification with recursive halving,
//! merging of arcs that meet, sagitta estimates, restricted Hough
//! refinement and re-absorption of the pixels thinning took away.

mod absorb;
mod circularity;
mod cocircular;
mod hough;
mod merge;
mod params;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::curves::{extract_segments, CurveSegment, SegmentList};
use crate::digigeom::{CircleParams, RealPoint};
use crate::error::{Error, Result};
use crate::raster::{self, BinaryImage, Pixel};

pub use absorb::{absorb_thick_pixels, union_mask};
pub use circularity::{central_deviation, passes_chord_test, remove_straight, verify_circularity};
pub use cocircular::join_cocircular;
pub use hough::{restricted_hough, RestrictedAccumulator};
pub use merge::{merge_adjacent, CertifiedArc};
pub use params::{estimate_params, find_sagitta_foot};

#[derive(Clone, Debug, PartialEq)]
pub struct CsaConfig {
    /// Area-deviation threshold of the straightness test.
    pub tau_h: i64,
    /// Shortest curve considered for circularity.
    pub tau_c: usize,
    /// Allowed spread of chord angles over the central region (radians).
    pub delta_phi: f64,
    /// Most circumcircle triples voted per arc.
    pub hough_triple_budget: usize,
    /// Longest skeleton spur pruned before tracing.
    pub spur_length: usize,
    /// Widest skeleton break bridged before tracing.
    pub max_gap: usize,
    /// How far from the fitted circle re-absorbed pixels may lie.
    pub absorb_distance: f64,
    /// How close every pixel of an arc must lie to a longer arc's circle
    /// for the two to be reported as one.
    pub cocircular_distance: f64,
}

impl Default for CsaConfig {
    fn default() -> Self {
        CsaConfig {
            tau_h: 2,
            tau_c: 7,
            delta_phi: PI / 18.0,
            hough_triple_budget: 2000,
            spur_length: 4,
            max_gap: 2,
            absorb_distance: 3.0,
            cocircular_distance: 1.5,
        }
    }
}

impl CsaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tau_h < 1 {
            return Err(Error::InvalidParameter(format!("tau_h = {} must be >= 1", self.tau_h)));
        }
        if self.tau_c < 3 {
            return Err(Error::InvalidParameter(format!("tau_c = {} must be >= 3", self.tau_c)));
        }
        if !(self.delta_phi > 0.0 && self.delta_phi < PI / 2.0) {
            return Err(Error::InvalidParameter(format!(
                "delta_phi = {} must lie in (0, pi/2)",
                self.delta_phi
            )));
        }
        if self.hough_triple_budget == 0 {
            return Err(Error::InvalidParameter("triple budget must be positive".into()));
        }
        if !(self.absorb_distance >= 0.0) {
            return Err(Error::InvalidParameter("absorb distance must be >= 0".into()));
        }
        if !(self.cocircular_distance >= 0.0) {
            return Err(Error::InvalidParameter("co-circular distance must be >= 0".into()));
        }
        Ok(())
    }
}

/// Where an arc's centre and radius came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArcSource {
    Sagitta,
    Hough,
}

/// A certified circular arc with its estimated circle.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcRecord {
    pub segment: CurveSegment,
    pub center: RealPoint,
    pub radius: f64,
    pub source: ArcSource,
    /// Number of traced pieces joined into this arc.
    pub merged_from: usize,
    /// The sagitta estimate, kept after Hough refinement.
    pub sagitta: Option<CircleParams>,
    /// Further pieces of the same circle, not connected to `segment`.
    pub joined: Vec<CurveSegment>,
    /// Original-image pixels attributed to this arc.
    pub absorbed: Vec<Pixel>,
}

impl ArcRecord {
    pub fn circle(&self) -> CircleParams {
        CircleParams::new(self.center, self.radius)
    }

    /// Skeleton pixels of the arc and of every joined piece.
    pub fn skeleton_pixels(&self) -> impl Iterator<Item = Pixel> + '_ {
        self.segment
            .pixels()
            .iter()
            .chain(self.joined.iter().flat_map(|s| s.pixels()))
            .copied()
    }

    pub fn summary(&self) -> ArcSummary {
        let (a, b) = self.segment.endpoints();
        ArcSummary {
            center: self.center,
            radius: self.radius,
            endpoints: [a, b],
            closed: self.segment.is_closed(),
            n_pixels: self.segment.len() + self.joined.iter().map(CurveSegment::len).sum::<usize>(),
            source: self.source,
        }
    }
}

/// The serialized form of an arc.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcSummary {
    pub center: RealPoint,
    pub radius: f64,
    pub endpoints: [Pixel; 2],
    pub closed: bool,
    pub n_pixels: usize,
    pub source: ArcSource,
}

impl ArcSummary {
    pub fn circle(&self) -> CircleParams {
        CircleParams::new(self.center, self.radius)
    }
}

/// Thinning followed by spur pruning, gap bridging, speck removal and a
/// final thinning so the tracer sees clean one-pixel curves.
pub fn preprocess(img: &BinaryImage, cfg: &CsaConfig) -> BinaryImage {
    let sk = raster::thin(img);
    let sk = raster::prune_spurs(&sk, cfg.spur_length);
    let sk = raster::bridge_gaps(&sk, cfg.max_gap);
    let sk = raster::remove_small_components(&sk, cfg.tau_c);
    raster::thin(&sk)
}

/// Intermediate products of one detector run.
#[derive(Clone, Debug)]
pub struct Trace {
    pub skeleton: BinaryImage,
    pub segments: SegmentList,
    pub certified: Vec<CertifiedArc>,
    pub arcs: Vec<ArcRecord>,
}

/// Runs the whole pipeline on `img`.
pub fn detect(img: &BinaryImage, cfg: &CsaConfig) -> Result<Vec<ArcRecord>> {
    Ok(detect_traced(img, cfg)?.arcs)
}

/// [`detect`], keeping the intermediate stages.
pub fn detect_traced(img: &BinaryImage, cfg: &CsaConfig) -> Result<Trace> {
    cfg.validate()?;
    let skeleton = preprocess(img, cfg);
    let segments = extract_segments(&skeleton);
    let curved = remove_straight(&segments, cfg);

    let mut certified = Vec::new();
    for entry in &curved.entries {
        let seg = &entry.segment;
        let (a, b) = seg.endpoints();
        for piece in verify_circularity(seg, cfg) {
            let (pa, pb) = piece.endpoints();
            let tag = |p: Pixel| {
                if p == a {
                    entry.junction_ends[0]
                } else if p == b {
                    entry.junction_ends[1]
                } else {
                    None
                }
            };
            certified.push(CertifiedArc::new(piece.clone(), [tag(pa), tag(pb)]));
        }
    }
    let merged = merge_adjacent(certified.clone(), &segments.junctions, cfg);

    let mut refined = Vec::new();
    for piece in merged {
        let Ok(mut rec) = estimate_params(&piece.segment) else {
            continue;
        };
        rec.merged_from = piece.merged_from;
        refined.push(restricted_hough(&rec, cfg));
    }
    let mut arcs = join_cocircular(refined, cfg.cocircular_distance);
    let masks = absorb_thick_pixels(&arcs, img, cfg.absorb_distance);
    for (rec, mask) in arcs.iter_mut().zip(masks) {
        rec.absorbed = mask;
    }
    Ok(Trace {
        skeleton,
        segments,
        certified,
        arcs,
    })
}
