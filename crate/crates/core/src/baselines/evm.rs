use std::collections::{BTreeMap, HashSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::csa::ArcRecord;
use crate::digigeom::{circumcircle, CircleParams, RealPoint};
use crate::error::{Error, Result};
use crate::raster::{BinaryImage, Pixel};

use super::{circle_record, pixels_near_circle};

#[derive(Clone, Debug, PartialEq)]
pub struct EvmConfig {
    /// Existing rate a circle needs to be reported.
    pub t_e: f64,
    /// Number of sampled object pixels; all of them when there are fewer.
    pub sample_count: usize,
    pub rng_seed: u64,
    pub min_radius: f64,
    /// Largest radius considered; the longer image side when unset.
    pub max_radius: Option<f64>,
}

impl Default for EvmConfig {
    fn default() -> Self {
        EvmConfig {
            t_e: 0.5,
            sample_count: 200,
            rng_seed: 0,
            min_radius: 5.0,
            max_radius: None,
        }
    }
}

impl EvmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_e > 0.0 && self.t_e <= 1.0) {
            return Err(Error::InvalidParameter(format!("T_e = {} must lie in (0, 1]", self.t_e)));
        }
        if self.sample_count < 2 {
            return Err(Error::InvalidParameter("sample_count must be at least 2".into()));
        }
        if !(self.min_radius >= 0.0) || self.max_radius.is_some_and(|m| !(m > self.min_radius)) {
            return Err(Error::InvalidParameter("radius limits are inconsistent".into()));
        }
        Ok(())
    }
}

/// Effective voting method.
///
/// For every ordered pair `(p, q)` of sampled pixels, each object pixel
/// `r` with `|qr|` within half a pixel of `|pq|` (and not next to `p`)
/// gives a triple whose circumcircle is a hypothesis. Hypotheses are
/// pooled by rounded parameters and scored by their existing rate over
/// the whole image. Every object pixel then votes for the highest-rate
/// circle passing within one pixel of it; a circle with rate at least
/// `t_e` is reported when it wins at least half of its own pixels, which
/// keeps one of several near-identical hypotheses.
pub fn evm_detect(img: &BinaryImage, cfg: &EvmConfig) -> Result<Vec<ArcRecord>> {
    cfg.validate()?;
    let max_r = cfg.max_radius.unwrap_or(img.width().max(img.height()) as f64);
    let all: Vec<Pixel> = img.object_pixels().collect();
    if all.len() < 3 {
        return Ok(Vec::new());
    }
    let sample: Vec<Pixel> = if all.len() <= cfg.sample_count {
        all
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        let mut idx = rand::seq::index::sample(&mut rng, all.len(), cfg.sample_count).into_vec();
        idx.sort_unstable();
        idx.into_iter().map(|i| all[i]).collect()
    };

    // hypotheses keyed by rounded (x, y, r); the first circle seen is kept
    let mut hyp: BTreeMap<[i64; 3], CircleParams> = BTreeMap::new();
    for &p in &sample {
        for &q in &sample {
            if p == q {
                continue;
            }
            let (pr, qr) = (RealPoint::from(p), RealPoint::from(q));
            let d = pr.dist(qr);
            let ring = CircleParams::new(qr, d);
            for r in pixels_near_circle(img, &ring, 0.5) {
                if r.chebyshev(p) <= 1 {
                    continue;
                }
                let Ok(c) = circumcircle(pr, qr, r.into()) else {
                    continue;
                };
                if c.radius < cfg.min_radius || c.radius > max_r {
                    continue;
                }
                let key = [c.center.x, c.center.y, c.radius].map(|v| v.round() as i64);
                hyp.entry(key).or_insert(c);
            }
        }
    }

    let mut scored: Vec<([i64; 3], CircleParams, Vec<Pixel>, f64)> = hyp
        .into_par_iter()
        .filter_map(|(key, c)| {
            let on = pixels_near_circle(img, &c, 1.0);
            let rate = (on.len() as f64 / (std::f64::consts::TAU * c.radius)).min(1.0);
            (rate >= cfg.t_e).then_some((key, c, on, rate))
        })
        .collect();
    // highest rate first; a pixel's vote goes to the first circle holding it
    scored.sort_by(|a, b| b.3.total_cmp(&a.3).then(a.0.cmp(&b.0)));
    let mut voted: HashSet<Pixel> = HashSet::new();
    let mut out = Vec::new();
    for (_, c, on, _) in scored {
        let votes = on.iter().filter(|&&p| voted.insert(p)).count();
        if 2 * votes >= on.len() {
            out.push(circle_record(c, on));
        }
    }
    Ok(out)
}
