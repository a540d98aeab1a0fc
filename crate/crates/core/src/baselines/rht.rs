use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::csa::ArcRecord;
use crate::digigeom::{circumcircle, CircleParams, RealPoint};
use crate::error::{Error, Result};
use crate::raster::{BinaryImage, Pixel};

use super::{circle_record, pixels_near_circle};

#[derive(Clone, Debug, PartialEq)]
pub struct RhtConfig {
    /// Score at which an entry of the parameter set becomes a candidate.
    pub n_t: u32,
    /// Share of the circumference a candidate must cover to be reported.
    pub t_r: f64,
    pub max_steps: usize,
    pub rng_seed: u64,
    /// Sampling stops once fewer object pixels than this remain.
    pub min_pixels: usize,
    pub min_radius: f64,
    /// Largest radius considered; the longer image side when unset.
    pub max_radius: Option<f64>,
}

impl Default for RhtConfig {
    fn default() -> Self {
        RhtConfig {
            n_t: 2,
            t_r: 0.46,
            max_steps: 100_000,
            rng_seed: 0,
            min_pixels: 20,
            min_radius: 5.0,
            max_radius: None,
        }
    }
}

impl RhtConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.n_t) {
            return Err(Error::InvalidParameter(format!("n_t = {} must be 2 or 3", self.n_t)));
        }
        if !(self.t_r > 0.0 && self.t_r <= 1.0) {
            return Err(Error::InvalidParameter(format!("T_r = {} must lie in (0, 1]", self.t_r)));
        }
        if !(self.min_radius >= 0.0) || self.max_radius.is_some_and(|m| !(m > self.min_radius)) {
            return Err(Error::InvalidParameter("radius limits are inconsistent".into()));
        }
        Ok(())
    }
}

/// An element of the parameter set: running sum of the matched circles
/// and how many there were.
struct Entry {
    sum: [f64; 3],
    score: u32,
}

impl Entry {
    fn mean(&self) -> [f64; 3] {
        let n = f64::from(self.score);
        [self.sum[0] / n, self.sum[1] / n, self.sum[2] / n]
    }
}

/// Parameter set bucketed by the rounded parameters of each entry's first
/// circle. A new circle matches an entry whose mean is within one pixel
/// on every axis.
#[derive(Default)]
struct ParamSet {
    buckets: HashMap<[i64; 3], Vec<Entry>>,
}

impl ParamSet {
    /// Adds `c` and returns the bucket and slot of the entry it landed in.
    fn add(&mut self, c: [f64; 3]) -> ([i64; 3], usize, u32) {
        let key = c.map(|v| v.round() as i64);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dr in -1..=1 {
                    let k = [key[0] + dx, key[1] + dy, key[2] + dr];
                    let Some(bucket) = self.buckets.get_mut(&k) else {
                        continue;
                    };
                    for (slot, e) in bucket.iter_mut().enumerate() {
                        let m = e.mean();
                        if (0..3).all(|i| (m[i] - c[i]).abs() <= 1.0) {
                            for i in 0..3 {
                                e.sum[i] += c[i];
                            }
                            e.score += 1;
                            return (k, slot, e.score);
                        }
                    }
                }
            }
        }
        let bucket = self.buckets.entry(key).or_default();
        bucket.push(Entry { sum: c, score: 1 });
        (key, bucket.len() - 1, 1)
    }

    fn take(&mut self, key: [i64; 3], slot: usize) -> Entry {
        let bucket = self.buckets.get_mut(&key).expect("entry exists");
        let e = bucket.swap_remove(slot);
        if bucket.is_empty() {
            self.buckets.remove(&key);
        }
        e
    }

    fn clear(&mut self) {
        self.buckets.clear();
    }
}

/// Randomized Hough transform. Each step maps three random object pixels
/// to their circumcircle and scores it in the parameter set. An entry
/// reaching `n_t` is checked against the image: when the pixels within one
/// pixel of it cover at least `t_r` of its circumference it is reported,
/// those pixels are removed and the parameter set is emptied; otherwise
/// the entry alone is dropped. Runs for `max_steps` steps or until fewer
/// than `min_pixels` object pixels remain.
pub fn rht_detect(img: &BinaryImage, cfg: &RhtConfig) -> Result<Vec<ArcRecord>> {
    cfg.validate()?;
    let max_r = cfg.max_radius.unwrap_or(img.width().max(img.height()) as f64);
    let mut live = img.clone();
    let mut pixels: Vec<Pixel> = live.object_pixels().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut set = ParamSet::default();
    let mut out = Vec::new();
    for _ in 0..cfg.max_steps {
        if pixels.len() < cfg.min_pixels.max(3) {
            break;
        }
        let idx = rand::seq::index::sample(&mut rng, pixels.len(), 3);
        let [p, q, r] = [0, 1, 2].map(|i| RealPoint::from(pixels[idx.index(i)]));
        let Ok(c) = circumcircle(p, q, r) else {
            continue;
        };
        if !(c.radius >= cfg.min_radius && c.radius <= max_r) {
            continue;
        }
        let (key, slot, score) = set.add([c.center.x, c.center.y, c.radius]);
        if score < cfg.n_t {
            continue;
        }
        let m = set.take(key, slot).mean();
        let cand = CircleParams::new(RealPoint::new(m[0], m[1]), m[2]);
        let on = pixels_near_circle(&live, &cand, 1.0);
        let rate = on.len() as f64 / (std::f64::consts::TAU * cand.radius);
        if rate >= cfg.t_r {
            for &p in &on {
                live.set(p, false);
            }
            pixels.retain(|&p| live.get(p));
            set.clear();
            out.push(circle_record(cand, on));
        }
    }
    Ok(out)
}
