use std::collections::HashMap;

use crate::curves::partition_len;
use crate::digigeom::{circumcircle, CircleParams, RealPoint};
use crate::raster::Pixel;

use super::{ArcRecord, ArcSource, CsaConfig};

/// Votes over the box `[x - d, x + d] x [y - d, y + d] x [r - d, r + d]`
/// around an estimate `(x, y, r)` with `d = r`, in unit cells. Only cells
/// that received a vote are stored, each with its count and the sum of
/// the circles voted into it.
#[derive(Clone, Debug)]
pub struct RestrictedAccumulator {
    origin: [f64; 3],
    extent: f64,
    dims: [u32; 3],
    cells: HashMap<[u32; 3], (u32, [f64; 3])>,
    total: u64,
}

impl RestrictedAccumulator {
    pub fn new(estimate: &CircleParams) -> Self {
        let delta = estimate.radius.abs();
        let extent = 2.0 * delta;
        let n = (extent.ceil() as u32).max(1);
        RestrictedAccumulator {
            origin: [
                estimate.center.x - delta,
                estimate.center.y - delta,
                estimate.radius - delta,
            ],
            extent,
            dims: [n; 3],
            cells: HashMap::new(),
            total: 0,
        }
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    pub fn dims(&self) -> [u32; 3] {
        self.dims
    }

    /// Number of accepted votes.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count(&self, cell: [u32; 3]) -> u32 {
        self.cells.get(&cell).map_or(0, |c| c.0)
    }

    /// Cell holding `c`, or `None` outside the box.
    pub fn cell_of(&self, c: &CircleParams) -> Option<[u32; 3]> {
        let v = [c.center.x, c.center.y, c.radius];
        let mut cell = [0u32; 3];
        for k in 0..3 {
            let off = v[k] - self.origin[k];
            if !(off >= 0.0 && off <= self.extent) {
                return None;
            }
            cell[k] = (off.floor() as u32).min(self.dims[k] - 1);
        }
        Some(cell)
    }

    /// Adds a vote for `c`; returns false when it falls outside the box.
    pub fn vote(&mut self, c: &CircleParams) -> bool {
        match self.cell_of(c) {
            Some(cell) => {
                let e = self.cells.entry(cell).or_insert((0, [0.0; 3]));
                e.0 += 1;
                e.1[0] += c.center.x;
                e.1[1] += c.center.y;
                e.1[2] += c.radius;
                self.total += 1;
                true
            }
            None => false,
        }
    }

    /// Circle at the midpoint of `cell`.
    pub fn cell_center(&self, cell: [u32; 3]) -> CircleParams {
        let mid = |k: usize| self.origin[k] + f64::from(cell[k]) + 0.5;
        CircleParams::new(RealPoint::new(mid(0), mid(1)), mid(2))
    }

    /// Mean of the circles voted into `cell`, `None` for an empty cell.
    pub fn cell_mean(&self, cell: [u32; 3]) -> Option<CircleParams> {
        let &(n, sum) = self.cells.get(&cell)?;
        Some(mean_circle(n, sum))
    }

    /// Votes and vote sum over the 3x3x3 block of cells around `cell`.
    fn block(&self, cell: [u32; 3]) -> (u32, [f64; 3]) {
        let mut n = 0;
        let mut sum = [0.0; 3];
        for dx in -1i64..=1 {
            for dy in -1i64..=1 {
                for dr in -1i64..=1 {
                    let c = [cell[0] as i64 + dx, cell[1] as i64 + dy, cell[2] as i64 + dr];
                    if c.iter().any(|&v| v < 0 || v > u32::MAX as i64) {
                        continue;
                    }
                    if let Some(&(k, s)) = self.cells.get(&c.map(|v| v as u32)) {
                        n += k;
                        for i in 0..3 {
                            sum[i] += s[i];
                        }
                    }
                }
            }
        }
        (n, sum)
    }

    /// Votes in the 3x3x3 block around `cell`.
    pub fn block_count(&self, cell: [u32; 3]) -> u32 {
        self.block(cell).0
    }

    /// Mean of the circles voted into the 3x3x3 block around `cell`.
    pub fn block_mean(&self, cell: [u32; 3]) -> Option<CircleParams> {
        let (n, sum) = self.block(cell);
        (n > 0).then(|| mean_circle(n, sum))
    }

    /// The occupied cell whose 3x3x3 block holds most votes, with that
    /// count; ties as in [`RestrictedAccumulator::best`].
    pub fn best_block(&self) -> Option<([u32; 3], u32)> {
        self.cells
            .keys()
            .map(|&cell| (cell, self.block_count(cell)))
            .min_by(|(ca, na), (cb, nb)| {
                nb.cmp(na)
                    .then(ca[2].cmp(&cb[2]))
                    .then(ca[0].cmp(&cb[0]))
                    .then(ca[1].cmp(&cb[1]))
            })
    }

    /// The cell with most votes; ties go to the smallest radius, then the
    /// smallest x, then the smallest y.
    pub fn best(&self) -> Option<([u32; 3], u32)> {
        self.cells
            .iter()
            .map(|(&cell, &(n, _))| (cell, n))
            .min_by(|(ca, na), (cb, nb)| {
                nb.cmp(na)
                    .then(ca[2].cmp(&cb[2]))
                    .then(ca[0].cmp(&cb[0]))
                    .then(ca[1].cmp(&cb[1]))
            })
    }
}

fn mean_circle(n: u32, sum: [f64; 3]) -> CircleParams {
    let n = f64::from(n);
    CircleParams::new(RealPoint::new(sum[0] / n, sum[1] / n), sum[2] / n)
}

/// `n` indices spread evenly over `0..len`, one from the middle of each
/// of `n` equal strata.
fn strata(len: usize, n: usize) -> impl Iterator<Item = usize> {
    (0..n).map(move |j| (2 * j + 1) * len / (2 * n))
}

/// How many pixels to take from each third so the number of triples stays
/// within `budget`, keeping the thirds in proportion to their sizes.
fn grid_counts(lens: [usize; 3], budget: usize) -> [usize; 3] {
    let all = lens.iter().map(|&l| l as f64).product::<f64>();
    let f = (budget as f64 / all).cbrt();
    let mut n = lens.map(|l| ((l as f64 * f).floor() as usize).clamp(1, l));
    while n.iter().product::<usize>() > budget {
        let k = (0..3).max_by_key(|&k| (n[k], k)).unwrap();
        if n[k] == 1 {
            break;
        }
        n[k] -= 1;
    }
    n
}

/// Refines an arc's circle by voting circumcircles of pixel triples, one
/// pixel from each of the left, central and right thirds, inside the box
/// around the sagitta estimate. All triples are used when there are at
/// most `hough_triple_budget` of them; otherwise each third is thinned to
/// evenly spaced pixels so the grid of triples fits the budget, which
/// keeps the result free of randomness. The winner is the cell whose
/// 3x3x3 neighbourhood gathered most votes and the result is the mean of
/// the circles voted into that neighbourhood. An arc with no usable
/// triple comes back unchanged.
pub fn restricted_hough(rec: &ArcRecord, cfg: &CsaConfig) -> ArcRecord {
    let px = rec.segment.pixels();
    let Ok(regions) = partition_len(px.len()) else {
        return rec.clone();
    };
    if !(rec.radius > 0.0 && rec.radius.is_finite() && rec.center.is_finite()) {
        return rec.clone();
    }
    let mut acc = RestrictedAccumulator::new(&rec.circle());
    let (left, central, right) = (&px[regions.left], &px[regions.central], &px[regions.right]);
    let mut cast = |p: Pixel, q: Pixel, r: Pixel| {
        if let Ok(c) = circumcircle(p.into(), q.into(), r.into()) {
            acc.vote(&c);
        }
    };
    let lens = [left.len(), central.len(), right.len()];
    let n = grid_counts(lens, cfg.hough_triple_budget);
    for i in strata(lens[0], n[0]) {
        for j in strata(lens[1], n[1]) {
            for k in strata(lens[2], n[2]) {
                cast(left[i], central[j], right[k]);
            }
        }
    }
    match acc.best_block() {
        Some((cell, _)) => {
            let c = acc.block_mean(cell).expect("best block has votes");
            ArcRecord {
                center: c.center,
                radius: c.radius,
                source: ArcSource::Hough,
                sagitta: rec.sagitta.or(Some(rec.circle())),
                ..rec.clone()
            }
        }
        None => rec.clone(),
    }
}
