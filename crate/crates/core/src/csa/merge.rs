use std::collections::{HashMap, HashSet, VecDeque};

use crate::curves::CurveSegment;
use crate::raster::Pixel;

use super::circularity::passes_chord_test;
use super::CsaConfig;

/// A run that passed the chord test, with the junction cluster each end
/// sits on (if any) and how many traced pieces it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedArc {
    pub segment: CurveSegment,
    pub junction_ends: [Option<usize>; 2],
    pub merged_from: usize,
}

impl CertifiedArc {
    pub fn new(segment: CurveSegment, junction_ends: [Option<usize>; 2]) -> Self {
        CertifiedArc {
            segment,
            junction_ends,
            merged_from: 1,
        }
    }

    fn reversed(&self) -> CertifiedArc {
        CertifiedArc {
            segment: self.segment.reversed(),
            junction_ends: [self.junction_ends[1], self.junction_ends[0]],
            merged_from: self.merged_from,
        }
    }

    fn first(&self) -> (Pixel, Option<usize>) {
        (self.segment.pixels()[0], self.junction_ends[0])
    }

    fn last(&self) -> (Pixel, Option<usize>) {
        let px = self.segment.pixels();
        (px[px.len() - 1], self.junction_ends[1])
    }
}

/// Pixels to insert between two ends that meet: `Some(vec![])` when they
/// are the same pixel or 8-neighbours, a path through the junction cluster
/// they share otherwise, `None` when they do not meet.
fn link(
    from: (Pixel, Option<usize>),
    to: (Pixel, Option<usize>),
    junctions: &[Vec<Pixel>],
) -> Option<Vec<Pixel>> {
    let (p, q) = (from.0, to.0);
    if p == q || p.is_neighbor(q) {
        return Some(Vec::new());
    }
    let (Some(a), Some(b)) = (from.1, to.1) else {
        return None;
    };
    if a != b {
        return None;
    }
    let cluster: HashSet<Pixel> = junctions.get(a)?.iter().copied().collect();
    let mut prev: HashMap<Pixel, Pixel> = HashMap::new();
    let mut queue = VecDeque::from([p]);
    while let Some(cur) = queue.pop_front() {
        if cur.is_neighbor(q) {
            let mut path = Vec::new();
            let mut at = cur;
            while at != p {
                path.push(at);
                at = prev[&at];
            }
            path.reverse();
            return Some(path);
        }
        for n in cur.neighbors() {
            if cluster.contains(&n) && n != p && !prev.contains_key(&n) {
                prev.insert(n, cur);
                queue.push_back(n);
            }
        }
    }
    None
}

fn unique(pixels: &[Pixel]) -> bool {
    let mut seen = HashSet::with_capacity(pixels.len());
    pixels.iter().all(|&p| seen.insert(p))
}

/// Joins `x` (whose last end meets) to `y` (whose first end meets) and
/// closes the result when its remaining ends meet too.
fn join(x: &CertifiedArc, y: &CertifiedArc, junctions: &[Vec<Pixel>]) -> Option<CertifiedArc> {
    let bridge = link(x.last(), y.first(), junctions)?;
    let mut px = x.segment.pixels().to_vec();
    px.extend(bridge);
    let ys = y.segment.pixels();
    let skip = usize::from(ys[0] == px[px.len() - 1]);
    px.extend_from_slice(&ys[skip..]);
    close_up(px, x.first(), y.last(), x.merged_from + y.merged_from, junctions)
}

fn close_up(
    mut px: Vec<Pixel>,
    head: (Pixel, Option<usize>),
    tail: (Pixel, Option<usize>),
    merged_from: usize,
    junctions: &[Vec<Pixel>],
) -> Option<CertifiedArc> {
    let mut closed = false;
    if px.len() >= 4 {
        if let Some(bridge) = link(tail, head, junctions) {
            px.extend(bridge);
            if px[px.len() - 1] == px[0] {
                px.pop();
            }
            closed = px.len() >= 3 && px[px.len() - 1].is_neighbor(px[0]);
            if !closed {
                return None;
            }
        }
    }
    if !unique(&px) {
        return None;
    }
    let mut segment = CurveSegment::from_parts(px, closed);
    let ends = if closed {
        segment = segment.cut_at_top_left();
        [None, None]
    } else {
        [head.1, tail.1]
    };
    Some(CertifiedArc {
        segment,
        junction_ends: ends,
        merged_from,
    })
}

/// Tries the four ways two arcs can meet, in a fixed order, and returns
/// the first concatenation that passes the chord test.
fn try_merge(
    x: &CertifiedArc,
    y: &CertifiedArc,
    junctions: &[Vec<Pixel>],
    cfg: &CsaConfig,
) -> Option<CertifiedArc> {
    let xr = x.reversed();
    let yr = y.reversed();
    for (a, b) in [(x, y), (x, &yr), (&xr, y), (&xr, &yr)] {
        if let Some(m) = join(a, b, junctions) {
            if passes_chord_test(m.segment.pixels(), m.segment.is_closed(), cfg) {
                return Some(m);
            }
        }
    }
    None
}

/// Closes a single arc whose two ends meet, if the closed curve passes.
fn try_close(x: &CertifiedArc, junctions: &[Vec<Pixel>], cfg: &CsaConfig) -> Option<CertifiedArc> {
    let m = close_up(
        x.segment.pixels().to_vec(),
        x.first(),
        x.last(),
        x.merged_from,
        junctions,
    )?;
    (m.segment.is_closed() && passes_chord_test(m.segment.pixels(), true, cfg)).then_some(m)
}

/// Repeatedly replaces two arcs that share an end (the same pixel,
/// neighbouring pixels, or the same junction) by their concatenation when
/// it passes the chord test, scanning pairs lowest index first, until no
/// pair merges. An arc whose own two ends meet is closed the same way.
pub fn merge_adjacent(
    arcs: Vec<CertifiedArc>,
    junctions: &[Vec<Pixel>],
    cfg: &CsaConfig,
) -> Vec<CertifiedArc> {
    let mut items: Vec<(u64, CertifiedArc)> = arcs.into_iter().zip(0u64..).map(|(a, i)| (i, a)).collect();
    let mut next_id = items.len() as u64;
    let mut failed: HashSet<(u64, u64)> = HashSet::new();
    'scan: loop {
        for i in 0..items.len() {
            if items[i].1.segment.is_closed() {
                continue;
            }
            let id_i = items[i].0;
            if failed.insert((id_i, id_i)) {
                if let Some(m) = try_close(&items[i].1, junctions, cfg) {
                    items[i] = (next_id, m);
                    next_id += 1;
                    continue 'scan;
                }
            }
            for j in i + 1..items.len() {
                let id_j = items[j].0;
                if items[j].1.segment.is_closed() || failed.contains(&(id_i, id_j)) {
                    continue;
                }
                if !ends_meet(&items[i].1, &items[j].1) {
                    failed.insert((id_i, id_j));
                    continue;
                }
                match try_merge(&items[i].1, &items[j].1, junctions, cfg) {
                    Some(m) => {
                        items[i] = (next_id, m);
                        next_id += 1;
                        items.remove(j);
                        continue 'scan;
                    }
                    None => {
                        failed.insert((id_i, id_j));
                    }
                }
            }
        }
        break;
    }
    items.into_iter().map(|(_, a)| a).collect()
}

/// Cheap pre-check: some end of `x` is within reach of some end of `y`.
fn ends_meet(x: &CertifiedArc, y: &CertifiedArc) -> bool {
    let xe = [x.first(), x.last()];
    let ye = [y.first(), y.last()];
    xe.iter().any(|&(p, jp)| {
        ye.iter()
            .any(|&(q, jq)| p.chebyshev(q) <= 1 || (jp.is_some() && jp == jq))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csa::verify_circularity;
    use crate::digigeom::{circle_curve, digital_arc};
    use std::f64::consts::PI;

    fn open(px: &[Pixel]) -> CertifiedArc {
        CertifiedArc::new(CurveSegment::new(px.to_vec(), false).unwrap(), [None, None])
    }

    #[test]
    fn two_halves_of_a_circle_become_one_closed_arc() {
        let ring = circle_curve(Pixel::new(0, 0), 30).unwrap();
        let h = ring.len() / 2;
        // the halves share both cut pixels
        let mut second = ring[h..].to_vec();
        second.push(ring[0]);
        let arcs = vec![open(&ring[..=h]), open(&second)];
        let cfg = CsaConfig::default();
        let out = merge_adjacent(arcs, &[], &cfg);
        assert_eq!(out.len(), 1);
        assert!(out[0].segment.is_closed());
        assert_eq!(out[0].segment.len(), ring.len());
        assert_eq!(out[0].merged_from, 2);
    }

    #[test]
    fn arcs_of_different_circles_stay_apart() {
        let small = digital_arc(Pixel::new(0, 0), 20, -PI / 2.0, 0.0).unwrap();
        let big = digital_arc(Pixel::new(20, 60), 60, -PI / 2.0, -PI / 6.0).unwrap();
        let arcs = vec![open(small.pixels()), open(&big.pixels()[1..])];
        let out = merge_adjacent(arcs.clone(), &[], &CsaConfig::default());
        assert_eq!(out, arcs);
    }

    #[test]
    fn single_entry_is_unchanged() {
        let arc = digital_arc(Pixel::new(0, 0), 25, 0.0, 2.0).unwrap();
        let arcs = vec![open(arc.pixels())];
        assert_eq!(merge_adjacent(arcs.clone(), &[], &CsaConfig::default()), arcs);
    }

    #[test]
    fn junction_cluster_bridges_the_gap() {
        let ring = circle_curve(Pixel::new(0, 0), 25).unwrap();
        let n = ring.len();
        // pretend pixels 0..3 form a junction cluster the two arcs end on
        let cluster = vec![ring[0], ring[1], ring[2]];
        let mut a = CertifiedArc::new(CurveSegment::new(ring[2..n / 2].to_vec(), false).unwrap(), [Some(0), None]);
        a.segment = a.segment.clone();
        let mut tail = ring[n / 2..].to_vec();
        tail.push(ring[0]);
        let b = CertifiedArc::new(CurveSegment::new(tail, false).unwrap(), [None, Some(0)]);
        let out = merge_adjacent(vec![a, b], &[cluster], &CsaConfig::default());
        assert_eq!(out.len(), 1);
        assert!(out[0].segment.is_closed());
        assert_eq!(out[0].segment.len(), n);
    }

    #[test]
    fn merging_does_not_lose_pixels() {
        let cfg = CsaConfig::default();
        let arc = digital_arc(Pixel::new(0, 0), 40, 0.0, 3.0).unwrap();
        let k = arc.len();
        let parts = vec![open(&arc.pixels()[..k / 3]), open(&arc.pixels()[k / 3..])];
        let before: HashSet<Pixel> = parts.iter().flat_map(|a| a.segment.pixels().to_vec()).collect();
        let out = merge_adjacent(parts, &[], &cfg);
        let after: HashSet<Pixel> = out.iter().flat_map(|a| a.segment.pixels().to_vec()).collect();
        assert!(after.is_superset(&before));
        assert_eq!(out.len(), 1);
        assert!(!verify_circularity(&out[0].segment, &cfg).is_empty());
    }
}
