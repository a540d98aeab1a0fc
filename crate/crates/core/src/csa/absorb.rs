use std::collections::{HashMap, HashSet};

use crate::digigeom::RealPoint;
use crate::raster::{BinaryImage, Pixel};

use super::ArcRecord;

/// For each arc, the original object pixels reachable from the arc's own
/// pixels (joined pieces included) through 8-neighbour steps that stay
/// within `max_dist` of the arc's circle. This gives back the thickness
/// thinning removed.
///
/// An arc's own pixels belong to it alone (the lower-indexed arc wins a
/// shared one); any other pixel reached by several arcs goes to the arc
/// whose circle is nearest, the lower index on ties. Masks are listed in
/// raster order.
pub fn absorb_thick_pixels(arcs: &[ArcRecord], original: &BinaryImage, max_dist: f64) -> Vec<Vec<Pixel>> {
    let mut owner: HashMap<Pixel, (usize, bool, f64)> = HashMap::new();
    for (i, arc) in arcs.iter().enumerate() {
        for p in arc.skeleton_pixels() {
            if original.get(p) {
                owner.entry(p).or_insert((i, true, 0.0));
            }
        }
    }
    for (i, arc) in arcs.iter().enumerate() {
        let circle = arc.circle();
        let seeds: Vec<Pixel> = arc.skeleton_pixels().filter(|&p| original.get(p)).collect();
        let mut seen: HashSet<Pixel> = seeds.iter().copied().collect();
        let mut stack = seeds;
        while let Some(p) = stack.pop() {
            for n in p.neighbors() {
                if !original.get(n) || seen.contains(&n) {
                    continue;
                }
                let d = circle.distance_to(RealPoint::from(n));
                if d > max_dist {
                    continue;
                }
                seen.insert(n);
                stack.push(n);
                match owner.get(&n) {
                    Some(&(_, true, _)) => {}
                    Some(&(j, false, dj)) if dj < d || (dj == d && j < i) => {}
                    _ => {
                        owner.insert(n, (i, false, d));
                    }
                }
            }
        }
    }
    let mut masks = vec![Vec::new(); arcs.len()];
    for (p, (i, _, _)) in owner {
        masks[i].push(p);
    }
    for m in &mut masks {
        m.sort();
    }
    masks
}

/// Union of pixel masks as an image of the given size.
pub fn union_mask(masks: &[Vec<Pixel>], width: usize, height: usize) -> BinaryImage {
    let mut img = BinaryImage::new(width, height);
    for p in masks.iter().flatten() {
        img.set(*p, true);
    }
    img
}
