//! Zhang–Suen thinning followed by removal of redundant staircase pixels,
//! iterated to a fixed point so that `thin` is idempotent.

use std::collections::HashSet;

use super::{connectivity_number, transitions, BinaryImage, Pixel};

/// Reduces every object region to an 8-connected skeleton one pixel wide.
///
/// The result is a subset of the input, keeps the number of 8-connected
/// components, and is a fixed point: `thin(&thin(img)) == thin(img)`.
pub fn thin(img: &BinaryImage) -> BinaryImage {
    let mut out = img.clone();
    loop {
        while zhang_suen_pass(&mut out, 0) | zhang_suen_pass(&mut out, 1) {}
        if !remove_redundant(&mut out) {
            break;
        }
    }
    out
}

/// One Zhang–Suen sub-iteration. Returns whether anything was deleted.
fn zhang_suen_pass(img: &mut BinaryImage, step: u8) -> bool {
    let mut marked = Vec::new();
    for p in img.object_pixels() {
        let r = img.ring(p);
        let b = r.iter().filter(|&&v| v).count();
        if !(2..=6).contains(&b) || transitions(&r) != 1 {
            continue;
        }
        // r[0]=P2 (N), r[2]=P4 (E), r[4]=P6 (S), r[6]=P8 (W)
        let (p2, p4, p6, p8) = (r[0], r[2], r[4], r[6]);
        let ok = if step == 0 {
            !(p2 && p4 && p6) && !(p4 && p6 && p8)
        } else {
            !(p2 && p4 && p8) && !(p2 && p6 && p8)
        };
        if ok {
            marked.push(p);
        }
    }
    if marked.is_empty() {
        return false;
    }
    keep_vanishing_components(img, &mut marked);
    let changed = !marked.is_empty();
    for p in marked {
        img.set(p, false);
    }
    changed
}

/// Parallel deletion can erase a small component outright (a 2x2 block is
/// the classic case). Keep the first pixel of any component whose pixels
/// are all marked.
fn keep_vanishing_components(img: &BinaryImage, marked: &mut Vec<Pixel>) {
    let set: HashSet<Pixel> = marked.iter().copied().collect();
    let mut seen: HashSet<Pixel> = HashSet::new();
    let mut spared = HashSet::new();
    for &start in marked.iter() {
        if !seen.insert(start) {
            continue;
        }
        let mut stack = vec![start];
        let mut first = start;
        let mut touches_survivor = false;
        while let Some(q) = stack.pop() {
            first = first.min(q);
            for n in q.neighbors() {
                if !img.get(n) {
                    continue;
                }
                if !set.contains(&n) {
                    touches_survivor = true;
                } else if seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        if !touches_survivor {
            spared.insert(first);
        }
    }
    if !spared.is_empty() {
        marked.retain(|p| !spared.contains(p));
    }
}

/// Sequentially deletes simple pixels that are not curve ends, i.e. pixels
/// whose neighbours stay connected without them (staircase corners and
/// leftovers of two-pixel-thick strokes).
fn remove_redundant(img: &mut BinaryImage) -> bool {
    let mut changed = false;
    let pixels: Vec<Pixel> = img.object_pixels().collect();
    for p in pixels {
        if img.neighbor_count(p) >= 2 && connectivity_number(&img.ring(p)) == 1 {
            img.set(p, false);
            changed = true;
        }
    }
    changed
}
