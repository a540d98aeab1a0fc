//! Clean-up passes for thinned images: short spurs left by noise blobs,
//! one- or two-pixel breaks in curves, and specks.

use std::collections::HashSet;

use super::{BinaryImage, Pixel};

/// Removes branches of at most `max_len` pixels that run from a free end
/// into a junction. Isolated short curves are left alone.
pub fn prune_spurs(img: &BinaryImage, max_len: usize) -> BinaryImage {
    let mut out = img.clone();
    if max_len == 0 {
        return out;
    }
    for end in img.object_pixels().filter(|&p| img.neighbor_count(p) == 1) {
        if let Some(spur) = spur_from(img, end, max_len) {
            for p in spur {
                out.set(p, false);
            }
        }
    }
    out
}

fn spur_from(img: &BinaryImage, end: Pixel, max_len: usize) -> Option<Vec<Pixel>> {
    let mut path = vec![end];
    let mut seen: HashSet<Pixel> = HashSet::from([end]);
    let mut cur = end;
    loop {
        let next: Vec<Pixel> = cur
            .neighbors()
            .filter(|&n| img.get(n) && !seen.contains(&n))
            .collect();
        match next.as_slice() {
            [] => return None,
            [n] => {
                if path.len() == max_len {
                    return None;
                }
                path.push(*n);
                seen.insert(*n);
                cur = *n;
            }
            // reached a branching point; `cur` belongs to the spur only if
            // the pixels beyond it stay connected without it
            many => {
                if !mutually_connected(many) {
                    path.pop();
                }
                return (!path.is_empty()).then_some(path);
            }
        }
    }
}

fn mutually_connected(pixels: &[Pixel]) -> bool {
    let mut reached = vec![false; pixels.len()];
    reached[0] = true;
    let mut stack = vec![0];
    while let Some(i) = stack.pop() {
        for j in 0..pixels.len() {
            if !reached[j] && pixels[i].is_neighbor(pixels[j]) {
                reached[j] = true;
                stack.push(j);
            }
        }
    }
    reached.into_iter().all(|r| r)
}

/// Joins pairs of curve ends that face each other across a gap of up to
/// `max_gap` background pixels, drawing a digital line between them.
///
/// Only ends of branches at least three pixels long take part, so specks do
/// not get stitched to curves; each end is used at most once, closest pairs
/// first.
pub fn bridge_gaps(img: &BinaryImage, max_gap: usize) -> BinaryImage {
    let mut out = img.clone();
    if max_gap == 0 {
        return out;
    }
    let ends: Vec<(Pixel, (i32, i32))> = img
        .object_pixels()
        .filter(|&p| img.neighbor_count(p) == 1)
        .filter_map(|p| end_direction(img, p).map(|d| (p, d)))
        .collect();
    let reach = max_gap as i32 + 1;
    let mut pairs = Vec::new();
    for (i, &(p, dp)) in ends.iter().enumerate() {
        for &(q, dq) in &ends[i + 1..] {
            let gap = p.chebyshev(q);
            if !(2..=reach).contains(&gap) {
                continue;
            }
            let (vx, vy) = (q.x - p.x, q.y - p.y);
            let facing = dp.0 * vx + dp.1 * vy > 0 && -(dq.0 * vx + dq.1 * vy) > 0;
            if facing {
                let d2 = vx * vx + vy * vy;
                pairs.push((d2, p, q));
            }
        }
    }
    pairs.sort();
    let mut used = HashSet::new();
    for (_, p, q) in pairs {
        if used.contains(&p) || used.contains(&q) {
            continue;
        }
        used.insert(p);
        used.insert(q);
        for r in line_pixels(p, q) {
            out.set(r, true);
        }
    }
    out
}

/// Outward direction at a curve end, from the pixel three steps back.
fn end_direction(img: &BinaryImage, end: Pixel) -> Option<(i32, i32)> {
    let mut prev = end;
    let mut cur = end;
    for _ in 0..3 {
        let next: Vec<Pixel> = cur
            .neighbors()
            .filter(|&n| img.get(n) && n != prev && n != cur)
            .collect();
        if next.len() != 1 {
            return None;
        }
        prev = cur;
        cur = next[0];
    }
    Some((end.x - cur.x, end.y - cur.y))
}

/// Digital straight line from `a` to `b` inclusive (Bresenham).
pub fn line_pixels(a: Pixel, b: Pixel) -> Vec<Pixel> {
    let dx = (b.x - a.x).abs();
    let dy = -(b.y - a.y).abs();
    let sx = if a.x < b.x { 1 } else { -1 };
    let sy = if a.y < b.y { 1 } else { -1 };
    let mut err = dx + dy;
    let (mut x, mut y) = (a.x, a.y);
    let mut out = Vec::with_capacity(dx.max(-dy) as usize + 1);
    loop {
        out.push(Pixel::new(x, y));
        if x == b.x && y == b.y {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
    out
}

/// Drops 8-connected components with fewer than `min_size` pixels.
pub fn remove_small_components(img: &BinaryImage, min_size: usize) -> BinaryImage {
    let mut out = img.clone();
    for comp in img.components() {
        if comp.len() < min_size {
            for p in comp {
                out.set(p, false);
            }
        }
    }
    out
}
