//! Binary rasters: the occupancy grid every other stage works on, plus
//! image I/O, thinning, skeleton cleanup and the perturbations used by the
//! robustness experiments (salt-and-pepper noise, rotation).

mod io;
mod perturb;
mod skeleton;
mod thin;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{load_binary, save_binary, save_pbm, save_png};
pub use perturb::{add_salt_pepper, rotate, rotate_with_map, Rotation};
pub use skeleton::{bridge_gaps, line_pixels, prune_spurs, remove_small_components};
pub use thin::thin;

/// A point of the integer grid. `x` is the column, `y` the row (growing
/// downwards, as in the image files).
///
/// Ordering is raster order: by row, then by column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[i32; 2]", into = "[i32; 2]")]
pub struct Pixel {
    pub x: i32,
    pub y: i32,
}

impl Pixel {
    pub const fn new(x: i32, y: i32) -> Self {
        Pixel { x, y }
    }

    /// Chebyshev distance.
    pub fn chebyshev(self, other: Pixel) -> i32 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }

    /// True when `other` is one of the eight neighbours of `self`.
    pub fn is_neighbor(self, other: Pixel) -> bool {
        self != other && self.chebyshev(other) <= 1
    }

    pub fn offset(self, dx: i32, dy: i32) -> Pixel {
        Pixel::new(self.x + dx, self.y + dy)
    }

    /// The eight neighbours in the fixed visiting order
    /// E, NE, N, NW, W, SW, S, SE (north is the previous row).
    pub fn neighbors(self) -> impl Iterator<Item = Pixel> {
        NEIGHBOR_ORDER
            .iter()
            .map(move |&(dx, dy)| self.offset(dx, dy))
    }
}

impl From<[i32; 2]> for Pixel {
    fn from(v: [i32; 2]) -> Self {
        Pixel::new(v[0], v[1])
    }
}

impl From<Pixel> for [i32; 2] {
    fn from(p: Pixel) -> Self {
        [p.x, p.y]
    }
}

impl Ord for Pixel {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Pixel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// E, NE, N, NW, W, SW, S, SE.
pub const NEIGHBOR_ORDER: [(i32, i32); 8] = [
    (1, 0),
    (1, -1),
    (0, -1),
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Clockwise ring starting north: P2..P9 in the usual thinning notation.
pub(crate) const RING: [(i32, i32); 8] = [
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
    (-1, -1),
];

/// Row-major occupancy grid; `true` marks an object pixel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryImage {
    /// Blank image. Panics on a zero dimension; use [`BinaryImage::from_bits`]
    /// for untrusted sizes.
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        BinaryImage {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        if bits.len() != width * height {
            return Err(Error::InvalidParameter(format!(
                "{} bits for a {width}x{height} image",
                bits.len()
            )));
        }
        Ok(BinaryImage {
            width,
            height,
            bits,
        })
    }

    /// Smallest image containing every pixel (coordinates must be
    /// non-negative), padded by `margin` on the right and bottom.
    pub fn from_pixels(pixels: &[Pixel], margin: usize) -> Self {
        let w = pixels.iter().map(|p| p.x.max(0) as usize + 1).max().unwrap_or(1);
        let h = pixels.iter().map(|p| p.y.max(0) as usize + 1).max().unwrap_or(1);
        let mut img = BinaryImage::new(w + margin, h + margin);
        for &p in pixels {
            img.set(p, true);
        }
        img
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn in_bounds(&self, p: Pixel) -> bool {
        p.x >= 0 && p.y >= 0 && (p.x as usize) < self.width && (p.y as usize) < self.height
    }

    fn index(&self, p: Pixel) -> usize {
        p.y as usize * self.width + p.x as usize
    }

    /// Occupancy at `p`; anything outside the canvas is background.
    pub fn get(&self, p: Pixel) -> bool {
        self.in_bounds(p) && self.bits[self.index(p)]
    }

    /// Sets `p`; writes outside the canvas are ignored.
    pub fn set(&mut self, p: Pixel, value: bool) {
        if self.in_bounds(p) {
            let i = self.index(p);
            self.bits[i] = value;
        }
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_blank(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Object pixels in raster order.
    pub fn object_pixels(&self) -> impl Iterator<Item = Pixel> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(move |(i, _)| {
            Pixel::new((i % self.width) as i32, (i / self.width) as i32)
        })
    }

    /// Number of object pixels among the eight neighbours of `p`.
    pub fn neighbor_count(&self, p: Pixel) -> usize {
        p.neighbors().filter(|&n| self.get(n)).count()
    }

    /// Occupancy of the ring P2..P9 around `p`.
    pub(crate) fn ring(&self, p: Pixel) -> [bool; 8] {
        let mut r = [false; 8];
        for (k, &(dx, dy)) in RING.iter().enumerate() {
            r[k] = self.get(p.offset(dx, dy));
        }
        r
    }

    /// Number of background-to-object transitions around `p`'s ring
    /// (the crossing number): 1 on a curve end, 2 on a simple curve
    /// pixel, 3 or more where branches meet.
    pub fn crossing_number(&self, p: Pixel) -> usize {
        transitions(&self.ring(p))
    }

    pub fn same_size(&self, other: &BinaryImage) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        Ok(())
    }

    /// Pixel-wise OR with `other` (same dimensions required).
    pub fn union_with(&mut self, other: &BinaryImage) -> Result<()> {
        self.same_size(other)?;
        for (a, &b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
        Ok(())
    }

    /// Object pixels present in `self` but not in `other`.
    pub fn difference_count(&self, other: &BinaryImage) -> Result<usize> {
        self.same_size(other)?;
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .filter(|(&a, &b)| a && !b)
            .count())
    }

    /// 8-connected components, each listed in raster order.
    pub fn components(&self) -> Vec<Vec<Pixel>> {
        let mut seen = vec![false; self.bits.len()];
        let mut out = Vec::new();
        for p in self.object_pixels() {
            if seen[self.index(p)] {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![p];
            seen[self.index(p)] = true;
            while let Some(q) = stack.pop() {
                comp.push(q);
                for n in q.neighbors() {
                    if self.get(n) && !seen[self.index(n)] {
                        seen[self.index(n)] = true;
                        stack.push(n);
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
        out
    }
}

pub(crate) fn transitions(ring: &[bool; 8]) -> usize {
    (0..8).filter(|&k| !ring[k] && ring[(k + 1) % 8]).count()
}

/// 8-connectivity number of the pixel whose ring is given (Yokoi). A pixel
/// is simple, i.e. removable without changing the topology, iff this is 1.
pub(crate) fn connectivity_number(ring: &[bool; 8]) -> usize {
    // ring is P2..P9 clockwise from north; Yokoi's formula wants x1..x8
    // counter-clockwise from east with x1, x3, x5, x7 the 4-neighbours.
    let order = [2usize, 1, 0, 7, 6, 5, 4, 3];
    let inv: Vec<i32> = order.iter().map(|&k| i32::from(!ring[k])).collect();
    let mut n = 0;
    for k in [0usize, 2, 4, 6] {
        n += inv[k] - inv[k] * inv[(k + 1) % 8] * inv[(k + 2) % 8];
    }
    n as usize
}
