use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{line_pixels, BinaryImage, Pixel};
use crate::digigeom::RealPoint;
use crate::error::{Error, Result};

/// Flips exactly `round(fraction * width * height)` pixels, chosen uniformly
/// without replacement by a generator seeded with `seed`.
pub fn add_salt_pepper(img: &BinaryImage, fraction: f64, seed: u64) -> Result<BinaryImage> {
    if !(0.0..=1.0).contains(&fraction) || fraction.is_nan() {
        return Err(Error::InvalidFraction(fraction));
    }
    let total = img.width() * img.height();
    let amount = ((fraction * total as f64).round() as usize).min(total);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = img.clone();
    for i in rand::seq::index::sample(&mut rng, total, amount).iter() {
        let p = Pixel::new((i % img.width()) as i32, (i / img.width()) as i32);
        out.set(p, !img.get(p));
    }
    Ok(out)
}

/// Geometry of a rotation about the image centre into an enlarged canvas.
/// Positive angles turn the x axis towards the y axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation {
    cos: f64,
    sin: f64,
    src_center: RealPoint,
    dst_center: RealPoint,
    pub width: usize,
    pub height: usize,
}

impl Rotation {
    pub fn new(width: usize, height: usize, degrees: f64) -> Self {
        let (sin, cos) = exact_sin_cos(degrees);
        let (w, h) = (width as f64, height as f64);
        let new_w = ceil_tol(w * cos.abs() + h * sin.abs()).max(1.0) as usize;
        let new_h = ceil_tol(w * sin.abs() + h * cos.abs()).max(1.0) as usize;
        Rotation {
            cos,
            sin,
            src_center: RealPoint::new((w - 1.0) / 2.0, (h - 1.0) / 2.0),
            dst_center: RealPoint::new((new_w as f64 - 1.0) / 2.0, (new_h as f64 - 1.0) / 2.0),
            width: new_w,
            height: new_h,
        }
    }

    /// Where a source point lands on the rotated canvas.
    pub fn map_point(&self, p: RealPoint) -> RealPoint {
        let dx = p.x - self.src_center.x;
        let dy = p.y - self.src_center.y;
        RealPoint::new(
            self.cos * dx - self.sin * dy + self.dst_center.x,
            self.sin * dx + self.cos * dy + self.dst_center.y,
        )
    }

    /// Source position sampled for a destination pixel.
    pub fn inverse(&self, q: RealPoint) -> RealPoint {
        let dx = q.x - self.dst_center.x;
        let dy = q.y - self.dst_center.y;
        RealPoint::new(
            self.cos * dx + self.sin * dy + self.src_center.x,
            -self.sin * dx + self.cos * dy + self.src_center.y,
        )
    }

    /// Rotation angle in radians.
    pub fn radians(&self) -> f64 {
        self.sin.atan2(self.cos)
    }

    /// Nearest destination pixel of a source pixel.
    pub fn map_pixel(&self, p: Pixel) -> Pixel {
        let q = self.map_point(p.into());
        Pixel::new(q.x.round() as i32, q.y.round() as i32)
    }

    /// Resamples `img` (which should have the source size) onto the
    /// rotated canvas: every destination pixel whose nearest source pixel
    /// is set, plus the nearest destination pixel of every source pixel,
    /// plus a short digital line wherever two neighbouring source pixels
    /// land apart. The last two keep thin curves in one piece.
    pub fn apply(&self, img: &BinaryImage) -> BinaryImage {
        let mut out = BinaryImage::new(self.width, self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                let src = self.inverse(RealPoint::new(x as f64, y as f64));
                let p = Pixel::new(src.x.round() as i32, src.y.round() as i32);
                if img.get(p) {
                    out.set(Pixel::new(x as i32, y as i32), true);
                }
            }
        }
        for p in img.object_pixels() {
            let a = self.map_pixel(p);
            out.set(a, true);
            for q in [p.offset(1, 0), p.offset(1, 1), p.offset(0, 1), p.offset(-1, 1)] {
                if !img.get(q) {
                    continue;
                }
                let b = self.map_pixel(q);
                if a.chebyshev(b) > 1 {
                    for r in line_pixels(a, b) {
                        out.set(r, true);
                    }
                }
            }
        }
        out
    }
}

/// Nearest-neighbour rotation about the image centre, sampling the source
/// through the inverse map so the output has no holes.
pub fn rotate(img: &BinaryImage, degrees: f64) -> BinaryImage {
    rotate_with_map(img, degrees).0
}

/// [`rotate`] plus the mapping used, for carrying annotations along.
pub fn rotate_with_map(img: &BinaryImage, degrees: f64) -> (BinaryImage, Rotation) {
    let rot = Rotation::new(img.width(), img.height(), degrees);
    (rot.apply(img), rot)
}

fn ceil_tol(v: f64) -> f64 {
    (v - 1e-9).ceil()
}

/// sin/cos with exact values at multiples of 90 degrees so quarter turns
/// are exact pixel permutations.
fn exact_sin_cos(degrees: f64) -> (f64, f64) {
    let d = degrees.rem_euclid(360.0);
    let quarter = d / 90.0;
    if (quarter - quarter.round()).abs() < 1e-12 {
        match quarter.round() as i64 % 4 {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        }
    } else {
        d.to_radians().sin_cos()
    }
}
