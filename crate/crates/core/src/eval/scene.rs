use std::f64::consts::{PI, TAU};
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::digigeom::{midpoint_circle, polar_angle, RealPoint};
use crate::error::{Error, Result};
use crate::raster::{line_pixels, load_binary, save_pbm, BinaryImage, Pixel, Rotation};

/// A circle or arc to draw. `span` is `[start, end]` in radians (image
/// frame, angles grow from +x towards +y); a missing span draws the whole
/// circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleSpec {
    pub center: Pixel,
    pub radius: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    #[serde(default)]
    pub circles: Vec<CircleSpec>,
    /// Straight segments by their end pixels.
    #[serde(default)]
    pub lines: Vec<[Pixel; 2]>,
}

/// A true circular primitive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Primitive {
    pub center: RealPoint,
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    /// Pixels on true circular arcs.
    pub arc_mask: BinaryImage,
    /// Every true curve pixel, arcs and lines alike.
    pub all_curves_mask: BinaryImage,
    pub primitives: Vec<Primitive>,
    pub lines: Vec<[Pixel; 2]>,
}

#[derive(Serialize, Deserialize)]
struct MaskRefs {
    arcs: PathBuf,
    curves: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct TruthFile {
    width: usize,
    height: usize,
    primitives: Vec<Primitive>,
    lines: Vec<[Pixel; 2]>,
    masks: MaskRefs,
}

impl GroundTruth {
    pub fn width(&self) -> usize {
        self.arc_mask.width()
    }

    pub fn height(&self) -> usize {
        self.arc_mask.height()
    }

    /// Writes the truth as JSON at `path` with the two masks as PBM files
    /// beside it (`<stem>.arcs.pbm`, `<stem>.curves.pbm`), referenced by
    /// file name.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("truth")
            .to_string();
        let dir = path.parent().unwrap_or(Path::new(""));
        let arcs = PathBuf::from(format!("{stem}.arcs.pbm"));
        let curves = PathBuf::from(format!("{stem}.curves.pbm"));
        save_pbm(&self.arc_mask, dir.join(&arcs))?;
        save_pbm(&self.all_curves_mask, dir.join(&curves))?;
        let file = TruthFile {
            width: self.width(),
            height: self.height(),
            primitives: self.primitives.clone(),
            lines: self.lines.clone(),
            masks: MaskRefs { arcs, curves },
        };
        let text = serde_json::to_string_pretty(&file).expect("truth serializes");
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    /// Reads a truth written by [`GroundTruth::save`]; mask paths are
    /// resolved against the JSON file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: TruthFile = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
        let dir = path.parent().unwrap_or(Path::new(""));
        let arc_mask = load_binary(dir.join(&file.masks.arcs), 128)?;
        let all_curves_mask = load_binary(dir.join(&file.masks.curves), 128)?;
        for m in [&arc_mask, &all_curves_mask] {
            if (m.width(), m.height()) != (file.width, file.height) {
                return Err(Error::DimensionMismatch(file.width, file.height, m.width(), m.height()));
            }
        }
        Ok(GroundTruth {
            arc_mask,
            all_curves_mask,
            primitives: file.primitives,
            lines: file.lines,
        })
    }

    /// The truth as seen through a rotation: masks resampled the same way
    /// as the image, centres mapped, spans turned by the angle. Lines keep
    /// their mapped end pixels.
    pub fn rotated(&self, rot: &Rotation) -> GroundTruth {
        let turn = rot.radians();
        let map_px = |p: Pixel| {
            let q = rot.map_point(p.into());
            Pixel::new(q.x.round() as i32, q.y.round() as i32)
        };
        GroundTruth {
            arc_mask: rot.apply(&self.arc_mask),
            all_curves_mask: rot.apply(&self.all_curves_mask),
            primitives: self
                .primitives
                .iter()
                .map(|p| Primitive {
                    center: rot.map_point(p.center),
                    radius: p.radius,
                    span: p.span.map(|[s, e]| [s + turn, e + turn]),
                })
                .collect(),
            lines: self.lines.iter().map(|&[a, b]| [map_px(a), map_px(b)]).collect(),
        }
    }
}

/// Pixels of the midpoint circle whose polar angle lies in the span.
fn arc_pixels(c: &CircleSpec) -> Result<Vec<Pixel>> {
    let ring = midpoint_circle(c.center, c.radius)?;
    let Some([start, end]) = c.span else {
        return Ok(ring.into_iter().collect());
    };
    if !(end > start) {
        return Err(Error::InvalidParameter(format!("arc span [{start}, {end}] is empty")));
    }
    let len = end - start;
    let center = RealPoint::from(c.center);
    Ok(ring
        .into_iter()
        .filter(|&p| len >= TAU || (polar_angle(center, p.into()) - start).rem_euclid(TAU) <= len + 1e-9)
        .collect())
}

/// Draws the scene. Arcs are midpoint digital circles cut to their span,
/// lines are Bresenham lines; a pixel covered by both counts as an arc
/// pixel.
pub fn synth_scene(spec: &SceneSpec) -> Result<(BinaryImage, GroundTruth)> {
    let (w, h) = (spec.width, spec.height);
    if w == 0 || h == 0 {
        return Err(Error::EmptyImage);
    }
    let mut arc_mask = BinaryImage::new(w, h);
    let mut all = BinaryImage::new(w, h);
    let inside = |p: Pixel| p.x >= 0 && p.y >= 0 && (p.x as usize) < w && (p.y as usize) < h;
    for c in &spec.circles {
        for p in arc_pixels(c)? {
            if !inside(p) {
                return Err(Error::OutOfBounds(format!(
                    "circle at {:?} with radius {} leaves the {w}x{h} canvas",
                    c.center, c.radius
                )));
            }
            arc_mask.set(p, true);
            all.set(p, true);
        }
    }
    for &[a, b] in &spec.lines {
        if !inside(a) || !inside(b) {
            return Err(Error::OutOfBounds(format!("line {a:?}-{b:?} leaves the {w}x{h} canvas")));
        }
        for p in line_pixels(a, b) {
            all.set(p, true);
        }
    }
    let primitives = spec
        .circles
        .iter()
        .map(|c| Primitive {
            center: c.center.into(),
            radius: f64::from(c.radius),
            span: c.span,
        })
        .collect();
    let truth = GroundTruth {
        arc_mask,
        all_curves_mask: all.clone(),
        primitives,
        lines: spec.lines.clone(),
    };
    Ok((all, truth))
}

/// A random test scene: 3 to 8 circles or arcs (radius 15 to 120, arcs
/// spanning a quarter to three quarters of a turn, discs kept apart) and
/// 2 to 5 straight lines at least 60 pixels long, which may cross them.
pub fn random_scene_spec(seed: u64, width: usize, height: usize) -> SceneSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (width as i32, height as i32);
    let want = rng.random_range(3..=8);
    let mut circles: Vec<CircleSpec> = Vec::new();
    let mut tries = 0;
    while circles.len() < want && tries < 5000 {
        tries += 1;
        let r = rng.random_range(15..=120);
        if 2 * r + 6 >= w.min(h) {
            continue;
        }
        let center = Pixel::new(rng.random_range(r + 2..w - r - 2), rng.random_range(r + 2..h - r - 2));
        let apart = circles.iter().all(|c| {
            let d = RealPoint::from(c.center).dist(center.into());
            d > f64::from(c.radius + r + 8)
        });
        if !apart {
            continue;
        }
        let span = if rng.random_bool(0.5) {
            None
        } else {
            let start = rng.random_range(0.0..TAU);
            let len = rng.random_range(PI / 2.0..=1.5 * PI);
            Some([start, start + len])
        };
        circles.push(CircleSpec { center, radius: r, span });
    }
    let n_lines = rng.random_range(2..=5);
    let mut lines = Vec::new();
    while lines.len() < n_lines {
        let a = Pixel::new(rng.random_range(5..w - 5), rng.random_range(5..h - 5));
        let b = Pixel::new(rng.random_range(5..w - 5), rng.random_range(5..h - 5));
        if RealPoint::from(a).dist(b.into()) >= 60.0 {
            lines.push([a, b]);
        }
    }
    SceneSpec {
        width,
        height,
        circles,
        lines,
    }
}
