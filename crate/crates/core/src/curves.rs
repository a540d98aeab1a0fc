//! Ordered digital curves traced from a thinned raster, and the segment
//! list the detector works through.

use std::collections::{HashMap, HashSet};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::digigeom::RealPoint;
use crate::error::{Error, Result};
use crate::raster::{BinaryImage, Pixel};

/// An ordered run of 8-connected pixels. A closed curve wraps from its last
/// pixel back to the first; the first pixel is not repeated at the end.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSegment")]
pub struct CurveSegment {
    closed: bool,
    pixels: Vec<Pixel>,
}

#[derive(Deserialize)]
struct RawSegment {
    closed: bool,
    pixels: Vec<Pixel>,
}

impl TryFrom<RawSegment> for CurveSegment {
    type Error = Error;

    fn try_from(raw: RawSegment) -> Result<Self> {
        CurveSegment::new(raw.pixels, raw.closed)
    }
}

impl CurveSegment {
    /// Checks that consecutive pixels are 8-neighbours, that no pixel
    /// repeats, and for closed curves that the sequence wraps.
    pub fn new(pixels: Vec<Pixel>, closed: bool) -> Result<Self> {
        if pixels.is_empty() {
            return Err(Error::InvalidParameter("empty pixel sequence".into()));
        }
        if let Some(w) = pixels.windows(2).find(|w| !w[0].is_neighbor(w[1])) {
            return Err(Error::InvalidParameter(format!(
                "pixels {:?} and {:?} are not 8-neighbours",
                w[0], w[1]
            )));
        }
        let mut seen = HashSet::with_capacity(pixels.len());
        if let Some(p) = pixels.iter().find(|&&p| !seen.insert(p)) {
            return Err(Error::InvalidParameter(format!("pixel {p:?} repeats")));
        }
        if closed && (pixels.len() < 3 || !pixels[pixels.len() - 1].is_neighbor(pixels[0])) {
            return Err(Error::InvalidParameter(
                "closed curve must wrap through at least 3 pixels".into(),
            ));
        }
        Ok(CurveSegment { closed, pixels })
    }

    pub(crate) fn from_parts(pixels: Vec<Pixel>, closed: bool) -> Self {
        debug_assert!(!pixels.is_empty());
        CurveSegment { closed, pixels }
    }

    pub fn pixels(&self) -> &[Pixel] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<Pixel> {
        self.pixels
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// First and last pixel (for a closed curve, the two sides of the cut).
    pub fn endpoints(&self) -> (Pixel, Pixel) {
        (self.pixels[0], self.pixels[self.pixels.len() - 1])
    }

    /// Open sub-run over `range`.
    pub fn slice(&self, range: Range<usize>) -> CurveSegment {
        CurveSegment::from_parts(self.pixels[range].to_vec(), false)
    }

    pub fn reversed(&self) -> CurveSegment {
        let mut px = self.pixels.clone();
        px.reverse();
        CurveSegment::from_parts(px, self.closed)
    }

    /// The same closed curve cut open at its topmost-then-leftmost pixel.
    pub fn cut_at_top_left(&self) -> CurveSegment {
        let start = (0..self.len()).min_by_key(|&i| self.pixels[i]).unwrap_or(0);
        let mut px = self.pixels[start..].to_vec();
        px.extend_from_slice(&self.pixels[..start]);
        CurveSegment::from_parts(px, self.closed)
    }

    /// Every interior pixel sees exactly its two sequence neighbours among
    /// the curve's pixels (ends see one, unless the curve is closed).
    pub fn is_simple(&self) -> bool {
        let n = self.len();
        if n < 3 {
            return true;
        }
        let set: HashSet<Pixel> = self.pixels.iter().copied().collect();
        self.pixels.iter().enumerate().all(|(i, p)| {
            let seen = p.neighbors().filter(|q| set.contains(q)).count();
            let expected = if self.closed || (i > 0 && i < n - 1) { 2 } else { 1 };
            seen == expected
        })
    }

    pub fn to_image(&self, width: usize, height: usize) -> BinaryImage {
        let mut img = BinaryImage::new(width, height);
        for &p in &self.pixels {
            img.set(p, true);
        }
        img
    }
}

/// Index ranges of the left, central and right thirds of a run of `k`
/// pixels. The central range is `floor(k/3) ..= floor(2k/3)`, kept clear
/// of the last pixel so the right range is never empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Regions {
    pub left: Range<usize>,
    pub central: Range<usize>,
    pub right: Range<usize>,
}

pub fn partition_len(k: usize) -> Result<Regions> {
    if k < 3 {
        return Err(Error::SegmentTooShort { len: k, min: 3 });
    }
    let lo = k / 3;
    let hi = (2 * k / 3).min(k - 2);
    Ok(Regions {
        left: 0..lo,
        central: lo..hi + 1,
        right: hi + 1..k,
    })
}

pub fn partition_regions(seg: &CurveSegment) -> Result<Regions> {
    partition_len(seg.len())
}

/// One entry of the segment list. `junction_ends` names the junction
/// cluster (index into [`SegmentList::junctions`]) each end sits on.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentEntry {
    pub segment: CurveSegment,
    pub center: Option<RealPoint>,
    pub radius: Option<f64>,
    pub junction_ends: [Option<usize>; 2],
}

impl SegmentEntry {
    pub fn new(segment: CurveSegment) -> Self {
        SegmentEntry {
            segment,
            center: None,
            radius: None,
            junction_ends: [None, None],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SegmentList {
    pub entries: Vec<SegmentEntry>,
    /// Groups of 8-adjacent junction pixels.
    pub junctions: Vec<Vec<Pixel>>,
}

impl SegmentList {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn segments(&self) -> impl Iterator<Item = &CurveSegment> {
        self.entries.iter().map(|e| &e.segment)
    }

    /// Debug dump: a JSON array of `{closed, pixels}`.
    pub fn to_json(&self) -> String {
        let segs: Vec<&CurveSegment> = self.segments().collect();
        serde_json::to_string(&segs).expect("segments serialize")
    }
}

struct Tracer<'a> {
    img: &'a BinaryImage,
    junction: HashMap<Pixel, usize>,
    visited: HashSet<Pixel>,
}

impl Tracer<'_> {
    fn entry(&self, px: Vec<Pixel>, closed: bool) -> SegmentEntry {
        let a = self.junction.get(&px[0]).copied();
        let b = if closed {
            a
        } else {
            self.junction.get(&px[px.len() - 1]).copied()
        };
        let mut segment = CurveSegment::from_parts(px, closed);
        if closed && a.is_none() {
            segment = segment.cut_at_top_left();
        }
        SegmentEntry {
            segment,
            center: None,
            radius: None,
            junction_ends: [a, b],
        }
    }

    fn is_junction(&self, p: Pixel) -> bool {
        self.junction.contains_key(&p)
    }

    /// Follows the curve from `path`'s last pixel until it ends, reaches
    /// a junction, or closes on `path[0]`. Returns the pixels and whether
    /// the walk closed a loop.
    fn walk(&mut self, mut path: Vec<Pixel>) -> (Vec<Pixel>, bool) {
        let start = path[0];
        let start_is_junction = self.is_junction(start);
        loop {
            let cur = *path.last().expect("non-empty path");
            let prev = (path.len() >= 2).then(|| path[path.len() - 2]);
            let junction_step = cur.neighbors().find(|&n| {
                self.img.get(n)
                    && self.is_junction(n)
                    && Some(n) != prev
                    && n != cur
                    && (n != start || path.len() >= 3)
            });
            if let Some(j) = junction_step {
                if j == start {
                    return (path, true);
                }
                path.push(j);
                return (path, false);
            }
            let next = cur
                .neighbors()
                .find(|&n| self.img.get(n) && !self.is_junction(n) && !self.visited.contains(&n));
            match next {
                Some(n) => {
                    self.visited.insert(n);
                    path.push(n);
                }
                None => {
                    let closes = !start_is_junction
                        && path.len() >= 3
                        && cur.is_neighbor(start);
                    return (path, closes);
                }
            }
        }
    }
}

/// Traces a thinned raster into curve segments.
///
/// Pixels whose ring shows three or more separate branches are junctions;
/// each branch ends on the junction pixel it reaches, so a junction pixel
/// appears as an endpoint of every branch meeting there. Tracing starts
/// from free ends in raster order, then from junctions, and finally picks
/// up closed loops, each cut open at its topmost-then-leftmost pixel.
/// Neighbours are visited in the order E, NE, N, NW, W, SW, S, SE.
pub fn extract_segments(skeleton: &BinaryImage) -> SegmentList {
    let pixels: Vec<Pixel> = skeleton.object_pixels().collect();
    let junction_pixels: Vec<Pixel> = pixels
        .iter()
        .copied()
        .filter(|&p| skeleton.crossing_number(p) >= 3)
        .collect();
    let clusters = cluster(&junction_pixels);
    let mut junction = HashMap::new();
    for (id, c) in clusters.iter().enumerate() {
        for &p in c {
            junction.insert(p, id);
        }
    }
    let mut t = Tracer {
        img: skeleton,
        junction,
        visited: HashSet::new(),
    };
    let mut entries = Vec::new();

    // free ends
    for &p in &pixels {
        if t.is_junction(p) || t.visited.contains(&p) || skeleton.crossing_number(p) > 1 {
            continue;
        }
        t.visited.insert(p);
        let (px, closed) = t.walk(vec![p]);
        entries.push(t.entry(px, closed));
    }
    // branches leaving junctions
    let mut touched: HashSet<Pixel> = HashSet::new();
    for e in &entries {
        let (a, b) = e.segment.endpoints();
        touched.insert(a);
        touched.insert(b);
    }
    for &j in &junction_pixels {
        for n in j.neighbors() {
            if skeleton.get(n) && !t.is_junction(n) && !t.visited.contains(&n) {
                t.visited.insert(n);
                let (px, closed) = t.walk(vec![j, n]);
                touched.insert(px[0]);
                touched.insert(px[px.len() - 1]);
                entries.push(t.entry(px, closed));
            }
        }
    }
    // junction pixels no branch ended on
    for &j in &junction_pixels {
        if !touched.contains(&j) {
            entries.push(t.entry(vec![j], false));
        }
    }
    // loops without ends or junctions
    for &p in &pixels {
        if t.is_junction(p) || t.visited.contains(&p) {
            continue;
        }
        t.visited.insert(p);
        let (px, closed) = t.walk(vec![p]);
        entries.push(t.entry(px, closed));
    }
    SegmentList {
        entries,
        junctions: clusters,
    }
}

fn cluster(points: &[Pixel]) -> Vec<Vec<Pixel>> {
    let set: HashSet<Pixel> = points.iter().copied().collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for &p in points {
        if !seen.insert(p) {
            continue;
        }
        let mut comp = vec![p];
        let mut stack = vec![p];
        while let Some(q) = stack.pop() {
            for n in q.neighbors() {
                if set.contains(&n) && seen.insert(n) {
                    comp.push(n);
                    stack.push(n);
                }
            }
        }
        comp.sort();
        out.push(comp);
    }
    out
}
