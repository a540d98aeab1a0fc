//! Geometry on the integer grid and its real counterparts: digital circles
//! and arcs, the straightness test, chord angles with their deviation
//! bounds, sagitta radius estimation and the circumcircle of three points.

use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::curves::CurveSegment;
use crate::error::{Error, Result};
use crate::raster::Pixel;

/// A point of the real plane, in pixel units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct RealPoint {
    pub x: f64,
    pub y: f64,
}

impl RealPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        RealPoint { x, y }
    }

    pub fn dist(self, other: RealPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<Pixel> for RealPoint {
    fn from(p: Pixel) -> Self {
        RealPoint::new(f64::from(p.x), f64::from(p.y))
    }
}

impl From<[f64; 2]> for RealPoint {
    fn from(v: [f64; 2]) -> Self {
        RealPoint::new(v[0], v[1])
    }
}

impl From<RealPoint> for [f64; 2] {
    fn from(p: RealPoint) -> Self {
        [p.x, p.y]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleParams {
    pub center: RealPoint,
    pub radius: f64,
}

impl CircleParams {
    pub fn new(center: RealPoint, radius: f64) -> Self {
        CircleParams { center, radius }
    }

    /// Distance from `p` to the circle itself.
    pub fn distance_to(&self, p: RealPoint) -> f64 {
        (self.center.dist(p) - self.radius).abs()
    }
}

/// Angles subtended by a chord `ab` at an interior pixel `c` and at the
/// middle pixel `m` of the same arc, with the deviation bound at `c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChordAngles {
    pub phi_c: f64,
    pub phi_m: f64,
    pub dev_bound: f64,
}

/// Radius and centre recovered from a chord and the height of the arc
/// above its midpoint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SagittaEstimate {
    pub chord_len: f64,
    pub sagitta_len: f64,
    pub radius: f64,
    pub center: RealPoint,
    /// Upper bound on the relative radius error, `|1 - s/(2r)|`.
    pub err_bound: f64,
}

/// Twice the signed area of triangle `a c b`:
/// `(xc - xa)(yb - ya) - (xb - xa)(yc - ya)`.
pub fn triangle_area2(a: Pixel, c: Pixel, b: Pixel) -> i64 {
    let (xa, ya) = (i64::from(a.x), i64::from(a.y));
    let (xb, yb) = (i64::from(b.x), i64::from(b.y));
    let (xc, yc) = (i64::from(c.x), i64::from(c.y));
    (xc - xa) * (yb - ya) - (xb - xa) * (yc - ya)
}

/// Chebyshev distance between two pixels.
pub fn isothetic_distance(a: Pixel, b: Pixel) -> i64 {
    i64::from(a.chebyshev(b))
}

/// Area-deviation straightness test on a pixel run: every interior pixel
/// `c` satisfies `|area2(a, c, b)| <= tau_h * isothetic(a, b)`.
pub fn is_straight_run(pixels: &[Pixel], tau_h: i64) -> bool {
    let (Some(&a), Some(&b)) = (pixels.first(), pixels.last()) else {
        return true;
    };
    if pixels.len() < 3 {
        return true;
    }
    let limit = tau_h * isothetic_distance(a, b);
    pixels[1..pixels.len() - 1]
        .iter()
        .all(|&c| triangle_area2(a, c, b).abs() <= limit)
}

/// [`is_straight_run`] applied to a segment's pixel sequence.
pub fn is_digitally_straight(seg: &CurveSegment, tau_h: i64) -> bool {
    is_straight_run(seg.pixels(), tau_h)
}

/// Integer nearest to `sqrt(n)`, with halves rounded up.
fn round_sqrt(n: i64) -> i64 {
    let mut y = (n as f64).sqrt().round() as i64;
    // y is the rounding of sqrt(n) iff (2y-1)^2 <= 4n < (2y+1)^2
    while y > 0 && (2 * y - 1) * (2 * y - 1) > 4 * n {
        y -= 1;
    }
    while (2 * y + 1) * (2 * y + 1) <= 4 * n {
        y += 1;
    }
    y
}

/// Midpoint digital circle: for each column `x` of the first octant,
/// `y = round(sqrt(r^2 - x^2))`, reflected into all eight octants.
pub fn midpoint_circle(center: Pixel, r: i32) -> Result<BTreeSet<Pixel>> {
    if r < 1 {
        return Err(Error::InvalidParameter(format!("radius {r} must be >= 1")));
    }
    let r = i64::from(r);
    let mut out = BTreeSet::new();
    let x_max = ((r as f64) / std::f64::consts::SQRT_2).ceil() as i64;
    for x in 0..=x_max.min(r) {
        let y = round_sqrt(r * r - x * x);
        for (u, v) in [(x, y), (y, x)] {
            for (su, sv) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                out.insert(center.offset((su * u) as i32, (sv * v) as i32));
            }
        }
    }
    Ok(out)
}

/// Angle of `p` around `center` in `[0, 2pi)`, measured with `atan2` in
/// image coordinates (y grows downwards).
pub fn polar_angle(center: RealPoint, p: RealPoint) -> f64 {
    let t = (p.y - center.y).atan2(p.x - center.x);
    if t < 0.0 {
        t + TAU
    } else {
        t
    }
}

/// The digital circle as a closed 8-connected curve ordered by increasing
/// angle, with redundant corner pixels (those whose two curve neighbours
/// already touch) left out. Starts at the pixel of smallest angle.
pub fn circle_curve(center: Pixel, r: i32) -> Result<Vec<Pixel>> {
    let c = RealPoint::from(center);
    let mut pts: Vec<(f64, Pixel)> = midpoint_circle(center, r)?
        .into_iter()
        .map(|p| (polar_angle(c, RealPoint::from(p)), p))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let ring: Vec<Pixel> = pts.into_iter().map(|(_, p)| p).collect();
    let n = ring.len();
    let mut keep: Vec<Pixel> = Vec::with_capacity(n);
    for i in 0..n {
        let next = ring[(i + 1) % n];
        if keep.last().is_some_and(|prev| prev.is_neighbor(next)) {
            continue;
        }
        keep.push(ring[i]);
    }
    // the wrap-around junction
    while keep.len() > 4 && keep[keep.len() - 2].is_neighbor(keep[0]) {
        keep.pop();
    }
    Ok(keep)
}

/// Digital arc of the midpoint circle covering angles from `start_angle`
/// to `end_angle`, walked in the direction of increasing angle. A span of
/// 2pi or more yields the whole closed circle.
pub fn digital_arc(center: Pixel, r: i32, start_angle: f64, end_angle: f64) -> Result<CurveSegment> {
    let span = end_angle - start_angle;
    if !(span > 0.0) || !span.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "empty angular span [{start_angle}, {end_angle}]"
        )));
    }
    let ring = circle_curve(center, r)?;
    let c = RealPoint::from(center);
    let offset = |p: Pixel| (polar_angle(c, RealPoint::from(p)) - start_angle).rem_euclid(TAU);
    let first = (0..ring.len())
        .min_by(|&i, &j| offset(ring[i]).total_cmp(&offset(ring[j])))
        .unwrap_or(0);
    let mut rotated: Vec<Pixel> = ring[first..].iter().chain(&ring[..first]).copied().collect();
    if span >= TAU - 1e-12 {
        return Ok(CurveSegment::from_parts(rotated, true));
    }
    const EPS: f64 = 1e-9;
    rotated.retain(|&p| offset(p) <= span + EPS);
    if rotated.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "span [{start_angle}, {end_angle}] contains no pixel of radius {r}"
        )));
    }
    Ok(CurveSegment::from_parts(rotated, false))
}

/// Interior angle at `c` of the triangle `a c b`, in `[0, pi]`, from the
/// cross and dot products of the two difference vectors.
pub fn subtended_angle(a: Pixel, c: Pixel, b: Pixel) -> Result<f64> {
    if c == a || c == b {
        return Err(Error::Degenerate("angle vertex coincides with a chord end"));
    }
    Ok(real_angle(a.into(), c.into(), b.into()))
}

/// [`subtended_angle`] for real points (no degeneracy check).
pub fn real_angle(a: RealPoint, c: RealPoint, b: RealPoint) -> f64 {
    let (ux, uy) = (a.x - c.x, a.y - c.y);
    let (vx, vy) = (b.x - c.x, b.y - c.y);
    (ux * vy - uy * vx).abs().atan2(ux * vx + uy * vy)
}

/// Largest possible gap between the angle subtended by chord `ab` at a
/// digital circle pixel `c` and at its real counterpart:
/// `asin(1/|ac|) + asin(1/|cb|)`. Needs both distances above 1.
pub fn chord_deviation_bound(a: Pixel, c: Pixel, b: Pixel) -> Result<f64> {
    let dac = RealPoint::from(a).dist(c.into());
    let dcb = RealPoint::from(c).dist(b.into());
    if dac <= 1.0 || dcb <= 1.0 {
        return Err(Error::Degenerate("pixel within unit distance of a chord end"));
    }
    Ok((1.0 / dac).asin() + (1.0 / dcb).asin())
}

/// Bound on the deviation at the middle of a chord of length `chord`:
/// `2 asin(2 / chord)`.
pub fn middle_deviation_bound(chord: f64) -> Result<f64> {
    if chord <= 2.0 {
        return Err(Error::Degenerate("chord too short for the middle bound"));
    }
    Ok(2.0 * (2.0 / chord).asin())
}

/// Chord angles for the pixel at `c_index` of `pixels`: the angle at `c`,
/// the angle at the middle pixel `pixels[len / 2]`, and the bound at `c`.
pub fn chord_angles(pixels: &[Pixel], c_index: usize) -> Result<ChordAngles> {
    let k = pixels.len();
    if k < 3 || c_index == 0 || c_index >= k - 1 {
        return Err(Error::InvalidParameter(format!(
            "index {c_index} is not interior to a run of {k} pixels"
        )));
    }
    let (a, b) = (pixels[0], pixels[k - 1]);
    Ok(ChordAngles {
        phi_c: subtended_angle(a, pixels[c_index], b)?,
        phi_m: subtended_angle(a, pixels[k / 2], b)?,
        dev_bound: chord_deviation_bound(a, pixels[c_index], b)?,
    })
}

/// The real point a digital circle pixel stands for: the circle point on
/// the same grid line along the pixel's minor coordinate (the column in
/// octants where the circle is flatter than 45 degrees, the row otherwise).
pub fn corresponding_point(p: Pixel, circle: &CircleParams) -> RealPoint {
    let dx = f64::from(p.x) - circle.center.x;
    let dy = f64::from(p.y) - circle.center.y;
    let r2 = circle.radius * circle.radius;
    if dx.abs() <= dy.abs() {
        let y = (r2 - dx * dx).max(0.0).sqrt().copysign(dy);
        RealPoint::new(circle.center.x + dx, circle.center.y + y)
    } else {
        let x = (r2 - dy * dy).max(0.0).sqrt().copysign(dx);
        RealPoint::new(circle.center.x + x, circle.center.y + dy)
    }
}

/// Relative error `|phi_gamma - phi_c| / phi_gamma` between the angle the
/// chord subtends at pixel `c_index` and the angle the true chord subtends
/// at the corresponding real point.
pub fn care(seg: &CurveSegment, c_index: usize, truth: &CircleParams) -> Result<f64> {
    let px = seg.pixels();
    let k = px.len();
    if k < 3 || c_index == 0 || c_index >= k - 1 {
        return Err(Error::InvalidParameter(format!(
            "index {c_index} is not interior to a segment of {k} pixels"
        )));
    }
    let (a, c, b) = (px[0], px[c_index], px[k - 1]);
    let phi_c = subtended_angle(a, c, b)?;
    let alpha = corresponding_point(a, truth);
    let beta = corresponding_point(b, truth);
    let gamma = corresponding_point(c, truth);
    let phi_g = real_angle(alpha, gamma, beta);
    if phi_g <= 0.0 {
        return Err(Error::Degenerate("zero inscribed angle"));
    }
    Ok((phi_g - phi_c).abs() / phi_g)
}

/// Radius from chord `ab` and the arc pixel `foot` reached by the
/// perpendicular through the chord midpoint: `r = d^2 / (8s) + s / 2`.
pub fn sagitta_estimate(a: Pixel, b: Pixel, foot: Pixel) -> Result<SagittaEstimate> {
    if a == b {
        return Err(Error::Degenerate("chord endpoints coincide"));
    }
    let (pa, pb, pf) = (RealPoint::from(a), RealPoint::from(b), RealPoint::from(foot));
    let mid = RealPoint::new((pa.x + pb.x) / 2.0, (pa.y + pb.y) / 2.0);
    let chord = pa.dist(pb);
    let s = pf.dist(mid);
    if s == 0.0 || triangle_area2(a, foot, b) == 0 {
        return Err(Error::Degenerate("sagitta foot lies on the chord"));
    }
    let radius = chord * chord / (8.0 * s) + s / 2.0;
    let (ux, uy) = ((mid.x - pf.x) / s, (mid.y - pf.y) / s);
    Ok(SagittaEstimate {
        chord_len: chord,
        sagitta_len: s,
        radius,
        center: RealPoint::new(pf.x + radius * ux, pf.y + radius * uy),
        err_bound: (1.0 - s / (2.0 * radius)).abs(),
    })
}

/// The circle through three points.
pub fn circumcircle(p1: RealPoint, p2: RealPoint, p3: RealPoint) -> Result<CircleParams> {
    let (bx, by) = (p2.x - p1.x, p2.y - p1.y);
    let (cx, cy) = (p3.x - p1.x, p3.y - p1.y);
    let d = 2.0 * (bx * cy - by * cx);
    let scale = (bx * bx + by * by).max(cx * cx + cy * cy);
    if d.abs() <= 1e-12 * scale.max(1e-300) {
        return Err(Error::Degenerate("collinear points"));
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    let center = RealPoint::new(p1.x + ux, p1.y + uy);
    Ok(CircleParams::new(center, ux.hypot(uy)))
}

/// Wraps an angle difference into `(-pi, pi]`.
pub fn wrap_angle(t: f64) -> f64 {
    let w = (t + PI).rem_euclid(TAU) - PI;
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}
