use std::cmp::Reverse;

use crate::digigeom::CircleParams;

use super::ArcRecord;

fn lies_on(arc: &ArcRecord, circle: &CircleParams, tol: f64) -> bool {
    arc.skeleton_pixels().all(|p| circle.distance_to(p.into()) <= tol)
}

/// Reports arcs of one circle as one arc. Longest first, each arc whose
/// pixels all lie within `tol` of the circle of an arc already kept is
/// folded into that arc as a joined piece; the kept arc's parameters stand.
/// Survivors keep their input order.
pub fn join_cocircular(arcs: Vec<ArcRecord>, tol: f64) -> Vec<ArcRecord> {
    let mut order: Vec<usize> = (0..arcs.len()).collect();
    order.sort_by_key(|&i| (Reverse(arcs[i].skeleton_pixels().count()), i));
    let mut slots: Vec<Option<ArcRecord>> = arcs.into_iter().map(Some).collect();
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        let arc = slots[i].take().expect("each arc visited once");
        let host = kept.iter().copied().find(|&k| {
            let h = slots[k].as_ref().expect("kept arcs stay in place");
            lies_on(&arc, &h.circle(), tol)
        });
        match host {
            Some(k) => {
                let h = slots[k].as_mut().expect("kept arcs stay in place");
                h.merged_from += arc.merged_from;
                h.joined.push(arc.segment);
                h.joined.extend(arc.joined);
            }
            None => {
                slots[i] = Some(arc);
                kept.push(i);
            }
        }
    }
    slots.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csa::ArcSource;
    use crate::curves::CurveSegment;
    use crate::digigeom::{circle_curve, RealPoint};
    use crate::raster::Pixel;

    fn piece(ring: &[Pixel], center: RealPoint, radius: f64) -> ArcRecord {
        ArcRecord {
            segment: CurveSegment::new(ring.to_vec(), false).unwrap(),
            center,
            radius,
            source: ArcSource::Hough,
            merged_from: 1,
            sagitta: None,
            joined: vec![],
            absorbed: vec![],
        }
    }

    #[test]
    fn sliver_of_the_same_circle_is_folded_in() {
        let ring = circle_curve(Pixel::new(100, 100), 35).unwrap();
        let c = RealPoint::new(100.0, 100.0);
        let big = piece(&ring[20..], c, 35.0);
        // a badly estimated short piece of the same circle
        let small = piece(&ring[..17], RealPoint::new(110.0, 95.0), 17.0);
        let out = join_cocircular(vec![small.clone(), big.clone()], 1.5);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].radius, 35.0);
        assert_eq!(out[0].merged_from, 2);
        assert_eq!(out[0].joined, vec![small.segment]);
        assert_eq!(out[0].summary().n_pixels, ring.len() - 3);
    }

    #[test]
    fn different_circles_stay_apart_in_order() {
        let a = circle_curve(Pixel::new(50, 50), 20).unwrap();
        let b = circle_curve(Pixel::new(50, 50), 24).unwrap();
        let d = circle_curve(Pixel::new(150, 50), 20).unwrap();
        let arcs = vec![
            piece(&a[..40], RealPoint::new(50.0, 50.0), 20.0),
            piece(&b[..60], RealPoint::new(50.0, 50.0), 24.0),
            piece(&d[..30], RealPoint::new(150.0, 50.0), 20.0),
        ];
        assert_eq!(join_cocircular(arcs.clone(), 1.5), arcs);
    }
}
