use std::collections::HashSet;
use std::f64::consts::{PI, TAU};

use arcscan::baselines::{evm_detect, rht_detect, EvmConfig, RhtConfig};
use arcscan::csa::{self, detect_traced, estimate_params, merge_adjacent, passes_chord_test, restricted_hough, CsaConfig};
use arcscan::curves::partition_len;
use arcscan::digigeom::{
    circle_curve, circumcircle, corresponding_point, digital_arc, is_digitally_straight, midpoint_circle, real_angle,
    sagitta_estimate, subtended_angle, CircleParams, RealPoint,
};
use arcscan::eval::{compute_metrics, random_scene_spec, synth_scene, MetricsReport};
use arcscan::raster::{add_salt_pepper, rotate, BinaryImage, Pixel};
use proptest::prelude::*;

fn sparse_image() -> impl Strategy<Value = BinaryImage> {
    (4usize..40, 4usize..40, proptest::collection::vec(any::<bool>(), 1600)).prop_map(|(w, h, bits)| {
        let bits = bits.into_iter().take(w * h).collect();
        BinaryImage::from_bits(w, h, bits).unwrap()
    })
}

fn ring_image(c: Pixel, r: i32, w: usize, h: usize) -> BinaryImage {
    let mut img = BinaryImage::new(w, h);
    for p in midpoint_circle(c, r).unwrap() {
        img.set(p, true);
    }
    img
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn noise_is_repeatable_and_flips_the_exact_count(img in sparse_image(), f in 0.0f64..=1.0, seed in any::<u64>()) {
        let a = add_salt_pepper(&img, f, seed).unwrap();
        prop_assert_eq!(&a, &add_salt_pepper(&img, f, seed).unwrap());
        let n = (f * (img.width() * img.height()) as f64).round() as usize;
        let flipped = img.bits().iter().zip(a.bits()).filter(|(x, y)| x != y).count();
        prop_assert_eq!(flipped, n);
    }

    #[test]
    fn quarter_turns_permute_pixels(img in sparse_image(), k in 1u32..4) {
        let out = rotate(&img, 90.0 * f64::from(k));
        prop_assert_eq!(out.count(), img.count());
        // four quarter turns come back to the start
        let mut back = out.clone();
        for _ in 0..(4 - k) {
            back = rotate(&back, 90.0);
        }
        let a: HashSet<Pixel> = img.object_pixels().collect();
        let b: HashSet<Pixel> = back.object_pixels().collect();
        // the canvas may grow, so compare after aligning the bounding boxes
        let shift = |s: &HashSet<Pixel>| {
            let (mx, my) = s.iter().fold((i32::MAX, i32::MAX), |(x, y), p| (x.min(p.x), y.min(p.y)));
            s.iter().map(|p| Pixel::new(p.x - mx, p.y - my)).collect::<HashSet<_>>()
        };
        prop_assert_eq!(shift(&a), shift(&b));
    }

    #[test]
    fn circumcircle_recovers_the_circle(
        cx in -500.0f64..500.0, cy in -500.0f64..500.0, r in 1.0f64..1000.0,
        t1 in 0.0f64..TAU, d2 in 0.3f64..2.0, d3 in 0.3f64..2.0,
    ) {
        let at = |t: f64| RealPoint::new(cx + r * t.cos(), cy + r * t.sin());
        let c = circumcircle(at(t1), at(t1 + d2), at(t1 + d2 + d3)).unwrap();
        prop_assert!((c.radius - r).abs() / r < 1e-9);
        prop_assert!(c.center.dist(RealPoint::new(cx, cy)) / r < 1e-9);
    }

    #[test]
    fn perfect_counts_mean_full_accuracy(n_c in 0usize..10_000, n_g in 0usize..5000, n_fa in 0usize..100, n_fr in 0usize..100) {
        let n_fr = n_fr.min(n_g);
        let n_fa = n_fa.min(n_c.saturating_sub(n_fr));
        let m = MetricsReport::from_counts(n_c, n_g, n_g - n_fr + n_fa, n_fa, n_fr);
        prop_assert_eq!(m.ad == 1.0, n_fa == 0 && n_fr == 0 || n_c == 0);
    }
}

#[test]
fn midpoint_pixels_round_the_true_circle() {
    for r in 1..=300 {
        for p in midpoint_circle(Pixel::new(0, 0), r).unwrap() {
            // first octant: 0 <= x <= y
            if p.x >= 0 && p.y >= p.x {
                let y = f64::from(r * r - p.x * p.x).sqrt();
                assert!((f64::from(p.y) - y).abs() < 0.5, "r {r} pixel {p:?}");
            }
        }
    }
}

#[test]
fn middle_pixel_deviation_is_bounded() {
    for r in [20, 50, 100, 200] {
        let circle = CircleParams::new(RealPoint::new(0.0, 0.0), f64::from(r));
        let ring = circle_curve(Pixel::new(0, 0), r).unwrap();
        let semi = ring.len() / 2;
        for len in (7..=semi).step_by(3) {
            for start in (0..ring.len()).step_by(7) {
                let px: Vec<Pixel> = (0..len).map(|i| ring[(start + i) % ring.len()]).collect();
                let (a, b, m) = (px[0], px[len - 1], px[len / 2]);
                let d = RealPoint::from(a).dist(b.into());
                if d <= 2.0 {
                    continue;
                }
                let phi_m = subtended_angle(a, m, b).unwrap();
                let phi_g = real_angle(
                    corresponding_point(a, &circle),
                    corresponding_point(m, &circle),
                    corresponding_point(b, &circle),
                );
                assert!((phi_m - phi_g).abs() < 2.0 * (2.0 / d).asin(), "r {r} len {len} start {start}");
            }
        }
    }
}

#[test]
fn semicircle_sagitta_is_exact() {
    for r in [3, 10, 57] {
        let e = sagitta_estimate(Pixel::new(-r, 0), Pixel::new(r, 0), Pixel::new(0, r)).unwrap();
        assert_eq!(e.radius, f64::from(r));
        assert_eq!(e.err_bound, 0.5);
    }
}

#[test]
fn detected_arcs_are_certified_curved_and_long_enough() {
    let cfg = CsaConfig::default();
    for seed in 0..6 {
        let (img, _) = synth_scene(&random_scene_spec(seed, 600, 600)).unwrap();
        let arcs = csa::detect(&img, &cfg).unwrap();
        assert!(!arcs.is_empty());
        for a in &arcs {
            let seg = &a.segment;
            assert!(seg.len() >= cfg.tau_c);
            assert!(!is_digitally_straight(seg, cfg.tau_h));
            assert!(passes_chord_test(seg.pixels(), seg.is_closed(), &cfg));
        }
        // same input, same bytes
        let again = csa::detect(&img, &cfg).unwrap();
        let json = |v: &[csa::ArcRecord]| serde_json::to_string(&v.iter().map(|a| a.summary()).collect::<Vec<_>>()).unwrap();
        assert_eq!(json(&arcs), json(&again));
    }
}

#[test]
fn merging_keeps_every_certified_pixel() {
    let cfg = CsaConfig::default();
    for seed in 0..6 {
        let (img, _) = synth_scene(&random_scene_spec(seed, 600, 600)).unwrap();
        let trace = detect_traced(&img, &cfg).unwrap();
        let before: HashSet<Pixel> = trace.certified.iter().flat_map(|c| c.segment.pixels().to_vec()).collect();
        let merged = merge_adjacent(trace.certified.clone(), &trace.segments.junctions, &cfg);
        let after: HashSet<Pixel> = merged.iter().flat_map(|c| c.segment.pixels().to_vec()).collect();
        assert!(after.len() >= before.len(), "seed {seed}");
        assert!(before.is_subset(&after));
    }
}

#[test]
fn hough_refinement_stays_close_on_exact_arcs() {
    let cfg = CsaConfig::default();
    for r in [15, 24, 40, 77, 120] {
        for k in 0..8 {
            let start = f64::from(k) * PI / 4.0;
            let seg = digital_arc(Pixel::new(200, 200), r, start, start + PI * 0.6).unwrap();
            let rec = estimate_params(&seg).unwrap();
            let refined = restricted_hough(&rec, &cfg);
            let rt = f64::from(r);
            let bound = (rec.radius - rt).abs().min(1.0) + 1.0;
            assert!(
                (refined.radius - rt).abs() <= bound,
                "r {r} start {start}: sagitta {} refined {}",
                rec.radius,
                refined.radius
            );
        }
    }
}

/// Object pixels within a pixel of the circle over its circumference,
/// counted by visiting every pixel of the image.
fn brute_force_rate(img: &BinaryImage, c: &CircleParams) -> f64 {
    let n = img.object_pixels().filter(|&p| c.distance_to(p.into()) <= 1.0).count();
    (n as f64 / (TAU * c.radius)).min(1.0)
}

#[test]
fn baselines_are_repeatable_and_meet_their_thresholds() {
    let mut img = ring_image(Pixel::new(60, 60), 35, 220, 140);
    img.union_with(&ring_image(Pixel::new(160, 70), 45, 220, 140)).unwrap();
    let noisy = add_salt_pepper(&img, 0.01, 5).unwrap();

    let rht = RhtConfig {
        rng_seed: 9,
        ..RhtConfig::default()
    };
    let a = rht_detect(&noisy, &rht).unwrap();
    assert_eq!(a, rht_detect(&noisy, &rht).unwrap());
    // the RHT threshold holds on the image as it was when the circle was
    // accepted, so at least that many of its claimed pixels are on it
    for arc in &a {
        assert!(arc.absorbed.len() as f64 / (TAU * arc.radius) >= rht.t_r);
    }

    let evm = EvmConfig {
        rng_seed: 9,
        sample_count: 80,
        ..EvmConfig::default()
    };
    let b = evm_detect(&noisy, &evm).unwrap();
    assert_eq!(b, evm_detect(&noisy, &evm).unwrap());
    for arc in &b {
        assert!(brute_force_rate(&noisy, &arc.circle()) >= evm.t_e);
    }
}

#[test]
fn all_detectors_agree_on_a_clean_circle() {
    let img = ring_image(Pixel::new(70, 64), 41, 140, 130);
    let truth = RealPoint::new(70.0, 64.0);
    let csa = csa::detect(&img, &CsaConfig::default()).unwrap();
    let rht = rht_detect(&img, &RhtConfig::default()).unwrap();
    let evm = evm_detect(&img, &EvmConfig::default()).unwrap();
    for (name, arcs) in [("csa", csa), ("rht", rht), ("evm", evm)] {
        assert_eq!(arcs.len(), 1, "{name}");
        assert!(arcs[0].center.dist(truth) <= 2.0, "{name}");
        assert!((arcs[0].radius - 41.0).abs() <= 2.0, "{name}");
    }
}

#[test]
fn truth_scored_against_itself_has_no_errors() {
    for seed in 0..4 {
        let (_, truth) = synth_scene(&random_scene_spec(seed, 500, 500)).unwrap();
        let m = compute_metrics(&truth.arc_mask, &truth).unwrap();
        assert_eq!((m.e1, m.e2, m.ad), (Some(0.0), 0.0, 1.0));
    }
}

#[test]
fn central_region_partition_covers_the_run() {
    for k in 3..200 {
        let r = partition_len(k).unwrap();
        assert_eq!(r.left.start, 0);
        assert_eq!(r.left.end, r.central.start);
        assert_eq!(r.central.end, r.right.start);
        assert_eq!(r.right.end, k);
        assert!(!r.central.is_empty() && !r.right.is_empty());
    }
}
