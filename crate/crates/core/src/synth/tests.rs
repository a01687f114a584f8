use std::collections::VecDeque;

use proptest::prelude::*;
use rand::Rng;

use super::scene::{figure_color, pick_occluder};
use super::*;
use crate::maf::{Exemplar, NUM_JOINTS};
use crate::raster::BinaryMask;

fn four_connected(mask: &BinaryMask) -> bool {
    let (w, h) = mask.dims();
    let Some(start) = mask.indices().next() else { return false };
    let mut seen = vec![false; w * h];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    let mut reached = 0;
    while let Some(u) = queue.pop_front() {
        reached += 1;
        let (x, y) = (u % w, u / w);
        let mut visit = |v: usize| {
            if mask.at(v) && !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        };
        if x > 0 {
            visit(u - 1);
        }
        if x + 1 < w {
            visit(u + 1);
        }
        if y > 0 {
            visit(u - w);
        }
        if y + 1 < h {
            visit(u + w);
        }
    }
    reached == mask.count()
}

#[test]
fn rest_pose_is_mirror_symmetric() {
    let spec = FigureSpec::canonical(10.0, Point2::new(64.0, 60.0));
    let j = spec.joints();
    assert_eq!(j.len(), NUM_JOINTS);
    for k in 0..3 {
        assert!((j[k].x - 64.0).abs() < 1.0, "joint {k}");
    }
    for (l, r) in [(3, 4), (5, 6), (7, 8), (9, 10), (11, 12), (13, 14)] {
        assert!((j[l].x + j[r].x - 128.0).abs() < 1.0, "pair {l}/{r}");
        assert!((j[l].y - j[r].y).abs() < 1.0, "pair {l}/{r}");
    }
    // head above neck above pelvis; feet below the pelvis
    assert!(j[0].y < j[1].y && j[1].y < j[2].y && j[13].y > j[2].y);

    let m = spec.silhouette(128, 128);
    let asym = m.indices().filter(|&u| !m.get(128 - u % 128, u / 128)).count();
    assert!(asym * 50 < m.count(), "{asym} of {} pixels lack a mirror image", m.count());
}

#[test]
fn wider_capsules_cover_more_pixels() {
    let spec = FigureSpec::canonical(10.0, Point2::new(64.0, 60.0));
    let mut wide = spec.clone();
    wide.widths = wide.widths.map(|w| 2.0 * w);
    let (a, b) = (spec.silhouette(128, 128), wide.silhouette(128, 128));
    assert!(b.count() > a.count());
    assert!(a.is_subset_of(&b));
}

#[test]
fn invalid_specs_are_rejected() {
    let mut spec = FigureSpec::canonical(10.0, Point2::new(64.0, 60.0));
    spec.angles[6] = ARTICULATION[6] + 0.1;
    assert!(spec.validate().is_err());
    let mut spec = FigureSpec::canonical(10.0, Point2::new(64.0, 60.0));
    spec.widths[3] = 0.0;
    assert!(gen_figure(&spec, 128, 128, "x").is_err());
    let off = FigureSpec::canonical(10.0, Point2::new(-500.0, -500.0));
    assert!(gen_figure(&off, 128, 128, "x").is_err());
}

#[test]
fn generation_is_deterministic() {
    let spec = library_spec(42, 17, &LibraryParams::default());
    assert_eq!(gen_figure(&spec, 128, 128, "a").unwrap(), gen_figure(&spec, 128, 128, "a").unwrap());
    let a = gen_library(6, 42, &LibraryParams::default()).unwrap();
    let b = gen_library(6, 42, &LibraryParams::default()).unwrap();
    assert_eq!(a, b);
    let c = gen_library(6, 43, &LibraryParams::default()).unwrap();
    assert_ne!(a, c);
    // item streams do not depend on the library size
    let longer = gen_library(9, 42, &LibraryParams::default()).unwrap();
    assert_eq!(a.exemplars[..], longer.exemplars[..6]);

    let s1 = gen_scene_set(3, 7, &SceneSetParams::default()).unwrap();
    let s2 = gen_scene_set(3, 7, &SceneSetParams::default()).unwrap();
    for (x, y) in s1.iter().zip(&s2) {
        assert_eq!(x.image, y.image);
        assert_eq!(x.truth, y.truth);
        assert_eq!(x.candidates, y.candidates);
    }
}

#[test]
fn library_exemplars_are_valid_and_connected() {
    let params = LibraryParams::default();
    let lib = gen_library(60, 42, &params).unwrap();
    assert_eq!(gen_library(1, 42, &params).unwrap().len(), 1);
    for (i, e) in lib.exemplars.iter().enumerate() {
        assert_eq!(e.id, exemplar_id(i));
        assert_eq!(e.mask.dims(), (params.width, params.height));
        library_spec(42, i, &params).validate().unwrap();
        // re-validating through the constructor checks joints against the box
        Exemplar::new(e.id.clone(), e.mask.clone(), e.joints.clone()).unwrap();
        assert!(four_connected(&e.mask), "exemplar {i}");
        let bb = e.mask.bbox().unwrap();
        assert!(
            bb.x > 0 && bb.y > 0 && bb.x + bb.w < params.width && bb.y + bb.h < params.height,
            "exemplar {i} touches the border"
        );
    }
}

#[test]
fn scene_truth_is_silhouette_minus_occluder() {
    let params = SceneSetParams { occlusion_prob: 0.6, ..SceneSetParams::default() };
    let scenes = gen_scene_set(12, 3, &params).unwrap();
    assert!(scenes.iter().any(|s| s.occluder.is_some()));
    assert!(scenes.iter().any(|s| s.occluder.is_none()));
    for s in &scenes {
        let mut expected = s.figure.silhouette(params.width, params.height);
        if let Some(r) = s.occluder {
            expected = expected.and_not(&BinaryMask::from_fn(params.width, params.height, |x, y| r.contains(x, y)));
        }
        assert_eq!(s.truth, expected);
        assert_eq!(s.image.dims(), (params.width, params.height));
        assert_eq!(s.candidates.len(), 1);
        let c = &s.candidates[0];
        assert_eq!(Some(c.bbox), c.mask.bbox());
        assert!(c.mask.and(&s.truth).count() > 0);
        assert!(s.source < params.library_size);
    }
}

#[test]
fn occluder_hides_about_the_requested_fraction() {
    let spec = FigureSpec::canonical(10.0, Point2::new(64.0, 60.0));
    let sil = spec.silhouette(128, 128);
    let mut rng = stream(5, 0);
    let r = pick_occluder(&mut rng, &sil, 0.3).unwrap();
    let hidden = sil.indices().filter(|&u| r.contains(u % 128, u / 128)).count() as f64;
    assert!((hidden / sil.count() as f64 - 0.3).abs() < 0.1);
    assert!(pick_occluder(&mut rng, &BinaryMask::new(4, 4), 0.3).is_none());
}

#[test]
fn figure_colour_keeps_its_contrast() {
    let mut rng = stream(1, 0);
    for _ in 0..200 {
        let bases: Vec<[f64; 3]> = (0..5).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
        let c = figure_color(&mut rng, &bases, 0.2);
        let d: Vec<f64> =
            bases.iter().map(|b| b.iter().zip(&c).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()).collect();
        assert!(c.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(d.iter().all(|&v| v >= 0.2), "{d:?}");
        assert!(d.iter().any(|&v| v <= 0.4 + 1e-9), "{d:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn noisy_candidate_stays_near_the_truth(seed in any::<u64>(), cx in 20usize..44, cy in 20usize..44, r in 3.0f64..12.0) {
        let truth = BinaryMask::from_fn(64, 64, |x, y| {
            (x as f64 - cx as f64).powi(2) + (y as f64 - cy as f64).powi(2) <= r * r
        });
        let mut rng = stream(seed, 0);
        let c = noisy_candidate(&mut rng, &truth);
        prop_assert!(c.count() > 0);
        // every candidate pixel lies within the truth grown by the largest
        // dilation plus the largest leak blob
        prop_assert!(c.is_subset_of(&truth.dilate(3 + 10)));
        prop_assert!(truth.erode(1).is_subset_of(&c));
    }
}
