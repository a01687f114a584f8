use super::*;
use crate::shape::TransformParams;
use crate::synth::{gen_figure, gen_library, FigureSpec, LibraryParams};

fn small_library(n: usize, seed: u64) -> ExemplarLibrary {
    gen_library(n, seed, &LibraryParams::default()).unwrap()
}

fn config(epsilon: f64) -> RunConfig {
    RunConfig { epsilon, ..RunConfig::default() }
}

#[test]
fn axis_rotation_is_reduced_to_half_open_interval() {
    assert!((axis_rotation(0.0, 0.3) - 0.3).abs() < 1e-12);
    assert!((axis_rotation(1.4, -1.4) - (PI - 2.8)).abs() < 1e-12);
    assert!((axis_rotation(0.0, PI / 2.0) - PI / 2.0).abs() < 1e-12);
    assert!((axis_rotation(PI / 2.0, 0.0) - PI / 2.0).abs() < 1e-12);
}

#[test]
fn library_member_retrieves_itself_with_zero_error() {
    let lib = small_library(20, 3);
    let prep = PreparedLibrary::new(&lib, 60);
    for i in [0, 7, 19] {
        let sel = select_exemplars(&lib.exemplars[i].mask, &prep, &config(1e-3)).unwrap();
        let me = sel.iter().find(|s| s.index == i).expect("self not selected");
        assert!(me.error <= 1e-9, "exemplar {i}: e = {}", me.error);
        assert_eq!(me.matches, 60);
    }
}

#[test]
fn zero_epsilon_selects_nothing() {
    let lib = small_library(10, 3);
    let prep = PreparedLibrary::new(&lib, 60);
    assert!(select_exemplars(&lib.exemplars[4].mask, &prep, &config(0.0)).unwrap().is_empty());
}

#[test]
fn shrinking_epsilon_never_grows_the_selection() {
    let lib = small_library(30, 9);
    let prep = PreparedLibrary::new(&lib, 60);
    let cfg = RunConfig { min_match_fraction: 0.0, ..config(f64::INFINITY) };
    let all = select_exemplars(&lib.exemplars[2].mask, &prep, &cfg).unwrap();
    let mut previous: Option<Vec<usize>> = None;
    for eps in [1e4, 300.0, 100.0, 30.0, 10.0, 1.0, 1e-3] {
        let sel: Vec<usize> =
            select_exemplars(&lib.exemplars[2].mask, &prep, &RunConfig { epsilon: eps, ..cfg.clone() })
                .unwrap()
                .iter()
                .map(|s| s.index)
                .collect();
        let expected: Vec<usize> = all.iter().filter(|s| s.error < eps).map(|s| s.index).collect();
        assert_eq!(sel, expected);
        if let Some(p) = &previous {
            assert!(sel.iter().all(|i| p.contains(i)));
        }
        previous = Some(sel);
    }
}

#[test]
fn transformed_copies_are_separated_from_other_figures() {
    let params = LibraryParams::default();
    let spec = FigureSpec::canonical(params.unit, Point2::new(64.0, 61.0));
    let original = gen_figure(&spec, 128, 128, "orig").unwrap();
    let mut exemplars = Vec::new();
    let transforms = [
        (0.0, 1.0, 1.0, 0.0, 0.0),
        (0.2, 1.1, 0.95, 3.0, -2.0),
        (-0.15, 0.9, 1.05, -4.0, 1.0),
        (0.1, 1.0, 0.85, 2.0, 4.0),
        (-0.25, 1.15, 1.1, 0.0, -3.0),
    ];
    for (k, &(theta, sx, sy, tx, ty)) in transforms.iter().enumerate() {
        let about = Transform2D::translation(64.0, 61.0);
        let w = about
            .compose(&Transform2D::from_params(TransformParams { theta, sx, sy, tx, ty }))
            .compose(&about.inverse().unwrap());
        let mask = warp_mask(&original.mask, &w, 128, 128).unwrap();
        exemplars.push(Exemplar::new(format!("copy{k}"), mask, warp_skeleton(&original.joints, &w)).unwrap());
    }
    // different poses fill the rest, interleaved with the copies
    let others = small_library(15, 5).exemplars;
    let mut library = Vec::new();
    let mut copies = Vec::new();
    for (i, o) in others.into_iter().enumerate() {
        if i % 3 == 0 && copies.len() < 5 {
            copies.push(library.len());
            library.push(exemplars[copies.len() - 1].clone());
        }
        library.push(o);
    }
    let library = ExemplarLibrary::new(library);
    let prep = PreparedLibrary::new(&library, 60);
    let all = select_exemplars(&original.mask, &prep, &config(f64::INFINITY)).unwrap();
    assert_eq!(all.iter().map(|s| s.index).collect::<Vec<_>>(), copies);
    let worst_copy = all.iter().map(|s| s.error).fold(0.0, f64::max);
    let chosen: Vec<usize> =
        select_exemplars(&original.mask, &prep, &config(worst_copy * 1.01)).unwrap().iter().map(|s| s.index).collect();
    assert_eq!(chosen, copies);

    // without the correspondence guard, the copies still have the most support
    let loose =
        select_exemplars(&original.mask, &prep, &RunConfig { min_match_fraction: 0.0, ..config(f64::INFINITY) })
            .unwrap();
    let fewest_copy = loose.iter().filter(|s| copies.contains(&s.index)).map(|s| s.matches).min().unwrap();
    let most_other = loose.iter().filter(|s| !copies.contains(&s.index)).map(|s| s.matches).max().unwrap();
    assert!(fewest_copy > most_other);
}

#[test]
fn fusing_one_identity_exemplar_reproduces_its_mask() {
    let lib = small_library(3, 1);
    let sel = [Selection { index: 1, transform: Transform2D::identity(), error: 0.0, matches: 60 }];
    let prior = fuse(&lib, &sel, 128, 128).unwrap();
    let ex = &lib.exemplars[1];
    for (u, &s) in prior.s.iter().enumerate() {
        assert_eq!(s, if ex.mask.at(u) { 1.0 } else { 0.0 });
    }
    assert_eq!(prior.joints, ex.joints);
    assert_eq!(prior.support, 1);
    let h = prior.homogeneous();
    assert_eq!(h[2], vec![1.0; NUM_JOINTS]);
    assert_eq!(h[0][3], ex.joints[3].x);
}

#[test]
fn fusion_averages_masks_and_joints() {
    let lib = small_library(1, 1);
    let id = Selection { index: 0, transform: Transform2D::identity(), error: 0.0, matches: 60 };
    // identical selections fuse to the mask itself
    let twice = fuse(&lib, &[id.clone(), id.clone()], 128, 128).unwrap();
    let once = fuse(&lib, std::slice::from_ref(&id), 128, 128).unwrap();
    assert_eq!(twice.s, once.s);

    // a copy shifted far enough to be disjoint gives S = 1/2 on both
    let shift = Selection { transform: Transform2D::translation(0.0, 200.0), ..id.clone() };
    let tall = fuse(&lib, &[id, shift], 128, 400).unwrap();
    let ex = &lib.exemplars[0];
    let n = ex.mask.count();
    let half = tall.s.iter().filter(|&&s| s == 0.5).count();
    assert_eq!(half, 2 * n);
    assert!(tall.s.iter().all(|&s| s == 0.0 || s == 0.5));
    for (j, p) in tall.joints.iter().enumerate() {
        assert!((p.x - ex.joints[j].x).abs() < 1e-12);
        assert!((p.y - (ex.joints[j].y + 100.0)).abs() < 1e-12);
    }
}

#[test]
fn prior_mass_equals_total_warped_area() {
    let lib = small_library(12, 4);
    let prep = PreparedLibrary::new(&lib, 60);
    let cfg = RunConfig { min_match_fraction: 0.0, ..config(200.0) };
    let sel = select_exemplars(&lib.exemplars[0].mask, &prep, &cfg).unwrap();
    assert!(sel.len() > 1);
    let prior = fuse(&lib, &sel, 128, 128).unwrap();
    let warped: usize =
        sel.iter().map(|s| warp_mask(&lib.exemplars[s.index].mask, &s.transform, 128, 128).unwrap().count()).sum();
    let mass: f64 = prior.s.iter().sum::<f64>() * sel.len() as f64;
    assert!((mass - warped as f64).abs() < 1e-6);
}

#[test]
fn empty_selection_cannot_be_fused() {
    let lib = small_library(1, 1);
    assert!(matches!(fuse(&lib, &[], 10, 10), Err(Error::NoExemplars)));
}

#[test]
fn self_retrieval_prior_hugs_the_mask_and_seeds_its_skeleton() {
    let lib = small_library(20, 3);
    let prep = PreparedLibrary::new(&lib, 60);
    let ex = &lib.exemplars[7];
    let r = build_prior(&ex.mask, &prep, &RunConfig::default()).unwrap();
    assert!(r.selected.iter().any(|s| s.index == 7 && s.error <= 1e-9));
    let band_in = ex.mask.erode(1);
    let band_out = ex.mask.dilate(1);
    for u in 0..ex.mask.len() {
        if band_in.at(u) {
            assert!(r.prior.s[u] > 0.5, "interior pixel {u} lost");
        }
        if !band_out.at(u) {
            assert!(r.prior.s[u] <= 0.5, "exterior pixel {u} gained");
        }
    }
    let own = rasterize_skeleton(&ex.joints, 128, 128).mask.dilate(1);
    assert!(r.foreground.count() > 0);
    assert!(r.foreground.is_subset_of(&own));
    assert!(r.foreground.is_subset_of(&ex.mask));
}

#[test]
fn seed_sets_are_disjoint_and_cover_the_outside() {
    let lib = small_library(20, 3);
    let prep = PreparedLibrary::new(&lib, 60);
    let ex = &lib.exemplars[11];
    let r = build_prior(&ex.mask, &prep, &RunConfig::default()).unwrap();
    assert_eq!(r.foreground.and(&r.background).count(), 0);
    let grown = ex.mask.bbox().unwrap().dilate(0.2, 128, 128);
    for y in 0..128 {
        for x in 0..128 {
            if !grown.contains(x, y) && !r.foreground.get(x, y) {
                assert!(r.background.get(x, y));
            }
        }
    }
}

#[test]
fn border_seeds_respect_the_prior() {
    let mut cand = BinaryMask::new(8, 8);
    for y in 0..8 {
        for x in 0..8 {
            cand.set(x, y, true);
        }
    }
    let mut s = vec![0.0; 64];
    s[0] = 0.9;
    s[7] = 0.04;
    let bg = background_seeds(&cand, &s).unwrap();
    assert!(!bg.at(0));
    assert!(bg.at(7));
    assert!(!bg.get(3, 3));
}

#[test]
fn degenerate_candidates_and_empty_libraries_are_rejected() {
    let lib = small_library(5, 2);
    let prep = PreparedLibrary::new(&lib, 60);
    let mut two = BinaryMask::new(128, 128);
    two.set(40, 40, true);
    two.set(41, 40, true);
    assert!(matches!(build_prior(&two, &prep, &RunConfig::default()), Err(Error::Rejected(_))));

    let empty = ExemplarLibrary::default();
    let prep = PreparedLibrary::new(&empty, 60);
    assert!(matches!(build_prior(&lib.exemplars[0].mask, &prep, &RunConfig::default()), Err(Error::Rejected(_))));
}

#[test]
fn few_correspondences_count_as_failed_alignment() {
    let lib = small_library(20, 3);
    let prep = PreparedLibrary::new(&lib, 60);
    let loose = RunConfig { min_match_fraction: 0.0, ..config(f64::INFINITY) };
    let strict = RunConfig { min_match_fraction: 0.5, ..loose.clone() };
    let a = select_exemplars(&lib.exemplars[5].mask, &prep, &loose).unwrap();
    let b = select_exemplars(&lib.exemplars[5].mask, &prep, &strict).unwrap();
    let kept: Vec<usize> = a.iter().filter(|s| s.matches >= 30).map(|s| s.index).collect();
    assert_eq!(b.iter().map(|s| s.index).collect::<Vec<_>>(), kept);
    assert!(b.len() < a.len());
}
