//! Fixtures shared by the benchmarks.

use mafcut::energy::{EnergyModel, EnergyParts, SeedSets};
use mafcut::maf::ExemplarLibrary;
use mafcut::synth::{gen_library, gen_scene_set, LibraryParams, Scene, SceneSetParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random submodular grid energy with a sprinkling of seeds.
pub fn random_model(seed: u64, width: usize, height: usize) -> EnergyModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = width * height;
    let (mut fg, mut bg) = (Vec::new(), Vec::new());
    for u in 0..n {
        match rng.random_range(0..50) {
            0 => fg.push(u),
            1 => bg.push(u),
            _ => {}
        }
    }
    EnergyModel::from_parts(EnergyParts {
        width,
        height,
        bg_cost: (0..n).map(|_| rng.random_range(-2.0..2.0)).collect(),
        fg_cost: (0..n).map(|_| rng.random_range(-2.0..2.0)).collect(),
        right: (0..n).map(|_| rng.random_range(0.0..1.5)).collect(),
        down: (0..n).map(|_| rng.random_range(0.0..1.5)).collect(),
        seeds: SeedSets::new(fg, bg, n).expect("disjoint seeds"),
    })
    .expect("valid model")
}

/// A library of `n` exemplars and one benchmark scene drawn from it.
pub fn scene_fixture(n: usize) -> (ExemplarLibrary, Scene) {
    let library = gen_library(n, 42, &LibraryParams::default()).expect("library");
    let params = SceneSetParams { library_size: n, occlusion_prob: 0.0, ..SceneSetParams::default() };
    let scene = gen_scene_set(1, 7, &params).expect("scene").remove(0);
    (library, scene)
}
