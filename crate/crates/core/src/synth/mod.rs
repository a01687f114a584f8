//! Synthetic stand-ins for motion-capture exemplars and annotated photos:
//! capsule stick figures, exemplar libraries and textured test scenes.

mod figure;
mod scene;

pub use figure::{gen_figure, FigureSpec, ARTICULATION, CANONICAL_LENGTHS, CANONICAL_WIDTHS, NUM_BONES};
pub use scene::{gen_scene, gen_scene_set, noisy_candidate, BackgroundParams, Scene, SceneSetParams};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::maf::ExemplarLibrary;
use crate::shape::Point2;

/// Canvas and proportions of library exemplars.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LibraryParams {
    pub width: usize,
    pub height: usize,
    /// Pixels per head unit.
    pub unit: f64,
}

impl Default for LibraryParams {
    fn default() -> Self {
        Self { width: 128, height: 128, unit: 10.0 }
    }
}

/// Independent generator for item `index` of a seeded collection.
pub(crate) fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Pose of library exemplar `index`; a pure function of `(seed, index)`.
pub fn library_spec(seed: u64, index: usize, params: &LibraryParams) -> FigureSpec {
    let mut rng = stream(seed, index as u64);
    let centre = Point2::new(params.width as f64 / 2.0, params.height as f64 * 0.48);
    let mut spec = FigureSpec::random_pose(&mut rng, params.unit, centre);
    spec.position = centre + Point2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
    spec.rotation = rng.random_range(-0.1..0.1);
    spec.scale = rng.random_range(0.9..1.1);
    spec
}

pub fn exemplar_id(index: usize) -> String {
    format!("ex_{index:05}")
}

/// `n` random exemplars, reproducible from `seed`.
pub fn gen_library(n: usize, seed: u64, params: &LibraryParams) -> Result<ExemplarLibrary> {
    let exemplars = (0..n)
        .into_par_iter()
        .map(|i| gen_figure(&library_spec(seed, i, params), params.width, params.height, exemplar_id(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExemplarLibrary::new(exemplars))
}

#[cfg(test)]
mod tests;
