use rand::Rng;

use super::{library_spec, stream, FigureSpec, LibraryParams, ARTICULATION};
use crate::error::Result;
use crate::pipeline::Candidate;
use crate::raster::{BBox, BinaryMask, Image};
use crate::shape::Point2;

/// Background texture and figure colouring.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BackgroundParams {
    /// Side of the coarse noise lattice in pixels.
    pub noise_cell: usize,
    pub noise_amplitude: f64,
    pub grain: f64,
    /// Number of constant-colour rectangles.
    pub regions: usize,
    /// Minimum RGB distance between the figure colour and every background
    /// base colour. The figure is drawn within twice this distance of one
    /// of them.
    pub min_contrast: f64,
}

impl Default for BackgroundParams {
    fn default() -> Self {
        Self { noise_cell: 24, noise_amplitude: 0.35, grain: 0.03, regions: 4, min_contrast: 0.2 }
    }
}

/// A rendered test image with its visible-foreground truth.
#[derive(Clone, Debug)]
pub struct Scene {
    pub image: Image,
    pub truth: BinaryMask,
    pub candidates: Vec<Candidate>,
    pub figure: FigureSpec,
    pub occluder: Option<BBox>,
    /// Library exemplar the pose was derived from.
    pub source: usize,
}

/// Parameters of a generated benchmark.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SceneSetParams {
    pub width: usize,
    pub height: usize,
    pub occlusion_prob: f64,
    /// Fraction of the figure an occluder hides, approximately.
    pub occlusion_fraction: f64,
    /// Library the poses are drawn from.
    pub library_seed: u64,
    pub library_size: usize,
    pub library: LibraryParams,
    /// Uniform per-joint angle jitter around the library pose, radians.
    pub pose_jitter: f64,
    pub background: BackgroundParams,
}

impl Default for SceneSetParams {
    fn default() -> Self {
        Self {
            width: 160,
            height: 150,
            occlusion_prob: 0.3,
            occlusion_fraction: 0.3,
            library_seed: 42,
            library_size: 500,
            library: LibraryParams::default(),
            pose_jitter: 0.07,
            background: BackgroundParams::default(),
        }
    }
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn random_color<R: Rng>(rng: &mut R) -> [f64; 3] {
    [rng.random(), rng.random(), rng.random()]
}

fn clamp01(c: [f64; 3]) -> [f64; 3] {
    c.map(|v| v.clamp(0.0, 1.0))
}

/// Bilinear coarse noise plus constant rectangles. Returns the image and
/// the base colours it was built from.
fn background<R: Rng>(rng: &mut R, w: usize, h: usize, p: &BackgroundParams) -> (Image, Vec<[f64; 3]>) {
    let cell = p.noise_cell.max(1);
    let (gw, gh) = (w / cell + 2, h / cell + 2);
    let base = random_color(rng);
    let lattice: Vec<[f64; 3]> =
        (0..gw * gh).map(|_| base.map(|b| b + p.noise_amplitude * (rng.random::<f64>() - 0.5))).collect();
    let mut rgb = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let (fx, fy) = (x as f64 / cell as f64, y as f64 / cell as f64);
            let (ix, iy) = (fx.floor() as usize, fy.floor() as usize);
            let (tx, ty) = (fx - ix as f64, fy - iy as f64);
            let at = |i: usize, j: usize| lattice[j * gw + i];
            let mut c = [0.0; 3];
            for (k, v) in c.iter_mut().enumerate() {
                let top = at(ix, iy)[k] * (1.0 - tx) + at(ix + 1, iy)[k] * tx;
                let bot = at(ix, iy + 1)[k] * (1.0 - tx) + at(ix + 1, iy + 1)[k] * tx;
                *v = top * (1.0 - ty) + bot * ty;
            }
            rgb.push(clamp01(c));
        }
    }
    let mut bases = vec![base];
    for _ in 0..p.regions {
        let color = random_color(rng);
        bases.push(color);
        let rw = rng.random_range(w / 8..=w / 3);
        let rh = rng.random_range(h / 8..=h / 3);
        let (x0, y0) = (rng.random_range(0..=w - rw), rng.random_range(0..=h - rh));
        for y in y0..y0 + rh {
            for x in x0..x0 + rw {
                rgb[y * w + x] = color;
            }
        }
    }
    (Image::new(w, h, rgb).expect("dimensions match"), bases)
}

/// Adds uniform per-channel noise and quantizes to 8-bit levels, so a scene
/// survives a round trip through an image file unchanged.
fn add_grain<R: Rng>(rng: &mut R, img: &mut Image, amount: f64) {
    let (w, h) = img.dims();
    for y in 0..h {
        for x in 0..w {
            let c = img.get(x, y).map(|v| v + amount * (2.0 * rng.random::<f64>() - 1.0));
            img.set(x, y, clamp01(c).map(|v| (v * 255.0).round() / 255.0));
        }
    }
}

/// Colour between `min` and `2 * min` away from one base colour and at
/// least `min` from all of them; the farthest of several draws when none
/// qualifies.
pub(super) fn figure_color<R: Rng>(rng: &mut R, bases: &[[f64; 3]], min: f64) -> [f64; 3] {
    let mut best = ([0.0; 3], f64::NEG_INFINITY);
    for _ in 0..200 {
        let anchor = bases[rng.random_range(0..bases.len())];
        let dir = [0; 3].map(|_| rng.random::<f64>() - 0.5);
        let norm = dist(dir, [0.0; 3]).max(1e-9);
        let r = rng.random_range(min..=2.0 * min);
        let c = clamp01([0, 1, 2].map(|k| anchor[k] + dir[k] / norm * r));
        let d = bases.iter().map(|&b| dist(b, c)).fold(f64::INFINITY, f64::min);
        if d >= min {
            return c;
        }
        if d > best.1 {
            best = (c, d);
        }
    }
    best.0
}

/// Imperfect bottom-up proposal: the truth grown or shrunk by a random
/// radius, sometimes with a blob leaking into the background.
pub fn noisy_candidate<R: Rng>(rng: &mut R, truth: &BinaryMask) -> BinaryMask {
    let mut m = if rng.random_bool(0.75) { truth.dilate(rng.random_range(1..=3)) } else { truth.erode(1) };
    if rng.random_bool(0.5) {
        let edge: Vec<usize> = truth.dilate(1).and_not(truth).indices().collect();
        if !edge.is_empty() {
            let w = truth.width();
            let c = edge[rng.random_range(0..edge.len())];
            let (cx, cy) = ((c % w) as f64, (c / w) as f64);
            let r = rng.random_range(4.0..9.0);
            let blob = BinaryMask::from_fn(w, truth.height(), |x, y| {
                (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2) <= r * r
            });
            m = m.or(&blob);
        }
    }
    if m.count() == 0 {
        truth.clone()
    } else {
        m
    }
}

pub(super) fn pick_occluder<R: Rng>(rng: &mut R, silhouette: &BinaryMask, fraction: f64) -> Option<BBox> {
    let bb = silhouette.bbox()?;
    let total = silhouette.count() as f64;
    let mut best: Option<(BBox, f64)> = None;
    for _ in 0..40 {
        let w = rng.random_range((bb.w / 3).max(1)..=bb.w);
        let h = rng.random_range((bb.h / 5).max(1)..=(bb.h / 2).max(1));
        let x = bb.x + rng.random_range(0..=bb.w - w);
        let y = bb.y + rng.random_range(0..=bb.h - h);
        let r = BBox { x, y, w, h };
        let hidden =
            silhouette.indices().filter(|&i| r.contains(i % silhouette.width(), i / silhouette.width())).count();
        let gap = (hidden as f64 / total - fraction).abs();
        if best.is_none_or(|(_, g)| gap < g) {
            best = Some((r, gap));
        }
    }
    best.map(|(r, _)| r)
}

/// Composites a figure on a textured background. The occluder, if any, is
/// painted over the figure and removed from the truth.
pub fn gen_scene<R: Rng>(
    rng: &mut R,
    figure: &FigureSpec,
    width: usize,
    height: usize,
    bg: &BackgroundParams,
    occluder: Option<BBox>,
) -> Result<(Image, BinaryMask, Candidate)> {
    figure.validate()?;
    let silhouette = figure.silhouette(width, height);
    let (mut image, bases) = background(rng, width, height, bg);
    let color = figure_color(rng, &bases, bg.min_contrast);
    for i in silhouette.indices() {
        image.set(i % width, i / width, color);
    }
    let mut truth = silhouette;
    if let Some(r) = occluder {
        let oc = random_color(rng);
        for y in r.y..(r.y + r.h).min(height) {
            for x in r.x..(r.x + r.w).min(width) {
                image.set(x, y, oc);
                truth.set(x, y, false);
            }
        }
    }
    add_grain(rng, &mut image, bg.grain);
    let cmask = noisy_candidate(rng, &truth);
    let candidate = Candidate::new("c0", cmask, 1.0)?;
    Ok((image, truth, candidate))
}

/// `n` scenes reproducible from `seed`, each posing a jittered library
/// figure at a random place and size.
pub fn gen_scene_set(n: usize, seed: u64, params: &SceneSetParams) -> Result<Vec<Scene>> {
    use rayon::prelude::*;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, i as u64);
            let source = rng.random_range(0..params.library_size.max(1));
            let mut figure = library_spec(params.library_seed, source, &params.library);
            for (a, r) in figure.angles.iter_mut().zip(ARTICULATION) {
                *a = (*a + rng.random_range(-params.pose_jitter..=params.pose_jitter)).clamp(-r, r);
            }
            figure.position = Point2::new(
                params.width as f64 / 2.0 + rng.random_range(-10.0..10.0),
                params.height as f64 * 0.5 + rng.random_range(-5.0..5.0),
            );
            figure.rotation = rng.random_range(-0.1..0.1);
            figure.scale = rng.random_range(0.85..1.1);
            let occluder = if rng.random_bool(params.occlusion_prob) {
                pick_occluder(&mut rng, &figure.silhouette(params.width, params.height), params.occlusion_fraction)
            } else {
                None
            };
            let (image, truth, candidate) =
                gen_scene(&mut rng, &figure, params.width, params.height, &params.background, occluder)?;
            Ok(Scene { image, truth, candidates: vec![candidate], figure, occluder, source })
        })
        .collect()
}
