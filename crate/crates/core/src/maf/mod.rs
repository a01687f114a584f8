//! Matching, alignment and fusion: turns a candidate silhouette into a
//! probabilistic shape prior `S`, a fused skeleton `B` and seed sets.

mod library;
mod skeleton;

pub use library::{Exemplar, ExemplarLibrary, INDEX_FILE};
pub use skeleton::{bresenham, rasterize_skeleton, SkeletonSeeds, BONES, JOINT_NAMES, NUM_JOINTS};

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::raster::BinaryMask;
use crate::shape::{
    mask_orientation, match_descriptors, procrustes_fit, sample_boundary, shape_contexts, warp_mask, warp_skeleton,
    BoundaryPoints, ContextLayout, Point2, ShapeContext, Transform2D,
};

/// Fused prior for one candidate.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapePrior {
    pub width: usize,
    pub height: usize,
    /// Per-pixel mean of the warped exemplar masks, in `[0, 1]`.
    pub s: Vec<f64>,
    /// Mean of the warped skeletons.
    pub joints: Vec<Point2>,
    /// Number of fused exemplars.
    pub support: usize,
}

impl ShapePrior {
    /// `B` as a 3×15 homogeneous matrix.
    pub fn homogeneous(&self) -> [Vec<f64>; 3] {
        [
            self.joints.iter().map(|p| p.x).collect(),
            self.joints.iter().map(|p| p.y).collect(),
            vec![1.0; self.joints.len()],
        ]
    }
}

/// An exemplar accepted for a candidate, with its alignment.
#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    /// Position in the library.
    pub index: usize,
    /// Maps exemplar mask coordinates to candidate image coordinates.
    pub transform: Transform2D,
    /// Alignment error normalized to the reference height.
    pub error: f64,
    /// Number of boundary correspondences the fit used.
    pub matches: usize,
}

/// Per-exemplar data that does not depend on the candidate.
#[derive(Clone, Debug)]
struct Prepared {
    boundary: BoundaryPoints,
    centroid: Point2,
    angle: f64,
    diagonal: f64,
}

/// A library with boundary samples and orientations cached for one `K`.
#[derive(Clone, Debug)]
pub struct PreparedLibrary<'a> {
    library: &'a ExemplarLibrary,
    k: usize,
    prepared: Vec<Option<Prepared>>,
}

impl<'a> PreparedLibrary<'a> {
    pub fn new(library: &'a ExemplarLibrary, k: usize) -> Self {
        let prepared = library
            .exemplars
            .par_iter()
            .map(|e| {
                let boundary = sample_boundary(&e.mask, k).ok().filter(|b| b.len() >= 3)?;
                let (centroid, angle) = mask_orientation(&e.mask).ok()?;
                let diagonal = e.mask.bbox()?.diagonal();
                Some(Prepared { boundary, centroid, angle, diagonal })
            })
            .collect();
        Self { library, k, prepared }
    }

    pub fn library(&self) -> &'a ExemplarLibrary {
        self.library
    }

    pub fn boundary_samples(&self) -> usize {
        self.k
    }
}

/// Candidate-side quantities shared across exemplars.
struct Query {
    boundary: BoundaryPoints,
    contexts: Vec<ShapeContext>,
    centroid: Point2,
    angle: f64,
    diagonal: f64,
    height: f64,
}

fn query(candidate: &BinaryMask, k: usize, layout: ContextLayout) -> Result<Query> {
    let bb = candidate.bbox().ok_or(Error::EmptyMask)?;
    let boundary = sample_boundary(candidate, k)?;
    if boundary.len() < 3 {
        return Err(Error::Rejected(format!("only {} boundary points", boundary.len())));
    }
    let contexts = shape_contexts(&boundary, layout)?;
    let (centroid, angle) = mask_orientation(candidate)?;
    Ok(Query { boundary, contexts, centroid, angle, diagonal: bb.diagonal(), height: bb.h as f64 })
}

/// Rotation taking one principal axis onto another, reduced to `(−π/2, π/2]`.
fn axis_rotation(from: f64, to: f64) -> f64 {
    let mut d = (to - from).rem_euclid(PI);
    if d > PI / 2.0 {
        d -= PI;
    }
    d
}

/// Aligns one exemplar to the query; `None` means `e = ∞`.
fn align(q: &Query, p: &Prepared, layout: ContextLayout, config: &RunConfig) -> Option<(Transform2D, f64, usize)> {
    let theta = axis_rotation(p.angle, q.angle);
    let scale = q.diagonal / p.diagonal;
    let pre = Transform2D::translation(q.centroid.x, q.centroid.y)
        .compose(&Transform2D::similarity(theta, scale, 0.0, 0.0))
        .compose(&Transform2D::translation(-p.centroid.x, -p.centroid.y));
    let moved = BoundaryPoints { points: warp_skeleton(&p.boundary.points, &pre) };
    let contexts = shape_contexts(&moved, layout).ok()?;
    let pairs = match_descriptors(&q.contexts, &contexts, config.mu).ok()?;
    let needed = (config.min_match_fraction * q.boundary.len().min(p.boundary.len()) as f64).ceil() as usize;
    if pairs.len() < needed {
        return None;
    }
    let pairs: Vec<(usize, usize)> = pairs.iter().map(|c| (c.exemplar, c.query)).collect();
    let w = procrustes_fit(&p.boundary.points, &q.boundary.points, &pairs).ok()?;
    w.inverse().ok()?;
    let r = config.reference_height / q.height.max(1.0);
    Some((w, w.error * r * r, pairs.len()))
}

fn layout(config: &RunConfig) -> ContextLayout {
    ContextLayout::new(config.radial_bins, config.angular_bins)
}

/// Every exemplar whose normalized alignment error is below `config.epsilon`,
/// in library order. Fits backed by fewer than `min_match_fraction` of the
/// boundary samples are treated as `e = ∞`.
pub fn select_exemplars(
    candidate: &BinaryMask,
    library: &PreparedLibrary,
    config: &RunConfig,
) -> Result<Vec<Selection>> {
    let layout = layout(config);
    let q = query(candidate, library.k, layout)?;
    let scored: Vec<Option<(Transform2D, f64, usize)>> =
        library.prepared.par_iter().map(|p| align(&q, p.as_ref()?, layout, config)).collect();
    Ok(scored
        .into_iter()
        .enumerate()
        .filter_map(|(index, s)| s.map(|(transform, error, matches)| Selection { index, transform, error, matches }))
        .filter(|s| s.error < config.epsilon)
        .collect())
}

/// Averages warped masks and skeletons over the selection.
pub fn fuse(library: &ExemplarLibrary, selected: &[Selection], width: usize, height: usize) -> Result<ShapePrior> {
    if selected.is_empty() {
        return Err(Error::NoExemplars);
    }
    let mut counts = vec![0u32; width * height];
    let mut joints = vec![Point2::default(); NUM_JOINTS];
    for sel in selected {
        let ex = &library.exemplars[sel.index];
        let warped = warp_mask(&ex.mask, &sel.transform, width, height)?;
        for i in warped.indices() {
            counts[i] += 1;
        }
        for (acc, p) in joints.iter_mut().zip(warp_skeleton(&ex.joints, &sel.transform)) {
            *acc = *acc + p;
        }
    }
    let n = selected.len() as f64;
    Ok(ShapePrior {
        width,
        height,
        s: counts.iter().map(|&c| c as f64 / n).collect(),
        joints: joints.into_iter().map(|p| p * (1.0 / n)).collect(),
        support: selected.len(),
    })
}

/// Everything the energy needs for one candidate.
#[derive(Clone, Debug)]
pub struct MafResult {
    pub prior: ShapePrior,
    pub skeleton: SkeletonSeeds,
    /// Skeleton pixels inside the prior's majority region.
    pub foreground: BinaryMask,
    pub background: BinaryMask,
    pub selected: Vec<Selection>,
}

/// Background seeds: border pixels the prior leaves (nearly) empty, plus
/// everything outside the candidate box grown by 20% per side.
pub fn background_seeds(candidate: &BinaryMask, s: &[f64]) -> Result<BinaryMask> {
    let (w, h) = candidate.dims();
    let bb = candidate.bbox().ok_or(Error::EmptyMask)?.dilate(0.2, w, h);
    Ok(BinaryMask::from_fn(w, h, |x, y| {
        let border = x == 0 || y == 0 || x + 1 == w || y + 1 == h;
        (border && s[y * w + x] < 0.05) || !bb.contains(x, y)
    }))
}

/// Runs selection, fusion and seed derivation. Candidates that cannot be
/// matched come back as [`Error::Rejected`].
pub fn build_prior(candidate: &BinaryMask, library: &PreparedLibrary, config: &RunConfig) -> Result<MafResult> {
    if library.library.is_empty() {
        return Err(Error::Rejected("exemplar library is empty".into()));
    }
    let selected = match select_exemplars(candidate, library, config) {
        Ok(s) => s,
        Err(Error::EmptyMask) => return Err(Error::Rejected("empty candidate".into())),
        Err(Error::TooFewPoints { found, .. }) => return Err(Error::Rejected(format!("only {found} boundary points"))),
        Err(e) => return Err(e),
    };
    let (w, h) = candidate.dims();
    let prior = match fuse(library.library, &selected, w, h) {
        Err(Error::NoExemplars) => return Err(Error::Rejected("no exemplar aligned within epsilon".into())),
        r => r?,
    };
    let skeleton = rasterize_skeleton(&prior.joints, w, h);
    let majority = BinaryMask::from_fn(w, h, |x, y| prior.s[y * w + x] > 0.5);
    let foreground = skeleton.mask.and(&majority);
    if foreground.count() == 0 {
        return Err(Error::Rejected("skeleton misses the prior support".into()));
    }
    let background = background_seeds(candidate, &prior.s)?.and_not(&foreground);
    Ok(MafResult { prior, skeleton, foreground, background, selected })
}

#[cfg(test)]
mod tests;
