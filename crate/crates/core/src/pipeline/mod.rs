//! End-to-end segmentation: candidate suppression, per-candidate prior
//! construction and parametric cuts, pool merging, ranking and evaluation.

mod dataset;

pub use dataset::{load_candidates, load_scene_set, save_candidates, save_scene_set, SceneRecord, SCENES_FILE};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::energy::{build_energy, EnergyModel, SeedSets};
use crate::error::{Error, Result};
use crate::maf::{build_prior, MafResult, PreparedLibrary};
use crate::maxflow::{default_lambda_range, parametric_cuts, BreakpointSet, CutSolution};
use crate::raster::{BBox, BinaryMask, Image};

/// A bottom-up figure proposal.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub id: String,
    pub mask: BinaryMask,
    /// Tight box of the mask foreground.
    pub bbox: BBox,
    pub score: f64,
}

impl Candidate {
    pub fn new(id: impl Into<String>, mask: BinaryMask, score: f64) -> Result<Self> {
        let bbox = mask.bbox().ok_or(Error::EmptyMask)?;
        Ok(Self { id: id.into(), mask, bbox, score })
    }
}

/// One segmentation in a pool.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypothesis {
    pub mask: BinaryMask,
    pub lambda: f64,
    pub energy: f64,
    pub score: f64,
    /// Id of the candidate it came from.
    pub candidate: String,
}

/// Hypotheses sorted by descending score.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HypothesisPool {
    pub hypotheses: Vec<Hypothesis>,
}

impl HypothesisPool {
    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }
}

/// Which segmentation model to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Exemplar shape prior with skeleton seeds.
    MafPrior,
    /// `S ≡ 0`; a regular grid of foreground seeds instead of a skeleton.
    NoPrior,
}

/// `|a ∩ b| / |a ∪ b|`, 1 when both are empty.
pub fn iou(a: &BinaryMask, b: &BinaryMask) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch { expected: a.dims(), found: b.dims() });
    }
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.as_slice().iter().zip(b.as_slice()) {
        inter += (x && y) as usize;
        union += (x || y) as usize;
    }
    Ok(if union == 0 { 1.0 } else { inter as f64 / union as f64 })
}

/// Greedy suppression: keep the best-scored candidate, drop everything
/// overlapping a kept one by more than `threshold`. Ties keep input order.
pub fn nms(candidates: &[Candidate], threshold: f64) -> Result<Vec<Candidate>> {
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| candidates[b].score.total_cmp(&candidates[a].score));
    let mut kept: Vec<Candidate> = Vec::new();
    for i in order {
        let c = &candidates[i];
        let mut keep = true;
        for k in &kept {
            if iou(&k.mask, &c.mask)? > threshold {
                keep = false;
                break;
            }
        }
        if keep {
            kept.push(c.clone());
        }
    }
    Ok(kept)
}

fn mean_over(values: &[f64], mask: &BinaryMask) -> f64 {
    let n = mask.count();
    if n == 0 {
        return 0.0;
    }
    mask.indices().map(|i| values[i]).sum::<f64>() / n as f64
}

/// Turns one parametric run into hypotheses scored by
/// `mean S over the foreground × (1 − normalized E₀)`. `E₀` is the energy
/// without the λ term; it is normalized by rank within the run, so the
/// λ = 0 optimum gets 0 and the worst labeling 1.
fn hypotheses_from(cuts: &BreakpointSet, scoring_prior: &[f64], candidate: &str) -> Vec<Hypothesis> {
    let kept: Vec<&CutSolution> = cuts.solutions.iter().filter(|s| s.labeling.count() > 0).collect();
    let mut order: Vec<usize> = (0..kept.len()).collect();
    order.sort_by(|&a, &b| kept[a].base_energy.total_cmp(&kept[b].base_energy));
    let mut norm = vec![0.0; kept.len()];
    let denom = kept.len().saturating_sub(1).max(1) as f64;
    let mut rank = 0;
    for (r, &i) in order.iter().enumerate() {
        // equal energies share the lowest rank
        if r > 0 && kept[i].base_energy != kept[order[r - 1]].base_energy {
            rank = r;
        }
        norm[i] = rank as f64 / denom;
    }
    kept.iter()
        .zip(norm)
        .map(|(s, norm)| Hypothesis {
            score: mean_over(scoring_prior, &s.labeling) * (1.0 - norm),
            mask: s.labeling.clone(),
            lambda: s.lambda,
            energy: s.energy,
            candidate: candidate.to_string(),
        })
        .collect()
}

fn lambda_range(model: &EnergyModel, config: &RunConfig) -> (f64, f64) {
    let (lo, hi) = default_lambda_range(model, config.w_s);
    (config.lambda_min.unwrap_or(lo), config.lambda_max.unwrap_or(hi))
}

/// Energy and breakpoints for explicit seeds and prior.
pub fn run_parametric(
    image: &Image,
    seeds: &SeedSets,
    prior: &[f64],
    config: &RunConfig,
) -> Result<(EnergyModel, BreakpointSet)> {
    let model = build_energy(image, seeds, prior, config)?;
    let (lo, hi) = lambda_range(&model, config);
    let cuts = parametric_cuts(&model, lo, hi, config.delta_lambda)?;
    Ok((model, cuts))
}

/// Energy of the prior-driven model for one candidate, with its MAF result.
pub fn candidate_energy(
    image: &Image,
    candidate: &Candidate,
    library: &PreparedLibrary,
    config: &RunConfig,
) -> Result<(MafResult, EnergyModel)> {
    if candidate.mask.dims() != image.dims() {
        return Err(Error::DimensionMismatch { expected: image.dims(), found: candidate.mask.dims() });
    }
    let maf = build_prior(&candidate.mask, library, config)?;
    let seeds = SeedSets::from_masks(&maf.foreground, &maf.background)?;
    let model = build_energy(image, &seeds, &maf.prior.s, config)?;
    Ok((maf, model))
}

/// Prior, seeds, energy and parametric cuts for one candidate. A candidate
/// the exemplars cannot explain yields an empty pool.
pub fn segment_candidate(
    image: &Image,
    candidate: &Candidate,
    library: &PreparedLibrary,
    config: &RunConfig,
) -> Result<HypothesisPool> {
    let (maf, model) = match candidate_energy(image, candidate, library, config) {
        Ok(r) => r,
        Err(Error::Rejected(why)) => {
            log::info!("candidate {} rejected: {why}", candidate.id);
            return Ok(HypothesisPool::default());
        }
        Err(e) => return Err(e),
    };
    let (lo, hi) = lambda_range(&model, config);
    let cuts = parametric_cuts(&model, lo, hi, config.delta_lambda)?;
    let mut pool = HypothesisPool { hypotheses: hypotheses_from(&cuts, &maf.prior.s, &candidate.id) };
    sort_pool(&mut pool);
    Ok(pool)
}

/// Foreground seed squares on a `g × g` grid over the grown candidate box.
fn grid_seeds(candidate: &Candidate, g: usize, blocked: &BinaryMask) -> Vec<Vec<usize>> {
    let (w, h) = candidate.mask.dims();
    let bb = candidate.bbox.dilate(0.2, w, h);
    let mut out = Vec::new();
    for gy in 0..g {
        for gx in 0..g {
            let cx = bb.x + (bb.w * (2 * gx + 1)) / (2 * g);
            let cy = bb.y + (bb.h * (2 * gy + 1)) / (2 * g);
            let mut seed = Vec::new();
            for y in cy.saturating_sub(1)..(cy + 2).min(h) {
                for x in cx.saturating_sub(1)..(cx + 2).min(w) {
                    if !blocked.get(x, y) {
                        seed.push(y * w + x);
                    }
                }
            }
            if !seed.is_empty() {
                out.push(seed);
            }
        }
    }
    out
}

/// The prior-free comparison: one parametric run per grid seed, pooled.
/// Hypotheses are ranked with the candidate mask standing in for `S`.
pub fn segment_candidate_baseline(image: &Image, candidate: &Candidate, config: &RunConfig) -> Result<HypothesisPool> {
    let (w, h) = image.dims();
    if candidate.mask.dims() != (w, h) {
        return Err(Error::DimensionMismatch { expected: (w, h), found: candidate.mask.dims() });
    }
    let zero = vec![0.0; w * h];
    let background = crate::maf::background_seeds(&candidate.mask, &zero)?;
    let scoring: Vec<f64> = candidate.mask.as_slice().iter().map(|&b| b as u8 as f64).collect();
    let mut pools = Vec::new();
    for seed in grid_seeds(candidate, config.baseline_seed_grid, &background) {
        let bg: Vec<usize> = background.indices().collect();
        let seeds = SeedSets::new(seed, bg, w * h)?;
        let (_, cuts) = run_parametric(image, &seeds, &zero, config)?;
        let mut pool = HypothesisPool { hypotheses: hypotheses_from(&cuts, &scoring, &candidate.id) };
        sort_pool(&mut pool);
        pools.push(pool);
    }
    Ok(merge_and_rank(pools))
}

fn sort_pool(pool: &mut HypothesisPool) {
    pool.hypotheses.sort_by(|a, b| b.score.total_cmp(&a.score));
}

/// Union of pools without duplicate masks (the better-scored copy stays),
/// sorted by descending score. Equal scores keep their input order.
pub fn merge_and_rank(pools: impl IntoIterator<Item = HypothesisPool>) -> HypothesisPool {
    let mut out: Vec<Hypothesis> = Vec::new();
    let mut index: HashMap<BinaryMask, usize> = HashMap::new();
    for pool in pools {
        for hyp in pool.hypotheses {
            match index.get(&hyp.mask) {
                Some(&i) => {
                    if hyp.score > out[i].score {
                        out[i] = hyp;
                    }
                }
                None => {
                    index.insert(hyp.mask.clone(), out.len());
                    out.push(hyp);
                }
            }
        }
    }
    let mut pool = HypothesisPool { hypotheses: out };
    sort_pool(&mut pool);
    pool
}

/// First (top-ranked), Best and size of a pool against ground truth.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PoolStats {
    pub first: f64,
    pub best: f64,
    pub pool_size: usize,
}

pub fn pool_stats(pool: &HypothesisPool, truth: &BinaryMask) -> Result<PoolStats> {
    let Some(top) = pool.hypotheses.first() else { return Ok(PoolStats::default()) };
    let first = iou(&top.mask, truth)?;
    let mut best = first;
    for h in &pool.hypotheses[1..] {
        best = best.max(iou(&h.mask, truth)?);
    }
    Ok(PoolStats { first, best, pool_size: pool.len() })
}

/// Suppresses overlapping candidates, segments the survivors and merges.
pub fn segment_image(
    image: &Image,
    candidates: &[Candidate],
    library: &PreparedLibrary,
    config: &RunConfig,
    method: Method,
) -> Result<HypothesisPool> {
    let kept = nms(candidates, config.nms_threshold)?;
    let mut pools = Vec::with_capacity(kept.len());
    for c in &kept {
        pools.push(match method {
            Method::MafPrior => segment_candidate(image, c, library, config)?,
            Method::NoPrior => segment_candidate_baseline(image, c, config)?,
        });
    }
    Ok(merge_and_rank(pools))
}

/// Per-scene line of an evaluation report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneReport {
    pub name: String,
    #[serde(flatten)]
    pub stats: PoolStats,
}

/// Table-style summary of one method over a scene set. Scenes with an
/// empty pool count as First = Best = 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: Method,
    pub mean_first: f64,
    pub mean_best: f64,
    pub mean_pool_size: f64,
    pub scenes: Vec<SceneReport>,
}

pub fn evaluate(
    scenes: &[SceneRecord],
    library: &PreparedLibrary,
    config: &RunConfig,
    method: Method,
) -> Result<MethodReport> {
    use rayon::prelude::*;
    if scenes.is_empty() {
        return Err(Error::Invalid("no scenes to evaluate".into()));
    }
    let lines = scenes
        .par_iter()
        .map(|s| {
            let truth =
                s.truth.as_ref().ok_or_else(|| Error::Invalid(format!("scene {} has no truth mask", s.name)))?;
            let pool = segment_image(&s.image, &s.candidates, library, config, method)?;
            Ok(SceneReport { name: s.name.clone(), stats: pool_stats(&pool, truth)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = lines.len() as f64;
    let mean = |f: fn(&PoolStats) -> f64| lines.iter().map(|l| f(&l.stats)).sum::<f64>() / n;
    Ok(MethodReport {
        method,
        mean_first: mean(|s| s.first),
        mean_best: mean(|s| s.best),
        mean_pool_size: mean(|s| s.pool_size as f64),
        scenes: lines,
    })
}

/// Both methods side by side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub first_gain: f64,
    pub pool_size_ratio: f64,
}

impl Comparison {
    pub fn of(method: &MethodReport, baseline: &MethodReport) -> Self {
        Self {
            first_gain: method.mean_first - baseline.mean_first,
            pool_size_ratio: if baseline.mean_pool_size > 0.0 {
                method.mean_pool_size / baseline.mean_pool_size
            } else {
                f64::INFINITY
            },
        }
    }
}
