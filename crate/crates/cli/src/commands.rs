use std::fs;
use std::path::Path;

use anyhow::Context;
use mafcut::energy::SeedSets;
use mafcut::io::{read_image, read_mask, write_mask, write_scalar_map};
use mafcut::maf::{build_prior, ExemplarLibrary, MafResult, PreparedLibrary, JOINT_NAMES};
use mafcut::pipeline::{
    evaluate, load_candidates, load_scene_set, nms, pool_stats, run_parametric, save_scene_set, segment_image,
    Candidate, Comparison, Method, MethodReport, PoolStats,
};
use mafcut::synth::{gen_library, gen_scene_set, LibraryParams, SceneSetParams};
use mafcut::{Error, RunConfig};
use serde::Serialize;

use crate::{BreakpointsArgs, EvalArgs, GenArgs, PriorArgs, SegmentArgs};

/// Maps onto the exit status: usage problems are 2, everything else 1.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Runtime(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_library(path: &Path) -> anyhow::Result<ExemplarLibrary> {
    ExemplarLibrary::load(path).with_context(|| format!("loading exemplar library {}", path.display()))
}

pub fn gen(a: GenArgs) -> Outcome {
    let out = a.out.expect("clap enforces --out");
    if a.library.is_none() && a.scenes.is_none() {
        return Err(Failure::Usage("gen needs --library N and/or --scenes N".into()));
    }
    if !(0.0..=1.0).contains(&a.occlude) {
        return Err(Failure::Usage("--occlude must be a probability".into()));
    }
    let both = a.library.is_some() && a.scenes.is_some();
    if let Some(n) = a.library {
        let dir = if both { out.join("library") } else { out.clone() };
        let library = gen_library(n, a.seed, &LibraryParams::default())?;
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        library.save(&dir)?;
        log::info!("wrote {n} exemplars to {}", dir.display());
    }
    if let Some(n) = a.scenes {
        let dir = if both { out.join("scenes") } else { out };
        let defaults = SceneSetParams::default();
        let params = SceneSetParams {
            occlusion_prob: a.occlude,
            library_seed: a.seed,
            library_size: a.library.unwrap_or(defaults.library_size),
            ..defaults
        };
        let scenes = gen_scene_set(n, a.scene_seed, &params)?;
        save_scene_set(&dir, &scenes)?;
        log::info!("wrote {n} scenes to {}", dir.display());
    }
    Ok(())
}

#[derive(Serialize)]
struct HypothesisEntry<'a> {
    file: String,
    candidate: &'a str,
    lambda: f64,
    energy: f64,
    score: f64,
    area: usize,
}

#[derive(Serialize)]
struct SegmentReport<'a> {
    method: Method,
    candidates: usize,
    kept: Vec<&'a str>,
    pool_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    stats: Option<PoolStats>,
    hypotheses: Vec<HypothesisEntry<'a>>,
}

pub fn segment(a: SegmentArgs) -> Outcome {
    let config = a.config.resolve()?;
    let image = read_image(&a.image).with_context(|| format!("reading {}", a.image.display()))?;
    let candidates = load_candidates(&a.candidates).with_context(|| format!("reading {}", a.candidates.display()))?;
    let truth = match &a.truth {
        Some(p) => Some(read_mask(p).with_context(|| format!("reading {}", p.display()))?),
        None => None,
    };
    let method = if a.baseline.is_some() { Method::NoPrior } else { Method::MafPrior };
    let library = match (&a.library, method) {
        (Some(p), Method::MafPrior) => load_library(p)?,
        _ => ExemplarLibrary::default(),
    };
    let prepared = PreparedLibrary::new(&library, config.boundary_samples);
    let pool = segment_image(&image, &candidates, &prepared, &config, method)?;
    let stats = truth.as_ref().map(|t| pool_stats(&pool, t)).transpose()?;
    let kept = nms(&candidates, config.nms_threshold)?;

    let pool_dir = a.out.join("pool");
    fs::create_dir_all(&pool_dir).with_context(|| format!("creating {}", pool_dir.display()))?;
    let mut hypotheses = Vec::with_capacity(pool.len());
    for (i, h) in pool.hypotheses.iter().enumerate() {
        let file = format!("pool/hyp_{i:04}.pgm");
        write_mask(&a.out.join(&file), &h.mask)?;
        hypotheses.push(HypothesisEntry {
            file,
            candidate: &h.candidate,
            lambda: h.lambda,
            energy: h.energy,
            score: h.score,
            area: h.mask.count(),
        });
    }
    let report = SegmentReport {
        method,
        candidates: candidates.len(),
        kept: kept.iter().map(|c| c.id.as_str()).collect(),
        pool_size: pool.len(),
        stats,
        hypotheses,
    };
    write_json(&a.out.join("report.json"), &report)?;

    if a.dump_prior {
        dump_priors(&kept, &prepared, &config, &a.out.join("prior"))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SelectionEntry<'a> {
    exemplar: &'a str,
    error: f64,
    matches: usize,
}

#[derive(Serialize)]
struct PriorEntry<'a> {
    candidate: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    rejected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    prior: Option<String>,
    selected: Vec<SelectionEntry<'a>>,
    joints: Vec<&'static str>,
    /// Homogeneous skeleton, rows x, y, 1.
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<[Vec<f64>; 3]>,
}

fn prior_entry<'a>(
    candidate: &'a Candidate,
    maf: &Result<MafResult, Error>,
    library: &'a ExemplarLibrary,
) -> PriorEntry<'a> {
    let mut entry = PriorEntry {
        candidate: &candidate.id,
        rejected: None,
        prior: None,
        selected: Vec::new(),
        joints: JOINT_NAMES.to_vec(),
        b: None,
    };
    match maf {
        Ok(m) => {
            entry.selected = m
                .selected
                .iter()
                .map(|s| SelectionEntry {
                    exemplar: &library.exemplars[s.index].id,
                    error: s.error,
                    matches: s.matches,
                })
                .collect();
            entry.b = Some(m.prior.homogeneous());
        }
        Err(e) => entry.rejected = Some(e.to_string()),
    }
    entry
}

/// One `S` map and one JSON record per candidate, plus an index.
fn dump_priors(candidates: &[Candidate], library: &PreparedLibrary, config: &RunConfig, dir: &Path) -> Outcome {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut index = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        let maf = match build_prior(&c.mask, library, config) {
            Err(Error::Rejected(why)) => Err(Error::Rejected(why)),
            r => Ok(r?),
        };
        let mut entry = prior_entry(c, &maf, library.library());
        if let Ok(m) = &maf {
            let file = format!("prior_{i:03}.pgm");
            write_scalar_map(&dir.join(&file), m.prior.width, m.prior.height, &m.prior.s)?;
            entry.prior = Some(file);
        }
        index.push(entry);
    }
    write_json(&dir.join("index.json"), &index)?;
    Ok(())
}

pub fn prior(a: PriorArgs) -> Outcome {
    let config = a.config.resolve()?;
    let candidates = load_candidates(&a.candidates).with_context(|| format!("reading {}", a.candidates.display()))?;
    let library = load_library(&a.library)?;
    let prepared = PreparedLibrary::new(&library, config.boundary_samples);
    dump_priors(&candidates, &prepared, &config, &a.out)
}

#[derive(Serialize)]
struct BreakpointEntry {
    file: String,
    lambda: f64,
    energy: f64,
    foreground: usize,
}

#[derive(Serialize)]
struct BreakpointIndex<'a> {
    candidate: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    rejected: Option<String>,
    lambda_range: Option<(f64, f64)>,
    breakpoints: Vec<BreakpointEntry>,
}

pub fn breakpoints(a: BreakpointsArgs) -> Outcome {
    let config = a.config.resolve()?;
    let image = read_image(&a.image).with_context(|| format!("reading {}", a.image.display()))?;
    let candidates = load_candidates(&a.candidates).with_context(|| format!("reading {}", a.candidates.display()))?;
    let library = load_library(&a.library)?;
    let prepared = PreparedLibrary::new(&library, config.boundary_samples);
    let kept = nms(&candidates, config.nms_threshold)?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let mut index = Vec::new();
    for (i, c) in kept.iter().enumerate() {
        let mut entry =
            BreakpointIndex { candidate: &c.id, rejected: None, lambda_range: None, breakpoints: Vec::new() };
        let maf = match build_prior(&c.mask, &prepared, &config) {
            Ok(m) => m,
            Err(Error::Rejected(why)) => {
                entry.rejected = Some(why);
                index.push(entry);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let seeds = SeedSets::from_masks(&maf.foreground, &maf.background)?;
        let (_, cuts) = run_parametric(&image, &seeds, &maf.prior.s, &config)?;
        let sub = format!("candidate_{i:03}");
        fs::create_dir_all(a.out.join(&sub)).with_context(|| format!("creating {sub}"))?;
        entry.lambda_range = Some(cuts.lambda_range);
        for (j, s) in cuts.solutions.iter().enumerate() {
            let file = format!("{sub}/bp_{j:04}.pgm");
            write_mask(&a.out.join(&file), &s.labeling)?;
            entry.breakpoints.push(BreakpointEntry {
                file,
                lambda: s.lambda,
                energy: s.energy,
                foreground: s.labeling.count(),
            });
        }
        index.push(entry);
    }
    write_json(&a.out.join("index.json"), &index)?;
    Ok(())
}

#[derive(Serialize)]
struct EvalReport {
    scenes: usize,
    config: RunConfig,
    methods: Vec<MethodReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    comparison: Option<Comparison>,
}

pub fn eval(a: EvalArgs) -> Outcome {
    let config = a.config.resolve()?;
    let scenes = load_scene_set(&a.scenes).with_context(|| format!("loading scene set {}", a.scenes.display()))?;
    if scenes.is_empty() {
        return Err(Failure::Usage(format!("scene set {} is empty", a.scenes.display())));
    }
    let library = load_library(&a.library)?;
    let prepared = PreparedLibrary::new(&library, config.boundary_samples);
    let maf = evaluate(&scenes, &prepared, &config, Method::MafPrior)?;
    let mut methods = vec![maf];
    let mut comparison = None;
    if a.baseline.is_some() {
        let base = evaluate(&scenes, &prepared, &config, Method::NoPrior)?;
        comparison = Some(Comparison::of(&methods[0], &base));
        methods.push(base);
    }
    let report = EvalReport { scenes: scenes.len(), config, methods, comparison };
    match &a.out {
        Some(p) => write_json(p, &report)?,
        None => {
            let text = serde_json::to_string_pretty(&report).context("serializing report")?;
            println!("{text}");
        }
    }
    Ok(())
}
