//! Run configuration shared by every stage of the engine.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Source of the per-pixel foreground bias `f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BiasMode {
    /// `f = 0` everywhere; only the uniform offset λ biases the cut.
    Uniform,
    /// `f = ln p_f / p_b` from k-means colour models of the seeds.
    Color,
}

/// How the shape prior enters the unary cost.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriorMode {
    /// Background pays `w_s * S`, foreground pays `w_s * (1 - S)`.
    Symmetric,
    /// Background pays `w_s * S`, foreground pays nothing.
    BackgroundOnly,
}

/// Every tunable of the pipeline. Missing JSON keys take their defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub gamma: f64,
    pub sigma_sq: f64,
    pub k: usize,
    pub kmeans_iterations: usize,
    pub w_s: f64,
    pub w_p: f64,
    pub bias_mode: BiasMode,
    pub prior_mode: PriorMode,
    pub rng_seed: u64,
    /// Boundary samples per shape.
    pub boundary_samples: usize,
    pub radial_bins: usize,
    pub angular_bins: usize,
    /// χ² threshold on normalized shape-context histograms.
    pub mu: f64,
    /// Fits backed by fewer than this fraction of the boundary samples
    /// count as failed alignments.
    pub min_match_fraction: f64,
    /// Alignment error threshold, in px² at `reference_height`.
    pub epsilon: f64,
    pub reference_height: f64,
    pub lambda_min: Option<f64>,
    pub lambda_max: Option<f64>,
    /// Breakpoint resolution; defaults to `1e-6 * (lambda_max - lambda_min)`.
    pub delta_lambda: Option<f64>,
    pub nms_threshold: f64,
    /// Side of the regular foreground seed grid used by the no-prior baseline.
    pub baseline_seed_grid: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            gamma: 5.0,
            sigma_sq: 0.1,
            k: 5,
            kmeans_iterations: 50,
            w_s: 1.0,
            w_p: 1.0,
            bias_mode: BiasMode::Color,
            prior_mode: PriorMode::Symmetric,
            rng_seed: 42,
            boundary_samples: 60,
            radial_bins: 5,
            angular_bins: 12,
            mu: 0.25,
            min_match_fraction: 0.5,
            epsilon: 4.0,
            reference_height: 200.0,
            lambda_min: None,
            lambda_max: None,
            delta_lambda: None,
            nms_threshold: 0.25,
            baseline_seed_grid: 3,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return fail("gamma must be finite and >= 0");
        }
        if !(self.sigma_sq > 0.0) {
            return fail("sigma_sq must be > 0");
        }
        if self.k == 0 {
            return fail("k must be >= 1");
        }
        if !(self.w_s >= 0.0 && self.w_p >= 0.0) {
            return fail("w_s and w_p must be >= 0");
        }
        if self.boundary_samples < 3 {
            return fail("boundary_samples must be >= 3");
        }
        if self.radial_bins == 0 || self.angular_bins == 0 {
            return fail("shape-context bin counts must be >= 1");
        }
        if !(self.mu >= 0.0 && self.epsilon >= 0.0) {
            return fail("mu and epsilon must be >= 0");
        }
        if !(0.0..=1.0).contains(&self.min_match_fraction) {
            return fail("min_match_fraction must be in [0, 1]");
        }
        if !(self.reference_height > 0.0) {
            return fail("reference_height must be > 0");
        }
        if let (Some(lo), Some(hi)) = (self.lambda_min, self.lambda_max) {
            if lo > hi {
                return fail("lambda_min must not exceed lambda_max");
            }
        }
        if matches!(self.delta_lambda, Some(d) if !(d > 0.0)) {
            return fail("delta_lambda must be > 0");
        }
        if !(self.nms_threshold > 0.0 && self.nms_threshold <= 1.0) {
            return fail("nms_threshold must be in (0, 1]");
        }
        if self.baseline_seed_grid == 0 {
            return fail("baseline_seed_grid must be >= 1");
        }
        Ok(())
    }
}
