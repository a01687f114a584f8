//! The seed-constrained, λ-parametrized binary energy over a 4-connected grid.
//!
//! For a labeling `X` (1 = foreground) the energy is
//!
//! ```text
//! E_λ(X) = Σ_u U_λ(x_u) + Σ_(u,v) [x_u ≠ x_v] g(u, v)
//! ```
//!
//! A non-seed pixel pays `f(u) + λ + w_s S(u)` when labeled background and
//! `w_s (1 - S(u))` when labeled foreground. Seed pixels pay a sentinel cost
//! for the opposite label and nothing for their own.
//!
//! All costs are held as integers in units of [`COST_SCALE`]⁻¹ so that cut
//! values and energy evaluations agree exactly.

mod color;
mod contour;

pub use color::{build_color_model, foreground_bias, kmeans, ColorModel};
pub use contour::{contour_map, pairwise_weight, ContourMap};

use crate::config::{BiasMode, PriorMode, RunConfig};
use crate::error::{Error, Result};
use crate::raster::{BinaryMask, Image};

/// Fixed-point scale of every cost and of λ.
pub const COST_SCALE: f64 = 1e6;

/// Converts a real cost to fixed point.
pub fn to_units(x: f64) -> i64 {
    (x * COST_SCALE).round() as i64
}

pub fn from_units(u: i128) -> f64 {
    u as f64 / COST_SCALE
}

/// Disjoint foreground and background seed pixel sets, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SeedSets {
    foreground: Vec<usize>,
    background: Vec<usize>,
}

impl SeedSets {
    pub fn new(mut foreground: Vec<usize>, mut background: Vec<usize>, pixels: usize) -> Result<Self> {
        foreground.sort_unstable();
        foreground.dedup();
        background.sort_unstable();
        background.dedup();
        if let Some(&i) = foreground.iter().chain(&background).find(|&&i| i >= pixels) {
            return Err(Error::Invalid(format!("seed pixel {i} out of range")));
        }
        let (mut a, mut b) = (0, 0);
        while a < foreground.len() && b < background.len() {
            match foreground[a].cmp(&background[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => return Err(Error::OverlappingSeeds(foreground[a])),
            }
        }
        Ok(Self { foreground, background })
    }

    pub fn from_masks(fg: &BinaryMask, bg: &BinaryMask) -> Result<Self> {
        Self::new(fg.indices().collect(), bg.indices().collect(), fg.len())
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn foreground(&self) -> &[usize] {
        &self.foreground
    }

    pub fn background(&self) -> &[usize] {
        &self.background
    }
}

/// Immutable grid energy; see the module docs for the cost structure.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyModel {
    width: usize,
    height: usize,
    /// Cost of background excluding λ.
    bg_cost: Vec<i64>,
    fg_cost: Vec<i64>,
    hard_fg: Vec<bool>,
    hard_bg: Vec<bool>,
    /// Weight of the edge to the right neighbour (0 on the last column).
    right: Vec<i64>,
    /// Weight of the edge to the lower neighbour (0 on the last row).
    down: Vec<i64>,
    sentinel: i128,
}

/// Real-valued description of an energy, converted to fixed point by
/// [`EnergyModel::from_parts`].
#[derive(Clone, Debug)]
pub struct EnergyParts {
    pub width: usize,
    pub height: usize,
    pub bg_cost: Vec<f64>,
    pub fg_cost: Vec<f64>,
    pub right: Vec<f64>,
    pub down: Vec<f64>,
    pub seeds: SeedSets,
}

impl EnergyModel {
    pub fn from_parts(parts: EnergyParts) -> Result<Self> {
        let EnergyParts { width, height, bg_cost, fg_cost, right, down, seeds } = parts;
        let n = width * height;
        if n == 0 {
            return Err(Error::Invalid("energy grid must be non-empty".into()));
        }
        for v in [&bg_cost, &fg_cost, &right, &down] {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: (width, height), found: (v.len(), 1) });
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::Invalid("energy terms must be finite".into()));
            }
        }
        if right.iter().chain(&down).any(|&w| w < 0.0) {
            return Err(Error::Invalid("pairwise weights must be >= 0 (submodularity)".into()));
        }
        let mut hard_fg = vec![false; n];
        let mut hard_bg = vec![false; n];
        for &i in seeds.foreground() {
            hard_fg[i] = true;
        }
        for &i in seeds.background() {
            hard_bg[i] = true;
        }
        let mut bg: Vec<i64> = bg_cost.iter().map(|&c| to_units(c)).collect();
        let mut fg: Vec<i64> = fg_cost.iter().map(|&c| to_units(c)).collect();
        for i in 0..n {
            if hard_fg[i] || hard_bg[i] {
                bg[i] = 0;
                fg[i] = 0;
            }
        }
        let mut right: Vec<i64> = right.iter().map(|&c| to_units(c)).collect();
        let mut down: Vec<i64> = down.iter().map(|&c| to_units(c)).collect();
        for y in 0..height {
            right[y * width + width - 1] = 0;
        }
        for x in 0..width {
            down[(height - 1) * width + x] = 0;
        }
        let finite: i128 = bg.iter().chain(&fg).chain(&right).chain(&down).map(|&c| (c as i128).abs()).sum();
        // 10^6 × (Σ finite weights + 1), in cost units
        let sentinel = 1_000_000 * (finite + COST_SCALE as i128);
        Ok(Self { width, height, bg_cost: bg, fg_cost: fg, hard_fg, hard_bg, right, down, sentinel })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.bg_cost.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bg_cost.is_empty()
    }

    pub fn bg_cost_units(&self) -> &[i64] {
        &self.bg_cost
    }

    pub fn fg_cost_units(&self) -> &[i64] {
        &self.fg_cost
    }

    pub fn hard_fg(&self) -> &[bool] {
        &self.hard_fg
    }

    pub fn hard_bg(&self) -> &[bool] {
        &self.hard_bg
    }

    pub fn right_units(&self) -> &[i64] {
        &self.right
    }

    pub fn down_units(&self) -> &[i64] {
        &self.down
    }

    /// Cost charged for labeling a seed against its constraint.
    pub fn sentinel_units(&self) -> i128 {
        self.sentinel
    }

    pub fn sentinel(&self) -> f64 {
        from_units(self.sentinel)
    }

    /// Whether `+λ` applies to the background cost of pixel `i`.
    pub fn lambda_applies(&self, i: usize) -> bool {
        !self.hard_fg[i] && !self.hard_bg[i]
    }

    pub fn seeds(&self) -> SeedSets {
        SeedSets {
            foreground: (0..self.len()).filter(|&i| self.hard_fg[i]).collect(),
            background: (0..self.len()).filter(|&i| self.hard_bg[i]).collect(),
        }
    }

    /// Iterates `(u, v, weight_units)` over grid edges with nonzero weight.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        let w = self.width;
        (0..self.len()).flat_map(move |u| {
            let r = (self.right[u] > 0).then(|| (u, u + 1, self.right[u]));
            let d = (self.down[u] > 0).then(|| (u, u + w, self.down[u]));
            r.into_iter().chain(d)
        })
    }

    /// Largest `|bg - fg|` unary gap over non-seed pixels, in real units.
    pub fn max_unary_gap(&self) -> f64 {
        (0..self.len())
            .filter(|&i| self.lambda_applies(i))
            .map(|i| from_units((self.bg_cost[i] - self.fg_cost[i]).abs() as i128))
            .fold(0.0, f64::max)
    }
}

/// Per-pixel foreground bias for the configured mode.
pub fn bias_field(image: &Image, seeds: &SeedSets, config: &RunConfig) -> Result<Vec<f64>> {
    match config.bias_mode {
        BiasMode::Uniform => Ok(vec![0.0; image.len()]),
        BiasMode::Color => {
            let model =
                build_color_model(image, seeds, config.k, config.gamma, config.kmeans_iterations, config.rng_seed)?;
            Ok(image.pixels().iter().map(|p| foreground_bias(p, &model)).collect())
        }
    }
}

/// Assembles the energy for an image, seed sets and per-pixel prior `S`.
pub fn build_energy(image: &Image, seeds: &SeedSets, prior: &[f64], config: &RunConfig) -> Result<EnergyModel> {
    let bias = bias_field(image, seeds, config)?;
    build_energy_with_bias(image, seeds, prior, &bias, config)
}

/// As [`build_energy`] with a precomputed bias field.
pub fn build_energy_with_bias(
    image: &Image,
    seeds: &SeedSets,
    prior: &[f64],
    bias: &[f64],
    config: &RunConfig,
) -> Result<EnergyModel> {
    let (w, h) = image.dims();
    let n = w * h;
    if prior.len() != n {
        return Err(Error::DimensionMismatch { expected: (w, h), found: (prior.len(), 1) });
    }
    if bias.len() != n {
        return Err(Error::DimensionMismatch { expected: (w, h), found: (bias.len(), 1) });
    }
    if let Some((index, &value)) = prior.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
        return Err(Error::PriorOutOfRange { index, value });
    }
    // re-validate disjointness for hand-built seed sets
    let seeds = SeedSets::new(seeds.foreground().to_vec(), seeds.background().to_vec(), n)?;

    let contours = contour_map(image, config.sigma_sq);
    let mut bg_cost = vec![0.0; n];
    let mut fg_cost = vec![0.0; n];
    for i in 0..n {
        bg_cost[i] = bias[i] + config.w_s * prior[i];
        fg_cost[i] = match config.prior_mode {
            PriorMode::Symmetric => config.w_s * (1.0 - prior[i]),
            PriorMode::BackgroundOnly => 0.0,
        };
    }
    let mut right = vec![0.0; n];
    let mut down = vec![0.0; n];
    for y in 0..h {
        for x in 0..w {
            let u = y * w + x;
            if x + 1 < w {
                right[u] = config.w_p * contours.weight_unchecked(u, u + 1);
            }
            if y + 1 < h {
                down[u] = config.w_p * contours.weight_unchecked(u, u + w);
            }
        }
    }
    EnergyModel::from_parts(EnergyParts { width: w, height: h, bg_cost, fg_cost, right, down, seeds })
}
