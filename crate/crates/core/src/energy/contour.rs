//! Boundary strength map and the contrast-sensitive pairwise weight.
//!
//! `Gb` here is the forward-difference gradient magnitude of the channel-mean
//! grayscale image, normalized by its maximum over the image. It stands in
//! for a learned multi-cue contour detector.

use crate::error::{Error, Result};
use crate::raster::{are_4_adjacent, Image};

#[derive(Clone, Debug, PartialEq)]
pub struct ContourMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
    sigma_sq: f64,
}

impl ContourMap {
    pub fn from_values(width: usize, height: usize, values: Vec<f64>, sigma_sq: f64) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::DimensionMismatch { expected: (width, height), found: (values.len(), 1) });
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Invalid("contour strengths must lie in [0, 1]".into()));
        }
        if !(sigma_sq > 0.0) {
            return Err(Error::Config("sigma_sq must be > 0".into()));
        }
        Ok(Self { width, height, values, sigma_sq })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sigma_sq(&self) -> f64 {
        self.sigma_sq
    }

    /// `exp(-max(Gb(u), Gb(v)) / σ²)` without the adjacency check.
    #[inline]
    pub(crate) fn weight_unchecked(&self, u: usize, v: usize) -> f64 {
        (-self.values[u].max(self.values[v]) / self.sigma_sq).exp()
    }
}

pub fn contour_map(image: &Image, sigma_sq: f64) -> ContourMap {
    let (w, h) = image.dims();
    let gray = image.grayscale();
    let mut mag = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let gx = if x + 1 < w { gray[i + 1] - gray[i] } else { 0.0 };
            let gy = if y + 1 < h { gray[i + w] - gray[i] } else { 0.0 };
            mag[i] = gx.hypot(gy);
        }
    }
    let max = mag.iter().cloned().fold(0.0, f64::max);
    if max > 0.0 {
        for m in &mut mag {
            *m = (*m / max).min(1.0);
        }
    }
    ContourMap { width: w, height: h, values: mag, sigma_sq }
}

/// Similarity `g(u, v)` of two 4-adjacent pixels, in `(0, 1]`.
pub fn pairwise_weight(u: usize, v: usize, contours: &ContourMap) -> Result<f64> {
    let n = contours.values.len();
    if u >= n || v >= n || !are_4_adjacent(contours.width, u, v) {
        return Err(Error::NotAdjacent(u, v));
    }
    Ok(contours.weight_unchecked(u, v))
}
