use std::f64::consts::PI;

use super::{BoundaryPoints, Point2};
use crate::error::{Error, Result};

/// Bin layout of a log-polar histogram.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContextLayout {
    pub radial_bins: usize,
    pub angular_bins: usize,
    /// Radial range in units of the mean pairwise distance.
    pub r_inner: f64,
    pub r_outer: f64,
}

impl Default for ContextLayout {
    fn default() -> Self {
        Self::new(5, 12)
    }
}

impl ContextLayout {
    pub fn new(radial_bins: usize, angular_bins: usize) -> Self {
        Self { radial_bins, angular_bins, r_inner: 0.125, r_outer: 2.0 }
    }

    pub fn bins(&self) -> usize {
        self.radial_bins * self.angular_bins
    }

    /// Interior radial edges; the outermost bins absorb everything beyond.
    fn radial_edges(&self) -> Vec<f64> {
        let ratio = self.r_outer / self.r_inner;
        (1..self.radial_bins).map(|k| self.r_inner * ratio.powf(k as f64 / self.radial_bins as f64)).collect()
    }

    fn radial_bin(edges: &[f64], r: f64) -> usize {
        edges.iter().take_while(|&&e| e <= r).count()
    }

    fn angular_bin(&self, angle: f64) -> usize {
        let a = if angle < 0.0 { angle + 2.0 * PI } else { angle };
        ((a / (2.0 * PI) * self.angular_bins as f64).floor() as usize).min(self.angular_bins - 1)
    }
}

/// Log-polar histogram of the positions of all other points.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeContext {
    pub layout: ContextLayout,
    /// Row-major `radial × angular` counts.
    pub counts: Vec<u32>,
}

impl ShapeContext {
    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }

    pub fn count(&self, radial: usize, angular: usize) -> u32 {
        self.counts[radial * self.layout.angular_bins + angular]
    }

    /// Counts scaled to sum to one.
    pub fn normalized(&self) -> Vec<f64> {
        let t = self.total().max(1) as f64;
        self.counts.iter().map(|&c| c as f64 / t).collect()
    }
}

fn mean_distance(points: &[Point2]) -> f64 {
    let n = points.len();
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            sum += points[i].dist(points[j]);
        }
    }
    sum / (n * (n - 1) / 2) as f64
}

fn context_at(points: &[Point2], at: usize, mean: f64, layout: ContextLayout, edges: &[f64]) -> ShapeContext {
    let mut counts = vec![0u32; layout.bins()];
    let origin = points[at];
    for (j, &p) in points.iter().enumerate() {
        if j == at {
            continue;
        }
        let d = p - origin;
        let r = if mean > 0.0 { d.norm() / mean } else { 0.0 };
        let rb = ContextLayout::radial_bin(edges, r);
        let ab = layout.angular_bin(d.y.atan2(d.x));
        counts[rb * layout.angular_bins + ab] += 1;
    }
    ShapeContext { layout, counts }
}

fn check(points: &BoundaryPoints, layout: ContextLayout) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, found: points.len() });
    }
    if layout.radial_bins == 0 || layout.angular_bins == 0 {
        return Err(Error::Config("shape context needs at least one bin per axis".into()));
    }
    Ok(())
}

/// Shape context of `points[at]`.
pub fn shape_context(points: &BoundaryPoints, at: usize, layout: ContextLayout) -> Result<ShapeContext> {
    check(points, layout)?;
    if at >= points.len() {
        return Err(Error::Invalid(format!("point index {at} out of range")));
    }
    let mean = mean_distance(&points.points);
    Ok(context_at(&points.points, at, mean, layout, &layout.radial_edges()))
}

/// Shape contexts of every point, sharing one mean-distance normalization.
pub fn shape_contexts(points: &BoundaryPoints, layout: ContextLayout) -> Result<Vec<ShapeContext>> {
    check(points, layout)?;
    let mean = mean_distance(&points.points);
    let edges = layout.radial_edges();
    Ok((0..points.len()).map(|i| context_at(&points.points, i, mean, layout, &edges)).collect())
}

fn chi2_slices(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let t = x + y;
        if t > 0.0 {
            s += (x - y) * (x - y) / t;
        }
    }
    0.5 * s
}

/// χ² distance between raw histograms.
pub fn chi2(a: &ShapeContext, b: &ShapeContext) -> Result<f64> {
    if a.layout != b.layout || a.counts.len() != b.counts.len() {
        return Err(Error::LayoutMismatch);
    }
    let a: Vec<f64> = a.counts.iter().map(|&c| c as f64).collect();
    let b: Vec<f64> = b.counts.iter().map(|&c| c as f64).collect();
    Ok(chi2_slices(&a, &b))
}

/// A matched pair of boundary points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Correspondence {
    pub query: usize,
    pub exemplar: usize,
    pub cost: f64,
}

/// Mutual nearest neighbours under χ² of normalized histograms, kept when
/// the cost is strictly below `mu`. Ties go to the lowest index.
pub fn match_descriptors(query: &[ShapeContext], exemplar: &[ShapeContext], mu: f64) -> Result<Vec<Correspondence>> {
    if let (Some(q), Some(e)) = (query.first(), exemplar.first()) {
        if q.layout != e.layout {
            return Err(Error::LayoutMismatch);
        }
    } else {
        return Ok(Vec::new());
    }
    let qn: Vec<Vec<f64>> = query.iter().map(ShapeContext::normalized).collect();
    let en: Vec<Vec<f64>> = exemplar.iter().map(ShapeContext::normalized).collect();
    let (n, m) = (qn.len(), en.len());
    let mut cost = vec![0.0; n * m];
    for i in 0..n {
        for j in 0..m {
            cost[i * m + j] = chi2_slices(&qn[i], &en[j]);
        }
    }
    let argmin = |it: &mut dyn Iterator<Item = (usize, f64)>| {
        it.fold((usize::MAX, f64::INFINITY), |best, (k, c)| if c < best.1 { (k, c) } else { best }).0
    };
    let col_best: Vec<usize> = (0..m).map(|j| argmin(&mut (0..n).map(|i| (i, cost[i * m + j])))).collect();
    let mut out = Vec::new();
    for i in 0..n {
        let j = argmin(&mut (0..m).map(|j| (j, cost[i * m + j])));
        if j != usize::MAX && col_best[j] == i && cost[i * m + j] < mu {
            out.push(Correspondence { query: i, exemplar: j, cost: cost[i * m + j] });
        }
    }
    Ok(out)
}

/// Computes descriptors for both point sets and matches them.
pub fn match_points(
    query: &BoundaryPoints,
    exemplar: &BoundaryPoints,
    mu: f64,
    layout: ContextLayout,
) -> Result<Vec<Correspondence>> {
    let q = shape_contexts(query, layout)?;
    let e = shape_contexts(exemplar, layout)?;
    match_descriptors(&q, &e, mu)
}
