//! Seed colour models and the colour foreground bias `f = ln p_f / p_b`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SeedSets;
use crate::error::{Error, Result};
use crate::raster::Image;

/// k-means colour centres of the foreground and background seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct ColorModel {
    pub fg_centers: Vec<[f64; 3]>,
    pub bg_centers: Vec<[f64; 3]>,
    pub gamma: f64,
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    dist_sq(a, b).sqrt()
}

fn dist_sq(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
}

fn nearest(centers: &[[f64; 3]], p: &[f64; 3]) -> (usize, f64) {
    centers.iter().enumerate().map(|(i, c)| (i, dist_sq(c, p))).fold((0, f64::INFINITY), |best, cur| {
        if cur.1 < best.1 {
            cur
        } else {
            best
        }
    })
}

/// Lloyd's k-means with k-means++ seeding. `k` is reduced to the number of
/// distinct colours when there are fewer.
pub fn kmeans(points: &[[f64; 3]], k: usize, iterations: usize, seed: u64) -> Vec<[f64; 3]> {
    let mut distinct: Vec<[u64; 3]> = points.iter().map(|p| p.map(f64::to_bits)).collect();
    distinct.sort_unstable();
    distinct.dedup();
    let k = if distinct.len() < k {
        log::warn!("only {} distinct colours for k = {k}; reducing k", distinct.len());
        distinct.len()
    } else {
        k
    };
    if k == 0 {
        return Vec::new();
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = vec![points[rng.random_range(0..points.len())]];
    let mut d2: Vec<f64> = points.iter().map(|p| dist_sq(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let mut target = rng.random::<f64>() * total;
        let mut pick = d2.iter().rposition(|&d| d > 0.0).unwrap_or(0);
        for (i, &d) in d2.iter().enumerate() {
            if d > 0.0 && target < d {
                pick = i;
                break;
            }
            target -= d;
        }
        let c = points[pick];
        for (slot, p) in d2.iter_mut().zip(points) {
            *slot = slot.min(dist_sq(p, &c));
        }
        centers.push(c);
    }

    let mut assignment = vec![usize::MAX; points.len()];
    for _ in 0..iterations {
        let mut changed = false;
        for (a, p) in assignment.iter_mut().zip(points) {
            let (j, _) = nearest(&centers, p);
            if *a != j {
                *a = j;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![[0.0; 3]; k];
        let mut counts = vec![0usize; k];
        for (&a, p) in assignment.iter().zip(points) {
            counts[a] += 1;
            for c in 0..3 {
                sums[a][c] += p[c];
            }
        }
        for j in 0..k {
            if counts[j] > 0 {
                centers[j] = sums[j].map(|s| s / counts[j] as f64);
            }
        }
    }
    centers
}

/// Fits `k` colour centres to each seed set.
pub fn build_color_model(
    image: &Image,
    seeds: &SeedSets,
    k: usize,
    gamma: f64,
    iterations: usize,
    rng_seed: u64,
) -> Result<ColorModel> {
    if seeds.foreground().is_empty() {
        return Err(Error::InsufficientSeeds("foreground seed set is empty"));
    }
    if seeds.background().is_empty() {
        return Err(Error::InsufficientSeeds("background seed set is empty"));
    }
    if k == 0 {
        return Err(Error::Config("k must be >= 1".into()));
    }
    let colors = |idx: &[usize]| -> Vec<[f64; 3]> { idx.iter().map(|&i| image.pixels()[i]).collect() };
    Ok(ColorModel {
        fg_centers: kmeans(&colors(seeds.foreground()), k, iterations, rng_seed),
        bg_centers: kmeans(&colors(seeds.background()), k, iterations, rng_seed.wrapping_add(1)),
        gamma,
    })
}

/// `ln p_f(x) - ln p_b(x) = γ (min_j |x - b_j| - min_j |x - f_j|)`.
pub fn foreground_bias(rgb: &[f64; 3], model: &ColorModel) -> f64 {
    let min_to = |cs: &[[f64; 3]]| cs.iter().map(|c| dist(c, rgb)).fold(f64::INFINITY, f64::min);
    model.gamma * (min_to(&model.bg_centers) - min_to(&model.fg_centers))
}
