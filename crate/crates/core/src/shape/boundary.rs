use super::Point2;
use crate::error::{Error, Result};
use crate::raster::BinaryMask;

/// Points sampled along a silhouette's outer contour.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPoints {
    pub points: Vec<Point2>,
}

impl BoundaryPoints {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

// clockwise on screen, starting west
const DIRS: [(i64, i64); 8] = [(-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1)];

fn dir_index(dx: i64, dy: i64) -> usize {
    DIRS.iter().position(|&d| d == (dx, dy)).expect("offset is an 8-neighbour")
}

/// Moore-neighbour trace of one component's outer contour, starting at its
/// topmost-leftmost pixel. The returned loop is closed implicitly.
fn trace_from(mask: &BinaryMask, start: (i64, i64)) -> Vec<(i64, i64)> {
    let mut contour = vec![start];
    let mut cur = start;
    let mut back = 0usize;
    let limit = 4 * mask.len() + 8;
    for _ in 0..limit {
        let mut next = None;
        for k in 1..=8 {
            let d = (back + k) % 8;
            let n = (cur.0 + DIRS[d].0, cur.1 + DIRS[d].1);
            if mask.get_signed(n.0, n.1) {
                next = Some((n, d));
                break;
            }
        }
        let Some((n, d)) = next else { break };
        if cur == start && contour.len() >= 2 && n == contour[1] {
            break;
        }
        let prev = DIRS[(d + 7) % 8];
        let p = (cur.0 + prev.0, cur.1 + prev.1);
        back = dir_index(p.0 - n.0, p.1 - n.1);
        contour.push(n);
        cur = n;
    }
    if contour.len() > 1 && contour.last() == Some(&start) {
        contour.pop();
    }
    contour
}

/// Outer contours of every 8-connected component, in scan order of their
/// topmost-leftmost pixels.
pub fn trace_contours(mask: &BinaryMask) -> Vec<Vec<(i64, i64)>> {
    let (w, h) = mask.dims();
    let mut label = vec![false; w * h];
    let mut contours = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if !mask.at(i) || label[i] {
                continue;
            }
            // flood the component so it is traced once
            let mut stack = vec![(x as i64, y as i64)];
            label[i] = true;
            while let Some((cx, cy)) = stack.pop() {
                for (dx, dy) in DIRS {
                    let (nx, ny) = (cx + dx, cy + dy);
                    if mask.get_signed(nx, ny) {
                        let j = ny as usize * w + nx as usize;
                        if !label[j] {
                            label[j] = true;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
            contours.push(trace_from(mask, (x as i64, y as i64)));
        }
    }
    contours
}

/// Samples `k` contour pixels at equal arc-length spacing.
///
/// Components are visited in scan order and their contours concatenated.
/// When `k` is at least the contour length, every contour pixel is returned
/// once. Coordinates are pixel centres.
pub fn sample_boundary(mask: &BinaryMask, k: usize) -> Result<BoundaryPoints> {
    let contours = trace_contours(mask);
    if contours.is_empty() {
        return Err(Error::EmptyMask);
    }
    let total_pixels: usize = contours.iter().map(Vec::len).sum();
    if k >= total_pixels {
        let mut seen = std::collections::HashSet::new();
        let points = contours
            .iter()
            .flatten()
            .filter(|p| seen.insert(**p))
            .map(|&(x, y)| Point2::new(x as f64, y as f64))
            .collect();
        return Ok(BoundaryPoints { points });
    }

    // cumulative arc position of every contour pixel
    let mut pixels = Vec::with_capacity(total_pixels);
    let mut arc = Vec::with_capacity(total_pixels);
    let mut length = 0.0;
    for c in &contours {
        for (i, &p) in c.iter().enumerate() {
            pixels.push(p);
            arc.push(length);
            let q = c[(i + 1) % c.len()];
            if c.len() > 1 {
                length += if p.0 != q.0 && p.1 != q.1 { std::f64::consts::SQRT_2 } else { 1.0 };
            }
        }
    }
    let step = length / k as f64;
    let mut points = Vec::with_capacity(k);
    let mut j = 0;
    for i in 0..k {
        let s = i as f64 * step;
        while j + 1 < arc.len() && arc[j + 1] <= s + 1e-9 {
            j += 1;
        }
        let (x, y) = pixels[j];
        points.push(Point2::new(x as f64, y as f64));
    }
    Ok(BoundaryPoints { points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_boundary(mask: &BinaryMask, p: Point2) -> bool {
        let (x, y) = (p.x as i64, p.y as i64);
        mask.get_signed(x, y)
            && [(-1, 0), (1, 0), (0, -1), (0, 1)].iter().any(|(dx, dy)| !mask.get_signed(x + dx, y + dy))
    }

    #[test]
    fn square_corners() {
        let m = BinaryMask::from_fn(14, 14, |x, y| (2..12).contains(&x) && (2..12).contains(&y));
        let b = sample_boundary(&m, 4).unwrap();
        let got: Vec<(f64, f64)> = b.points.iter().map(|p| (p.x, p.y)).collect();
        assert_eq!(got, vec![(2.0, 2.0), (11.0, 2.0), (11.0, 11.0), (2.0, 11.0)]);
    }

    #[test]
    fn single_pixel_is_clamped() {
        let mut m = BinaryMask::new(5, 5);
        m.set(2, 3, true);
        let b = sample_boundary(&m, 60).unwrap();
        assert_eq!(b.points, vec![Point2::new(2.0, 3.0)]);
    }

    #[test]
    fn empty_mask_is_error() {
        assert!(matches!(sample_boundary(&BinaryMask::new(4, 4), 10), Err(Error::EmptyMask)));
    }

    #[test]
    fn disk_samples_lie_on_the_circle() {
        let (cx, cy, r) = (30.0, 30.0, 20.0);
        let m = BinaryMask::from_fn(61, 61, |x, y| {
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            dx * dx + dy * dy <= r * r
        });
        let b = sample_boundary(&m, 100).unwrap();
        assert_eq!(b.len(), 100);
        for p in &b.points {
            let d = (p.x - cx).hypot(p.y - cy);
            assert!((d - r).abs() <= 1.0, "{p:?} at {d}");
            assert!(is_boundary(&m, *p));
        }
    }

    #[test]
    fn contour_of_a_thin_line_visits_both_sides() {
        let m = BinaryMask::from_fn(8, 3, |x, y| y == 1 && (1..7).contains(&x));
        let c = trace_contours(&m);
        assert_eq!(c.len(), 1);
        // out along the line and back
        assert_eq!(c[0].len(), 10);
    }

    #[test]
    fn components_are_traced_separately() {
        let m = BinaryMask::from_fn(12, 6, |x, y| {
            (1..4).contains(&x) && (1..4).contains(&y) || (7..11).contains(&x) && (2..5).contains(&y)
        });
        let c = trace_contours(&m);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0][0], (1, 1));
        assert_eq!(c[1][0], (7, 2));
        assert_eq!(c[0].len(), 8);
        assert_eq!(c[1].len(), 10);
    }

    #[test]
    fn every_sample_is_a_boundary_pixel() {
        let m = BinaryMask::from_fn(40, 40, |x, y| {
            let (x, y) = (x as i64, y as i64);
            (x - 15).pow(2) + (y - 20).pow(2) < 100 || (x > 20 && x < 35 && y > 5 && y < 30)
        });
        for k in [3, 17, 60, 500] {
            let b = sample_boundary(&m, k).unwrap();
            assert!(b.points.iter().all(|&p| is_boundary(&m, p)));
        }
    }
}
