use super::{Point2, Transform2D};
use crate::error::{Error, Result};
use crate::raster::BinaryMask;

/// Pull-back warp: output pixel `p` is foreground when the pixel nearest to
/// `w⁻¹·p` is foreground in `mask`.
pub fn warp_mask(mask: &BinaryMask, w: &Transform2D, out_width: usize, out_height: usize) -> Result<BinaryMask> {
    let inv = w.inverse()?;
    let mut out = BinaryMask::new(out_width, out_height);
    let Some(bb) = mask.bbox() else { return Ok(out) };
    // only visit the forward image of the source bounding box
    let (x0, y0) = (bb.x as f64 - 1.0, bb.y as f64 - 1.0);
    let (x1, y1) = ((bb.x + bb.w) as f64, (bb.y + bb.h) as f64);
    let corners = [(x0, y0), (x1, y0), (x0, y1), (x1, y1)].map(|(x, y)| w.apply(Point2::new(x, y)));
    let lo = |f: fn(&Point2) -> f64| corners.iter().map(f).fold(f64::INFINITY, f64::min).floor() - 1.0;
    let hi = |f: fn(&Point2) -> f64| corners.iter().map(f).fold(f64::NEG_INFINITY, f64::max).ceil() + 1.0;
    let clip = |v: f64, n: usize| v.clamp(0.0, n as f64) as usize;
    let (xa, xb) = (clip(lo(|p| p.x), out_width), clip(hi(|p| p.x) + 1.0, out_width));
    let (ya, yb) = (clip(lo(|p| p.y), out_height), clip(hi(|p| p.y) + 1.0, out_height));
    for y in ya..yb {
        for x in xa..xb {
            let q = inv.apply(Point2::new(x as f64, y as f64));
            if mask.get_signed(q.x.round() as i64, q.y.round() as i64) {
                out.set(x, y, true);
            }
        }
    }
    Ok(out)
}

pub fn warp_skeleton(joints: &[Point2], w: &Transform2D) -> Vec<Point2> {
    joints.iter().map(|&p| w.apply(p)).collect()
}

/// Centroid and principal-axis angle of the foreground pixels, the angle in
/// `(−π/2, π/2]`.
pub fn mask_orientation(mask: &BinaryMask) -> Result<(Point2, f64)> {
    let w = mask.width();
    let pts: Vec<Point2> = mask.indices().map(|i| Point2::new((i % w) as f64, (i / w) as f64)).collect();
    if pts.is_empty() {
        return Err(Error::EmptyMask);
    }
    let c = Point2::centroid(&pts);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in &pts {
        let d = *p - c;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    let mut angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    if angle <= -std::f64::consts::FRAC_PI_2 {
        angle += std::f64::consts::PI;
    }
    Ok((c, angle))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::TransformParams;

    fn disk(w: usize, h: usize, cx: f64, cy: f64, r: f64) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2) <= r * r)
    }

    #[test]
    fn identity_and_translation() {
        let m = disk(40, 30, 15.0, 12.0, 7.5);
        assert_eq!(warp_mask(&m, &Transform2D::identity(), 40, 30).unwrap(), m);
        let shifted = warp_mask(&m, &Transform2D::translation(5.0, -3.0), 40, 30).unwrap();
        assert_eq!(shifted, BinaryMask::from_fn(40, 30, |x, y| x >= 5 && m.get_signed(x as i64 - 5, y as i64 + 3)));
        let cropped = warp_mask(&m, &Transform2D::identity(), 20, 50).unwrap();
        assert_eq!(cropped, BinaryMask::from_fn(20, 50, |x, y| y < 30 && m.get(x, y)));
    }

    #[test]
    fn doubling_scales_area_by_four() {
        let m = disk(30, 30, 14.0, 14.0, 10.0);
        let w = Transform2D::similarity(0.0, 2.0, 0.0, 0.0);
        let big = warp_mask(&m, &w, 70, 70).unwrap();
        let ratio = big.count() as f64 / (4.0 * m.count() as f64);
        assert!((ratio - 1.0).abs() < 0.05, "{ratio}");
    }

    #[test]
    fn round_trip_only_changes_the_rim() {
        let m = BinaryMask::from_fn(80, 80, |x, y| {
            let (x, y) = (x as f64 - 40.0, y as f64 - 40.0);
            (x / 25.0).powi(2) + (y / 12.0).powi(2) <= 1.0 || (x.abs() < 4.0 && y.abs() < 30.0)
        });
        // with |scales| ≥ 1 the two roundings move a pixel by at most one step
        let w = Transform2D::from_params(TransformParams { theta: 0.4, sx: 1.3, sy: -1.1, tx: 20.0, ty: 90.0 });
        let there = warp_mask(&m, &w, 180, 180).unwrap();
        let back = warp_mask(&there, &w.inverse().unwrap(), 80, 80).unwrap();
        for y in 0..80i64 {
            for x in 0..80i64 {
                let v = m.get_signed(x, y);
                let rim = (-1..=1).any(|dy| (-1..=1).any(|dx| m.get_signed(x + dx, y + dy) != v));
                if !rim {
                    assert_eq!(v, back.get(x as usize, y as usize), "pixel ({x}, {y})");
                }
            }
        }
    }

    #[test]
    fn singular_transform_is_rejected() {
        let m = disk(10, 10, 5.0, 5.0, 3.0);
        let w = Transform2D::from_linear([[0.0, 0.0], [0.0, 1.0]], 0.0, 0.0);
        assert!(matches!(warp_mask(&m, &w, 10, 10), Err(Error::SingularTransform(_))));
    }

    #[test]
    fn skeleton_actions() {
        let j: Vec<Point2> = (0..15).map(|i| Point2::new(i as f64, 2.0 * i as f64 - 3.0)).collect();
        assert_eq!(warp_skeleton(&j, &Transform2D::identity()), j);
        let t = warp_skeleton(&j, &Transform2D::translation(5.0, 7.0));
        assert!(j.iter().zip(&t).all(|(a, b)| *b - *a == Point2::new(5.0, 7.0)));
        let w1 = Transform2D::from_params(TransformParams { theta: 1.0, sx: 0.5, sy: 2.0, tx: 3.0, ty: 1.0 });
        let w2 = Transform2D::from_params(TransformParams { theta: -0.2, sx: -1.5, sy: 0.7, tx: -9.0, ty: 4.0 });
        let a = warp_skeleton(&warp_skeleton(&j, &w1), &w2);
        let b = warp_skeleton(&j, &w2.compose(&w1));
        assert!(a.iter().zip(&b).all(|(p, q)| (*p - *q).norm() < 1e-9));
    }

    #[test]
    fn orientation_of_tilted_bar() {
        let m = BinaryMask::from_fn(50, 50, |x, y| {
            let (x, y) = (x as f64 - 25.0, y as f64 - 25.0);
            (x - y).abs() < 3.0 && (x + y).abs() < 30.0
        });
        let (c, a) = mask_orientation(&m).unwrap();
        assert!((c - Point2::new(25.0, 25.0)).norm() < 1e-9);
        assert!((a - std::f64::consts::FRAC_PI_4).abs() < 1e-6, "{a}");
    }
}
