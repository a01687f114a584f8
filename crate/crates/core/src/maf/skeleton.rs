use crate::raster::BinaryMask;
use crate::shape::Point2;

/// Joint order of every skeleton; part of the library format.
pub const JOINT_NAMES: [&str; 15] = [
    "head",
    "neck",
    "pelvis",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "left_hip",
    "right_hip",
    "left_knee",
    "right_knee",
    "left_ankle",
    "right_ankle",
];

pub const NUM_JOINTS: usize = 15;

/// Kinematic tree as (parent, child) joint indices.
pub const BONES: [(usize, usize); 14] = [
    (0, 1),
    (1, 2),
    (1, 3),
    (1, 4),
    (3, 5),
    (4, 6),
    (5, 7),
    (6, 8),
    (2, 9),
    (2, 10),
    (9, 11),
    (10, 12),
    (11, 13),
    (12, 14),
];

/// Rasterized skeleton used as foreground seeds.
#[derive(Clone, Debug, PartialEq)]
pub struct SkeletonSeeds {
    pub mask: BinaryMask,
    /// Pixel indices of `mask`'s foreground, ascending.
    pub nodes: Vec<usize>,
}

/// Integer Bresenham line, endpoints included.
pub fn bresenham(x0: i64, y0: i64, x1: i64, y1: i64) -> Vec<(i64, i64)> {
    let (dx, sx) = ((x1 - x0).abs(), if x0 < x1 { 1 } else { -1 });
    let (dy, sy) = (-(y1 - y0).abs(), if y0 < y1 { 1 } else { -1 });
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    let mut out = Vec::with_capacity((dx - dy + 1) as usize);
    loop {
        out.push((x, y));
        if x == x1 && y == y1 {
            return out;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Draws every bone of the tree; pixels outside the canvas are dropped.
pub fn rasterize_skeleton(joints: &[Point2], width: usize, height: usize) -> SkeletonSeeds {
    assert_eq!(joints.len(), NUM_JOINTS, "skeleton needs {NUM_JOINTS} joints");
    let mut mask = BinaryMask::new(width, height);
    let r = |p: Point2| (p.x.round() as i64, p.y.round() as i64);
    for &(a, b) in &BONES {
        let ((x0, y0), (x1, y1)) = (r(joints[a]), r(joints[b]));
        for (x, y) in bresenham(x0, y0, x1, y1) {
            if x >= 0 && y >= 0 && (x as usize) < width && (y as usize) < height {
                mask.set(x as usize, y as usize, true);
            }
        }
    }
    let nodes = mask.indices().collect();
    SkeletonSeeds { mask, nodes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tree_is_spanning() {
        let mut seen = [false; NUM_JOINTS];
        seen[0] = true;
        for &(a, b) in &BONES {
            assert!(seen[a] && !seen[b]);
            seen[b] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn classic_sequence() {
        assert_eq!(bresenham(0, 0, 5, 3), vec![(0, 0), (1, 1), (2, 1), (3, 2), (4, 2), (5, 3)]);
        assert_eq!(bresenham(3, 4, 7, 4), (3..=7).map(|x| (x, 4)).collect::<Vec<_>>());
        assert_eq!(bresenham(2, 2, 2, 2), vec![(2, 2)]);
    }

    #[test]
    fn coincident_joints_give_one_pixel() {
        let j = vec![Point2::new(4.0, 6.0); NUM_JOINTS];
        let s = rasterize_skeleton(&j, 10, 10);
        assert_eq!(s.nodes, vec![6 * 10 + 4]);
    }

    #[test]
    fn clipped_to_canvas() {
        let mut j = vec![Point2::new(2.0, 2.0); NUM_JOINTS];
        j[14] = Point2::new(-20.0, 2.0);
        let s = rasterize_skeleton(&j, 5, 5);
        assert_eq!(s.nodes, vec![10, 11, 12]);
    }

    proptest! {
        #[test]
        fn shallow_lines_round_half_up(dx in 1i64..40, frac in 0.0f64..=1.0, x0 in -10i64..10, y0 in -10i64..10) {
            let dy = (frac * dx as f64).floor() as i64;
            let line = bresenham(x0, y0, x0 + dx, y0 + dy);
            prop_assert_eq!(line.len() as i64, dx + 1);
            for (k, &(x, y)) in line.iter().enumerate() {
                let k = k as i64;
                prop_assert_eq!(x, x0 + k);
                // nearest row to the ideal line, ties upward
                prop_assert_eq!(y, y0 + (2 * k * dy + dx).div_euclid(2 * dx));
            }
        }

        #[test]
        fn lines_are_8_connected_and_reversible(x0 in -30i64..30, y0 in -30i64..30, x1 in -30i64..30, y1 in -30i64..30) {
            let line = bresenham(x0, y0, x1, y1);
            prop_assert_eq!(line[0], (x0, y0));
            prop_assert_eq!(*line.last().unwrap(), (x1, y1));
            prop_assert_eq!(line.len() as i64, (x1 - x0).abs().max((y1 - y0).abs()) + 1);
            for w in line.windows(2) {
                prop_assert!((w[0].0 - w[1].0).abs() <= 1 && (w[0].1 - w[1].1).abs() <= 1);
            }
        }
    }
}
