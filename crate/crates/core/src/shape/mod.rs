//! Geometry used to match and align silhouettes: boundary sampling, log-polar
//! shape contexts, χ² matching, 5-DOF Procrustes fitting and warping.

mod boundary;
mod context;
mod procrustes;
mod warp;

pub use boundary::{sample_boundary, trace_contours, BoundaryPoints};
pub use context::{
    chi2, match_descriptors, match_points, shape_context, shape_contexts, ContextLayout, Correspondence, ShapeContext,
};
pub use procrustes::{procrustes_fit, Transform2D, TransformParams};
pub use warp::{mask_orientation, warp_mask, warp_skeleton};

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

/// A 2D point in pixel coordinates (x right, y down).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn centroid(points: &[Point2]) -> Point2 {
        let n = points.len().max(1) as f64;
        let s = points.iter().fold(Point2::default(), |a, &p| a + p);
        Point2::new(s.x / n, s.y / n)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}
