use super::Point2;
use crate::error::{Error, Result};

/// Parameters of a 5-DOF transform `T(t) · R(θ) · diag(sx, sy)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformParams {
    pub theta: f64,
    pub sx: f64,
    pub sy: f64,
    pub tx: f64,
    pub ty: f64,
}

/// Homogeneous 2D transform with the residual of the fit that produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transform2D {
    pub matrix: [[f64; 3]; 3],
    /// Mean squared residual in pixels²; zero for constructed transforms.
    pub error: f64,
}

impl Default for Transform2D {
    fn default() -> Self {
        Self::identity()
    }
}

impl Transform2D {
    pub fn identity() -> Self {
        Self::from_linear([[1.0, 0.0], [0.0, 1.0]], 0.0, 0.0)
    }

    pub fn from_linear(l: [[f64; 2]; 2], tx: f64, ty: f64) -> Self {
        Self { matrix: [[l[0][0], l[0][1], tx], [l[1][0], l[1][1], ty], [0.0, 0.0, 1.0]], error: 0.0 }
    }

    pub fn translation(tx: f64, ty: f64) -> Self {
        Self::from_linear([[1.0, 0.0], [0.0, 1.0]], tx, ty)
    }

    pub fn from_params(p: TransformParams) -> Self {
        let (s, c) = p.theta.sin_cos();
        Self::from_linear([[c * p.sx, -s * p.sy], [s * p.sx, c * p.sy]], p.tx, p.ty)
    }

    pub fn similarity(theta: f64, scale: f64, tx: f64, ty: f64) -> Self {
        Self::from_params(TransformParams { theta, sx: scale, sy: scale, tx, ty })
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        let m = &self.matrix;
        let w = m[2][0] * p.x + m[2][1] * p.y + m[2][2];
        Point2::new((m[0][0] * p.x + m[0][1] * p.y + m[0][2]) / w, (m[1][0] * p.x + m[1][1] * p.y + m[1][2]) / w)
    }

    /// `self · other`: applies `other` first.
    pub fn compose(&self, other: &Transform2D) -> Transform2D {
        let (a, b) = (&self.matrix, &other.matrix);
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        Transform2D { matrix: m, error: 0.0 }
    }

    /// Determinant of the linear part.
    pub fn det(&self) -> f64 {
        let m = &self.matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn inverse(&self) -> Result<Transform2D> {
        let d = self.det();
        if d.abs() <= 1e-12 {
            return Err(Error::SingularTransform(d));
        }
        let m = &self.matrix;
        let l = [[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]];
        let tx = -(l[0][0] * m[0][2] + l[0][1] * m[1][2]);
        let ty = -(l[1][0] * m[0][2] + l[1][1] * m[1][2]);
        Ok(Transform2D::from_linear(l, tx, ty))
    }

    /// Splits into rotation, signed scales and translation. `None` when the
    /// linear part has shear or the bottom row is not `(0, 0, 1)`.
    pub fn decompose(&self) -> Option<TransformParams> {
        let m = &self.matrix;
        if m[2] != [0.0, 0.0, 1.0] {
            return None;
        }
        let (c0, c1) = ((m[0][0], m[1][0]), (m[0][1], m[1][1]));
        let n0 = c0.0.hypot(c0.1);
        let n1 = c1.0.hypot(c1.1);
        if n0 == 0.0 || (c0.0 * c1.0 + c0.1 * c1.1).abs() > 1e-9 * n0 * n1.max(1.0) {
            return None;
        }
        let theta = c0.1.atan2(c0.0);
        let (s, c) = theta.sin_cos();
        Some(TransformParams { theta, sx: n0, sy: -s * c1.0 + c * c1.1, tx: m[0][2], ty: m[1][2] })
    }
}

/// Least-squares 5-DOF fit mapping `src[k.0]` onto `dst[k.1]` for every pair.
///
/// Translation and both scales are profiled out in closed form, which leaves
/// a quadratic form in `(cos θ, sin θ)`; its top eigenvector is the optimal
/// rotation. Scales are signed, so reflections come out naturally.
pub fn procrustes_fit(src: &[Point2], dst: &[Point2], pairs: &[(usize, usize)]) -> Result<Transform2D> {
    if pairs.len() <= 2 {
        return Err(Error::InsufficientCorrespondences(pairs.len()));
    }
    let n = pairs.len() as f64;
    let q: Vec<Point2> = pairs.iter().map(|&(i, _)| src[i]).collect();
    let p: Vec<Point2> = pairs.iter().map(|&(_, j)| dst[j]).collect();
    let (qm, pm) = (Point2::centroid(&q), Point2::centroid(&p));

    let (mut qx, mut qy) = (0.0, 0.0);
    let (mut u1, mut u2, mut v1, mut v2) = (0.0, 0.0, 0.0, 0.0);
    for (a, b) in q.iter().zip(&p) {
        let (a, b) = (*a - qm, *b - pm);
        qx += a.x * a.x;
        qy += a.y * a.y;
        u1 += b.x * a.x;
        u2 += b.y * a.x;
        v1 += b.x * a.y;
        v2 += b.y * a.y;
    }
    let scale = qx + qy;
    if scale <= 1e-12 {
        return Err(Error::SingularTransform(scale));
    }
    let tiny = 1e-12 * scale;
    // objective F(θ) = (c u1 + s u2)²/qx + (c v2 − s v1)²/qy
    let mut m = [0.0; 3];
    if qx > tiny {
        m[0] += u1 * u1 / qx;
        m[1] += u1 * u2 / qx;
        m[2] += u2 * u2 / qx;
    }
    if qy > tiny {
        m[0] += v2 * v2 / qy;
        m[1] -= v2 * v1 / qy;
        m[2] += v1 * v1 / qy;
    }
    let theta = 0.5 * (2.0 * m[1]).atan2(m[0] - m[2]);
    let (s, c) = theta.sin_cos();
    let fit_x = (qx > tiny).then(|| (c * u1 + s * u2) / qx);
    let fit_y = (qy > tiny).then(|| (c * v2 - s * v1) / qy);
    // a collinear source leaves one scale free; tie it to the other
    let (sx, sy) = match (fit_x, fit_y) {
        (Some(x), Some(y)) => (x, y),
        (Some(x), None) => (x, x),
        (None, Some(y)) => (y, y),
        (None, None) => unreachable!("scale > 0"),
    };
    let lin = Transform2D::from_params(TransformParams { theta, sx, sy, tx: 0.0, ty: 0.0 });
    let moved = lin.apply(qm);
    let mut w = Transform2D::from_params(TransformParams { theta, sx, sy, tx: pm.x - moved.x, ty: pm.y - moved.y });
    w.error = q.iter().zip(&p).map(|(&a, &b)| (b - w.apply(a)).norm_sq()).sum::<f64>() / n;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud(n: usize, seed: u64) -> Vec<Point2> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Point2::new(rng.random_range(-30.0..30.0), rng.random_range(-50.0..50.0))).collect()
    }

    fn ident(n: usize) -> Vec<(usize, usize)> {
        (0..n).map(|i| (i, i)).collect()
    }

    /// Independent oracle: grid over θ with per-θ least squares, then local refinement.
    fn brute_error(src: &[Point2], dst: &[Point2]) -> f64 {
        let err_at = |theta: f64| {
            let (s, c) = f64::sin_cos(theta);
            // rotate dst back, then fit axis-aligned scale + offset per coordinate
            let r: Vec<Point2> = dst.iter().map(|p| Point2::new(c * p.x + s * p.y, -s * p.x + c * p.y)).collect();
            let fit1 = |a: &dyn Fn(usize) -> f64, b: &dyn Fn(usize) -> f64| {
                let n = src.len() as f64;
                let (ma, mb) = ((0..src.len()).map(a).sum::<f64>() / n, (0..src.len()).map(b).sum::<f64>() / n);
                let sab: f64 = (0..src.len()).map(|i| (a(i) - ma) * (b(i) - mb)).sum();
                let saa: f64 = (0..src.len()).map(|i| (a(i) - ma).powi(2)).sum();
                let sbb: f64 = (0..src.len()).map(|i| (b(i) - mb).powi(2)).sum();
                sbb - sab * sab / saa
            };
            (fit1(&|i| src[i].x, &|i| r[i].x) + fit1(&|i| src[i].y, &|i| r[i].y)) / src.len() as f64
        };
        let mut best = (0.0, f64::INFINITY);
        for k in 0..3600 {
            let t = k as f64 * std::f64::consts::TAU / 3600.0;
            let e = err_at(t);
            if e < best.1 {
                best = (t, e);
            }
        }
        let (mut lo, mut hi) = (best.0 - 0.002, best.0 + 0.002);
        for _ in 0..100 {
            let (a, b) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
            if err_at(a) < err_at(b) {
                hi = b
            } else {
                lo = a
            }
        }
        err_at(0.5 * (lo + hi))
    }

    #[test]
    fn identity_fit() {
        let p = cloud(20, 1);
        let w = procrustes_fit(&p, &p, &ident(20)).unwrap();
        assert!(w.error < 1e-20);
        for (a, b) in w.matrix.iter().flatten().zip(Transform2D::identity().matrix.iter().flatten()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn recovers_known_parameters() {
        let truth = TransformParams { theta: 30f64.to_radians(), sx: 1.5, sy: 0.8, tx: 10.0, ty: -3.0 };
        let t = Transform2D::from_params(truth);
        let src = cloud(40, 2);
        let dst: Vec<Point2> = src.iter().map(|&p| t.apply(p)).collect();
        let w = procrustes_fit(&src, &dst, &ident(40)).unwrap();
        let rms = (src.iter().zip(&dst).map(|(&a, &b)| (w.apply(a) - b).norm_sq()).sum::<f64>() / 40.0).sqrt();
        assert!(rms < 1e-6, "{rms}");
        let got = w.decompose().unwrap();
        // (θ, sx, sy) and (θ+π, −sx, −sy) are the same map
        let (theta, sx, sy) = if got.sx < 0.0 {
            (got.theta + std::f64::consts::PI, -got.sx, -got.sy)
        } else {
            (got.theta, got.sx, got.sy)
        };
        assert!((theta - truth.theta).abs() < 1e-9);
        assert!((sx - 1.5).abs() < 1e-9 && (sy - 0.8).abs() < 1e-9);
        assert!((got.tx - 10.0).abs() < 1e-9 && (got.ty + 3.0).abs() < 1e-9);
    }

    #[test]
    fn mirror_has_negative_determinant() {
        let src = cloud(30, 3);
        let dst: Vec<Point2> = src.iter().map(|p| Point2::new(-p.x + 4.0, p.y)).collect();
        let w = procrustes_fit(&src, &dst, &ident(30)).unwrap();
        assert!(w.det() < 0.0);
        assert!(w.error < 1e-6);
    }

    #[test]
    fn needs_three_pairs() {
        let p = cloud(5, 4);
        assert!(matches!(procrustes_fit(&p, &p, &ident(2)), Err(Error::InsufficientCorrespondences(2))));
    }

    #[test]
    fn collinear_source_is_handled() {
        let src: Vec<Point2> = (0..6).map(|i| Point2::new(3.0, i as f64)).collect();
        let dst: Vec<Point2> = src.iter().map(|p| Point2::new(p.x + 1.0, 2.0 * p.y)).collect();
        let w = procrustes_fit(&src, &dst, &ident(6)).unwrap();
        assert!(w.error < 1e-18);
    }

    #[test]
    fn composition_and_inverse() {
        let a = Transform2D::from_params(TransformParams { theta: 0.3, sx: 2.0, sy: -0.5, tx: 1.0, ty: 2.0 });
        let b = Transform2D::from_params(TransformParams { theta: -1.1, sx: 0.7, sy: 1.3, tx: -4.0, ty: 0.5 });
        let p = Point2::new(3.5, -7.25);
        let q = a.compose(&b).apply(p);
        let r = a.apply(b.apply(p));
        assert!((q - r).norm() < 1e-9);
        let back = a.inverse().unwrap().apply(a.apply(p));
        assert!((back - p).norm() < 1e-12);
        assert!(matches!(
            Transform2D::from_linear([[1.0, 2.0], [2.0, 4.0]], 0.0, 0.0).inverse(),
            Err(Error::SingularTransform(_))
        ));
        let sheared = Transform2D::from_linear([[1.0, 0.5], [0.0, 1.0]], 0.0, 0.0);
        assert!(sheared.decompose().is_none());
    }

    #[test]
    fn matches_brute_force_on_noisy_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for case in 0..20 {
            let src = cloud(25, 100 + case);
            let dst: Vec<Point2> = src
                .iter()
                .map(|p| {
                    Point2::new(
                        0.9 * p.y - 0.4 * p.x + rng.random_range(-3.0..3.0),
                        1.2 * p.x + rng.random_range(-3.0..3.0),
                    )
                })
                .collect();
            let w = procrustes_fit(&src, &dst, &ident(25)).unwrap();
            let oracle = brute_error(&src, &dst);
            assert!(w.error <= oracle + 1e-6, "case {case}: {} vs {}", w.error, oracle);
            assert!(w.error >= oracle - 1e-3, "case {case}: {} vs {}", w.error, oracle);
            assert!(w.decompose().is_some());
        }
    }

    proptest! {
        #[test]
        fn exact_images_fit_exactly(
            theta in -3.1f64..3.1, sx in prop::sample::select(vec![-2.0, -0.6, 0.5, 1.0, 1.7]),
            sy in prop::sample::select(vec![-1.4, -0.8, 0.4, 1.0, 2.2]),
            tx in -50.0f64..50.0, ty in -50.0f64..50.0, seed in 0u64..1000, drop in 0usize..10,
        ) {
            let t = Transform2D::from_params(TransformParams { theta, sx, sy, tx, ty });
            let src = cloud(15, seed);
            let dst: Vec<Point2> = src.iter().map(|&p| t.apply(p)).collect();
            let full = procrustes_fit(&src, &dst, &ident(15)).unwrap();
            let part = procrustes_fit(&src, &dst, &ident(15 - drop)).unwrap();
            prop_assert!(full.error <= 1e-9);
            prop_assert!(part.error <= full.error + 1e-9);
        }
    }
}
