use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;

use crate::error::{Error, Result};
use crate::maf::{Exemplar, BONES, NUM_JOINTS};
use crate::raster::BinaryMask;
use crate::shape::Point2;

/// Number of bones; indices follow [`BONES`].
pub const NUM_BONES: usize = 14;

/// Bone lengths in head units, in [`BONES`] order.
pub const CANONICAL_LENGTHS: [f64; NUM_BONES] = [1.0, 3.0, 1.0, 1.0, 2.0, 2.0, 2.0, 2.0, 0.6, 0.6, 2.0, 2.0, 2.0, 2.0];

/// Capsule widths in head units.
pub const CANONICAL_WIDTHS: [f64; NUM_BONES] =
    [1.0, 1.8, 0.8, 0.8, 0.7, 0.7, 0.55, 0.55, 0.9, 0.9, 0.85, 0.85, 0.65, 0.65];

const DEG: f64 = PI / 180.0;

/// Largest |angle| per bone: head, torso and girdle bones barely move,
/// shoulders and hips ±60°, elbows and knees ±90°.
pub const ARTICULATION: [f64; NUM_BONES] = [
    20.0 * DEG,
    15.0 * DEG,
    10.0 * DEG,
    10.0 * DEG,
    60.0 * DEG,
    60.0 * DEG,
    90.0 * DEG,
    90.0 * DEG,
    10.0 * DEG,
    10.0 * DEG,
    60.0 * DEG,
    60.0 * DEG,
    90.0 * DEG,
    90.0 * DEG,
];

// rest spread of the upper arms and thighs away from the body axis
const ARM_SPREAD: f64 = 0.35;
const LEG_SPREAD: f64 = 0.1;

/// A stick figure: per-bone angles relative to the rest pose, bone lengths
/// and capsule widths in pixels before `scale`, and a global placement of
/// the pelvis.
#[derive(Clone, Debug, PartialEq)]
pub struct FigureSpec {
    pub angles: [f64; NUM_BONES],
    pub lengths: [f64; NUM_BONES],
    pub widths: [f64; NUM_BONES],
    pub position: Point2,
    pub rotation: f64,
    pub scale: f64,
}

impl FigureSpec {
    /// Rest pose with `unit` pixels per head unit.
    pub fn canonical(unit: f64, position: Point2) -> Self {
        Self {
            angles: [0.0; NUM_BONES],
            lengths: CANONICAL_LENGTHS.map(|l| l * unit),
            widths: CANONICAL_WIDTHS.map(|w| w * unit),
            position,
            rotation: 0.0,
            scale: 1.0,
        }
    }

    /// Canonical proportions with angles drawn uniformly from [`ARTICULATION`].
    pub fn random_pose<R: Rng>(rng: &mut R, unit: f64, position: Point2) -> Self {
        let mut spec = Self::canonical(unit, position);
        for (a, r) in spec.angles.iter_mut().zip(ARTICULATION) {
            *a = rng.random_range(-r..=r);
        }
        spec
    }

    pub fn validate(&self) -> Result<()> {
        if self.lengths.iter().chain(&self.widths).any(|&v| !(v > 0.0)) || !(self.scale > 0.0) {
            return Err(Error::Invalid("figure lengths, widths and scale must be positive".into()));
        }
        if self.angles.iter().zip(ARTICULATION).any(|(a, r)| a.abs() > r + 1e-12) {
            return Err(Error::Invalid("figure angle outside its articulation range".into()));
        }
        Ok(())
    }

    /// Joint positions in canvas pixels, in joint order.
    pub fn joints(&self) -> Vec<Point2> {
        let a = &self.angles;
        let l: Vec<f64> = self.lengths.iter().map(|v| v * self.scale).collect();
        let dir = |phi: f64| Point2::new(phi.cos(), phi.sin());
        let mut j = vec![Point2::default(); NUM_JOINTS];
        let torso = -FRAC_PI_2 + self.rotation + a[1];
        j[2] = self.position;
        j[1] = j[2] + dir(torso) * l[1];
        j[0] = j[1] + dir(torso + a[0]) * l[0];
        j[3] = j[1] + dir(torso - FRAC_PI_2 + a[2]) * l[2];
        j[4] = j[1] + dir(torso + FRAC_PI_2 + a[3]) * l[3];
        let (ul, ur) = (torso + PI + ARM_SPREAD + a[4], torso + PI - ARM_SPREAD + a[5]);
        j[5] = j[3] + dir(ul) * l[4];
        j[6] = j[4] + dir(ur) * l[5];
        j[7] = j[5] + dir(ul + a[6]) * l[6];
        j[8] = j[6] + dir(ur + a[7]) * l[7];
        j[9] = j[2] + dir(torso - FRAC_PI_2 + a[8]) * l[8];
        j[10] = j[2] + dir(torso + FRAC_PI_2 + a[9]) * l[9];
        let (tl, tr) = (torso + PI + LEG_SPREAD + a[10], torso + PI - LEG_SPREAD + a[11]);
        j[11] = j[9] + dir(tl) * l[10];
        j[12] = j[10] + dir(tr) * l[11];
        j[13] = j[11] + dir(tl + a[12]) * l[12];
        j[14] = j[12] + dir(tr + a[13]) * l[13];
        j
    }

    /// Union of round-capped capsules along every bone.
    pub fn silhouette(&self, width: usize, height: usize) -> BinaryMask {
        let joints = self.joints();
        let mut mask = BinaryMask::new(width, height);
        for (b, &(p, c)) in BONES.iter().enumerate() {
            draw_capsule(&mut mask, joints[p], joints[c], 0.5 * self.widths[b] * self.scale);
        }
        mask
    }
}

fn draw_capsule(mask: &mut BinaryMask, a: Point2, b: Point2, radius: f64) {
    let (w, h) = mask.dims();
    let lo = |u: f64, v: f64| (u.min(v) - radius).floor().max(0.0) as usize;
    let hi = |u: f64, v: f64, n: usize| ((u.max(v) + radius).ceil().max(-1.0) + 1.0).min(n as f64) as usize;
    let ab = b - a;
    let len2 = ab.norm_sq();
    for y in lo(a.y, b.y)..hi(a.y, b.y, h) {
        for x in lo(a.x, b.x)..hi(a.x, b.x, w) {
            let p = Point2::new(x as f64, y as f64);
            let t = if len2 > 0.0 { ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2 } else { 0.0 };
            let q = a + ab * t.clamp(0.0, 1.0);
            if (p - q).norm_sq() <= radius * radius {
                mask.set(x, y, true);
            }
        }
    }
}

/// Renders a figure as an exemplar on a `width × height` canvas.
pub fn gen_figure(spec: &FigureSpec, width: usize, height: usize, id: impl Into<String>) -> Result<Exemplar> {
    spec.validate()?;
    let mask = spec.silhouette(width, height);
    if mask.count() == 0 {
        return Err(Error::EmptyMask);
    }
    Exemplar::new(id, mask, spec.joints())
}
