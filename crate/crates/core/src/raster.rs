//! Pixel grids: RGB images and binary masks.

use crate::error::{Error, Result};

/// An RGB image with channel values in `[0, 1]`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    rgb: Vec<[f64; 3]>,
}

impl Image {
    pub fn new(width: usize, height: usize, rgb: Vec<[f64; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Invalid("image must be at least 1x1".into()));
        }
        if rgb.len() != width * height {
            return Err(Error::Invalid(format!("expected {} pixels, found {}", width * height, rgb.len())));
        }
        if let Some(i) = rgb.iter().position(|p| p.iter().any(|c| !(0.0..=1.0).contains(c))) {
            return Err(Error::Invalid(format!("channel value out of [0,1] at pixel {i}")));
        }
        Ok(Self { width, height, rgb })
    }

    pub fn filled(width: usize, height: usize, color: [f64; 3]) -> Result<Self> {
        Self::new(width, height, vec![color; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.rgb.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rgb.is_empty()
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.rgb
    }

    pub fn get(&self, x: usize, y: usize) -> [f64; 3] {
        self.rgb[y * self.width + x]
    }

    /// Sets a pixel, clamping channels into `[0, 1]`.
    pub fn set(&mut self, x: usize, y: usize, color: [f64; 3]) {
        self.rgb[y * self.width + x] = color.map(|c| c.clamp(0.0, 1.0));
    }

    /// Channel mean per pixel.
    pub fn grayscale(&self) -> Vec<f64> {
        self.rgb.iter().map(|p| (p[0] + p[1] + p[2]) / 3.0).collect()
    }
}

/// Axis-aligned pixel rectangle `(x, y, w, h)` with `(x, y)` the top-left pixel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BBox {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl BBox {
    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x && y >= self.y && x < self.x + self.w && y < self.y + self.h
    }

    pub fn diagonal(&self) -> f64 {
        ((self.w * self.w + self.h * self.h) as f64).sqrt()
    }

    /// Grows each side by `frac` of the box's extent along that axis,
    /// clipped to a `width` x `height` canvas.
    pub fn dilate(&self, frac: f64, width: usize, height: usize) -> BBox {
        let dx = (self.w as f64 * frac).ceil() as usize;
        let dy = (self.h as f64 * frac).ceil() as usize;
        let x0 = self.x.saturating_sub(dx);
        let y0 = self.y.saturating_sub(dy);
        let x1 = (self.x + self.w + dx).min(width);
        let y1 = (self.y + self.h + dy).min(height);
        BBox { x: x0, y: y0, w: x1 - x0, h: y1 - y0 }
    }
}

/// A binary labeling of a pixel grid; `true` is foreground.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, data: vec![false; width * height] }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Invalid(format!("expected {} mask entries, found {}", width * height, data.len())));
        }
        Ok(Self { width, height, data })
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.data
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    /// Bounds-checked lookup; anything outside the grid is background.
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.data[y as usize * self.width + x as usize]
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.data[y * self.width + x] = value;
    }

    pub fn at(&self, index: usize) -> bool {
        self.data[index]
    }

    pub fn set_at(&mut self, index: usize, value: bool) {
        self.data[index] = value;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.data.iter().enumerate().filter_map(|(i, &b)| b.then_some(i))
    }

    /// Tight bounding box of the foreground, `None` when empty.
    pub fn bbox(&self) -> Option<BBox> {
        let (mut x0, mut y0, mut x1, mut y1) = (usize::MAX, usize::MAX, 0, 0);
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    x0 = x0.min(x);
                    y0 = y0.min(y);
                    x1 = x1.max(x);
                    y1 = y1.max(y);
                }
            }
        }
        (x0 != usize::MAX).then(|| BBox { x: x0, y: y0, w: x1 - x0 + 1, h: y1 - y0 + 1 })
    }

    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.data.iter().zip(&other.data).all(|(&a, &b)| !a || b)
    }

    pub fn and(&self, other: &BinaryMask) -> BinaryMask {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn or(&self, other: &BinaryMask) -> BinaryMask {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn and_not(&self, other: &BinaryMask) -> BinaryMask {
        self.zip_with(other, |a, b| a && !b)
    }

    fn zip_with(&self, other: &BinaryMask, f: impl Fn(bool, bool) -> bool) -> BinaryMask {
        debug_assert_eq!(self.dims(), other.dims());
        BinaryMask {
            width: self.width,
            height: self.height,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// Morphological dilation with a disk of the given radius.
    pub fn dilate(&self, radius: usize) -> BinaryMask {
        self.morph(radius, true)
    }

    /// Morphological erosion with a disk of the given radius.
    pub fn erode(&self, radius: usize) -> BinaryMask {
        self.morph(radius, false)
    }

    fn morph(&self, radius: usize, dilate: bool) -> BinaryMask {
        let r = radius as i64;
        let offsets: Vec<(i64, i64)> = (-r..=r)
            .flat_map(|dy| (-r..=r).map(move |dx| (dx, dy)))
            .filter(|(dx, dy)| dx * dx + dy * dy <= r * r)
            .collect();
        BinaryMask::from_fn(self.width, self.height, |x, y| {
            let (x, y) = (x as i64, y as i64);
            if dilate {
                offsets.iter().any(|(dx, dy)| self.get_signed(x + dx, y + dy))
            } else {
                offsets.iter().all(|(dx, dy)| self.get_signed(x + dx, y + dy))
            }
        })
    }
}

/// 4-neighbourhood adjacency on a `width`-wide grid.
pub fn are_4_adjacent(width: usize, u: usize, v: usize) -> bool {
    let (ux, uy) = (u % width, u / width);
    let (vx, vy) = (v % width, v / width);
    ux.abs_diff(vx) + uy.abs_diff(vy) == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn image_rejects_out_of_range_channels() {
        assert!(Image::new(1, 1, vec![[0.0, 1.2, 0.0]]).is_err());
        assert!(Image::new(0, 1, vec![]).is_err());
        assert!(Image::new(1, 1, vec![[0.5; 3]]).is_ok());
    }

    #[test]
    fn bbox_is_tight() {
        let mut m = BinaryMask::new(10, 8);
        m.set(2, 3, true);
        m.set(6, 5, true);
        assert_eq!(m.bbox(), Some(BBox { x: 2, y: 3, w: 5, h: 3 }));
        assert_eq!(BinaryMask::new(3, 3).bbox(), None);
    }

    #[test]
    fn dilate_then_erode_single_pixel() {
        let mut m = BinaryMask::new(9, 9);
        m.set(4, 4, true);
        let d = m.dilate(1);
        assert_eq!(d.count(), 5);
        assert_eq!(d.erode(1).count(), 1);
    }

    #[test]
    fn adjacency() {
        assert!(are_4_adjacent(3, 0, 1));
        assert!(are_4_adjacent(3, 0, 3));
        assert!(!are_4_adjacent(3, 2, 3));
        assert!(!are_4_adjacent(3, 0, 4));
    }
}
