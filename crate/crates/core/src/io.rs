//! Image and mask files: PNG, binary PPM (P6) and binary PGM (P5).
//!
//! Masks store 0 for background and 255 for foreground; on read any nonzero
//! sample counts as foreground.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder, ImageFormat};

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, Image};

fn is_pnm(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
        Some("ppm" | "pgm" | "pnm")
    )
}

fn open(path: &Path) -> Result<image::DynamicImage> {
    let reader = image::ImageReader::open(path)?.with_guessed_format()?;
    reader.decode().map_err(|e| Error::Format { path: path.to_path_buf(), message: e.to_string() })
}

pub fn read_image(path: &Path) -> Result<Image> {
    let rgb = open(path)?.to_rgb8();
    let (w, h) = rgb.dimensions();
    let pixels = rgb.pixels().map(|p| p.0.map(|c| f64::from(c) / 255.0)).collect();
    Image::new(w as usize, h as usize, pixels)
}

pub fn read_mask(path: &Path) -> Result<BinaryMask> {
    let gray = open(path)?.to_luma8();
    let (w, h) = gray.dimensions();
    BinaryMask::from_vec(w as usize, h as usize, gray.pixels().map(|p| p.0[0] != 0).collect())
}

fn write_bytes(path: &Path, bytes: &[u8], w: usize, h: usize, color: ExtendedColorType) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    if is_pnm(path) {
        let subtype = match color {
            ExtendedColorType::L8 => PnmSubtype::Graymap(SampleEncoding::Binary),
            _ => PnmSubtype::Pixmap(SampleEncoding::Binary),
        };
        PnmEncoder::new(file).with_subtype(subtype).write_image(bytes, w as u32, h as u32, color)?;
    } else {
        let format = ImageFormat::from_path(path).unwrap_or(ImageFormat::Png);
        if format != ImageFormat::Png {
            return Err(Error::Format {
                path: path.to_path_buf(),
                message: "only .png, .ppm and .pgm are supported".into(),
            });
        }
        image::codecs::png::PngEncoder::new(file).write_image(bytes, w as u32, h as u32, color)?;
    }
    Ok(())
}

pub fn write_image(path: &Path, image: &Image) -> Result<()> {
    let bytes: Vec<u8> = image.pixels().iter().flat_map(|p| p.map(|c| (c * 255.0).round() as u8)).collect();
    write_bytes(path, &bytes, image.width(), image.height(), ExtendedColorType::Rgb8)
}

pub fn write_mask(path: &Path, mask: &BinaryMask) -> Result<()> {
    let bytes: Vec<u8> = mask.as_slice().iter().map(|&b| if b { 255 } else { 0 }).collect();
    write_bytes(path, &bytes, mask.width(), mask.height(), ExtendedColorType::L8)
}

/// Writes a `[0, 1]` scalar field as an 8-bit grayscale image.
pub fn write_scalar_map(path: &Path, width: usize, height: usize, values: &[f64]) -> Result<()> {
    let bytes: Vec<u8> = values.iter().map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8).collect();
    write_bytes(path, &bytes, width, height, ExtendedColorType::L8)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_mask_round_trip_is_binary_p5() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.pgm");
        let mask = BinaryMask::from_fn(5, 4, |x, y| (x + y) % 2 == 0);
        write_mask(&path, &mask).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..2], b"P5");
        assert_eq!(bytes.iter().rev().take(20).filter(|&&b| b == 255).count(), 10);
        assert_eq!(read_mask(&path).unwrap(), mask);
    }

    #[test]
    fn png_image_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["a.png", "a.ppm"] {
            let path = dir.path().join(name);
            let img = Image::new(2, 1, vec![[0.0, 1.0, 0.2], [1.0, 0.4, 0.0]]).unwrap();
            write_image(&path, &img).unwrap();
            let back = read_image(&path).unwrap();
            for (a, b) in img.pixels().iter().zip(back.pixels()) {
                for c in 0..3 {
                    assert!((a[c] - b[c]).abs() <= 0.5 / 255.0 + 1e-12);
                }
            }
        }
        let bytes = std::fs::read(dir.path().join("a.ppm")).unwrap();
        assert_eq!(&bytes[..2], b"P6");
    }

    #[test]
    fn unreadable_file_is_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.png");
        std::fs::write(&path, b"not an image").unwrap();
        assert!(read_mask(&path).is_err());
    }
}
