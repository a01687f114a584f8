use std::path::Path;

use serde::{Deserialize, Serialize};

use super::skeleton::{JOINT_NAMES, NUM_JOINTS};
use crate::error::{Error, Result};
use crate::io::{read_mask, write_mask};
use crate::raster::BinaryMask;
use crate::shape::Point2;

/// A stored training shape: silhouette plus 2D skeleton.
#[derive(Clone, Debug, PartialEq)]
pub struct Exemplar {
    pub id: String,
    pub mask: BinaryMask,
    pub joints: Vec<Point2>,
}

impl Exemplar {
    /// Checks the joint count and that every joint lies within the mask's
    /// bounding box grown by 10% per side.
    pub fn new(id: impl Into<String>, mask: BinaryMask, joints: Vec<Point2>) -> Result<Self> {
        let id = id.into();
        if joints.len() != NUM_JOINTS {
            return Err(Error::Invalid(format!("exemplar {id}: {} joints, expected {NUM_JOINTS}", joints.len())));
        }
        let bb = mask.bbox().ok_or(Error::EmptyMask)?;
        let (mx, my) = (0.1 * bb.w as f64, 0.1 * bb.h as f64);
        let (x0, y0) = (bb.x as f64 - mx - 0.5, bb.y as f64 - my - 0.5);
        let (x1, y1) = ((bb.x + bb.w) as f64 + mx - 0.5, (bb.y + bb.h) as f64 + my - 0.5);
        if let Some(p) = joints.iter().find(|p| !(p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1)) {
            return Err(Error::Invalid(format!("exemplar {id}: joint {p:?} lies outside the mask extent")));
        }
        Ok(Self { id, mask, joints })
    }
}

/// An immutable collection of exemplars.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExemplarLibrary {
    pub exemplars: Vec<Exemplar>,
}

#[derive(Serialize, Deserialize)]
struct IndexFile {
    joint_names: Vec<String>,
    exemplars: Vec<IndexEntry>,
}

#[derive(Serialize, Deserialize)]
struct IndexEntry {
    id: String,
    mask: String,
    joints: Vec<[f64; 2]>,
}

pub const INDEX_FILE: &str = "index.json";

impl ExemplarLibrary {
    pub fn new(exemplars: Vec<Exemplar>) -> Self {
        Self { exemplars }
    }

    pub fn len(&self) -> usize {
        self.exemplars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exemplars.is_empty()
    }

    /// Writes `index.json` and one PGM mask per exemplar into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut entries = Vec::with_capacity(self.len());
        for (i, e) in self.exemplars.iter().enumerate() {
            let file = format!("mask_{i:05}.pgm");
            write_mask(&dir.join(&file), &e.mask)?;
            entries.push(IndexEntry {
                id: e.id.clone(),
                mask: file,
                joints: e.joints.iter().map(|p| [p.x, p.y]).collect(),
            });
        }
        let index = IndexFile { joint_names: JOINT_NAMES.iter().map(|s| s.to_string()).collect(), exemplars: entries };
        let mut text = serde_json::to_string_pretty(&index)?;
        text.push('\n');
        std::fs::write(dir.join(INDEX_FILE), text)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(INDEX_FILE);
        let bad = |message: String| Error::Format { path: path.clone(), message };
        let text = std::fs::read_to_string(&path).map_err(|e| bad(e.to_string()))?;
        let index: IndexFile = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
        if index.joint_names.iter().map(String::as_str).ne(JOINT_NAMES.iter().copied()) {
            return Err(bad(format!("joint order must be {JOINT_NAMES:?}")));
        }
        let mut exemplars = Vec::with_capacity(index.exemplars.len());
        for entry in index.exemplars {
            let mask = read_mask(&dir.join(&entry.mask))?;
            let joints = entry.joints.iter().map(|&[x, y]| Point2::new(x, y)).collect();
            exemplars.push(Exemplar::new(entry.id, mask, joints).map_err(|e| bad(e.to_string()))?);
        }
        Ok(Self { exemplars })
    }
}
