use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Candidate;
use crate::error::{Error, Result};
use crate::io::{read_image, read_mask, write_image, write_mask};
use crate::raster::{BinaryMask, Image};
use crate::synth::Scene;

/// Index file of a scene set directory.
pub const SCENES_FILE: &str = "scenes.json";

/// A scene as stored on disk.
#[derive(Clone, Debug)]
pub struct SceneRecord {
    pub name: String,
    pub image: Image,
    pub truth: Option<BinaryMask>,
    pub candidates: Vec<Candidate>,
}

#[derive(Serialize, Deserialize)]
struct CandidateEntry {
    id: String,
    mask: String,
    bbox: [usize; 4],
    score: f64,
}

#[derive(Serialize, Deserialize)]
struct SceneIndex {
    scenes: Vec<String>,
}

fn format_err(path: &Path, message: impl ToString) -> Error {
    Error::Format { path: path.to_path_buf(), message: message.to_string() }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Writes `path` (a JSON list) and one PGM mask per candidate beside it.
pub fn save_candidates(path: &Path, candidates: &[Candidate]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut entries = Vec::with_capacity(candidates.len());
    for (i, c) in candidates.iter().enumerate() {
        let file = format!("candidate_{i:03}.pgm");
        write_mask(&dir.join(&file), &c.mask)?;
        let b = c.bbox;
        entries.push(CandidateEntry { id: c.id.clone(), mask: file, bbox: [b.x, b.y, b.w, b.h], score: c.score });
    }
    write_json(path, &entries)
}

/// Reads a candidate list; mask paths are relative to the JSON file and
/// every bbox must be the tight box of its mask.
pub fn load_candidates(path: &Path) -> Result<Vec<Candidate>> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let text = std::fs::read_to_string(path).map_err(|e| format_err(path, e))?;
    let entries: Vec<CandidateEntry> = serde_json::from_str(&text).map_err(|e| format_err(path, e))?;
    entries
        .into_iter()
        .map(|e| {
            let mask = read_mask(&dir.join(&e.mask))?;
            let c = Candidate::new(e.id, mask, e.score).map_err(|err| format_err(path, err))?;
            let b = c.bbox;
            if [b.x, b.y, b.w, b.h] != e.bbox {
                return Err(format_err(
                    path,
                    format!("candidate {}: bbox {:?} is not the mask's tight box", c.id, e.bbox),
                ));
            }
            Ok(c)
        })
        .collect()
}

/// One directory per scene (`image.ppm`, `truth.pgm`, `candidates.json`)
/// plus an index listing them.
pub fn save_scene_set(dir: &Path, scenes: &[Scene]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut names = Vec::with_capacity(scenes.len());
    for (i, s) in scenes.iter().enumerate() {
        let name = format!("scene_{i:04}");
        let sub = dir.join(&name);
        std::fs::create_dir_all(&sub)?;
        write_image(&sub.join("image.ppm"), &s.image)?;
        write_mask(&sub.join("truth.pgm"), &s.truth)?;
        save_candidates(&sub.join("candidates.json"), &s.candidates)?;
        names.push(name);
    }
    write_json(&dir.join(SCENES_FILE), &SceneIndex { scenes: names })
}

pub fn load_scene(dir: &Path, name: &str) -> Result<SceneRecord> {
    let sub = dir.join(name);
    let image = read_image(&sub.join("image.ppm"))?;
    let truth_path = sub.join("truth.pgm");
    let truth = if truth_path.exists() { Some(read_mask(&truth_path)?) } else { None };
    let candidates = load_candidates(&sub.join("candidates.json"))?;
    Ok(SceneRecord { name: name.to_string(), image, truth, candidates })
}

pub fn load_scene_set(dir: &Path) -> Result<Vec<SceneRecord>> {
    let path = dir.join(SCENES_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| format_err(&path, e))?;
    let index: SceneIndex = serde_json::from_str(&text).map_err(|e| format_err(&path, e))?;
    index.scenes.iter().map(|n| load_scene(dir, n)).collect()
}

impl From<&Scene> for SceneRecord {
    fn from(s: &Scene) -> Self {
        SceneRecord {
            name: String::new(),
            image: s.image.clone(),
            truth: Some(s.truth.clone()),
            candidates: s.candidates.clone(),
        }
    }
}
