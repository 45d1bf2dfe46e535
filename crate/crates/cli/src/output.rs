//! Output staging. Files are rendered in memory first and only then
//! written, each through a temporary file renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use cpguide::metrics::RunRecord;
use cpguide::path::ReferencePath;
use serde::Serialize;

/// Plot spacing along the reference path, meters.
const PATH_PLOT_STEP: f64 = 0.25;

#[derive(Default)]
pub struct Staged {
    files: Vec<(String, Vec<u8>)>,
}

impl Staged {
    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn add_json(&mut self, name: &str, value: &impl Serialize) -> Result<(), String> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| e.to_string())?;
        bytes.push(b'\n');
        self.add(name, bytes);
        Ok(())
    }

    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>, String> {
        fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, bytes) in self.files {
            let target = dir.join(&name);
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            tmp.write_all(&bytes).map_err(|e| e.to_string())?;
            tmp.persist(&target).map_err(|e| format!("{}: {e}", target.display()))?;
            written.push(target);
        }
        Ok(written)
    }
}

pub fn csv_rows<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| e.to_string())?;
    }
    w.into_inner().map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Xy {
    x: f64,
    y: f64,
}

pub fn trajectory_csv(run: &RunRecord) -> Result<Vec<u8>, String> {
    csv_rows(&run.samples)
}

pub fn trajectory_polyline(run: &RunRecord) -> Result<Vec<u8>, String> {
    csv_rows(run.samples.iter().map(|s| Xy { x: s.x, y: s.y }))
}

pub fn path_polyline(path: &ReferencePath) -> Result<Vec<u8>, String> {
    let n = (path.length() / PATH_PLOT_STEP).ceil().max(1.0) as usize;
    csv_rows((0..=n).map(|k| {
        let p = path.point_at(path.length() * k as f64 / n as f64).position;
        Xy { x: p.x, y: p.y }
    }))
}
