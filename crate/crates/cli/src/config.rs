//! TOML scenario loading.

use std::fs;
use std::path::Path;

use cpguide::scenario::{PathSpec, ScenarioConfig};

/// Reads, parses and validates a scenario. Polyline files are resolved
/// relative to the config file.
pub fn load(path: Option<&Path>) -> Result<ScenarioConfig, String> {
    let mut config = match path {
        None => ScenarioConfig::default(),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            toml::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))?
        }
    };
    if let PathSpec::Polyline {
        points,
        file: Some(file),
    } = &mut config.path
    {
        let base = path.and_then(Path::parent).unwrap_or(Path::new("."));
        let resolved = base.join(&*file);
        *points = read_points(&resolved)?;
        *file = resolved;
    }
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

/// Two-column `x,y` samples; a header row is optional.
fn read_points(path: &Path) -> Result<Vec<[f64; 2]>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let mut points = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format!("{}: {e}", path.display()))?;
        let parsed: Option<Vec<f64>> = record.iter().map(|f| f.parse().ok()).collect();
        match parsed.as_deref() {
            Some([x, y]) => points.push([*x, *y]),
            None if line == 0 => continue,
            _ => return Err(format!("{}: row {} is not an x,y pair", path.display(), line + 1)),
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn polyline_file_is_resolved_relative_to_config() {
        let dir = tempfile::tempdir().unwrap();
        let mut pts = fs::File::create(dir.path().join("pts.csv")).unwrap();
        writeln!(pts, "x,y").unwrap();
        for k in 0..20 {
            writeln!(pts, "{},{}", k as f64 * 5.0, (k as f64 * 0.3).sin() * 4.0).unwrap();
        }
        let cfg = dir.path().join("s.toml");
        fs::write(&cfg, "[path]\nkind = \"polyline\"\nfile = \"pts.csv\"\n").unwrap();
        let config = load(Some(&cfg)).unwrap();
        match config.path {
            PathSpec::Polyline { points, .. } => assert_eq!(points.len(), 20),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("s.toml");
        fs::write(&cfg, "[vehicle]\nspeeed = 5.0\n").unwrap();
        assert!(load(Some(&cfg)).unwrap_err().contains("speeed"));
    }
}
