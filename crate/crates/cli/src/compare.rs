//! Differences between two `run` output directories.

use std::collections::BTreeSet;
use std::fmt::Write;
use std::fs;
use std::path::Path;

use cpguide::metrics::{Sample, Summary};

use crate::output::Staged;
use crate::{Failure, RunReport};

fn read_report(dir: &Path) -> Result<RunReport, Failure> {
    let file = dir.join("summary.json");
    let text = fs::read_to_string(&file).map_err(|e| Failure::Config(format!("{}: {e}", file.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", file.display())))
}

fn trajectories(dir: &Path) -> Result<BTreeSet<String>, Failure> {
    let entries = fs::read_dir(dir).map_err(|e| Failure::Config(format!("{}: {e}", dir.display())))?;
    Ok(entries
        .filter_map(|e| e.ok()?.file_name().into_string().ok())
        .filter(|n| n.starts_with("trajectory_") && n.ends_with(".csv") && !n.ends_with("_polyline.csv"))
        .collect())
}

fn read_samples(file: &Path) -> Result<Vec<Sample>, Failure> {
    let mut r = csv::Reader::from_path(file).map_err(|e| Failure::Other(format!("{}: {e}", file.display())))?;
    r.deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::Other(format!("{}: {e}", file.display())))
}

fn metric_diff(out: &mut String, label: &str, a: &Summary, b: &Summary) {
    let _ = writeln!(
        out,
        "  {label:<11} a_rms {:+.6}  d_rms {:+.6}  a_max {:+.6}  a_peak {:+.6}",
        b.a_rms - a.a_rms,
        b.d_rms - a.d_rms,
        b.a_max - a.a_max,
        b.a_peak - a.a_peak
    );
}

fn trajectory_diff(out: &mut String, name: &str, first: &Path, second: &Path) -> Result<(), Failure> {
    let (fa, fb) = (first.join(name), second.join(name));
    let bytes = |p: &Path| fs::read(p).map_err(|e| Failure::Other(format!("{}: {e}", p.display())));
    if bytes(&fa)? == bytes(&fb)? {
        let _ = writeln!(out, "{name}: identical");
        return Ok(());
    }
    let (a, b) = (read_samples(&fa)?, read_samples(&fb)?);
    let cols = |s: &Sample| [s.t, s.x, s.y, s.psi, s.a_cmd, s.cte, s.k1, s.k2];
    let mut worst = [0.0f64; 8];
    let mut phase_mismatch = 0;
    for (sa, sb) in a.iter().zip(&b) {
        for (w, (x, y)) in worst.iter_mut().zip(cols(sa).into_iter().zip(cols(sb))) {
            *w = w.max((x - y).abs());
        }
        phase_mismatch += usize::from(sa.phase != sb.phase);
    }
    let _ = writeln!(
        out,
        "{name}: differs ({} vs {} rows, {phase_mismatch} phase mismatches)",
        a.len(),
        b.len()
    );
    let names = ["t", "x", "y", "psi", "a_cmd", "cte", "k1", "k2"];
    let cells: Vec<String> = names.iter().zip(worst).map(|(n, w)| format!("{n} {w:.3e}")).collect();
    let _ = writeln!(out, "  max |diff| over common rows: {}", cells.join(", "));
    Ok(())
}

pub fn cmd_compare(first: &Path, second: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let (ra, rb) = (read_report(first)?, read_report(second)?);
    let mut text = format!("compare {} -> {}\n", first.display(), second.display());
    if ra.heading_deg != rb.heading_deg {
        let _ = writeln!(text, "initial heading {} vs {}", ra.heading_deg, rb.heading_deg);
    }
    for a in &ra.runs {
        let Some(b) = rb.runs.iter().find(|b| b.controller == a.controller) else {
            let _ = writeln!(text, "{}: only in first", a.controller.as_str());
            continue;
        };
        let _ = writeln!(
            text,
            "{}: steps {} -> {}, duration {:.2} -> {:.2} s",
            a.controller.as_str(),
            a.steps,
            b.steps,
            a.duration,
            b.duration
        );
        if let (Some(x), Some(y)) = (&a.close_range, &b.close_range) {
            metric_diff(&mut text, "close-range", x, y);
        }
        metric_diff(&mut text, "mission", &a.mission, &b.mission);
    }
    for b in rb
        .runs
        .iter()
        .filter(|b| !ra.runs.iter().any(|a| a.controller == b.controller))
    {
        let _ = writeln!(text, "{}: only in second", b.controller.as_str());
    }
    let (ta, tb) = (trajectories(first)?, trajectories(second)?);
    for name in ta.intersection(&tb) {
        trajectory_diff(&mut text, name, first, second)?;
    }
    if let Some(dir) = out {
        let mut staged = Staged::default();
        staged.add("compare.txt", text.clone().into_bytes());
        staged.commit(dir).map_err(Failure::Other)?;
    }
    print!("{text}");
    Ok(())
}
