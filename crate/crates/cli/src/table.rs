//! Sweep tables. The `a_max` columns hold the largest signed command,
//! matching the published comparison layout; `abs_a_max` holds the
//! largest magnitude.

use std::fmt::Write;

use cpguide::scenario::SweepRow;
use serde::Serialize;

#[derive(Serialize)]
pub struct CsvRow {
    heading_deg: f64,
    baseline_a_rms: Option<f64>,
    baseline_d_rms: Option<f64>,
    baseline_a_max: Option<f64>,
    proposed_a_rms: Option<f64>,
    proposed_d_rms: Option<f64>,
    proposed_a_max: Option<f64>,
    improvement_a_rms: Option<f64>,
    improvement_d_rms: Option<f64>,
    improvement_a_max: Option<f64>,
    baseline_abs_a_max: Option<f64>,
    proposed_abs_a_max: Option<f64>,
    improvement_abs_a_max: Option<f64>,
    error: Option<String>,
}

impl From<&SweepRow> for CsvRow {
    fn from(r: &SweepRow) -> Self {
        let (b, p, i) = (r.baseline, r.proposed, r.improvements);
        CsvRow {
            heading_deg: r.heading_deg,
            baseline_a_rms: b.map(|s| s.a_rms),
            baseline_d_rms: b.map(|s| s.d_rms),
            baseline_a_max: b.map(|s| s.a_peak),
            proposed_a_rms: p.map(|s| s.a_rms),
            proposed_d_rms: p.map(|s| s.d_rms),
            proposed_a_max: p.map(|s| s.a_peak),
            improvement_a_rms: i.map(|s| s.a_rms),
            improvement_d_rms: i.map(|s| s.d_rms),
            improvement_a_max: i.map(|s| s.a_peak),
            baseline_abs_a_max: b.map(|s| s.a_max),
            proposed_abs_a_max: p.map(|s| s.a_max),
            improvement_abs_a_max: i.map(|s| s.a_max),
            error: r.error.clone(),
        }
    }
}

pub fn render(rows: &[SweepRow]) -> String {
    let mut t = String::new();
    let _ = writeln!(
        t,
        "{:<12} | {:^23} | {:^23} | {:^26}",
        "", "baseline", "proposed", "improvement (%)"
    );
    let _ = writeln!(
        t,
        "{:<12} | {:>7} {:>7} {:>7} | {:>7} {:>7} {:>7} | {:>8} {:>8} {:>8}",
        "heading", "a_rms", "d_rms", "a_max", "a_rms", "d_rms", "a_max", "a_rms", "d_rms", "a_max"
    );
    let _ = writeln!(t, "{}", "-".repeat(86));
    for (k, r) in rows.iter().enumerate() {
        let label = format!("a{} {:.3}", k + 1, r.heading_deg);
        match (r.baseline, r.proposed, r.improvements) {
            (Some(b), Some(p), Some(i)) => {
                let _ = writeln!(
                    t,
                    "{label:<12} | {:>7.3} {:>7.3} {:>7.3} | {:>7.3} {:>7.3} {:>7.3} | {:>8.3} {:>8.3} {:>8.3}",
                    b.a_rms, b.d_rms, b.a_peak, p.a_rms, p.d_rms, p.a_peak, i.a_rms, i.d_rms, i.a_peak
                );
            }
            _ => {
                let _ = writeln!(t, "{label:<12} | failed: {}", r.error.as_deref().unwrap_or("unknown"));
            }
        }
    }
    t
}
