mod compare;
mod config;
mod output;
mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cpguide::metrics::{improvements, summarize, summarize_mission, Improvements, PhaseKind, RunRecord, Summary};
use cpguide::oracle::{run_oracles, OracleSettings};
use cpguide::scenario::{sweep, ControllerChoice, ScenarioConfig};
use cpguide::supervisor::{run_mission, Controller};
use cpguide::Error;
use serde::{Deserialize, Serialize};

use output::Staged;

#[derive(Parser)]
#[command(
    name = "cpguide",
    version,
    about = "Look-ahead path-following guidance runs, sweeps and self-checks"
)]
struct Cli {
    /// Worker threads for sweeps and gain searches (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one mission and write its trajectory, plot data and summary.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        controller: Option<ControllerArg>,
    },
    /// Compare baseline and proposed laws over the configured headings.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report metric and trajectory differences between two run directories.
    Compare {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized self-checks of the geometric constructions.
    Oracle {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ControllerArg {
    Baseline,
    Proposed,
    Both,
}

impl From<ControllerArg> for ControllerChoice {
    fn from(c: ControllerArg) -> Self {
        match c {
            ControllerArg::Baseline => ControllerChoice::Baseline,
            ControllerArg::Proposed => ControllerChoice::Proposed,
            ControllerArg::Both => ControllerChoice::Both,
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Infeasible(String),
    Oracle,
    Other(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Other(_) => 1,
            Failure::Config(_) => 2,
            Failure::Infeasible(_) => 3,
            Failure::Oracle => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Config(e.to_string()),
            Error::NoFeasibleGeometry(_) | Error::InsideCircle | Error::HeadingAway => {
                Failure::Infeasible(e.to_string())
            }
            other => Failure::Other(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Run {
            config,
            out,
            controller,
        } => cmd_run(config.as_deref(), out, controller.map(Into::into)),
        Command::Sweep { config, out } => cmd_sweep(config.as_deref(), out),
        Command::Compare { first, second, out } => compare::cmd_compare(&first, &second, out.as_deref()),
        Command::Oracle { seed, out } => cmd_oracle(seed, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Config(m) => eprintln!("config error: {m}"),
                Failure::Infeasible(m) => eprintln!("infeasible geometry: {m}"),
                Failure::Oracle => eprintln!("oracle failure"),
                Failure::Other(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn out_dir(flag: Option<PathBuf>, config: &ScenarioConfig, fallback: &str) -> PathBuf {
    flag.or_else(|| config.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from(fallback))
}

/// One controller's entry in `summary.json`.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunSummary {
    pub controller: Controller,
    /// Metrics over close-range samples; absent when the run never got there.
    pub close_range: Option<Summary>,
    pub mission: Summary,
    pub phases: Vec<PhaseKind>,
    pub steps: usize,
    pub duration: f64,
    pub truncated: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub heading_deg: f64,
    pub runs: Vec<RunSummary>,
    pub improvements: Option<Improvements>,
}

fn summary_line(s: &RunSummary) -> String {
    let mut line = format!("{:<8}", s.controller.as_str());
    match &s.close_range {
        Some(c) => {
            line += &format!(
                " a_rms={:.4} d_rms={:.4} a_max={:.4} a_peak={:.4}",
                c.a_rms, c.d_rms, c.a_max, c.a_peak
            )
        }
        None => line += " (no close-range samples)",
    }
    line += &format!(" steps={} duration={:.2}s", s.steps, s.duration);
    if s.truncated {
        line += " TRUNCATED";
    }
    line
}

fn improvements_line(i: &Improvements) -> String {
    format!(
        "improvement a_rms={:.3}% d_rms={:.3}% a_max={:.3}% a_peak={:.3}%",
        i.a_rms, i.d_rms, i.a_max, i.a_peak
    )
}

#[derive(Serialize)]
struct Diagnostic<'a> {
    error: String,
    controller: &'a str,
    position: [f64; 2],
    heading_deg: f64,
    path_start: [f64; 2],
    path_start_heading_deg: f64,
}

fn cmd_run(
    config_path: Option<&Path>,
    out: Option<PathBuf>,
    controller: Option<ControllerChoice>,
) -> Result<(), Failure> {
    let config = config::load(config_path).map_err(Failure::Config)?;
    let dir = out_dir(out, &config, "out/run");
    let path = config.path.build()?;
    let heading = config.vehicle.heading_deg;
    let initial = config.initial_state(heading);

    let mut staged = Staged::default();
    let mut runs: Vec<(Controller, RunRecord)> = Vec::new();
    for c in controller.unwrap_or(config.guidance.controller).controllers() {
        match run_mission(&path, &config.mission_config(c), initial) {
            Ok(run) => runs.push((c, run)),
            Err(e) => {
                let failure = Failure::from(e.clone());
                if let Failure::Infeasible(_) = failure {
                    let start = path.start();
                    let mut diag = Staged::default();
                    diag.add_json(
                        "diagnostic.json",
                        &Diagnostic {
                            error: e.to_string(),
                            controller: c.as_str(),
                            position: config.vehicle.position,
                            heading_deg: heading,
                            path_start: [start.position.x, start.position.y],
                            path_start_heading_deg: start.tangent.angle().to_degrees(),
                        },
                    )
                    .map_err(Failure::Other)?;
                    diag.commit(&dir).map_err(Failure::Other)?;
                }
                return Err(failure);
            }
        }
    }

    staged.add(
        "path_polyline.csv",
        output::path_polyline(&path).map_err(Failure::Other)?,
    );
    let mut summaries = Vec::new();
    for (c, run) in &runs {
        let name = c.as_str();
        staged.add(
            format!("trajectory_{name}.csv"),
            output::trajectory_csv(run).map_err(Failure::Other)?,
        );
        staged.add(
            format!("trajectory_{name}_polyline.csv"),
            output::trajectory_polyline(run).map_err(Failure::Other)?,
        );
        summaries.push(RunSummary {
            controller: *c,
            close_range: summarize(run).ok(),
            mission: summarize_mission(run)?,
            phases: run.phase_sequence(),
            steps: run.samples.len(),
            duration: run.duration(),
            truncated: run.truncated,
        });
    }
    let imp = match summaries.as_slice() {
        [b, p] => match (&b.close_range, &p.close_range) {
            (Some(b), Some(p)) => improvements(b, p).ok(),
            _ => None,
        },
        _ => None,
    };
    let mut text = String::new();
    for s in &summaries {
        text += &summary_line(s);
        text.push('\n');
    }
    if let Some(i) = &imp {
        text += &improvements_line(i);
        text.push('\n');
    }
    let report = RunReport {
        heading_deg: heading,
        runs: summaries,
        improvements: imp,
    };
    staged.add_json("summary.json", &report).map_err(Failure::Other)?;
    staged.add("summary.txt", text.clone().into_bytes());
    staged.commit(&dir).map_err(Failure::Other)?;
    print!("{text}");
    println!("wrote {}", dir.display());
    Ok(())
}

fn cmd_sweep(config_path: Option<&Path>, out: Option<PathBuf>) -> Result<(), Failure> {
    let config = config::load(config_path).map_err(Failure::Config)?;
    let dir = out_dir(out, &config, "out/sweep");
    let path = config.path.build()?;
    let rows = sweep(&path, &config)?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();

    let mut staged = Staged::default();
    staged.add(
        "sweep.csv",
        output::csv_rows(rows.iter().map(table::CsvRow::from)).map_err(Failure::Other)?,
    );
    let text = table::render(&rows);
    staged.add("sweep.txt", text.clone().into_bytes());
    staged.commit(&dir).map_err(Failure::Other)?;
    print!("{text}");
    println!("wrote {}", dir.display());
    if failed == rows.len() {
        return Err(Failure::Infeasible(format!("all {failed} sweep rows failed")));
    }
    if failed > 0 {
        eprintln!("warning: {failed} of {} sweep rows failed", rows.len());
    }
    Ok(())
}

fn cmd_oracle(seed: u64, out: Option<&Path>) -> Result<(), Failure> {
    let report = run_oracles(&OracleSettings {
        seed,
        ..OracleSettings::default()
    });
    let mut text = format!("oracle seed {seed}\n");
    for c in &report.checks {
        text += &format!(
            "{} {:<55} cases={:<6} failures={} max_residual={:.3e} tolerance={:.1e}\n",
            if c.passed() { "PASS" } else { "FAIL" },
            c.name,
            c.cases,
            c.failures,
            c.max_residual,
            c.tolerance
        );
    }
    if let Some(dir) = out {
        let mut staged = Staged::default();
        staged.add_json("oracle.json", &report).map_err(Failure::Other)?;
        staged.add("oracle.txt", text.clone().into_bytes());
        staged.commit(dir).map_err(Failure::Other)?;
    }
    print!("{text}");
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Oracle)
    }
}
