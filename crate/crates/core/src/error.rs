use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate direction")]
    DegenerateDirection,
    #[error("parallel lines")]
    ParallelLines,
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("invalid command: {0}")]
    InvalidCommand(f64),
    #[error("zero LOS: target coincides with vehicle position")]
    ZeroLos,
    #[error("vehicle inside initiation circle")]
    InsideCircle,
    #[error("heading away from circle")]
    HeadingAway,
    #[error("no feasible initiation geometry: {0}")]
    NoFeasibleGeometry(String),
    #[error("run has no close-range samples")]
    EmptyRun,
    #[error("zero baseline denominator")]
    ZeroBaseline,
    #[error("invalid config: {0}")]
    Config(String),
}
