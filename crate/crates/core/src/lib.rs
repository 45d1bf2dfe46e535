//! Look-ahead path-following guidance for a constant-speed planar vehicle.

pub mod error;
pub mod geom;
pub mod guidance;
pub mod metrics;
pub mod midcourse;
pub mod optimizer;
pub mod oracle;
pub mod path;
pub mod scenario;
pub mod supervisor;
pub mod vehicle;

pub use error::{Error, Result};
