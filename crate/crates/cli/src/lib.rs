//! Command-line front end: single solves, parameter sweeps, figure data and
//! oracle verification, with deterministic CSV output.

pub mod error;
pub mod format;
pub mod solve;
pub mod sweep;
pub mod table;

pub use error::CliError;
pub use sweep::{Figure, SweepSpec};
pub use table::{Model, RowRegime, SweepRow, SweepTable};
