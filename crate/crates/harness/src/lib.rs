//! Configuration files, figure sweeps, result tables and validation suites
//! on top of `fdcran-core`.

pub mod config_file;
pub mod error;
pub mod figures;
pub mod output;
pub mod validate;

pub use config_file::{parse_config, parse_document, render_document, Document, RunSettings};
pub use error::{HarnessError, Result};
pub use figures::{figure_sweep, FigureOptions, Scale};
pub use output::{emit_results, read_results, ResultRow, RowKey};
