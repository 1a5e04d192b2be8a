//! Reproducible experiment runner for non-Hermitian lattice and quantum-walk sweeps.
//!
//! Every experiment resolves to a [`RunConfig`], runs its sweep points as independent seeded
//! tasks, and produces an [`OutputTable`] that renders to CSV with the resolved configuration
//! echoed in a `#` header.

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod summary;

pub use config::{CoinKind, ConfigInput, Experiment, RunConfig};
pub use error::{RunError, TableError, ValidationError};
pub use output::{Cell, OutputTable};
pub use run::{execute, run, run_with_threads, thread_count};
pub use summary::{summarize, Summary};
