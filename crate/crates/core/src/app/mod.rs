//! Benchmark problems, sweeps, configuration files and output writers.

pub mod config;
pub mod output;
pub mod problems;
pub mod study;

pub use config::{run_file, RunFile};
pub use output::{export_vtk, parse_csv, read_csv, write_csv};
pub use problems::{Cavity, Example1};
pub use study::{run_cavity, run_convergence_study, CavityConfig, DtRule, ErrorSeries, StudyConfig};
