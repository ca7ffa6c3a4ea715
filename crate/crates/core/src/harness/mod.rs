//! Experiment orchestration: configuration, convergence studies, probes and reports.

pub mod config;
pub mod probe;
pub mod report;
pub mod study;

pub use config::{PointGenerator, ReportFormat, StudyConfig, DEFAULT_LADDER};
pub use probe::{run_probe_suite, spd_probe, ProbeResult, ProbeSummary};
pub use report::{emit_report, norm_label, write_report};
pub use study::{
    build_shape, build_symbol, laplace_kernel_recovery, run_convergence_study, solve_row, solve_row_full,
    RowDiagnostics, RowOutcome, RowSolution, StudyReport, StudySetup,
};
