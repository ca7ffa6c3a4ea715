//! Convergence tables as CSV, markdown and log-log plot data.

use std::fmt::Write as _;
use std::path::Path;

use super::config::ReportFormat;
use crate::analysis::ConvergenceRow;
use crate::error::Result;

/// Column title for the error in `H^s`.
pub fn norm_label(s: f64) -> String {
    if s == 0.0 {
        return "L2-norm".into();
    }
    let frac = if (s * 2.0).fract() == 0.0 && s.fract() != 0.0 {
        format!("{}/2", (s * 2.0) as i64)
    } else {
        format!("{s}")
    };
    format!("H^{{{frac}}}-norm")
}

fn fmt_error(e: f64) -> String {
    if e >= 1e-3 {
        format!("{e:.9}")
    } else {
        format!("{e:.6e}")
    }
}

/// Renders rows with the columns `N, h_X, <norm>, EOC`.
pub fn emit_report(rows: &[ConvergenceRow], s: f64, format: ReportFormat) -> String {
    let label = norm_label(s);
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            let _ = writeln!(out, "N,h_X,{label},EOC");
            for r in rows {
                let eoc = r.eoc.map(|v| format!("{v:.3}")).unwrap_or_default();
                let _ = writeln!(out, "{},{:.5},{:.9e},{eoc}", r.n, r.h_x, r.error);
            }
        }
        ReportFormat::Markdown => {
            let _ = writeln!(out, "| N | h_X | {label} | EOC |");
            let _ = writeln!(out, "|---:|---:|---:|---:|");
            for r in rows {
                let eoc = r.eoc.map(|v| format!("{v:.3}")).unwrap_or_default();
                let _ = writeln!(out, "| {} | {:.5} | {} | {eoc} |", r.n, r.h_x, fmt_error(r.error));
            }
        }
        ReportFormat::Plot => {
            let _ = writeln!(out, "# log(h_X) log({label})");
            for r in rows {
                let _ = writeln!(out, "{:.12e} {:.12e}", r.h_x.ln(), r.error.ln());
            }
        }
    }
    out
}

/// Writes the table to `path` and the plot data next to it (`.dat`).
pub fn write_report(path: &Path, rows: &[ConvergenceRow], s: f64, format: ReportFormat) -> Result<()> {
    std::fs::write(path, emit_report(rows, s, format))?;
    if format != ReportFormat::Plot {
        std::fs::write(path.with_extension("dat"), emit_report(rows, s, ReportFormat::Plot))?;
    }
    Ok(())
}
