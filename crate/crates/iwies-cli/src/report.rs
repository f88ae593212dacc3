//! CSV and summary emission.
//!
//! The per-generation CSV holds only deterministic columns, so re-running a
//! configuration reproduces byte-identical files; wall-clock timings live in
//! the summary alone.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use iwies::engine::{GenerationReport, Method};
use iwies::error::Result;
use iwies::Real;

pub const CSV_HEADER: &str =
    "run_id,method,phase,generation,unperturbed_return,mean_fitness,rho,weight_min,weight_max";

/// One per-generation CSV row.
#[derive(Debug, Clone)]
pub struct CsvRow {
    pub run_id: usize,
    pub method: Method,
    pub phase: usize,
    pub generation: usize,
    pub unperturbed_return: Real,
    pub mean_fitness: Real,
    pub rho: Real,
    pub weight_min: Real,
    pub weight_max: Real,
}

impl CsvRow {
    pub fn from_report(
        run_id: usize,
        method: Method,
        phase: usize,
        report: &GenerationReport<Real>,
    ) -> Self {
        Self {
            run_id,
            method,
            phase,
            generation: report.generation,
            unperturbed_return: report.unperturbed_return,
            mean_fitness: report.mean_fitness,
            rho: report.rho,
            weight_min: report.weight_min,
            weight_max: report.weight_max,
        }
    }
}

/// Render rows to CSV text (header + one line per row).
pub fn render_csv(rows: &[CsvRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 64 + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.run_id,
            r.method.tag(),
            r.phase,
            r.generation,
            r.unperturbed_return,
            r.mean_fitness,
            r.rho,
            r.weight_min,
            r.weight_max
        )
        .expect("write to string");
    }
    out
}

pub fn write_csv(path: &Path, rows: &[CsvRow]) -> Result<()> {
    fs::write(path, render_csv(rows))?;
    Ok(())
}

/// Aggregate statistics for one method across runs.
#[derive(Debug, Clone)]
pub struct MethodSummary {
    pub method: Method,
    /// Mean over runs of the adaptation-phase average return.
    pub mean_average_return: Real,
    /// Standard error of the average return (sample std / sqrt(runs)).
    pub std_error: Real,
    /// Mean generation-0 return of the first adaptation phase.
    pub mean_jumpstart_return: Real,
    pub jumpstart_std_error: Real,
    pub wall_seconds: f64,
}

/// Experiment-level summary across all methods.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub runs: usize,
    pub methods: Vec<MethodSummary>,
}

impl RunSummary {
    pub fn get(&self, method: Method) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method == method)
    }

    /// Human-readable table.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:<10} {:>16} {:>10} {:>16} {:>10} {:>10}",
            "method", "avg_return", "stderr", "jumpstart", "stderr", "wall_s"
        )
        .unwrap();
        for m in &self.methods {
            writeln!(
                out,
                "{:<10} {:>16.4} {:>10.4} {:>16.4} {:>10.4} {:>10.2}",
                m.method.tag(),
                m.mean_average_return,
                m.std_error,
                m.mean_jumpstart_return,
                m.jumpstart_std_error,
                m.wall_seconds
            )
            .unwrap();
        }
        out
    }

    /// Machine-readable `key = value` lines.
    pub fn render_kv(&self) -> String {
        let mut out = String::new();
        writeln!(out, "runs = {}", self.runs).unwrap();
        for m in &self.methods {
            let tag = m.method.tag();
            writeln!(out, "{tag}.mean_average_return = {}", m.mean_average_return).unwrap();
            writeln!(out, "{tag}.std_error = {}", m.std_error).unwrap();
            writeln!(
                out,
                "{tag}.mean_jumpstart_return = {}",
                m.mean_jumpstart_return
            )
            .unwrap();
            writeln!(out, "{tag}.jumpstart_std_error = {}", m.jumpstart_std_error).unwrap();
            writeln!(out, "{tag}.wall_seconds = {}", m.wall_seconds).unwrap();
        }
        out
    }
}

/// Sample mean; NaN for an empty slice.
pub fn mean(values: &[Real]) -> Real {
    if values.is_empty() {
        return Real::NAN;
    }
    values.iter().sum::<Real>() / values.len() as Real
}

/// Standard error of the mean (sample standard deviation / sqrt(n)).
pub fn std_error(values: &[Real]) -> Real {
    let n = values.len();
    if n < 2 {
        return Real::NAN;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<Real>() / (n - 1) as Real;
    (var / n as Real).sqrt()
}
