//! CSV and JSON writers for solver runs.
//!
//! All CSV files carry a header row, use `,` separators and `.` decimals,
//! and print reals with 17 significant digits so values round-trip exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::dca::{IterationRecord, SolveReport};
use crate::grid::{Field, Grid};
use crate::Result;

/// Formats a real with 17 significant digits, enough to round-trip an f64.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a node field as `x,y,value` rows in node-index order.
pub fn write_field_csv(path: &Path, grid: &Grid, field: &Field) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "x,y,value")?;
    for (k, v) in field.values().iter().enumerate() {
        let (x, y) = grid.coord(k);
        writeln!(out, "{},{},{}", fmt_real(x), fmt_real(y), fmt_real(*v))?;
    }
    out.flush()?;
    Ok(())
}

/// Writes the per-outer-iteration table.
pub fn write_iterations_csv(path: &Path, records: &[IterationRecord]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(
        out,
        "k,cost,residual,zeta_gap,null_entries,inner_iterations,elapsed_seconds"
    )?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.k,
            fmt_real(r.cost),
            fmt_real(r.residual),
            fmt_real(r.zeta_gap),
            r.null_entries,
            r.inner_iterations,
            fmt_real(r.elapsed_seconds),
        )?;
    }
    out.flush()?;
    Ok(())
}

/// One row of a parameter sweep: the swept value and the solve outcome.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub value: f64,
    pub cost: f64,
    pub null_entries: usize,
    pub iterations: usize,
}

/// Writes sweep results as `value,cost,null_entries,iterations` rows.
pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "value,cost,null_entries,iterations")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{}",
            fmt_real(r.value),
            fmt_real(r.cost),
            r.null_entries,
            r.iterations,
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Writes the joint per-iteration cost table for a two-algorithm comparison.
///
/// Rows are padded with the last recorded cost when one algorithm stops
/// before the other.
pub fn write_comparison_csv(
    path: &Path,
    dca: &[IterationRecord],
    pd: &[IterationRecord],
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "k,cost_dca,cost_pd")?;
    let rows = dca.len().max(pd.len());
    let pick = |records: &[IterationRecord], i: usize| -> Option<f64> {
        if records.is_empty() {
            None
        } else {
            Some(records[i.min(records.len() - 1)].cost)
        }
    };
    for i in 0..rows {
        let label = dca
            .get(i)
            .or_else(|| pd.get(i))
            .map(|r| r.k)
            .unwrap_or(i);
        let a = pick(dca, i).map_or_else(String::new, fmt_real);
        let b = pick(pd, i).map_or_else(String::new, fmt_real);
        writeln!(out, "{},{},{}", label, a, b)?;
    }
    out.flush()?;
    Ok(())
}

/// Builds the summary document for one solve.
///
/// `config` is echoed verbatim so the run can be reproduced from the summary
/// alone; `null_tol` is the loose threshold used for the secondary
/// near-zero count (the primary count is of exact zeros).
pub fn summary_value(
    config: &serde_json::Value,
    grid: &Grid,
    report: &SolveReport,
    null_tol: f64,
) -> serde_json::Value {
    let num_nodes = grid.num_nodes();
    let null_entries = crate::dca::sparsity_count(&report.u, 0.0);
    let near_null = crate::dca::sparsity_count(&report.u, null_tol);
    let total_inner: usize = report.iterations.iter().map(|r| r.inner_iterations).sum();
    serde_json::json!({
        "config": config,
        "cost": report.cost,
        "cost_exact": report.cost_exact,
        "convergence": {
            "converged": report.converged,
            "stop_reason": report.stop_reason,
            "outer_iterations": report.iterations.len(),
            "residual": report.residual,
            "total_inner_iterations": total_inner,
            "kkt": report.kkt,
        },
        "sparsity": {
            "num_nodes": num_nodes,
            "null_entries": null_entries,
            "null_fraction": null_entries as f64 / num_nodes as f64,
            "null_entries_tol": null_tol,
            "null_entries_within_tol": near_null,
        },
        "norms": {
            "u_linf": report.u.linf(),
            "u_l2": grid.norm_l2(&report.u),
            "y_linf": report.y.linf(),
        },
    })
}

/// Writes a summary document as pretty-printed JSON.
pub fn write_summary_json(path: &Path, summary: &serde_json::Value) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, summary)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Writes the four standard artifacts of one solve into `dir`.
pub fn write_solve_outputs(
    dir: &Path,
    config: &serde_json::Value,
    grid: &Grid,
    report: &SolveReport,
    null_tol: f64,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_iterations_csv(&dir.join("iterations.csv"), &report.iterations)?;
    write_field_csv(&dir.join("u.csv"), grid, &report.u)?;
    write_field_csv(&dir.join("y.csv"), grid, &report.y)?;
    write_field_csv(&dir.join("phi.csv"), grid, &report.phi)?;
    let summary = summary_value(config, grid, report, null_tol);
    write_summary_json(&dir.join("summary.json"), &summary)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::QuadratureRule;

    #[test]
    fn real_format_round_trips_f64() {
        for v in [
            0.0,
            1.0,
            -1.0,
            0.1,
            std::f64::consts::PI,
            229.2147,
            1e-300,
            -3.5e240,
            f64::MIN_POSITIVE,
        ] {
            let s = fmt_real(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v} -> {s} -> {back}");
        }
    }

    #[test]
    fn field_csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let grid = Grid::new(2, QuadratureRule::Trapezoid).unwrap();
        let field = Field::from_values(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let path = dir.path().join("u.csv");
        write_field_csv(&path, &grid, &field).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "x,y,value");
        // Node 0 sits at (h, h) with h = 1/3; value column carries 17
        // significant digits.
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first.len(), 3);
        let x: f64 = first[0].parse().unwrap();
        assert!((x - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(first[2], "1.0000000000000000e0");
    }

    #[test]
    fn comparison_pads_shorter_run() {
        let dir = tempfile::tempdir().unwrap();
        let rec = |k: usize, cost: f64| IterationRecord {
            k,
            cost,
            residual: 0.0,
            zeta_gap: 0.0,
            null_entries: 0,
            inner_iterations: 1,
            elapsed_seconds: 0.0,
        };
        let a = vec![rec(1, 3.0), rec(2, 2.0), rec(3, 1.5)];
        let b = vec![rec(1, 4.0)];
        let path = dir.path().join("comparison.csv");
        write_comparison_csv(&path, &a, &b).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[3].starts_with("3,"));
        assert!(lines[3].ends_with(&fmt_real(4.0)));
    }
}
