//! Human-readable tables from the CSV outputs of a run.

use std::path::Path;

use crate::error::{io_err, HarnessError, Result};

const SUMMARY_COLUMNS: &[&str] = &[
    "method",
    "checkpoint_n",
    "n_valid",
    "iact_mean",
    "iact_sd",
    "ess_mean",
    "ess_sd",
];

const TABLE_COLUMNS: &[&str] = &[
    "method",
    "checkpoint_n",
    "iact_avg",
    "iact_min",
    "iact_max",
    "ess_total",
    "mcse",
    "ci_lo",
    "ci_hi",
];

fn short(cell: &str) -> String {
    match cell.parse::<f64>() {
        Ok(v) if cell.contains(['e', '.']) => {
            if v == 0.0 || (1e-2..1e6).contains(&v.abs()) {
                format!("{v:.3}")
            } else {
                format!("{v:.3e}")
            }
        }
        _ => cell.to_string(),
    }
}

/// Select `columns` from CSV `text` and lay them out with aligned widths.
pub fn render_csv(text: &str, columns: &[&str]) -> Result<String> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
    let idx = columns
        .iter()
        .map(|c| {
            header
                .iter()
                .position(|h| h == c)
                .ok_or_else(|| HarnessError::Config(format!("column {c:?} missing")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table: Vec<Vec<String>> = vec![columns.iter().map(|c| c.to_string()).collect()];
    for line in lines.filter(|l| !l.is_empty()) {
        let cells: Vec<&str> = line.split(',').collect();
        table.push(idx.iter().map(|&i| short(cells.get(i).copied().unwrap_or(""))).collect());
    }
    let widths: Vec<usize> = (0..columns.len())
        .map(|k| table.iter().map(|r| r[k].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &table {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(k, (c, w))| if k == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    Ok(out)
}

/// Render every `summary.csv` and `*_table.csv` found in `dir`.
pub fn report_dir(dir: &Path) -> Result<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n == "summary.csv" || n.ends_with("_table.csv"))
        .collect();
    names.sort();
    if names.is_empty() {
        return Err(HarnessError::Config(format!(
            "no summary.csv or *_table.csv in {}",
            dir.display()
        )));
    }
    let mut out = String::new();
    for name in names {
        let path = dir.join(&name);
        let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
        let cols = if name == "summary.csv" { SUMMARY_COLUMNS } else { TABLE_COLUMNS };
        out.push_str(&format!("== {name}\n"));
        out.push_str(&render_csv(&text, cols)?);
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_selection() {
        let csv = "method,x,y\nbartlett,1.0e2,7\ngeyer,2.5e-5,8\n";
        let s = render_csv(csv, &["method", "x"]).unwrap();
        assert_eq!(s, "method           x\nbartlett   100.000\ngeyer     2.500e-5\n");
        assert!(render_csv(csv, &["z"]).is_err());
    }
}
