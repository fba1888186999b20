use std::path::{Path, PathBuf};

use crate::error::{LabError, Result};
use crate::table::ResultTable;

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

/// Positive data spanning at least a decade reads better on a log axis.
fn wants_log(values: &[f64]) -> bool {
    let finite: Vec<f64> = values.iter().cloned().filter(|v| v.is_finite()).collect();
    if finite.is_empty() || finite.iter().any(|&v| v <= 0.0) {
        return false;
    }
    let lo = finite.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().cloned().fold(0.0, f64::max);
    hi / lo >= 10.0
}

/// A gnuplot script plotting `y_columns` against `x_column` from `csv_name`,
/// resolved relative to the directory gnuplot runs in.
pub fn plot_script(table: &ResultTable, csv_name: &str, x_column: &str, y_columns: &[String]) -> Result<String> {
    if y_columns.is_empty() {
        return Err(LabError::Usage("no y columns given".into()));
    }
    let xi = table.column_index(x_column)?;
    let yi = y_columns
        .iter()
        .map(|c| table.column_index(c))
        .collect::<Result<Vec<usize>>>()?;

    let mut ys = Vec::new();
    for c in y_columns {
        ys.extend(table.column(c)?);
    }
    let mut out = String::new();
    out.push_str(&format!("# run from the directory holding {csv_name}\n"));
    out.push_str("set datafile separator ','\n");
    out.push_str("set key outside right\n");
    out.push_str("set grid\n");
    out.push_str(&format!("set xlabel {}\n", quote(x_column)));
    if let [only] = y_columns {
        out.push_str(&format!("set ylabel {}\n", quote(only)));
    }
    if wants_log(&table.column(x_column)?) {
        out.push_str("set logscale x\n");
    }
    if wants_log(&ys) {
        out.push_str("set logscale y\n");
    }
    let series: Vec<String> = y_columns
        .iter()
        .zip(&yi)
        .enumerate()
        .map(|(k, (name, &j))| {
            let file = if k == 0 { quote(csv_name) } else { "''".to_string() };
            format!("{file} using {}:{} skip 1 with linespoints title {}", xi + 1, j + 1, quote(name))
        })
        .collect();
    out.push_str("plot ");
    out.push_str(&series.join(", \\\n     "));
    out.push('\n');
    Ok(out)
}

/// Writes `<stem>.gp` next to an existing results CSV and returns its path.
pub fn emit_plot_data(csv_path: &Path, x_column: &str, y_columns: &[String]) -> Result<PathBuf> {
    let text = std::fs::read_to_string(csv_path).map_err(|e| LabError::io(csv_path, e))?;
    let table = ResultTable::from_csv(&text)?;
    let name = csv_path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| LabError::Usage(format!("{} has no usable file name", csv_path.display())))?;
    let script = plot_script(&table, name, x_column, y_columns)?;
    let out = csv_path.with_extension("gp");
    std::fs::write(&out, script).map_err(|e| LabError::io(&out, e))?;
    Ok(out)
}
