use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{LabError, Result};

/// Shortest decimal that parses back to the same `f64`. Plain notation in
/// the everyday range, exponent notation outside it.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Below,
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = ">")]
    Above,
}

impl Relation {
    pub fn holds(&self, measured: f64, bound: f64) -> bool {
        match self {
            Relation::Below => measured < bound,
            Relation::AtMost => measured <= bound,
            Relation::AtLeast => measured >= bound,
            Relation::Above => measured > bound,
        }
    }
}

/// One checked statement: `measured relation bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    /// The mathematical statement being checked, in words.
    pub paper_anchor: String,
    pub measured: f64,
    pub relation: Relation,
    pub bound: f64,
    pub pass: bool,
    pub failing_rows: Vec<usize>,
}

impl Assertion {
    pub fn new(name: &str, anchor: &str, measured: f64, relation: Relation, bound: f64) -> Self {
        Self {
            name: name.to_string(),
            paper_anchor: anchor.to_string(),
            measured,
            relation,
            bound,
            pass: relation.holds(measured, bound),
            failing_rows: Vec::new(),
        }
    }

    /// Row-wise check; `measured` is the worst row.
    pub fn per_row(name: &str, anchor: &str, values: &[f64], relation: Relation, bound: f64) -> Self {
        let failing_rows: Vec<usize> = (0..values.len()).filter(|&i| !relation.holds(values[i], bound)).collect();
        let worst = match relation {
            Relation::AtLeast | Relation::Above => values.iter().cloned().fold(f64::INFINITY, f64::min),
            _ => values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        };
        Self {
            pass: failing_rows.is_empty() && !values.is_empty(),
            failing_rows,
            ..Self::new(name, anchor, worst, relation, bound)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub experiment: String,
    pub config: Value,
    pub config_sha256: String,
    pub wall_time_seconds: f64,
    /// Default axes for the plot script.
    pub plot_x: String,
    pub plot_y: Vec<String>,
}

/// A rectangular table of reals plus the checks made on it.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
    pub assertions: Vec<Assertion>,
    pub metadata: Option<Metadata>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Result<Self> {
        let columns: Vec<String> = columns.into_iter().map(Into::into).collect();
        if columns.is_empty() {
            return Err(LabError::Usage("a table needs at least one column".into()));
        }
        for c in &columns {
            if c.is_empty() || c.contains([',', '"', '\n', '\r']) {
                return Err(LabError::Usage(format!("column name {c:?} is not CSV-safe")));
            }
        }
        if let Some(dup) = columns.iter().enumerate().find(|(i, c)| columns[..*i].contains(c)) {
            return Err(LabError::Usage(format!("column {} appears twice", dup.1)));
        }
        Ok(Self {
            columns,
            rows: Vec::new(),
            assertions: Vec::new(),
            metadata: None,
        })
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(LabError::Usage(format!(
                "row {} has {} cells for {} columns",
                self.rows.len(),
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns.iter().position(|c| c == name).ok_or_else(|| {
            LabError::Usage(format!("no column named `{name}` (have {})", self.columns.join(", ")))
        })
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn all_pass(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&x| format_float(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Reads a header plus numeric rows, as written by [`to_csv`](Self::to_csv).
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let header = reader.headers().map_err(|e| LabError::Usage(format!("csv header: {e}")))?;
        let mut table = Self::new(header.iter().map(str::to_string))?;
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| LabError::Usage(format!("csv row {i}: {e}")))?;
            let row = record
                .iter()
                .enumerate()
                .map(|(j, cell)| {
                    cell.trim().parse::<f64>().map_err(|_| {
                        LabError::Usage(format!("csv row {i}, column `{}`: {cell:?} is not a number", table.columns[j]))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            table.push_row(row)?;
        }
        Ok(table)
    }

    pub fn report_json(&self) -> Value {
        let meta = self.metadata.as_ref();
        json!({
            "experiment": meta.map(|m| m.experiment.clone()),
            "config": meta.map(|m| m.config.clone()),
            "config_sha256": meta.map(|m| m.config_sha256.clone()),
            "wall_time_seconds": meta.map(|m| m.wall_time_seconds),
            "columns": self.columns,
            "row_count": self.rows.len(),
            "assertions": self.assertions,
            "pass": self.all_pass(),
        })
    }
}
