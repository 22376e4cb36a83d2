//! Report tables: CSV with a commented header block recording the config
//! hash, code revision and master seed. Numeric cells use the shortest
//! round-trip float formatting so identical runs produce identical bytes;
//! the timestamp line is the only run-dependent part.

use std::fmt::Write as _;

/// Metadata lines for the `#`-comment block at the top of a CSV report.
#[derive(Debug, Clone, Default)]
pub struct ReportMeta {
    pub config_hash: Option<u64>,
    pub revision: Option<String>,
    pub seed: Option<u64>,
    /// unix timestamp; excluded from reproducibility comparisons
    pub generated_unix: Option<u64>,
}

impl ReportMeta {
    pub fn now(config_hash: u64, seed: u64, revision: Option<String>) -> Self {
        let ts = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            config_hash: Some(config_hash),
            revision,
            seed: Some(seed),
            generated_unix: Some(ts),
        }
    }

    fn header(&self) -> String {
        let mut s = String::new();
        if let Some(h) = self.config_hash {
            let _ = writeln!(s, "# config_hash: {h:016x}");
        }
        if let Some(r) = &self.revision {
            let _ = writeln!(s, "# revision: {r}");
        }
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "# seed: {seed}");
        }
        if let Some(ts) = self.generated_unix {
            let _ = writeln!(s, "# generated_unix: {ts}");
        }
        s
    }
}

/// A column-labelled table rendered to CSV.
#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // shortest round-trip representation
            Cell::Num(v) => format!("{v}"),
            Cell::Text(v) => v.clone(),
            Cell::Bool(v) => v.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn to_csv(&self, meta: &ReportMeta) -> String {
        let mut s = meta.header();
        let _ = writeln!(s, "{}", self.columns.join(","));
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::render).collect();
            let _ = writeln!(s, "{}", line.join(","));
        }
        s
    }
}

/// Strip `#` comment lines; used by the byte-reproducibility comparisons to
/// ignore the timestamp header.
pub fn strip_comments(csv: &str) -> String {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_format_and_comment_stripping() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![Cell::Num(0.1), Cell::Int(2)]);
        let meta = ReportMeta { seed: Some(7), generated_unix: Some(123), ..Default::default() };
        let csv = t.to_csv(&meta);
        assert!(csv.starts_with("# seed: 7\n# generated_unix: 123\na,b\n0.1,2\n"));
        assert_eq!(strip_comments(&csv), "a,b\n0.1,2");
    }

    #[test]
    fn float_cells_roundtrip() {
        let v = 0.123456789012345678;
        let rendered = Cell::Num(v).render();
        let back: f64 = rendered.parse().unwrap();
        assert_eq!(v, back);
    }
}
