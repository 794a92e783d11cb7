//! CSV tables with JSON sidecars.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    #[serde(skip)]
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len(), "{}", self.name);
        self.rows.push(row);
    }

    pub fn file_name(&self) -> String {
        format!("{}.csv", self.name)
    }

    pub fn sidecar_name(&self) -> String {
        format!("{}.meta.json", self.name)
    }
}

/// Cell formatting: shortest round-trip decimal for floats, empty for None.
pub trait Cell {
    fn cell(&self) -> String;
}

macro_rules! display_cell {
    ($($t:ty),*) => {$(
        impl Cell for $t {
            fn cell(&self) -> String {
                self.to_string()
            }
        }
    )*};
}
display_cell!(i64, u64, u32, usize, u128, bool, f64, String, &str);

impl<T: Cell> Cell for Option<T> {
    fn cell(&self) -> String {
        self.as_ref().map(Cell::cell).unwrap_or_default()
    }
}

#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => {
        vec![$($crate::output::Cell::cell(&$x)),*]
    };
}

/// Writes `<name>.csv` and `<name>.meta.json` into `dir`.
pub fn write_table(dir: &Path, table: &Table, meta: &Value) -> Result<()> {
    let path = dir.join(table.file_name());
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(&table.columns)?;
    for r in &table.rows {
        w.write_record(r)?;
    }
    w.flush()?;
    let side = json!({
        "table": table.name,
        "file": table.file_name(),
        "columns": table.columns,
        "rows": table.rows.len(),
        "meta": meta,
    });
    write_json(&dir.join(table.sidecar_name()), &side)
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells() {
        assert_eq!(0.1f64.cell(), "0.1");
        assert_eq!(Some(3u64).cell(), "3");
        assert_eq!(None::<f64>.cell(), "");
        let r: Vec<String> = row![1i64, "a,b", Some(2.5f64)];
        assert_eq!(r, vec!["1", "a,b", "2.5"]);
    }

    #[test]
    fn csv_quoting_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new("t", &["id", "text"]);
        t.push(row![1i64, "x, \"y\""]);
        write_table(dir.path(), &t, &json!({"seed": 3})).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
        assert_eq!(csv, "id,text\n1,\"x, \"\"y\"\"\"\n");
        let side: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("t.meta.json")).unwrap()).unwrap();
        assert_eq!(side["rows"], 1);
        assert_eq!(side["meta"]["seed"], 3);
    }
}
