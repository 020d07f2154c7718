use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Categorical,
    Numeric,
}

/// A rectangular table of raw survey cells; `None` marks a missing cell.
///
/// Storage is column-major. Every column holds exactly `n_rows` cells and
/// column names are unique.
#[derive(Clone, Debug, PartialEq)]
pub struct RawTable {
    names: Vec<String>,
    kinds: Vec<ColumnKind>,
    columns: Vec<Vec<Option<String>>>,
    n_rows: usize,
}

#[derive(Clone, Debug)]
pub struct LoadOptions {
    /// Cell values read as missing. Compared against the untrimmed cell.
    pub sentinels: Vec<String>,
    /// Forces a column kind; other columns are inferred.
    pub hints: HashMap<String, ColumnKind>,
    /// Lines starting with this byte are skipped.
    pub comment: Option<u8>,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            sentinels: vec![String::new(), "NA".to_string()],
            hints: HashMap::new(),
            comment: Some(b'#'),
        }
    }
}

impl RawTable {
    pub fn new(
        names: Vec<String>,
        kinds: Vec<ColumnKind>,
        columns: Vec<Vec<Option<String>>>,
    ) -> Result<Self> {
        if names.len() != columns.len() || kinds.len() != columns.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} names, {} kinds, {} columns",
                names.len(),
                kinds.len(),
                columns.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateColumn(name.clone()));
            }
        }
        let n_rows = columns.first().map_or(0, Vec::len);
        for col in &columns {
            if col.len() != n_rows {
                return Err(Error::DimensionMismatch(format!(
                    "column lengths differ ({} vs {n_rows})",
                    col.len()
                )));
            }
        }
        Ok(RawTable {
            names,
            kinds,
            columns,
            n_rows,
        })
    }

    /// Builds a table from rows, inferring kinds where no hint is given.
    pub fn from_rows(
        names: Vec<String>,
        rows: Vec<Vec<Option<String>>>,
        hints: &HashMap<String, ColumnKind>,
    ) -> Result<Self> {
        let p = names.len();
        let mut columns = vec![Vec::with_capacity(rows.len()); p];
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != p {
                return Err(Error::RaggedRow {
                    row: r + 1,
                    expected: p,
                    found: row.len(),
                });
            }
            for (col, cell) in columns.iter_mut().zip(row) {
                col.push(cell);
            }
        }
        let kinds = names
            .iter()
            .zip(&columns)
            .map(|(name, col)| hints.get(name).copied().unwrap_or_else(|| infer_kind(col)))
            .collect();
        RawTable::new(names, kinds, columns)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_rows, self.n_cols())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn kinds(&self) -> &[ColumnKind] {
        &self.kinds
    }

    pub fn column(&self, j: usize) -> &[Option<String>] {
        &self.columns[j]
    }

    pub(crate) fn column_mut(&mut self, j: usize) -> &mut Vec<Option<String>> {
        &mut self.columns[j]
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<&str> {
        self.columns[col][row].as_deref()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn missing_count(&self) -> usize {
        self.columns
            .iter()
            .map(|c| c.iter().filter(|v| v.is_none()).count())
            .sum()
    }

    pub fn is_complete(&self) -> bool {
        self.columns.iter().all(|c| c.iter().all(Option::is_some))
    }

    /// Removes a column and returns it with its kind.
    pub fn take_column(&mut self, name: &str) -> Result<(ColumnKind, Vec<Option<String>>)> {
        let j = self.column_index(name)?;
        self.names.remove(j);
        let kind = self.kinds.remove(j);
        Ok((kind, self.columns.remove(j)))
    }

    /// Keeps only the named columns, in the given order.
    pub fn select(&self, names: &[&str]) -> Result<RawTable> {
        let idx = names
            .iter()
            .map(|n| self.column_index(n))
            .collect::<Result<Vec<_>>>()?;
        RawTable::new(
            idx.iter().map(|&j| self.names[j].clone()).collect(),
            idx.iter().map(|&j| self.kinds[j]).collect(),
            idx.iter().map(|&j| self.columns[j].clone()).collect(),
        )
    }
}

fn infer_kind(col: &[Option<String>]) -> ColumnKind {
    let mut observed = col.iter().flatten().peekable();
    if observed.peek().is_none() {
        return ColumnKind::Categorical;
    }
    if observed.all(|v| v.trim().parse::<f64>().is_ok_and(f64::is_finite)) {
        ColumnKind::Numeric
    } else {
        ColumnKind::Categorical
    }
}

pub fn load_csv(path: impl AsRef<Path>, options: &LoadOptions) -> Result<RawTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, options)
}

/// Parses RFC-4180 CSV with a mandatory header row.
pub fn read_csv<R: Read>(reader: R, options: &LoadOptions) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .comment(options.comment)
        .from_reader(reader);
    let names: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut seen = HashSet::new();
    for name in &names {
        if !seen.insert(name.as_str()) {
            return Err(Error::DuplicateColumn(name.clone()));
        }
    }
    let sentinels: HashSet<&str> = options.sentinels.iter().map(String::as_str).collect();
    let mut rows = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != names.len() {
            return Err(Error::RaggedRow {
                row: r + 1,
                expected: names.len(),
                found: record.len(),
            });
        }
        rows.push(
            record
                .iter()
                .map(|cell| (!sentinels.contains(cell)).then(|| cell.to_string()))
                .collect(),
        );
    }
    RawTable::from_rows(names, rows, &options.hints)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnMissingness {
    pub column: String,
    pub missing: usize,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissingnessReport {
    pub columns: Vec<ColumnMissingness>,
    pub missing_cells: usize,
    pub total_cells: usize,
    pub overall: f64,
}

pub fn missingness_report(table: &RawTable) -> MissingnessReport {
    let n = table.n_rows();
    let columns: Vec<ColumnMissingness> = (0..table.n_cols())
        .map(|j| {
            let missing = table.column(j).iter().filter(|c| c.is_none()).count();
            ColumnMissingness {
                column: table.names()[j].clone(),
                missing,
                fraction: if n == 0 { 0.0 } else { missing as f64 / n as f64 },
            }
        })
        .collect();
    let missing_cells: usize = columns.iter().map(|c| c.missing).sum();
    let total_cells = n * table.n_cols();
    MissingnessReport {
        overall: if total_cells == 0 {
            0.0
        } else {
            missing_cells as f64 / total_cells as f64
        },
        columns,
        missing_cells,
        total_cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RawTable> {
        read_csv(text.as_bytes(), &LoadOptions::default())
    }

    #[test]
    fn empty_cell_is_missing() {
        let t = parse("a,b\n1,x\n2,\n3,y\n").unwrap();
        assert_eq!(t.missing_count(), 1);
        assert_eq!(t.cell(1, 1), None);
    }

    #[test]
    fn na_sentinel_is_missing_but_quoted_text_is_not() {
        let t = parse("a,b\nNA,\"x, y\"\n").unwrap();
        assert_eq!(t.cell(0, 0), None);
        assert_eq!(t.cell(0, 1), Some("x, y"));
    }

    #[test]
    fn duplicate_header_is_rejected() {
        assert!(matches!(
            parse("a,a,b\n1,2,3\n"),
            Err(Error::DuplicateColumn(name)) if name == "a"
        ));
    }

    #[test]
    fn ragged_row_is_rejected() {
        assert!(matches!(
            parse("a,b\n1,2\n3\n"),
            Err(Error::RaggedRow { row: 2, expected: 2, found: 1 })
        ));
    }

    #[test]
    fn shape_is_preserved() {
        let mut text = String::from("a,b,c,d\n");
        for i in 0..5 {
            text.push_str(&format!("{i},x,y,z\n"));
        }
        assert_eq!(parse(&text).unwrap().shape(), (5, 4));
    }

    #[test]
    fn kinds_are_inferred_and_hints_win() {
        let t = parse("age,party\n30,D\n41,R\n").unwrap();
        assert_eq!(t.kinds(), &[ColumnKind::Numeric, ColumnKind::Categorical]);
        let mut options = LoadOptions::default();
        options
            .hints
            .insert("age".to_string(), ColumnKind::Categorical);
        let t = read_csv("age,party\n30,D\n".as_bytes(), &options).unwrap();
        assert_eq!(t.kinds()[0], ColumnKind::Categorical);
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_csv("/nonexistent/table.csv", &LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[test]
    fn missingness_fractions() {
        let t = parse("a,b\n1,2\n3,4\n").unwrap();
        assert_eq!(missingness_report(&t).overall, 0.0);
        let t = parse("a,b\n1,\n3,4\n").unwrap();
        let report = missingness_report(&t);
        assert_eq!(report.overall, 0.25);
        assert_eq!(report.columns[1].fraction, 0.5);
        assert_eq!(report.columns[0].fraction, 0.0);
    }
}
