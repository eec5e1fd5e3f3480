//! Tabular regression data: a design matrix plus a scalar response.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Name of the response column in design-matrix CSV files.
pub const RESPONSE_COLUMN: &str = "Y";

/// A design matrix with named columns and a response vector.
///
/// Values are stored column-major: split search in the forest scans one
/// feature at a time.
#[derive(Debug, Clone)]
pub struct Dataset {
    n_rows: usize,
    column_names: Vec<String>,
    /// Column-major values, `values[col * n_rows + row]`.
    values: Vec<f64>,
    response: Vec<f64>,
}

impl Dataset {
    /// Build a dataset from columns. Column names must be unique and every
    /// value finite.
    pub fn new(
        column_names: Vec<String>,
        columns: Vec<Vec<f64>>,
        response: Vec<f64>,
    ) -> Result<Self> {
        if column_names.len() != columns.len() {
            return Err(Error::DimensionMismatch {
                expected: column_names.len(),
                actual: columns.len(),
            });
        }
        let n_rows = response.len();
        if n_rows == 0 {
            return Err(Error::EmptyTrainingSet);
        }
        for (name, col) in column_names.iter().zip(&columns) {
            if col.len() != n_rows {
                return Err(Error::InvalidData(format!(
                    "column {name} has {} rows, response has {n_rows}",
                    col.len()
                )));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for name in &column_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::InvalidData(format!("duplicate column name {name}")));
            }
        }
        let mut values = Vec::with_capacity(n_rows * columns.len());
        for col in &columns {
            values.extend_from_slice(col);
        }
        if values.iter().chain(response.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite value in dataset".into()));
        }
        Ok(Self {
            n_rows,
            column_names,
            values,
            response,
        })
    }

    /// Build a dataset from rows (each row one observation).
    pub fn from_rows(column_names: Vec<String>, rows: &[Vec<f64>], response: Vec<f64>) -> Result<Self> {
        let p = column_names.len();
        let mut columns = vec![Vec::with_capacity(rows.len()); p];
        for row in rows {
            if row.len() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    actual: row.len(),
                });
            }
            for (c, v) in row.iter().enumerate() {
                columns[c].push(*v);
            }
        }
        Self::new(column_names, columns, response)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.column_names.len()
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }

    #[inline]
    pub fn value(&self, row: usize, col: usize) -> f64 {
        self.values[col * self.n_rows + row]
    }

    #[inline]
    pub fn column(&self, col: usize) -> &[f64] {
        &self.values[col * self.n_rows..(col + 1) * self.n_rows]
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    /// Copy of the dataset restricted to `cols` (in the given order).
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        let mut names = Vec::with_capacity(cols.len());
        let mut values = Vec::with_capacity(cols.len() * self.n_rows);
        for &c in cols {
            if c >= self.n_cols() {
                return Err(Error::InvalidGroup(format!("column index {c} out of range")));
            }
            names.push(self.column_names[c].clone());
            values.extend_from_slice(self.column(c));
        }
        Ok(Self {
            n_rows: self.n_rows,
            column_names: names,
            values,
            response: self.response.clone(),
        })
    }

    /// Copy of the dataset restricted to `rows` (in the given order).
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut values = Vec::with_capacity(rows.len() * self.n_cols());
        for c in 0..self.n_cols() {
            let col = self.column(c);
            values.extend(rows.iter().map(|&r| col[r]));
        }
        Self {
            n_rows: rows.len(),
            column_names: self.column_names.clone(),
            values,
            response: rows.iter().map(|&r| self.response[r]).collect(),
        }
    }

    /// Read a design-matrix CSV: header row, final column `Y`.
    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv_from(std::io::BufReader::new(file))
    }

    pub fn read_csv_from<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty CSV".into()))??;
        let mut names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        if names.last().map(String::as_str) != Some(RESPONSE_COLUMN) {
            return Err(Error::Parse(format!(
                "last column must be named {RESPONSE_COLUMN}"
            )));
        }
        names.pop();
        let p = names.len();
        let mut columns = vec![Vec::new(); p];
        let mut response = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            for col in columns.iter_mut() {
                let field = fields
                    .next()
                    .ok_or_else(|| Error::Parse(format!("line {}: too few fields", lineno + 2)))?;
                col.push(parse_f64(field, lineno + 2)?);
            }
            let y = fields
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing response", lineno + 2)))?;
            response.push(parse_f64(y, lineno + 2)?);
            if fields.next().is_some() {
                return Err(Error::Parse(format!("line {}: too many fields", lineno + 2)));
            }
        }
        Self::new(names, columns, response)
    }

    /// Write the design-matrix CSV (header, final column `Y`).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for name in &self.column_names {
            write!(w, "{name},")?;
        }
        writeln!(w, "{RESPONSE_COLUMN}")?;
        for r in 0..self.n_rows {
            for c in 0..self.n_cols() {
                write!(w, "{},", fmt_f64(self.value(r, c)))?;
            }
            writeln!(w, "{}", fmt_f64(self.response[r]))?;
        }
        Ok(())
    }
}

pub(crate) fn parse_f64(field: &str, lineno: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("line {lineno}: {e}: {field:?}")))
}

/// Shortest round-trip formatting; identical bits give identical text.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Dataset {
        Dataset::new(
            vec!["a".into(), "b".into()],
            vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]],
            vec![0.5, -0.5, 1.5],
        )
        .unwrap()
    }

    #[test]
    fn column_major_accessors() {
        let d = toy();
        assert_eq!(d.value(1, 0), 2.0);
        assert_eq!(d.value(2, 1), 6.0);
        assert_eq!(d.column(1), &[4.0, 5.0, 6.0]);
    }

    #[test]
    fn duplicate_names_rejected() {
        let err = Dataset::new(
            vec!["a".into(), "a".into()],
            vec![vec![1.0], vec![2.0]],
            vec![0.0],
        );
        assert!(err.is_err());
    }

    #[test]
    fn nan_rejected() {
        let err = Dataset::new(vec!["a".into()], vec![vec![f64::NAN]], vec![0.0]);
        assert!(err.is_err());
    }

    #[test]
    fn csv_round_trip() {
        let d = toy();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let back = Dataset::read_csv_from(std::io::Cursor::new(&buf)).unwrap();
        assert_eq!(back.column_names(), d.column_names());
        assert_eq!(back.response(), d.response());
        assert_eq!(back.column(0), d.column(0));
        let mut buf2 = Vec::new();
        back.write_csv(&mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn row_and_column_selection() {
        let d = toy();
        let sub = d.select_columns(&[1]).unwrap();
        assert_eq!(sub.column_names(), &["b".to_string()]);
        assert_eq!(sub.column(0), &[4.0, 5.0, 6.0]);
        let rows = d.select_rows(&[2, 0]);
        assert_eq!(rows.column(0), &[3.0, 1.0]);
        assert_eq!(rows.response(), &[1.5, 0.5]);
    }

    #[test]
    fn csv_missing_response_column() {
        let text = "a,b\n1,2\n";
        assert!(Dataset::read_csv_from(std::io::Cursor::new(text)).is_err());
    }
}
