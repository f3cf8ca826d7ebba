//! Column-oriented sample matrices and their CSV form.

use crate::error::{Error, Result};
use std::io::{Read, Write};
use std::path::Path;

/// `n` samples of `d` named variables, stored by column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::Dimension(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        let n = columns.first().map(Vec::len).unwrap_or(0);
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::Dimension("columns differ in length".into()));
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(Error::Config(format!("duplicate variable name `{a}`")));
            }
        }
        Ok(Self { names, columns })
    }

    pub fn n_samples(&self) -> usize {
        self.columns.first().map(Vec::len).unwrap_or(0)
    }

    pub fn n_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn column(&self, i: usize) -> &[f64] {
        &self.columns[i]
    }

    pub fn column_by_name(&self, name: &str) -> Result<&[f64]> {
        Ok(&self.columns[self.index_of(name)?])
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    /// Reorders variables so that new position `j` holds old variable `order[j]`.
    pub fn select(&self, order: &[usize]) -> Self {
        Self {
            names: order.iter().map(|&i| self.names[i].clone()).collect(),
            columns: order.iter().map(|&i| self.columns[i].clone()).collect(),
        }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_columns_csv(w, &self.names, &self.columns)
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let names: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        if names.is_empty() {
            return Err(Error::Parse {
                line: 1,
                msg: "missing header row".into(),
            });
        }
        let mut columns = vec![Vec::new(); names.len()];
        for record in reader.records() {
            let record = record?;
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if record.len() != names.len() {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {} fields, found {}", names.len(), record.len()),
                });
            }
            for (col, field) in columns.iter_mut().zip(record.iter()) {
                let v: f64 = field.parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("`{field}` is not a number"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line,
                        msg: format!("non-finite value `{field}`"),
                    });
                }
                col.push(v);
            }
        }
        Self::new(names, columns)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

/// Writes equal-length named columns as CSV with a header row.
pub(crate) fn write_columns_csv<W: Write>(w: W, names: &[String], columns: &[Vec<f64>]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    writer.write_record(names)?;
    let n = columns.first().map(Vec::len).unwrap_or(0);
    let mut row = Vec::with_capacity(columns.len());
    for t in 0..n {
        row.clear();
        row.extend(columns.iter().map(|c| format!("{:?}", c[t])));
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}
