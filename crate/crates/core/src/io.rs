//! Reading and writing datasets as CSV: one column per variable, header row of names.

use std::io::{Read, Write};

use crate::embedding::{Dataset, TimeSeries};
use crate::error::{Error, Result};

/// Parses a dataset. Errors name the first offending line (1-based, header is line 1).
pub fn read_dataset_csv<R: Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let names: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::data(format!("line 1: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    if names.is_empty() || names.iter().any(String::is_empty) {
        return Err(Error::data("line 1: header must name every column"));
    }
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for (row, record) in rdr.records().enumerate() {
        let line = row + 2;
        let record = record.map_err(|e| Error::data(format!("line {line}: {e}")))?;
        if record.len() != names.len() {
            return Err(Error::data(format!(
                "line {line}: expected {} fields, found {}",
                names.len(),
                record.len()
            )));
        }
        for ((field, col), name) in record.iter().zip(columns.iter_mut()).zip(&names) {
            let v: f64 = field.parse().map_err(|_| {
                Error::data(format!(
                    "line {line}: column `{name}` has non-numeric value `{field}`"
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::data(format!(
                    "line {line}: column `{name}` has non-finite value `{field}`"
                )));
            }
            col.push(v);
        }
    }
    if columns[0].is_empty() {
        return Err(Error::data("no data rows"));
    }
    let series = names
        .into_iter()
        .zip(columns)
        .map(|(n, v)| TimeSeries::new(n, v))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(series)
}

/// Writes a dataset with round-trip precision.
pub fn write_dataset_csv<W: Write>(data: &Dataset, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io_err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(data.names()).map_err(io_err)?;
    for t in 0..data.len() {
        w.write_record(data.variables().iter().map(|s| s.values()[t].to_string()))
            .map_err(io_err)?;
    }
    w.flush()?;
    Ok(())
}
