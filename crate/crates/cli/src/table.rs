//! CSV tables of sampled functions.

use std::path::Path;

use fracsl_core::{Grid, SampledFunction};

use crate::error::{io_at, CliError, Result};

/// 17 significant digits: enough to recover every `f64` exactly.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Reads a two-column `x,value` table with equally spaced `x`.
pub fn read_table(path: &Path) -> Result<SampledFunction> {
    let csv_err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let table_err = |message: String| CliError::Table {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        if record.len() != 2 {
            return Err(table_err(format!(
                "expected 2 columns, found {}",
                record.len()
            )));
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| table_err(format!("not a number: {s:?}")))
        };
        xs.push(parse(&record[0])?);
        values.push(parse(&record[1])?);
    }
    if xs.len() < 3 {
        return Err(table_err(format!(
            "need at least 3 rows, found {}",
            xs.len()
        )));
    }
    let grid = Grid::new(xs[0], xs[xs.len() - 1], xs.len() - 1)?;
    let slack = 1e-9 * grid.width();
    if let Some(i) = (0..xs.len()).find(|&i| (xs[i] - grid.node(i)).abs() > slack) {
        return Err(table_err(format!(
            "x values must be equally spaced; row {} has x = {}, expected {}",
            i + 1,
            xs[i],
            grid.node(i)
        )));
    }
    Ok(SampledFunction::new(grid, values)?)
}

/// Writes `x` followed by the given columns, one row per grid node.
pub fn write_columns(path: &Path, grid: &Grid, columns: &[(&str, &[f64])]) -> Result<()> {
    let csv_err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut writer = csv::Writer::from_path(path).map_err(csv_err)?;
    let header: Vec<&str> = std::iter::once("x")
        .chain(columns.iter().map(|c| c.0))
        .collect();
    writer.write_record(&header).map_err(csv_err)?;
    for (i, x) in grid.nodes().enumerate() {
        let row: Vec<String> = std::iter::once(x)
            .chain(columns.iter().map(|c| c.1[i]))
            .map(format_float)
            .collect();
        writer.write_record(&row).map_err(csv_err)?;
    }
    writer.flush().map_err(io_at(path))
}

pub fn write_table(path: &Path, f: &SampledFunction) -> Result<()> {
    write_columns(path, f.grid(), &[("value", f.values())])
}
