//! Interval CSV tables.
//!
//! The first row holds variable names, the first column individual names.
//! A cell is either `lo:hi` or a single number `x` meaning `[x, x]`;
//! surrounding whitespace is ignored. Row numbers in error messages are
//! 1-based file lines, so the header is row 1.

use std::fs;
use std::io::Read;
use std::path::Path;

use crate::interval::Interval;
use crate::io::InputError;
use crate::matrix::IntervalMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Content of the header's first cell (the individuals column title).
    pub corner: String,
    pub individuals: Vec<String>,
    pub variables: Vec<String>,
    pub data: IntervalMatrix,
}

/// Parses `lo:hi` or `x`. The error string carries no location.
pub fn parse_interval_cell(text: &str) -> Result<Interval, String> {
    let text = text.trim();
    let number = |s: &str| -> Result<f64, String> {
        let s = s.trim();
        let v: f64 = s.parse().map_err(|_| format!("malformed number {s:?}"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("non-finite value {s:?}"))
        }
    };
    if text.is_empty() {
        return Err("empty cell".into());
    }
    let (lo, hi) = match text.split_once(':') {
        Some((a, b)) => (number(a)?, number(b)?),
        None => {
            let x = number(text)?;
            (x, x)
        }
    };
    if lo > hi {
        return Err(format!("lower endpoint {lo} exceeds upper endpoint {hi}"));
    }
    Interval::new(lo, hi).map_err(|e| e.to_string())
}

/// Formats a cell losslessly: `x` when degenerate, else `lo:hi`.
pub fn format_interval_cell(x: &Interval) -> String {
    if x.lo() == x.hi() {
        format!("{}", x.lo())
    } else {
        format!("{}:{}", x.lo(), x.hi())
    }
}

pub fn load_table(path: &Path) -> Result<Table, InputError> {
    let bytes = fs::read(path).map_err(|e| InputError::io(path, e))?;
    read_table(bytes.as_slice(), &path.display().to_string())
}

/// Reads a table from any reader; `source` names it in error messages.
pub fn read_table<R: Read>(reader: R, source: &str) -> Result<Table, InputError> {
    let err = |message: String| InputError::Table { origin: source.to_string(), message };
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(reader);

    let mut records = rdr.records();
    let header = match records.next() {
        None => return Err(err("empty file".into())),
        Some(r) => r.map_err(|e| err(format!("row 1: {e}")))?,
    };
    if header.len() < 2 {
        return Err(err("row 1: header needs an individuals column and at least one variable".into()));
    }
    let corner = header[0].to_string();
    let variables: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if let Some(dup) = first_duplicate(&variables) {
        return Err(err(format!("row 1: duplicate variable name '{dup}'")));
    }
    if let Some(j) = variables.iter().position(String::is_empty) {
        return Err(err(format!("row 1: variable {} has an empty name", j + 1)));
    }

    let p = variables.len();
    let mut individuals = Vec::new();
    let mut first_row = std::collections::HashMap::new();
    let mut cells = Vec::new();
    for record in records {
        let record = record.map_err(|e| err(e.to_string()))?;
        let row = record.position().map_or(individuals.len() + 2, |pos| pos.line() as usize);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != p + 1 {
            return Err(err(format!("row {row}: expected {} fields, found {}", p + 1, record.len())));
        }
        let name = record[0].to_string();
        if name.is_empty() {
            return Err(err(format!("row {row}: empty individual name")));
        }
        if let Some(first) = first_row.insert(name.clone(), row) {
            return Err(err(format!("row {row}: duplicate individual name '{name}' (first at row {first})")));
        }
        for (j, text) in record.iter().skip(1).enumerate() {
            let cell =
                parse_interval_cell(text).map_err(|m| err(format!("row {row}, column '{}': {m}", variables[j])))?;
            cells.push(cell);
        }
        individuals.push(name);
    }
    if individuals.is_empty() {
        return Err(err("no individuals (header only)".into()));
    }
    let data = IntervalMatrix::new(individuals.len(), p, cells).expect("shape checked row by row");
    Ok(Table { corner, individuals, variables, data })
}

fn first_duplicate(names: &[String]) -> Option<&str> {
    let mut seen = std::collections::HashSet::new();
    names.iter().find(|n| !seen.insert(n.as_str())).map(String::as_str)
}

pub fn write_table(path: &Path, table: &Table) -> Result<(), InputError> {
    let mut wtr = csv::Writer::from_path(path).map_err(|e| InputError::io(path, e.into()))?;
    let write = |wtr: &mut csv::Writer<fs::File>, rec: Vec<String>| {
        wtr.write_record(rec).map_err(|e| InputError::io(path, e.into()))
    };
    let mut header = vec![table.corner.clone()];
    header.extend(table.variables.iter().cloned());
    write(&mut wtr, header)?;
    for (i, name) in table.individuals.iter().enumerate() {
        let mut rec = vec![name.clone()];
        rec.extend(table.data.row(i).iter().map(format_interval_cell));
        write(&mut wtr, rec)?;
    }
    wtr.flush().map_err(|e| InputError::io(path, e))
}
