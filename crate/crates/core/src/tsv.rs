//! Line-oriented TSV reading with line-numbered errors.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Calls `row` for every non-empty line, split on tabs. Lines must have
/// exactly `columns` fields. Line numbers are 1-based.
pub(crate) fn for_each_row<R: Read>(
    reader: R,
    source: &Path,
    columns: usize,
    mut row: impl FnMut(usize, &[&str]) -> std::result::Result<(), String>,
) -> Result<()> {
    let reader = BufReader::new(reader);
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != columns {
            return Err(Error::Parse {
                file: source.to_path_buf(),
                line: line_no,
                message: format!("expected {columns} tab-separated fields, found {}", fields.len()),
            });
        }
        row(line_no, &fields).map_err(|message| Error::Parse {
            file: source.to_path_buf(),
            line: line_no,
            message,
        })?;
    }
    Ok(())
}

pub(crate) fn read_file(
    path: &Path,
    columns: usize,
    row: impl FnMut(usize, &[&str]) -> std::result::Result<(), String>,
) -> Result<()> {
    let file = File::open(path)?;
    for_each_row(file, path, columns, row)
}

pub(crate) fn field<T: FromStr>(value: &str, name: &str) -> std::result::Result<T, String> {
    value
        .trim()
        .parse()
        .map_err(|_| format!("cannot parse {name} from {value:?}"))
}

pub(crate) fn token(value: &str, name: &str) -> std::result::Result<String, String> {
    let value = value.trim();
    if value.is_empty() {
        Err(format!("empty {name}"))
    } else {
        Ok(value.to_string())
    }
}
