//! Text format for databases and query sets.
//!
//! UTF-8 lines; blank lines and lines starting with `#` are skipped. Each
//! record is `<id>\t<d>:<f> <d>:<f> ...` with decimal integers and 1-based
//! dimension indices.

use std::io::{BufRead, Write};

use log::warn;

use crate::descriptor::{Database, Descriptor};
use crate::error::{Error, Result};

/// Parses one record line.
pub fn parse_record(line: &str) -> Result<(u64, Descriptor)> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    let (id, body) = line
        .split_once('\t')
        .ok_or_else(|| Error::Malformed("expected <id><TAB><pairs>".into()))?;
    let id = id
        .trim()
        .parse::<u64>()
        .map_err(|_| Error::Malformed(format!("bad id {id:?}")))?;
    Ok((id, body.parse()?))
}

/// Reads every record, reporting the 1-based line number on failure.
pub fn read_records<R: BufRead>(reader: R) -> Result<Vec<(u64, Descriptor)>> {
    let mut out = Vec::new();
    for (no, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim_start();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        out.push(parse_record(&line).map_err(|e| e.at_line(no + 1))?);
    }
    Ok(out)
}

/// Reads a database; IDs must be unique.
pub fn read_database<R: BufRead>(reader: R) -> Result<Database> {
    let records = read_records(reader)?;
    let empty = records.iter().filter(|(_, d)| d.is_empty()).count();
    if empty > 0 {
        warn!("{empty} empty descriptor(s) will never match and are left out of indexes");
    }
    Database::new(records)
}

pub fn write_record<W: Write>(out: &mut W, id: u64, x: &Descriptor) -> std::io::Result<()> {
    writeln!(out, "{id}\t{x}")
}

pub fn write_database<W: Write>(out: &mut W, db: &Database) -> std::io::Result<()> {
    for (id, x) in db.iter() {
        write_record(out, id, x)?;
    }
    Ok(())
}
