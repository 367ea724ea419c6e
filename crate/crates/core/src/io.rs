//! LOOPTAB v1 text format.
//!
//! ```text
//! LOOPTAB 1
//! n=<order>
//! <n rows of n space-separated 0-based indices>
//! ```
//!
//! Lines starting with `#` are comments and may appear anywhere.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::table::LoopTable;

pub fn write_looptab<W: Write>(q: &LoopTable, mut w: W) -> Result<()> {
    writeln!(w, "LOOPTAB 1")?;
    writeln!(w, "n={}", q.order())?;
    for row in q.rows() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn write_looptab_file<P: AsRef<Path>>(q: &LoopTable, path: P) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_looptab(q, std::io::BufWriter::new(f))
}

pub fn read_looptab<R: BufRead>(r: R) -> Result<LoopTable> {
    let mut lines = r
        .lines()
        .collect::<std::io::Result<Vec<String>>>()?
        .into_iter()
        .filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty file".into()))?;
    if header.trim() != "LOOPTAB 1" {
        return Err(Error::Parse(format!("bad header: {header:?}")));
    }
    let nline = lines.next().ok_or_else(|| Error::Parse("missing n= line".into()))?;
    let n: usize = nline
        .trim()
        .strip_prefix("n=")
        .ok_or_else(|| Error::Parse(format!("expected n=<order>, got {nline:?}")))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad order: {e}")))?;
    let mut raw = Vec::with_capacity(n);
    for _ in 0..n {
        let line = lines.next().ok_or_else(|| Error::Parse("truncated table".into()))?;
        let row: std::result::Result<Vec<usize>, _> =
            line.split_whitespace().map(str::parse).collect();
        raw.push(row.map_err(|e| Error::Parse(format!("bad entry: {e}")))?);
    }
    LoopTable::validate(&raw)
}

pub fn read_looptab_file<P: AsRef<Path>>(path: P) -> Result<LoopTable> {
    let f = std::fs::File::open(path)?;
    read_looptab(std::io::BufReader::new(f))
}
