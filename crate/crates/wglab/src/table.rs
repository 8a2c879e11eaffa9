//! The sweep table on disk: a header line plus one row per grid point,
//! comma separated, LF terminated, floats in shortest round-trip form.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sweep::SweepRow;

/// Column names, in order.
pub const HEADER: [&str; 9] = [
    "c",
    "n",
    "d",
    "tv_mc",
    "tv_stderr",
    "tv_limit",
    "frac_in_q",
    "runtime_s",
    "seed",
];

fn csv_error(path: &Path, source: csv::Error) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Serializes `rows` with a header into `out`.
pub fn write_rows_to<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    if rows.is_empty() {
        w.write_record(HEADER)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a table produced by [`write_rows_to`].
pub fn read_rows_from<R: Read>(input: R) -> csv::Result<Vec<SweepRow>> {
    let mut r = csv::ReaderBuilder::new().from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(HEADER) {
        return Err(csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        )));
    }
    r.deserialize().collect()
}

/// Writes `rows` to `path`. Rows must be nonempty.
pub fn write_rows(rows: &[SweepRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::config("no rows to write"));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_rows_to(rows, &mut out).map_err(|e| csv_error(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

/// Reads a sweep table from `path`.
pub fn read_rows(path: &Path) -> Result<Vec<SweepRow>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_rows_from(file).map_err(|e| csv_error(path, e))
}
