//! Distance matrix CSV.
//!
//! ```text
//! # kind=typological
//! # normalized=false
//! language_id,abcd1234,efgh5678
//! abcd1234,0.0000000000000000e0,1.4142135623730951e0
//! efgh5678,1.4142135623730951e0,0.0000000000000000e0
//! ```
//!
//! Values carry 17 significant digits so `f64` round-trips exactly.
//! Extra `# key=value` lines (provenance) are written verbatim and ignored
//! on read.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::{DistanceKind, DistanceMatrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub fn write_matrix<T: Scalar, W: Write>(
    dm: &DistanceMatrix<T>,
    extra_header: &[(String, String)],
    mut writer: W,
) -> Result<()> {
    let io_err = |e| Error::io("<matrix writer>", e);
    writeln!(writer, "# kind={}", dm.kind()).map_err(io_err)?;
    writeln!(writer, "# normalized={}", dm.is_normalized()).map_err(io_err)?;
    for (k, v) in extra_header {
        writeln!(writer, "# {k}={v}").map_err(io_err)?;
    }
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["language_id".to_string()];
    header.extend(dm.language_ids().iter().cloned());
    wtr.write_record(&header)?;
    for (i, id) in dm.language_ids().iter().enumerate() {
        let mut row = Vec::with_capacity(dm.len() + 1);
        row.push(id.clone());
        row.extend(dm.row(i).iter().map(|x| format!("{x:.16e}")));
        wtr.write_record(&row)?;
    }
    wtr.flush().map_err(io_err)?;
    Ok(())
}

pub fn save_matrix<T: Scalar>(
    dm: &DistanceMatrix<T>,
    extra_header: &[(String, String)],
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_matrix(dm, extra_header, std::io::BufWriter::new(file))
}

pub fn load_matrix<T: Scalar>(path: impl AsRef<Path>) -> Result<DistanceMatrix<T>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_matrix(file)
}

pub fn read_matrix<T: Scalar, R: Read>(reader: R) -> Result<DistanceMatrix<T>> {
    let mut kind = DistanceKind::Custom;
    let mut normalized = false;
    let mut body = String::new();
    for line in BufReader::new(reader).lines() {
        let line = line.map_err(|e| Error::io("<matrix reader>", e))?;
        if let Some(comment) = line.trim_start().strip_prefix('#') {
            if let Some((k, v)) = comment.trim().split_once('=') {
                match k.trim() {
                    "kind" => kind = v.trim().parse()?,
                    "normalized" => {
                        normalized = v.trim().parse().map_err(|_| {
                            Error::parse("matrix header", format!("bad normalized flag {v:?}"))
                        })?
                    }
                    _ => {}
                }
            }
            continue;
        }
        body.push_str(&line);
        body.push('\n');
    }

    let mut rdr = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let ids: Vec<String> = rdr
        .headers()?
        .iter()
        .skip(1)
        .map(|s| s.trim().to_string())
        .collect();
    let n = ids.len();
    let mut values = Vec::with_capacity(n * n);
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row_id = record.get(0).unwrap_or("").trim();
        if i >= n || row_id != ids[i] {
            return Err(Error::parse(
                format!("matrix row {}", i + 1),
                format!("row id {row_id:?} does not match the header order"),
            ));
        }
        if record.len() != n + 1 {
            return Err(Error::parse(
                format!("matrix row {}", i + 1),
                format!("expected {} cells, found {}", n + 1, record.len()),
            ));
        }
        for (j, cell) in record.iter().skip(1).enumerate() {
            let x: T = cell.trim().parse().map_err(|_| {
                Error::parse(
                    format!("matrix row {}, column {}", i + 1, j + 2),
                    format!("bad number {cell:?}"),
                )
            })?;
            values.push(x);
        }
    }
    if values.len() != n * n {
        return Err(Error::parse("matrix", format!("expected {n} rows")));
    }
    DistanceMatrix::new(ids, values, kind, normalized)
}
