use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::Sample;
use crate::error::{Error, Result};

/// A parsed sample file: language ids plus `# key=value` header pairs.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SampleFile {
    pub languages: Vec<String>,
    pub header: Vec<(String, String)>,
}

impl SampleFile {
    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// Writes one language per line after a provenance comment block.
///
/// `method`, `k`, `seed` and (for extensions) `base_size`/`added` come from
/// the sample; `extra` is appended verbatim.
pub fn write_sample<W: Write>(
    sample: &Sample,
    extra: &[(String, String)],
    mut writer: W,
) -> Result<()> {
    let io_err = |e| Error::io("<sample writer>", e);
    writeln!(writer, "# method={}", sample.method).map_err(io_err)?;
    writeln!(writer, "# k={}", sample.k).map_err(io_err)?;
    match sample.seed {
        Some(seed) => writeln!(writer, "# seed={seed}"),
        None => writeln!(writer, "# seed=none"),
    }
    .map_err(io_err)?;
    if sample.base_len > 0 {
        writeln!(writer, "# base_size={}", sample.base_len).map_err(io_err)?;
        writeln!(writer, "# added={}", sample.additions().join(",")).map_err(io_err)?;
    }
    for (k, v) in extra {
        writeln!(writer, "# {k}={v}").map_err(io_err)?;
    }
    for id in &sample.languages {
        writeln!(writer, "{id}").map_err(io_err)?;
    }
    Ok(())
}

/// Reads a sample file: blank lines and `#` comments are skipped.
pub fn read_sample(path: impl AsRef<Path>) -> Result<SampleFile> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = SampleFile::default();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.split_once('=') {
                out.header
                    .push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let id = line.split([',', '\t', ' ']).next().unwrap_or(line);
        if out.languages.iter().any(|x| x == id) {
            return Err(Error::DuplicateLanguage {
                id: id.to_string(),
                location: path.display().to_string(),
            });
        }
        out.languages.push(id.to_string());
    }
    Ok(out)
}

/// Reads a `(language_id, count)` CSV; a header row is optional.
pub fn read_frequency_list<R: Read>(reader: R) -> Result<Vec<(String, u64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for (n, row) in rdr.records().enumerate() {
        let row = row?;
        if row.len() < 2 {
            return Err(Error::parse(
                format!("frequency list line {}", n + 1),
                "expected language_id,count",
            ));
        }
        match row[1].parse::<u64>() {
            Ok(count) => out.push((row[0].to_string(), count)),
            Err(_) if n == 0 => continue,
            Err(_) => {
                return Err(Error::parse(
                    format!("frequency list line {}", n + 1),
                    format!("bad count {:?}", &row[1]),
                ))
            }
        }
    }
    Ok(out)
}
