use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// Per-language metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageRecord {
    pub glottocode: String,
    pub name: String,
    pub family: Option<String>,
    pub genus: Option<String>,
    pub latitude: Option<f64>,
    pub longitude: Option<f64>,
    /// Number of descendants in Glottolog; `0` for leaf languages.
    pub child_count: Option<u32>,
}

impl LanguageRecord {
    /// A record with only an id and `child_count = 0`.
    pub fn leaf(glottocode: &str) -> Self {
        LanguageRecord {
            glottocode: glottocode.to_string(),
            name: String::new(),
            family: None,
            genus: None,
            latitude: None,
            longitude: None,
            child_count: Some(0),
        }
    }

    /// A record with every optional field absent.
    pub fn bare(glottocode: &str) -> Self {
        LanguageRecord {
            child_count: None,
            ..Self::leaf(glottocode)
        }
    }

    pub fn coordinates(&self) -> Option<(f64, f64)> {
        Some((self.latitude?, self.longitude?))
    }
}

/// Metadata records keyed by glottocode.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RecordTable {
    records: Vec<LanguageRecord>,
    index: HashMap<String, usize>,
}

impl RecordTable {
    pub fn new(records: Vec<LanguageRecord>) -> Result<Self> {
        let mut index = HashMap::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if index.insert(r.glottocode.clone(), i).is_some() {
                return Err(Error::DuplicateLanguage {
                    id: r.glottocode.clone(),
                    location: format!("metadata record {}", i + 1),
                });
            }
            if let Some(lat) = r.latitude {
                if !(-90.0..=90.0).contains(&lat) {
                    return Err(Error::InvalidCoordinate(format!(
                        "{}: latitude {lat} outside [-90, 90]",
                        r.glottocode
                    )));
                }
            }
            if let Some(lon) = r.longitude {
                if !(-180.0..=180.0).contains(&lon) {
                    return Err(Error::InvalidCoordinate(format!(
                        "{}: longitude {lon} outside [-180, 180]",
                        r.glottocode
                    )));
                }
            }
        }
        Ok(RecordTable { records, index })
    }

    pub fn get(&self, glottocode: &str) -> Option<&LanguageRecord> {
        self.index.get(glottocode).map(|&i| &self.records[i])
    }

    pub fn records(&self) -> &[LanguageRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &LanguageRecord> {
        self.records.iter()
    }

    /// Records for `ids` in that order; ids without a record get [`LanguageRecord::bare`].
    pub fn outer_join<S: AsRef<str>>(&self, ids: &[S]) -> RecordTable {
        let records = ids
            .iter()
            .map(|id| {
                self.get(id.as_ref())
                    .cloned()
                    .unwrap_or_else(|| LanguageRecord::bare(id.as_ref()))
            })
            .collect();
        RecordTable::new(records).expect("ids of a join are unique")
    }

    pub fn has_any_family(&self) -> bool {
        self.records.iter().any(|r| r.family.is_some())
    }
}

// Accepted header spellings, lowercase. The plain names come first, then the
// Grambank/Glottolog CLDF ones.
const ID_COLUMNS: &[&str] = &["glottocode", "id", "language_id"];
const NAME_COLUMNS: &[&str] = &["name"];
const FAMILY_COLUMNS: &[&str] = &["family", "family_name"];
const GENUS_COLUMNS: &[&str] = &["genus", "genus_name"];
const LAT_COLUMNS: &[&str] = &["latitude", "lat"];
const LON_COLUMNS: &[&str] = &["longitude", "lon", "long"];
const CHILD_COLUMNS: &[&str] = &["child_count", "child_language_count", "children"];

fn find_column(headers: &[String], names: &[&str]) -> Option<usize> {
    names
        .iter()
        .find_map(|n| headers.iter().position(|h| h == n))
}

/// Reads a metadata CSV (plain or CLDF `languages.csv`).
pub fn load_records(path: impl AsRef<Path>) -> Result<RecordTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_records(file)
}

pub fn read_records<R: Read>(reader: R) -> Result<RecordTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(false)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()?
        .iter()
        .map(|h| h.trim().to_ascii_lowercase())
        .collect();
    // CLDF languages tables carry both ID and Glottocode; prefer the latter.
    let id_col = find_column(&headers, ID_COLUMNS)
        .ok_or_else(|| Error::parse("metadata header", "no glottocode/id column"))?;
    let name_col = find_column(&headers, NAME_COLUMNS);
    let family_col = find_column(&headers, FAMILY_COLUMNS);
    let genus_col = find_column(&headers, GENUS_COLUMNS);
    let lat_col = find_column(&headers, LAT_COLUMNS);
    let lon_col = find_column(&headers, LON_COLUMNS);
    let child_col = find_column(&headers, CHILD_COLUMNS);

    let mut records = Vec::new();
    for (n, row) in rdr.records().enumerate() {
        let row = row?;
        let line = n + 2;
        let text = |col: Option<usize>| -> Option<String> {
            col.and_then(|c| row.get(c))
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
        };
        let number = |col: Option<usize>, what: &str| -> Result<Option<f64>> {
            text(col)
                .map(|s| {
                    s.parse::<f64>().map_err(|_| {
                        Error::parse(format!("metadata line {line}"), format!("bad {what} {s:?}"))
                    })
                })
                .transpose()
        };
        let glottocode = text(Some(id_col))
            .ok_or_else(|| Error::parse(format!("metadata line {line}"), "empty language id"))?;
        let child_count = text(child_col)
            .map(|s| {
                s.parse::<u32>().map_err(|_| {
                    Error::parse(
                        format!("metadata line {line}"),
                        format!("bad child count {s:?}"),
                    )
                })
            })
            .transpose()?;
        records.push(LanguageRecord {
            glottocode,
            name: text(name_col).unwrap_or_default(),
            family: text(family_col),
            genus: text(genus_col),
            latitude: number(lat_col, "latitude")?,
            longitude: number(lon_col, "longitude")?,
            child_count,
        });
    }
    RecordTable::new(records)
}
