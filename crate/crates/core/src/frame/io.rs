use std::collections::{HashMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use super::{BinarizationMap, FeatureMatrix, FeatureValue, RecordTable, MISSING_MARKERS};
use crate::error::{Error, Result};

/// Which features may hold raw multistate tokens at load time.
#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub multistate_features: HashSet<String>,
}

impl LoadOptions {
    /// Allows multistate tokens for every source feature of `map`.
    pub fn for_map(map: &BinarizationMap) -> Self {
        LoadOptions {
            multistate_features: map.source_features().map(str::to_string).collect(),
        }
    }
}

#[derive(Default)]
struct Interner {
    states: Vec<String>,
    lookup: HashMap<String, u32>,
}

impl Interner {
    fn intern(&mut self, token: &str) -> FeatureValue {
        if let Some(&id) = self.lookup.get(token) {
            return FeatureValue::State(id);
        }
        let id = self.states.len() as u32;
        self.states.push(token.to_string());
        self.lookup.insert(token.to_string(), id);
        FeatureValue::State(id)
    }
}

fn parse_cell(
    token: &str,
    multistate: bool,
    interner: &mut Interner,
    location: impl FnOnce() -> String,
) -> Result<FeatureValue> {
    let token = token.trim();
    match token {
        "0" => Ok(FeatureValue::Zero),
        "1" => Ok(FeatureValue::One),
        t if MISSING_MARKERS.contains(&t) => Ok(FeatureValue::Missing),
        t if multistate => Ok(interner.intern(t)),
        t => Err(Error::parse(
            location(),
            format!("unrecognized value {t:?}"),
        )),
    }
}

/// Loads a wide CSV where every cell must be `0`, `1` or a missing marker.
pub fn load_wide_csv(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    load_wide_csv_with(path, &LoadOptions::default())
}

pub fn load_wide_csv_with(path: impl AsRef<Path>, options: &LoadOptions) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_wide_csv(file, options)
}

/// Parses a wide CSV: header `glottocode,<feature>...`, one language per row.
pub fn read_wide_csv<R: Read>(reader: R, options: &LoadOptions) -> Result<FeatureMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.is_empty() {
        return Err(Error::parse("header", "empty header"));
    }
    let feature_ids: Vec<String> = header
        .iter()
        .skip(1)
        .map(|h| h.trim().to_string())
        .collect();
    let multistate: Vec<bool> = feature_ids
        .iter()
        .map(|f| options.multistate_features.contains(f))
        .collect();
    let d = feature_ids.len();

    let mut interner = Interner::default();
    let mut language_ids = Vec::new();
    let mut cells = Vec::new();
    for (n, record) in rdr.records().enumerate() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(n as u64 + 2);
        if record.len() != d + 1 {
            return Err(Error::parse(
                format!("line {line}"),
                format!(
                    "ragged row: expected {} cells, found {}",
                    d + 1,
                    record.len()
                ),
            ));
        }
        let id = record[0].trim().to_string();
        if id.is_empty() {
            return Err(Error::parse(
                format!("line {line}, column 1"),
                "empty language id",
            ));
        }
        language_ids.push(id);
        for (j, token) in record.iter().skip(1).enumerate() {
            cells.push(parse_cell(token, multistate[j], &mut interner, || {
                format!("line {line}, column {} ({})", j + 2, feature_ids[j])
            })?);
        }
    }
    let matrix = FeatureMatrix::from_parts(language_ids, feature_ids, cells, interner.states);
    // Report duplicates with file coordinates rather than row indices.
    matrix.map_err(|e| match e {
        Error::DuplicateLanguage { id, location } => Error::DuplicateLanguage {
            id,
            location: location.replace("row ", "data row "),
        },
        other => other,
    })
}

/// Writes the matrix as wide CSV; missing cells become `?`.
pub fn write_wide_csv<W: Write>(matrix: &FeatureMatrix, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = Vec::with_capacity(matrix.dim() + 1);
    header.push("glottocode");
    header.extend(matrix.feature_ids().iter().map(String::as_str));
    wtr.write_record(&header)?;
    for (i, id) in matrix.language_ids().iter().enumerate() {
        let mut row = Vec::with_capacity(matrix.dim() + 1);
        row.push(id.as_str());
        row.extend(matrix.row(i).iter().map(|&v| matrix.token(v)));
        wtr.write_record(&row)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn save_wide_csv(matrix: &FeatureMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_wide_csv(matrix, std::io::BufWriter::new(file))
}

/// Loads a CLDF `values.csv` / `languages.csv` pair.
pub fn load_cldf(
    values_path: impl AsRef<Path>,
    languages_path: impl AsRef<Path>,
) -> Result<(FeatureMatrix, RecordTable)> {
    load_cldf_with(values_path, languages_path, &LoadOptions::default())
}

pub fn load_cldf_with(
    values_path: impl AsRef<Path>,
    languages_path: impl AsRef<Path>,
    options: &LoadOptions,
) -> Result<(FeatureMatrix, RecordTable)> {
    let values_path = values_path.as_ref();
    let file = std::fs::File::open(values_path).map_err(|e| Error::io(values_path, e))?;
    let matrix = read_cldf_values(file, options)?;
    let records = super::load_records(languages_path)?;
    let joined = records.outer_join(matrix.language_ids());
    Ok((matrix, joined))
}

/// Pivots long `(Language_ID, Parameter_ID, Value)` records into a matrix.
///
/// Languages and features appear in order of first occurrence; pairs with
/// no record are missing.
pub(crate) fn read_cldf_values<R: Read>(reader: R, options: &LoadOptions) -> Result<FeatureMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::parse("values header", format!("missing column {name}")))
    };
    let (lang_col, param_col, value_col) = (
        column("Language_ID")?,
        column("Parameter_ID")?,
        column("Value")?,
    );

    let mut languages: Vec<String> = Vec::new();
    let mut lang_index: HashMap<String, usize> = HashMap::new();
    let mut features: Vec<String> = Vec::new();
    let mut feat_index: HashMap<String, usize> = HashMap::new();
    let mut seen: HashMap<(usize, usize), String> = HashMap::new();
    let mut interner = Interner::default();
    let mut entries: Vec<(usize, usize, FeatureValue)> = Vec::new();

    for (n, record) in rdr.records().enumerate() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(n as u64 + 2);
        let field = |c: usize| record.get(c).map(str::trim).unwrap_or("");
        let (lang, param, raw) = (field(lang_col), field(param_col), field(value_col));
        if lang.is_empty() || param.is_empty() {
            return Err(Error::parse(
                format!("values line {line}"),
                "empty Language_ID or Parameter_ID",
            ));
        }
        let li = *lang_index.entry(lang.to_string()).or_insert_with(|| {
            languages.push(lang.to_string());
            languages.len() - 1
        });
        let fi = *feat_index.entry(param.to_string()).or_insert_with(|| {
            features.push(param.to_string());
            features.len() - 1
        });
        if let Some(previous) = seen.get(&(li, fi)) {
            if previous != raw {
                return Err(Error::Conflict {
                    language: lang.to_string(),
                    feature: param.to_string(),
                    first: previous.clone(),
                    second: raw.to_string(),
                });
            }
            continue;
        }
        seen.insert((li, fi), raw.to_string());
        let value = parse_cell(
            raw,
            options.multistate_features.contains(param),
            &mut interner,
            || format!("values line {line} ({lang}, {param})"),
        )?;
        entries.push((li, fi, value));
    }

    let d = features.len();
    let mut cells = vec![FeatureValue::Missing; languages.len() * d];
    for (li, fi, v) in entries {
        cells[li * d + fi] = v;
    }
    FeatureMatrix::from_parts(languages, features, cells, interner.states)
}
