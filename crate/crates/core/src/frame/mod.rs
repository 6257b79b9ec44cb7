//! Typological feature data: loading, validation and preprocessing.
//!
//! A [`FeatureMatrix`] is a languages × features grid of [`FeatureValue`]s.
//! Freshly loaded matrices may still hold raw multistate tokens (e.g.
//! `Num-N`) for features that are later split by [`binarize`]; everything
//! downstream of binarization only sees `Zero`, `One` and `Missing`.

mod binarize;
mod io;
mod records;

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};

pub use binarize::{binarize, BinarizationMap, DerivedFeature};
pub use io::{
    load_cldf, load_cldf_with, load_wide_csv, load_wide_csv_with, read_wide_csv, save_wide_csv,
    write_wide_csv, LoadOptions,
};
pub use records::{load_records, read_records, LanguageRecord, RecordTable};

/// Raw markers that both mean "no usable value".
pub const MISSING_MARKERS: [&str; 3] = ["", "?", "no_cov"];

/// Default proportion of missing cells above which a language is cropped.
pub const DEFAULT_CROP_THRESHOLD: f64 = 0.25;

/// One cell of a [`FeatureMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureValue {
    Zero,
    One,
    Missing,
    /// A raw multistate token, interned in the owning matrix.
    State(u32),
}

impl FeatureValue {
    /// Numeric reading of a binary value; `None` for missing and raw states.
    #[inline]
    pub fn as_binary(self) -> Option<u8> {
        match self {
            FeatureValue::Zero => Some(0),
            FeatureValue::One => Some(1),
            _ => None,
        }
    }

    #[inline]
    pub fn is_missing(self) -> bool {
        self == FeatureValue::Missing
    }
}

/// Languages × features grid with explicit missing values.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    language_ids: Vec<String>,
    feature_ids: Vec<String>,
    cells: Vec<FeatureValue>,
    states: Vec<String>,
    index: HashMap<String, usize>,
}

impl FeatureMatrix {
    /// Builds a binary matrix from rows of `Zero`/`One`/`Missing` values.
    pub fn from_rows(
        language_ids: Vec<String>,
        feature_ids: Vec<String>,
        rows: Vec<Vec<FeatureValue>>,
    ) -> Result<Self> {
        if rows.len() != language_ids.len() {
            return Err(Error::parse(
                "rows",
                format!(
                    "{} language ids but {} rows",
                    language_ids.len(),
                    rows.len()
                ),
            ));
        }
        let d = feature_ids.len();
        let mut cells = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != d {
                return Err(Error::parse(
                    format!("row {} ({})", i + 1, language_ids[i]),
                    format!("expected {d} cells, found {}", row.len()),
                ));
            }
            if let Some(FeatureValue::State(_)) =
                row.iter().find(|v| matches!(v, FeatureValue::State(_)))
            {
                return Err(Error::parse(
                    format!("row {} ({})", i + 1, language_ids[i]),
                    "raw multistate values need a token table; load from CSV instead",
                ));
            }
            cells.extend(row);
        }
        Self::from_parts(language_ids, feature_ids, cells, Vec::new())
    }

    /// Convenience constructor for tests and fixtures: `0`, `1`, or `None`.
    pub fn from_bits(
        language_ids: &[&str],
        feature_ids: &[&str],
        rows: &[Vec<Option<u8>>],
    ) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| match c {
                        Some(0) => FeatureValue::Zero,
                        Some(_) => FeatureValue::One,
                        None => FeatureValue::Missing,
                    })
                    .collect()
            })
            .collect();
        Self::from_rows(
            language_ids.iter().map(|s| s.to_string()).collect(),
            feature_ids.iter().map(|s| s.to_string()).collect(),
            rows,
        )
    }

    pub(crate) fn from_parts(
        language_ids: Vec<String>,
        feature_ids: Vec<String>,
        cells: Vec<FeatureValue>,
        states: Vec<String>,
    ) -> Result<Self> {
        debug_assert_eq!(cells.len(), language_ids.len() * feature_ids.len());
        let mut index = HashMap::with_capacity(language_ids.len());
        for (i, id) in language_ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateLanguage {
                    id: id.clone(),
                    location: format!("row {}", i + 1),
                });
            }
        }
        let mut seen = HashSet::with_capacity(feature_ids.len());
        for (j, id) in feature_ids.iter().enumerate() {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateFeature {
                    id: id.clone(),
                    location: format!("column {}", j + 2),
                });
            }
        }
        Ok(FeatureMatrix {
            language_ids,
            feature_ids,
            cells,
            states,
            index,
        })
    }

    pub fn language_ids(&self) -> &[String] {
        &self.language_ids
    }

    pub fn feature_ids(&self) -> &[String] {
        &self.feature_ids
    }

    pub fn n_languages(&self) -> usize {
        self.language_ids.len()
    }

    /// Number of features, `d`.
    pub fn dim(&self) -> usize {
        self.feature_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.language_ids.is_empty()
    }

    pub fn position(&self, language: &str) -> Option<usize> {
        self.index.get(language).copied()
    }

    pub fn feature_position(&self, feature: &str) -> Option<usize> {
        self.feature_ids.iter().position(|f| f == feature)
    }

    pub fn row(&self, i: usize) -> &[FeatureValue] {
        let d = self.dim();
        &self.cells[i * d..(i + 1) * d]
    }

    pub fn get(&self, language: usize, feature: usize) -> FeatureValue {
        self.cells[language * self.dim() + feature]
    }

    /// Text of a cell as it would appear in a CSV file (`?` for missing).
    pub fn token(&self, value: FeatureValue) -> &str {
        match value {
            FeatureValue::Zero => "0",
            FeatureValue::One => "1",
            FeatureValue::Missing => "?",
            FeatureValue::State(s) => &self.states[s as usize],
        }
    }

    /// True when no raw multistate token remains.
    pub fn is_binary(&self) -> bool {
        !self
            .cells
            .iter()
            .any(|v| matches!(v, FeatureValue::State(_)))
    }

    /// Fails with [`Error::NotBinary`] on the first remaining multistate cell.
    pub fn ensure_binary(&self) -> Result<()> {
        match self
            .cells
            .iter()
            .position(|v| matches!(v, FeatureValue::State(_)))
        {
            None => Ok(()),
            Some(at) => {
                let (i, j) = (at / self.dim(), at % self.dim());
                Err(Error::NotBinary {
                    language: self.language_ids[i].clone(),
                    feature: self.feature_ids[j].clone(),
                    value: self.token(self.cells[at]).to_string(),
                })
            }
        }
    }

    pub fn missing_count(&self, language: usize) -> usize {
        self.row(language).iter().filter(|v| v.is_missing()).count()
    }

    /// Share of missing cells for a language; 0 when `d = 0`.
    pub fn missing_proportion(&self, language: usize) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        self.missing_count(language) as f64 / self.dim() as f64
    }

    /// Keeps the languages for which `keep` returns true, in order.
    pub fn retain_languages(&self, mut keep: impl FnMut(usize, &str) -> bool) -> FeatureMatrix {
        let d = self.dim();
        let mut ids = Vec::new();
        let mut cells = Vec::new();
        for (i, id) in self.language_ids.iter().enumerate() {
            if keep(i, id) {
                ids.push(id.clone());
                cells.extend_from_slice(&self.cells[i * d..(i + 1) * d]);
            }
        }
        let index = ids
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        FeatureMatrix {
            language_ids: ids,
            feature_ids: self.feature_ids.clone(),
            cells,
            states: self.states.clone(),
            index,
        }
    }

    /// Restricts to the given languages, in the given order.
    pub fn select_languages<S: AsRef<str>>(&self, ids: &[S]) -> Result<FeatureMatrix> {
        let unknown: Vec<String> = ids
            .iter()
            .filter(|id| self.position(id.as_ref()).is_none())
            .map(|id| id.as_ref().to_string())
            .collect();
        if !unknown.is_empty() {
            return Err(Error::UnknownLanguage(unknown));
        }
        let d = self.dim();
        let mut cells = Vec::with_capacity(ids.len() * d);
        for id in ids {
            cells.extend_from_slice(self.row(self.index[id.as_ref()]));
        }
        Self::from_parts(
            ids.iter().map(|s| s.as_ref().to_string()).collect(),
            self.feature_ids.clone(),
            cells,
            self.states.clone(),
        )
    }
}

/// Cell-for-cell equality on ids and cell tokens (interning order is ignored).
impl PartialEq for FeatureMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.language_ids == other.language_ids
            && self.feature_ids == other.feature_ids
            && self
                .cells
                .iter()
                .zip(&other.cells)
                .all(|(&a, &b)| self.token(a) == other.token(b))
    }
}

/// Removes every language whose missing proportion is strictly above `threshold`.
pub fn crop_languages(matrix: &FeatureMatrix, threshold: f64) -> FeatureMatrix {
    matrix.retain_languages(|i, _| matrix.missing_proportion(i) <= threshold)
}

/// Removes non-leaf Glottolog nodes, i.e. languages with `child_count > 0`.
pub fn remove_macrolanguages(
    matrix: &FeatureMatrix,
    records: &RecordTable,
) -> Result<FeatureMatrix> {
    let mut keep = Vec::with_capacity(matrix.n_languages());
    for id in matrix.language_ids() {
        let record = records
            .get(id)
            .ok_or_else(|| Error::Metadata(format!("no metadata record for language {id}")))?;
        let children = record
            .child_count
            .ok_or_else(|| Error::Metadata(format!("no child count for language {id}")))?;
        keep.push(children == 0);
    }
    Ok(matrix.retain_languages(|i, _| keep[i]))
}

/// Restricts the matrix to `feature_ids`, in that order.
pub fn subselect_features<S: AsRef<str>>(
    matrix: &FeatureMatrix,
    feature_ids: &[S],
) -> Result<FeatureMatrix> {
    let mut columns = Vec::with_capacity(feature_ids.len());
    for f in feature_ids {
        let f = f.as_ref();
        let j = matrix
            .feature_position(f)
            .ok_or_else(|| Error::UnknownFeature(f.to_string()))?;
        columns.push(j);
    }
    let mut cells = Vec::with_capacity(matrix.n_languages() * columns.len());
    for i in 0..matrix.n_languages() {
        let row = matrix.row(i);
        cells.extend(columns.iter().map(|&j| row[j]));
    }
    FeatureMatrix::from_parts(
        matrix.language_ids.clone(),
        feature_ids.iter().map(|f| f.as_ref().to_string()).collect(),
        cells,
        matrix.states.clone(),
    )
}
