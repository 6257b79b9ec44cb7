use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::Read;
use std::path::Path;

use super::{FeatureMatrix, FeatureValue};
use crate::error::{Error, Result};

const GRAMBANK_DEFAULT: &str = include_str!("../../data/grambank_binarization.csv");

/// One binary feature derived from a multistate source feature.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedFeature {
    pub id: String,
    /// Raw source token → binary value (`Missing` allowed).
    pub mapping: HashMap<String, FeatureValue>,
}

/// Splits multistate features into binary ones.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BinarizationMap {
    entries: Vec<(String, Vec<DerivedFeature>)>,
}

impl BinarizationMap {
    /// The split of Grambank's six multistate word-order features
    /// (GB024, GB025, GB065, GB130, GB193, GB203) into `a`/`b` features.
    pub fn grambank_default() -> Self {
        Self::from_reader(GRAMBANK_DEFAULT.as_bytes()).expect("bundled binarization map is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::from_reader(file)
    }

    /// Reads `source_feature,derived_feature,raw_value,mapped_value` rows.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        for (n, row) in rdr.records().enumerate() {
            let row = row?;
            if row.len() != 4 {
                return Err(Error::parse(
                    format!("binarization map row {}", n + 1),
                    "expected 4 columns",
                ));
            }
            let mapped = match &row[3] {
                "0" => FeatureValue::Zero,
                "1" => FeatureValue::One,
                "?" | "" | "no_cov" => FeatureValue::Missing,
                other => {
                    return Err(Error::Config(format!(
                        "binarization map row {}: mapped value {other:?} is not 0, 1 or ?",
                        n + 1
                    )))
                }
            };
            rows.push((
                row[0].to_string(),
                row[1].to_string(),
                row[2].to_string(),
                mapped,
            ));
        }
        Self::from_rows(rows)
    }

    /// Builds and validates a map from `(source, derived, raw, mapped)` rows.
    pub fn from_rows(rows: Vec<(String, String, String, FeatureValue)>) -> Result<Self> {
        let mut entries: Vec<(String, Vec<DerivedFeature>)> = Vec::new();
        let mut owner: HashMap<String, String> = HashMap::new();
        for (source, derived, raw, mapped) in rows {
            if matches!(mapped, FeatureValue::State(_)) {
                return Err(Error::Config(format!(
                    "{derived}: mapped values must be binary or missing"
                )));
            }
            if let Some(prev) = owner.get(&derived) {
                if *prev != source {
                    return Err(Error::Config(format!(
                        "derived feature {derived} claimed by both {prev} and {source}"
                    )));
                }
            }
            owner.insert(derived.clone(), source.clone());
            let pos = match entries.iter().position(|(s, _)| *s == source) {
                Some(p) => p,
                None => {
                    entries.push((source.clone(), Vec::new()));
                    entries.len() - 1
                }
            };
            let derived_list = &mut entries[pos].1;
            let feature = match derived_list.iter_mut().position(|d| d.id == derived) {
                Some(p) => &mut derived_list[p],
                None => {
                    derived_list.push(DerivedFeature {
                        id: derived.clone(),
                        mapping: HashMap::new(),
                    });
                    derived_list.last_mut().unwrap()
                }
            };
            if let Some(prev) = feature.mapping.insert(raw.clone(), mapped) {
                if prev != mapped {
                    return Err(Error::Config(format!(
                        "{derived}: raw value {raw:?} mapped twice with different images"
                    )));
                }
            }
        }

        let sources: HashSet<&str> = entries.iter().map(|(s, _)| s.as_str()).collect();
        for (source, derived) in &entries {
            let domain: BTreeSet<&String> = derived[0].mapping.keys().collect();
            for d in derived {
                if sources.contains(d.id.as_str()) {
                    return Err(Error::Config(format!(
                        "derived feature {} collides with a source feature",
                        d.id
                    )));
                }
                let this: BTreeSet<&String> = d.mapping.keys().collect();
                if this != domain {
                    return Err(Error::Config(format!(
                        "{source}: derived features {} and {} map different raw values",
                        derived[0].id, d.id
                    )));
                }
            }
        }
        Ok(BinarizationMap { entries })
    }

    pub fn source_features(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(s, _)| s.as_str())
    }

    pub fn derived(&self, source: &str) -> Option<&[DerivedFeature]> {
        self.entries
            .iter()
            .find(|(s, _)| s == source)
            .map(|(_, d)| d.as_slice())
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Drops entries whose source feature is not in `features`.
    pub fn restricted_to<S: AsRef<str>>(&self, features: &[S]) -> BinarizationMap {
        let present: HashSet<&str> = features.iter().map(AsRef::as_ref).collect();
        BinarizationMap {
            entries: self
                .entries
                .iter()
                .filter(|(s, _)| present.contains(s.as_str()))
                .cloned()
                .collect(),
        }
    }
}

/// Replaces each mapped source feature, in place, by its derived features.
///
/// A missing source value is missing in every derived feature.
pub fn binarize(matrix: &FeatureMatrix, map: &BinarizationMap) -> Result<FeatureMatrix> {
    let mut columns: Vec<(usize, Option<&DerivedFeature>)> = Vec::new();
    let mut feature_ids = Vec::new();
    for source in map.source_features() {
        if matrix.feature_position(source).is_none() {
            return Err(Error::Config(format!(
                "binarization map references absent feature {source}"
            )));
        }
    }
    for (j, f) in matrix.feature_ids().iter().enumerate() {
        match map.derived(f) {
            Some(derived) => {
                for d in derived {
                    columns.push((j, Some(d)));
                    feature_ids.push(d.id.clone());
                }
            }
            None => {
                columns.push((j, None));
                feature_ids.push(f.clone());
            }
        }
    }

    let mut cells = Vec::with_capacity(matrix.n_languages() * columns.len());
    for i in 0..matrix.n_languages() {
        let row = matrix.row(i);
        for &(j, derived) in &columns {
            let v = row[j];
            let out = match derived {
                None => v,
                Some(_) if v.is_missing() => FeatureValue::Missing,
                Some(d) => {
                    let token = matrix.token(v);
                    *d.mapping.get(token).ok_or_else(|| {
                        Error::Config(format!(
                            "no binarization of value {token:?} of {} (language {}) into {}",
                            matrix.feature_ids()[j],
                            matrix.language_ids()[i],
                            d.id
                        ))
                    })?
                }
            };
            cells.push(out);
        }
    }
    FeatureMatrix::from_parts(
        matrix.language_ids().to_vec(),
        feature_ids,
        cells,
        matrix.states.clone(),
    )
    .map_err(|e| match e {
        Error::DuplicateFeature { id, .. } => Error::Config(format!(
            "derived feature {id} collides with an existing feature"
        )),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{read_wide_csv, LoadOptions};
    use FeatureValue::*;

    fn load(csv: &str, map: &BinarizationMap) -> FeatureMatrix {
        read_wide_csv(csv.as_bytes(), &LoadOptions::for_map(map)).unwrap()
    }

    #[test]
    fn default_map_covers_six_features() {
        let map = BinarizationMap::grambank_default();
        let sources: Vec<&str> = map.source_features().collect();
        assert_eq!(
            sources,
            ["GB024", "GB025", "GB065", "GB130", "GB193", "GB203"]
        );
        for s in sources {
            assert_eq!(map.derived(s).unwrap().len(), 2);
        }
    }

    #[test]
    fn num_n_splits_to_one_zero() {
        let map = BinarizationMap::grambank_default();
        let m = load("glottocode,GB020,GB024\nx,1,Num-N\ny,0,?\nz,?,both\n", &map);
        let b = binarize(&m.clone(), &map.restricted_to(m.feature_ids())).unwrap();
        assert_eq!(b.feature_ids(), ["GB020", "GB024a", "GB024b"]);
        assert_eq!(b.row(0), [One, One, Zero]);
        assert_eq!(b.row(1), [Zero, Missing, Missing]);
        assert_eq!(b.row(2), [Missing, One, One]);
        assert!(b.is_binary());
        assert_eq!(b.n_languages(), m.n_languages());
    }

    #[test]
    fn numeric_codes_are_mapped_too() {
        let map = BinarizationMap::grambank_default().restricted_to(&["GB024"]);
        let m = load("glottocode,GB024\nx,1\ny,2\nz,3\n", &map);
        let b = binarize(&m, &map).unwrap();
        assert_eq!(b.row(0), [One, Zero]);
        assert_eq!(b.row(1), [Zero, One]);
        assert_eq!(b.row(2), [One, One]);
    }

    #[test]
    fn absent_source_is_a_config_error() {
        let map = BinarizationMap::grambank_default();
        let m = load("glottocode,GB020\nx,1\n", &map);
        assert!(matches!(binarize(&m, &map), Err(Error::Config(_))));
    }

    #[test]
    fn unmapped_raw_value_is_a_config_error() {
        let map = BinarizationMap::grambank_default().restricted_to(&["GB024"]);
        let m = load("glottocode,GB024\nx,sideways\n", &map);
        assert!(matches!(binarize(&m, &map), Err(Error::Config(_))));
    }

    #[test]
    fn map_validation() {
        let row = |s: &str, d: &str, r: &str, v| (s.into(), d.into(), r.into(), v);
        // derived id equal to a source id
        assert!(BinarizationMap::from_rows(vec![
            row("A", "B", "x", One),
            row("B", "Bb", "x", One),
        ])
        .is_err());
        // derived features with different raw domains
        assert!(BinarizationMap::from_rows(vec![
            row("A", "Aa", "x", One),
            row("A", "Ab", "y", One),
        ])
        .is_err());
        // conflicting images
        assert!(BinarizationMap::from_rows(vec![
            row("A", "Aa", "x", One),
            row("A", "Aa", "x", Zero),
        ])
        .is_err());
    }
}
