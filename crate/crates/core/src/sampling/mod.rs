//! Language selection from a sampling frame.
//!
//! Two deterministic greedy heuristics ([`sample_maxsum`], [`sample_maxmin`])
//! plus the seeded baselines used for comparison and [`extend_sample`] for
//! growing an existing sample.
//!
//! Every argmax tie goes to the lexicographically smallest language id.
//! Seeded baselines draw from a ChaCha8 stream created per call with
//! `ChaCha8Rng::seed_from_u64(seed)`; indices are drawn as `u64` so
//! results do not depend on pointer width.

mod baselines;
mod greedy;
mod io;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::frame::RecordTable;

pub use baselines::{sample_by_group, sample_convenience, sample_random};
pub use greedy::{extend_sample, sample_maxmin, sample_maxsum, Objective};
pub use io::{read_frequency_list, read_sample, write_sample, SampleFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    MaxSum,
    MaxMin,
    Random,
    RandomFamily,
    RandomGenus,
    Convenience,
    Extension,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::MaxSum,
        Method::MaxMin,
        Method::Random,
        Method::RandomFamily,
        Method::RandomGenus,
        Method::Convenience,
        Method::Extension,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::MaxSum => "maxsum",
            Method::MaxMin => "maxmin",
            Method::Random => "random",
            Method::RandomFamily => "random_family",
            Method::RandomGenus => "random_genus",
            Method::Convenience => "convenience",
            Method::Extension => "extension",
        }
    }

    /// Whether repeated runs can differ (i.e. the seed matters).
    pub fn is_seeded(self) -> bool {
        matches!(
            self,
            Method::Random | Method::RandomFamily | Method::RandomGenus | Method::Convenience
        )
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupLevel {
    Family,
    Genus,
}

/// Grouping labels for phylogenetic baselines.
#[derive(Debug, Clone, PartialEq)]
pub struct Grouping {
    pub level: GroupLevel,
    pub labels: HashMap<String, String>,
}

/// The set of candidate languages, with optional grouping and frequency data.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingFrame {
    language_ids: Vec<String>,
    members: HashSet<String>,
    grouping: Option<Grouping>,
    frequencies: Option<Vec<(String, u64)>>,
}

impl SamplingFrame {
    pub fn new<S: AsRef<str>>(language_ids: &[S]) -> Result<Self> {
        let language_ids: Vec<String> = language_ids
            .iter()
            .map(|s| s.as_ref().to_string())
            .collect();
        let mut members = HashSet::with_capacity(language_ids.len());
        for id in &language_ids {
            if !members.insert(id.clone()) {
                return Err(Error::DuplicateLanguage {
                    id: id.clone(),
                    location: "sampling frame".into(),
                });
            }
        }
        Ok(SamplingFrame {
            language_ids,
            members,
            grouping: None,
            frequencies: None,
        })
    }

    /// Attaches group labels; every labelled language must be in the frame.
    pub fn with_grouping(mut self, grouping: Grouping) -> Result<Self> {
        let outside: Vec<String> = grouping
            .labels
            .keys()
            .filter(|id| !self.members.contains(*id))
            .cloned()
            .collect();
        if !outside.is_empty() {
            return Err(Error::UnknownLanguage(outside));
        }
        if let Some((id, _)) = grouping.labels.iter().find(|(_, g)| g.trim().is_empty()) {
            return Err(Error::Config(format!("empty group label for {id}")));
        }
        self.grouping = Some(grouping);
        Ok(self)
    }

    /// Group labels taken from metadata records (family or genus).
    pub fn with_record_grouping(self, records: &RecordTable, level: GroupLevel) -> Result<Self> {
        let labels: HashMap<String, String> = self
            .language_ids
            .iter()
            .filter_map(|id| {
                let r = records.get(id)?;
                let label = match level {
                    GroupLevel::Family => r.family.clone(),
                    GroupLevel::Genus => r.genus.clone(),
                }?;
                Some((id.clone(), label))
            })
            .collect();
        if labels.is_empty() {
            return Err(Error::Config(format!(
                "no {} labels for any frame language",
                match level {
                    GroupLevel::Family => "family",
                    GroupLevel::Genus => "genus",
                }
            )));
        }
        self.with_grouping(Grouping { level, labels })
    }

    /// Attaches a frequency list; every listed language must be in the frame.
    pub fn with_frequencies(mut self, frequencies: Vec<(String, u64)>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut outside = Vec::new();
        for (id, _) in &frequencies {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateLanguage {
                    id: id.clone(),
                    location: "frequency list".into(),
                });
            }
            if !self.members.contains(id) {
                outside.push(id.clone());
            }
        }
        if !outside.is_empty() {
            return Err(Error::UnknownLanguage(outside));
        }
        self.frequencies = Some(frequencies);
        Ok(self)
    }

    pub fn language_ids(&self) -> &[String] {
        &self.language_ids
    }

    pub fn len(&self) -> usize {
        self.language_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.language_ids.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.members.contains(id)
    }

    pub fn grouping(&self) -> Option<&Grouping> {
        self.grouping.as_ref()
    }

    pub fn frequencies(&self) -> Option<&[(String, u64)]> {
        self.frequencies.as_deref()
    }
}

/// Selected languages in selection order, with provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub languages: Vec<String>,
    pub method: Method,
    pub k: usize,
    pub seed: Option<u64>,
    /// Languages before this index came from a base sample; the rest were added.
    pub base_len: usize,
}

impl Sample {
    pub fn new(languages: Vec<String>, method: Method, seed: Option<u64>) -> Self {
        Sample {
            k: languages.len(),
            languages,
            method,
            seed,
            base_len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.languages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.languages.is_empty()
    }

    pub fn base(&self) -> &[String] {
        &self.languages[..self.base_len]
    }

    pub fn additions(&self) -> &[String] {
        &self.languages[self.base_len..]
    }
}

pub(crate) fn check_size(k: usize, available: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Argument("sample size k must be positive".into()));
    }
    if k > available {
        return Err(Error::Size {
            requested: k,
            available,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("kmeans".parse::<Method>().is_err());
    }

    #[test]
    fn frame_invariants() {
        assert!(SamplingFrame::new(&["a", "a"]).is_err());
        let frame = SamplingFrame::new(&["a", "b"]).unwrap();
        let bad = Grouping {
            level: GroupLevel::Family,
            labels: [("z".to_string(), "F".to_string())].into(),
        };
        assert!(frame.clone().with_grouping(bad).is_err());
        let empty = Grouping {
            level: GroupLevel::Family,
            labels: [("a".to_string(), " ".to_string())].into(),
        };
        assert!(frame.clone().with_grouping(empty).is_err());
        assert!(frame
            .clone()
            .with_frequencies(vec![("z".into(), 1)])
            .is_err());
        assert!(frame.with_frequencies(vec![("a".into(), 3)]).is_ok());
    }
}
