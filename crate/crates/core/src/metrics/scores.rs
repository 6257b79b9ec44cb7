use std::collections::HashMap;
use std::io::Read;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Count, mean, sample standard deviation (n − 1; 0 for a single value), min, max.
#[derive(Debug, Clone, PartialEq)]
pub struct Stats<T> {
    pub n: usize,
    pub mean: T,
    pub sd: T,
    pub min: T,
    pub max: T,
}

impl<T: Scalar> Stats<T> {
    fn of(values: &[T]) -> Self {
        let n = values.len();
        let count = T::from_count(n);
        let mean = values.iter().fold(T::zero(), |a, &b| a + b) / count;
        let sd = if n > 1 {
            let ss = values
                .iter()
                .fold(T::zero(), |a, &b| a + (b - mean) * (b - mean));
            (ss / T::from_count(n - 1)).sqrt()
        } else {
            T::zero()
        };
        let min = values.iter().fold(T::infinity(), |a, &b| a.min(b));
        let max = values.iter().fold(T::neg_infinity(), |a, &b| a.max(b));
        Stats {
            n,
            mean,
            sd,
            min,
            max,
        }
    }
}

/// Downstream scores of a sample next to those of every scored language.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSummary<T> {
    pub sample: Stats<T>,
    pub population: Stats<T>,
    /// Sample languages without a score.
    pub uncovered: Vec<String>,
}

impl<T> ScoreSummary<T> {
    /// Size of the intersection of sample and score table.
    pub fn covered(&self) -> usize {
        self.sample.n
    }
}

pub fn evaluate_sample_scores<T: Scalar, S: AsRef<str>>(
    sample: &[S],
    scores: &[(String, T)],
) -> Result<ScoreSummary<T>> {
    let mut table: HashMap<&str, T> = HashMap::with_capacity(scores.len());
    for (id, x) in scores {
        if table.insert(id.as_str(), *x).is_some() {
            return Err(Error::DuplicateLanguage {
                id: id.clone(),
                location: "score table".into(),
            });
        }
    }
    let mut hits = Vec::new();
    let mut uncovered = Vec::new();
    for id in sample {
        match table.get(id.as_ref()) {
            Some(&x) => hits.push(x),
            None => uncovered.push(id.as_ref().to_string()),
        }
    }
    if hits.is_empty() {
        return Err(Error::Coverage(
            "no sample language has a score".to_string(),
        ));
    }
    let all: Vec<T> = scores.iter().map(|(_, x)| *x).collect();
    Ok(ScoreSummary {
        sample: Stats::of(&hits),
        population: Stats::of(&all),
        uncovered,
    })
}

/// Reads a `(language_id, score)` CSV; a header row is optional.
pub fn read_scores<R: Read>(reader: R) -> Result<Vec<(String, f64)>> {
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
                format!("score table line {}", n + 1),
                "expected language_id,score",
            ));
        }
        match row[1].parse::<f64>() {
            Ok(x) if x.is_finite() => out.push((row[0].to_string(), x)),
            Err(_) if n == 0 => continue,
            _ => {
                return Err(Error::parse(
                    format!("score table line {}", n + 1),
                    format!("bad score {:?}", &row[1]),
                ))
            }
        }
    }
    Ok(out)
}
