//! Diversity metrics over a sample, phylogeny audits and score summaries.
//!
//! | metric   | direction | definition                                              |
//! |----------|-----------|---------------------------------------------------------|
//! | MPD      | higher    | mean distance over ordered pairs                        |
//! | FVO      | lower     | mean share of features with equal, both-covered values  |
//! | FVI      | higher    | mean share of each feature's two values present         |
//! | entropy  | higher    | mean binary entropy (log2) of each feature              |
//!
//! FVO, FVI and entropy always divide by the full dimension `d`, so
//! features with no coverage in the sample pull them towards 0.

mod audit;
mod report;
mod scores;

use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::frame::{FeatureMatrix, FeatureValue};
use crate::scalar::Scalar;

pub use audit::{family_coherence, nearest_neighbor_family_rate, FamilyCoherenceRow};
pub use report::{write_report, DiversityReport};
pub use scores::{evaluate_sample_scores, read_scores, ScoreSummary, Stats};

/// Denominator of the per-pair overlap share.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OverlapDenominator {
    /// All `d` features.
    #[default]
    Dimension,
    /// Only features covered in both languages; a pair with none scores 0.
    Shared,
}

fn rows<'m, S: AsRef<str>>(
    matrix: &'m FeatureMatrix,
    sample: &[S],
) -> Result<Vec<&'m [FeatureValue]>> {
    let mut out = Vec::with_capacity(sample.len());
    let mut unknown = Vec::new();
    for id in sample {
        match matrix.position(id.as_ref()) {
            Some(i) => out.push(matrix.row(i)),
            None => unknown.push(id.as_ref().to_string()),
        }
    }
    if !unknown.is_empty() {
        return Err(Error::UnknownLanguage(unknown));
    }
    Ok(out)
}

fn need(sample_len: usize, min: usize, what: &str) -> Result<()> {
    if sample_len < min {
        Err(Error::Argument(format!(
            "{what} needs at least {min} language(s), got {sample_len}"
        )))
    } else {
        Ok(())
    }
}

fn need_features(matrix: &FeatureMatrix) -> Result<()> {
    matrix.ensure_binary()?;
    if matrix.dim() == 0 {
        return Err(Error::Argument("feature matrix has no features".into()));
    }
    Ok(())
}

/// Mean pairwise distance over ordered pairs.
pub fn mpd<T: Scalar, S: AsRef<str>>(sample: &[S], dm: &DistanceMatrix<T>) -> Result<T> {
    need(sample.len(), 2, "MPD")?;
    let idx = dm.positions(sample)?;
    let mut total = T::zero();
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            if a != b {
                total = total + dm.get(i, j);
            }
        }
    }
    let n = idx.len();
    Ok(total / T::from_count(n * (n - 1)))
}

/// Number of features where both values are covered and equal.
pub fn agreement_count(v: &[FeatureValue], w: &[FeatureValue]) -> usize {
    v.iter()
        .zip(w)
        .filter(|(a, b)| matches!((a.as_binary(), b.as_binary()), (Some(x), Some(y)) if x == y))
        .count()
}

/// Overlap share of one pair.
pub fn pair_overlap<T: Scalar>(
    v: &[FeatureValue],
    w: &[FeatureValue],
    denominator: OverlapDenominator,
) -> T {
    let agree = T::from_count(agreement_count(v, w));
    match denominator {
        OverlapDenominator::Dimension => agree / T::from_count(v.len()),
        OverlapDenominator::Shared => {
            let shared = v
                .iter()
                .zip(w)
                .filter(|(a, b)| a.as_binary().is_some() && b.as_binary().is_some())
                .count();
            if shared == 0 {
                T::zero()
            } else {
                agree / T::from_count(shared)
            }
        }
    }
}

/// Feature value overlap, dividing by `d`.
pub fn fvo<T: Scalar, S: AsRef<str>>(sample: &[S], matrix: &FeatureMatrix) -> Result<T> {
    fvo_with(sample, matrix, OverlapDenominator::Dimension)
}

pub fn fvo_with<T: Scalar, S: AsRef<str>>(
    sample: &[S],
    matrix: &FeatureMatrix,
    denominator: OverlapDenominator,
) -> Result<T> {
    need(sample.len(), 2, "FVO")?;
    need_features(matrix)?;
    let rows = rows(matrix, sample)?;
    let mut total = T::zero();
    for (a, v) in rows.iter().enumerate() {
        for (b, w) in rows.iter().enumerate() {
            if a != b {
                total = total + pair_overlap::<T>(v, w, denominator);
            }
        }
    }
    let n = rows.len();
    Ok(total / T::from_count(n * (n - 1)))
}

/// Per-feature counts of `(zeros, ones)` within the sample.
fn value_counts(rows: &[&[FeatureValue]], d: usize) -> Vec<(usize, usize)> {
    let mut counts = vec![(0usize, 0usize); d];
    for row in rows {
        for (f, v) in row.iter().enumerate() {
            match v {
                FeatureValue::Zero => counts[f].0 += 1,
                FeatureValue::One => counts[f].1 += 1,
                _ => {}
            }
        }
    }
    counts
}

/// Feature value inclusion.
pub fn fvi<T: Scalar, S: AsRef<str>>(sample: &[S], matrix: &FeatureMatrix) -> Result<T> {
    need(sample.len(), 1, "FVI")?;
    need_features(matrix)?;
    let rows = rows(matrix, sample)?;
    let present: usize = value_counts(&rows, matrix.dim())
        .iter()
        .map(|&(zeros, ones)| usize::from(zeros > 0) + usize::from(ones > 0))
        .sum();
    Ok(T::from_count(present) / T::lit(2.0) / T::from_count(matrix.dim()))
}

/// Binary entropy in bits from value counts; 0 when nothing is covered.
pub fn feature_entropy<T: Scalar>(zeros: usize, ones: usize) -> T {
    let total = zeros + ones;
    if total == 0 {
        return T::zero();
    }
    let total = T::from_count(total);
    [zeros, ones]
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = T::from_count(c) / total;
            -p * p.log2()
        })
        .fold(T::zero(), |a, b| a + b)
}

/// Mean per-feature entropy over all `d` features.
pub fn entropy<T: Scalar, S: AsRef<str>>(sample: &[S], matrix: &FeatureMatrix) -> Result<T> {
    need(sample.len(), 1, "entropy")?;
    need_features(matrix)?;
    let rows = rows(matrix, sample)?;
    let total = value_counts(&rows, matrix.dim())
        .into_iter()
        .map(|(z, o)| feature_entropy::<T>(z, o))
        .fold(T::zero(), |a, b| a + b);
    Ok(total / T::from_count(matrix.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::DistanceKind;
    use approx::assert_abs_diff_eq;

    fn dm3() -> DistanceMatrix<f64> {
        let ids = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let d = [[0.0, 1.0, 2.0], [1.0, 0.0, 3.0], [2.0, 3.0, 0.0]];
        DistanceMatrix::from_fn(ids, DistanceKind::Custom, |i, j| d[i][j]).unwrap()
    }

    #[test]
    fn mpd_examples() {
        let dm = dm3();
        assert_abs_diff_eq!(mpd(&["a", "b", "c"], &dm).unwrap(), 2.0, epsilon = 1e-12);
        assert_eq!(mpd(&["a", "b"], &dm).unwrap(), 1.0);
        assert!(matches!(mpd(&["a"], &dm), Err(Error::Argument(_))));
        assert!(matches!(
            mpd(&["a", "q"], &dm),
            Err(Error::UnknownLanguage(_))
        ));
    }

    #[test]
    fn fvo_counts_both_covered_only() {
        // agree on f1,f2; disagree on f3; f4 covered on one side only
        let m = FeatureMatrix::from_bits(
            &["x", "y"],
            &["f1", "f2", "f3", "f4"],
            &[
                vec![Some(1), Some(0), Some(1), None],
                vec![Some(1), Some(0), Some(0), Some(1)],
            ],
        )
        .unwrap();
        assert_eq!(fvo::<f64, _>(&["x", "y"], &m).unwrap(), 0.5);
        let shared: f64 = fvo_with(&["x", "y"], &m, OverlapDenominator::Shared).unwrap();
        assert_abs_diff_eq!(shared, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn jointly_missing_is_not_agreement() {
        let m = FeatureMatrix::from_bits(
            &["x", "y"],
            &["f1", "f2"],
            &[vec![Some(1), None], vec![Some(1), None]],
        )
        .unwrap();
        assert_eq!(fvo::<f64, _>(&["x", "y"], &m).unwrap(), 0.5);
    }

    #[test]
    fn fvi_examples() {
        let m = FeatureMatrix::from_bits(
            &["x", "y", "z"],
            &["f1", "f2"],
            &[
                vec![Some(1), Some(0)],
                vec![Some(0), Some(1)],
                vec![Some(1), None],
            ],
        )
        .unwrap();
        assert_eq!(fvi::<f64, _>(&["x", "y"], &m).unwrap(), 1.0);
        assert_eq!(fvi::<f64, _>(&["x"], &m).unwrap(), 0.5);
        // f2 is missing for z alone: contributes 0
        assert_eq!(fvi::<f64, _>(&["z"], &m).unwrap(), 0.25);
        assert!(matches!(fvi::<f64, &str>(&[], &m), Err(Error::Argument(_))));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(feature_entropy::<f64>(2, 2), 1.0);
        assert_eq!(feature_entropy::<f64>(0, 4), 0.0);
        assert_eq!(feature_entropy::<f64>(0, 0), 0.0);
        let h: f64 = feature_entropy(1, 3);
        let oracle = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert_abs_diff_eq!(h, oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(h, 0.8112781244591328, epsilon = 1e-12);
    }
}
