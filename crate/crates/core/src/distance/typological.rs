//! Euclidean distance in the presence of missing values.
//!
//! For rows `v`, `v'` of length `d`, with `s` the features covered in both:
//!
//! ```text
//! dist(v, v') = sqrt( d / |s| * sum_{f in s} (v_f - v'_f)^2 )
//! ```
//!
//! Binary rows make every squared difference 0 or 1, so the sum is the
//! disagreement count over `s`. Matrices are built from per-language
//! bitsets; the result for every pair depends only on that pair, so it is
//! identical for any thread count.

use std::collections::HashSet;

use rayon::prelude::*;

use super::{DistanceKind, DistanceMatrix};
use crate::error::{Error, Result};
use crate::frame::{FeatureMatrix, FeatureValue};
use crate::scalar::Scalar;

/// Features covered in both rows of a pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedFeatureSet {
    pub indices: Vec<usize>,
    pub dim: usize,
}

impl SharedFeatureSet {
    pub fn of(v: &[FeatureValue], w: &[FeatureValue]) -> Self {
        let indices = v
            .iter()
            .zip(w)
            .enumerate()
            .filter(|(_, (a, b))| !a.is_missing() && !b.is_missing())
            .map(|(f, _)| f)
            .collect();
        SharedFeatureSet {
            indices,
            dim: v.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `d / |s|`, undefined for an empty set.
    pub fn weight<T: Scalar>(&self) -> Option<T> {
        if self.is_empty() {
            None
        } else {
            Some(T::from_count(self.dim) / T::from_count(self.len()))
        }
    }
}

/// `sqrt(d * c / |s|)` with a single rounding before the root, so pairs
/// whose exact distances coincide get bitwise equal values.
#[inline]
fn weighted<T: Scalar>(dim: usize, shared: usize, disagreements: usize) -> T {
    (T::from_count(dim * disagreements) / T::from_count(shared)).sqrt()
}

/// Distance between two binary rows; errors when they share no covered feature.
pub fn typological_distance<T: Scalar>(v: &[FeatureValue], w: &[FeatureValue]) -> Result<T> {
    if v.len() != w.len() {
        return Err(Error::Argument(format!(
            "rows have lengths {} and {}",
            v.len(),
            w.len()
        )));
    }
    let mut shared = 0usize;
    let mut disagreements = 0usize;
    for (&a, &b) in v.iter().zip(w) {
        match (a.as_binary(), b.as_binary()) {
            (Some(x), Some(y)) => {
                shared += 1;
                disagreements += usize::from(x != y);
            }
            _ => {
                if let FeatureValue::State(_) = a {
                    return Err(Error::Argument("row holds a raw multistate value".into()));
                }
                if let FeatureValue::State(_) = b {
                    return Err(Error::Argument("row holds a raw multistate value".into()));
                }
            }
        }
    }
    if shared == 0 {
        return Err(Error::NoSharedCoverage(vec![("v".into(), "v'".into())]));
    }
    Ok(weighted(v.len(), shared, disagreements))
}

/// Coverage and one-value masks per language, 64 features per word.
struct Bitsets {
    words: usize,
    covered: Vec<u64>,
    ones: Vec<u64>,
}

impl Bitsets {
    fn new(matrix: &FeatureMatrix) -> Self {
        let words = matrix.dim().div_ceil(64);
        let n = matrix.n_languages();
        let mut covered = vec![0u64; n * words];
        let mut ones = vec![0u64; n * words];
        for i in 0..n {
            for (f, v) in matrix.row(i).iter().enumerate() {
                let (w, bit) = (i * words + f / 64, 1u64 << (f % 64));
                match v {
                    FeatureValue::Zero => covered[w] |= bit,
                    FeatureValue::One => {
                        covered[w] |= bit;
                        ones[w] |= bit;
                    }
                    _ => {}
                }
            }
        }
        Bitsets {
            words,
            covered,
            ones,
        }
    }

    #[inline]
    fn counts(&self, i: usize, j: usize) -> (usize, usize) {
        let (a, b) = (i * self.words, j * self.words);
        let mut shared = 0u32;
        let mut diff = 0u32;
        for k in 0..self.words {
            let both = self.covered[a + k] & self.covered[b + k];
            shared += both.count_ones();
            diff += ((self.ones[a + k] ^ self.ones[b + k]) & both).count_ones();
        }
        (shared as usize, diff as usize)
    }
}

/// All pairs `(a, b)`, `a` before `b` in matrix order, that share no covered feature.
pub fn uncovered_pairs(matrix: &FeatureMatrix) -> Vec<(String, String)> {
    let bits = Bitsets::new(matrix);
    let ids = matrix.language_ids();
    let n = ids.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            ((i + 1)..n)
                .filter(|&j| bits.counts(i, j).0 == 0)
                .map(|j| (ids[i].clone(), ids[j].clone()))
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Drops, for each zero-coverage pair, its alphabetically later glottocode.
///
/// Pairs are visited in lexicographic order and a pair whose earlier member
/// is already dropped needs no further action. Returns the reduced matrix
/// and the dropped ids.
pub fn drop_uncovered_languages(matrix: &FeatureMatrix) -> (FeatureMatrix, Vec<String>) {
    let mut pairs: Vec<(String, String)> = uncovered_pairs(matrix)
        .into_iter()
        .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
        .collect();
    pairs.sort();
    let mut dropped: HashSet<String> = HashSet::new();
    let mut order = Vec::new();
    for (a, b) in pairs {
        if dropped.contains(&a) || dropped.contains(&b) {
            continue;
        }
        dropped.insert(b.clone());
        order.push(b);
    }
    let reduced = matrix.retain_languages(|_, id| !dropped.contains(id));
    (reduced, order)
}

/// Full typological distance matrix.
///
/// Fails with every offending pair listed when some pair shares no
/// covered feature, and with [`Error::NotBinary`] on unbinarized input.
pub fn build_typ_matrix<T: Scalar>(matrix: &FeatureMatrix) -> Result<DistanceMatrix<T>> {
    matrix.ensure_binary()?;
    let bits = Bitsets::new(matrix);
    let n = matrix.n_languages();
    let d = matrix.dim();

    let rows: Vec<(Vec<T>, Vec<usize>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::with_capacity(n - i - 1);
            let mut bad = Vec::new();
            for j in (i + 1)..n {
                let (shared, diff) = bits.counts(i, j);
                if shared == 0 {
                    bad.push(j);
                    out.push(T::zero());
                } else {
                    out.push(weighted(d, shared, diff));
                }
            }
            (out, bad)
        })
        .collect();

    let ids = matrix.language_ids();
    let offending: Vec<(String, String)> = rows
        .iter()
        .enumerate()
        .flat_map(|(i, (_, bad))| bad.iter().map(move |&j| (ids[i].clone(), ids[j].clone())))
        .collect();
    if !offending.is_empty() {
        return Err(Error::NoSharedCoverage(offending));
    }

    let mut values = vec![T::zero(); n * n];
    for (i, (row, _)) in rows.into_iter().enumerate() {
        for (offset, x) in row.into_iter().enumerate() {
            let j = i + 1 + offset;
            values[i * n + j] = x;
            values[j * n + i] = x;
        }
    }
    DistanceMatrix::new(ids.to_vec(), values, DistanceKind::Typological, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use FeatureValue::*;

    #[test]
    fn identical_rows() {
        let v = [One, Zero, One];
        assert_eq!(typological_distance::<f64>(&v, &v).unwrap(), 0.0);
    }

    #[test]
    fn weighted_example() {
        // s = {f1, f2}, one disagreement, w = 4 / 2
        let v = [Zero, One, Missing, One];
        let w = [One, One, Zero, Missing];
        let got: f64 = typological_distance(&v, &w).unwrap();
        assert_abs_diff_eq!(got, std::f64::consts::SQRT_2, epsilon = 1e-12);
        let s = SharedFeatureSet::of(&v, &w);
        assert_eq!(s.indices, [0, 1]);
        assert_eq!(s.weight::<f64>(), Some(2.0));
    }

    #[test]
    fn total_disagreement_is_sqrt_d() {
        let v = [One; 9];
        let w = [Zero; 9];
        assert_eq!(typological_distance::<f64>(&v, &w).unwrap(), 3.0);
        assert_eq!(typological_distance::<f32>(&v, &w).unwrap(), 3.0);
    }

    #[test]
    fn no_shared_coverage() {
        let v = [One, Missing];
        let w = [Missing, Zero];
        assert!(matches!(
            typological_distance::<f64>(&v, &w),
            Err(Error::NoSharedCoverage(_))
        ));
        assert_eq!(SharedFeatureSet::of(&v, &w).weight::<f64>(), None);
    }

    #[test]
    fn three_language_matrix() {
        let m = FeatureMatrix::from_bits(
            &["a", "b", "c"],
            &["x", "y"],
            &[
                vec![Some(0), Some(0)],
                vec![Some(1), Some(0)],
                vec![Some(1), Some(1)],
            ],
        )
        .unwrap();
        let dm: DistanceMatrix<f64> = build_typ_matrix(&m).unwrap();
        assert_eq!(dm.get(0, 1), 1.0);
        assert_abs_diff_eq!(dm.get(0, 2), std::f64::consts::SQRT_2, epsilon = 1e-12);
        assert_eq!(dm.get(1, 2), 1.0);
        assert_eq!(dm.kind(), DistanceKind::Typological);
        assert!(!dm.is_normalized());
    }

    #[test]
    fn single_language_matrix() {
        let m = FeatureMatrix::from_bits(&["a"], &["x"], &[vec![None]]).unwrap();
        let dm: DistanceMatrix<f64> = build_typ_matrix(&m).unwrap();
        assert_eq!(dm.len(), 1);
        assert_eq!(dm.get(0, 0), 0.0);
    }

    #[test]
    fn aggregated_coverage_error_and_drop_policy() {
        let m = FeatureMatrix::from_bits(
            &["c", "a", "b"],
            &["x", "y"],
            &[
                vec![Some(1), None],
                vec![None, Some(1)],
                vec![None, Some(0)],
            ],
        )
        .unwrap();
        match build_typ_matrix::<f64>(&m) {
            Err(Error::NoSharedCoverage(pairs)) => {
                assert_eq!(pairs, [("c".into(), "a".into()), ("c".into(), "b".into())])
            }
            other => panic!("unexpected {other:?}"),
        }
        // (a, c) drops c; (b, c) is then resolved
        let (reduced, dropped) = drop_uncovered_languages(&m);
        assert_eq!(dropped, ["c"]);
        assert_eq!(reduced.language_ids(), ["a", "b"]);
        assert!(build_typ_matrix::<f64>(&reduced).is_ok());
    }

    #[test]
    fn wide_rows_cross_word_boundaries() {
        let d = 130;
        let a: Vec<Option<u8>> = (0..d)
            .map(|f| {
                if f % 7 == 0 {
                    None
                } else {
                    Some((f % 2) as u8)
                }
            })
            .collect();
        let b: Vec<Option<u8>> = (0..d)
            .map(|f| {
                if f % 5 == 0 {
                    None
                } else {
                    Some((f % 3 == 0) as u8)
                }
            })
            .collect();
        let feats: Vec<String> = (0..d).map(|f| format!("f{f}")).collect();
        let feats: Vec<&str> = feats.iter().map(String::as_str).collect();
        let m = FeatureMatrix::from_bits(&["a", "b"], &feats, &[a, b]).unwrap();
        let dm: DistanceMatrix<f64> = build_typ_matrix(&m).unwrap();
        let direct: f64 = typological_distance(m.row(0), m.row(1)).unwrap();
        assert_eq!(dm.get(0, 1), direct);
    }
}
