//! Pairwise language distances.
//!
//! [`DistanceMatrix`] holds a full symmetric matrix together with its
//! provenance: what kind of distance it is and whether it was min-max
//! normalized.

mod geographic;
mod io;
mod typological;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use geographic::{build_geo_matrix, geographic_distance, EARTH_RADIUS_KM};
pub use io::{load_matrix, read_matrix, save_matrix, write_matrix};
pub use typological::{
    build_typ_matrix, drop_uncovered_languages, typological_distance, uncovered_pairs,
    SharedFeatureSet,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistanceKind {
    Typological,
    Geographic,
    /// Externally supplied dissimilarities.
    Custom,
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceKind::Typological => "typological",
            DistanceKind::Geographic => "geographic",
            DistanceKind::Custom => "custom",
        })
    }
}

impl FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "typological" => Ok(DistanceKind::Typological),
            "geographic" => Ok(DistanceKind::Geographic),
            "custom" => Ok(DistanceKind::Custom),
            other => Err(Error::parse(
                "matrix header",
                format!("unknown kind {other:?}"),
            )),
        }
    }
}

/// Symmetric, zero-diagonal, non-negative pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix<T> {
    language_ids: Vec<String>,
    index: HashMap<String, usize>,
    values: Vec<T>,
    kind: DistanceKind,
    normalized: bool,
}

impl<T: Scalar> DistanceMatrix<T> {
    /// Validates and wraps a row-major `n × n` grid.
    pub fn new(
        language_ids: Vec<String>,
        values: Vec<T>,
        kind: DistanceKind,
        normalized: bool,
    ) -> Result<Self> {
        let n = language_ids.len();
        if values.len() != n * n {
            return Err(Error::Argument(format!(
                "{n} languages need {} distances, got {}",
                n * n,
                values.len()
            )));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, id) in language_ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateLanguage {
                    id: id.clone(),
                    location: format!("matrix row {}", i + 1),
                });
            }
        }
        for i in 0..n {
            if values[i * n + i] != T::zero() {
                return Err(Error::Argument(format!(
                    "non-zero diagonal for {}",
                    language_ids[i]
                )));
            }
            for j in (i + 1)..n {
                let (a, b) = (values[i * n + j], values[j * n + i]);
                if a != b {
                    return Err(Error::Argument(format!(
                        "asymmetric distance between {} and {}",
                        language_ids[i], language_ids[j]
                    )));
                }
                if !a.is_finite() || a < T::zero() {
                    return Err(Error::Argument(format!(
                        "distance between {} and {} is {a}",
                        language_ids[i], language_ids[j]
                    )));
                }
                if normalized && a > T::one() {
                    return Err(Error::Argument(format!(
                        "normalized distance between {} and {} exceeds 1",
                        language_ids[i], language_ids[j]
                    )));
                }
            }
        }
        Ok(DistanceMatrix {
            language_ids,
            index,
            values,
            kind,
            normalized,
        })
    }

    /// Fills the upper triangle from `f(i, j)` (`i < j`) and mirrors it.
    pub fn from_fn(
        language_ids: Vec<String>,
        kind: DistanceKind,
        mut f: impl FnMut(usize, usize) -> T,
    ) -> Result<Self> {
        let n = language_ids.len();
        let mut values = vec![T::zero(); n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let x = f(i, j);
                values[i * n + j] = x;
                values[j * n + i] = x;
            }
        }
        Self::new(language_ids, values, kind, false)
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

    pub fn kind(&self) -> DistanceKind {
        self.kind
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        let n = self.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn between(&self, a: &str, b: &str) -> Option<T> {
        Some(self.get(self.position(a)?, self.position(b)?))
    }

    /// Indices of `ids`, or an error listing every unknown id.
    pub fn positions<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(ids.len());
        let mut unknown = Vec::new();
        for id in ids {
            match self.position(id.as_ref()) {
                Some(i) => out.push(i),
                None => unknown.push(id.as_ref().to_string()),
            }
        }
        if unknown.is_empty() {
            Ok(out)
        } else {
            Err(Error::UnknownLanguage(unknown))
        }
    }

    /// Iterates off-diagonal entries of the upper triangle.
    pub fn upper_triangle(&self) -> impl Iterator<Item = T> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| self.get(i, j)))
    }

    /// Applies `f` to every off-diagonal entry; the diagonal stays zero.
    pub fn map_off_diagonal(&self, f: impl Fn(T) -> T) -> Result<Self> {
        let n = self.len();
        let mut values = self.values.clone();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    values[i * n + j] = f(values[i * n + j]);
                }
            }
        }
        Self::new(self.language_ids.clone(), values, self.kind, false)
    }

    /// Submatrix over `ids`, in that order.
    pub fn restrict<S: AsRef<str>>(&self, ids: &[S]) -> Result<Self> {
        let pos = self.positions(ids)?;
        let m = pos.len();
        let mut values = Vec::with_capacity(m * m);
        for &i in &pos {
            values.extend(pos.iter().map(|&j| self.get(i, j)));
        }
        Self::new(
            ids.iter().map(|s| s.as_ref().to_string()).collect(),
            values,
            self.kind,
            self.normalized,
        )
    }

    /// Converts to another scalar type.
    pub fn cast<U: Scalar>(&self) -> DistanceMatrix<U> {
        DistanceMatrix {
            language_ids: self.language_ids.clone(),
            index: self.index.clone(),
            values: self
                .values
                .iter()
                .map(|&x| U::from_f64(x.to_f64_lossy()).unwrap_or_else(U::nan))
                .collect(),
            kind: self.kind,
            normalized: self.normalized,
        }
    }
}

/// Min-max normalization of the off-diagonal entries to `[0, 1]`.
pub fn normalize_minmax<T: Scalar>(dm: &DistanceMatrix<T>) -> Result<DistanceMatrix<T>> {
    if dm.len() < 2 {
        return Err(Error::Degenerate(
            "normalization needs at least two languages".into(),
        ));
    }
    let (lo, hi) = dm
        .upper_triangle()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        });
    if hi <= lo {
        return Err(Error::Degenerate(format!(
            "all off-diagonal distances equal {lo}"
        )));
    }
    let span = hi - lo;
    let n = dm.len();
    let mut values = dm.values.clone();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                values[i * n + j] = (values[i * n + j] - lo) / span;
            }
        }
    }
    DistanceMatrix::new(dm.language_ids.clone(), values, dm.kind, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("l{i}")).collect()
    }

    #[test]
    fn normalize_affine() {
        let values = vec![
            0.0, 2.0, 4.0, //
            2.0, 0.0, 6.0, //
            4.0, 6.0, 0.0,
        ];
        let dm = DistanceMatrix::new(ids(3), values, DistanceKind::Typological, false).unwrap();
        let n = normalize_minmax(&dm).unwrap();
        assert!(n.is_normalized());
        assert_eq!(n.upper_triangle().collect::<Vec<f64>>(), [0.0, 0.5, 1.0]);
        assert_eq!(n.get(1, 1), 0.0);
        // already normalized input is a fixed point
        let again = normalize_minmax(&n).unwrap();
        assert_eq!(again, n);
    }

    #[test]
    fn normalize_degenerate() {
        let dm = DistanceMatrix::from_fn(ids(3), DistanceKind::Custom, |_, _| 1.5f64).unwrap();
        assert!(matches!(normalize_minmax(&dm), Err(Error::Degenerate(_))));
        let one =
            DistanceMatrix::<f64>::new(ids(1), vec![0.0], DistanceKind::Custom, false).unwrap();
        assert!(matches!(normalize_minmax(&one), Err(Error::Degenerate(_))));
    }

    #[test]
    fn rejects_bad_grids() {
        let asym = vec![0.0, 1.0, 2.0, 0.0];
        assert!(DistanceMatrix::new(ids(2), asym, DistanceKind::Custom, false).is_err());
        let diag = vec![1.0, 1.0, 1.0, 0.0];
        assert!(DistanceMatrix::new(ids(2), diag, DistanceKind::Custom, false).is_err());
        let neg = vec![0.0, -1.0, -1.0, 0.0];
        assert!(DistanceMatrix::new(ids(2), neg, DistanceKind::Custom, false).is_err());
    }

    #[test]
    fn restrict_and_cast() {
        let dm =
            DistanceMatrix::from_fn(ids(4), DistanceKind::Custom, |i, j| (i + j) as f64).unwrap();
        let sub = dm.restrict(&["l3", "l1"]).unwrap();
        assert_eq!(sub.get(0, 1), 4.0);
        let single: DistanceMatrix<f32> = sub.cast();
        assert_eq!(single.get(1, 0), 4.0f32);
        assert!(matches!(
            dm.restrict(&["zz"]),
            Err(Error::UnknownLanguage(_))
        ));
    }
}
