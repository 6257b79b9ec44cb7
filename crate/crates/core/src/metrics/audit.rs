use std::collections::BTreeMap;

use super::{pair_overlap, OverlapDenominator};
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::frame::{FeatureMatrix, RecordTable};
use crate::scalar::Scalar;

/// Mean within-family overlap for one family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyCoherenceRow<T> {
    pub family: String,
    pub n_languages: usize,
    pub mean_pairwise_overlap: T,
}

/// Mean pairwise overlap (as in FVO) within each family of two or more
/// matrix languages, largest family first (ties by name).
pub fn family_coherence<T: Scalar>(
    matrix: &FeatureMatrix,
    records: &RecordTable,
) -> Result<Vec<FamilyCoherenceRow<T>>> {
    matrix.ensure_binary()?;
    let mut families: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, id) in matrix.language_ids().iter().enumerate() {
        if let Some(family) = records.get(id).and_then(|r| r.family.as_deref()) {
            families.entry(family).or_default().push(i);
        }
    }
    let mut rows: Vec<FamilyCoherenceRow<T>> = families
        .into_iter()
        .filter(|(_, members)| members.len() >= 2)
        .map(|(family, members)| {
            let mut total = T::zero();
            let mut pairs = 0usize;
            for (a, &i) in members.iter().enumerate() {
                for &j in &members[a + 1..] {
                    total = total
                        + pair_overlap::<T>(
                            matrix.row(i),
                            matrix.row(j),
                            OverlapDenominator::Dimension,
                        );
                    pairs += 1;
                }
            }
            FamilyCoherenceRow {
                family: family.to_string(),
                n_languages: members.len(),
                mean_pairwise_overlap: total / T::from_count(pairs),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        b.n_languages
            .cmp(&a.n_languages)
            .then_with(|| a.family.cmp(&b.family))
    });
    Ok(rows)
}

/// Share of languages whose nearest neighbour belongs to another family.
///
/// Nearest means smallest distance, ties to the smallest id. A language
/// without a family label counts as its own family.
pub fn nearest_neighbor_family_rate<T: Scalar>(
    dm: &DistanceMatrix<T>,
    records: &RecordTable,
) -> Result<T> {
    let n = dm.len();
    if n < 2 {
        return Err(Error::Argument(
            "nearest neighbours need at least two languages".into(),
        ));
    }
    let ids = dm.language_ids();
    let family = |i: usize| records.get(&ids[i]).and_then(|r| r.family.as_deref());
    let mut cross = 0usize;
    for i in 0..n {
        let mut best: Option<(usize, T)> = None;
        for j in 0..n {
            if j == i {
                continue;
            }
            let d = dm.get(i, j);
            best = match best {
                None => Some((j, d)),
                Some((b, bd)) if d < bd || (d == bd && ids[j] < ids[b]) => Some((j, d)),
                keep => keep,
            };
        }
        let (nn, _) = best.expect("n >= 2");
        let same = matches!((family(i), family(nn)), (Some(a), Some(b)) if a == b);
        cross += usize::from(!same);
    }
    Ok(T::from_count(cross) / T::from_count(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::DistanceKind;
    use crate::frame::LanguageRecord;

    fn rec(id: &str, family: &str) -> LanguageRecord {
        LanguageRecord {
            family: Some(family.to_string()),
            ..LanguageRecord::leaf(id)
        }
    }

    #[test]
    fn coherence_extremes() {
        let m = FeatureMatrix::from_bits(
            &["a", "b", "c", "d", "e"],
            &["f1", "f2"],
            &[
                vec![Some(1), Some(0)],
                vec![Some(1), Some(0)],
                vec![Some(1), Some(1)],
                vec![Some(0), Some(0)],
                vec![Some(0), Some(0)],
            ],
        )
        .unwrap();
        let records = RecordTable::new(vec![
            rec("a", "Same"),
            rec("b", "Same"),
            rec("c", "Apart"),
            rec("d", "Apart"),
            rec("e", "Alone"),
        ])
        .unwrap();
        let rows: Vec<FamilyCoherenceRow<f64>> = family_coherence(&m, &records).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].family, "Apart");
        assert_eq!(rows[0].mean_pairwise_overlap, 0.0);
        assert_eq!(rows[1].family, "Same");
        assert_eq!(rows[1].mean_pairwise_overlap, 1.0);
    }

    #[test]
    fn nearest_neighbour_rates() {
        let ids: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let pos = [0.0, 1.0, 5.0];
        let dm =
            DistanceMatrix::from_fn(ids, DistanceKind::Custom, |i, j| f64::abs(pos[i] - pos[j]))
                .unwrap();
        let one = RecordTable::new(vec![rec("a", "F"), rec("b", "F"), rec("c", "F")]).unwrap();
        assert_eq!(nearest_neighbor_family_rate(&dm, &one).unwrap(), 0.0);
        let split = RecordTable::new(vec![rec("a", "F"), rec("b", "G"), rec("c", "G")]).unwrap();
        // a -> b (cross), b -> a (cross), c -> b (same)
        let rate: f64 = nearest_neighbor_family_rate(&dm, &split).unwrap();
        assert!((rate - 2.0 / 3.0).abs() < 1e-15);

        let two = dm.restrict(&["a", "c"]).unwrap();
        let recs = RecordTable::new(vec![rec("a", "F"), rec("c", "G")]).unwrap();
        assert_eq!(nearest_neighbor_family_rate(&two, &recs).unwrap(), 1.0);
    }
}
