mod common;

use proptest::prelude::*;
use typdiv::distance::{
    build_typ_matrix, normalize_minmax, read_matrix, write_matrix, DistanceKind,
};
use typdiv::frame::FeatureValue;
use typdiv::{DistanceMatrix, DistanceMatrix32, FeatureMatrix};

fn cells(n: usize, d: usize, missing: bool) -> impl Strategy<Value = Vec<Vec<u8>>> {
    let top = if missing { 3u8 } else { 2u8 };
    proptest::collection::vec(
        (0u8..2, proptest::collection::vec(0..top, d - 1)).prop_map(|(first, rest)| {
            let mut row = vec![first];
            row.extend(rest);
            row
        }),
        n,
    )
}

fn to_matrix(rows: &[Vec<u8>]) -> FeatureMatrix {
    let d = rows[0].len();
    let rows: Vec<Vec<FeatureValue>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&c| match c {
                    0 => FeatureValue::Zero,
                    1 => FeatureValue::One,
                    _ => FeatureValue::Missing,
                })
                .collect()
        })
        .collect();
    FeatureMatrix::from_rows(
        common::ids(rows.len()),
        (0..d).map(|f| format!("F{f}")).collect(),
        rows,
    )
    .unwrap()
}

fn frame(missing: bool) -> impl Strategy<Value = Vec<Vec<u8>>> {
    (2usize..20, 1usize..70).prop_flat_map(move |(n, d)| cells(n, d, missing))
}

proptest! {
    #[test]
    fn metric_sanity(rows in frame(true)) {
        let dm: DistanceMatrix = build_typ_matrix(&to_matrix(&rows)).unwrap();
        for i in 0..dm.len() {
            prop_assert_eq!(dm.get(i, i), 0.0);
            for j in 0..dm.len() {
                prop_assert_eq!(dm.get(i, j), dm.get(j, i));
                prop_assert!(dm.get(i, j) >= 0.0);
            }
        }
    }

    #[test]
    fn fully_covered_is_plain_euclidean(rows in frame(false)) {
        let dm: DistanceMatrix = build_typ_matrix(&to_matrix(&rows)).unwrap();
        for i in 0..rows.len() {
            for j in 0..rows.len() {
                let naive = rows[i]
                    .iter()
                    .zip(&rows[j])
                    .map(|(&a, &b)| (a as f64 - b as f64).powi(2))
                    .sum::<f64>()
                    .sqrt();
                prop_assert!((dm.get(i, j) - naive).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn normalization_preserves_rank(rows in frame(true)) {
        let dm: DistanceMatrix = build_typ_matrix(&to_matrix(&rows)).unwrap();
        let Ok(norm) = normalize_minmax(&dm) else { return Ok(()); };
        let raw: Vec<f64> = dm.upper_triangle().collect();
        let scaled: Vec<f64> = norm.upper_triangle().collect();
        for a in 0..raw.len() {
            prop_assert!((0.0..=1.0).contains(&scaled[a]));
            for b in 0..raw.len() {
                prop_assert_eq!(raw[a].partial_cmp(&raw[b]), scaled[a].partial_cmp(&scaled[b]));
            }
        }
    }

    #[test]
    fn persisted_matrix_round_trips(rows in frame(true)) {
        let dm: DistanceMatrix = build_typ_matrix(&to_matrix(&rows)).unwrap();
        let mut buf = Vec::new();
        write_matrix(&dm, &[], &mut buf).unwrap();
        let back: DistanceMatrix = read_matrix(buf.as_slice()).unwrap();
        prop_assert_eq!(back, dm);
    }
}

#[test]
fn parallel_build_is_bitwise_deterministic() {
    let mut r = common::rng(11);
    let m = common::random_binary(&mut r, 150, 90, 0.2);
    let serial: DistanceMatrix = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| build_typ_matrix(&m).unwrap());
    for threads in [2, 3, 8] {
        let parallel: DistanceMatrix = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| build_typ_matrix(&m).unwrap());
        let a: Vec<u64> = serial.upper_triangle().map(f64::to_bits).collect();
        let b: Vec<u64> = parallel.upper_triangle().map(f64::to_bits).collect();
        assert_eq!(a, b, "{threads} threads");
    }
}

#[test]
fn single_precision_agrees_with_double() {
    let mut r = common::rng(12);
    let m = common::random_binary(&mut r, 40, 30, 0.15);
    let double: DistanceMatrix = build_typ_matrix(&m).unwrap();
    let single: DistanceMatrix32 = build_typ_matrix(&m).unwrap();
    for (a, b) in double.upper_triangle().zip(single.upper_triangle()) {
        assert!((a - b as f64).abs() < 1e-5);
    }
    assert_eq!(double.cast::<f32>().kind(), DistanceKind::Typological);
}
