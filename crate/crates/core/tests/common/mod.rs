#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use typdiv::distance::{geographic_distance, DistanceKind};
use typdiv::frame::FeatureValue;
use typdiv::{DistanceMatrix, FeatureMatrix, SamplingFrame};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("lang{i:04}")).collect()
}

/// Random binary frame with the given missing rate. Every language keeps at
/// least one covered cell in feature 0 so that pairs always share coverage.
pub fn random_binary(r: &mut impl Rng, n: usize, d: usize, missing: f64) -> FeatureMatrix {
    let rows: Vec<Vec<FeatureValue>> = (0..n)
        .map(|_| {
            (0..d)
                .map(|f| {
                    if f > 0 && r.gen_bool(missing) {
                        FeatureValue::Missing
                    } else if r.gen_bool(0.5) {
                        FeatureValue::One
                    } else {
                        FeatureValue::Zero
                    }
                })
                .collect()
        })
        .collect();
    let features = (0..d).map(|f| format!("F{f:03}")).collect();
    FeatureMatrix::from_rows(ids(n), features, rows).unwrap()
}

/// Euclidean distances between random points in the unit cube.
pub fn random_points(r: &mut impl Rng, n: usize, dims: usize) -> DistanceMatrix {
    let pts: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dims).map(|_| r.gen::<f64>()).collect())
        .collect();
    DistanceMatrix::from_fn(ids(n), DistanceKind::Custom, |i, j| {
        pts[i]
            .iter()
            .zip(&pts[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    })
    .unwrap()
}

/// Great-circle distances between points drawn uniformly on the sphere.
pub fn random_sphere(r: &mut impl Rng, n: usize) -> DistanceMatrix {
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let z: f64 = r.gen_range(-1.0..1.0);
            let lat = z.asin().to_degrees();
            let lon = r.gen_range(-180.0..180.0);
            (lat, lon)
        })
        .collect();
    DistanceMatrix::from_fn(ids(n), DistanceKind::Geographic, |i, j| {
        geographic_distance(pts[i], pts[j]).unwrap()
    })
    .unwrap()
}

pub fn full_frame(dm: &DistanceMatrix) -> SamplingFrame {
    SamplingFrame::new(dm.language_ids()).unwrap()
}

fn better(s: f64, id: &str, best: &Option<(f64, String)>) -> bool {
    match best {
        None => true,
        Some((bs, bid)) => s > *bs || (s == *bs && id < bid.as_str()),
    }
}

/// Line-by-line transcription of the MaxSum greedy, recomputing every sum
/// from scratch at every step.
pub fn oracle_maxsum(dm: &DistanceMatrix, k: usize) -> Vec<String> {
    let all = dm.language_ids();
    let dist = |a: &str, b: &str| dm.between(a, b).unwrap();
    let mut best: Option<(f64, String)> = None;
    for l in all {
        let mut s = 0.0;
        for l2 in all {
            s += dist(l, l2);
        }
        if better(s, l, &best) {
            best = Some((s, l.clone()));
        }
    }
    let mut chosen = vec![best.unwrap().1];
    while chosen.len() < k {
        let mut best: Option<(f64, String)> = None;
        for l in all.iter().filter(|l| !chosen.contains(l)) {
            let mut s = 0.0;
            for l2 in &chosen {
                s += dist(l, l2);
            }
            if better(s, l, &best) {
                best = Some((s, l.clone()));
            }
        }
        chosen.push(best.unwrap().1);
    }
    chosen
}

/// Line-by-line transcription of the MaxMin greedy.
pub fn oracle_maxmin(dm: &DistanceMatrix, k: usize) -> Vec<String> {
    let all = dm.language_ids();
    let dist = |a: &str, b: &str| dm.between(a, b).unwrap();
    let first = oracle_maxsum(dm, 1).remove(0);
    let mut best: Option<(f64, String)> = None;
    for l in all.iter().filter(|l| **l != first) {
        if better(dist(l, &first), l, &best) {
            best = Some((dist(l, &first), l.clone()));
        }
    }
    let mut chosen = vec![first, best.unwrap().1];
    while chosen.len() < k {
        let mut best: Option<(f64, String)> = None;
        for l in all.iter().filter(|l| !chosen.contains(l)) {
            let m = chosen
                .iter()
                .map(|c| dist(l, c))
                .fold(f64::INFINITY, f64::min);
            if better(m, l, &best) {
                best = Some((m, l.clone()));
            }
        }
        chosen.push(best.unwrap().1);
    }
    chosen
}

/// Smallest pairwise distance within a sample.
pub fn min_pairwise(dm: &DistanceMatrix, sample: &[String]) -> f64 {
    let mut m = f64::INFINITY;
    for (a, x) in sample.iter().enumerate() {
        for y in &sample[a + 1..] {
            m = m.min(dm.between(x, y).unwrap());
        }
    }
    m
}

/// Exhaustive MaxMin optimum over all `k`-subsets.
pub fn brute_force_maxmin(dm: &DistanceMatrix, k: usize) -> f64 {
    fn go(dm: &DistanceMatrix, k: usize, start: usize, picked: &mut Vec<usize>, best: &mut f64) {
        if picked.len() == k {
            let mut m = f64::INFINITY;
            for (a, &i) in picked.iter().enumerate() {
                for &j in &picked[a + 1..] {
                    m = m.min(dm.get(i, j));
                }
            }
            *best = best.max(m);
            return;
        }
        for i in start..dm.len() {
            picked.push(i);
            go(dm, k, i + 1, picked, best);
            picked.pop();
        }
    }
    let mut best = f64::NEG_INFINITY;
    go(dm, k, 0, &mut Vec::new(), &mut best);
    best
}

/// Textbook Shannon entropy of one binary column, in bits.
pub fn naive_entropy(column: &[u8]) -> f64 {
    if column.is_empty() {
        return 0.0;
    }
    let n = column.len() as f64;
    let ones = column.iter().filter(|&&v| v == 1).count() as f64;
    let mut h = 0.0;
    for p in [ones / n, 1.0 - ones / n] {
        if p > 0.0 {
            h -= p * p.ln() / std::f64::consts::LN_2;
        }
    }
    h
}
