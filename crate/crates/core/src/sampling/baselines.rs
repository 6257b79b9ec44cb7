use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_size, GroupLevel, Method, Sample, SamplingFrame};
use crate::error::{Error, Result};

fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform index in `0..n`, drawn as `u64` for cross-platform streams.
fn uniform(rng: &mut ChaCha8Rng, n: usize) -> usize {
    rng.gen_range(0..n as u64) as usize
}

/// First `k` entries of a seeded Fisher-Yates shuffle.
fn partial_shuffle<T>(items: &mut [T], k: usize, rng: &mut ChaCha8Rng) {
    for i in 0..k.min(items.len()) {
        let j = i + uniform(rng, items.len() - i);
        items.swap(i, j);
    }
}

/// Uniform sample without replacement.
pub fn sample_random(frame: &SamplingFrame, k: usize, seed: u64) -> Result<Sample> {
    check_size(k, frame.len())?;
    let mut rng = stream(seed);
    let mut ids = frame.language_ids().to_vec();
    partial_shuffle(&mut ids, k, &mut rng);
    ids.truncate(k);
    Ok(Sample::new(ids, Method::Random, Some(seed)))
}

/// Phylogenetically stratified sample: one language per group per round.
///
/// Each round visits the groups that still have unsampled members, in
/// uniformly random order without replacement, and takes one uniformly
/// chosen member from each until `k` is reached. Frame languages without a
/// label count as singleton groups.
pub fn sample_by_group(frame: &SamplingFrame, k: usize, seed: u64) -> Result<Sample> {
    let grouping = frame
        .grouping()
        .ok_or_else(|| Error::Config("group sampling needs family or genus labels".into()))?;
    check_size(k, frame.len())?;

    // (is_singleton, key) sorts labelled groups first, then isolates by id.
    let mut groups: BTreeMap<(bool, &str), Vec<&String>> = BTreeMap::new();
    for id in frame.language_ids() {
        let key = match grouping.labels.get(id) {
            Some(label) => (false, label.as_str()),
            None => (true, id.as_str()),
        };
        groups.entry(key).or_default().push(id);
    }
    let mut remaining: Vec<Vec<&String>> = groups.into_values().collect();

    let mut rng = stream(seed);
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let mut pool: Vec<usize> = (0..remaining.len())
            .filter(|&g| !remaining[g].is_empty())
            .collect();
        while !pool.is_empty() && out.len() < k {
            let g = pool.remove(uniform(&mut rng, pool.len()));
            let members = &mut remaining[g];
            let m = uniform(&mut rng, members.len());
            out.push(members.remove(m).clone());
        }
    }
    let method = match grouping.level {
        GroupLevel::Family => Method::RandomFamily,
        GroupLevel::Genus => Method::RandomGenus,
    };
    Ok(Sample::new(out, method, Some(seed)))
}

/// The `k` most frequent languages; a count tie straddling position `k` is
/// broken by a seeded shuffle of the tied languages.
pub fn sample_convenience(frame: &SamplingFrame, k: usize, seed: u64) -> Result<Sample> {
    let freqs = frame
        .frequencies()
        .ok_or_else(|| Error::Config("convenience sampling needs a frequency list".into()))?;
    check_size(k, freqs.len())?;

    let mut sorted: Vec<&(String, u64)> = freqs.iter().collect();
    sorted.sort_by_key(|&(_, count)| std::cmp::Reverse(count));

    let boundary = sorted[k - 1].1;
    let start = sorted.iter().position(|e| e.1 == boundary).unwrap();
    let end = sorted.iter().rposition(|e| e.1 == boundary).unwrap() + 1;

    let mut out: Vec<String> = sorted[..start].iter().map(|e| e.0.clone()).collect();
    let mut tied: Vec<String> = sorted[start..end].iter().map(|e| e.0.clone()).collect();
    let need = k - start;
    if end > k {
        let mut rng = stream(seed);
        partial_shuffle(&mut tied, need, &mut rng);
    }
    out.extend(tied.into_iter().take(need));
    Ok(Sample::new(out, Method::Convenience, Some(seed)))
}
