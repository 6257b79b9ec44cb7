use std::fmt;
use std::str::FromStr;

use super::{check_size, Method, Sample, SamplingFrame};
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Greedy objective: total distance to the selection, or distance to its
/// nearest member.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    MaxSum,
    MaxMin,
}

impl Objective {
    fn method(self) -> Method {
        match self {
            Objective::MaxSum => Method::MaxSum,
            Objective::MaxMin => Method::MaxMin,
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.method().fmt(f)
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "maxsum" => Ok(Objective::MaxSum),
            "maxmin" => Ok(Objective::MaxMin),
            other => Err(Error::Argument(format!(
                "objective must be maxsum or maxmin, got {other:?}"
            ))),
        }
    }
}

/// Frame members as matrix indices, with their ids.
struct Candidates<'a, T> {
    dm: &'a DistanceMatrix<T>,
    ids: &'a [String],
    idx: Vec<usize>,
}

impl<'a, T: Scalar> Candidates<'a, T> {
    fn new(dm: &'a DistanceMatrix<T>, frame: &'a SamplingFrame) -> Result<Self> {
        let idx = dm.positions(frame.language_ids())?;
        Ok(Candidates {
            dm,
            ids: frame.language_ids(),
            idx,
        })
    }

    #[inline]
    fn dist(&self, a: usize, b: usize) -> T {
        self.dm.get(self.idx[a], self.idx[b])
    }

    /// Argmax of `score` over candidates with `eligible`, smallest id on ties.
    fn argmax(&self, eligible: &[bool], score: impl Fn(usize) -> T) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for (c, _) in eligible.iter().enumerate().filter(|(_, &ok)| ok) {
            let s = score(c);
            best = match best {
                None => Some((c, s)),
                Some((b, bs)) if s > bs || (s == bs && self.ids[c] < self.ids[b]) => Some((c, s)),
                keep => keep,
            };
        }
        best.map(|(c, _)| c)
    }

    /// Language maximizing the sum of distances to the whole frame.
    fn seed(&self) -> usize {
        let n = self.ids.len();
        let sums: Vec<T> = (0..n)
            .map(|c| (0..n).fold(T::zero(), |acc, o| acc + self.dist(c, o)))
            .collect();
        self.argmax(&vec![true; n], |c| sums[c])
            .expect("non-empty frame")
    }
}

/// Runs the greedy from `start` (frame positions) until `target` languages are chosen.
///
/// MaxSum keeps a running sum per candidate, added to in selection order;
/// MaxMin keeps a running minimum. An empty `start` is seeded with the
/// language farthest in total from the rest of the frame.
fn run_greedy<T: Scalar>(
    cands: &Candidates<'_, T>,
    objective: Objective,
    mut selected: Vec<usize>,
    target: usize,
) -> Vec<usize> {
    let n = cands.ids.len();
    if selected.is_empty() && target > 0 {
        selected.push(cands.seed());
    }
    let mut eligible = vec![true; n];
    let init = match objective {
        Objective::MaxSum => T::zero(),
        Objective::MaxMin => T::infinity(),
    };
    let mut score = vec![init; n];
    let absorb = |score: &mut Vec<T>, eligible: &[bool], s: usize| {
        for c in 0..n {
            if eligible[c] {
                let d = cands.dist(c, s);
                score[c] = match objective {
                    Objective::MaxSum => score[c] + d,
                    Objective::MaxMin => score[c].min(d),
                };
            }
        }
    };
    for &s in &selected {
        eligible[s] = false;
    }
    for &s in &selected {
        absorb(&mut score, &eligible, s);
    }
    while selected.len() < target {
        let next = cands
            .argmax(&eligible, |c| score[c])
            .expect("target never exceeds frame size");
        eligible[next] = false;
        selected.push(next);
        absorb(&mut score, &eligible, next);
    }
    selected
}

fn to_ids(cands: &Candidates<'_, impl Scalar>, picks: &[usize]) -> Vec<String> {
    picks.iter().map(|&c| cands.ids[c].clone()).collect()
}

/// Greedy MaxSum selection of `k` languages.
pub fn sample_maxsum<T: Scalar>(
    dm: &DistanceMatrix<T>,
    frame: &SamplingFrame,
    k: usize,
) -> Result<Sample> {
    check_size(k, frame.len())?;
    let cands = Candidates::new(dm, frame)?;
    let picks = run_greedy(&cands, Objective::MaxSum, Vec::new(), k);
    Ok(Sample::new(to_ids(&cands, &picks), Method::MaxSum, None))
}

/// Greedy MaxMin selection of `k ≥ 2` languages.
pub fn sample_maxmin<T: Scalar>(
    dm: &DistanceMatrix<T>,
    frame: &SamplingFrame,
    k: usize,
) -> Result<Sample> {
    if k < 2 {
        return Err(Error::Argument(
            "MaxMin starts from two languages; k must be at least 2".into(),
        ));
    }
    check_size(k, frame.len())?;
    let cands = Candidates::new(dm, frame)?;
    let picks = run_greedy(&cands, Objective::MaxMin, Vec::new(), k);
    Ok(Sample::new(to_ids(&cands, &picks), Method::MaxMin, None))
}

/// Adds `n` languages to `base` with the chosen greedy objective.
///
/// With an empty base this is exactly [`sample_maxsum`] / [`sample_maxmin`]
/// with `k = n`.
pub fn extend_sample<T: Scalar>(
    dm: &DistanceMatrix<T>,
    frame: &SamplingFrame,
    base: &[String],
    n: usize,
    objective: Objective,
) -> Result<Sample> {
    let outside: Vec<String> = base
        .iter()
        .filter(|id| !frame.contains(id))
        .cloned()
        .collect();
    if !outside.is_empty() {
        return Err(Error::UnknownLanguage(outside));
    }
    let cands = Candidates::new(dm, frame)?;
    let mut start = Vec::with_capacity(base.len() + n);
    for id in base {
        let pos = cands
            .ids
            .iter()
            .position(|x| x == id)
            .expect("membership checked");
        if start.contains(&pos) {
            return Err(Error::Argument(format!("base sample repeats {id}")));
        }
        start.push(pos);
    }
    if n == 0 {
        return Err(Error::Argument(
            "number of additions must be positive".into(),
        ));
    }
    let room = frame.len() - base.len();
    if n > room {
        return Err(Error::Size {
            requested: n,
            available: room,
        });
    }
    if base.is_empty() && objective == Objective::MaxMin && n < 2 {
        return Err(Error::Argument(
            "MaxMin from an empty base needs at least two languages".into(),
        ));
    }
    let picks = run_greedy(&cands, objective, start, base.len() + n);
    let languages = to_ids(&cands, &picks);
    Ok(Sample {
        k: languages.len(),
        languages,
        method: if base.is_empty() {
            objective.method()
        } else {
            Method::Extension
        },
        seed: None,
        base_len: base.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::DistanceKind;

    /// Distances |x - y| between 1-D positions; ids are the positions.
    fn line(points: &[f64]) -> (DistanceMatrix<f64>, SamplingFrame) {
        let ids: Vec<String> = points.iter().map(|p| format!("{p}")).collect();
        let dm = DistanceMatrix::from_fn(ids.clone(), DistanceKind::Custom, |i, j| {
            (points[i] - points[j]).abs()
        })
        .unwrap();
        (dm, SamplingFrame::new(&ids).unwrap())
    }

    #[test]
    fn maxsum_hand_trace() {
        let (dm, frame) = line(&[0.0, 1.0, 10.0]);
        assert_eq!(
            sample_maxsum(&dm, &frame, 2).unwrap().languages,
            ["10", "0"]
        );
        assert_eq!(
            sample_maxsum(&dm, &frame, 3).unwrap().languages,
            ["10", "0", "1"]
        );
        assert_eq!(sample_maxsum(&dm, &frame, 1).unwrap().languages, ["10"]);
    }

    #[test]
    fn maxmin_hand_trace() {
        let (dm, frame) = line(&[0.0, 4.0, 5.0, 10.0]);
        assert_eq!(
            sample_maxmin(&dm, &frame, 3).unwrap().languages,
            ["10", "0", "5"]
        );
        assert_eq!(
            sample_maxmin(&dm, &frame, 2).unwrap().languages,
            ["10", "0"]
        );
        let scaled = dm.map_off_diagonal(|x| 3.0 * x).unwrap();
        assert_eq!(
            sample_maxmin(&scaled, &frame, 3).unwrap().languages,
            ["10", "0", "5"]
        );
    }

    #[test]
    fn size_errors() {
        let (dm, frame) = line(&[0.0, 1.0, 10.0]);
        assert!(matches!(
            sample_maxsum(&dm, &frame, 0),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            sample_maxsum(&dm, &frame, 4),
            Err(Error::Size { .. })
        ));
        assert!(matches!(
            sample_maxmin(&dm, &frame, 1),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            sample_maxmin(&dm, &frame, 4),
            Err(Error::Size { .. })
        ));
    }

    #[test]
    fn ties_go_to_smallest_id() {
        // a square: every language has the same total distance
        let ids: Vec<String> = ["d", "b", "c", "a"].iter().map(|s| s.to_string()).collect();
        let pts = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        let dm = DistanceMatrix::from_fn(ids.clone(), DistanceKind::Custom, |i, j| {
            let (a, b): ((f64, f64), (f64, f64)) = (pts[i], pts[j]);
            ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
        })
        .unwrap();
        let frame = SamplingFrame::new(&ids).unwrap();
        let s = sample_maxmin(&dm, &frame, 2).unwrap();
        // "a" seeds; its diagonal opposite is "b"
        assert_eq!(s.languages, ["a", "b"]);
    }

    #[test]
    fn extension_hand_trace() {
        let (dm, frame) = line(&[0.0, 1.0, 10.0]);
        let s = extend_sample(&dm, &frame, &["1".into()], 1, Objective::MaxSum).unwrap();
        assert_eq!(s.languages, ["1", "10"]);
        assert_eq!(s.additions(), ["10"]);
        assert_eq!(s.method, Method::Extension);

        let all = extend_sample(&dm, &frame, &["1".into()], 2, Objective::MaxMin).unwrap();
        assert_eq!(all.len(), 3);

        let empty = extend_sample(&dm, &frame, &[], 2, Objective::MaxSum).unwrap();
        assert_eq!(
            empty.languages,
            sample_maxsum(&dm, &frame, 2).unwrap().languages
        );

        assert!(matches!(
            extend_sample(&dm, &frame, &["1".into()], 3, Objective::MaxSum),
            Err(Error::Size { .. })
        ));
        assert!(matches!(
            extend_sample(&dm, &frame, &["7".into()], 1, Objective::MaxSum),
            Err(Error::UnknownLanguage(_))
        ));
    }

    #[test]
    fn frame_subset_of_matrix() {
        let (dm, _) = line(&[0.0, 1.0, 10.0, 11.0]);
        let frame = SamplingFrame::new(&["0", "1", "10"]).unwrap();
        // 11 is outside the frame and never considered
        assert_eq!(
            sample_maxsum(&dm, &frame, 2).unwrap().languages,
            ["10", "0"]
        );
        let bad = SamplingFrame::new(&["0", "99"]).unwrap();
        assert!(matches!(
            sample_maxsum(&dm, &bad, 1),
            Err(Error::UnknownLanguage(_))
        ));
    }
}
