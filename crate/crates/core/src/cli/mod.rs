//! Command-line front end: `matrix`, `sample`, `metrics`, `sweep`, `expand`, `audit`.
//!
//! Every command is a file-to-file transformation. Outputs carry `#`
//! provenance headers (frame hash, preprocessing flags, seed, version), and
//! identical inputs and flags give byte-identical outputs.

mod pipeline;

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::distance::write_matrix;
use crate::error::{Error, Result};
use crate::metrics::{
    entropy, evaluate_sample_scores, family_coherence, fvi, fvo, mpd, nearest_neighbor_family_rate,
    read_scores, write_report, DiversityReport,
};
use crate::sampling::{
    extend_sample, read_frequency_list, read_sample, sample_by_group, sample_convenience,
    sample_maxmin, sample_maxsum, sample_random, write_sample, GroupLevel, Method, Objective,
    Sample, SamplingFrame,
};
use crate::DistanceMatrix;

pub use pipeline::{distances, hash_matrix, prepare, DistanceArgs, InputArgs, Prepared};

#[derive(Debug, Parser)]
#[command(
    name = "typdiv",
    version,
    about = "Typologically diverse language sampling"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a pairwise distance matrix.
    Matrix(MatrixArgs),
    /// Draw a sample with one method.
    Sample(SampleArgs),
    /// Diversity report for a sample.
    Metrics(MetricsArgs),
    /// Metrics over a range of sample sizes and methods.
    Sweep(SweepArgs),
    /// Add the languages that most increase diversity to an existing sample.
    Expand(ExpandArgs),
    /// Family coherence and cross-family nearest neighbours.
    Audit(AuditArgs),
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub dist: DistanceArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub dist: DistanceArgs,
    #[arg(long, default_value = "maxsum")]
    pub method: Method,
    #[arg(short)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV of (language_id, count) for convenience sampling.
    #[arg(long)]
    pub freq_list: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub dist: DistanceArgs,
    /// Sample file (one language id per line).
    #[arg(long)]
    pub sample: PathBuf,
    /// CSV of (language_id, score) to summarize for the sample.
    #[arg(long)]
    pub scores: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub dist: DistanceArgs,
    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',', default_value = "maxsum,maxmin,random")]
    pub method: Vec<Method>,
    /// Inclusive range `lo:hi`.
    #[arg(long)]
    pub k_range: KRange,
    /// Runs per seeded method; run r uses seed + r.
    #[arg(long, default_value_t = 10)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub freq_list: Option<PathBuf>,
    /// Emit mean and standard deviation per (method, k) instead of raw rows.
    #[arg(long)]
    pub aggregate: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub dist: DistanceArgs,
    #[arg(long)]
    pub base_sample: PathBuf,
    /// Restrict additions to these languages (sample-file format).
    #[arg(long)]
    pub candidates: Option<PathBuf>,
    #[arg(short, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value = "maxsum")]
    pub method: Objective,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub dist: DistanceArgs,
    /// Only report the N largest families.
    #[arg(long)]
    pub top: Option<usize>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KRange {
    pub lo: usize,
    pub hi: usize,
}

impl std::str::FromStr for KRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Argument(format!("k-range must look like lo:hi, got {s:?}"));
        let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
        let lo = lo.trim().parse().map_err(|_| bad())?;
        let hi = hi.trim().parse().map_err(|_| bad())?;
        Ok(KRange { lo, hi })
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::io(p, e))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn flush(mut w: Box<dyn Write>) -> Result<()> {
    w.flush().map_err(|e| Error::io("<output>", e))
}

fn report_notes(prepared: &Prepared) {
    for note in &prepared.notes {
        eprintln!("typdiv: note: {note}");
    }
}

fn dist_provenance(dm: &DistanceMatrix) -> (String, String) {
    (
        "distances".into(),
        format!("{},normalized={}", dm.kind(), dm.is_normalized()),
    )
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Matrix(a) => cmd_matrix(&a),
        Command::Sample(a) => cmd_sample(&a),
        Command::Metrics(a) => cmd_metrics(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Expand(a) => cmd_expand(&a),
        Command::Audit(a) => cmd_audit(&a),
    }
}

pub fn cmd_matrix(args: &MatrixArgs) -> Result<()> {
    let mut prepared = prepare(&args.input)?;
    let dm = distances(&mut prepared, &args.dist)?;
    report_notes(&prepared);
    let out = open_output(args.output.as_deref())?;
    let mut out = out;
    write_matrix(&dm, &prepared.provenance(), &mut out)?;
    flush(out)
}

/// Builds the frame with grouping/frequency data the method needs.
fn sampling_frame(
    prepared: &Prepared,
    ids: &[String],
    method: Method,
    freq_list: Option<&Path>,
) -> Result<SamplingFrame> {
    let frame = SamplingFrame::new(ids)?;
    match method {
        Method::RandomFamily => frame.with_record_grouping(prepared.records()?, GroupLevel::Family),
        Method::RandomGenus => frame.with_record_grouping(prepared.records()?, GroupLevel::Genus),
        Method::Convenience => {
            let path = freq_list
                .ok_or_else(|| Error::Config("convenience sampling needs --freq-list".into()))?;
            let file = File::open(path).map_err(|e| Error::io(path, e))?;
            let list = read_frequency_list(file)?;
            let total = list.len();
            let kept: Vec<(String, u64)> = list
                .into_iter()
                .filter(|(id, _)| frame.contains(id))
                .collect();
            if kept.len() < total {
                eprintln!(
                    "typdiv: note: {} frequency-list language(s) are outside the frame and ignored",
                    total - kept.len()
                );
            }
            frame.with_frequencies(kept)
        }
        _ => Ok(frame),
    }
}

fn draw(
    method: Method,
    dm: Option<&DistanceMatrix>,
    frame: &SamplingFrame,
    k: usize,
    seed: u64,
) -> Result<Sample> {
    let need_dm = || dm.ok_or_else(|| Error::Config("greedy sampling needs distances".into()));
    match method {
        Method::MaxSum => sample_maxsum(need_dm()?, frame, k),
        Method::MaxMin => sample_maxmin(need_dm()?, frame, k),
        Method::Random => sample_random(frame, k, seed),
        Method::RandomFamily | Method::RandomGenus => sample_by_group(frame, k, seed),
        Method::Convenience => sample_convenience(frame, k, seed),
        Method::Extension => Err(Error::Argument(
            "extension is not a sampling method; use the expand command".into(),
        )),
    }
}

pub fn cmd_sample(args: &SampleArgs) -> Result<()> {
    let mut prepared = prepare(&args.input)?;
    let greedy = matches!(args.method, Method::MaxSum | Method::MaxMin);
    let dm = if greedy || args.dist.matrix.is_some() {
        Some(distances(&mut prepared, &args.dist)?)
    } else {
        None
    };
    report_notes(&prepared);
    let ids = pipeline::frame_ids(&prepared, dm.as_ref())?;
    let frame = sampling_frame(&prepared, &ids, args.method, args.freq_list.as_deref())?;
    let mut sample = draw(args.method, dm.as_ref(), &frame, args.k, args.seed)?;
    if !args.method.is_seeded() {
        sample.seed = None;
    }
    let mut header = prepared.provenance();
    if let Some(dm) = &dm {
        header.push(dist_provenance(dm));
    }
    let mut out = open_output(args.output.as_deref())?;
    write_sample(&sample, &header, &mut out)?;
    flush(out)
}

pub fn cmd_metrics(args: &MetricsArgs) -> Result<()> {
    let mut prepared = prepare(&args.input)?;
    let dm = distances(&mut prepared, &args.dist)?;
    report_notes(&prepared);
    let sample = read_sample(&args.sample)?;
    let matrix = prepared.features()?;
    let missing: Vec<String> = sample
        .languages
        .iter()
        .filter(|id| matrix.position(id).is_none() || dm.position(id).is_none())
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(Error::UnknownLanguage(missing));
    }
    let report = DiversityReport::compute(&sample.languages, &dm, matrix)?;
    let mut out = open_output(args.output.as_deref())?;
    write_report(
        &report,
        &prepared.frame_hash,
        &[dist_provenance(&dm)],
        &mut out,
    )?;
    flush(out)?;

    if let Some(path) = &args.scores {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let scores = read_scores(file)?;
        let summary = evaluate_sample_scores(&sample.languages, &scores)?;
        let mut w = io::stdout().lock();
        let io_err = |e| Error::io("<stdout>", e);
        writeln!(w, "set,n,mean,sd,min,max").map_err(io_err)?;
        for (name, s) in [
            ("sample", &summary.sample),
            ("population", &summary.population),
        ] {
            writeln!(
                w,
                "{name},{},{:.5},{:.5},{:.5},{:.5}",
                s.n, s.mean, s.sd, s.min, s.max
            )
            .map_err(io_err)?;
        }
        if !summary.uncovered.is_empty() {
            eprintln!(
                "typdiv: note: sample languages without a score: {}",
                summary.uncovered.join(", ")
            );
        }
    }
    Ok(())
}

/// One sweep cell: `(method index, k, run)` with its report.
struct SweepRow {
    method: usize,
    k: usize,
    run: usize,
    report: DiversityReport<f64>,
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    if args.runs == 0 {
        return Err(Error::Argument("--runs must be at least 1".into()));
    }
    if args.method.is_empty() {
        return Err(Error::Argument("no methods given".into()));
    }
    let mut prepared = prepare(&args.input)?;
    let dm = distances(&mut prepared, &args.dist)?;
    report_notes(&prepared);
    let matrix = prepared.features()?;
    let ids = pipeline::frame_ids(&prepared, Some(&dm))?;
    let KRange { lo, hi } = args.k_range;
    if lo < 1 || lo > hi || hi > ids.len() {
        return Err(Error::Argument(format!(
            "k-range {lo}:{hi} must satisfy 1 <= lo <= hi <= {}",
            ids.len()
        )));
    }

    let frames = args
        .method
        .iter()
        .map(|&m| sampling_frame(&prepared, &ids, m, args.freq_list.as_deref()))
        .collect::<Result<Vec<_>>>()?;

    let mut cells = Vec::new();
    for (mi, &method) in args.method.iter().enumerate() {
        let runs = if method.is_seeded() { args.runs } else { 1 };
        for k in lo..=hi {
            for run in 0..runs {
                cells.push((mi, k, run));
            }
        }
    }
    let mut rows = cells
        .into_par_iter()
        .map(|(mi, k, run)| {
            let seed = args.seed + run as u64;
            let sample = draw(args.method[mi], Some(&dm), &frames[mi], k, seed)?;
            let report = DiversityReport::compute(&sample.languages, &dm, matrix)?;
            Ok(SweepRow {
                method: mi,
                k,
                run,
                report,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.method, r.k, r.run));

    let mut out = open_output(args.output.as_deref())?;
    let io_err = |e| Error::io("<sweep writer>", e);
    for (k, v) in prepared.provenance() {
        writeln!(out, "# {k}={v}").map_err(io_err)?;
    }
    writeln!(out, "# seed={}", args.seed).map_err(io_err)?;
    let (dk, dv) = dist_provenance(&dm);
    writeln!(out, "# {dk}={dv}").map_err(io_err)?;
    if args.aggregate {
        writeln!(
            out,
            "method,k,runs,mpd_mean,mpd_sd,fvo_mean,fvo_sd,fvi_mean,fvi_sd,entropy_mean,entropy_sd"
        )
        .map_err(io_err)?;
        for group in rows.chunk_by(|a, b| a.method == b.method && a.k == b.k) {
            let mut line = format!(
                "{},{},{}",
                args.method[group[0].method],
                group[0].k,
                group.len()
            );
            for m in 0..4 {
                let xs: Vec<f64> = group.iter().map(|r| r.report.values()[m].1).collect();
                let (mean, sd) = mean_sd(&xs);
                line.push_str(&format!(",{mean:.5},{sd:.5}"));
            }
            writeln!(out, "{line}").map_err(io_err)?;
        }
    } else {
        writeln!(out, "method,k,run,mpd,fvo,fvi,entropy").map_err(io_err)?;
        for r in &rows {
            writeln!(
                out,
                "{},{},{},{:.5},{:.5},{:.5},{:.5}",
                args.method[r.method],
                r.k,
                r.run,
                r.report.mpd,
                r.report.fvo,
                r.report.fvi,
                r.report.entropy
            )
            .map_err(io_err)?;
        }
    }
    flush(out)
}

/// Mean and sample standard deviation (0 for a single value).
fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn cmd_expand(args: &ExpandArgs) -> Result<()> {
    let mut prepared = prepare(&args.input)?;
    let dm = distances(&mut prepared, &args.dist)?;
    report_notes(&prepared);
    let base = read_sample(&args.base_sample)?.languages;
    let all = pipeline::frame_ids(&prepared, Some(&dm))?;
    let unknown: Vec<String> = base
        .iter()
        .filter(|id| dm.position(id).is_none())
        .cloned()
        .collect();
    if !unknown.is_empty() {
        return Err(Error::UnknownLanguage(unknown));
    }

    let frame_ids = match &args.candidates {
        Some(path) => {
            let candidates = read_sample(path)?.languages;
            let mut ids = base.clone();
            let seen: HashSet<&String> = base.iter().collect();
            ids.extend(candidates.into_iter().filter(|c| !seen.contains(c)));
            dm.positions(&ids)?;
            ids
        }
        None => all,
    };
    let frame = SamplingFrame::new(&frame_ids)?;
    let sample = extend_sample(&dm, &frame, &base, args.n, args.method)?;

    let mut header = prepared.provenance();
    header.push(dist_provenance(&dm));
    header.push(("objective".into(), args.method.to_string()));
    let to_stdout = args.output.is_none();
    let mut out = open_output(args.output.as_deref())?;
    write_sample(&sample, &header, &mut out)?;
    flush(out)?;

    if let Some(matrix) = &prepared.matrix {
        let before = metric_values(&base, &dm, matrix);
        let after = metric_values(&sample.languages, &dm, matrix);
        let mut lines = vec!["metric,before,after".to_string()];
        for ((name, b), (_, a)) in before.iter().zip(&after) {
            let fmt = |x: &Option<f64>| x.map(|v| format!("{v:.5}")).unwrap_or_else(|| "NA".into());
            lines.push(format!("{name},{},{}", fmt(b), fmt(a)));
        }
        let text = lines.join("\n");
        if to_stdout {
            eprintln!("{text}");
        } else {
            println!("{text}");
        }
    }
    Ok(())
}

/// Each metric, or `None` where the sample is too small for it.
pub fn metric_values(
    sample: &[String],
    dm: &DistanceMatrix,
    matrix: &crate::frame::FeatureMatrix,
) -> [(&'static str, Option<f64>); 4] {
    [
        ("mpd", mpd(sample, dm).ok()),
        ("fvo", fvo(sample, matrix).ok()),
        ("fvi", fvi(sample, matrix).ok()),
        ("entropy", entropy(sample, matrix).ok()),
    ]
}

pub fn cmd_audit(args: &AuditArgs) -> Result<()> {
    let mut prepared = prepare(&args.input)?;
    let records = prepared.records()?.clone();
    if !records.has_any_family() {
        return Err(Error::Config("metadata carries no family labels".into()));
    }
    let dm = distances(&mut prepared, &args.dist)?;
    report_notes(&prepared);
    let matrix = prepared.features()?;
    let mut rows = family_coherence::<f64>(matrix, &records)?;
    if let Some(top) = args.top {
        rows.truncate(top);
    }
    let rate: f64 = nearest_neighbor_family_rate(&dm, &records)?;

    let mut out = open_output(args.output.as_deref())?;
    let io_err = |e| Error::io("<audit writer>", e);
    for (k, v) in prepared.provenance() {
        writeln!(out, "# {k}={v}").map_err(io_err)?;
    }
    writeln!(out, "# nearest_neighbor_cross_family_rate={rate:.5}").map_err(io_err)?;
    writeln!(out, "family,n_languages,mean_pairwise_overlap").map_err(io_err)?;
    for r in &rows {
        let family = if r.family.contains([',', '"']) {
            format!("\"{}\"", r.family.replace('"', "\"\""))
        } else {
            r.family.clone()
        };
        writeln!(
            out,
            "{family},{},{:.5}",
            r.n_languages, r.mean_pairwise_overlap
        )
        .map_err(io_err)?;
    }
    flush(out)?;
    if args.output.is_some() {
        println!("nearest_neighbor_cross_family_rate={rate:.5}");
    }
    Ok(())
}
