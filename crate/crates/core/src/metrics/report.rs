use std::io::Write;

use super::{entropy, fvi, fvo, mpd};
use crate::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::frame::FeatureMatrix;
use crate::scalar::Scalar;

/// All four diversity metrics for one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DiversityReport<T> {
    pub mpd: T,
    pub fvo: T,
    pub fvi: T,
    pub entropy: T,
    pub sample_size: usize,
    pub d: usize,
    pub normalized_distances: bool,
}

impl<T: Scalar> DiversityReport<T> {
    pub fn compute<S: AsRef<str>>(
        sample: &[S],
        dm: &DistanceMatrix<T>,
        matrix: &FeatureMatrix,
    ) -> Result<Self> {
        Ok(DiversityReport {
            mpd: mpd(sample, dm)?,
            fvo: fvo(sample, matrix)?,
            fvi: fvi(sample, matrix)?,
            entropy: entropy(sample, matrix)?,
            sample_size: sample.len(),
            d: matrix.dim(),
            normalized_distances: dm.is_normalized(),
        })
    }

    /// `(name, value)` in the canonical order mpd, fvo, fvi, entropy.
    pub fn values(&self) -> [(&'static str, T); 4] {
        [
            ("mpd", self.mpd),
            ("fvo", self.fvo),
            ("fvi", self.fvi),
            ("entropy", self.entropy),
        ]
    }
}

/// CSV with columns `metric,value,sample_size,d,frame_hash`, 5 decimals.
pub fn write_report<T: Scalar, W: Write>(
    report: &DiversityReport<T>,
    frame_hash: &str,
    extra_header: &[(String, String)],
    mut writer: W,
) -> Result<()> {
    let io_err = |e| Error::io("<report writer>", e);
    writeln!(
        writer,
        "# normalized_distances={}",
        report.normalized_distances
    )
    .map_err(io_err)?;
    for (k, v) in extra_header {
        writeln!(writer, "# {k}={v}").map_err(io_err)?;
    }
    writeln!(writer, "metric,value,sample_size,d,frame_hash").map_err(io_err)?;
    for (name, value) in report.values() {
        writeln!(
            writer,
            "{name},{:.5},{},{},{frame_hash}",
            value.to_f64_lossy(),
            report.sample_size,
            report.d
        )
        .map_err(io_err)?;
    }
    Ok(())
}
