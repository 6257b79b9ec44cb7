use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the toolkit reports.
///
/// Display strings start with a stable lowercase prefix (`parse error:`,
/// `size error:` ...) so diagnostics can be grepped.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("parse error: {location}: {message}")]
    Parse { location: String, message: String },

    #[error("duplicate language: {id} ({location})")]
    DuplicateLanguage { id: String, location: String },

    #[error("duplicate feature: {id} ({location})")]
    DuplicateFeature { id: String, location: String },

    #[error(
        "conflict error: language {language}, feature {feature}: values {first:?} and {second:?}"
    )]
    Conflict {
        language: String,
        feature: String,
        first: String,
        second: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("metadata error: {0}")]
    Metadata(String),

    #[error("unknown feature: {0}")]
    UnknownFeature(String),

    #[error("unknown language: {}", .0.join(", "))]
    UnknownLanguage(Vec<String>),

    #[error("no shared coverage: {} pair(s) share no covered feature: {}", .0.len(), format_pairs(.0))]
    NoSharedCoverage(Vec<(String, String)>),

    #[error("not binary: feature {feature} still holds multistate value {value:?} for {language}")]
    NotBinary {
        language: String,
        feature: String,
        value: String,
    },

    #[error("degenerate distances: {0}")]
    Degenerate(String),

    #[error("invalid coordinate: {0}")]
    InvalidCoordinate(String),

    #[error("argument error: {0}")]
    Argument(String),

    #[error("size error: requested {requested} but only {available} available")]
    Size { requested: usize, available: usize },

    #[error("coverage error: {0}")]
    Coverage(String),
}

fn format_pairs(pairs: &[(String, String)]) -> String {
    const SHOWN: usize = 20;
    let mut out = pairs
        .iter()
        .take(SHOWN)
        .map(|(a, b)| format!("({a}, {b})"))
        .collect::<Vec<_>>()
        .join(", ");
    if pairs.len() > SHOWN {
        out.push_str(&format!(", ... {} more", pairs.len() - SHOWN));
    }
    out
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}
