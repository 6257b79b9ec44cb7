//! Shared ingestion and preprocessing for every subcommand.

use std::path::PathBuf;

use clap::Args;
use sha2::{Digest, Sha256};

use crate::distance::{
    build_geo_matrix, build_typ_matrix, drop_uncovered_languages, load_matrix, normalize_minmax,
};
use crate::error::{Error, Result};
use crate::frame::{
    binarize, crop_languages, load_cldf_with, load_records, load_wide_csv_with,
    remove_macrolanguages, subselect_features, write_wide_csv, BinarizationMap, FeatureMatrix,
    LoadOptions, RecordTable, DEFAULT_CROP_THRESHOLD,
};
use crate::DistanceMatrix;

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Wide feature CSV (first column `glottocode`).
    #[arg(long)]
    pub frame: Option<PathBuf>,
    /// CLDF values table (Language_ID, Parameter_ID, Value).
    #[arg(long, requires = "cldf_languages", conflicts_with = "frame")]
    pub cldf_values: Option<PathBuf>,
    /// CLDF languages table.
    #[arg(long, requires = "cldf_values")]
    pub cldf_languages: Option<PathBuf>,
    /// Language metadata CSV (glottocode, name, family, genus, latitude, longitude, child_count).
    #[arg(long)]
    pub meta: Option<PathBuf>,
    /// Binarization map CSV; defaults to the bundled Grambank split.
    #[arg(long)]
    pub binmap: Option<PathBuf>,
    /// Crop languages whose share of missing cells exceeds this.
    #[arg(long, default_value_t = DEFAULT_CROP_THRESHOLD)]
    pub crop: f64,
    #[arg(long)]
    pub no_binarize: bool,
    #[arg(long)]
    pub no_macro_filter: bool,
    /// Comma-separated feature ids to keep (after binarization).
    #[arg(long, value_delimiter = ',')]
    pub features: Option<Vec<String>>,
    /// Drop the alphabetically later language of every pair sharing no covered feature.
    #[arg(long)]
    pub drop_uncovered: bool,
}

#[derive(Debug, Clone, Args)]
pub struct DistanceArgs {
    /// Precomputed distance matrix CSV (skips distance computation).
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Min-max normalize distances (default; fails loudly when given explicitly).
    #[arg(long, overrides_with = "no_normalize")]
    pub normalize: bool,
    #[arg(long, overrides_with = "normalize")]
    pub no_normalize: bool,
    /// Great-circle distances from metadata coordinates instead of typology.
    #[arg(long, conflicts_with = "matrix")]
    pub geo: bool,
}

/// Preprocessed inputs plus their provenance.
pub struct Prepared {
    pub matrix: Option<FeatureMatrix>,
    pub records: Option<RecordTable>,
    pub frame_hash: String,
    pub flags: String,
    pub notes: Vec<String>,
}

impl Prepared {
    pub fn features(&self) -> Result<&FeatureMatrix> {
        self.matrix.as_ref().ok_or_else(|| {
            Error::Config("a feature frame is required (--frame or --cldf-values)".into())
        })
    }

    pub fn records(&self) -> Result<&RecordTable> {
        self.records.as_ref().ok_or_else(|| {
            Error::Config("language metadata is required (--meta or --cldf-languages)".into())
        })
    }

    /// Provenance pairs for output headers.
    pub fn provenance(&self) -> Vec<(String, String)> {
        vec![
            ("frame_hash".into(), self.frame_hash.clone()),
            ("flags".into(), self.flags.clone()),
            ("version".into(), crate::VERSION.into()),
        ]
    }
}

pub fn hash_matrix(matrix: &FeatureMatrix) -> String {
    let mut buf = Vec::new();
    write_wide_csv(matrix, &mut buf).expect("writing to memory");
    hex::encode(&Sha256::digest(&buf)[..8])
}

fn hash_records(records: &RecordTable) -> String {
    let mut h = Sha256::new();
    for r in records.iter() {
        h.update(format!("{:?}\n", r).as_bytes());
    }
    hex::encode(&h.finalize()[..8])
}

/// Loads and preprocesses the frame: macro filter, binarize, feature
/// selection, crop, optional coverage repair, in that order.
pub fn prepare(args: &InputArgs) -> Result<Prepared> {
    let mut notes = Vec::new();
    let explicit_map = args
        .binmap
        .as_ref()
        .map(BinarizationMap::load)
        .transpose()?;
    let map = match &explicit_map {
        Some(m) => m.clone(),
        None => BinarizationMap::grambank_default(),
    };
    let options = if args.no_binarize {
        LoadOptions::default()
    } else {
        LoadOptions::for_map(&map)
    };

    let meta = args.meta.as_ref().map(load_records).transpose()?;
    let (matrix, records) = match (&args.frame, &args.cldf_values, &args.cldf_languages) {
        (Some(path), _, _) => (Some(load_wide_csv_with(path, &options)?), meta),
        (None, Some(values), Some(languages)) => {
            let (m, cldf_records) = load_cldf_with(values, languages, &options)?;
            (Some(m), Some(meta.unwrap_or(cldf_records)))
        }
        _ => (None, meta),
    };

    let Some(mut matrix) = matrix else {
        let frame_hash = records.as_ref().map(hash_records).unwrap_or_default();
        return Ok(Prepared {
            matrix: None,
            records,
            frame_hash,
            flags: "records-only".into(),
            notes,
        });
    };

    let mut flags = Vec::new();
    if !args.no_macro_filter {
        match &records {
            Some(r) if r.iter().any(|x| x.child_count.is_some()) => {
                matrix = remove_macrolanguages(&matrix, r)?;
                flags.push("macro-filter".to_string());
            }
            _ => notes.push("no child counts in metadata; macro-language filter skipped".into()),
        }
    }
    if !args.no_binarize {
        let map = match explicit_map {
            Some(m) => m,
            None => map.restricted_to(matrix.feature_ids()),
        };
        if !map.is_empty() {
            matrix = binarize(&matrix, &map)?;
        }
        flags.push("binarize".to_string());
    }
    if let Some(features) = &args.features {
        matrix = subselect_features(&matrix, features)?;
        flags.push(format!("features={}", features.len()));
    }
    matrix = crop_languages(&matrix, args.crop);
    flags.push(format!("crop={}", args.crop));
    if args.drop_uncovered {
        let (reduced, dropped) = drop_uncovered_languages(&matrix);
        if !dropped.is_empty() {
            notes.push(format!(
                "dropped {} language(s) without shared coverage: {}",
                dropped.len(),
                dropped.join(", ")
            ));
        }
        matrix = reduced;
        flags.push("drop-uncovered".to_string());
    }

    Ok(Prepared {
        frame_hash: hash_matrix(&matrix),
        matrix: Some(matrix),
        records,
        flags: flags.join(";"),
        notes,
    })
}

/// Distances for the prepared frame, normalized unless disabled.
pub fn distances(prepared: &mut Prepared, args: &DistanceArgs) -> Result<DistanceMatrix> {
    let dm: DistanceMatrix = if let Some(path) = &args.matrix {
        let dm: DistanceMatrix = load_matrix(path)?;
        match &prepared.matrix {
            Some(m) => {
                let missing: Vec<String> = m
                    .language_ids()
                    .iter()
                    .filter(|id| dm.position(id).is_none())
                    .cloned()
                    .collect();
                if !missing.is_empty() {
                    return Err(Error::UnknownLanguage(missing));
                }
                dm.restrict(m.language_ids())?
            }
            None => dm,
        }
    } else if args.geo {
        let records = prepared.records()?;
        let table = match &prepared.matrix {
            Some(m) => records.outer_join(m.language_ids()),
            None => records.clone(),
        };
        build_geo_matrix(&table)?
    } else {
        build_typ_matrix(prepared.features()?)?
    };

    if args.no_normalize || dm.is_normalized() {
        return Ok(dm);
    }
    match normalize_minmax(&dm) {
        Ok(n) => Ok(n),
        Err(e) if !args.normalize => {
            prepared
                .notes
                .push(format!("distances left unnormalized ({e})"));
            Ok(dm)
        }
        Err(e) => Err(e),
    }
}

/// Language ids of the sampling frame: matrix rows, else distance matrix, else records.
pub fn frame_ids(prepared: &Prepared, dm: Option<&DistanceMatrix>) -> Result<Vec<String>> {
    if let Some(dm) = dm {
        return Ok(dm.language_ids().to_vec());
    }
    if let Some(m) = &prepared.matrix {
        return Ok(m.language_ids().to_vec());
    }
    Ok(prepared
        .records()?
        .iter()
        .map(|r| r.glottocode.clone())
        .collect())
}
