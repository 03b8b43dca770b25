//! Run configuration: defaults, JSON config files and command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use interdisc_core::netspace::DistanceMetric;
use interdisc_core::Direction;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    EdgeList,
    MatrixMarket,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SubsetModeArg {
    Global,
    Local,
}

/// Restriction of the analysis to a journal set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsetConfig {
    /// File with one journal name per line.
    #[serde(default)]
    pub ids_file: Option<PathBuf>,
    /// Metadata category to select.
    #[serde(default)]
    pub category: Option<String>,
    #[serde(default = "default_subset_mode")]
    pub mode: SubsetModeArg,
}

fn default_subset_mode() -> SubsetModeArg {
    SubsetModeArg::Global
}

impl Default for SubsetModeArg {
    fn default() -> Self {
        default_subset_mode()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub input_format: Option<InputFormat>,
    /// Journal names for a Matrix Market input, one per line.
    pub names: Option<PathBuf>,
    pub metadata: Option<PathBuf>,
    #[serde(serialize_with = "ser_dirs", deserialize_with = "de_dirs")]
    pub directions: Vec<Direction>,
    #[serde(serialize_with = "ser_metrics", deserialize_with = "de_metrics")]
    pub metrics: Vec<DistanceMetric>,
    pub min_count: u64,
    /// Edge iff cosine strictly exceeds this value.
    pub cosine_threshold: f64,
    pub gini_include_zeros: bool,
    pub triangle_sum: bool,
    pub exclude_self_citations_from_p: bool,
    /// Keep degenerate journals in correlations, factor analysis and rankings.
    pub include_degenerate: bool,
    pub factors: usize,
    pub subset: Option<SubsetConfig>,
    pub outdir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            input_format: None,
            names: None,
            metadata: None,
            directions: Direction::BOTH.to_vec(),
            metrics: DistanceMetric::ALL.to_vec(),
            min_count: 1,
            cosine_threshold: 0.0,
            gini_include_zeros: false,
            triangle_sum: false,
            exclude_self_citations_from_p: false,
            include_degenerate: false,
            factors: 3,
            subset: None,
            outdir: PathBuf::from("out"),
            seed: 0,
        }
    }
}

fn ser_dirs<S: Serializer>(v: &[Direction], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|d| d.as_str()))
}

fn de_dirs<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Direction>, D::Error> {
    let raw: Vec<String> = Vec::deserialize(d)?;
    raw.iter()
        .map(|s| s.parse().map_err(serde::de::Error::custom))
        .collect()
}

fn ser_metrics<S: Serializer>(v: &[DistanceMetric], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|m| m.as_str()))
}

fn de_metrics<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<DistanceMetric>, D::Error> {
    let raw: Vec<String> = Vec::deserialize(d)?;
    raw.iter()
        .map(|s| s.parse().map_err(serde::de::Error::custom))
        .collect()
}

impl RunConfig {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn input_path(&self) -> CliResult<&Path> {
        self.input
            .as_deref()
            .ok_or_else(|| CliError::Usage("no input file given (use --input or a config file)".into()))
    }

    /// Explicit format, else `.mtx` means Matrix Market and anything else an
    /// edge list.
    pub fn resolved_format(&self) -> CliResult<InputFormat> {
        if let Some(f) = self.input_format {
            return Ok(f);
        }
        let path = self.input_path()?;
        Ok(match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("mtx") => InputFormat::MatrixMarket,
            _ => InputFormat::EdgeList,
        })
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.directions.is_empty() {
            return Err(CliError::Usage("at least one direction is required".into()));
        }
        if self.metrics.is_empty() {
            return Err(CliError::Usage("at least one distance metric is required".into()));
        }
        if self.min_count == 0 {
            return Err(CliError::Usage("min_count must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.cosine_threshold) {
            return Err(CliError::Usage("cosine_threshold must lie in [0, 1)".into()));
        }
        if self.factors == 0 {
            return Err(CliError::Usage("factor count must be at least 1".into()));
        }
        if let Some(s) = &self.subset {
            if s.ids_file.is_some() == s.category.is_some() {
                return Err(CliError::Usage(
                    "a subset needs exactly one of an ids file or a category".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        let back: RunConfig = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(c, back);
        assert!(c.to_json().contains("\"directions\":[\"cited\",\"citing\"]"));
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{"min_count": 2, "metrics": ["one_minus_cosine"]}"#).unwrap();
        assert_eq!(c.min_count, 2);
        assert_eq!(c.metrics, vec![DistanceMetric::OneMinusCosine]);
        assert_eq!(c.factors, 3);
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"directions": ["sideways"]}"#).is_err());
    }

    #[test]
    fn format_inference() {
        let mut c = RunConfig {
            input: Some("a/b.MTX".into()),
            ..Default::default()
        };
        assert_eq!(c.resolved_format().unwrap(), InputFormat::MatrixMarket);
        c.input = Some("a/b.csv".into());
        assert_eq!(c.resolved_format().unwrap(), InputFormat::EdgeList);
    }
}
