//! Run configuration read from TOML, with flag overrides applied on top.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::WeightOffsets;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("config field `{field}`: {message}")]
    Invalid { field: &'static str, message: String },
    #[error("reading config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Table,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "table" => Ok(Format::Table),
            other => Err(format!("unknown format {other:?} (json, csv, table)")),
        }
    }
}

/// Upper bounds of every sweep. Each bound is inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ranges {
    /// Coefficient table: `n`, with `k ≤ 2n−2`, `l1, l2 ≤ n−1`.
    pub n_max: usize,
    /// Stalks `X_{r,s}` with `r, s ≤ stalk_max` for resolutions and `N̄`.
    pub stalk_max: usize,
    /// Kernel/cokernel checks use the smaller bound, the realized
    /// complexes grow fast.
    pub kernel_stalk_max: usize,
    pub kunneth_pairs: usize,
    /// Bound on the combined dimension of a pair.
    pub kunneth_total: usize,
    pub monodromy_ops: usize,
    pub monodromy_dim: usize,
    /// Graded-piece shift check: `n ≤ graded_n`.
    pub graded_n: usize,
    /// `collapse_sum` for `1 ≤ S ≤ s ≤ collapse_max`.
    pub collapse_max: u64,
    /// Expansion versus collapse for `n ≤ expand_n`.
    pub expand_n: u64,
    /// γ against the multinomial oracle for `n ≤ gamma_n`.
    pub gamma_n: u64,
    /// Concentrated fiber models `n ≤ purity_n`.
    pub purity_n: usize,
}

impl Default for Ranges {
    fn default() -> Self {
        Ranges {
            n_max: 8,
            stalk_max: 5,
            kernel_stalk_max: 4,
            kunneth_pairs: 50,
            kunneth_total: 40,
            monodromy_ops: 200,
            monodromy_dim: 30,
            graded_n: 6,
            collapse_max: 12,
            expand_n: 8,
            gamma_n: 10,
            purity_n: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FaultTarget {
    /// Negate `N̄` on one block.
    Nbar,
    /// Negate the differential of `L_k` leaving one block.
    Differential,
}

/// A deliberately corrupted sign, for exercising failure localization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fault {
    pub target: FaultTarget,
    pub k: i64,
    pub l1: usize,
    pub l2: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub suites: Vec<String>,
    pub ranges: Ranges,
    pub offsets: WeightOffsets,
    /// Fiber model JSON for `e1-page`.
    pub fiber: Option<PathBuf>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub fault: Option<Fault>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: DEFAULT_SEED,
            suites: Vec::new(),
            ranges: Ranges::default(),
            offsets: WeightOffsets::default(),
            fiber: None,
            format: Format::Json,
            out: None,
            fault: None,
        }
    }
}

pub const SUITES: [&str; 8] = ["resolutions", "nbar", "kernels", "kunneth", "monodromy", "collapse", "gamma", "purity"];

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, column)
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
            ConfigError::Parse { line, column, message: e.message().to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for s in &self.suites {
            if !SUITES.contains(&s.as_str()) {
                return Err(ConfigError::Invalid { field: "suites", message: format!("unknown suite {s:?}") });
            }
        }
        let r = &self.ranges;
        let positive = [
            ("ranges.stalk_max", r.stalk_max as u64),
            ("ranges.monodromy_dim", r.monodromy_dim as u64),
            ("ranges.kunneth_total", r.kunneth_total as u64),
        ];
        for (field, v) in positive {
            if v == 0 {
                return Err(ConfigError::Invalid { field, message: "must be at least 1".into() });
            }
        }
        if r.kunneth_total < 2 {
            return Err(ConfigError::Invalid { field: "ranges.kunneth_total", message: "must be at least 2".into() });
        }
        Ok(())
    }

    /// Selected suites in canonical order; all of them when none are named.
    pub fn selected_suites(&self) -> Vec<&'static str> {
        SUITES.iter().copied().filter(|s| self.suites.is_empty() || self.suites.iter().any(|x| x == s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn partial_config() {
        let cfg = RunConfig::from_toml("seed = 5\nsuites = [\"collapse\"]\n[ranges]\nn_max = 3\n").unwrap();
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.ranges.n_max, 3);
        assert_eq!(cfg.ranges.stalk_max, 5);
        assert_eq!(cfg.selected_suites(), vec!["collapse"]);
    }

    #[test]
    fn errors_name_line_and_field() {
        let err = RunConfig::from_toml("seed = 5\n[ranges]\nn_mx = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("n_mx"), "{msg}");
        let err = RunConfig::from_toml("seed = \"x\"\n").unwrap_err();
        assert!(err.to_string().contains("line 1"));
        let err = RunConfig::from_toml("suites = [\"nope\"]\n").unwrap_err();
        assert!(err.to_string().contains("suites"));
    }

    #[test]
    fn fault_section() {
        let cfg = RunConfig::from_toml("[fault]\ntarget = \"nbar\"\nk = 1\nl1 = 1\nl2 = 1\n").unwrap();
        assert_eq!(cfg.fault, Some(Fault { target: FaultTarget::Nbar, k: 1, l1: 1, l2: 1 }));
    }
}
