use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::AttackSpec;

pub const DEFAULT_MAX_RUNS: usize = 256;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    /// One JSON header line, then one JSON report per line.
    #[default]
    Json,
    /// One row per report.
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub parameter: String,
    pub values: Vec<f64>,
}

fn default_max_runs() -> usize {
    DEFAULT_MAX_RUNS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axes: Vec<SweepAxis>,
    #[serde(default = "default_max_runs")]
    pub max_runs: usize,
}

impl SweepSpec {
    pub fn runs(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    /// Grid points in row-major order, the last axis varying fastest.
    pub fn points(&self) -> Vec<Vec<(String, f64)>> {
        let mut out: Vec<Vec<(String, f64)>> = vec![Vec::new()];
        for axis in &self.axes {
            out = out
                .into_iter()
                .flat_map(|p| {
                    axis.values.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push((axis.parameter.clone(), v));
                        q
                    })
                })
                .collect();
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::Config(format!(
                "sweep needs one or two axes, got {}",
                self.axes.len()
            )));
        }
        if self.axes.len() == 2 && self.axes[0].parameter == self.axes[1].parameter {
            return Err(Error::Config(format!(
                "sweep axis {:?} given twice",
                self.axes[0].parameter
            )));
        }
        if let Some(a) = self.axes.iter().find(|a| a.values.is_empty()) {
            return Err(Error::Config(format!(
                "sweep axis {:?} has no values",
                a.parameter
            )));
        }
        let runs = self.runs();
        if runs > self.max_runs {
            return Err(Error::SweepTooLarge {
                runs,
                cap: self.max_runs,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub spec: AttackSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn single(spec: AttackSpec) -> Self {
        Self {
            spec,
            sweep: None,
            output: None,
            format: OutputFormat::Json,
        }
    }

    /// Every grid point is validated, so a bad point fails before any run.
    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        if let Some(sweep) = &self.sweep {
            sweep.validate()?;
            for point in sweep.points() {
                let mut s = self.spec.clone();
                for (name, v) in &point {
                    s.set(name, *v)?;
                }
                s.validate()?;
            }
        }
        Ok(())
    }

    /// Parses TOML when the extension is `.toml`, JSON otherwise.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        } else {
            Self::from_json(&text)
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}
