//! Seal, grid, and coefficient-file parsing shared by the subcommands.

use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args};
use serde::{Deserialize, Serialize};

use sealsim_core::limits::check_dimension;
use sealsim_core::montecarlo::SealSource;
use sealsim_core::seal::parse_angle;
use sealsim_core::{lambda_from_he, Complex64, HeSealSpec, LambdaMatrix, SealError};

use crate::CliError;

#[derive(Debug, Args)]
#[group(skip)]
#[command(group(ArgGroup::new("seal").required(true).args(["bits", "lambda_file"])))]
pub struct SealArgs {
    /// Message bit string of a per-qubit string seal, e.g. 0110.
    #[arg(long)]
    pub bits: Option<String>,
    /// Angle in radians shared by every qubit (accepts pi/K).
    #[arg(long, requires = "bits", conflicts_with = "thetas")]
    pub theta: Option<String>,
    /// Comma-separated per-qubit angles in radians.
    #[arg(long, requires = "bits")]
    pub thetas: Option<String>,
    /// JSON coefficient matrix for the general overlap model.
    #[arg(long, value_name = "PATH")]
    pub lambda_file: Option<PathBuf>,
    /// Sealed message index when using --lambda-file.
    #[arg(long, requires = "lambda_file", default_value_t = 0)]
    pub message: usize,
}

/// A seal resolved from flags, plus enough provenance to echo it back.
pub struct ResolvedSeal {
    pub source: SealSource,
    pub description: SealDescription,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SealDescription {
    He { bits: String, thetas: Vec<f64> },
    Lambda { file: String, dim: usize, message: usize },
}

impl SealArgs {
    pub fn resolve(&self) -> Result<ResolvedSeal, CliError> {
        if let Some(bits) = &self.bits {
            let angles = match (&self.theta, &self.thetas) {
                (Some(t), None) => t.clone(),
                (None, Some(ts)) => ts.clone(),
                _ => return Err(CliError::Usage("--bits needs exactly one of --theta or --thetas".into())),
            };
            let m = bits.trim().len();
            if m >= usize::BITS as usize {
                return Err(SealError::DimensionTooLarge { dim: usize::MAX, max: sealsim_core::limits::max_dimension() }.into());
            }
            check_dimension(1usize << m)?;
            let spec = HeSealSpec::parse(bits, &angles)?;
            return Ok(ResolvedSeal {
                description: SealDescription::He {
                    bits: bits.trim().to_string(),
                    thetas: spec.thetas().to_vec(),
                },
                source: SealSource::He(spec),
            });
        }
        let path = self
            .lambda_file
            .as_ref()
            .ok_or_else(|| CliError::Usage("one of --bits or --lambda-file is required".into()))?;
        let lambda = read_lambda_file(path)?;
        if self.message >= lambda.dim() {
            return Err(SealError::MessageOutOfRange { message: self.message, dim: lambda.dim() }.into());
        }
        Ok(ResolvedSeal {
            description: SealDescription::Lambda {
                file: path.display().to_string(),
                dim: lambda.dim(),
                message: self.message,
            },
            source: SealSource::Lambda { lambda, message: self.message },
        })
    }
}

impl ResolvedSeal {
    pub fn lambda(&self) -> Result<LambdaMatrix, CliError> {
        Ok(match &self.source {
            SealSource::He(spec) => lambda_from_he(spec)?,
            SealSource::Lambda { lambda, .. } => lambda.clone(),
        })
    }
}

/// On-disk coefficient matrix: `{"dim": N, "lambda": [[[re, im], ...], ...]}`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaFile {
    pub dim: usize,
    pub lambda: Vec<Vec<[f64; 2]>>,
}

impl LambdaFile {
    #[cfg(test)]
    pub fn from_matrix(m: &LambdaMatrix) -> Self {
        Self {
            dim: m.dim(),
            lambda: (0..m.dim())
                .map(|r| m.row(r).iter().map(|c| [c.re, c.im]).collect())
                .collect(),
        }
    }

    pub fn into_matrix(self) -> Result<LambdaMatrix, CliError> {
        if self.lambda.len() != self.dim {
            return Err(CliError::Usage(format!(
                "lambda file declares dim {} but has {} rows",
                self.dim,
                self.lambda.len()
            )));
        }
        check_dimension(self.dim)?;
        let rows = self
            .lambda
            .into_iter()
            .map(|row| row.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .collect();
        Ok(LambdaMatrix::from_rows(rows)?)
    }
}

pub fn read_lambda_file(path: &Path) -> Result<LambdaMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let file: LambdaFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    file.into_matrix()
}

/// `a,b,c` or `START:STOP:COUNT` (inclusive, evenly spaced).
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Usage(format!("invalid --grid {text:?}: {why}"));
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, stop, count] => {
            let start = parse_angle(start).map_err(|_| bad("start"))?;
            let stop = parse_angle(stop).map_err(|_| bad("stop"))?;
            let count: usize = count.trim().parse().map_err(|_| bad("count"))?;
            match count {
                0 => Err(bad("count must be positive")),
                1 => Ok(vec![start]),
                _ => Ok((0..count)
                    .map(|k| {
                        if k == count - 1 {
                            stop
                        } else {
                            start + (stop - start) * k as f64 / (count - 1) as f64
                        }
                    })
                    .collect()),
            }
        }
        [list] => list
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad(v)))
            .collect(),
        _ => Err(bad("expected a list or START:STOP:COUNT")),
    }
}
