//! Seeded replay of seal → attack → verify rounds.
//!
//! Round `r` of an experiment with seed `s` draws from its own ChaCha8
//! substream: key `ChaCha8Rng::seed_from_u64(s)`, stream `r`. Rounds are
//! therefore independent of scheduling, and results are reduced as integer
//! counts, so parallel execution is bit-identical to sequential execution.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::analysis::{average_fidelity, coin_toss_average_fidelity};
use crate::attack::{
    check_unit_interval, chau_family, coin_toss_attack, coin_toss_distribution, run_chau_attack,
    MeasurementFamily,
};
use crate::error::{Result, SealError};
use crate::limits::check_dimension;
use crate::seal::{he_seal, seal_general, verify, HeSealSpec, LambdaMatrix, SealedState};

/// Recorded in output metadata so runs can be audited.
pub const GENERATOR: &str = "ChaCha8Rng(key=seed_from_u64(seed), stream=round_index)";

/// Significance level of [`chi_square_check`].
pub const CHI_SQUARE_QUANTILE: f64 = 0.999;

#[derive(Debug, Clone, PartialEq)]
pub enum SealSource {
    He(HeSealSpec),
    Lambda { lambda: LambdaMatrix, message: usize },
}

impl SealSource {
    pub fn dim(&self) -> usize {
        match self {
            SealSource::He(spec) => spec.dim(),
            SealSource::Lambda { lambda, .. } => lambda.dim(),
        }
    }

    pub fn seal(&self) -> Result<SealedState> {
        check_dimension(self.dim())?;
        match self {
            SealSource::He(spec) => he_seal(spec),
            SealSource::Lambda { lambda, message } => seal_general(lambda, *message),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Strategy {
    Chau { nu: f64 },
    CoinToss { q: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub seal: SealSource,
    pub strategy: Strategy,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmpiricalStats {
    pub decode_counts: Vec<u64>,
    pub pass_count: u64,
    pub trials: u64,
}

impl EmpiricalStats {
    fn empty(dim: usize) -> Self {
        Self {
            decode_counts: vec![0; dim],
            pass_count: 0,
            trials: 0,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.decode_counts.iter_mut().zip(other.decode_counts) {
            *a += b;
        }
        self.pass_count += other.pass_count;
        self.trials += other.trials;
        self
    }

    pub fn decode_frequencies(&self) -> Vec<f64> {
        self.decode_counts
            .iter()
            .map(|&c| c as f64 / self.trials as f64)
            .collect()
    }

    pub fn pass_rate(&self) -> f64 {
        self.pass_count as f64 / self.trials as f64
    }
}

/// Closed-form predictions for one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Analytic {
    pub decode_row: Vec<f64>,
    pub pass_probability: f64,
}

impl ExperimentConfig {
    pub fn analytic(&self) -> Result<Analytic> {
        let sealed = self.seal.seal()?;
        let row = sealed.state.amplitudes();
        match self.strategy {
            Strategy::Chau { nu } => {
                let family = chau_family(sealed.dim(), nu)?;
                Ok(Analytic {
                    decode_row: family.outcome_probabilities(&sealed.state)?,
                    pass_probability: average_fidelity(row, nu)?,
                })
            }
            Strategy::CoinToss { q } => Ok(Analytic {
                decode_row: coin_toss_distribution(&sealed.state, q)?,
                pass_probability: coin_toss_average_fidelity(row, q)?,
            }),
        }
    }
}

/// Independent generator for one round.
pub fn round_rng(seed: u64, round: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round);
    rng
}

enum Prepared {
    Chau(MeasurementFamily),
    CoinToss(f64),
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<EmpiricalStats> {
    if config.trials == 0 {
        return Err(SealError::ZeroTrials);
    }
    let sealed = config.seal.seal()?;
    let n = sealed.dim();
    let prepared = match config.strategy {
        Strategy::Chau { nu } => Prepared::Chau(chau_family(n, nu)?),
        Strategy::CoinToss { q } => {
            check_unit_interval("q", q)?;
            Prepared::CoinToss(q)
        }
    };
    let key = ChaCha8Rng::seed_from_u64(config.seed).get_seed();

    (0..config.trials)
        .into_par_iter()
        .try_fold(
            || EmpiricalStats::empty(n),
            |mut acc, round| {
                let mut rng = ChaCha8Rng::from_seed(key);
                rng.set_stream(round);
                let outcome = match &prepared {
                    Prepared::Chau(family) => run_chau_attack(&sealed, family, &mut rng)?,
                    Prepared::CoinToss(q) => coin_toss_attack(&sealed, *q, &mut rng)?,
                };
                acc.decode_counts[outcome.decoded] += 1;
                if verify(&sealed, &outcome.post_state, &mut rng)? {
                    acc.pass_count += 1;
                }
                acc.trials += 1;
                Ok(acc)
            },
        )
        .try_reduce(|| EmpiricalStats::empty(n), |a, b| Ok(a.merge(b)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub critical_value: f64,
    pub pass: bool,
}

/// Upper 99.9% point of the chi-square distribution.
pub fn chi_square_critical(degrees_of_freedom: usize) -> f64 {
    ChiSquared::new(degrees_of_freedom as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(CHI_SQUARE_QUANTILE)
}

/// Pearson goodness-of-fit of the decode histogram against `expected`.
pub fn chi_square_check(stats: &EmpiricalStats, expected: &[f64]) -> Result<ChiSquare> {
    let n = stats.decode_counts.len();
    if expected.len() != n {
        return Err(SealError::DimensionMismatch {
            expected: n,
            found: expected.len(),
        });
    }
    if n < 2 {
        return Err(SealError::DimensionTooSmall(n));
    }
    if expected.iter().any(|&p| p.is_nan() || p < 0.0) {
        return Err(SealError::InvalidDistribution("negative entry".into()));
    }
    let total: f64 = expected.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(SealError::InvalidDistribution(format!("sums to {total}")));
    }
    let trials = stats.trials as f64;
    let mut statistic = 0.0;
    for (&count, &p) in stats.decode_counts.iter().zip(expected) {
        let want = p * trials;
        if want == 0.0 {
            if count > 0 {
                statistic = f64::INFINITY;
            }
            continue;
        }
        let diff = count as f64 - want;
        statistic += diff * diff / want;
    }
    let degrees_of_freedom = n - 1;
    let critical_value = chi_square_critical(degrees_of_freedom);
    Ok(ChiSquare {
        statistic,
        degrees_of_freedom,
        critical_value,
        pass: statistic < critical_value,
    })
}

/// `|observed/trials - p| <= k sigma` for a binomial proportion.
pub fn within_sigma(observed: u64, trials: u64, p: f64, k: f64) -> bool {
    let t = trials as f64;
    let sigma = (p * (1.0 - p) / t).sqrt();
    (observed as f64 / t - p).abs() <= k * sigma + 1e-12
}
