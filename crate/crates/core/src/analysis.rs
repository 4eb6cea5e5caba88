//! Closed-form analytics for the measurement attack under a uniform message prior.
//!
//! All entropies are in bits.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::attack::{check_unit_interval, ChauParams};
use crate::error::{Result, SealError};
use crate::linalg::{norm_sqr, NORM_TOLERANCE};
use crate::seal::{lambda_from_he, HeSealSpec, LambdaMatrix};

/// Row-stochastic matrix of decode probabilities; entry `(sealed, decoded)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeMatrix {
    dim: usize,
    nu: f64,
    probabilities: Vec<f64>,
}

impl DecodeMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn get(&self, sealed: usize, decoded: usize) -> f64 {
        self.probabilities[sealed * self.dim + decoded]
    }

    pub fn row(&self, sealed: usize) -> &[f64] {
        &self.probabilities[sealed * self.dim..(sealed + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.probabilities.chunks(self.dim)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.rows().map(|r| r.iter().sum()).collect()
    }

    pub fn min_entry(&self) -> f64 {
        self.probabilities.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// The uniform component `(1 - nu) / N` present in every entry.
    pub fn flat_floor(&self) -> f64 {
        (1.0 - self.nu) / self.dim as f64
    }

    /// Probability of a correct read, averaged over messages.
    pub fn guess_probability(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum::<f64>() / self.dim as f64
    }
}

/// `p[i'][i] = (1 - nu)/N + nu |λ[i'][i]|²`.
pub fn decode_matrix(lambda: &LambdaMatrix, nu: f64) -> Result<DecodeMatrix> {
    check_unit_interval("nu", nu)?;
    let n = lambda.dim();
    let floor = (1.0 - nu) / n as f64;
    Ok(DecodeMatrix {
        dim: n,
        nu,
        probabilities: lambda
            .squared_moduli()
            .into_iter()
            .map(|l2| floor + nu * l2)
            .collect(),
    })
}

/// Share of the attacker's posterior over messages that is explained by the
/// uniform component, given the attacker decoded `decoded`.
pub fn flat_posterior_mass(dm: &DecodeMatrix, decoded: usize) -> Result<f64> {
    if decoded >= dm.dim {
        return Err(SealError::MessageOutOfRange {
            message: decoded,
            dim: dm.dim,
        });
    }
    let prior = 1.0 / dm.dim as f64;
    let marginal: f64 = (0..dm.dim).map(|s| prior * dm.get(s, decoded)).sum();
    if marginal <= 0.0 {
        return Err(SealError::ZeroMarginal { decoded });
    }
    let flat: f64 = (0..dm.dim).map(|_| prior * dm.flat_floor()).sum();
    Ok(flat / marginal)
}

fn entropy_bits(p: impl IntoIterator<Item = f64>) -> f64 {
    p.into_iter()
        .filter(|&x| x > 0.0)
        .map(|x| -x * x.log2())
        .sum()
}

/// `I(message; decoded)` with a uniform prior over messages.
pub fn mutual_information(dm: &DecodeMatrix) -> f64 {
    let n = dm.dim as f64;
    let marginal: Vec<f64> = (0..dm.dim)
        .map(|d| dm.rows().map(|r| r[d]).sum::<f64>() / n)
        .collect();
    let conditional: f64 = dm.rows().map(|r| entropy_bits(r.iter().copied())).sum::<f64>() / n;
    (entropy_bits(marginal) - conditional).clamp(0.0, n.log2())
}

fn check_row(row: &[Complex64]) -> Result<()> {
    let norm_sqr = norm_sqr(row);
    if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
        return Err(SealError::NotNormalized { norm_sqr });
    }
    Ok(())
}

/// Expected fidelity between the sealed state and the post-attack state:
/// `Σ_i (a + b |λ_i|²)²`.
pub fn average_fidelity(lambda_row: &[Complex64], nu: f64) -> Result<f64> {
    check_row(lambda_row)?;
    let p = ChauParams::new(lambda_row.len(), nu)?;
    Ok(lambda_row
        .iter()
        .map(|l| {
            let overlap = p.a + p.b * l.norm_sqr();
            overlap * overlap
        })
        .sum::<f64>()
        .min(1.0))
}

/// Expected post-attack fidelity of the coin-toss analog at read probability `q`.
pub fn coin_toss_average_fidelity(lambda_row: &[Complex64], q: f64) -> Result<f64> {
    check_row(lambda_row)?;
    check_unit_interval("q", q)?;
    let read: f64 = lambda_row.iter().map(|l| l.norm_sqr().powi(2)).sum();
    Ok((1.0 - q) + q * read)
}

/// [`average_fidelity`] averaged over a uniform message prior.
pub fn escape_probability(lambda: &LambdaMatrix, nu: f64) -> Result<f64> {
    let n = lambda.dim();
    let mut total = 0.0;
    for i in 0..n {
        total += average_fidelity(lambda.row(i), nu)?;
    }
    Ok(total / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TradeoffPoint {
    pub nu: f64,
    pub mutual_information: f64,
    /// Probability that the decoded value is the sealed message.
    pub guess_probability: f64,
    /// Message-averaged post-attack fidelity.
    pub escape_probability: f64,
    /// Smallest flat posterior mass over decoded values that can occur.
    pub flat_mass: f64,
}

/// Smallest [`flat_posterior_mass`] over decoded values with nonzero marginal.
pub fn min_flat_mass(dm: &DecodeMatrix) -> Result<f64> {
    let mut best: Option<f64> = None;
    for d in 0..dm.dim {
        match flat_posterior_mass(dm, d) {
            Ok(m) => best = Some(best.map_or(m, |b: f64| b.min(m))),
            Err(SealError::ZeroMarginal { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    best.ok_or(SealError::ZeroMarginal { decoded: 0 })
}

pub fn tradeoff_point(lambda: &LambdaMatrix, nu: f64) -> Result<TradeoffPoint> {
    let dm = decode_matrix(lambda, nu)?;
    Ok(TradeoffPoint {
        nu,
        mutual_information: mutual_information(&dm),
        guess_probability: dm.guess_probability(),
        escape_probability: escape_probability(lambda, nu)?,
        flat_mass: min_flat_mass(&dm)?,
    })
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(SealError::InvalidGrid("empty".into()));
    }
    if let Some(bad) = grid.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(SealError::InvalidGrid(format!("{bad} outside [0, 1]")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SealError::InvalidGrid("not strictly increasing".into()));
    }
    Ok(())
}

/// Evaluates one [`TradeoffPoint`] per grid value, in grid order.
pub fn tradeoff_sweep(lambda: &LambdaMatrix, nu_grid: &[f64]) -> Result<Vec<TradeoffPoint>> {
    validate_grid(nu_grid)?;
    nu_grid
        .par_iter()
        .map(|&nu| tradeoff_point(lambda, nu))
        .collect()
}

pub fn mi_nondecreasing(points: &[TradeoffPoint]) -> bool {
    points
        .windows(2)
        .all(|w| w[1].mutual_information >= w[0].mutual_information - 1e-12)
}

pub fn escape_nonincreasing(points: &[TradeoffPoint]) -> bool {
    points
        .windows(2)
        .all(|w| w[1].escape_probability <= w[0].escape_probability + 1e-12)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BitSealPoint {
    pub theta: f64,
    pub nu: f64,
    /// Probability the decoded bit equals the sealed bit.
    pub alpha: f64,
    /// Probability the verifier detects the read.
    pub beta: f64,
}

/// `(alpha, beta)` for a single-bit string seal attacked at `nu`.
pub fn bit_seal_point(theta: f64, nu: f64) -> Result<BitSealPoint> {
    let lambda = lambda_from_he(&HeSealSpec::uniform(vec![false], theta)?)?;
    let dm = decode_matrix(&lambda, nu)?;
    Ok(BitSealPoint {
        theta,
        nu,
        alpha: dm.guess_probability(),
        beta: 1.0 - escape_probability(&lambda, nu)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6};

    const TOL: f64 = 1e-12;

    fn he(bits: &str, theta: &str) -> LambdaMatrix {
        lambda_from_he(&HeSealSpec::parse(bits, theta).unwrap()).unwrap()
    }

    #[test]
    fn identity_decode_matrix() {
        let id = LambdaMatrix::identity(4).unwrap();
        for nu in [0.0, 0.3, 1.0] {
            let dm = decode_matrix(&id, nu).unwrap();
            for r in 0..4 {
                for c in 0..4 {
                    let want = (1.0 - nu) / 4.0 + if r == c { nu } else { 0.0 };
                    assert!((dm.get(r, c) - want).abs() < TOL);
                }
            }
        }
    }

    #[test]
    fn half_nu_rows_for_single_bit_seal() {
        let dm = decode_matrix(&he("0", "pi/6"), 0.5).unwrap();
        assert!((dm.get(0, 0) - 0.625).abs() < TOL);
        assert!((dm.get(0, 1) - 0.375).abs() < TOL);
        assert!((dm.get(1, 0) - 0.375).abs() < TOL);
        assert!((dm.get(1, 1) - 0.625).abs() < TOL);
        assert!(dm.row_sums().iter().all(|s| (s - 1.0).abs() < TOL));
    }

    #[test]
    fn half_nu_floor() {
        let lambda = he("101", "0.3");
        let dm = decode_matrix(&lambda, 0.5).unwrap();
        let l2 = lambda.squared_moduli();
        for (p, l) in dm.rows().flatten().zip(l2) {
            assert!((p - (1.0 / 16.0 + l / 2.0)).abs() < TOL);
        }
        assert!(dm.min_entry() >= 1.0 / 16.0 - 1e-15);
        assert!(decode_matrix(&lambda, 1.2).is_err());
    }

    #[test]
    fn flat_mass_examples() {
        let lambda = he("01", "0.4");
        let dm0 = decode_matrix(&lambda, 0.0).unwrap();
        let dm_half = decode_matrix(&lambda, 0.5).unwrap();
        for d in 0..4 {
            assert!((flat_posterior_mass(&dm0, d).unwrap() - 1.0).abs() < TOL);
            assert!((flat_posterior_mass(&dm_half, d).unwrap() - 0.5).abs() < TOL);
        }
        let dm1 = decode_matrix(&LambdaMatrix::identity(4).unwrap(), 1.0).unwrap();
        assert_eq!(flat_posterior_mass(&dm1, 2).unwrap(), 0.0);
        assert!(flat_posterior_mass(&dm1, 4).is_err());
    }

    #[test]
    fn flat_mass_zero_marginal() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let lambda = LambdaMatrix::from_rows(vec![vec![one, zero], vec![one, zero]]).unwrap();
        let dm = decode_matrix(&lambda, 1.0).unwrap();
        assert_eq!(
            flat_posterior_mass(&dm, 1),
            Err(SealError::ZeroMarginal { decoded: 1 })
        );
        assert_eq!(min_flat_mass(&dm).unwrap(), 0.0);
    }

    #[test]
    fn mutual_information_endpoints() {
        let lambda = he("110", "0.2");
        assert!(mutual_information(&decode_matrix(&lambda, 0.0).unwrap()) <= TOL);
        let id = LambdaMatrix::identity(8).unwrap();
        assert!((mutual_information(&decode_matrix(&id, 1.0).unwrap()) - 3.0).abs() < TOL);
        let flat = he("1010", "pi/4");
        for nu in [0.0, 0.5, 1.0] {
            assert!(mutual_information(&decode_matrix(&flat, nu).unwrap()) <= TOL);
        }
    }

    #[test]
    fn mutual_information_perfect_three_bit_seal_half_nu() {
        // Joint distribution enumerated cell by cell: P(s, d) = p(s, d) / 8.
        let dm = decode_matrix(&he("000", "0"), 0.5).unwrap();
        let mut joint = [[0.0f64; 8]; 8];
        for (s, row) in joint.iter_mut().enumerate() {
            for (d, cell) in row.iter_mut().enumerate() {
                *cell = (1.0 / 16.0 + if s == d { 0.5 } else { 0.0 }) / 8.0;
            }
        }
        let mut oracle = 0.0;
        for s in 0..8 {
            for d in 0..8 {
                let ps: f64 = joint[s].iter().sum();
                let pd: f64 = (0..8).map(|k| joint[k][d]).sum();
                oracle += joint[s][d] * (joint[s][d] / (ps * pd)).log2();
            }
        }
        // Frozen from the enumeration: 3 + (9/16) log2(9/16) + (7/16) log2(1/16).
        let frozen = 3.0 + (9.0f64 / 16.0) * (9.0f64 / 16.0).log2() - 7.0 / 4.0;
        assert!((oracle - frozen).abs() < TOL);
        assert!((mutual_information(&dm) - frozen).abs() < TOL);
    }

    #[test]
    fn average_fidelity_examples() {
        let lambda = he("0", "pi/6");
        assert!((average_fidelity(lambda.row(0), 0.0).unwrap() - 1.0).abs() < TOL);
        assert!((average_fidelity(lambda.row(0), 1.0).unwrap() - 0.625).abs() < TOL);
        let flat = he("0000000000", "pi/4");
        assert!((average_fidelity(flat.row(0), 1.0).unwrap() - 1.0 / 1024.0).abs() < TOL);
        assert!(average_fidelity(lambda.row(0), -0.5).is_err());
    }

    #[test]
    fn coin_toss_fidelity_differs_from_measurement_family() {
        let lambda = he("0", "pi/6");
        let coin = coin_toss_average_fidelity(lambda.row(0), 0.5).unwrap();
        assert!((coin - (0.5 + 0.5 * 0.625)).abs() < TOL);
        let chau = average_fidelity(lambda.row(0), 0.5).unwrap();
        assert!(chau > coin);
    }

    #[test]
    fn sweep_endpoints_and_shape() {
        let lambda = he("0110", "pi/12");
        let grid: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
        let points = tradeoff_sweep(&lambda, &grid).unwrap();
        assert_eq!(points.len(), 21);
        assert!(points[0].mutual_information <= TOL);
        assert!((points[0].escape_probability - 1.0).abs() < TOL);
        assert!(mi_nondecreasing(&points));
        assert!(escape_nonincreasing(&points));
        for p in &points {
            assert!((p.flat_mass - (1.0 - p.nu)).abs() < 1e-9);
        }

        let id = LambdaMatrix::identity(4).unwrap();
        let end = tradeoff_sweep(&id, &[1.0]).unwrap()[0];
        assert!((end.mutual_information - 2.0).abs() < TOL);
        assert!((end.escape_probability - 1.0).abs() < TOL);
    }

    #[test]
    fn sweep_grid_validation() {
        let lambda = he("0", "0.1");
        assert!(tradeoff_sweep(&lambda, &[]).is_err());
        assert!(tradeoff_sweep(&lambda, &[0.5, 0.2]).is_err());
        assert!(tradeoff_sweep(&lambda, &[0.5, 0.5]).is_err());
        assert!(tradeoff_sweep(&lambda, &[0.0, 1.5]).is_err());
    }

    #[test]
    fn bit_seal_examples() {
        let p = bit_seal_point(0.0, 1.0).unwrap();
        assert!((p.alpha - 1.0).abs() < TOL && p.beta.abs() < TOL);
        let p = bit_seal_point(0.0, 0.0).unwrap();
        assert!((p.alpha - 0.5).abs() < TOL && p.beta.abs() < TOL);
        let p = bit_seal_point(FRAC_PI_6, 0.5).unwrap();
        assert!((p.alpha - 0.625).abs() < TOL);
        // Σ_i (a + b λ_i²)² with a = 1/2, a + b = sqrt(3)/2.
        let (a, b) = (0.5, 3f64.sqrt() / 2.0 - 0.5);
        let oracle = (a + b * 0.75).powi(2) + (a + b * 0.25).powi(2);
        assert!((p.beta - (1.0 - oracle)).abs() < TOL);
        assert!(p.beta <= 0.5);
        assert!(bit_seal_point(FRAC_PI_4 + 0.1, 0.5).is_err());
    }
}
