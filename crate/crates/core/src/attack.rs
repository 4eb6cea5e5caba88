//! The `aI + b|i⟩⟨i|` measurement family and the coin-toss analog.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Result, SealError};
use crate::linalg::{self, measured_from_raw, DenseOperator, Measured, StateVector};
use crate::seal::SealedState;

/// Coefficients of the family at tradeoff parameter `nu`.
///
/// `a = sqrt((1-nu)/N)` and `a + b = sqrt((1-nu)/N + nu)`: the nonnegative
/// pair for which the outcome probabilities are `(1-nu)/N + nu |λ|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChauParams {
    pub nu: f64,
    pub n: usize,
    pub a: f64,
    pub b: f64,
}

impl ChauParams {
    pub fn new(n: usize, nu: f64) -> Result<Self> {
        if n < 2 {
            return Err(SealError::DimensionTooSmall(n));
        }
        check_unit_interval("nu", nu)?;
        let flat = (1.0 - nu) / n as f64;
        let a = flat.sqrt();
        let b = (flat + nu).sqrt() - a;
        Ok(Self { nu, n, a, b })
    }
}

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(SealError::ParameterOutOfRange { name, value });
    }
    Ok(())
}

/// One operator `a I + b |target⟩⟨target|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructuredOperator {
    pub a: f64,
    pub b: f64,
    pub target: usize,
}

impl StructuredOperator {
    pub fn apply(&self, state: &StateVector) -> Vec<Complex64> {
        let mut out: Vec<Complex64> = state.amplitudes().iter().map(|x| x * self.a).collect();
        out[self.target] += state.amplitude(self.target) * self.b;
        out
    }

    pub fn to_dense(&self, dim: usize) -> DenseOperator {
        let mut op = DenseOperator::zeros(dim);
        for j in 0..dim {
            op.set(j, j, Complex64::new(self.a, 0.0));
        }
        op.set(self.target, self.target, Complex64::new(self.a + self.b, 0.0));
        op
    }
}

/// The `N` operators `{Q_i}` sharing coefficients `(a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementFamily {
    dim: usize,
    a: f64,
    b: f64,
}

impl MeasurementFamily {
    /// A family with arbitrary coefficients; completeness is not checked.
    pub fn from_coefficients(dim: usize, a: f64, b: f64) -> Result<Self> {
        if dim < 2 {
            return Err(SealError::DimensionTooSmall(dim));
        }
        Ok(Self { dim, a, b })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coefficients(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn operator(&self, target: usize) -> StructuredOperator {
        StructuredOperator {
            a: self.a,
            b: self.b,
            target,
        }
    }

    pub fn dense(&self, target: usize) -> DenseOperator {
        self.operator(target).to_dense(self.dim)
    }

    /// Diagonal of `Σ_i Q_i† Q_i`. Every `Q_i` is diagonal, so the sum has no
    /// off-diagonal entries.
    pub fn completeness_diagonal(&self) -> Vec<f64> {
        let mut diag = vec![0.0; self.dim];
        for i in 0..self.dim {
            let q = self.operator(i);
            for (j, d) in diag.iter_mut().enumerate() {
                let entry = if j == i { q.a + q.b } else { q.a };
                *d += entry * entry;
            }
        }
        diag
    }

    /// Max-entry deviation of `Σ_i Q_i† Q_i` from the identity.
    pub fn completeness_deviation(&self) -> f64 {
        self.completeness_diagonal()
            .iter()
            .map(|d| (d - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Same quantity through dense `O(N^3)` products; only sensible for small N.
    pub fn dense_completeness_deviation(&self) -> f64 {
        let mut sum = DenseOperator::zeros(self.dim);
        for i in 0..self.dim {
            let q = self.dense(i);
            sum = sum
                .add(&q.adjoint().matmul(&q).expect("same dimension"))
                .expect("same dimension");
        }
        sum.max_deviation_from_identity()
    }

    /// `‖Q_i ψ‖²` for every outcome.
    pub fn outcome_probabilities(&self, state: &StateVector) -> Result<Vec<f64>> {
        linalg::check_dim(self.dim, state.dim())?;
        let total: f64 = state.probabilities().iter().sum();
        let hit = (self.a + self.b) * (self.a + self.b);
        let miss = self.a * self.a;
        Ok(state
            .amplitudes()
            .iter()
            .map(|amp| {
                let p = amp.norm_sqr();
                miss * (total - p) + hit * p
            })
            .collect())
    }

    /// Applies `Q_target` through the structured form.
    pub fn apply(&self, target: usize, state: &StateVector) -> Result<Measured> {
        linalg::check_dim(self.dim, state.dim())?;
        if target >= self.dim {
            return Err(SealError::MessageOutOfRange {
                message: target,
                dim: self.dim,
            });
        }
        Ok(measured_from_raw(self.operator(target).apply(state)))
    }
}

/// The family at tradeoff parameter `nu`.
pub fn chau_family(n: usize, nu: f64) -> Result<MeasurementFamily> {
    let p = ChauParams::new(n, nu)?;
    MeasurementFamily::from_coefficients(n, p.a, p.b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackOutcome {
    pub decoded: usize,
    pub post_state: StateVector,
    /// False only when the attacker left the state untouched.
    pub acted: bool,
}

/// Inverse-CDF draw from a probability row; one uniform draw.
pub(crate) fn sample_index<R: Rng + ?Sized>(probabilities: &[f64], rng: &mut R) -> usize {
    let total: f64 = probabilities.iter().sum();
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &p) in probabilities.iter().enumerate() {
        if p > 0.0 {
            last_positive = i;
            acc += p;
            if target < acc {
                return i;
            }
        }
    }
    last_positive
}

/// One round of the measurement attack: sample an outcome, apply the Lüders update.
pub fn run_chau_attack<R: Rng + ?Sized>(
    sealed: &SealedState,
    family: &MeasurementFamily,
    rng: &mut R,
) -> Result<AttackOutcome> {
    let probabilities = family.outcome_probabilities(&sealed.state)?;
    let decoded = sample_index(&probabilities, rng);
    let post_state = family
        .apply(decoded, &sealed.state)?
        .post_state
        .expect("sampled outcome has positive probability");
    Ok(AttackOutcome {
        decoded,
        post_state,
        acted: true,
    })
}

/// With probability `q` measure honestly in the computational basis; otherwise
/// leave the state alone and report a uniform guess.
pub fn coin_toss_attack<R: Rng + ?Sized>(
    sealed: &SealedState,
    q: f64,
    rng: &mut R,
) -> Result<AttackOutcome> {
    check_unit_interval("q", q)?;
    let n = sealed.dim();
    if rng.random::<f64>() < q {
        let decoded = sample_index(&sealed.state.probabilities(), rng);
        Ok(AttackOutcome {
            decoded,
            post_state: StateVector::basis(n, decoded)?,
            acted: true,
        })
    } else {
        Ok(AttackOutcome {
            decoded: rng.random_range(0..n),
            post_state: sealed.state.clone(),
            acted: false,
        })
    }
}

/// Decode distribution of [`coin_toss_attack`], by summing over both branches.
pub fn coin_toss_distribution(state: &StateVector, q: f64) -> Result<Vec<f64>> {
    check_unit_interval("q", q)?;
    let n = state.dim() as f64;
    let read = state.probabilities();
    Ok(read
        .iter()
        .map(|&p_read| q * p_read + (1.0 - q) * (1.0 / n))
        .collect())
}
