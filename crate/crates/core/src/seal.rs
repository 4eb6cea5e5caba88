//! Sealed-state construction.
//!
//! Two constructions are provided: the general overlap model, where the sealed
//! state of message `i'` is row `i'` of a coefficient matrix in the
//! computational basis, and the per-qubit string seal in which each bit is
//! encoded as `cos θ|b⟩ + sin θ|¬b⟩`. The second is an instance of the first;
//! [`lambda_from_he`] gives its coefficient matrix.
//!
//! Message strings map to basis indices big-endian: the first bit of the
//! string is the most significant bit of the index.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Result, SealError};
use crate::linalg::{self, fidelity, norm_sqr, tensor_product, StateVector, NORM_TOLERANCE};

/// Overlap coefficients `λ[i'][j']` with unit-norm rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaMatrix {
    dim: usize,
    coefficients: Vec<Complex64>,
}

impl LambdaMatrix {
    /// Row-major constructor; every row must have unit 2-norm.
    pub fn new(dim: usize, coefficients: Vec<Complex64>) -> Result<Self> {
        if dim < 2 {
            return Err(SealError::DimensionTooSmall(dim));
        }
        if coefficients.len() != dim * dim {
            return Err(SealError::BadOperatorShape {
                dim,
                expected: dim * dim,
                found: coefficients.len(),
            });
        }
        for (row, chunk) in coefficients.chunks(dim).enumerate() {
            let norm_sqr = norm_sqr(chunk);
            if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
                return Err(SealError::RowNotNormalized { row, norm_sqr });
            }
        }
        Ok(Self { dim, coefficients })
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(SealError::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        Self::new(dim, rows.into_iter().flatten().collect())
    }

    /// The perfect seal: every message is its own basis state.
    pub fn identity(dim: usize) -> Result<Self> {
        let mut c = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            c[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Self::new(dim, c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, message: usize) -> &[Complex64] {
        &self.coefficients[message * self.dim..(message + 1) * self.dim]
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.coefficients[row * self.dim + col]
    }

    /// `|λ[i'][j']|²` for every row, row-major.
    pub fn squared_moduli(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn column_norm_sqr(&self, col: usize) -> f64 {
        (0..self.dim).map(|r| self.get(r, col).norm_sqr()).sum()
    }
}

/// Where a sealed state came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SealKind {
    GeneralLambda,
    HeSeal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SealedState {
    pub state: StateVector,
    pub message: usize,
    pub kind: SealKind,
}

impl SealedState {
    pub fn dim(&self) -> usize {
        self.state.dim()
    }
}

/// Per-qubit string seal parameters: the message bits and one angle per bit.
#[derive(Debug, Clone, PartialEq)]
pub struct HeSealSpec {
    bits: Vec<bool>,
    thetas: Vec<f64>,
}

impl HeSealSpec {
    pub fn new(bits: Vec<bool>, thetas: Vec<f64>) -> Result<Self> {
        if bits.is_empty() {
            return Err(SealError::EmptyBits);
        }
        if bits.len() != thetas.len() {
            return Err(SealError::ThetaCount {
                bits: bits.len(),
                thetas: thetas.len(),
            });
        }
        for (index, &theta) in thetas.iter().enumerate() {
            if !(0.0..=FRAC_PI_4 + NORM_TOLERANCE).contains(&theta) {
                return Err(SealError::ThetaOutOfRange { index, theta });
            }
        }
        Ok(Self { bits, thetas })
    }

    /// Same angle on every qubit.
    pub fn uniform(bits: Vec<bool>, theta: f64) -> Result<Self> {
        let m = bits.len();
        Self::new(bits, vec![theta; m])
    }

    /// Parses a bit string such as `"0110"` and either one shared angle or a
    /// comma-separated list, in radians. Angles may also be written `pi/K`.
    pub fn parse(bits: &str, thetas: &str) -> Result<Self> {
        let bits = parse_bits(bits)?;
        let angles = thetas
            .split(',')
            .map(parse_angle)
            .collect::<Result<Vec<_>>>()?;
        match angles.as_slice() {
            [shared] => Self::uniform(bits, *shared),
            _ => Self::new(bits, angles),
        }
    }

    /// Number of qubits `m`.
    pub fn qubits(&self) -> usize {
        self.bits.len()
    }

    /// Message-space dimension `2^m`.
    pub fn dim(&self) -> usize {
        1 << self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Big-endian index of the bit string.
    pub fn message(&self) -> usize {
        self.bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b))
    }

    /// The same angles sealing a different message.
    pub fn with_message(&self, message: usize) -> Result<Self> {
        let m = self.qubits();
        if message >= self.dim() {
            return Err(SealError::MessageOutOfRange {
                message,
                dim: self.dim(),
            });
        }
        Ok(Self {
            bits: (0..m).map(|k| (message >> (m - 1 - k)) & 1 == 1).collect(),
            thetas: self.thetas.clone(),
        })
    }

    /// `λ[i'][j']` for one pair of messages, as a product over qubits.
    pub fn coefficient(&self, sealed: usize, basis: usize) -> f64 {
        let m = self.qubits();
        self.thetas
            .iter()
            .enumerate()
            .map(|(k, theta)| {
                let shift = m - 1 - k;
                if (sealed >> shift) & 1 == (basis >> shift) & 1 {
                    theta.cos()
                } else {
                    theta.sin()
                }
            })
            .product()
    }
}

pub fn parse_bits(text: &str) -> Result<Vec<bool>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(SealError::EmptyBits);
    }
    text.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(SealError::Parse(format!("bit string contains {other:?}"))),
        })
        .collect()
}

/// Parses radians: a plain number, `pi`, `pi/K`, or `C*pi/K`.
pub fn parse_angle(text: &str) -> Result<f64> {
    let text = text.trim();
    let bad = || SealError::Parse(format!("invalid angle {text:?}"));
    let lower = text.to_ascii_lowercase();
    if let Some(pos) = lower.find("pi") {
        let (head, tail) = (&lower[..pos], &lower[pos + 2..]);
        let coeff = match head.strip_suffix('*').unwrap_or(head) {
            "" => 1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        let denom = match tail.strip_prefix('/') {
            Some(d) => d.parse::<f64>().map_err(|_| bad())?,
            None if tail.is_empty() => 1.0,
            None => return Err(bad()),
        };
        return Ok(coeff * PI / denom);
    }
    text.parse::<f64>().map_err(|_| bad())
}

/// Sealed state of `message` under the general overlap model.
pub fn seal_general(lambda: &LambdaMatrix, message: usize) -> Result<SealedState> {
    if message >= lambda.dim() {
        return Err(SealError::MessageOutOfRange {
            message,
            dim: lambda.dim(),
        });
    }
    let state = StateVector::new(lambda.row(message).to_vec()).map_err(|e| match e {
        SealError::NotNormalized { norm_sqr } => SealError::RowNotNormalized {
            row: message,
            norm_sqr,
        },
        other => other,
    })?;
    Ok(SealedState {
        state,
        message,
        kind: SealKind::GeneralLambda,
    })
}

/// Full coefficient matrix of the string seal, over all `2^m` messages.
pub fn lambda_from_he(spec: &HeSealSpec) -> Result<LambdaMatrix> {
    let n = spec.dim();
    let mut c = Vec::with_capacity(n * n);
    for sealed in 0..n {
        c.extend((0..n).map(|basis| Complex64::new(spec.coefficient(sealed, basis), 0.0)));
    }
    LambdaMatrix::new(n, c)
}

/// Builds the string-seal state qubit by qubit.
pub fn he_seal(spec: &HeSealSpec) -> Result<SealedState> {
    let factors = spec
        .bits
        .iter()
        .zip(&spec.thetas)
        .map(|(&bit, theta)| {
            let (c, s) = (theta.cos(), theta.sin());
            StateVector::from_real(&if bit { [s, c] } else { [c, s] })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SealedState {
        state: tensor_product(&factors)?,
        message: spec.message(),
        kind: SealKind::HeSeal,
    })
}

/// Projective check onto the original sealed state; passes with probability
/// equal to the fidelity. Consumes exactly one uniform draw.
pub fn verify<R: Rng + ?Sized>(
    original: &SealedState,
    returned: &StateVector,
    rng: &mut R,
) -> Result<bool> {
    linalg::check_dim(original.dim(), returned.dim())?;
    let f = fidelity(&original.state, returned)?;
    Ok(rng.random::<f64>() < f)
}
