//! Dense complex state vectors and operators at the seal's message dimension.
//!
//! Everything here is a pure function on immutable values.

use num_complex::Complex64;

use crate::error::{Result, SealError};

/// Absolute tolerance on squared norms.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// A unit-norm pure state over `dim` computational basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Builds a state, rejecting empty or non-normalized amplitude lists.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(SealError::DimensionTooSmall(0));
        }
        let norm_sqr = norm_sqr(&amplitudes);
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(SealError::NotNormalized { norm_sqr });
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm_sqr(&amplitudes).sqrt();
        if norm < f64::MIN_POSITIVE {
            return Err(SealError::NotNormalized { norm_sqr: 0.0 });
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(amplitudes)
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(SealError::MessageOutOfRange {
                message: index,
                dim,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    /// Born-rule probabilities in the computational basis.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Multiplies every amplitude by `e^{i phi}`.
    pub fn with_global_phase(&self, phi: f64) -> Self {
        let phase = Complex64::from_polar(1.0, phi);
        Self {
            amplitudes: self.amplitudes.iter().map(|a| a * phase).collect(),
        }
    }
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DenseOperator {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(SealError::BadOperatorShape {
                dim,
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        op
    }

    /// `|index⟩⟨index|`.
    pub fn projector(dim: usize, index: usize) -> Self {
        let mut op = Self::zeros(dim);
        op.entries[index * dim + index] = Complex64::new(1.0, 0.0);
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.entries[c * n + r] = self.entries[r * n + c].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &DenseOperator) -> Result<Self> {
        check_dim(self.dim, rhs.dim)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let lhs = self.entries[r * n + k];
                if lhs == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..n {
                    out.entries[r * n + c] += lhs * rhs.entries[k * n + c];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &DenseOperator) -> Result<Self> {
        check_dim(self.dim, rhs.dim)?;
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Largest `|self - I|` entry.
    pub fn max_deviation_from_identity(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((self.entries[r * n + c] - target).norm());
            }
        }
        worst
    }

    /// Unnormalized `op · state`.
    pub fn apply(&self, state: &StateVector) -> Result<Vec<Complex64>> {
        check_dim(self.dim, state.dim())?;
        let n = self.dim;
        Ok((0..n)
            .map(|r| {
                self.entries[r * n..(r + 1) * n]
                    .iter()
                    .zip(state.amplitudes())
                    .map(|(m, a)| m * a)
                    .sum()
            })
            .collect())
    }
}

/// Outcome of applying one measurement operator to a state.
#[derive(Debug, Clone, PartialEq)]
pub struct Measured {
    pub probability: f64,
    /// `None` when the operator annihilates the state.
    pub post_state: Option<StateVector>,
}

/// Applies a measurement operator and renormalizes the result (Lüders update).
pub fn apply_and_normalize(op: &DenseOperator, state: &StateVector) -> Result<Measured> {
    Ok(measured_from_raw(op.apply(state)?))
}

pub(crate) fn measured_from_raw(raw: Vec<Complex64>) -> Measured {
    let probability = norm_sqr(&raw);
    if probability < f64::MIN_POSITIVE {
        return Measured {
            probability: 0.0,
            post_state: None,
        };
    }
    let norm = probability.sqrt();
    let amplitudes = raw.into_iter().map(|a| a / norm).collect();
    Measured {
        probability,
        post_state: Some(StateVector { amplitudes }),
    }
}

/// Kronecker product of states; the first factor is the most significant index digit.
pub fn tensor_product(factors: &[StateVector]) -> Result<StateVector> {
    let (first, rest) = factors.split_first().ok_or(SealError::EmptyProduct)?;
    for f in factors {
        let norm_sqr = norm_sqr(f.amplitudes());
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(SealError::NotNormalized { norm_sqr });
        }
    }
    let mut acc = first.amplitudes.clone();
    for factor in rest {
        acc = acc
            .iter()
            .flat_map(|a| factor.amplitudes.iter().map(move |b| a * b))
            .collect();
    }
    StateVector::new(acc)
}

/// `|⟨s1|s2⟩|²`.
pub fn fidelity(s1: &StateVector, s2: &StateVector) -> Result<f64> {
    Ok(s1.inner(s2)?.norm_sqr().min(1.0))
}

pub(crate) fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(SealError::DimensionMismatch { expected, found });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_6};

    fn rotated(theta: f64) -> StateVector {
        StateVector::from_real(&[theta.cos(), theta.sin()]).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn tensor_of_basis_states() {
        let zero = StateVector::basis(2, 0).unwrap();
        let out = tensor_product(&[zero.clone(), zero]).unwrap();
        assert_eq!(out.probabilities(), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn tensor_with_one_rotated_factor() {
        let out = tensor_product(&[rotated(FRAC_PI_6), StateVector::basis(2, 0).unwrap()]).unwrap();
        let re: Vec<f64> = out.amplitudes().iter().map(|a| a.re).collect();
        let want = [FRAC_PI_6.cos(), 0.0, FRAC_PI_6.sin(), 0.0];
        assert!(re.iter().zip(want).all(|(a, b)| close(*a, b)));
    }

    #[test]
    fn tensor_of_plus_states_is_flat() {
        let plus = StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let out = tensor_product(&[plus.clone(), plus]).unwrap();
        assert!(out.amplitudes().iter().all(|a| close(a.re, 0.5) && a.im == 0.0));
    }

    #[test]
    fn tensor_rejects_empty_list() {
        assert_eq!(tensor_product(&[]), Err(SealError::EmptyProduct));
    }

    #[test]
    fn state_rejects_unnormalized() {
        assert!(matches!(
            StateVector::from_real(&[1.0, 1.0]),
            Err(SealError::NotNormalized { .. })
        ));
    }

    #[test]
    fn identity_leaves_state_alone() {
        let s = rotated(0.3);
        let m = apply_and_normalize(&DenseOperator::identity(2), &s).unwrap();
        assert!(close(m.probability, 1.0));
        assert!(close(fidelity(&m.post_state.unwrap(), &s).unwrap(), 1.0));
    }

    #[test]
    fn projector_collapses() {
        let m = apply_and_normalize(&DenseOperator::projector(2, 0), &rotated(FRAC_PI_6)).unwrap();
        assert!(close(m.probability, 0.75));
        let post = m.post_state.unwrap();
        assert!(close(post.amplitude(0).re, 1.0));
        assert_eq!(post.amplitude(1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn annihilated_state_has_no_post_state() {
        let m = apply_and_normalize(&DenseOperator::projector(2, 1), &StateVector::basis(2, 0).unwrap())
            .unwrap();
        assert_eq!(m.probability, 0.0);
        assert!(m.post_state.is_none());
    }

    #[test]
    fn apply_checks_dimension() {
        let err = apply_and_normalize(&DenseOperator::identity(4), &rotated(0.1)).unwrap_err();
        assert_eq!(err, SealError::DimensionMismatch { expected: 4, found: 2 });
    }

    #[test]
    fn fidelity_examples() {
        let s = rotated(0.4);
        assert!(close(fidelity(&s, &s).unwrap(), 1.0));
        let zero = StateVector::basis(2, 0).unwrap();
        let one = StateVector::basis(2, 1).unwrap();
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        assert!(close(fidelity(&zero, &rotated(FRAC_PI_6)).unwrap(), 0.75));
        assert!(fidelity(&zero, &StateVector::basis(4, 0).unwrap()).is_err());
    }

    #[test]
    fn adjoint_and_matmul() {
        let mut op = DenseOperator::zeros(2);
        op.set(0, 1, Complex64::new(0.0, 1.0));
        let prod = op.adjoint().matmul(&op).unwrap();
        assert_eq!(prod.get(1, 1), Complex64::new(1.0, 0.0));
        assert_eq!(prod.get(0, 0), Complex64::new(0.0, 0.0));
    }

    fn arb_state(dim: usize) -> impl Strategy<Value = StateVector> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
            .prop_filter("nonzero", |v| v.iter().any(|(r, i)| r.abs() + i.abs() > 1e-3))
            .prop_map(|v| {
                StateVector::normalized(v.into_iter().map(|(r, i)| Complex64::new(r, i)).collect())
                    .unwrap()
            })
    }

    proptest! {
        #[test]
        fn projective_family_is_complete(s in arb_state(8)) {
            let total: f64 = (0..8)
                .map(|i| apply_and_normalize(&DenseOperator::projector(8, i), &s).unwrap().probability)
                .sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }

        #[test]
        fn tensor_product_stays_unit(a in arb_state(2), b in arb_state(3), c in arb_state(2)) {
            let out = tensor_product(&[a, b, c]).unwrap();
            prop_assert_eq!(out.dim(), 12);
            prop_assert!((norm_sqr(out.amplitudes()) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn fidelity_ignores_global_phase(a in arb_state(4), b in arb_state(4), phi in 0.0f64..6.3) {
            let base = fidelity(&a, &b).unwrap();
            prop_assert!((fidelity(&a.with_global_phase(phi), &b).unwrap() - base).abs() < 1e-12);
            prop_assert!((fidelity(&a, &b.with_global_phase(phi)).unwrap() - base).abs() < 1e-12);
            prop_assert!((fidelity(&b, &a).unwrap() - base).abs() < 1e-12);
        }
    }
}
