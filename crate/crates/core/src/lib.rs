//! Simulation of quantum string seals under the `aI + b|i⟩⟨i|` measurement
//! attack family.
//!
//! The crate builds sealed states ([`seal`]), the attack measurements
//! ([`attack`]), closed-form decode and fidelity analytics ([`analysis`]), and
//! a seeded Monte Carlo harness that checks the closed forms empirically
//! ([`montecarlo`]). [`claims`] bundles the checks into a single report.

pub mod analysis;
pub mod attack;
pub mod claims;
pub mod error;
pub mod limits;
pub mod linalg;
pub mod montecarlo;
pub mod report;
pub mod seal;

pub use analysis::{
    average_fidelity, bit_seal_point, decode_matrix, flat_posterior_mass, mutual_information,
    tradeoff_sweep, BitSealPoint, DecodeMatrix, TradeoffPoint,
};
pub use attack::{
    chau_family, coin_toss_attack, run_chau_attack, AttackOutcome, ChauParams, MeasurementFamily,
};
pub use error::{ErrorKind, Result, SealError};
pub use linalg::{apply_and_normalize, fidelity, tensor_product, DenseOperator, StateVector};
pub use montecarlo::{
    chi_square_check, run_experiment, EmpiricalStats, ExperimentConfig, SealSource, Strategy,
};
pub use num_complex::Complex64;
pub use seal::{he_seal, lambda_from_he, seal_general, verify, HeSealSpec, LambdaMatrix, SealedState};
