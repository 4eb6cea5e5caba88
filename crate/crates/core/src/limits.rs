//! Dimension cap for dense work.

use crate::error::{Result, SealError};

/// Default cap on the message-space dimension (12 qubits).
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Environment variable overriding [`DEFAULT_MAX_DIM`].
pub const MAX_DIM_ENV: &str = "SEALSIM_MAX_DIM";

pub fn max_dimension() -> usize {
    std::env::var(MAX_DIM_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_DIM)
}

pub fn check_dimension(dim: usize) -> Result<()> {
    let max = max_dimension();
    if dim > max {
        return Err(SealError::DimensionTooLarge { dim, max });
    }
    Ok(())
}
