//! Statevector and density-operator simulation of quantum example states,
//! plus every observable the oracles are queried with.

pub mod constructions;
pub mod linalg;
pub mod observable;
pub mod state;

pub use constructions::*;
pub use observable::{LocalOperator, Observable};
pub use state::{mixture_density, trace_distance, trace_distance_pure, DensityOperator, StateVector};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_DIM: usize = 1 << 16;
pub const MAX_DIM_ENV: &str = "SYMSQ_MAX_DIM";

/// Parses a dimension cap: a power of two no larger than `2^16`.
pub fn parse_dim_cap(raw: &str) -> Result<usize> {
    let value: usize = raw
        .trim()
        .parse()
        .map_err(|_| Error::ParameterOutOfRange(format!("{MAX_DIM_ENV}={raw:?} is not an integer")))?;
    if !value.is_power_of_two() || value > DEFAULT_MAX_DIM {
        return Err(Error::ParameterOutOfRange(format!(
            "{MAX_DIM_ENV}={value} must be a power of two no larger than {DEFAULT_MAX_DIM}"
        )));
    }
    Ok(value)
}

/// Active dimension cap; an invalid override falls back to the default.
pub fn max_dim() -> usize {
    std::env::var(MAX_DIM_ENV)
        .ok()
        .and_then(|raw| parse_dim_cap(&raw).ok())
        .unwrap_or(DEFAULT_MAX_DIM)
}

/// Expectation of `observable` on a pure state.
pub fn expectation(observable: &Observable, state: &StateVector) -> Result<f64> {
    observable.expectation(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dim_cap_parsing() {
        assert_eq!(parse_dim_cap("1024").unwrap(), 1024);
        assert!(parse_dim_cap("1000").is_err());
        assert!(parse_dim_cap("131072").is_err());
        assert!(parse_dim_cap("lots").is_err());
    }
}
