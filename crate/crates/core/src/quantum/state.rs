use num_complex::Complex64 as C64;

use super::linalg::{check_hermitian, hermitian_eigen, inner, outer, trace_norm_hermitian, CMatrix};
use super::max_dim;
use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-10;

/// A unit-norm amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let cap = max_dim();
        if amps.len() > cap {
            return Err(Error::DimensionOverflow {
                dim: amps.len(),
                cap,
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn overlap(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(inner(&self.amps, &other.amps))
    }

    pub fn projector(&self) -> CMatrix {
        outer(&self.amps, &self.amps)
    }
}

/// Hermitian, positive semidefinite, trace one.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        check_hermitian(&matrix)?;
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > NORM_TOL || trace.im.abs() > NORM_TOL {
            return Err(Error::InvalidDensity(format!("trace {trace}")));
        }
        let min = hermitian_eigen(&matrix).0.first().copied().unwrap_or(0.0);
        if min < -NORM_TOL {
            return Err(Error::InvalidDensity(format!("eigenvalue {min:e}")));
        }
        Ok(Self { matrix })
    }

    pub fn pure(state: &StateVector) -> Self {
        Self {
            matrix: state.projector(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// Uniform mixture of pure states.
pub fn mixture_density(states: &[StateVector]) -> Result<DensityOperator> {
    let first = states
        .first()
        .ok_or_else(|| Error::ParameterOutOfRange("empty state family".into()))?;
    let dim = first.dim();
    let mut acc = CMatrix::zeros(dim, dim);
    for s in states {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch(dim, s.dim()));
        }
        let a = s.amplitudes();
        for i in 0..dim {
            if a[i] == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                acc[(i, j)] += a[i] * a[j].conj();
            }
        }
    }
    acc /= C64::new(states.len() as f64, 0.0);
    Ok(DensityOperator { matrix: acc })
}

/// `√(1 − |⟨a|b⟩|²)` for pure states.
pub fn trace_distance_pure(a: &StateVector, b: &StateVector) -> Result<f64> {
    let ov = a.overlap(b)?.norm_sqr();
    Ok((1.0 - ov).max(0.0).sqrt())
}

/// `½‖ρ − σ‖₁` via the spectrum of the difference.
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    Ok(0.5 * trace_norm_hermitian(&(rho.matrix() - sigma.matrix())))
}
