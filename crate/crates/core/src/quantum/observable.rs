//! Bounded Hermitian observables.
//!
//! Large registers never materialize a dense matrix: an observable is
//! `I_prefix ⊗ local`, where `local` is dense, diagonal, or a diagonal
//! conjugated by the full Hadamard transform of its register.

use num_complex::Complex64 as C64;

use super::linalg::{check_hermitian, kron, operator_norm_hermitian, trace_product, CMatrix};
use super::state::{DensityOperator, StateVector};
use crate::bitdomain::fwht_in_place;
use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-9;
pub const IMAG_TOL: f64 = 1e-10;
/// Largest dimension for which a dense matrix is ever assembled.
pub const MAX_DENSE_DIM: usize = 1 << 11;

#[derive(Debug, Clone, PartialEq)]
pub enum LocalOperator {
    Dense(CMatrix),
    Diagonal(Vec<f64>),
    /// `H^{⊗k} diag(d) H^{⊗k}` with `H` the normalized Hadamard gate.
    HadamardDiagonal(Vec<f64>),
}

impl LocalOperator {
    fn dim(&self) -> usize {
        match self {
            LocalOperator::Dense(m) => m.nrows(),
            LocalOperator::Diagonal(d) | LocalOperator::HadamardDiagonal(d) => d.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    prefix: usize,
    local: LocalOperator,
}

fn check_diag(d: &[f64]) -> Result<()> {
    let worst = d.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if worst > 1.0 + NORM_TOL || worst.is_nan() {
        return Err(Error::NormViolation(worst));
    }
    Ok(())
}

impl Observable {
    pub fn dense(matrix: CMatrix) -> Result<Self> {
        check_hermitian(&matrix)?;
        let norm = operator_norm_hermitian(&matrix);
        if norm > 1.0 + NORM_TOL {
            return Err(Error::NormViolation(norm));
        }
        Ok(Self {
            prefix: 1,
            local: LocalOperator::Dense(matrix),
        })
    }

    pub fn diagonal(d: Vec<f64>) -> Result<Self> {
        check_diag(&d)?;
        Ok(Self {
            prefix: 1,
            local: LocalOperator::Diagonal(d),
        })
    }

    pub fn hadamard_diagonal(d: Vec<f64>) -> Result<Self> {
        if !d.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(d.len()));
        }
        check_diag(&d)?;
        Ok(Self {
            prefix: 1,
            local: LocalOperator::HadamardDiagonal(d),
        })
    }

    /// `I_prefix ⊗ self`.
    pub fn with_identity_prefix(mut self, prefix: usize) -> Self {
        self.prefix *= prefix.max(1);
        self
    }

    pub fn dim(&self) -> usize {
        self.prefix * self.local.dim()
    }

    pub fn local(&self) -> &LocalOperator {
        &self.local
    }

    pub fn identity_prefix(&self) -> usize {
        self.prefix
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.local, LocalOperator::Diagonal(_))
    }

    pub fn operator_norm(&self) -> f64 {
        match &self.local {
            LocalOperator::Dense(m) => operator_norm_hermitian(m),
            LocalOperator::Diagonal(d) | LocalOperator::HadamardDiagonal(d) => {
                d.iter().fold(0.0f64, |a, v| a.max(v.abs()))
            }
        }
    }

    fn local_dense(&self) -> CMatrix {
        match &self.local {
            LocalOperator::Dense(m) => m.clone(),
            LocalOperator::Diagonal(d) => CMatrix::from_fn(d.len(), d.len(), |i, j| {
                if i == j {
                    C64::new(d[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }),
            LocalOperator::HadamardDiagonal(d) => {
                let n = d.len();
                let scale = 1.0 / n as f64;
                CMatrix::from_fn(n, n, |i, j| {
                    let v: f64 = d
                        .iter()
                        .enumerate()
                        .map(|(k, &dk)| {
                            let parity = ((i & k).count_ones() + (j & k).count_ones()) % 2;
                            if parity == 0 {
                                dk
                            } else {
                                -dk
                            }
                        })
                        .sum();
                    C64::new(v * scale, 0.0)
                })
            }
        }
    }

    pub fn to_dense(&self) -> Result<CMatrix> {
        if self.dim() > MAX_DENSE_DIM {
            return Err(Error::DimensionOverflow {
                dim: self.dim(),
                cap: MAX_DENSE_DIM,
            });
        }
        let local = self.local_dense();
        if self.prefix == 1 {
            Ok(local)
        } else {
            Ok(kron(&CMatrix::identity(self.prefix, self.prefix), &local))
        }
    }

    fn finish(value: C64) -> Result<f64> {
        if value.im.abs() > IMAG_TOL {
            return Err(Error::ImaginaryResidue(value.im.abs()));
        }
        Ok(value.re.clamp(-1.0, 1.0))
    }

    /// `⟨ψ|O|ψ⟩`.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), state.dim()));
        }
        let local_dim = self.local.dim();
        let mut total = C64::new(0.0, 0.0);
        for block in state.amplitudes().chunks(local_dim) {
            total += match &self.local {
                LocalOperator::Dense(m) => {
                    let mut acc = C64::new(0.0, 0.0);
                    for (i, ai) in block.iter().enumerate() {
                        if *ai == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let row: C64 = block.iter().enumerate().map(|(j, aj)| m[(i, j)] * aj).sum();
                        acc += ai.conj() * row;
                    }
                    acc
                }
                LocalOperator::Diagonal(d) => C64::new(
                    block.iter().zip(d).map(|(a, &w)| w * a.norm_sqr()).sum(),
                    0.0,
                ),
                LocalOperator::HadamardDiagonal(d) => {
                    let mut work = block.to_vec();
                    fwht_in_place(&mut work);
                    let scale = 1.0 / local_dim as f64;
                    C64::new(
                        work.iter().zip(d).map(|(a, &w)| w * a.norm_sqr()).sum::<f64>() * scale,
                        0.0,
                    )
                }
            };
        }
        Self::finish(total)
    }

    /// `Tr[O ρ]`.
    pub fn expectation_density(&self, rho: &DensityOperator) -> Result<f64> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), rho.dim()));
        }
        Self::finish(trace_product(&self.to_dense()?, rho.matrix()))
    }
}
