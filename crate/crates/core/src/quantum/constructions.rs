//! Example states and the observables the learners and analyses query with.
//!
//! Register layout: the label qubit is the least significant bit, so the
//! example-state basis index of `|x, y⟩` is `2x + y`. Composed parity states
//! use `(x_A, ĉ_A, label)` from most to least significant.

use num_complex::Complex64 as C64;

use super::linalg::{hermitian_eigen, kron, outer, CMatrix};
use super::observable::{Observable, MAX_DENSE_DIM};
use super::state::{DensityOperator, StateVector};
use super::max_dim;
use crate::bitdomain::{degree_counts, devectorize, parity_reduce, BitString};
use crate::concepts::{Concept, ParityConcept};
use crate::error::{Error, Result};
use crate::symmetry::OrbitPartition;

pub const MAX_FOURIER_WIDTH: usize = 12;
pub const MAX_COMPOSED_VERTICES: usize = 3;
/// Eigenvalues of `ρ − σ` below this magnitude are treated as the null space.
pub const HELSTROM_NULL_TOL: f64 = 1e-10;

fn check_cap(dim: usize) -> Result<()> {
    let cap = max_dim();
    if dim > cap {
        return Err(Error::DimensionOverflow { dim, cap });
    }
    Ok(())
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// `|ψ_f⟩ = |X|^{-1/2} Σ_x |x, f(x)⟩` under the uniform distribution.
pub fn example_state(f: &Concept) -> Result<StateVector> {
    let size = f.domain_size();
    check_cap(2 * size)?;
    let amp = C64::new(1.0 / (size as f64).sqrt(), 0.0);
    let mut amps = vec![zero(); 2 * size];
    for (x, y) in f.truth_table().into_iter().enumerate() {
        amps[2 * x + usize::from(y)] = amp;
    }
    StateVector::new(amps)
}

/// Pieces of the phase-kickback expansion of `|ψ_f⟩⟨ψ_f|`.
#[derive(Debug, Clone)]
pub struct PhaseKickback {
    /// `|φ_f⟩ = |X|^{-1/2} Σ_x (−1)^{f(x)} |x⟩`
    pub phase_state: Vec<C64>,
    /// `|u⟩ = |X|^{-1/2} Σ_x |x⟩`
    pub uniform_state: Vec<C64>,
    /// Max-abs entry of the difference between both sides of the identity.
    pub residual: f64,
}

pub fn phase_kickback_decompose(f: &Concept) -> Result<PhaseKickback> {
    let size = f.domain_size();
    if 2 * size > MAX_DENSE_DIM {
        return Err(Error::DimensionOverflow {
            dim: 2 * size,
            cap: MAX_DENSE_DIM,
        });
    }
    let psi = example_state(f)?;
    let norm = 1.0 / (size as f64).sqrt();
    let phase_state: Vec<C64> = f
        .truth_table()
        .iter()
        .map(|&b| C64::new(if b { -norm } else { norm }, 0.0))
        .collect();
    let uniform_state = vec![C64::new(norm, 0.0); size];

    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = [C64::new(h, 0.0), C64::new(h, 0.0)];
    let minus = [C64::new(h, 0.0), C64::new(-h, 0.0)];
    let (phi, u) = (&phase_state, &uniform_state);
    let rhs = (kron(&outer(phi, phi), &outer(&minus, &minus))
        + kron(&outer(phi, u), &outer(&minus, &plus))
        + kron(&outer(u, phi), &outer(&plus, &minus))
        + kron(&outer(u, u), &outer(&plus, &plus)))
        * C64::new(0.5, 0.0);
    let residual = (psi.projector() - rhs)
        .iter()
        .fold(0.0f64, |a, z| a.max(z.norm()));
    Ok(PhaseKickback {
        phase_state,
        uniform_state,
        residual,
    })
}

/// Index of `|x_A, ĉ_A, label⟩` in the composed register.
pub fn composed_index(n: usize, x: usize, c_hat: usize, label: bool) -> usize {
    ((x << (n + 1)) | c_hat) << 1 | usize::from(label)
}

/// `|g′_S⟩ = N^{-1/2} Σ_A |x_A⟩|ĉ_A⟩|g_S(A)⟩`, built directly as a state.
pub fn prep_extend(g: &ParityConcept) -> Result<StateVector> {
    let n = g.n();
    if n > MAX_COMPOSED_VERTICES {
        return Err(Error::WidthOutOfRange(n, MAX_COMPOSED_VERTICES));
    }
    let width = n * n;
    let dim = 1usize << (width + n + 2);
    check_cap(dim)?;
    let count = 1usize << width;
    let amp = C64::new(1.0 / (count as f64).sqrt(), 0.0);
    let mut amps = vec![zero(); dim];
    for x in 0..count {
        let a = devectorize(BitString::new(width, x as u64)?)?;
        let c_hat = parity_reduce(&degree_counts(&a)).to_index();
        amps[composed_index(n, x, c_hat, g.label(x)?)] = amp;
    }
    StateVector::new(amps)
}

/// Truth table of `x ↦ Ŝ·x mod 2` over `{0,1}^m`.
pub fn parity_table(s_hat: &[bool]) -> Vec<bool> {
    let s = s_hat
        .iter()
        .enumerate()
        .fold(0usize, |acc, (i, &b)| acc | (usize::from(b) << i));
    (0..1usize << s_hat.len())
        .map(|x| (x & s).count_ones() % 2 == 1)
        .collect()
}

/// The uniform-input parity example state `2^{-m/2} Σ_c |c⟩|Ŝ·c⟩`.
pub fn ideal_parity_state(s_hat: &[bool]) -> Result<StateVector> {
    example_state(&Concept::Table(parity_table(s_hat)))
}

/// Fourier-mass observable `H^{⊗(m+1)} (Π_T ⊗ |1⟩⟨1|) H^{⊗(m+1)}`.
///
/// On an example state its expectation is `½ Σ_{S∈T} f̂(S)²`; the
/// `claimed_scale` converts that to the full Fourier mass.
#[derive(Debug, Clone)]
pub struct FourierMassQuery {
    pub characters: Vec<usize>,
    pub observable: Observable,
}

impl FourierMassQuery {
    pub fn claimed_scale(&self) -> f64 {
        2.0
    }

    pub fn claimed_mass(&self, raw_expectation: f64) -> f64 {
        raw_expectation * self.claimed_scale()
    }
}

fn fourier_mass_diag(characters: &[usize], m: usize) -> Result<Vec<f64>> {
    let mut diag = vec![0.0; 1 << (m + 1)];
    for &s in characters {
        if s >> m != 0 {
            return Err(Error::ValueOutOfRange {
                value: s as u64,
                width: m,
            });
        }
        diag[(s << 1) | 1] = 1.0;
    }
    Ok(diag)
}

pub fn fourier_mass_observable(characters: &[usize], m: usize) -> Result<FourierMassQuery> {
    if m == 0 || m > MAX_FOURIER_WIDTH {
        return Err(Error::WidthOutOfRange(m, MAX_FOURIER_WIDTH));
    }
    let observable = Observable::hadamard_diagonal(fourier_mass_diag(characters, m)?)?;
    Ok(FourierMassQuery {
        characters: characters.to_vec(),
        observable,
    })
}

/// Characters `σ ∈ {0,1}^m` with `σ_i = 1` (`i` zero-based).
pub fn influence_characters(i: usize, m: usize) -> Vec<usize> {
    (0..1usize << m).filter(|s| (s >> i) & 1 == 1).collect()
}

/// Influence observable for coordinate `i` on the `m`-bit parity example state.
pub fn influence_observable_ideal(i: usize, m: usize) -> Result<Observable> {
    if i >= m {
        return Err(Error::ParameterOutOfRange(format!("coordinate {i} >= width {m}")));
    }
    Ok(fourier_mass_observable(&influence_characters(i, m), m)?.observable)
}

/// `I_{x_A} ⊗ B_i` on the composed register, where `B_i` is the Fourier-mass
/// observable for `T_i` acting on the `(ĉ_A, label)` qubits.
pub fn influence_observable_composed(i: usize, n: usize) -> Result<Observable> {
    if n == 0 || n > MAX_COMPOSED_VERTICES {
        return Err(Error::WidthOutOfRange(n, MAX_COMPOSED_VERTICES));
    }
    if i > n {
        return Err(Error::ParameterOutOfRange(format!("coordinate {i} > {n}")));
    }
    let m = n + 1;
    check_cap(1 << (n * n + m + 1))?;
    let local = Observable::hadamard_diagonal(fourier_mass_diag(&influence_characters(i, m), m)?)?;
    Ok(local.with_identity_prefix(1 << (n * n)))
}

/// `P₊ − P₋` for the spectral decomposition of `ρ − σ`; zero on its kernel.
pub fn helstrom_observable(rho: &DensityOperator, sigma: &DensityOperator) -> Result<Observable> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    if rho.dim() > MAX_DENSE_DIM {
        return Err(Error::DimensionOverflow {
            dim: rho.dim(),
            cap: MAX_DENSE_DIM,
        });
    }
    let (values, vectors) = hermitian_eigen(&(rho.matrix() - sigma.matrix()));
    let dim = rho.dim();
    let mut o = CMatrix::zeros(dim, dim);
    for (k, &lambda) in values.iter().enumerate() {
        let sign = if lambda > HELSTROM_NULL_TOL {
            1.0
        } else if lambda < -HELSTROM_NULL_TOL {
            -1.0
        } else {
            continue;
        };
        let v = vectors.column(k);
        for i in 0..dim {
            for j in 0..dim {
                o[(i, j)] += v[i] * v[j].conj() * sign;
            }
        }
    }
    Observable::dense(o)
}

pub fn helstrom_pure(a: &StateVector, b: &StateVector) -> Result<Observable> {
    helstrom_observable(&DensityOperator::pure(a), &DensityOperator::pure(b))
}

/// `O = |u,+⟩⟨w,−| + |w,−⟩⟨u,+|`, with `|w⟩` uniform over the first
/// largest orbit. Its class variance equals `max|O_k| / |X|`.
pub fn tight_variance_observable(orbits: &OrbitPartition) -> Result<Observable> {
    let size = orbits.domain_size();
    if 2 * size > MAX_DENSE_DIM {
        return Err(Error::DimensionOverflow {
            dim: 2 * size,
            cap: MAX_DENSE_DIM,
        });
    }
    let star = &orbits.blocks()[orbits.largest_block()];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let u_amp = 1.0 / (size as f64).sqrt();
    let w_amp = 1.0 / (star.len() as f64).sqrt();
    let mut a = vec![zero(); 2 * size];
    let mut b = vec![zero(); 2 * size];
    for x in 0..size {
        a[2 * x] = C64::new(u_amp * h, 0.0);
        a[2 * x + 1] = C64::new(u_amp * h, 0.0);
    }
    for &x in star {
        b[2 * x] = C64::new(w_amp * h, 0.0);
        b[2 * x + 1] = C64::new(-w_amp * h, 0.0);
    }
    Observable::dense(outer(&a, &b) + outer(&b, &a))
}
