//! Concept classes: orbit-constant symmetric functions, graph parities over
//! degree-count vectors, and indicator functions with disjoint supports.

use std::ops::Range;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bitdomain::{degree_counts, devectorize, parity_reduce, BitString, MAX_VERTICES};
use crate::error::{Error, Result};
use crate::symmetry::OrbitPartition;

pub const MAX_ENUMERABLE_ORBITS: usize = 20;

/// A member of `C_ρ`: one label bit per orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricFunction {
    orbits: Arc<OrbitPartition>,
    orbit_bits: Vec<bool>,
}

impl SymmetricFunction {
    pub fn new(orbits: Arc<OrbitPartition>, orbit_bits: Vec<bool>) -> Result<Self> {
        if orbit_bits.len() != orbits.orbit_count() {
            return Err(Error::WidthMismatch {
                expected: orbits.orbit_count(),
                got: orbit_bits.len(),
            });
        }
        Ok(Self { orbits, orbit_bits })
    }

    /// The member whose bit for orbit `k` is bit `k` of `mask`.
    pub fn from_mask(orbits: Arc<OrbitPartition>, mask: u64) -> Self {
        let orbit_bits = (0..orbits.orbit_count()).map(|k| (mask >> k) & 1 == 1).collect();
        Self { orbits, orbit_bits }
    }

    pub fn orbit_bits(&self) -> &[bool] {
        &self.orbit_bits
    }

    pub fn orbits(&self) -> &OrbitPartition {
        &self.orbits
    }
}

/// `g_S(A) = Ŝ · ĉ_A mod 2` on `n`-vertex adjacency matrices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParityConcept {
    n: usize,
    s_hat: Vec<bool>,
}

impl ParityConcept {
    pub fn new(n: usize, s_hat: Vec<bool>) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::WidthOutOfRange(n, MAX_VERTICES));
        }
        if s_hat.len() != n + 1 {
            return Err(Error::WidthMismatch {
                expected: n + 1,
                got: s_hat.len(),
            });
        }
        Ok(Self { n, s_hat })
    }

    /// `Ŝ` from the low `n + 1` bits of `index` (bit `i` is `Ŝ_i`).
    pub fn from_index(n: usize, index: usize) -> Result<Self> {
        Self::new(n, (0..=n).map(|i| (index >> i) & 1 == 1).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s_hat(&self) -> &[bool] {
        &self.s_hat
    }

    pub fn s_index(&self) -> usize {
        self.s_hat
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (usize::from(b) << i))
    }

    /// Label on the vectorized adjacency matrix `x`.
    pub fn label(&self, x: usize) -> Result<bool> {
        let width = self.n * self.n;
        let a = devectorize(BitString::new(width, x as u64)?)?;
        let c_hat = parity_reduce(&degree_counts(&a));
        Ok(self
            .s_hat
            .iter()
            .zip(c_hat.bits())
            .filter(|(&s, &c)| s && c)
            .count()
            % 2
            == 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisjointSupportClass {
    domain_size: usize,
    zeta: f64,
    supports: Vec<Range<usize>>,
}

impl DisjointSupportClass {
    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn supports(&self) -> &[Range<usize>] {
        &self.supports
    }

    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }

    pub fn member(&self, t: usize) -> Concept {
        Concept::Indicator {
            domain_size: self.domain_size,
            support: self.supports[t].clone(),
        }
    }

    pub fn members(&self) -> Vec<Concept> {
        (0..self.len()).map(|t| self.member(t)).collect()
    }

    pub fn zero(&self) -> Concept {
        Concept::Zero {
            domain_size: self.domain_size,
        }
    }
}

/// `m` consecutive supports of size `ζ·|X|` each.
pub fn make_disjoint_class(domain_size: usize, m: usize, zeta: f64) -> Result<DisjointSupportClass> {
    if !(zeta > 0.0 && zeta <= 1.0) {
        return Err(Error::ParameterOutOfRange(format!("zeta {zeta} outside (0, 1]")));
    }
    if m == 0 {
        return Err(Error::ParameterOutOfRange("class needs at least one member".into()));
    }
    let raw = zeta * domain_size as f64;
    let size = raw.round();
    if (raw - size).abs() > 1e-9 || size < 1.0 {
        return Err(Error::NonIntegerSupport(raw));
    }
    let size = size as usize;
    if m * size > domain_size {
        return Err(Error::SupportsOverlap { m, zeta });
    }
    Ok(DisjointSupportClass {
        domain_size,
        zeta,
        supports: (0..m).map(|t| t * size..(t + 1) * size).collect(),
    })
}

/// A Boolean concept over a finite domain `[0, domain_size)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Concept {
    Symmetric(SymmetricFunction),
    Parity(ParityConcept),
    Indicator {
        domain_size: usize,
        support: Range<usize>,
    },
    Zero {
        domain_size: usize,
    },
    /// An arbitrary labelling, used for exhaustive sweeps.
    Table(Vec<bool>),
}

impl Concept {
    pub fn domain_size(&self) -> usize {
        match self {
            Concept::Symmetric(f) => f.orbits.domain_size(),
            Concept::Parity(p) => 1 << (p.n * p.n),
            Concept::Indicator { domain_size, .. } | Concept::Zero { domain_size } => *domain_size,
            Concept::Table(t) => t.len(),
        }
    }

    pub fn evaluate(&self, x: usize) -> Result<bool> {
        let size = self.domain_size();
        if x >= size {
            return Err(Error::ValueOutOfRange {
                value: x as u64,
                width: size.next_power_of_two().trailing_zeros() as usize,
            });
        }
        Ok(match self {
            Concept::Symmetric(f) => f.orbit_bits[f.orbits.orbit_of(x)],
            Concept::Parity(p) => p.label(x)?,
            Concept::Indicator { support, .. } => support.contains(&x),
            Concept::Zero { .. } => false,
            Concept::Table(t) => t[x],
        })
    }

    pub fn truth_table(&self) -> Vec<bool> {
        match self {
            Concept::Table(t) => t.clone(),
            Concept::Symmetric(f) => f
                .orbits
                .orbit_map()
                .iter()
                .map(|&k| f.orbit_bits[k])
                .collect(),
            _ => (0..self.domain_size())
                .map(|x| self.evaluate(x).expect("x within domain"))
                .collect(),
        }
    }
}

pub fn sample_uniform_symmetric(orbits: &Arc<OrbitPartition>, seed: u64) -> SymmetricFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(orbits, &mut rng)
}

pub fn sample_with<R: Rng>(orbits: &Arc<OrbitPartition>, rng: &mut R) -> SymmetricFunction {
    let orbit_bits = (0..orbits.orbit_count()).map(|_| rng.gen::<bool>()).collect();
    SymmetricFunction {
        orbits: Arc::clone(orbits),
        orbit_bits,
    }
}

pub fn check_enumerable(orbit_count: usize, limit: usize) -> Result<()> {
    if orbit_count > limit {
        return Err(Error::ClassTooLarge {
            orbits: orbit_count,
            limit,
        });
    }
    Ok(())
}

/// All `2^{#orbits}` members, ordered by mask.
pub fn enumerate_class(orbits: &Arc<OrbitPartition>) -> Result<Vec<SymmetricFunction>> {
    check_enumerable(orbits.orbit_count(), MAX_ENUMERABLE_ORBITS)?;
    Ok((0..1u64 << orbits.orbit_count())
        .map(|mask| SymmetricFunction::from_mask(Arc::clone(orbits), mask))
        .collect())
}
