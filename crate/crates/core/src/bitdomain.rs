//! Bitstring domain primitives: adjacency-matrix encoding, out-degree
//! histograms and the Walsh–Hadamard transform of Boolean functions.
//!
//! Bit lists are little-endian: position `k` of a bit list is bit `k` of the
//! integer value. Adjacency matrices are vectorized column-major, so entry
//! `(i, j)` lands at position `j * n + i`.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Sub};

use crate::error::{Error, Result};

pub const MAX_WIDTH: usize = 20;
pub const MAX_VERTICES: usize = 4;
pub const MAX_WALSH_WIDTH: usize = 16;

/// An element of `{0,1}^width`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitString {
    width: usize,
    value: u64,
}

impl BitString {
    pub fn new(width: usize, value: u64) -> Result<Self> {
        if width == 0 || width > MAX_WIDTH {
            return Err(Error::WidthOutOfRange(width, MAX_WIDTH));
        }
        if value >> width != 0 {
            return Err(Error::ValueOutOfRange { value, width });
        }
        Ok(Self { width, value })
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let value = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, &b)| acc | (u64::from(b) << k));
        Self::new(bits.len(), value)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn index(&self) -> usize {
        self.value as usize
    }

    pub fn bit(&self, k: usize) -> bool {
        (self.value >> k) & 1 == 1
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.width).map(|k| self.bit(k)).collect()
    }
}

/// Directed-graph adjacency matrix on `n` vertices; self-loops allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdjacencyMatrix {
    n: usize,
    bits: Vec<bool>,
}

impl AdjacencyMatrix {
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::WidthOutOfRange(n, MAX_VERTICES));
        }
        let mut bits = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::WidthMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            for &b in row {
                if b > 1 {
                    return Err(Error::ParameterOutOfRange(format!(
                        "adjacency entry {b} is not binary"
                    )));
                }
                bits.push(b == 1);
            }
        }
        Ok(Self { n, bits })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::WidthOutOfRange(n, MAX_VERTICES));
        }
        Ok(Self {
            n,
            bits: vec![false; n * n],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.bits[row * self.n + col] = value;
    }

    pub fn out_degree(&self, row: usize) -> usize {
        (0..self.n).filter(|&c| self.get(row, c)).count()
    }

    /// `P A P^T` for the vertex relabelling `v -> perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = Self {
            n: self.n,
            bits: vec![false; self.n * self.n],
        };
        for r in 0..self.n {
            for c in 0..self.n {
                out.set(perm[r], perm[c], self.get(r, c));
            }
        }
        out
    }
}

/// `counts[k]` is the number of vertices with out-degree `k` (length `n + 1`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegreeCountVector {
    counts: Vec<usize>,
}

impl DegreeCountVector {
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }
}

/// Degree counts reduced mod 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParityVector {
    bits: Vec<bool>,
}

impl ParityVector {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Little-endian integer encoding, used as a register index.
    pub fn to_index(&self) -> usize {
        self.bits
            .iter()
            .enumerate()
            .fold(0usize, |acc, (k, &b)| acc | (usize::from(b) << k))
    }
}

pub fn vectorize(a: &AdjacencyMatrix) -> BitString {
    let n = a.n();
    let mut value = 0u64;
    for col in 0..n {
        for row in 0..n {
            if a.get(row, col) {
                value |= 1 << (col * n + row);
            }
        }
    }
    BitString {
        width: n * n,
        value,
    }
}

/// Inverse of [`vectorize`]; the width must be a perfect square.
pub fn devectorize(x: BitString) -> Result<AdjacencyMatrix> {
    let n = (1..=MAX_VERTICES)
        .find(|n| n * n == x.width())
        .ok_or(Error::WidthMismatch {
            expected: MAX_VERTICES * MAX_VERTICES,
            got: x.width(),
        })?;
    let mut a = AdjacencyMatrix::zeros(n)?;
    for col in 0..n {
        for row in 0..n {
            a.set(row, col, x.bit(col * n + row));
        }
    }
    Ok(a)
}

pub fn degree_counts(a: &AdjacencyMatrix) -> DegreeCountVector {
    let mut counts = vec![0; a.n() + 1];
    for row in 0..a.n() {
        counts[a.out_degree(row)] += 1;
    }
    DegreeCountVector { counts }
}

pub fn parity_reduce(c: &DegreeCountVector) -> ParityVector {
    ParityVector {
        bits: c.counts.iter().map(|&k| k % 2 == 1).collect(),
    }
}

/// In-place unnormalized fast Walsh–Hadamard butterfly.
pub fn fwht_in_place<T>(data: &mut [T])
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    let len = data.len();
    debug_assert!(len.is_power_of_two());
    let mut h = 1;
    while h < len {
        for block in (0..len).step_by(2 * h) {
            for k in block..block + h {
                let a = data[k];
                let b = data[k + h];
                data[k] = a + b;
                data[k + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Fourier coefficients `f̂(y) = 2^{-m} Σ_x (-1)^{x·y + f(x)}` of a truth table.
pub fn walsh_spectrum(table: &[bool]) -> Result<Vec<f64>> {
    let len = table.len();
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    let m = len.trailing_zeros() as usize;
    if m > MAX_WALSH_WIDTH {
        return Err(Error::WidthOutOfRange(m, MAX_WALSH_WIDTH));
    }
    let mut signs: Vec<f64> = table.iter().map(|&b| if b { -1.0 } else { 1.0 }).collect();
    fwht_in_place(&mut signs);
    let scale = 1.0 / len as f64;
    signs.iter_mut().for_each(|v| *v *= scale);
    Ok(signs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn walsh_naive(table: &[bool]) -> Vec<f64> {
        let len = table.len();
        (0..len)
            .map(|y| {
                let s: i64 = (0..len)
                    .map(|x| {
                        let e = (x & y).count_ones() as usize + usize::from(table[x]);
                        if e % 2 == 0 { 1 } else { -1 }
                    })
                    .sum();
                s as f64 / len as f64
            })
            .collect()
    }

    fn all_matrices(n: usize) -> impl Iterator<Item = AdjacencyMatrix> {
        (0..1u64 << (n * n)).map(move |v| devectorize(BitString::new(n * n, v).unwrap()).unwrap())
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn vectorize_examples() {
        let a = AdjacencyMatrix::from_rows(&[vec![1]]).unwrap();
        let x = vectorize(&a);
        assert_eq!((x.value(), x.width()), (1, 1));

        let a = AdjacencyMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        let x = vectorize(&a);
        assert_eq!(x.width(), 4);
        assert_eq!(x.to_bits(), vec![false, true, true, false]);
        assert_eq!(x.value(), 6);
    }

    #[test]
    fn column_major_position() {
        // A[0][1] = 1 only: column 1, row 0 -> position 2.
        let a = AdjacencyMatrix::from_rows(&[vec![0, 1], vec![0, 0]]).unwrap();
        assert_eq!(vectorize(&a).value(), 1 << 2);
    }

    #[test]
    fn vectorize_is_bijective_up_to_three_vertices() {
        for n in 1..=3 {
            let mut seen = vec![false; 1 << (n * n)];
            for a in all_matrices(n) {
                let x = vectorize(&a);
                assert!(!seen[x.index()]);
                seen[x.index()] = true;
                assert_eq!(devectorize(x).unwrap(), a);
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn degree_count_examples() {
        let a = AdjacencyMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(degree_counts(&a).counts(), &[0, 2, 0]);
        let a = AdjacencyMatrix::from_rows(&[vec![1, 1], vec![1, 0]]).unwrap();
        assert_eq!(degree_counts(&a).counts(), &[0, 1, 1]);
        let a = AdjacencyMatrix::zeros(2).unwrap();
        assert_eq!(degree_counts(&a).counts(), &[2, 0, 0]);
    }

    #[test]
    fn parity_reduce_examples() {
        let p = |c: Vec<usize>| parity_reduce(&DegreeCountVector { counts: c }).bits().to_vec();
        assert_eq!(p(vec![0, 2, 0]), vec![false, false, false]);
        assert_eq!(p(vec![0, 1, 1]), vec![false, true, true]);
        assert_eq!(p(vec![2, 0, 1, 0]), vec![false, false, true, false]);
    }

    #[test]
    fn degree_counts_sum_to_n_and_are_permutation_invariant() {
        for n in 2..=3 {
            let perms = permutations(n);
            for a in all_matrices(n) {
                let c = degree_counts(&a);
                assert_eq!(c.counts().iter().sum::<usize>(), n);
                for p in &perms {
                    assert_eq!(degree_counts(&a.permuted(p)), c);
                }
            }
        }
    }

    #[test]
    fn walsh_examples() {
        assert_eq!(walsh_spectrum(&[false, true]).unwrap(), vec![0.0, 1.0]);
        assert_eq!(walsh_spectrum(&[false, false]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(walsh_spectrum(&[false; 3]), Err(Error::NotPowerOfTwo(3)));
        assert_eq!(walsh_spectrum(&[]), Err(Error::NotPowerOfTwo(0)));
    }

    #[test]
    fn bitstring_rejects_overflow() {
        assert!(BitString::new(3, 8).is_err());
        assert!(BitString::new(0, 0).is_err());
        assert!(BitString::new(21, 0).is_err());
    }

    proptest! {
        #[test]
        fn walsh_matches_naive_and_parseval(bits in prop::collection::vec(any::<bool>(), 1..=10usize)
            .prop_flat_map(|w| prop::collection::vec(any::<bool>(), 1usize << w.len()))) {
            let fast = walsh_spectrum(&bits).unwrap();
            let slow = walsh_naive(&bits);
            for (a, b) in fast.iter().zip(&slow) {
                prop_assert!((a - b).abs() < 1e-12);
            }
            let mass: f64 = fast.iter().map(|c| c * c).sum();
            prop_assert!((mass - 1.0).abs() < 1e-12);
        }

        #[test]
        fn bitstring_round_trips(width in 1usize..=20, raw in any::<u64>()) {
            let value = raw & ((1u64 << width) - 1);
            let x = BitString::new(width, value).unwrap();
            prop_assert_eq!(BitString::from_bits(&x.to_bits()).unwrap(), x);
        }
    }
}
