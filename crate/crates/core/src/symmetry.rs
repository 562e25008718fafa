//! Permutation actions on a finite domain and their orbit structure.
//!
//! An action is stored as a list of generator index maps; orbits are the
//! connected components of the generator graph, found with union-find.

use serde::{Deserialize, Serialize};

use crate::bitdomain::{devectorize, vectorize, BitString, MAX_VERTICES, MAX_WIDTH};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionKind {
    Cyclic,
    CoordinatePermutation,
    GraphIsomorphism,
    ExplicitPartition,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAction {
    kind: ActionKind,
    /// Bit width of the domain when it is `{0,1}^width`.
    width: Option<usize>,
    domain_size: usize,
    generators: Vec<Vec<usize>>,
}

impl GroupAction {
    /// Builds an action from raw generator maps, checking each is a bijection.
    pub fn from_generators(
        kind: ActionKind,
        width: Option<usize>,
        domain_size: usize,
        generators: Vec<Vec<usize>>,
    ) -> Result<Self> {
        for (g, map) in generators.iter().enumerate() {
            if map.len() != domain_size {
                return Err(Error::NotBijection(format!(
                    "generator {g} has length {} on a domain of size {domain_size}",
                    map.len()
                )));
            }
            let mut hit = vec![false; domain_size];
            for &y in map {
                if y >= domain_size || hit[y] {
                    return Err(Error::NotBijection(format!(
                        "generator {g} repeats or overflows at image {y}"
                    )));
                }
                hit[y] = true;
            }
        }
        Ok(Self {
            kind,
            width,
            domain_size,
            generators,
        })
    }

    pub fn kind(&self) -> ActionKind {
        self.kind
    }

    pub fn width(&self) -> Option<usize> {
        self.width
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn generators(&self) -> &[Vec<usize>] {
        &self.generators
    }
}

fn check_width(n: usize) -> Result<()> {
    if n == 0 || n > MAX_WIDTH {
        return Err(Error::WidthOutOfRange(n, MAX_WIDTH));
    }
    Ok(())
}

fn rotate_left(x: usize, n: usize) -> usize {
    let mask = (1usize << n) - 1;
    ((x << 1) | (x >> (n - 1))) & mask
}

/// Cyclic shifts of `n` bit positions, generated by rotate-left-by-one.
pub fn cyclic(n: usize) -> Result<GroupAction> {
    check_width(n)?;
    let gen = (0..1usize << n).map(|x| rotate_left(x, n)).collect();
    GroupAction::from_generators(ActionKind::Cyclic, Some(n), 1 << n, vec![gen])
}

/// The full symmetric group on bit positions; orbits are Hamming-weight classes.
pub fn coordinate_permutation(n: usize) -> Result<GroupAction> {
    check_width(n)?;
    let size = 1usize << n;
    let mut generators = Vec::new();
    if n >= 2 {
        let swap01 = (0..size)
            .map(|x| {
                let (b0, b1) = (x & 1, (x >> 1) & 1);
                (x & !3) | (b0 << 1) | b1
            })
            .collect();
        generators.push(swap01);
    }
    if n >= 3 {
        generators.push((0..size).map(|x| rotate_left(x, n)).collect());
    }
    GroupAction::from_generators(ActionKind::CoordinatePermutation, Some(n), size, generators)
}

/// Simultaneous row/column permutation of an `n`-vertex adjacency matrix,
/// acting on the column-major vectorization of width `n²`.
pub fn graph_isomorphism(n: usize) -> Result<GroupAction> {
    if n == 0 || n > MAX_VERTICES {
        return Err(Error::WidthOutOfRange(n, MAX_VERTICES));
    }
    let width = n * n;
    let size = 1usize << width;
    let mut perms: Vec<Vec<usize>> = Vec::new();
    if n >= 2 {
        let mut swap: Vec<usize> = (0..n).collect();
        swap.swap(0, 1);
        perms.push(swap);
    }
    if n >= 3 {
        perms.push((0..n).map(|v| (v + 1) % n).collect());
    }
    let generators = perms
        .iter()
        .map(|perm| {
            (0..size)
                .map(|x| {
                    let a = devectorize(BitString::new(width, x as u64)?)?;
                    Ok(vectorize(&a.permuted(perm)).index())
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    GroupAction::from_generators(ActionKind::GraphIsomorphism, Some(width), size, generators)
}

/// Realizes an arbitrary partition of `[0, domain_size)` as the orbit
/// partition of the group generated by one full cycle per block.
pub fn partition_action(domain_size: usize, blocks: &[Vec<usize>]) -> Result<GroupAction> {
    if domain_size == 0 || domain_size > 1 << MAX_WIDTH {
        return Err(Error::InvalidPartition(format!(
            "domain size {domain_size} outside 1..=2^{MAX_WIDTH}"
        )));
    }
    let mut owner = vec![usize::MAX; domain_size];
    for (b, block) in blocks.iter().enumerate() {
        if block.is_empty() {
            return Err(Error::InvalidPartition(format!("block {b} is empty")));
        }
        for &x in block {
            if x >= domain_size {
                return Err(Error::InvalidPartition(format!(
                    "index {x} outside domain of size {domain_size}"
                )));
            }
            if owner[x] != usize::MAX {
                return Err(Error::InvalidPartition(format!(
                    "index {x} appears in blocks {} and {b}",
                    owner[x]
                )));
            }
            owner[x] = b;
        }
    }
    if let Some(x) = owner.iter().position(|&o| o == usize::MAX) {
        return Err(Error::InvalidPartition(format!("index {x} is not covered")));
    }
    let mut gen: Vec<usize> = (0..domain_size).collect();
    for block in blocks {
        for (k, &x) in block.iter().enumerate() {
            gen[x] = block[(k + 1) % block.len()];
        }
    }
    let width = domain_size
        .is_power_of_two()
        .then(|| domain_size.trailing_zeros() as usize)
        .filter(|&w| w > 0);
    GroupAction::from_generators(ActionKind::ExplicitPartition, width, domain_size, vec![gen])
}

/// One block holding `[0, star)` and singletons for the rest of the domain.
pub fn skewed_partition(domain_size: usize, star: usize) -> Result<GroupAction> {
    if star == 0 || star > domain_size {
        return Err(Error::InvalidPartition(format!(
            "large orbit of size {star} does not fit a domain of size {domain_size}"
        )));
    }
    let mut blocks = vec![(0..star).collect::<Vec<_>>()];
    blocks.extend((star..domain_size).map(|x| vec![x]));
    partition_action(domain_size, &blocks)
}

struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    fn new(len: usize) -> Self {
        Self {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn merge(&mut self, i: usize, j: usize) {
        let (mut a, mut b) = (self.find(i), self.find(j));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitPartition {
    blocks: Vec<Vec<usize>>,
    orbit_of: Vec<usize>,
}

impl OrbitPartition {
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn orbit_of(&self, x: usize) -> usize {
        self.orbit_of[x]
    }

    pub fn orbit_map(&self) -> &[usize] {
        &self.orbit_of
    }

    pub fn orbit_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn domain_size(&self) -> usize {
        self.orbit_of.len()
    }

    pub fn same_orbit(&self, x: usize, y: usize) -> bool {
        self.orbit_of[x] == self.orbit_of[y]
    }

    /// Index of the first block of maximum size.
    pub fn largest_block(&self) -> usize {
        let max = self.blocks.iter().map(Vec::len).max().unwrap_or(0);
        self.blocks.iter().position(|b| b.len() == max).unwrap_or(0)
    }
}

/// Orbits as blocks sorted internally, ordered by their smallest member.
pub fn enumerate_orbits(action: &GroupAction) -> OrbitPartition {
    let size = action.domain_size();
    let mut sets = DisjointSets::new(size);
    for gen in action.generators() {
        for (x, &y) in gen.iter().enumerate() {
            sets.merge(x, y);
        }
    }
    let mut root_block = vec![usize::MAX; size];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut orbit_of = vec![0; size];
    // Ascending scan: the first member seen of each root is its minimum.
    for x in 0..size {
        let r = sets.find(x);
        if root_block[r] == usize::MAX {
            root_block[r] = blocks.len();
            blocks.push(Vec::new());
        }
        orbit_of[x] = root_block[r];
        blocks[root_block[r]].push(x);
    }
    OrbitPartition { blocks, orbit_of }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitStats {
    pub sizes: Vec<usize>,
    pub domain_size: usize,
    pub orbit_count: usize,
    pub max_orbit: usize,
    /// `Σ |O_k|²`, the exact numerator of `p_norm_sq`.
    pub sum_sq_sizes: u128,
    /// `Σ (|O_k| / |X|)²`.
    pub p_norm_sq: f64,
}

impl OrbitStats {
    pub fn max_orbit_fraction(&self) -> f64 {
        self.max_orbit as f64 / self.domain_size as f64
    }

    /// `‖p‖₂² ≤ max|O_k| / |X|`, i.e. `Σ|O_k|² ≤ max|O_k|·|X|`, in integers.
    pub fn discussion_inequality_holds(&self) -> bool {
        self.sum_sq_sizes <= self.max_orbit as u128 * self.domain_size as u128
    }
}

pub fn orbit_stats(p: &OrbitPartition) -> OrbitStats {
    let sizes: Vec<usize> = p.blocks().iter().map(Vec::len).collect();
    let domain_size = p.domain_size();
    let sum_sq_sizes: u128 = sizes.iter().map(|&s| (s as u128) * (s as u128)).sum();
    let denom = (domain_size as u128) * (domain_size as u128);
    OrbitStats {
        orbit_count: sizes.len(),
        max_orbit: sizes.iter().copied().max().unwrap_or(0),
        p_norm_sq: sum_sq_sizes as f64 / denom as f64,
        sum_sq_sizes,
        domain_size,
        sizes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_sizes(p: &OrbitPartition) -> Vec<usize> {
        let mut s: Vec<usize> = p.blocks().iter().map(Vec::len).collect();
        s.sort_unstable();
        s
    }

    /// Orbits by closing each point under every generator (no union-find).
    fn brute_force_orbits(action: &GroupAction) -> Vec<Vec<usize>> {
        let size = action.domain_size();
        let mut seen = vec![false; size];
        let mut out = Vec::new();
        for start in 0..size {
            if seen[start] {
                continue;
            }
            let mut orbit = vec![start];
            seen[start] = true;
            let mut k = 0;
            while k < orbit.len() {
                let x = orbit[k];
                for g in action.generators() {
                    if !seen[g[x]] {
                        seen[g[x]] = true;
                        orbit.push(g[x]);
                    }
                }
                k += 1;
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }

    #[test]
    fn cyclic_three_generator_is_rotation() {
        let a = cyclic(3).unwrap();
        assert_eq!(a.generators().len(), 1);
        assert_eq!(a.generators()[0][0b001], 0b010);
        assert_eq!(a.generators()[0][0b100], 0b001);
    }

    #[test]
    fn cyclic_orbits() {
        let p = enumerate_orbits(&cyclic(3).unwrap());
        assert_eq!(p.orbit_count(), 4);
        assert_eq!(sorted_sizes(&p), vec![1, 1, 3, 3]);
        let s = orbit_stats(&p);
        assert_eq!(s.sum_sq_sizes, 20);
        assert_eq!(s.p_norm_sq, 0.3125);
        assert_eq!(s.max_orbit, 3);

        let s = orbit_stats(&enumerate_orbits(&cyclic(4).unwrap()));
        assert_eq!(s.orbit_count, 6);
        assert_eq!(s.sum_sq_sizes, 54);
        assert_eq!(s.p_norm_sq, 54.0 / 256.0);
    }

    #[test]
    fn graph_iso_two_vertices() {
        let a = graph_isomorphism(2).unwrap();
        assert_eq!(a.generators().len(), 1);
        // Swapping vertices maps A[0][1] (position 2) to A[1][0] (position 1).
        assert_eq!(a.generators()[0][1 << 2], 1 << 1);
        assert_eq!(enumerate_orbits(&a).orbit_count(), 10);
    }

    #[test]
    fn coordinate_permutation_gives_weight_classes() {
        let p = enumerate_orbits(&coordinate_permutation(3).unwrap());
        assert_eq!(p.orbit_count(), 4);
        assert_eq!(sorted_sizes(&p), vec![1, 1, 3, 3]);
        for x in 0..8usize {
            for y in 0..8usize {
                assert_eq!(p.same_orbit(x, y), x.count_ones() == y.count_ones());
            }
        }
    }

    #[test]
    fn skewed_partition_stats() {
        let a = skewed_partition(16, 4).unwrap();
        let s = orbit_stats(&enumerate_orbits(&a));
        assert_eq!(sorted_sizes(&enumerate_orbits(&a))[12], 4);
        assert_eq!(s.orbit_count, 13);
        assert_eq!(s.sum_sq_sizes, 28);
        assert_eq!(s.p_norm_sq, 0.109375);
        assert_eq!(s.max_orbit_fraction(), 0.25);
    }

    #[test]
    fn partition_rejects_bad_blocks() {
        assert!(matches!(
            partition_action(4, &[vec![0, 1], vec![1, 2, 3]]),
            Err(Error::InvalidPartition(_))
        ));
        assert!(matches!(
            partition_action(4, &[vec![0, 1], vec![2]]),
            Err(Error::InvalidPartition(_))
        ));
        assert!(matches!(
            partition_action(4, &[vec![0, 1, 2, 4], vec![3]]),
            Err(Error::InvalidPartition(_))
        ));
    }

    #[test]
    fn non_bijective_generator_rejected() {
        let r = GroupAction::from_generators(ActionKind::ExplicitPartition, None, 3, vec![vec![0, 0, 1]]);
        assert!(matches!(r, Err(Error::NotBijection(_))));
    }

    #[test]
    fn blocks_are_closed_and_match_brute_force() {
        let mut actions = Vec::new();
        for n in 1..=4 {
            actions.push(cyclic(n).unwrap());
            actions.push(coordinate_permutation(n).unwrap());
        }
        actions.push(graph_isomorphism(1).unwrap());
        actions.push(graph_isomorphism(2).unwrap());
        actions.push(skewed_partition(16, 4).unwrap());
        for a in &actions {
            let p = enumerate_orbits(a);
            for g in a.generators() {
                for x in 0..a.domain_size() {
                    assert!(p.same_orbit(x, g[x]));
                }
            }
            assert_eq!(p.blocks(), brute_force_orbits(a).as_slice());
            let s = orbit_stats(&p);
            assert_eq!(s.sizes.iter().sum::<usize>(), a.domain_size());
            assert!(s.p_norm_sq > 0.0 && s.p_norm_sq <= 1.0);
            assert!(s.discussion_inequality_holds());
        }
    }

    #[test]
    fn block_ids_follow_smallest_member() {
        let p = enumerate_orbits(&cyclic(4).unwrap());
        let mins: Vec<usize> = p.blocks().iter().map(|b| b[0]).collect();
        let mut sorted = mins.clone();
        sorted.sort_unstable();
        assert_eq!(mins, sorted);
    }

    #[test]
    fn graph_iso_three_vertices_orbit_count() {
        // Directed graphs with loops on 3 unlabelled vertices.
        assert_eq!(enumerate_orbits(&graph_isomorphism(3).unwrap()).orbit_count(), 104);
    }
}
