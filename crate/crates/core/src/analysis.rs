//! Class-level quantities: variances, pairwise independence, orbit
//! correlations, lower-bound scalings, tolerance windows, and average
//! correlation.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::concepts::{check_enumerable, sample_with, Concept, SymmetricFunction};
use crate::error::{Error, Result};
use crate::quantum::linalg::{hermitian_eigen, CMatrix};
use crate::quantum::observable::MAX_DENSE_DIM;
use crate::quantum::{example_state, trace_distance, DensityOperator, LocalOperator, Observable};
use crate::symmetry::{OrbitPartition, OrbitStats};

/// Largest orbit count for which exact (enumerative) modes are allowed.
pub const MAX_EXACT_ORBITS: usize = 16;
/// Largest domain for exact pairwise counting.
pub const MAX_PAIRWISE_DOMAIN: usize = 1 << 12;
/// Budget on `pairs × class size` for an exhaustive census.
pub const MAX_CENSUS_WORK: u64 = 1 << 28;
/// Above this tolerance the diagonal lower bound's reduction no longer applies.
pub const DIAGONAL_BOUND_TAU: f64 = 0.096;
/// Regularity ratios at or above this are classified as regular.
pub const REGULARITY_THRESHOLD: f64 = 0.5;
/// Eigenvalues of the reference operator below this count as its kernel.
pub const SUPPORT_TOL: f64 = 1e-9;

fn mask_member(orbits: &Arc<OrbitPartition>, mask: u64) -> Concept {
    Concept::Symmetric(SymmetricFunction::from_mask(Arc::clone(orbits), mask))
}

/// `diag((−1)^y)`, the observable of the query `φ(x, y) = (−1)^y`.
pub fn sign_observable(domain_size: usize) -> Result<Observable> {
    Observable::diagonal((0..2 * domain_size).map(|k| if k & 1 == 1 { -1.0 } else { 1.0 }).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum VarianceMode {
    Exact,
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub mode: String,
    pub value: f64,
    pub mean: f64,
    pub samples: usize,
    pub standard_error: f64,
}

/// Variance of `⟨ψ_f|O|ψ_f⟩` over `f` uniform in the symmetric class.
pub fn variance_of_observable(
    orbits: &Arc<OrbitPartition>,
    observable: &Observable,
    mode: VarianceMode,
) -> Result<VarianceReport> {
    if observable.dim() != 2 * orbits.domain_size() {
        return Err(Error::DimensionMismatch(observable.dim(), 2 * orbits.domain_size()));
    }
    let diagonal = match (observable.local(), observable.identity_prefix()) {
        (LocalOperator::Diagonal(d), 1) => Some(d),
        _ => None,
    };
    // Diagonal observables are evaluated from the truth table, which keeps
    // dyadic answers exact.
    let eval = |f: &Concept| match diagonal {
        Some(d) => {
            let table = f.truth_table();
            let sum: f64 = table.iter().enumerate().map(|(x, &y)| d[2 * x + usize::from(y)]).sum();
            Ok(sum / table.len() as f64)
        }
        None => example_state(f).and_then(|psi| observable.expectation(&psi)),
    };
    match mode {
        VarianceMode::Exact => {
            check_enumerable(orbits.orbit_count(), MAX_EXACT_ORBITS)?;
            let values = (0..1u64 << orbits.orbit_count())
                .map(|mask| eval(&mask_member(orbits, mask)))
                .collect::<Result<Vec<_>>>()?;
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let value = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            Ok(VarianceReport {
                mode: "exact".into(),
                value,
                mean,
                samples: values.len(),
                standard_error: 0.0,
            })
        }
        VarianceMode::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(Error::ParameterOutOfRange("Monte Carlo needs at least 2 samples".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let values = (0..samples)
                .map(|_| eval(&Concept::Symmetric(sample_with(orbits, &mut rng))))
                .collect::<Result<Vec<_>>>()?;
            let n = samples as f64;
            let mean = values.iter().sum::<f64>() / n;
            let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
            Ok(VarianceReport {
                mode: "montecarlo".into(),
                value: m2 * n / (n - 1.0),
                mean,
                samples,
                standard_error: ((m4 - m2 * m2).max(0.0) / n).sqrt(),
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum PairMode {
    Exhaustive,
    Sampled { pairs: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseReport {
    /// Fraction of ordered pairs `(x, x′)` lying in distinct orbits.
    pub fraction: f64,
    /// `1 − ‖p‖₂²`.
    pub predicted: f64,
    pub census_pairs: usize,
    /// Every censused cross-orbit pair has `(f(x), f(x′))` exactly uniform.
    pub census_uniform: bool,
    /// Largest `|count/|C| − ¼|` seen in the census.
    pub census_max_deviation: f64,
}

fn census_pair(tables: &[Vec<bool>], x: usize, y: usize) -> f64 {
    let mut counts = [0usize; 4];
    for t in tables {
        counts[usize::from(t[x]) * 2 + usize::from(t[y])] += 1;
    }
    let total = tables.len() as f64;
    counts
        .iter()
        .map(|&c| (c as f64 / total - 0.25).abs())
        .fold(0.0, f64::max)
}

pub fn pairwise_independence(orbits: &Arc<OrbitPartition>, mode: PairMode) -> Result<PairwiseReport> {
    let size = orbits.domain_size();
    if size > MAX_PAIRWISE_DOMAIN {
        return Err(Error::ParameterOutOfRange(format!(
            "pairwise counting supports |X| <= {MAX_PAIRWISE_DOMAIN}, got {size}"
        )));
    }
    check_enumerable(orbits.orbit_count(), MAX_EXACT_ORBITS)?;
    let map = orbits.orbit_map();
    let mut distinct = 0u64;
    for &a in map {
        distinct += map.iter().filter(|&&b| b != a).count() as u64;
    }
    let fraction = distinct as f64 / (size as f64 * size as f64);
    let stats = crate::symmetry::orbit_stats(orbits);

    let tables: Vec<Vec<bool>> = (0..1u64 << orbits.orbit_count())
        .map(|mask| mask_member(orbits, mask).truth_table())
        .collect();
    let mut census_pairs = 0;
    let mut worst = 0.0f64;
    match mode {
        PairMode::Exhaustive => {
            if distinct.saturating_mul(tables.len() as u64) > MAX_CENSUS_WORK {
                return Err(Error::ParameterOutOfRange(
                    "exhaustive census too large; use sampled mode".into(),
                ));
            }
            for x in 0..size {
                for y in 0..size {
                    if map[x] != map[y] {
                        worst = worst.max(census_pair(&tables, x, y));
                        census_pairs += 1;
                    }
                }
            }
        }
        PairMode::Sampled { pairs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if distinct > 0 {
                while census_pairs < pairs {
                    let (x, y) = (rng.gen_range(0..size), rng.gen_range(0..size));
                    if map[x] != map[y] {
                        worst = worst.max(census_pair(&tables, x, y));
                        census_pairs += 1;
                    }
                }
            }
        }
    }
    Ok(PairwiseReport {
        fraction,
        predicted: 1.0 - stats.p_norm_sq,
        census_pairs,
        census_uniform: worst == 0.0,
        census_max_deviation: worst,
    })
}

/// `E_f[(−1)^{f(x) + f(x′)}]` over the full class.
pub fn orbit_correlation(orbits: &Arc<OrbitPartition>, x: usize, y: usize) -> Result<f64> {
    check_enumerable(orbits.orbit_count(), crate::concepts::MAX_ENUMERABLE_ORBITS)?;
    let size = orbits.domain_size();
    for v in [x, y] {
        if v >= size {
            return Err(Error::ParameterOutOfRange(format!("point {v} outside domain of size {size}")));
        }
    }
    let (a, b) = (orbits.orbit_of(x), orbits.orbit_of(y));
    let total = 1u64 << orbits.orbit_count();
    let sum: i64 = (0..total)
        .map(|mask| if ((mask >> a) ^ (mask >> b)) & 1 == 0 { 1 } else { -1 })
        .sum();
    Ok(sum as f64 / total as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub tau: f64,
    pub stats: OrbitStats,
    /// `τ² / ‖p‖₂²`
    pub sq_bound: f64,
    /// `τ²·|X| / max|O_k|`
    pub qsq_bound: f64,
    /// `‖p‖₂²·|X| / max|O_k|`
    pub regularity_ratio: f64,
    pub classification: String,
    pub warning: Option<String>,
}

pub fn lower_bounds(tau: f64, stats: &OrbitStats) -> Result<BoundReport> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::InvalidTolerance(tau));
    }
    let size = stats.domain_size as f64;
    let max = stats.max_orbit as f64;
    let ratio = stats.p_norm_sq * size / max;
    Ok(BoundReport {
        tau,
        stats: stats.clone(),
        sq_bound: tau * tau / stats.p_norm_sq,
        qsq_bound: tau * tau * size / max,
        regularity_ratio: ratio,
        classification: if ratio >= REGULARITY_THRESHOLD { "regular" } else { "skewed" }.into(),
        warning: (tau >= DIAGONAL_BOUND_TAU).then(|| {
            format!("tau >= {DIAGONAL_BOUND_TAU}: the diagonal-observable bound's reduction does not apply")
        }),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceWindow {
    pub zeta: f64,
    /// `2ζ`
    pub low: f64,
    /// `√(2ζ − ζ²)`
    pub high: f64,
    pub valid: bool,
}

pub fn tolerance_window(zeta: f64) -> Result<ToleranceWindow> {
    if !(zeta > 0.0 && zeta < 1.0) {
        return Err(Error::ParameterOutOfRange(format!("zeta {zeta} outside (0, 1)")));
    }
    Ok(ToleranceWindow {
        zeta,
        low: 2.0 * zeta,
        high: (2.0 * zeta - zeta * zeta).sqrt(),
        // 2ζ < √(2ζ − ζ²) ⇔ 5ζ² < 2ζ ⇔ ζ < 2/5
        valid: 5.0 * zeta < 2.0,
    })
}

/// Support projector and pseudo-inverse of a density operator.
fn pseudo_inverse(sigma: &DensityOperator) -> (CMatrix, CMatrix) {
    let (values, vectors) = hermitian_eigen(sigma.matrix());
    let dim = sigma.dim();
    let mut proj = CMatrix::zeros(dim, dim);
    let mut inv = CMatrix::zeros(dim, dim);
    for (k, &lambda) in values.iter().enumerate() {
        if lambda <= SUPPORT_TOL {
            continue;
        }
        let v = vectors.column(k);
        let p = v * v.adjoint();
        inv += &p * C64::new(1.0 / lambda, 0.0);
        proj += p;
    }
    (proj, inv)
}

/// `γ = |C′|^{-2} Σ_{i,j} |Tr[ρ̂_i ρ̂_j σ]|` with `ρ̂ = ρσ⁺ − Π_σ`.
pub fn average_correlation(family: &[DensityOperator], sigma: &DensityOperator) -> Result<f64> {
    if family.is_empty() {
        return Err(Error::ParameterOutOfRange("empty family".into()));
    }
    let (proj, inv) = pseudo_inverse(sigma);
    let mut hats = Vec::with_capacity(family.len());
    for rho in family {
        if rho.dim() != sigma.dim() {
            return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
        }
        let inside = (&proj * rho.matrix()).trace().re;
        let leak = 1.0 - inside;
        if leak > SUPPORT_TOL {
            return Err(Error::SupportLeakage(leak));
        }
        hats.push(rho.matrix() * &inv - &proj);
    }
    let mut total = 0.0;
    for a in &hats {
        let a_sigma: Vec<CMatrix> = vec![a * sigma.matrix()];
        for b in &hats {
            total += (b * &a_sigma[0]).trace().norm();
        }
    }
    Ok(total / (family.len() * family.len()) as f64)
}

/// `σ = E_f |ψ_f⟩⟨ψ_f|` over the symmetric class, in closed form.
pub fn class_mixture(orbits: &OrbitPartition) -> Result<DensityOperator> {
    let size = orbits.domain_size();
    let dim = 2 * size;
    if dim > MAX_DENSE_DIM {
        return Err(Error::DimensionOverflow { dim, cap: MAX_DENSE_DIM });
    }
    let scale = 1.0 / size as f64;
    let m = CMatrix::from_fn(dim, dim, |i, j| {
        let (x, y) = (i / 2, i % 2);
        let (u, v) = (j / 2, j % 2);
        let p = if orbits.same_orbit(x, u) {
            if y == v { 0.5 } else { 0.0 }
        } else {
            0.25
        };
        C64::new(p * scale, 0.0)
    });
    DensityOperator::new(m)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDistanceReport {
    pub minimum: f64,
    pub bound: f64,
    pub holds: bool,
    pub members_checked: usize,
    pub sampled: bool,
}

/// `1 − √½`
pub fn trace_distance_floor() -> f64 {
    1.0 - std::f64::consts::FRAC_1_SQRT_2
}

/// `min_f d_tr(|ψ_f⟩⟨ψ_f|, σ)`; `samples` switches to seeded sampling.
pub fn min_trace_distance_check(
    orbits: &Arc<OrbitPartition>,
    samples: Option<(usize, u64)>,
) -> Result<TraceDistanceReport> {
    if orbits.orbit_count() < 2 {
        return Err(Error::ParameterOutOfRange("needs at least two orbits".into()));
    }
    let sigma = class_mixture(orbits)?;
    let distance = |f: &Concept| -> Result<f64> {
        trace_distance(&DensityOperator::pure(&example_state(f)?), &sigma)
    };
    let (minimum, members_checked, sampled) = match samples {
        None => {
            check_enumerable(orbits.orbit_count(), MAX_EXACT_ORBITS)?;
            let mut min = f64::INFINITY;
            for mask in 0..1u64 << orbits.orbit_count() {
                min = min.min(distance(&mask_member(orbits, mask))?);
            }
            (min, 1usize << orbits.orbit_count(), false)
        }
        Some((count, seed)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut min = f64::INFINITY;
            for _ in 0..count {
                min = min.min(distance(&Concept::Symmetric(sample_with(orbits, &mut rng)))?);
            }
            (min, count, true)
        }
    };
    let bound = trace_distance_floor();
    Ok(TraceDistanceReport {
        minimum,
        bound,
        holds: minimum >= bound - 1e-9,
        members_checked,
        sampled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{mixture_density, tight_variance_observable, StateVector};
    use crate::symmetry::{
        coordinate_permutation, cyclic, enumerate_orbits, graph_isomorphism, orbit_stats, partition_action,
        skewed_partition, GroupAction,
    };
    use proptest::prelude::*;

    fn orbits(a: &GroupAction) -> Arc<OrbitPartition> {
        Arc::new(enumerate_orbits(a))
    }

    fn singletons(size: usize) -> Arc<OrbitPartition> {
        let blocks: Vec<Vec<usize>> = (0..size).map(|x| vec![x]).collect();
        orbits(&partition_action(size, &blocks).unwrap())
    }

    #[test]
    fn sign_variance_cyclic_three() {
        let o = orbits(&cyclic(3).unwrap());
        let r = variance_of_observable(&o, &sign_observable(8).unwrap(), VarianceMode::Exact).unwrap();
        assert_eq!(r.value, 0.3125);
        assert_eq!(r.standard_error, 0.0);
    }

    #[test]
    fn identity_has_zero_variance() {
        let o = orbits(&cyclic(3).unwrap());
        let id = Observable::diagonal(vec![1.0; 16]).unwrap();
        let r = variance_of_observable(&o, &id, VarianceMode::Exact).unwrap();
        assert!(r.value.abs() < 1e-15);
    }

    #[test]
    fn tight_variance_exact_on_skewed() {
        let o = orbits(&skewed_partition(16, 4).unwrap());
        let obs = tight_variance_observable(&o).unwrap();
        let r = variance_of_observable(&o, &obs, VarianceMode::Exact).unwrap();
        assert!((r.value - 0.25).abs() < 1e-12, "{}", r.value);
        let c = orbits(&cyclic(3).unwrap());
        let r = variance_of_observable(&c, &tight_variance_observable(&c).unwrap(), VarianceMode::Exact).unwrap();
        assert!((r.value - 0.375).abs() < 1e-12);
    }

    #[test]
    fn exact_mode_refuses_large_classes() {
        let o = singletons(20);
        assert!(matches!(
            variance_of_observable(&o, &sign_observable(20).unwrap(), VarianceMode::Exact),
            Err(Error::ClassTooLarge { .. })
        ));
    }

    #[test]
    fn pairwise_examples() {
        let o = orbits(&cyclic(3).unwrap());
        let r = pairwise_independence(&o, PairMode::Exhaustive).unwrap();
        assert_eq!(r.fraction, 0.6875);
        assert!((r.fraction - r.predicted).abs() <= 1e-15);
        assert!(r.census_uniform);
        let s = singletons(8);
        let r = pairwise_independence(&s, PairMode::Sampled { pairs: 100, seed: 1 }).unwrap();
        assert_eq!(r.fraction, 1.0 - 1.0 / 8.0);
        assert_eq!(r.census_pairs, 100);
    }

    #[test]
    fn orbit_correlation_examples() {
        let o = orbits(&cyclic(3).unwrap());
        assert_eq!(orbit_correlation(&o, 0b001, 0b100).unwrap(), 1.0);
        assert_eq!(orbit_correlation(&o, 0b001, 0b011).unwrap(), 0.0);
        assert_eq!(orbit_correlation(&o, 5, 5).unwrap(), 1.0);
    }

    #[test]
    fn bound_examples() {
        let s = orbit_stats(&enumerate_orbits(&cyclic(3).unwrap()));
        let r = lower_bounds(0.05, &s).unwrap();
        assert!((r.sq_bound - 0.008).abs() < 1e-15);
        assert!((r.qsq_bound - 0.0025 * 8.0 / 3.0).abs() < 1e-15);
        assert!((r.regularity_ratio - 0.3125 * 8.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.classification, "regular");
        assert!(r.warning.is_none());
        assert!(lower_bounds(0.2, &s).unwrap().warning.is_some());
        let k = orbit_stats(&enumerate_orbits(&skewed_partition(16, 4).unwrap()));
        let r = lower_bounds(0.05, &k).unwrap();
        assert_eq!(r.regularity_ratio, 0.4375);
        assert_eq!(r.classification, "skewed");
        let big = orbit_stats(&enumerate_orbits(&skewed_partition(1 << 12, 1 << 6).unwrap()));
        assert!(lower_bounds(0.05, &big).unwrap().regularity_ratio < 0.05);
        assert!(lower_bounds(0.0, &s).is_err());
    }

    #[test]
    fn window_examples() {
        let w = tolerance_window(0.2).unwrap();
        assert_eq!((w.low, w.high, w.valid), (0.4, 0.6, true));
        let w = tolerance_window(0.4).unwrap();
        assert_eq!((w.low, w.high, w.valid), (0.8, 0.8, false));
        let w = tolerance_window(1e-6).unwrap();
        assert!(w.valid && w.low < w.high);
        assert!(tolerance_window(0.0).is_err());
        assert!(tolerance_window(1.0).is_err());
    }

    #[test]
    fn average_correlation_examples() {
        let zero = StateVector::from_real(&[1.0, 0.0]).unwrap();
        let one = StateVector::from_real(&[0.0, 1.0]).unwrap();
        let sigma = mixture_density(&[zero.clone(), one.clone()]).unwrap();
        let pair = [DensityOperator::pure(&zero), DensityOperator::pure(&one)];
        assert!((average_correlation(&pair, &sigma).unwrap() - 1.0).abs() < 1e-12);
        assert!((average_correlation(&pair[..1], &sigma).unwrap() - 1.0).abs() < 1e-12);
        assert!(average_correlation(&[sigma.clone()], &sigma).unwrap().abs() < 1e-12);
        let leak = DensityOperator::pure(&one);
        assert!(matches!(
            average_correlation(&[leak], &DensityOperator::pure(&zero)),
            Err(Error::SupportLeakage(_))
        ));
    }

    #[test]
    fn class_mixture_matches_enumeration() {
        let o = orbits(&cyclic(3).unwrap());
        let states: Vec<StateVector> = (0..16)
            .map(|mask| example_state(&mask_member(&o, mask)).unwrap())
            .collect();
        let direct = mixture_density(&states).unwrap();
        let closed = class_mixture(&o).unwrap();
        assert!((direct.matrix() - closed.matrix()).norm() < 1e-14);
    }

    #[test]
    fn min_trace_distance_examples() {
        let r = min_trace_distance_check(&orbits(&cyclic(3).unwrap()), None).unwrap();
        assert!(r.holds && r.minimum >= 0.2928);
        let r = min_trace_distance_check(&singletons(16), Some((1000, 5))).unwrap();
        assert!(r.holds && r.sampled);
        assert!(min_trace_distance_check(&singletons(1), None).is_err());
    }

    #[test]
    fn monte_carlo_coverage() {
        let o = orbits(&cyclic(3).unwrap());
        let obs = sign_observable(8).unwrap();
        let covered = (0..100)
            .filter(|&seed| {
                let r = variance_of_observable(&o, &obs, VarianceMode::MonteCarlo { samples: 400, seed }).unwrap();
                (r.value - 0.3125).abs() <= 3.0 * r.standard_error
            })
            .count();
        assert!(covered >= 95, "{covered}/100");
    }

    #[test]
    fn diagonal_variance_equals_p_norm_for_small_actions() {
        let mut actions = vec![graph_isomorphism(2).unwrap()];
        for n in 1..=4 {
            actions.push(cyclic(n).unwrap());
            actions.push(coordinate_permutation(n).unwrap());
        }
        for a in &actions {
            let o = orbits(a);
            if o.orbit_count() > 12 {
                continue;
            }
            let stats = orbit_stats(&o);
            let r = variance_of_observable(&o, &sign_observable(o.domain_size()).unwrap(), VarianceMode::Exact).unwrap();
            assert!((r.value - stats.p_norm_sq).abs() < 1e-15, "{:?}", a.kind());
        }
    }

    proptest! {
        #[test]
        fn discussion_inequality(sizes in prop::collection::vec(1usize..12, 1..10)) {
            let mut blocks = Vec::new();
            let mut next = 0;
            for s in sizes {
                blocks.push((next..next + s).collect::<Vec<_>>());
                next += s;
            }
            let stats = orbit_stats(&enumerate_orbits(&partition_action(next, &blocks).unwrap()));
            prop_assert!(stats.discussion_inequality_holds());
            let r = lower_bounds(0.05, &stats).unwrap();
            prop_assert!(r.regularity_ratio <= 1.0 + 1e-12);
        }

        #[test]
        fn window_validity_matches_ordering(zeta in 0.001f64..0.999) {
            let w = tolerance_window(zeta).unwrap();
            if (zeta - 0.4).abs() > 1e-9 {
                prop_assert_eq!(w.valid, w.low < w.high);
            }
        }
    }
}
