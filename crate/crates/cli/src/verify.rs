//! The `verify` suite: one check per headline property, each timed.

use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use symsq::analysis::{
    min_trace_distance_check, orbit_correlation, pairwise_independence, sign_observable, tolerance_window,
    variance_of_observable, PairMode, VarianceMode,
};
use symsq::bitdomain::walsh_spectrum;
use symsq::concepts::{make_disjoint_class, Concept};
use symsq::learners::{composed_parity_sweep, ideal_parity_sweep, sq_baseline, sq_battery, tolerance_experiment};
use symsq::oracles::{random_stat_battery, validity_audit, AdversaryKind, Query, Target};
use symsq::quantum::linalg::{trace_norm_hermitian, CMatrix};
use symsq::quantum::{
    example_state, fourier_mass_observable, helstrom_observable, helstrom_pure, phase_kickback_decompose,
    tight_variance_observable, trace_distance, DensityOperator,
};
use symsq::symmetry::{
    coordinate_permutation, cyclic, enumerate_orbits, graph_isomorphism, orbit_stats, skewed_partition, GroupAction,
    OrbitPartition,
};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub seconds: f64,
    pub detail: String,
}

type Outcome = anyhow::Result<(bool, String)>;

fn timed(name: &str, limit: Option<f64>, f: impl FnOnce() -> Outcome) -> Check {
    let start = Instant::now();
    let result = f();
    let seconds = start.elapsed().as_secs_f64();
    let (mut passed, mut detail) = match result {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e:#}")),
    };
    if let Some(limit) = limit {
        if seconds >= limit {
            passed = false;
            detail = format!("{detail}; took {seconds:.2}s (limit {limit}s)");
        }
    }
    eprintln!("{} {name}: {detail}", if passed { "PASS" } else { "FAIL" });
    Check {
        name: name.into(),
        passed,
        seconds,
        detail,
    }
}

fn orbits(a: &GroupAction) -> Arc<OrbitPartition> {
    Arc::new(enumerate_orbits(a))
}

/// Built-in actions at `n ≤ 3` whose class can be enumerated.
fn small_actions() -> anyhow::Result<Vec<(String, GroupAction)>> {
    let mut out = Vec::new();
    for n in 1..=3 {
        out.push((format!("cyclic n={n}"), cyclic(n)?));
        out.push((format!("perm n={n}"), coordinate_permutation(n)?));
    }
    for n in 1..=2 {
        out.push((format!("graphiso n={n}"), graph_isomorphism(n)?));
    }
    Ok(out)
}

fn sorted_sizes(p: &OrbitPartition) -> Vec<usize> {
    let mut s: Vec<usize> = p.blocks().iter().map(Vec::len).collect();
    s.sort_unstable();
    s
}

fn orbit_machinery() -> Outcome {
    let c3 = orbit_stats(&enumerate_orbits(&cyclic(3)?));
    let c4 = orbit_stats(&enumerate_orbits(&cyclic(4)?));
    let g2 = enumerate_orbits(&graph_isomorphism(2)?);
    let ok = sorted_sizes(&enumerate_orbits(&cyclic(3)?)) == [1, 1, 3, 3]
        && c3.p_norm_sq == 0.3125
        && c4.orbit_count == 6
        && c4.sum_sq_sizes == 54
        && g2.orbit_count() == 10;
    Ok((
        ok,
        format!(
            "cyclic3 sizes {:?} p={}, cyclic4 {} orbits {}/256, graphiso2 {} orbits",
            c3.sizes,
            c3.p_norm_sq,
            c4.orbit_count,
            c4.sum_sq_sizes,
            g2.orbit_count()
        ),
    ))
}

fn correlation_exactness() -> Outcome {
    let mut pairs = 0usize;
    for (name, action) in small_actions()? {
        let o = orbits(&action);
        for x in 0..o.domain_size() {
            for y in 0..o.domain_size() {
                let c = orbit_correlation(&o, x, y)?;
                let want = if o.same_orbit(x, y) { 1.0 } else { 0.0 };
                if c != want {
                    return Ok((false, format!("{name}: correlation({x},{y}) = {c}, expected {want}")));
                }
                pairs += 1;
            }
        }
    }
    Ok((true, format!("{pairs} pairs exactly 0/1")))
}

fn pairwise() -> Outcome {
    let mut worst = 0.0f64;
    for (name, action) in small_actions()? {
        let r = pairwise_independence(&orbits(&action), PairMode::Exhaustive)?;
        worst = worst.max((r.fraction - r.predicted).abs());
        if (r.fraction - r.predicted).abs() > 1e-15 || !r.census_uniform {
            return Ok((false, format!("{name}: fraction {} vs {}", r.fraction, r.predicted)));
        }
    }
    Ok((true, format!("max |fraction - (1 - p)| = {worst:e}; census uniform")))
}

fn all_tables(m: usize) -> impl Iterator<Item = Vec<bool>> {
    let len = 1usize << m;
    (0..1u64 << len).map(move |mask| (0..len).map(|x| (mask >> x) & 1 == 1).collect())
}

fn phase_kickback() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for m in 1..=3 {
        for t in all_tables(m) {
            worst = worst.max(phase_kickback_decompose(&Concept::Table(t))?.residual);
            count += 1;
        }
    }
    Ok((worst <= 1e-12, format!("{count} functions, max residual {worst:e}")))
}

fn diagonal_variance(seed: u64) -> Outcome {
    for (name, action) in small_actions()? {
        let o = orbits(&action);
        let p = orbit_stats(&o).p_norm_sq;
        let r = variance_of_observable(&o, &sign_observable(o.domain_size())?, VarianceMode::Exact)?;
        if r.value != p {
            return Ok((false, format!("{name}: exact {} vs {p}", r.value)));
        }
    }
    let o = orbits(&cyclic(3)?);
    let mc = variance_of_observable(
        &o,
        &sign_observable(8)?,
        VarianceMode::MonteCarlo { samples: 100_000, seed },
    )?;
    let rel = (mc.value - 0.3125).abs() / 0.3125;
    Ok((rel < 0.05, format!("exact = p_norm_sq on all; cyclic3 MC {} (rel err {rel:.4})", mc.value)))
}

fn tight_variance(seed: u64) -> Outcome {
    let o = orbits(&skewed_partition(16, 4)?);
    let obs = tight_variance_observable(&o)?;
    let mc = variance_of_observable(&o, &obs, VarianceMode::MonteCarlo { samples: 100_000, seed })?;
    let rel = (mc.value - 0.25).abs() / 0.25;
    let mut actions = small_actions()?;
    actions.push(("graphiso n=3".into(), graph_isomorphism(3)?));
    actions.push(("cyclic n=4".into(), cyclic(4)?));
    actions.push(("skewed 16/4".into(), skewed_partition(16, 4)?));
    let inequality = actions
        .iter()
        .all(|(_, a)| orbit_stats(&enumerate_orbits(a)).discussion_inequality_holds());
    Ok((
        rel < 0.05 && inequality,
        format!("skewed MC {} (rel err {rel:.4}); inequality on {} actions: {inequality}", mc.value, actions.len()),
    ))
}

fn fourier_mass() -> Outcome {
    let mut worst = 0.0f64;
    let mut evaluations = 0usize;
    for m in 1..=3 {
        let len = 1usize << m;
        let queries = (1u64..1 << len)
            .map(|set| {
                let chars: Vec<usize> = (0..len).filter(|s| (set >> s) & 1 == 1).collect();
                fourier_mass_observable(&chars, m).map(|q| (chars, q))
            })
            .collect::<symsq::Result<Vec<_>>>()?;
        for t in all_tables(m) {
            let spectrum = walsh_spectrum(&t)?;
            let psi = example_state(&Concept::Table(t))?;
            for (chars, q) in &queries {
                let want: f64 = 0.5 * chars.iter().map(|&s| spectrum[s] * spectrum[s]).sum::<f64>();
                worst = worst.max((q.observable.expectation(&psi)? - want).abs());
                evaluations += 1;
            }
        }
    }
    Ok((worst <= 1e-12, format!("{evaluations} (f, T) pairs, max error {worst:e} against half the mass")))
}

fn ideal_parity() -> Outcome {
    let start = Instant::now();
    let mut runs = 0;
    for m in [3, 4] {
        for kind in [AdversaryKind::Grid, AdversaryKind::Null, AdversaryKind::Worst] {
            for r in ideal_parity_sweep(m, 0.2, kind)? {
                if r.success != Some(true) || r.query_count != m {
                    return Ok((false, format!("m={m} {kind:?}: {:?} in {} queries", r.recovered, r.query_count)));
                }
                runs += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((secs < 5.0, format!("{runs} runs exact with m queries each")))
}

fn composed_parity() -> Outcome {
    let mut detail = Vec::new();
    for n in [2, 3] {
        let a = composed_parity_sweep(n)?;
        let b = composed_parity_sweep(n)?;
        let drift = a
            .rows
            .iter()
            .zip(&b.rows)
            .flat_map(|(x, y)| x.expectations.iter().zip(&y.expectations).map(|(p, q)| (p - q).abs()))
            .fold(0.0f64, f64::max);
        if drift > 1e-12 {
            return Ok((false, format!("n={n}: run-to-run drift {drift:e}")));
        }
        detail.push(format!(
            "n={n}: min gap {:.3e}, {}/{} recovered",
            a.min_gap,
            a.successes,
            a.rows.len()
        ));
    }
    Ok((true, detail.join("; ")))
}

fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> anyhow::Result<DensityOperator> {
    let a = CMatrix::from_fn(dim, dim, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let rank = rng.gen_range(1..=dim);
    let a = a.columns(0, rank).into_owned();
    let m = &a * a.adjoint();
    let tr = m.trace();
    Ok(DensityOperator::new(m / tr)?)
}

fn helstrom(seed: u64) -> Outcome {
    let class = make_disjoint_class(20, 4, 0.2)?;
    let f = example_state(&class.member(0))?;
    let zero = example_state(&class.zero())?;
    let o = helstrom_pure(&f, &zero)?;
    let gap = o.expectation(&f)? - o.expectation(&zero)?;
    let d = trace_distance(&DensityOperator::pure(&f), &DensityOperator::pure(&zero))?;
    let pair_ok = (gap - 1.2).abs() < 1e-12 && (d - 0.6).abs() < 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let dim = rng.gen_range(2..=16);
        let rho = random_density(&mut rng, dim)?;
        let sigma = random_density(&mut rng, dim)?;
        let o = helstrom_observable(&rho, &sigma)?;
        let g = o.expectation_density(&rho)? - o.expectation_density(&sigma)?;
        worst = worst.max((g - trace_norm_hermitian(&(rho.matrix() - sigma.matrix()))).abs());
    }
    Ok((
        pair_ok && worst <= 1e-9,
        format!("pure pair d_tr {d}, gap {gap}; 100 random pairs max |gap - trace norm| {worst:e}"),
    ))
}

fn tolerance_separation(seed: u64) -> Outcome {
    let class = make_disjoint_class(20, 4, 0.2)?;
    let zero = Target::from_concept(&class.zero())?;
    let targets = class
        .members()
        .iter()
        .map(Target::from_concept)
        .collect::<symsq::Result<Vec<_>>>()?;
    let battery: Vec<Query> = random_stat_battery(20, 50, seed).into_iter().map(Query::Stat).collect();
    let audit = validity_audit(AdversaryKind::Null, &zero, &targets, &battery, 0.5)?;
    let baseline = sq_baseline(&class, 0.5, AdversaryKind::Null, &sq_battery(&class, 46, seed)?)?;
    let experiment = tolerance_experiment(&class, 0.5, AdversaryKind::Null, 46, seed)?;
    let w = tolerance_window(0.2)?;
    let edge = tolerance_window(0.4)?;
    let ok = audit.all_sound
        && audit.target_independent
        && audit.fallbacks == 0
        && baseline.accuracy == 0.25
        && experiment.all_identified
        && experiment.max_queries <= 4
        && (w.low, w.high, w.valid) == (0.4, 0.6, true)
        && !edge.valid;
    Ok((
        ok,
        format!(
            "audit sound={} independent={}; SQ accuracy {}; tournament all identified={} max queries {}; window ({}, {}); zeta=0.4 valid={}",
            audit.all_sound,
            audit.target_independent,
            baseline.accuracy,
            experiment.all_identified,
            experiment.max_queries,
            w.low,
            w.high,
            edge.valid
        ),
    ))
}

fn min_trace_distance() -> Outcome {
    let r = min_trace_distance_check(&orbits(&cyclic(3)?), None)?;
    Ok((r.holds, format!("min over {} members {} >= {}", r.members_checked, r.minimum, r.bound)))
}

pub fn run_all(seed: u64) -> Vec<Check> {
    vec![
        timed("orbit-machinery", Some(1.0), orbit_machinery),
        timed("orbit-correlation", Some(10.0), correlation_exactness),
        timed("pairwise-independence", None, pairwise),
        timed("phase-kickback", None, phase_kickback),
        timed("diagonal-variance", None, || diagonal_variance(seed)),
        timed("tight-variance", None, || tight_variance(seed)),
        timed("fourier-mass", None, fourier_mass),
        timed("ideal-parity", None, ideal_parity),
        timed("composed-parity", None, composed_parity),
        timed("helstrom", None, || helstrom(seed)),
        timed("tolerance-separation", None, || tolerance_separation(seed)),
        timed("min-trace-distance", None, min_trace_distance),
    ]
}
