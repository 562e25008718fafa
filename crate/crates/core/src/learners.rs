//! Learners that see their target only through an [`OracleSession`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::tolerance_window;
use crate::concepts::{Concept, DisjointSupportClass, ParityConcept};
use crate::error::{Error, Result};
use crate::oracles::{
    random_stat_battery, AdversaryKind, OracleSession, QueryRecord, StatQuery, Target,
};
use crate::quantum::{
    example_state, helstrom_observable, helstrom_pure, ideal_parity_state, influence_observable_composed,
    influence_observable_ideal, mixture_density, parity_table, prep_extend, DensityOperator, Observable,
    StateVector,
};

/// Decision threshold for influence queries: the midpoint of the measured
/// expectations `{0, ½}`.
pub const INFLUENCE_THRESHOLD: f64 = 0.25;
/// Rounding allowance when comparing an answer against `anchor ± τ`.
pub const DECISION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerReport {
    pub learner: String,
    /// Candidate index, or the `Ŝ` index for parity learners.
    pub recovered: Option<usize>,
    pub query_count: usize,
    pub expectations: Vec<f64>,
    /// Filled in by [`LearnerReport::graded`] once the truth is known.
    pub success: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub group_steps: Vec<GroupStep>,
    pub log: Vec<QueryRecord>,
}

impl LearnerReport {
    fn from_session(learner: &str, recovered: Option<usize>, session: &OracleSession) -> Self {
        Self {
            learner: learner.into(),
            recovered,
            query_count: session.query_count(),
            expectations: session.log().iter().map(|r| r.answer).collect(),
            success: None,
            group_steps: Vec::new(),
            log: session.log().to_vec(),
        }
    }

    pub fn graded(mut self, truth: usize) -> Self {
        self.success = Some(self.recovered == Some(truth));
        self
    }
}

fn bits_to_index(bits: &[bool]) -> usize {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (i, &b)| acc | (usize::from(b) << i))
}

/// Session on the uniform-input parity state `Σ_c |c⟩|Ŝ·c⟩`.
pub fn ideal_parity_session(s_hat: &[bool], tau: f64, kind: AdversaryKind) -> Result<OracleSession> {
    let target = Target::from_concept(&Concept::Table(parity_table(s_hat)))?;
    let reference = Target::from_concept(&Concept::Table(parity_table(&vec![false; s_hat.len()])))?;
    OracleSession::new(target, tau, kind.build(&reference))
}

/// One influence query per coordinate; `Ŝ_i = 1` iff the answer exceeds ¼.
pub fn learn_parity_ideal(session: &mut OracleSession, m: usize) -> Result<LearnerReport> {
    let tau = session.tau();
    if tau >= INFLUENCE_THRESHOLD {
        return Err(Error::ToleranceTooLarge {
            tau,
            reason: format!(
                "influence answers 0 and 1/2 are only separated when tau < {INFLUENCE_THRESHOLD}"
            ),
        });
    }
    let mut bits = Vec::with_capacity(m);
    for i in 0..m {
        let answer = session.qstat_query(&format!("influence-{i}"), &influence_observable_ideal(i, m)?)?;
        bits.push(answer > INFLUENCE_THRESHOLD);
    }
    Ok(LearnerReport::from_session(
        "parity-ideal",
        Some(bits_to_index(&bits)),
        session,
    ))
}

/// Session on the composed state `|g′_S⟩` over `n`-vertex graphs.
pub fn composed_parity_session(g: &ParityConcept, tau: f64, kind: AdversaryKind) -> Result<OracleSession> {
    let target = Target::State(prep_extend(g)?);
    let reference = Target::State(prep_extend(&ParityConcept::from_index(g.n(), 0)?)?);
    OracleSession::new(target, tau, kind.build(&reference))
}

/// `n + 1` composed influence queries, thresholded at ¼.
pub fn learn_parity_composed(session: &mut OracleSession, n: usize) -> Result<LearnerReport> {
    let mut bits = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let answer = session.qstat_query(&format!("composed-influence-{i}"), &influence_observable_composed(i, n)?)?;
        bits.push(answer > INFLUENCE_THRESHOLD);
    }
    Ok(LearnerReport::from_session(
        "parity-composed",
        Some(bits_to_index(&bits)),
        session,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComposedSweepRow {
    pub s_index: usize,
    pub s_hat: Vec<bool>,
    pub expectations: Vec<f64>,
    pub guess: usize,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComposedSweep {
    pub n: usize,
    pub rows: Vec<ComposedSweepRow>,
    /// Per coordinate `i`: min over `Ŝ` of `|E_i(Ŝ ∪ {i}) − E_i(Ŝ ∖ {i})|`.
    pub coordinate_gaps: Vec<f64>,
    pub min_gap: f64,
    pub successes: usize,
}

/// Runs the composed learner on every `Ŝ ∈ {0,1}^{n+1}` with exact answers.
pub fn composed_parity_sweep(n: usize) -> Result<ComposedSweep> {
    let observables = (0..=n)
        .map(|i| influence_observable_composed(i, n))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(1 << (n + 1));
    for s in 0..1usize << (n + 1) {
        let g = ParityConcept::from_index(n, s)?;
        let state = prep_extend(&g)?;
        let expectations = observables
            .iter()
            .map(|o| o.expectation(&state))
            .collect::<Result<Vec<_>>>()?;
        let guess = bits_to_index(&expectations.iter().map(|&e| e > INFLUENCE_THRESHOLD).collect::<Vec<_>>());
        rows.push(ComposedSweepRow {
            s_index: s,
            s_hat: g.s_hat().to_vec(),
            expectations,
            guess,
            success: guess == s,
        });
    }
    let coordinate_gaps: Vec<f64> = (0..=n)
        .map(|i| {
            rows.iter()
                .filter(|r| (r.s_index >> i) & 1 == 0)
                .map(|r| (rows[r.s_index | (1 << i)].expectations[i] - r.expectations[i]).abs())
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let min_gap = coordinate_gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let successes = rows.iter().filter(|r| r.success).count();
    Ok(ComposedSweep {
        n,
        rows,
        coordinate_gaps,
        min_gap,
        successes,
    })
}

/// Rejects tolerances outside the open window `(2ζ, √(2ζ − ζ²))`.
pub fn check_tournament_tolerance(zeta: f64, tau: f64) -> Result<()> {
    let window = tolerance_window(zeta)?;
    if tau <= window.low {
        return Err(Error::ToleranceTooSmall {
            tau,
            reason: format!(
                "at or below 2*zeta = {}; classical queries may still separate the class",
                window.low
            ),
        });
    }
    if tau >= window.high {
        return Err(Error::ToleranceTooLarge {
            tau,
            reason: format!(
                "at or above sqrt(2*zeta - zeta^2) = {}; Helstrom answers no longer separate",
                window.high
            ),
        });
    }
    Ok(())
}

/// Session on member `t` of `class`; reference-driven adversaries use the zero function.
pub fn disjoint_session(
    class: &DisjointSupportClass,
    t: usize,
    tau: f64,
    kind: AdversaryKind,
) -> Result<OracleSession> {
    let target = Target::from_concept(&class.member(t))?;
    let reference = Target::from_concept(&class.zero())?;
    OracleSession::new(target, tau, kind.build(&reference))
}

fn member_states(class: &DisjointSupportClass) -> Result<Vec<StateVector>> {
    class.members().iter().map(example_state).collect()
}

fn run_tournament(
    session: &mut OracleSession,
    states: &[StateVector],
    zero: &StateVector,
    candidates: &[usize],
) -> Result<Option<usize>> {
    for &t in candidates {
        let observable = helstrom_pure(&states[t], zero)?;
        let anchor = observable.expectation(&states[t])?;
        let answer = session.qstat_query(&format!("helstrom-{t}"), &observable)?;
        if (answer - anchor).abs() <= session.tau() + DECISION_SLACK {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Tests candidates in order with `Helstrom(ψ_t, ψ_0)` until one answer lands
/// within `τ` of that candidate's own expectation.
pub fn learn_disjoint_tournament(
    session: &mut OracleSession,
    class: &DisjointSupportClass,
) -> Result<LearnerReport> {
    check_tournament_tolerance(class.zeta(), session.tau())?;
    let states = member_states(class)?;
    let zero = example_state(&class.zero())?;
    let candidates: Vec<usize> = (0..class.len()).collect();
    let recovered = run_tournament(session, &states, &zero, &candidates)?;
    Ok(LearnerReport::from_session("disjoint-tournament", recovered, session))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStep {
    pub candidates: usize,
    pub half: usize,
    /// `min_{t∈half} E_t − max_{s∉half} E_s` for the mixture Helstrom observable.
    pub gap: f64,
    pub accepted: bool,
}

/// Offline anchors of a half-vs-zero Helstrom observable.
fn half_observable(states: &[StateVector], zero: &StateVector, half: &[usize], rest: &[usize]) -> Result<(Observable, f64, f64)> {
    let mixture: Vec<StateVector> = half.iter().map(|&t| states[t].clone()).collect();
    let observable = helstrom_observable(&mixture_density(&mixture)?, &DensityOperator::pure(zero))?;
    let mut low = f64::INFINITY;
    for &t in half {
        low = low.min(observable.expectation(&states[t])?);
    }
    let mut high = f64::NEG_INFINITY;
    for &s in rest {
        high = high.max(observable.expectation(&states[s])?);
    }
    Ok((observable, low, high))
}

/// Halving search with mixture Helstrom observables; a step is taken only
/// when its measured gap exceeds `2τ`, otherwise the remaining candidates go
/// through the tournament.
pub fn learn_disjoint_group_test(
    session: &mut OracleSession,
    class: &DisjointSupportClass,
) -> Result<LearnerReport> {
    check_tournament_tolerance(class.zeta(), session.tau())?;
    let states = member_states(class)?;
    let zero = example_state(&class.zero())?;
    let tau = session.tau();
    let mut candidates: Vec<usize> = (0..class.len()).collect();
    let mut steps = Vec::new();
    session.set_phase(Some("group-test"));
    while candidates.len() > 1 {
        let split = candidates.len() / 2;
        let (half, rest) = candidates.split_at(split);
        let (observable, low, high) = half_observable(&states, &zero, half, rest)?;
        let gap = low - high;
        let accepted = gap > 2.0 * tau;
        steps.push(GroupStep {
            candidates: candidates.len(),
            half: half.len(),
            gap,
            accepted,
        });
        if !accepted {
            break;
        }
        let answer = session.qstat_query(&format!("group-{}-of-{}", half.len(), candidates.len()), &observable)?;
        candidates = if answer > (low + high) / 2.0 {
            half.to_vec()
        } else {
            rest.to_vec()
        };
    }
    let recovered = if candidates.len() == 1 && !steps.is_empty() {
        Some(candidates[0])
    } else {
        session.set_phase(Some("fallback"));
        run_tournament(session, &states, &zero, &candidates)?
    };
    session.set_phase(None);
    let mut report = LearnerReport::from_session("disjoint-group-test", recovered, session);
    report.group_steps = steps;
    Ok(report)
}

/// Gap of the first halving step, and whether it clears `2τ`.
pub fn first_step_gap(class: &DisjointSupportClass, tau: f64) -> Result<GroupStep> {
    let states = member_states(class)?;
    let zero = example_state(&class.zero())?;
    let candidates: Vec<usize> = (0..class.len()).collect();
    if candidates.len() < 2 {
        return Err(Error::ParameterOutOfRange("halving needs at least two members".into()));
    }
    let (half, rest) = candidates.split_at(candidates.len() / 2);
    let (_, low, high) = half_observable(&states, &zero, half, rest)?;
    Ok(GroupStep {
        candidates: candidates.len(),
        half: half.len(),
        gap: low - high,
        accepted: low - high > 2.0 * tau,
    })
}

/// Classical battery: one sign query per support plus random bounded queries.
pub fn sq_battery(class: &DisjointSupportClass, random: usize, seed: u64) -> Result<Vec<StatQuery>> {
    let mut battery = class
        .supports()
        .iter()
        .enumerate()
        .map(|(t, s)| {
            StatQuery::from_fn(format!("support-sign-{t}"), class.domain_size(), |x, y| {
                if s.contains(&x) && y {
                    -1.0
                } else {
                    1.0
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    battery.extend(random_stat_battery(class.domain_size(), random, seed));
    Ok(battery)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqBaselineReport {
    pub queries_per_target: usize,
    pub guesses: Vec<usize>,
    pub accuracy: f64,
    pub fallbacks: usize,
    /// Every target produced the same answer sequence.
    pub target_independent: bool,
}

/// Predicts with the candidate whose exact answers are closest (max norm)
/// to the observed ones; ties go to the smallest index.
pub fn sq_baseline(
    class: &DisjointSupportClass,
    tau: f64,
    kind: AdversaryKind,
    battery: &[StatQuery],
) -> Result<SqBaselineReport> {
    let predicted: Vec<Vec<f64>> = (0..class.len())
        .map(|s| {
            let mut exact = disjoint_session(class, s, tau, AdversaryKind::Exact)?;
            battery.iter().map(|q| exact.stat_query(q)).collect()
        })
        .collect::<Result<_>>()?;
    let mut guesses = Vec::with_capacity(class.len());
    let mut answer_rows: Vec<Vec<f64>> = Vec::with_capacity(class.len());
    let mut fallbacks = 0;
    for t in 0..class.len() {
        let mut session = disjoint_session(class, t, tau, kind)?;
        let answers = battery
            .iter()
            .map(|q| session.stat_query(q))
            .collect::<Result<Vec<_>>>()?;
        fallbacks += session.fallback_count();
        let distance = |row: &Vec<f64>| {
            row.iter()
                .zip(&answers)
                .map(|(p, a)| (p - a).abs())
                .fold(0.0f64, f64::max)
        };
        let mut best = 0;
        for s in 1..class.len() {
            if distance(&predicted[s]) < distance(&predicted[best]) {
                best = s;
            }
        }
        guesses.push(best);
        answer_rows.push(answers);
    }
    let correct = guesses.iter().enumerate().filter(|(t, &g)| *t == g).count();
    Ok(SqBaselineReport {
        queries_per_target: battery.len(),
        accuracy: correct as f64 / class.len() as f64,
        guesses,
        fallbacks,
        target_independent: answer_rows.windows(2).all(|w| w[0] == w[1]),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceExperiment {
    pub hidden_target: usize,
    pub identified: Option<usize>,
    pub queries: usize,
    pub tournament: Vec<LearnerReport>,
    pub all_identified: bool,
    pub max_queries: usize,
    pub group_test: Vec<LearnerReport>,
    pub sq_baseline: SqBaselineReport,
}

/// Tournament and group test on every member, plus the classical baseline.
/// The seed picks the hidden target highlighted in the report and the random
/// part of the classical battery.
pub fn tolerance_experiment(
    class: &DisjointSupportClass,
    tau: f64,
    kind: AdversaryKind,
    random_queries: usize,
    seed: u64,
) -> Result<ToleranceExperiment> {
    check_tournament_tolerance(class.zeta(), tau)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hidden_target = rng.gen_range(0..class.len());
    let mut tournament = Vec::with_capacity(class.len());
    let mut group_test = Vec::with_capacity(class.len());
    for t in 0..class.len() {
        let mut session = disjoint_session(class, t, tau, kind)?;
        tournament.push(learn_disjoint_tournament(&mut session, class)?.graded(t));
        let mut session = disjoint_session(class, t, tau, kind)?;
        group_test.push(learn_disjoint_group_test(&mut session, class)?.graded(t));
    }
    let battery = sq_battery(class, random_queries, rng.gen())?;
    let sq_baseline = sq_baseline(class, tau, kind, &battery)?;
    Ok(ToleranceExperiment {
        hidden_target,
        identified: tournament[hidden_target].recovered,
        queries: tournament[hidden_target].query_count,
        all_identified: tournament.iter().all(|r| r.success == Some(true)),
        max_queries: tournament.iter().map(|r| r.query_count).max().unwrap_or(0),
        tournament,
        group_test,
        sq_baseline,
    })
}

/// All `2^m` targets of the ideal parity learner; returns the number recovered.
pub fn ideal_parity_sweep(m: usize, tau: f64, kind: AdversaryKind) -> Result<Vec<LearnerReport>> {
    (0..1usize << m)
        .map(|s| {
            let s_hat: Vec<bool> = (0..m).map(|i| (s >> i) & 1 == 1).collect();
            let mut session = ideal_parity_session(&s_hat, tau, kind)?;
            Ok(learn_parity_ideal(&mut session, m)?.graded(s))
        })
        .collect()
}

/// The ideal parity state, for callers that want to query it directly.
pub fn ideal_parity_target(s_hat: &[bool]) -> Result<Target> {
    Ok(Target::State(ideal_parity_state(s_hat)?))
}
