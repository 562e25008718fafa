//! `Stat` and `Qstat` oracle sessions with pluggable tolerance adversaries.
//!
//! A session owns the hidden target, the tolerance and the adversary, and
//! records every query. Learners never touch the target directly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::concepts::Concept;
use crate::error::{Error, Result};
use crate::quantum::{example_state, DensityOperator, Observable, StateVector};

/// Slack allowed on top of `τ` when auditing answers.
pub const SOUNDNESS_SLACK: f64 = 1e-12;

/// What the oracle answers about.
#[derive(Debug, Clone)]
pub enum Target {
    /// A labelled uniform distribution; supports both query kinds.
    Labeled {
        labels: Vec<bool>,
        state: StateVector,
    },
    /// A pure state only reachable through `Qstat`.
    State(StateVector),
    Density(DensityOperator),
}

impl Target {
    pub fn from_concept(f: &Concept) -> Result<Self> {
        Ok(Target::Labeled {
            labels: f.truth_table(),
            state: example_state(f)?,
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Target::Labeled { state, .. } | Target::State(state) => state.dim(),
            Target::Density(rho) => rho.dim(),
        }
    }

    fn stat_value(&self, query: &StatQuery) -> Result<f64> {
        match self {
            Target::Labeled { labels, .. } => {
                if labels.len() != query.domain_size() {
                    return Err(Error::DimensionMismatch(labels.len(), query.domain_size()));
                }
                Ok(labeled_mean(labels, |x, y| query.table[x][usize::from(y)]))
            }
            _ => Err(Error::NoClassicalAccess),
        }
    }

    fn qstat_value(&self, observable: &Observable) -> Result<f64> {
        if observable.dim() != self.dim() {
            return Err(Error::DimensionMismatch(observable.dim(), self.dim()));
        }
        match (self, observable.local()) {
            // Diagonal queries on labelled targets reduce to the classical mean.
            (Target::Labeled { labels, .. }, crate::quantum::LocalOperator::Diagonal(d))
                if observable.identity_prefix() == 1 =>
            {
                Ok(labeled_mean(labels, |x, y| d[2 * x + usize::from(y)]))
            }
            (Target::Labeled { state, .. }, _) | (Target::State(state), _) => {
                observable.expectation(state)
            }
            (Target::Density(rho), _) => observable.expectation_density(rho),
        }
    }
}

fn labeled_mean(labels: &[bool], value: impl Fn(usize, bool) -> f64) -> f64 {
    let sum: f64 = labels.iter().enumerate().map(|(x, &y)| value(x, y)).sum();
    sum / labels.len() as f64
}

/// A bounded query function `φ(x, y)` tabulated over the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct StatQuery {
    table: Vec<[f64; 2]>,
    pub name: String,
}

impl StatQuery {
    pub fn from_table(name: impl Into<String>, table: Vec<[f64; 2]>) -> Result<Self> {
        for (x, row) in table.iter().enumerate() {
            for (y, &v) in row.iter().enumerate() {
                if !(-1.0..=1.0).contains(&v) {
                    return Err(Error::QueryOutOfRange { x, y: y as u8, value: v });
                }
            }
        }
        Ok(Self {
            table,
            name: name.into(),
        })
    }

    pub fn from_fn(
        name: impl Into<String>,
        domain_size: usize,
        phi: impl Fn(usize, bool) -> f64,
    ) -> Result<Self> {
        Self::from_table(name, (0..domain_size).map(|x| [phi(x, false), phi(x, true)]).collect())
    }

    pub fn domain_size(&self) -> usize {
        self.table.len()
    }

    pub fn value(&self, x: usize, y: bool) -> f64 {
        self.table[x][usize::from(y)]
    }

    /// The diagonal observable `Σ_{x,y} φ(x,y) |x,y⟩⟨x,y|`.
    pub fn to_observable(&self) -> Observable {
        Observable::diagonal(self.table.iter().flat_map(|r| [r[0], r[1]]).collect())
            .expect("table validated to [-1, 1]")
    }
}

/// `count` query functions with i.i.d. uniform values in `[-1, 1]`.
pub fn random_stat_battery(domain_size: usize, count: usize, seed: u64) -> Vec<StatQuery> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let table = (0..domain_size)
                .map(|_| [rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)])
                .collect();
            StatQuery::from_table(format!("random-{k}"), table).expect("values in range")
        })
        .collect()
}

#[derive(Debug, Clone)]
pub enum Query {
    Stat(StatQuery),
    Qstat { name: String, observable: Observable },
}

impl Query {
    pub fn name(&self) -> &str {
        match self {
            Query::Stat(q) => &q.name,
            Query::Qstat { name, .. } => name,
        }
    }
}

/// How the oracle picks an answer inside the tolerance band.
#[derive(Debug, Clone)]
pub enum Adversary {
    Exact,
    /// Nearest multiple of `τ`.
    GridRound,
    /// Answers as if the target were the reference, when that is sound.
    NullConsistent(Target),
    /// Moves the answer a full `τ` toward the reference's value.
    WorstCaseShift(Target),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdversaryKind {
    Exact,
    Grid,
    Null,
    Worst,
}

impl AdversaryKind {
    pub const ALL: [AdversaryKind; 4] = [
        AdversaryKind::Exact,
        AdversaryKind::Grid,
        AdversaryKind::Null,
        AdversaryKind::Worst,
    ];

    /// Builds the adversary; `reference` is used by the two reference-driven kinds.
    pub fn build(self, reference: &Target) -> Adversary {
        match self {
            AdversaryKind::Exact => Adversary::Exact,
            AdversaryKind::Grid => Adversary::GridRound,
            AdversaryKind::Null => Adversary::NullConsistent(reference.clone()),
            AdversaryKind::Worst => Adversary::WorstCaseShift(reference.clone()),
        }
    }
}

impl Adversary {
    pub fn kind(&self) -> AdversaryKind {
        match self {
            Adversary::Exact => AdversaryKind::Exact,
            Adversary::GridRound => AdversaryKind::Grid,
            Adversary::NullConsistent(_) => AdversaryKind::Null,
            Adversary::WorstCaseShift(_) => AdversaryKind::Worst,
        }
    }

    fn reference(&self) -> Option<&Target> {
        match self {
            Adversary::NullConsistent(r) | Adversary::WorstCaseShift(r) => Some(r),
            _ => None,
        }
    }

    /// Returns `(answer, fell_back)`.
    fn respond(&self, truth: f64, reference: Option<f64>, tau: f64) -> (f64, bool) {
        match (self, reference) {
            (Adversary::Exact, _) => (truth, false),
            (Adversary::GridRound, _) => ((truth / tau).round() * tau, false),
            (Adversary::NullConsistent(_), Some(r)) => {
                if (r - truth).abs() <= tau {
                    (r, false)
                } else {
                    (truth, true)
                }
            }
            (Adversary::WorstCaseShift(_), Some(r)) => {
                if r > truth {
                    (truth + tau, false)
                } else if r < truth {
                    (truth - tau, false)
                } else {
                    (truth, false)
                }
            }
            _ => (truth, false),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub kind: String,
    pub name: String,
    pub truth: f64,
    pub answer: f64,
    /// Set when a reference-driven adversary could not answer soundly.
    pub fallback: bool,
    /// Free-form phase label supplied by the learner.
    pub phase: Option<String>,
}

/// A single learner's access point to a hidden target.
#[derive(Debug, Clone)]
pub struct OracleSession {
    target: Target,
    tau: f64,
    adversary: Adversary,
    log: Vec<QueryRecord>,
    phase: Option<String>,
}

impl OracleSession {
    pub fn new(target: Target, tau: f64, adversary: Adversary) -> Result<Self> {
        if !(tau > 0.0 && tau <= 1.0) {
            return Err(Error::InvalidTolerance(tau));
        }
        if let Some(r) = adversary.reference() {
            if r.dim() != target.dim() {
                return Err(Error::DimensionMismatch(target.dim(), r.dim()));
            }
        }
        Ok(Self {
            target,
            tau,
            adversary,
            log: Vec::new(),
            phase: None,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn adversary(&self) -> &Adversary {
        &self.adversary
    }

    pub fn log(&self) -> &[QueryRecord] {
        &self.log
    }

    pub fn query_count(&self) -> usize {
        self.log.len()
    }

    pub fn fallback_count(&self) -> usize {
        self.log.iter().filter(|r| r.fallback).count()
    }

    /// Labels subsequent log records (e.g. `group-test` vs `fallback`).
    pub fn set_phase(&mut self, phase: Option<&str>) {
        self.phase = phase.map(str::to_owned);
    }

    fn record(&mut self, kind: &str, name: &str, truth: f64, reference: Option<f64>) -> f64 {
        let (answer, fallback) = self.adversary.respond(truth, reference, self.tau);
        self.log.push(QueryRecord {
            kind: kind.into(),
            name: name.into(),
            truth,
            answer,
            fallback,
            phase: self.phase.clone(),
        });
        answer
    }

    pub fn stat_query(&mut self, query: &StatQuery) -> Result<f64> {
        let truth = self.target.stat_value(query)?;
        let reference = self
            .adversary
            .reference()
            .map(|r| r.stat_value(query))
            .transpose()?;
        Ok(self.record("stat", &query.name, truth, reference))
    }

    pub fn qstat_query(&mut self, name: &str, observable: &Observable) -> Result<f64> {
        let norm = observable.operator_norm();
        if norm > 1.0 + crate::quantum::observable::NORM_TOL {
            return Err(Error::NormViolation(norm));
        }
        let truth = self.target.qstat_value(observable)?;
        let reference = self
            .adversary
            .reference()
            .map(|r| r.qstat_value(observable))
            .transpose()?;
        Ok(self.record("qstat", name, truth, reference))
    }

    pub fn query(&mut self, query: &Query) -> Result<f64> {
        match query {
            Query::Stat(q) => self.stat_query(q),
            Query::Qstat { name, observable } => self.qstat_query(name, observable),
        }
    }

    pub fn max_violation(&self) -> f64 {
        self.log
            .iter()
            .map(|r| (r.answer - r.truth).abs() - self.tau)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub adversary: AdversaryKind,
    pub tau: f64,
    pub targets: usize,
    pub queries: usize,
    /// Largest `|answer − truth| − τ`; non-positive means every answer is sound.
    pub max_violation: f64,
    pub all_sound: bool,
    /// Queries where a reference-driven adversary had to answer the truth.
    pub fallbacks: usize,
    /// Every query received the same answer regardless of the target.
    pub target_independent: bool,
}

/// Replays `battery` against every target and checks the adversary contract.
pub fn validity_audit(
    kind: AdversaryKind,
    reference: &Target,
    targets: &[Target],
    battery: &[Query],
    tau: f64,
) -> Result<AuditReport> {
    let mut answers: Vec<Vec<f64>> = Vec::with_capacity(targets.len());
    let mut max_violation = f64::NEG_INFINITY;
    let mut fallbacks = 0;
    for target in targets {
        let mut session = OracleSession::new(target.clone(), tau, kind.build(reference))?;
        let row = battery
            .iter()
            .map(|q| session.query(q))
            .collect::<Result<Vec<_>>>()?;
        max_violation = max_violation.max(session.max_violation());
        fallbacks += session.fallback_count();
        answers.push(row);
    }
    let target_independent = answers.windows(2).all(|w| w[0] == w[1]);
    Ok(AuditReport {
        adversary: kind,
        tau,
        targets: targets.len(),
        queries: battery.len(),
        max_violation,
        all_sound: max_violation <= SOUNDNESS_SLACK,
        fallbacks,
        target_independent,
    })
}
