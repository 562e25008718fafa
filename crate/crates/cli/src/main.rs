//! `symsq` experiment runner.
//!
//! Every subcommand prints one report: a JSON envelope with `config`, `seed`,
//! `version` and `result`, or CSV for tabular reports. Exit status is 0 on
//! success, 1 on invalid input and 2 when `verify` finds a failing check.

mod verify;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use symsq::analysis::{
    lower_bounds, pairwise_independence, sign_observable, tolerance_window, variance_of_observable, PairMode,
    VarianceMode,
};
use symsq::concepts::{make_disjoint_class, ParityConcept};
use symsq::formats::{load_partition_action, parse_observable};
use symsq::learners::{
    composed_parity_session, composed_parity_sweep, first_step_gap, ideal_parity_session, ideal_parity_sweep,
    learn_parity_composed, learn_parity_ideal, tolerance_experiment,
};
use symsq::oracles::{validity_audit, AdversaryKind, Query, Target};
use symsq::quantum::{example_state, helstrom_pure, parse_dim_cap, tight_variance_observable, MAX_DIM_ENV};
use symsq::symmetry::{
    coordinate_permutation, cyclic, enumerate_orbits, graph_isomorphism, orbit_stats, GroupAction, OrbitPartition,
};

#[derive(Parser, Debug)]
#[command(name = "symsq", version, about = "Statistical-query learning experiments on symmetric function classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
enum Command {
    /// Orbit sizes and orbit-distribution statistics.
    Orbits(ActionArgs),
    /// Fraction of cross-orbit pairs and the label census over the class.
    Pairwise(PairwiseArgs),
    /// Class variance of an observable's expectation.
    Variance(VarianceArgs),
    /// Classical and quantum lower-bound scalings.
    Bounds(BoundsArgs),
    /// Influence-query parity learners.
    LearnParity(ParityArgs),
    /// Tolerance window, tournament, group test and classical baseline.
    Tolerance(ToleranceArgs),
    /// Adversary soundness and target-independence audit.
    Audit(AuditArgs),
    /// Run the full check suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ActionName {
    Cyclic,
    Perm,
    Graphiso,
    Partition,
}

#[derive(Args, Debug, Serialize)]
struct ActionArgs {
    #[arg(long, value_enum, default_value_t = ActionName::Cyclic)]
    action: ActionName,
    /// Bit width (cyclic, perm) or vertex count (graphiso).
    #[arg(long)]
    n: Option<usize>,
    /// One block per line, whitespace-separated domain indices.
    #[arg(long)]
    partition_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum PairModeName {
    Exhaustive,
    Sampled,
}

#[derive(Args, Debug, Serialize)]
struct PairwiseArgs {
    #[command(flatten)]
    action: ActionArgs,
    #[arg(long, value_enum, default_value_t = PairModeName::Exhaustive)]
    mode: PairModeName,
    /// Pairs to census in sampled mode.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ObservableName {
    DiagonalSign,
    Tight,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum VarianceModeName {
    Exact,
    Montecarlo,
}

#[derive(Args, Debug, Serialize)]
struct VarianceArgs {
    #[command(flatten)]
    action: ActionArgs,
    #[arg(long, value_enum, default_value_t = ObservableName::DiagonalSign)]
    observable: ObservableName,
    /// JSON observable for `--observable custom`.
    #[arg(long)]
    observable_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = VarianceModeName::Exact)]
    mode: VarianceModeName,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
struct BoundsArgs {
    #[command(flatten)]
    action: ActionArgs,
    #[arg(long)]
    tau: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ParityMode {
    Ideal,
    Composed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum AdversaryName {
    Exact,
    Grid,
    Null,
    Worst,
}

impl From<AdversaryName> for AdversaryKind {
    fn from(a: AdversaryName) -> Self {
        match a {
            AdversaryName::Exact => AdversaryKind::Exact,
            AdversaryName::Grid => AdversaryKind::Grid,
            AdversaryName::Null => AdversaryKind::Null,
            AdversaryName::Worst => AdversaryKind::Worst,
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct ParityArgs {
    #[arg(long, value_enum, default_value_t = ParityMode::Ideal)]
    mode: ParityMode,
    /// Input width `m` (ideal) or vertex count `n` (composed).
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.2)]
    tau: f64,
    #[arg(long, value_enum, default_value_t = AdversaryName::Exact)]
    adversary: AdversaryName,
    /// Single hidden `Ŝ` (bit i = coordinate i); all targets when omitted.
    #[arg(long)]
    target: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct ToleranceArgs {
    #[arg(long, default_value_t = 0.2)]
    zeta: f64,
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    #[arg(long, default_value_t = 4)]
    m: usize,
    /// Domain size `|X|`.
    #[arg(long, default_value_t = 20)]
    domain: usize,
    #[arg(long, value_enum, default_value_t = AdversaryName::Null)]
    adversary: AdversaryName,
    /// Random queries in the classical baseline battery.
    #[arg(long, default_value_t = 46)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum BatteryName {
    Diagonal,
    Helstrom,
}

#[derive(Args, Debug, Serialize)]
struct AuditArgs {
    #[arg(long, default_value_t = 0.2)]
    zeta: f64,
    #[arg(long, default_value_t = 0.5)]
    tau: f64,
    #[arg(long, default_value_t = 4)]
    m: usize,
    #[arg(long, default_value_t = 20)]
    domain: usize,
    #[arg(long, value_enum, default_value_t = AdversaryName::Null)]
    adversary: AdversaryName,
    #[arg(long, value_enum, default_value_t = BatteryName::Diagonal)]
    mode: BatteryName,
    /// Random diagonal queries in the battery.
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    /// Seed for the Monte Carlo checks.
    #[arg(long, default_value_t = 2024)]
    seed: u64,
}

/// A finished report: JSON payload plus optional CSV rendering.
struct Report {
    seed: Option<u64>,
    result: Value,
    csv: Option<Vec<Vec<String>>>,
    failed: bool,
}

impl Report {
    fn json(result: impl Serialize, seed: Option<u64>) -> anyhow::Result<Self> {
        Ok(Self {
            seed,
            result: serde_json::to_value(result)?,
            csv: None,
            failed: false,
        })
    }

    fn with_csv(mut self, rows: Vec<Vec<String>>) -> Self {
        self.csv = Some(rows);
        self
    }
}

fn build_action(args: &ActionArgs) -> anyhow::Result<GroupAction> {
    let need_n = || args.n.context("--n is required for this action");
    Ok(match args.action {
        ActionName::Cyclic => cyclic(need_n()?)?,
        ActionName::Perm => coordinate_permutation(need_n()?)?,
        ActionName::Graphiso => graph_isomorphism(need_n()?)?,
        ActionName::Partition => {
            let path = args
                .partition_file
                .as_ref()
                .context("--partition-file is required for --action partition")?;
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            load_partition_action(&text)?
        }
    })
}

fn build_orbits(args: &ActionArgs) -> anyhow::Result<Arc<OrbitPartition>> {
    Ok(Arc::new(enumerate_orbits(&build_action(args)?)))
}

fn require_seed(seed: Option<u64>, what: &str) -> anyhow::Result<u64> {
    seed.with_context(|| format!("--seed is required for {what}"))
}

fn run_orbits(args: &ActionArgs) -> anyhow::Result<Report> {
    let orbits = build_orbits(args)?;
    let stats = orbit_stats(&orbits);
    let rows = std::iter::once(vec!["orbit".into(), "size".into(), "representative".into()])
        .chain(
            orbits
                .blocks()
                .iter()
                .enumerate()
                .map(|(k, b)| vec![k.to_string(), b.len().to_string(), b[0].to_string()]),
        )
        .collect();
    let result = json!({
        "orbit_sizes": stats.sizes,
        "p_norm_sq": stats.p_norm_sq,
        "orbit_count": stats.orbit_count,
        "domain_size": stats.domain_size,
        "max_orbit": stats.max_orbit,
        "sum_sq_sizes": stats.sum_sq_sizes as u64,
        "discussion_inequality": stats.discussion_inequality_holds(),
    });
    Ok(Report::json(result, None)?.with_csv(rows))
}

fn run_pairwise(args: &PairwiseArgs) -> anyhow::Result<Report> {
    let orbits = build_orbits(&args.action)?;
    let (mode, seed) = match args.mode {
        PairModeName::Exhaustive => (PairMode::Exhaustive, None),
        PairModeName::Sampled => {
            let seed = require_seed(args.seed, "sampled pairwise census")?;
            (PairMode::Sampled { pairs: args.trials, seed }, Some(seed))
        }
    };
    Report::json(pairwise_independence(&orbits, mode)?, seed)
}

fn run_variance(args: &VarianceArgs) -> anyhow::Result<Report> {
    let orbits = build_orbits(&args.action)?;
    let observable = match args.observable {
        ObservableName::DiagonalSign => sign_observable(orbits.domain_size())?,
        ObservableName::Tight => tight_variance_observable(&orbits)?,
        ObservableName::Custom => {
            let path = args
                .observable_file
                .as_ref()
                .context("--observable-file is required for --observable custom")?;
            parse_observable(&fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)?
        }
    };
    let (mode, seed) = match args.mode {
        VarianceModeName::Exact => (VarianceMode::Exact, None),
        VarianceModeName::Montecarlo => {
            let seed = require_seed(args.seed, "Monte Carlo variance")?;
            (
                VarianceMode::MonteCarlo {
                    samples: args.trials,
                    seed,
                },
                Some(seed),
            )
        }
    };
    let report = variance_of_observable(&orbits, &observable, mode)?;
    let stats = orbit_stats(&orbits);
    let result = json!({
        "variance": report,
        "p_norm_sq": stats.p_norm_sq,
        "max_orbit_fraction": stats.max_orbit_fraction(),
    });
    Report::json(result, seed)
}

fn run_bounds(args: &BoundsArgs) -> anyhow::Result<Report> {
    let orbits = build_orbits(&args.action)?;
    let report = lower_bounds(args.tau, &orbit_stats(&orbits))?;
    if let Some(w) = &report.warning {
        eprintln!("warning: {w}");
    }
    Report::json(report, None)
}

fn bits(index: usize, len: usize) -> Vec<bool> {
    (0..len).map(|i| (index >> i) & 1 == 1).collect()
}

fn run_learn_parity(args: &ParityArgs) -> anyhow::Result<Report> {
    let kind = AdversaryKind::from(args.adversary);
    match args.mode {
        ParityMode::Ideal => {
            let m = args.n;
            if m == 0 || m > symsq::quantum::MAX_FOURIER_WIDTH {
                bail!("--n must lie in 1..={} for ideal mode", symsq::quantum::MAX_FOURIER_WIDTH);
            }
            let reports = match args.target {
                Some(s) => {
                    if s >> m != 0 {
                        bail!("--target {s} does not fit in {m} bits");
                    }
                    let mut session = ideal_parity_session(&bits(s, m), args.tau, kind)?;
                    vec![learn_parity_ideal(&mut session, m)?.graded(s)]
                }
                None => ideal_parity_sweep(m, args.tau, kind)?,
            };
            let recovered = reports.iter().filter(|r| r.success == Some(true)).count();
            let mut rows = vec![vec!["target".to_string(), "recovered".into(), "queries".into(), "success".into()]];
            for (k, r) in reports.iter().enumerate() {
                let target = args.target.unwrap_or(k);
                rows.push(vec![
                    target.to_string(),
                    r.recovered.map_or(String::new(), |v| v.to_string()),
                    r.query_count.to_string(),
                    r.success.unwrap_or(false).to_string(),
                ]);
            }
            let result = json!({
                "mode": "ideal",
                "targets": reports.len(),
                "recovered": recovered,
                "reports": reports,
            });
            Ok(Report::json(result, None)?.with_csv(rows))
        }
        ParityMode::Composed => {
            let n = args.n;
            if let Some(s) = args.target {
                let g = ParityConcept::from_index(n, s)?;
                if g.s_index() != s {
                    bail!("--target {s} does not fit in {} bits", n + 1);
                }
                let mut session = composed_parity_session(&g, args.tau, kind)?;
                let report = learn_parity_composed(&mut session, n)?.graded(s);
                return Report::json(json!({ "mode": "composed", "report": report }), None);
            }
            let sweep = composed_parity_sweep(n)?;
            let mut header = vec!["s_index".to_string()];
            header.extend((0..=n).map(|i| format!("e{i}")));
            header.extend(["guess".into(), "success".into()]);
            let mut rows = vec![header];
            for r in &sweep.rows {
                let mut row = vec![r.s_index.to_string()];
                row.extend(r.expectations.iter().map(|e| e.to_string()));
                row.extend([r.guess.to_string(), r.success.to_string()]);
                rows.push(row);
            }
            Ok(Report::json(json!({ "mode": "composed", "sweep": sweep }), None)?.with_csv(rows))
        }
    }
}

fn run_tolerance(args: &ToleranceArgs) -> anyhow::Result<Report> {
    let seed = require_seed(args.seed, "tolerance")?;
    let window = tolerance_window(args.zeta)?;
    if !window.valid {
        bail!(
            "zeta {} leaves an empty window ({}, {}); need zeta < 0.4",
            args.zeta,
            window.low,
            window.high
        );
    }
    let class = make_disjoint_class(args.domain, args.m, args.zeta)?;
    let experiment = tolerance_experiment(&class, args.tau, args.adversary.into(), args.trials, seed)?;
    let gap_sweep = [2usize, 4, 8]
        .iter()
        .filter_map(|&m| make_disjoint_class(args.domain, m, args.zeta).ok())
        .map(|c| first_step_gap(&c, args.tau))
        .collect::<symsq::Result<Vec<_>>>()?;
    let rows = std::iter::once(vec![
        "target".to_string(),
        "tournament_recovered".into(),
        "tournament_queries".into(),
        "group_recovered".into(),
        "group_queries".into(),
        "sq_guess".into(),
    ])
    .chain((0..class.len()).map(|t| {
        vec![
            t.to_string(),
            experiment.tournament[t].recovered.map_or(String::new(), |v| v.to_string()),
            experiment.tournament[t].query_count.to_string(),
            experiment.group_test[t].recovered.map_or(String::new(), |v| v.to_string()),
            experiment.group_test[t].query_count.to_string(),
            experiment.sq_baseline.guesses[t].to_string(),
        ]
    }))
    .collect();
    let result = json!({
        "window": window,
        "identified_target": experiment.identified,
        "hidden_target": experiment.hidden_target,
        "queries": experiment.queries,
        "all_identified": experiment.all_identified,
        "max_queries": experiment.max_queries,
        "sq_baseline_accuracy": experiment.sq_baseline.accuracy,
        "group_gap_sweep": gap_sweep,
        "experiment": experiment,
    });
    Ok(Report::json(result, Some(seed))?.with_csv(rows))
}

fn run_audit(args: &AuditArgs) -> anyhow::Result<Report> {
    let class = make_disjoint_class(args.domain, args.m, args.zeta)?;
    let zero_concept = class.zero();
    let zero = Target::from_concept(&zero_concept)?;
    let targets = class
        .members()
        .iter()
        .map(Target::from_concept)
        .collect::<symsq::Result<Vec<_>>>()?;
    let (battery, seed) = match args.mode {
        BatteryName::Diagonal => {
            let seed = require_seed(args.seed, "a random diagonal battery")?;
            let battery = symsq::oracles::random_stat_battery(args.domain, args.trials, seed)
                .into_iter()
                .map(Query::Stat)
                .collect();
            (battery, Some(seed))
        }
        BatteryName::Helstrom => {
            let zero_state = example_state(&zero_concept)?;
            let battery = class
                .members()
                .iter()
                .enumerate()
                .map(|(t, f)| {
                    Ok(Query::Qstat {
                        name: format!("helstrom-{t}"),
                        observable: helstrom_pure(&example_state(f)?, &zero_state)?,
                    })
                })
                .collect::<symsq::Result<Vec<_>>>()?;
            (battery, None)
        }
    };
    let report = validity_audit(args.adversary.into(), &zero, &targets, &battery, args.tau)?;
    Report::json(report, seed)
}

fn write_output(cli: &Cli, report: &Report) -> anyhow::Result<()> {
    let text = match cli.format {
        Format::Json => {
            let envelope = json!({
                "config": serde_json::to_value(&cli.command)?,
                "seed": report.seed,
                "version": env!("CARGO_PKG_VERSION"),
                "result": report.result,
            });
            let mut s = serde_json::to_string_pretty(&envelope)?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let rows = report
                .csv
                .as_ref()
                .context("this report has no tabular form; use --format json")?;
            let mut writer = csv::Writer::from_writer(Vec::new());
            for row in rows {
                writer.write_record(row)?;
            }
            String::from_utf8(writer.into_inner()?)?
        }
    };
    match &cli.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    if let Ok(raw) = std::env::var(MAX_DIM_ENV) {
        parse_dim_cap(&raw)?;
    }
    match &cli.command {
        Command::Orbits(a) => run_orbits(a),
        Command::Pairwise(a) => run_pairwise(a),
        Command::Variance(a) => run_variance(a),
        Command::Bounds(a) => run_bounds(a),
        Command::LearnParity(a) => run_learn_parity(a),
        Command::Tolerance(a) => run_tolerance(a),
        Command::Audit(a) => run_audit(a),
        Command::Verify(a) => {
            let outcome = verify::run_all(a.seed);
            let failed = outcome.iter().any(|c| !c.passed);
            let rows = std::iter::once(vec!["check".to_string(), "passed".into(), "seconds".into(), "detail".into()])
                .chain(outcome.iter().map(|c| {
                    vec![c.name.clone(), c.passed.to_string(), format!("{:.3}", c.seconds), c.detail.clone()]
                }))
                .collect();
            let mut report = Report::json(json!({ "checks": outcome, "passed": !failed }), Some(a.seed))?
                .with_csv(rows);
            report.failed = failed;
            Ok(report)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = write_output(&cli, &report) {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    if report.failed {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}
