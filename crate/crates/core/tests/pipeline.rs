use std::sync::Arc;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use symsq::analysis::{sign_observable, variance_of_observable, VarianceMode};
use symsq::concepts::{make_disjoint_class, sample_uniform_symmetric, Concept};
use symsq::formats::{load_partition_action, parse_observable, parse_partition};
use symsq::learners::{disjoint_session, learn_disjoint_tournament, tolerance_experiment};
use symsq::oracles::{random_stat_battery, AdversaryKind, OracleSession, Target};
use symsq::quantum::{example_state, tight_variance_observable};
use symsq::symmetry::{enumerate_orbits, orbit_stats};

#[test]
fn partition_file_drives_the_variance_pipeline() {
    let action = load_partition_action("0 1 2 3\n4\n5\n6\n7\n").unwrap();
    let orbits = Arc::new(enumerate_orbits(&action));
    let stats = orbit_stats(&orbits);
    assert_eq!(stats.orbit_count, 5);
    assert_eq!(stats.sum_sq_sizes, 20);
    let r = variance_of_observable(&orbits, &sign_observable(8).unwrap(), VarianceMode::Exact).unwrap();
    assert_eq!(r.value, stats.p_norm_sq);
    let tight = tight_variance_observable(&orbits).unwrap();
    let r = variance_of_observable(&orbits, &tight, VarianceMode::Exact).unwrap();
    assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-12);
}

#[test]
fn custom_observable_matches_sign_observable() {
    let obs = parse_observable(r#"{"diagonal":[1,-1,1,-1,1,-1,1,-1]}"#).unwrap();
    let orbits = Arc::new(enumerate_orbits(&load_partition_action("0 1\n2 3\n").unwrap()));
    let custom = variance_of_observable(&orbits, &obs, VarianceMode::Exact).unwrap();
    let builtin = variance_of_observable(&orbits, &sign_observable(4).unwrap(), VarianceMode::Exact).unwrap();
    assert_eq!(custom.value, builtin.value);
    assert_eq!(custom.value, 0.5);
}

#[test]
fn tournament_identifies_every_member_under_every_adversary() {
    let class = make_disjoint_class(20, 4, 0.2).unwrap();
    for kind in AdversaryKind::ALL {
        for t in 0..class.len() {
            let mut session = disjoint_session(&class, t, 0.5, kind).unwrap();
            let report = learn_disjoint_tournament(&mut session, &class).unwrap().graded(t);
            assert_eq!(report.success, Some(true), "{kind:?} target {t}");
            assert!(report.query_count <= class.len());
            assert!(session.max_violation() <= 1e-12);
        }
    }
}

#[test]
fn tolerance_experiment_is_reproducible() {
    let class = make_disjoint_class(20, 4, 0.2).unwrap();
    let a = tolerance_experiment(&class, 0.5, AdversaryKind::Null, 46, 3).unwrap();
    let b = tolerance_experiment(&class, 0.5, AdversaryKind::Null, 46, 3).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.sq_baseline.accuracy, 0.25);
}

fn blocks_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..5, 1..6)
}

proptest! {
    #[test]
    fn parsed_partition_round_trips(sizes in blocks_strategy()) {
        let mut next = 0;
        let mut text = String::new();
        let mut blocks = Vec::new();
        for s in &sizes {
            let block: Vec<usize> = (next..next + s).collect();
            next += s;
            text.push_str(&block.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "));
            text.push('\n');
            blocks.push(block);
        }
        let spec = parse_partition(&text).unwrap();
        prop_assert_eq!(spec.domain_size, next);
        prop_assert_eq!(&spec.blocks, &blocks);
        let orbits = enumerate_orbits(&load_partition_action(&text).unwrap());
        let mut got: Vec<usize> = orbits.blocks().iter().map(Vec::len).collect();
        let mut want = sizes.clone();
        got.sort_unstable();
        want.sort_unstable();
        prop_assert_eq!(got, want);
        prop_assert!(orbit_stats(&orbits).discussion_inequality_holds());
    }

    #[test]
    fn every_adversary_is_sound_on_symmetric_targets(
        sizes in blocks_strategy(),
        seed in any::<u64>(),
        tau in 0.01f64..1.0,
    ) {
        let text: String = {
            let mut next = 0;
            sizes.iter().map(|s| {
                let line = (next..next + s).map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
                next += s;
                line + "\n"
            }).collect()
        };
        let orbits = Arc::new(enumerate_orbits(&load_partition_action(&text).unwrap()));
        let f = Concept::Symmetric(sample_uniform_symmetric(&orbits, seed));
        let reference = Target::from_concept(&Concept::Table(vec![false; orbits.domain_size()])).unwrap();
        let battery = random_stat_battery(orbits.domain_size(), 8, seed);
        let psi = example_state(&f).unwrap();
        for kind in AdversaryKind::ALL {
            let mut session = OracleSession::new(Target::from_concept(&f).unwrap(), tau, kind.build(&reference)).unwrap();
            for q in &battery {
                session.stat_query(q).unwrap();
                let obs = q.to_observable();
                let answer = session.qstat_query(&q.name, &obs).unwrap();
                prop_assert!((answer - obs.expectation(&psi).unwrap()).abs() <= tau + 1e-12);
            }
            prop_assert!(session.max_violation() <= 1e-12);
        }
    }
}
