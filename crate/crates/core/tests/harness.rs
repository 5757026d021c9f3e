use rdesign::harness::{
    emit_outputs, evaluate_listener_future_reward, Harness, Metric, RunConfig, CSV_HEADER,
};
use rdesign::{HarnessError, ListenerConfig, LiteralListener, Policy, UtteranceKind, UtteranceSet};

fn small() -> RunConfig {
    RunConfig::from_json(include_str!("data/small_config.json")).unwrap()
}

#[test]
fn uninformative_speaker_gain_is_prior_policy_versus_literal() {
    // With beta_s1 = 0 the pragmatic posterior is the prior, so L1 acts on the
    // prior while L0 acts on the filtered belief. The gain is the difference
    // of those two future rewards, averaged uniformly over utterances.
    let cfg = RunConfig {
        beta_s1: 0.0,
        horizons: vec![1, 2, 10],
        horizon_prior: vec![1, 2],
        pragmatics_kind: UtteranceKind::DescriptionsOnly,
        ..Default::default()
    };
    let harness = Harness::new(cfg).unwrap();
    let env = harness.env();
    let w = harness.true_w();
    let l0 = LiteralListener::uniform(env, ListenerConfig::default()).unwrap();
    let prior_policies: Vec<Policy> = env
        .states()
        .iter()
        .map(|s| l0.action_policy(l0.prior(), s))
        .collect();
    let prior_value = evaluate_listener_future_reward(&prior_policies, w, env).unwrap();
    let set = UtteranceSet::enumerate(env, UtteranceKind::DescriptionsOnly);
    let literal_value: f64 = set
        .utterances()
        .iter()
        .map(|u| {
            let policies: Vec<Policy> = env.states().iter().map(|s| l0.respond(u, s).unwrap()).collect();
            evaluate_listener_future_reward(&policies, w, env).unwrap()
        })
        .sum::<f64>()
        / set.len() as f64;
    let expected = prior_value - literal_value;

    let records = harness.run_pragmatics_sweep().unwrap();
    for r in records.iter().filter(|r| r.condition == "known") {
        assert!((r.value - expected).abs() < 1e-9, "{} vs {expected}", r.value);
    }
    // Same quantity in every condition: the listener learns nothing from S1.
    for r in &records {
        assert!((r.value - expected).abs() < 1e-9);
    }
}

#[test]
fn default_speaker_sweep_shape() {
    let harness = Harness::new(RunConfig::default()).unwrap();
    let records = harness.run_speaker_sweep().unwrap();
    let future = records.iter().filter(|r| r.metric == Metric::FutureReward).count();
    assert_eq!(future, 3 * 10 * 84);
    assert!(records
        .iter()
        .filter(|r| r.condition == "instructions_only" && r.metric == Metric::MapIsDescription)
        .all(|r| r.value == 0.0));
    // utterance probabilities for the report state sum to one per (kind, H)
    for kind in UtteranceKind::ALL {
        for h in 1..=10 {
            let total: f64 = records
                .iter()
                .filter(|r| {
                    r.metric == Metric::UtteranceProb
                        && r.speaker_h == h
                        && r.condition.split('/').next() == Some(kind.as_str())
                })
                .map(|r| r.value)
                .sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn outputs_are_byte_stable() {
    let harness = Harness::new(small()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let a = harness.run_all().unwrap();
    let b = harness.run_all().unwrap();
    let pa = emit_outputs(&a, harness.config(), harness.env().state_prior(), &dir.path().join("a"), "results").unwrap();
    let pb = emit_outputs(&b, harness.config(), harness.env().state_prior(), &dir.path().join("b"), "results").unwrap();
    let ca = std::fs::read(&pa.csv).unwrap();
    assert_eq!(ca, std::fs::read(&pb.csv).unwrap());
    assert_eq!(std::fs::read(&pa.summary).unwrap(), std::fs::read(&pb.summary).unwrap());

    let text = String::from_utf8(ca).unwrap();
    assert_eq!(text.lines().count(), a.len() + 1);
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    assert!(text.lines().all(|l| l.split(',').count() == 7));
}

#[test]
fn sequential_and_parallel_runs_agree() {
    let par = Harness::new(small()).unwrap().with_execution(rdesign::Execution::Parallel);
    let seq = Harness::new(small()).unwrap().with_execution(rdesign::Execution::Sequential);
    assert_eq!(par.run_all().unwrap(), seq.run_all().unwrap());
}

#[test]
fn golden_small_run() {
    let harness = Harness::new(small()).unwrap();
    let records = harness.run_all().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let paths = emit_outputs(&records, harness.config(), harness.env().state_prior(), dir.path(), "results").unwrap();
    let produced = std::fs::read_to_string(paths.csv).unwrap();
    let golden = include_str!("data/golden_small.csv");
    assert_eq!(produced, golden, "regenerate with: rdesign --config crates/core/tests/data/small_config.json --out <dir> all");
}

#[test]
fn empty_records_and_bad_paths() {
    let harness = Harness::new(small()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        emit_outputs(&[], harness.config(), harness.env().state_prior(), dir.path(), "x"),
        Err(HarnessError::Config(_))
    ));
    let file = dir.path().join("not_a_dir");
    std::fs::write(&file, "x").unwrap();
    let records = harness.run_speaker_sweep().unwrap();
    let err = emit_outputs(&records, harness.config(), harness.env().state_prior(), &file, "x").unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(err.to_string().contains("not_a_dir"));
}
