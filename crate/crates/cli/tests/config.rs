use rmabf_cli::{parse_config, CliError};
use rmabf_core::Algorithm;

const ONE_ARM: &str = r#"{"env": [{"kind": "lmss", "elevation": 40}], "budget": 1, "eta": [0.2], "horizon": 8}"#;

#[test]
fn minimal_config_gets_defaults() {
    let c = parse_config(ONE_ARM).unwrap();
    assert_eq!(c.instance.num_arms(), 1);
    assert_eq!(c.schedule, Some((8, 8)));
    assert_eq!(c.trials, 100);
    assert_eq!(c.seed, 0);
    assert_eq!(c.epsilon, 0.1);
    assert_eq!(c.algorithm, Algorithm::FairUcrl);
    assert_eq!(c.replicas, vec![1, 10]);
    let learner = c.learner_config().unwrap();
    assert_eq!((learner.episodes, learner.horizon), (8, 8));
}

#[test]
fn episodes_alone_sets_horizon() {
    let c = parse_config(r#"{"env": [{"kind": "rte", "success_prob": 0.7}], "budget": 1, "eta": [0.1], "episodes": 5}"#).unwrap();
    assert_eq!(c.schedule, Some((5, 5)));
}

#[test]
fn learning_without_schedule_is_an_error() {
    let c = parse_config(r#"{"env": [{"kind": "lmss", "elevation": 60}], "budget": 1, "eta": [0.2]}"#).unwrap();
    assert!(c.schedule.is_none());
    let msg = c.learner_config().unwrap_err().to_string();
    assert!(msg.contains("episodes"), "{msg}");
}

#[test]
fn copies_expand_and_keep_order() {
    let c = parse_config(
        r#"{"env": [{"kind": "lmss", "elevation": 40, "copies": 2}, {"kind": "lmss", "elevation": 80}],
            "budget": 1, "eta": [0.1, 0.1, 0.2], "episodes": 2}"#,
    )
    .unwrap();
    assert_eq!(c.instance.num_arms(), 3);
    assert_eq!(c.instance.arm(0), c.instance.arm(1));
    assert_ne!(c.instance.arm(1), c.instance.arm(2));
}

#[test]
fn eta_longer_than_arms() {
    let err = parse_config(r#"{"env": [{"kind": "lmss", "elevation": 40}], "budget": 1, "eta": [0.2, 0.3]}"#).unwrap_err();
    assert!(err.to_string().contains("eta/arms length mismatch"), "{err}");
}

#[test]
fn unknown_algorithm_lists_valid_names() {
    let err = parse_config(r#"{"env": [{"kind": "lmss", "elevation": 40}], "budget": 1, "eta": [0.2], "algorithm": "ucb"}"#).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("unknown algorithm `ucb`"), "{msg}");
    for name in ["fair-ucrl", "g-fair-ucrl", "oracle-index", "random"] {
        assert!(msg.contains(name), "{msg}");
    }
}

#[test]
fn parse_errors_name_the_field_and_line() {
    let err = parse_config("{\n  \"env\": [{\"kind\": \"lmss\", \"elevation\": 40}],\n  \"budget\": \"two\",\n  \"eta\": [0.2]\n}").unwrap_err();
    let msg = err.to_string();
    assert!(matches!(err, CliError::Parse { .. }));
    assert!(msg.contains("budget") && msg.contains("line 3"), "{msg}");

    let err = parse_config(r#"{"env": [{"kind": "lmss", "elevation": 40}], "budget": 1, "eta": [0.2], "horizn": 3}"#).unwrap_err();
    assert!(err.to_string().contains("horizn"), "{err}");
}

#[test]
fn validation_failures_are_reported() {
    // budget above the arm count
    let err = parse_config(r#"{"env": [{"kind": "lmss", "elevation": 40}], "budget": 2, "eta": [0.2]}"#).unwrap_err();
    assert!(matches!(err, CliError::Model(_)), "{err}");
    // floors that cannot all be met
    let err = parse_config(r#"{"env": [{"kind": "lmss", "elevation": 40, "copies": 2}], "budget": 1, "eta": [0.6, 0.6]}"#).unwrap_err();
    assert!(matches!(err, CliError::Model(_)), "{err}");
    let err = parse_config(r#"{"env": [{"kind": "lmss", "elevation": 45}], "budget": 1, "eta": [0.2]}"#).unwrap_err();
    assert!(matches!(err, CliError::Env(_)), "{err}");
}

#[test]
fn inline_instance() {
    let c = parse_config(
        r#"{"instance": {"arms": [{"transition": [[[0.9, 0.1], [0.2, 0.8]], [[0.5, 0.5], [0.5, 0.5]]],
                                    "reward_mean": [[0, 0.3], [0, 0.9]]}]},
            "budget": 1, "eta": [0.3], "initial_states": [1]}"#,
    )
    .unwrap();
    assert_eq!(c.instance.num_states(), 2);
    assert_eq!(c.instance.initial_states(), &[1]);
    assert_eq!(c.instance.arm(0).reward_mean(1, 1), 0.9);

    let err = parse_config(
        r#"{"instance": {"arms": [{"transition": [[[1.0]]], "reward_mean": [[0, 0.3]]}]}, "budget": 1, "eta": [0.3]}"#,
    )
    .unwrap_err();
    assert!(matches!(err, CliError::Model(_)), "{err}");
}

#[test]
fn arms_come_from_exactly_one_source() {
    let both = r#"{"env": [{"kind": "lmss", "elevation": 40}],
                   "instance": {"arms": [{"transition": [[[1.0]], [[1.0]]], "reward_mean": [[0, 0.3]]}]},
                   "budget": 1, "eta": [0.3]}"#;
    assert!(matches!(parse_config(both), Err(CliError::Config(_))));
    assert!(matches!(parse_config(r#"{"budget": 1, "eta": []}"#), Err(CliError::Config(_))));
}
