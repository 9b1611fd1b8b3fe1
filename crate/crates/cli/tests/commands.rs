use orcon::analysis::{StationarityClass, Tolerances};
use orcon::bench::toy_line;
use orcon::model::{MpocProblem, SmoothFn};
use orcon_cli::commands::{gradcheck, verify};
use orcon_cli::config::{BenchmarkSpec, ExperimentConfig};

#[test]
fn gradcheck_flags_a_wrong_derivative() {
    // x₁² with the derivative off by a factor of two.
    let f = SmoothFn::from_gradient(2, |x: &[f64]| x[0] * x[0] + x[1], |x: &[f64]| vec![x[0], 1.0]);
    let p = MpocProblem::new("corrupted", f)
        .or_pair(SmoothFn::from_gradient(2, |x: &[f64]| x[0], |_: &[f64]| vec![1.0, 0.0]), toy_line::<f64>().or_pairs[0].h.clone());
    let mut out = Vec::new();
    assert!(!gradcheck(&p, 10, 0, &mut out).unwrap());
    assert!(String::from_utf8(out).unwrap().contains("FAIL"));
    assert!(gradcheck(&toy_line(), 10, 0, &mut Vec::new()).unwrap());
}

#[test]
fn verify_reports_infeasible_points() {
    let p = toy_line();
    let mut out = Vec::new();
    let holds = verify(&p, &[1.0, 1.0], StationarityClass::W, &Tolerances::default(), &mut out).unwrap();
    assert!(!holds);
    assert!(String::from_utf8(out).unwrap().contains("infeasible"));
}

#[test]
fn bare_ids_round_trip_through_the_config() {
    for id in orcon_cli::config::PROBLEM_IDS {
        let spec = BenchmarkSpec::from_id(id).unwrap();
        assert_eq!(spec.id(), id);
        let text = format!(r#"{{"version": 1, "benchmark": {}}}"#, serde_json::to_string(&spec).unwrap());
        let cfg = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(cfg.benchmark, spec);
        assert_eq!(cfg.starts, 100);
        cfg.validate().unwrap();
    }
}

#[test]
fn heat_defaults_to_zero_offset() {
    let cfg = ExperimentConfig::parse(r#"{"version": 1, "benchmark": {"id": "heat"}}"#).unwrap();
    assert_eq!(cfg.delta(), 0.0);
    let cfg = ExperimentConfig::parse(r#"{"version": 1, "benchmark": {"id": "heat"}, "delta": 0.5}"#).unwrap();
    assert_eq!(cfg.delta(), 0.5);
}

#[test]
fn invalid_settings_fail_validation() {
    for text in [
        r#"{"version": 1, "benchmark": {"id": "toy-line"}, "starts": 0}"#,
        r#"{"version": 1, "benchmark": {"id": "toy-line"}, "threads": 0}"#,
        r#"{"version": 1, "benchmark": {"id": "toy-line"}, "delta": -1}"#,
        r#"{"version": 1, "benchmark": {"id": "toy-line"}, "methods": ["relax-sc", "relax-sc"]}"#,
        r#"{"version": 1, "benchmark": {"id": "toy-line"}, "methods": []}"#,
        r#"{"version": 1, "benchmark": {"id": "toy-line"}, "homotopy": {"t_factor": 1.0}}"#,
    ] {
        let err = ExperimentConfig::parse(text).and_then(|c| c.validate()).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{text}");
    }
}
