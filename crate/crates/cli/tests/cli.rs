use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;
use spectral_surgery::cylinder::BoundaryCondition;
use spectral_surgery::oned_oracle::{Potential, SchrodingerProblem};
use spectral_surgery::relative_det::PerModeRule;
use spectral_surgery::report::Report;
use spectral_surgery::spectra::{circle_spectrum, point_spectrum, shift_spectrum, torus_spectrum};
use spectral_surgery::surgery::{Cap, Law, SurgeryModel};
use spectral_surgery_cli::config::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spectral-surgery"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Report {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad report: {e}\n{}", String::from_utf8_lossy(&out.stdout));
    })
}

fn result<'a>(r: &'a Report, name: &str) -> &'a spectral_surgery::report::CheckResult {
    r.results
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("no result `{name}`"))
}

#[test]
fn det_cylinder_unit_circle() {
    let out = run(&[
        "det-cylinder",
        "--cross-section",
        "circle",
        "--circumference",
        "1",
        "--length",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.command, "det-cylinder");
    let closed = result(&r, "closed form").value;
    let direct = result(&r, "direct").value;
    assert!((closed - 0.701835).abs() < 1e-6, "{closed}");
    assert!((direct - 0.701835).abs() < 1e-6, "{direct}");
    assert!(result(&r, "closed form vs direct").pass);
}

#[test]
fn scattering_check_passes_and_embeds_seed() {
    let out = run(&["scattering-check", "--trials", "1000", "--max-dim", "8", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r.seed, 3);
    assert_eq!(r.config["seed"], 3);
    assert!(r.results[0].value <= 1e-10);
}

#[test]
fn reports_are_deterministic_for_a_seed() {
    let a = run(&["scattering-check", "--trials", "50", "--seed", "11"]);
    let b = run(&["scattering-check", "--trials", "50", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn every_number_carries_a_bound_or_tag() {
    let out = run(&["bfk-check", "--y-shift", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    for r in v["results"].as_array().unwrap() {
        let b = &r["error_bound"];
        assert!(b.is_number() || b == "heuristic", "{r}");
    }
}

#[test]
fn failing_check_exits_one_and_names_it() {
    let out = run(&["scattering-check", "--trials", "20", "--tolerance", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("FAIL max |det S"), "{err}");
}

#[test]
fn unknown_config_field_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"experiment":{"acceptance":{}},"extra":true}"#).unwrap();
    let out = run(&["--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field"));
}

#[test]
fn unknown_nested_field_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"experiment":{"scattering-check":{"trials":3,"dims":2}}}"#).unwrap();
    assert_eq!(run(&["--config", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, "{not json").unwrap();
    assert_eq!(run(&["--config", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["--config", "/nonexistent/config.json"]).status.code(), Some(2));
}

#[test]
fn out_of_domain_model_exits_two() {
    let out = run(&["surgery", "--law", "glued-limit"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["det-cylinder", "--length=-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_and_subcommand_are_exclusive() {
    assert_eq!(run(&["--config", "x.json", "acceptance"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
}

#[test]
fn printed_config_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    let args = ["oracle-1d", "--shift", "1", "--b", "2", "--cuts", "0.5,1.2"];
    let printed = bin().args(args).arg("--print-config").output().unwrap();
    assert_eq!(printed.status.code(), Some(0));
    std::fs::write(&cfg, &printed.stdout).unwrap();
    let from_flags = run(&args);
    let from_file = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(from_flags.status.code(), Some(0));
    assert_eq!(from_flags.stdout, from_file.stdout);
    let r = report(&from_file);
    assert!(r.results.iter().any(|c| c.name == "gluing constant" && c.pass));
}

#[test]
fn output_file_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let out = run(&[
        "surgery",
        "--law",
        "split-ratio",
        "--z",
        "1",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("name,value,error_bound,expected,tolerance,relative,pass")
    );
    assert!(lines.next().unwrap().starts_with("r = 1,"));
    assert!(text.contains("limit vs prediction"));
    let leftovers: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(leftovers.len(), 1);
}

#[test]
fn relative_det_cross_checks_gluing() {
    let out = run(&["relative-det", "--rule", "translate", "--a", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let v = result(&r, "det(H, H0)").value;
    assert!((v - (-std::f64::consts::PI / 3.0).exp()).abs() < 1e-10, "{v}");
    assert!(result(&r, "relative zeta vs gluing").pass);
}

#[test]
fn zeta_reports_closed_form_checks() {
    let out = run(&["zeta", "--s=-0.5,2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!((result(&r, "zeta_Y(0)").value + 1.0).abs() < 1e-10);
    assert!(result(&r, "zeta_Y(2) vs closed form").pass);
}

#[test]
fn det_cylinder_point_matches_oracle_for_mixed_ends() {
    let out = run(&[
        "det-cylinder",
        "--cross-section",
        "point",
        "--y-shift",
        "4",
        "--length",
        "1",
        "--left",
        "neumann",
    ]);
    assert_eq!(out.status.code(), Some(0));
    // Neumann-Dirichlet on [0, 1] with mass 2: 2 cosh(2)
    let v = result(&report(&out), "closed form").value;
    assert!((v - 2.0 * 2f64.cosh()).abs() < 1e-10, "{v}");
}

fn sample_configs() -> Vec<ExperimentConfig> {
    let c = circle_spectrum(1.0, 1e4).unwrap();
    let model = SurgeryModel::new(
        c.clone(),
        Cap::new(0.7, BoundaryCondition::Neumann).unwrap(),
        Some(Cap::new(1.3, BoundaryCondition::Dirichlet).unwrap()),
        1.0,
        0.5,
    )
    .unwrap();
    let experiments = vec![
        Experiment::DetCylinder(DetCylinderParams {
            spectrum: shift_spectrum(&c, 1.0).unwrap(),
            length: 2.0,
            left: BoundaryCondition::Dirichlet,
            right: BoundaryCondition::Neumann,
            tolerance: 1e-6,
        }),
        Experiment::Zeta(ZetaParams {
            spectrum: torus_spectrum(1.0, 1e3).unwrap(),
            s: vec![0.3, 2.5],
            tolerance: 1e-8,
        }),
        Experiment::RelativeDet(RelativeDetParams {
            spectrum: point_spectrum(2).unwrap(),
            rule: PerModeRule::NeumannCap { a: 0.25 },
            probe: true,
            tolerance: 1e-5,
            probe_tolerance: 0.02,
        }),
        Experiment::BfkCheck(BfkCheckParams {
            model: model.clone(),
            z: vec![0.3, 1.0],
            tolerance: 1e-6,
        }),
        Experiment::Surgery(SurgeryParams {
            model,
            law: Law::CappedRatio,
            grid: vec![1.0, 2.0, 4.0, 8.0],
            tolerance: Some(1e-4),
        }),
        Experiment::ScatteringCheck(ScatteringCheckParams {
            trials: 10,
            max_dim: 4,
            tolerance: 1e-10,
        }),
        Experiment::Oracle1d(Oracle1dParams {
            problem: SchrodingerProblem::new(
                Potential::Well {
                    depth: 2.0,
                    from: 0.2,
                    to: 0.4,
                },
                0.0,
                1.0,
                BoundaryCondition::Dirichlet,
                BoundaryCondition::Neumann,
                0.1,
            )
            .unwrap(),
            cuts: vec![0.5],
            tolerance: 1e-8,
        }),
        Experiment::Acceptance(AcceptanceParams {}),
    ];
    experiments.into_iter().map(ExperimentConfig::new).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn configs_round_trip(idx in 0usize..8, seed in any::<u64>(), csv in any::<bool>(), out in proptest::option::of("[a-z]{1,8}\\.json")) {
        let mut cfg = sample_configs().swap_remove(idx);
        cfg.seed = seed;
        cfg.format = if csv { OutputFormat::Csv } else { OutputFormat::Json };
        cfg.output = out.map(Into::into);
        let text = cfg.to_json();
        let back = ExperimentConfig::from_json(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn injected_unknown_fields_are_rejected(idx in 0usize..8, key in "[a-z]{3,10}") {
        let cfg = sample_configs().swap_remove(idx);
        let mut v = serde_json::to_value(&cfg).unwrap();
        let name = cfg.experiment.name();
        let known = ["tolerance", "spectrum", "length", "left", "right", "s", "rule", "probe", "probe_tolerance",
                     "model", "z", "law", "grid", "trials", "max_dim", "problem", "cuts"];
        prop_assume!(!known.contains(&key.as_str()));
        v["experiment"][name][key.as_str()] = Value::from(1);
        prop_assert!(serde_json::from_value::<ExperimentConfig>(v).is_err());
    }
}
