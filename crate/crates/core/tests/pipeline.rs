use freshnet::exp::{write_table, ExperimentSpec, Fig34Config, PolicyName};
use freshnet::net::{check_feasible, NetworkFile, DEFAULT_FEASIBILITY_TOL};
use freshnet::optimizer::{peak_age_of, solve_general, SolverOptions};
use freshnet::queue::{AgeMetric, ArrivalKind};
use freshnet::sim::{replicate, RunSpec, Scheduler, SourceKind};
use freshnet::spp::{additive_gap_check, build_spp, spp_analytic_age, OracleBudget};

fn load(name: &str, json: &str) -> NetworkFile {
    let dir = std::env::temp_dir().join(format!("freshnet-pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, json).unwrap();
    NetworkFile::load(&path).unwrap()
}

#[test]
fn file_to_schedule_to_simulation() {
    let file = load(
        "ring",
        r#"{"links": 4, "weights": [1, 2, 1, 1],
            "gamma": {"good": 0.9, "bad": 0.3, "n_bad": 2},
            "interference": {"kind": "single-hop", "edges": [[0, 1], [1, 2], [2, 3], [3, 0]]}}"#,
    );
    let (net, family) = file.build().unwrap();
    let sol = solve_general(&net, &family, SolverOptions::default()).unwrap();
    assert!(sol.certificate.conditions.all());
    assert!(check_feasible(sol.policy.frequencies(), &family, DEFAULT_FEASIBILITY_TOL)
        .unwrap()
        .is_feasible());

    let spec = RunSpec {
        scheduler: Scheduler::from_policy(&sol.policy),
        sources: vec![SourceKind::Active; 4],
        horizon: 400_000,
        warmup: 40_000,
        net: net.clone(),
        family: family.clone(),
    };
    let m = replicate(&spec, 8, 3).unwrap().metrics;
    let analytic = peak_age_of(sol.policy.frequencies(), &net).unwrap();
    assert!((m.weighted_peak.mean - analytic).abs() <= 3.0 * m.weighted_peak.half_width);
}

#[test]
fn spp_on_a_file_network() {
    let file = load(
        "three",
        r#"{"links": 3, "gamma": [0.9, 0.5, 0.2],
            "interference": {"kind": "k-link", "K": 1}}"#,
    );
    let (net, family) = file.build().unwrap();
    for kind in [ArrivalKind::Bernoulli, ArrivalKind::Periodic] {
        let cfg = build_spp(&net, &family, kind, AgeMetric::Peak).unwrap();
        let spp = spp_analytic_age(&cfg).unwrap();
        let report = additive_gap_check(&cfg, &net, &family, &OracleBudget::default()).unwrap();
        assert_eq!(report.spp_value, spp);
        assert!(report.within_one, "{report:?}");
    }
}

#[test]
fn experiment_spec_drives_a_sweep() {
    let spec: ExperimentSpec = serde_json::from_str(
        r#"{"N": 8, "theta": [0.25, 0.75], "gamma_bad": [0.2], "policies": ["optimal", "uniform"],
            "horizon": 30000, "reps": 3}"#,
    )
    .unwrap();
    spec.validate().unwrap();
    let mut cfg = Fig34Config::new(2, 9);
    cfg.n_links = spec.n_links.unwrap();
    cfg.theta = spec.theta.clone().unwrap();
    cfg.gamma_bad = spec.gamma_bad.clone().unwrap();
    cfg.policies = spec.policies.clone().unwrap();
    cfg.horizon = spec.horizon.unwrap();
    cfg.warmup = cfg.horizon / 10;
    cfg.reps = spec.reps.unwrap();
    let res = freshnet::exp::fig3_4(&cfg).unwrap();
    assert_eq!(res.rows.len(), 4);
    assert!(res.rows.iter().all(|r| r.policy != PolicyName::RoundRobin));

    let mut buf = Vec::new();
    write_table(&mut buf, "sweep", &res.rows).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# freshnet-csv v1 sweep"));
    assert_eq!(
        lines.next(),
        Some("K,gamma_bad,theta,policy,peak,peak_hw,ave,ave_hw,analytic_peak")
    );
}

#[test]
fn runs_are_bit_identical() {
    let a = freshnet::exp::fig2(0.8).unwrap().0;
    let b = freshnet::exp::fig2(0.8).unwrap().0;
    assert_eq!(a, b);
    let cfg = Fig34Config {
        n_links: 5,
        theta: vec![0.4],
        gamma_bad: vec![0.1],
        horizon: 20_000,
        warmup: 2_000,
        reps: 2,
        ..Fig34Config::new(2, 77)
    };
    let x = freshnet::exp::fig3_4(&cfg).unwrap().rows;
    let y = freshnet::exp::fig3_4(&cfg).unwrap().rows;
    assert_eq!(x, y);
}
