//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any
//! criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use freshnet::exp::{
    certificate_suite, delta_checks, factor_checks, fig3_4, fig6, fixed_point_checks,
    occupancy_checks, policy_suite, queue_sim_suite, spp_gap_suite, Check, CertificateSuiteConfig,
    Fig34Config, Fig6Config, PolicySuiteConfig, QueueSimConfig,
};
use freshnet::spp::OracleBudget;

const SEED: u64 = 1;

struct Criterion {
    id: &'static str,
    title: &'static str,
    checks: Vec<Check>,
}

impl Criterion {
    fn new(id: &'static str, title: &'static str, checks: Vec<Check>) -> Self {
        Criterion { id, title, checks }
    }

    fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }
}

fn runtime(label: &str, elapsed: Duration, limit: Duration) -> Check {
    Check::new(
        format!("{label} runtime"),
        elapsed < limit,
        format!("{:.1}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs()),
    )
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn main() -> ExitCode {
    let mut criteria = Vec::new();

    let (policies, t) = timed(|| policy_suite(&PolicySuiteConfig::full(SEED)).expect("policy suite"));
    criteria.push(Criterion::new(
        "C1",
        "peak age equals sum w/(gamma f_hat) on 20 random networks",
        vec![policies.frequency_identity.clone(), runtime("policy suite", t, Duration::from_secs(120))],
    ));
    criteria.push(Criterion::new(
        "C2",
        "stationary schedulers: average age equals peak age",
        vec![policies.stationary_equality.clone()],
    ));
    criteria.push(Criterion::new(
        "C3",
        "peak <= 2 average - 1 for every scheduler",
        vec![policies.peak_average_bound.clone()],
    ));

    criteria.push(Criterion::new(
        "C4",
        "optimality certificate, k-link agreement, two-link grid",
        certificate_suite(&CertificateSuiteConfig::full(SEED)).expect("certificate suite"),
    ));

    let ((_, mut queue), t) = timed(|| queue_sim_suite(&QueueSimConfig::full(SEED)).expect("queue simulations"));
    queue.push(runtime("queue simulations", t, Duration::from_secs(300)));
    criteria.push(Criterion::new("C5", "simulated queue ages match the formulas within 1%", queue));

    criteria.push(Criterion::new(
        "C6",
        "alpha* closed form and sigma* residual",
        fixed_point_checks().expect("fixed points"),
    ));
    criteria.push(Criterion::new("C7", "optimal occupancies", occupancy_checks()));
    criteria.push(Criterion::new("C8", "occupancy gap bounds", delta_checks().expect("delta sweep")));
    criteria.push(Criterion::new("C9", "multiplicative optimality factors", factor_checks()));
    criteria.push(Criterion::new(
        "C10",
        "separation policy within +1 of the joint optimum",
        spp_gap_suite(&OracleBudget::default()).expect("oracle"),
    ));

    let (sweeps, t) = timed(|| {
        [1, 10]
            .into_iter()
            .flat_map(|k| fig3_4(&Fig34Config::new(k, SEED)).expect("theta sweep").checks)
            .collect::<Vec<_>>()
    });
    let mut fig34 = sweeps;
    fig34.push(runtime("theta sweeps", t, Duration::from_secs(600)));
    criteria.push(Criterion::new("C11", "theta sweeps with K = 1 and K = 10", fig34));

    let fig6_checks: Vec<Check> = fig6(&Fig6Config::default())
        .expect("buffered comparison")
        .checks
        .into_iter()
        .filter(|c| !c.name.contains("shrinks"))
        .collect();
    criteria.push(Criterion::new("C12", "buffered optimum against separation and active sources", fig6_checks));

    println!();
    let mut failed = 0;
    for c in &criteria {
        let mark = if c.passed() { "PASS" } else { "FAIL" };
        println!("{mark} {:<4} {}", c.id, c.title);
        for check in &c.checks {
            println!("       {check}");
        }
        if !c.passed() {
            failed += 1;
        }
    }
    println!("\n{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
