//! `freshnet` command-line front end.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use freshnet::exp::{
    self, Check, ExperimentSpec, Fig34Config, Fig6Config, PolicySuiteConfig, QueueSimConfig,
    VerifyReport, VerifyScale,
};
use freshnet::net::{check_feasible, NetworkFile, DEFAULT_FEASIBILITY_TOL};
use freshnet::optimizer::{
    certify, klink_policy, solve_general, solve_klink, SolveReport, SolverOptions,
};
use freshnet::queue::{self, AgeMetric, ArrivalKind};
use freshnet::sim::{self, replicate, RunSpec, Scheduler, SourceKind};
use freshnet::spp::{self, OracleBudget};

#[derive(Parser)]
#[command(name = "freshnet", version, about = "Age-of-information scheduling toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV and JSON outputs.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Peak-age optimal stationary schedule of a network file.
    Solve {
        #[arg(long, default_value_t = freshnet::optimizer::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = freshnet::optimizer::DEFAULT_MAX_ITER)]
        max_iter: usize,
    },
    /// Age of a single discrete-time queue.
    Queue {
        #[arg(long, value_enum, default_value_t = Kind::Bernoulli)]
        kind: Kind,
        /// Service probability per slot.
        #[arg(long, default_value_t = 0.8)]
        mu: f64,
        /// Occupancy for Bernoulli arrivals.
        #[arg(long)]
        rho: Option<f64>,
        /// Period for periodic arrivals.
        #[arg(long)]
        period: Option<u64>,
    },
    /// Simulate a scheduler on a network file with active sources.
    Simulate {
        #[arg(long, value_enum, default_value_t = SchedulerArg::Optimal)]
        scheduler: SchedulerArg,
        /// Attempt probability of every link for the distributed scheduler.
        #[arg(long, default_value_t = 0.3)]
        attempt: f64,
        #[arg(long, default_value_t = 1_000_000)]
        horizon: u64,
        #[arg(long, default_value_t = 10)]
        reps: usize,
    },
    /// Separation policy for buffered sources on a network file.
    Spp {
        #[arg(long, value_enum, default_value_t = Kind::Bernoulli)]
        arrival: Kind,
        #[arg(long, value_enum, default_value_t = Metric::Peak)]
        metric: Metric,
        /// Compare against the brute-force joint optimum (at most 4 links).
        #[arg(long)]
        oracle: bool,
    },
    /// Run a named study and write its tables.
    Experiment {
        #[arg(value_enum)]
        name: ExperimentName,
    },
    /// Run every property suite.
    Verify {
        /// Shortened simulations.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Bernoulli,
    Periodic,
}

impl From<Kind> for ArrivalKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Bernoulli => ArrivalKind::Bernoulli,
            Kind::Periodic => ArrivalKind::Periodic,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Peak,
    Ave,
}

impl From<Metric> for AgeMetric {
    fn from(m: Metric) -> Self {
        match m {
            Metric::Peak => AgeMetric::Peak,
            Metric::Ave => AgeMetric::Average,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SchedulerArg {
    Optimal,
    Uniform,
    RoundRobin,
    Distributed,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentName {
    /// Queue ages against occupancy at a fixed service rate.
    Fig2,
    /// Ages against the service rate at the universal occupancies.
    QueueSweep,
    /// θ sweep with K = 1.
    Fig3,
    /// θ sweep with K = 10.
    Fig4,
    /// Buffered against active sources over K.
    Fig6,
    /// Random-network scheduler comparison.
    Policies,
    /// Single-link queue simulations against the formulas.
    QueueSim,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Returns whether every check requested by the command passed.
fn dispatch(cli: &Cli) -> Result<bool> {
    if let Some(dir) = &cli.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    match &cli.command {
        Command::Solve { tol, max_iter } => solve(cli, *tol, *max_iter),
        Command::Queue { kind, mu, rho, period } => queue_point(*kind, *mu, *rho, *period),
        Command::Simulate {
            scheduler,
            attempt,
            horizon,
            reps,
        } => simulate(cli, *scheduler, *attempt, *horizon, *reps),
        Command::Spp { arrival, metric, oracle } => run_spp(cli, *arrival, *metric, *oracle),
        Command::Experiment { name } => experiment(cli, *name),
        Command::Verify { quick } => {
            let scale = if *quick { VerifyScale::Quick } else { VerifyScale::Full };
            let report = exp::verify_all(cli.seed, scale)?;
            finish_checks(cli, "verify", &report)
        }
    }
}

fn network(cli: &Cli) -> Result<NetworkFile> {
    let path = cli.config.as_ref().context("--config <network.json> is required")?;
    NetworkFile::load(path).with_context(|| format!("reading {}", path.display()))
}

fn write_json(cli: &Cli, name: &str, value: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    println!("{text}");
    if let Some(dir) = &cli.out {
        fs::write(dir.join(format!("{name}.json")), text + "\n")?;
    }
    Ok(())
}

fn table_writer(cli: &Cli, name: &str) -> Result<Box<dyn Write>> {
    Ok(match &cli.out {
        Some(dir) => {
            let path = dir.join(format!("{name}.csv"));
            eprintln!("writing {}", path.display());
            Box::new(BufWriter::new(File::create(path)?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn solve(cli: &Cli, tol: f64, max_iter: usize) -> Result<bool> {
    let (net, family) = network(cli)?.build()?;
    let report = match family.k_link_limit() {
        Some(k) => {
            let sol = solve_klink(&net, k, tol.min(1e-12))?;
            let policy = klink_policy(&sol.freq, k)?;
            let cert = certify(&policy, &net, &family, tol)?;
            SolveReport::new(&policy, &cert, sol.peak_age, 0)
        }
        None => {
            let opts = SolverOptions {
                tol,
                max_iter,
                record_trace: false,
            };
            SolveReport::from(&solve_general(&net, &family, opts)?)
        }
    };
    let feasible = check_feasible(
        &freshnet::net::FrequencyVector(report.f.clone()),
        &family,
        DEFAULT_FEASIBILITY_TOL,
    )?
    .is_feasible();
    write_json(cli, "solve", &report)?;
    Ok(report.conditions.all() && feasible)
}

fn queue_point(kind: Kind, mu: f64, rho: Option<f64>, period: Option<u64>) -> Result<bool> {
    let ages = match (kind, rho, period) {
        (Kind::Bernoulli, Some(r), None) => queue::berber1_age(1.0, mu, r)?,
        (Kind::Periodic, None, Some(d)) => queue::dber1_age(1.0, mu, d)?,
        (Kind::Bernoulli, _, _) => bail!("bernoulli queues need --rho and no --period"),
        (Kind::Periodic, _, _) => bail!("periodic queues need --period and no --rho"),
    };
    println!("{}", serde_json::to_string_pretty(&ages)?);
    Ok(ages.peak <= 2.0 * ages.average - 1.0 + 1e-12)
}

fn simulate(cli: &Cli, which: SchedulerArg, attempt: f64, horizon: u64, reps: usize) -> Result<bool> {
    let (net, family) = network(cli)?.build()?;
    let n = net.n_links();
    let scheduler = match which {
        SchedulerArg::Optimal => {
            let policy = match family.k_link_limit() {
                Some(k) => klink_policy(&solve_klink(&net, k, 1e-12)?.freq, k)?,
                None => solve_general(&net, &family, SolverOptions::default())?.policy,
            };
            Scheduler::from_policy(&policy)
        }
        SchedulerArg::Uniform => Scheduler::UniformStationary,
        SchedulerArg::RoundRobin => match family.k_link_limit() {
            Some(k) => Scheduler::round_robin_klink(&net, k)?,
            None => Scheduler::RoundRobin {
                groups: family.maximal_set_list()?,
            },
        },
        SchedulerArg::Distributed => Scheduler::Distributed {
            attempt: vec![attempt; n],
        },
    };
    let spec = RunSpec {
        net,
        family,
        scheduler,
        sources: vec![SourceKind::Active; n],
        horizon,
        warmup: horizon / 10,
    };
    let rep = replicate(&spec, reps, cli.seed)?;
    let m = &rep.metrics;
    let allowance = 2.0 * m.weighted_peak.half_width.hypot(m.frequency_peak.half_width);
    let diff = (m.weighted_peak.mean - m.frequency_peak.mean).abs();
    let check = Check::new(
        "peak age equals sum w/(gamma f_hat)",
        reps < 2 || diff <= allowance,
        format!("|diff| {diff:.4}, allowance {allowance:.4}"),
    );
    if let Some(dir) = &cli.out {
        sim::write_csv(BufWriter::new(File::create(dir.join("simulate.csv"))?), "simulate", &rep)?;
    }
    write_json(cli, "simulate", m)?;
    eprintln!("{check}");
    Ok(check.passed)
}

fn run_spp(cli: &Cli, arrival: Kind, metric: Metric, oracle: bool) -> Result<bool> {
    let (net, family) = network(cli)?.build()?;
    let cfg = spp::build_spp(&net, &family, arrival.into(), metric.into())?;
    let gap = if oracle {
        Some(spp::additive_gap_check(&cfg, &net, &family, &OracleBudget::default())?)
    } else {
        None
    };
    let report = spp::spp_report(&cfg, gap.as_ref())?;
    write_json(cli, "spp", &report)?;
    Ok(gap.map_or(true, |g| g.within_one))
}

fn experiment(cli: &Cli, name: ExperimentName) -> Result<bool> {
    let spec = match &cli.config {
        Some(path) => ExperimentSpec::load(path).with_context(|| format!("reading {}", path.display()))?,
        None => ExperimentSpec::default(),
    };
    let seed = spec.seed.unwrap_or(cli.seed);
    let mut report = VerifyReport::default();
    match name {
        ExperimentName::Fig2 => {
            let (rows, checks) = exp::fig2(spec.mu.unwrap_or(0.8))?;
            exp::write_table(table_writer(cli, "fig2")?, "fig2", &rows)?;
            report.extend(checks);
        }
        ExperimentName::QueueSweep => {
            let mus: Vec<f64> = (1..=99).map(|i| i as f64 / 100.0).collect();
            let rows = exp::queue_sweep(&mus)?;
            exp::write_table(table_writer(cli, "queue_sweep")?, "queue_sweep", &rows)?;
        }
        ExperimentName::Fig3 | ExperimentName::Fig4 => {
            let default_k = if matches!(name, ExperimentName::Fig3) { 1 } else { 10 };
            let label = if default_k == 1 { "fig3" } else { "fig4" };
            let mut rows = Vec::new();
            for k in spec.k.clone().unwrap_or_else(|| vec![default_k]) {
                let cfg = fig34_config(&spec, k, seed);
                let res = exp::fig3_4(&cfg)?;
                rows.extend(res.rows);
                report.extend(res.checks);
            }
            exp::write_table(table_writer(cli, label)?, label, &rows)?;
        }
        ExperimentName::Fig6 => {
            let mut cfg = Fig6Config::default();
            if let Some(ks) = &spec.k {
                cfg.k = ks.clone();
            }
            let res = exp::fig6(&cfg)?;
            exp::write_table(table_writer(cli, "fig6")?, "fig6", &res.rows)?;
            report.extend(res.checks);
        }
        ExperimentName::Policies => {
            let mut cfg = PolicySuiteConfig::full(seed);
            cfg.horizon = spec.horizon.unwrap_or(cfg.horizon);
            cfg.warmup = spec.warmup.unwrap_or(cfg.horizon / 10);
            cfg.reps = spec.reps.unwrap_or(cfg.reps);
            let res = exp::policy_suite(&cfg)?;
            let rows: Vec<PolicyRow> = res.records.iter().map(PolicyRow::from).collect();
            exp::write_table(table_writer(cli, "policies")?, "policies", &rows)?;
            report.extend(res.checks());
        }
        ExperimentName::QueueSim => {
            let mut cfg = QueueSimConfig::full(seed);
            cfg.horizon = spec.horizon.unwrap_or(cfg.horizon);
            cfg.warmup = spec.warmup.unwrap_or(cfg.horizon / 10);
            let (records, checks) = exp::queue_sim_suite(&cfg)?;
            exp::write_table(table_writer(cli, "queue_sim")?, "queue_sim", &records)?;
            report.extend(checks);
        }
    }
    let label = format!("experiment-{}", name.to_possible_value().expect("no skipped variants").get_name());
    finish_checks(cli, &label, &report)
}

fn fig34_config(spec: &ExperimentSpec, k: usize, seed: u64) -> Fig34Config {
    let mut cfg = Fig34Config::new(k, seed);
    cfg.n_links = spec.n_links.unwrap_or(cfg.n_links);
    cfg.gamma_good = spec.gamma_good.unwrap_or(cfg.gamma_good);
    if let Some(g) = &spec.gamma_bad {
        cfg.gamma_bad = g.clone();
    }
    if let Some(t) = &spec.theta {
        cfg.theta = t.clone();
    }
    if let Some(p) = &spec.policies {
        cfg.policies = p.clone();
    }
    cfg.horizon = spec.horizon.unwrap_or(cfg.horizon);
    cfg.warmup = spec.warmup.unwrap_or(cfg.horizon / 10);
    cfg.reps = spec.reps.unwrap_or(cfg.reps);
    cfg
}

#[derive(serde::Serialize)]
struct PolicyRow {
    network: usize,
    n_links: usize,
    scheduler: &'static str,
    peak: f64,
    peak_hw: f64,
    ave: f64,
    ave_hw: f64,
    frequency_peak: f64,
    frequency_peak_hw: f64,
    optimal_peak: f64,
}

impl From<&exp::PolicyRecord> for PolicyRow {
    fn from(r: &exp::PolicyRecord) -> Self {
        PolicyRow {
            network: r.network,
            n_links: r.n_links,
            scheduler: r.scheduler,
            peak: r.peak.mean,
            peak_hw: r.peak.half_width,
            ave: r.ave.mean,
            ave_hw: r.ave.half_width,
            frequency_peak: r.frequency_peak.mean,
            frequency_peak_hw: r.frequency_peak.half_width,
            optimal_peak: r.optimal_peak,
        }
    }
}

fn finish_checks(cli: &Cli, name: &str, report: &VerifyReport) -> Result<bool> {
    if !report.checks.is_empty() {
        println!("{report}");
    }
    if let Some(dir) = &cli.out {
        write_report(dir, name, report)?;
    }
    Ok(report.all_passed())
}

fn write_report(dir: &Path, name: &str, report: &VerifyReport) -> Result<()> {
    let text = serde_json::to_string_pretty(report)?;
    fs::write(dir.join(format!("{name}.json")), text + "\n")?;
    Ok(())
}
