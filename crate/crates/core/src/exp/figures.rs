//! Numerical studies: queue sweeps, θ sweeps of the active-source
//! policies, and the buffered-versus-active comparison over K.

use serde::{Deserialize, Serialize};

use super::{Check, PolicyName};
use crate::error::{invalid, Result};
use crate::net::{bad_first, ActivationSetFamily, NetworkSpec};
use crate::optimizer::{klink_policy, peak_age_of, solve_klink};
use crate::queue::{
    delta_gap, discrete_age, dm1_bound, mm1_bound, optimal_rho, AgeMetric, AgePair, ArrivalKind,
};
use crate::sim::{replicate, Estimate, RunSpec, Scheduler, SourceKind};
use crate::spp::{buffered_optimum_klink, build_spp, spp_analytic_age};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Rho,
    Mu,
}

/// One point of a queue sweep. `delta_peak` and `delta_ave` are the excess
/// ages of the universal occupancy at this row's service rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueueRow {
    pub kind: ArrivalKind,
    pub axis: SweepAxis,
    pub mu: f64,
    pub rho: f64,
    pub peak_dt: f64,
    pub ave_dt: f64,
    pub peak_ct_bound: f64,
    pub ave_ct_bound: f64,
    pub delta_peak: f64,
    pub delta_ave: f64,
}

fn continuous_bound(kind: ArrivalKind, mu: f64, rho: f64) -> Result<AgePair> {
    match kind {
        ArrivalKind::Bernoulli => mm1_bound(mu, rho),
        ArrivalKind::Periodic => dm1_bound(mu, rho),
    }
}

fn queue_row(kind: ArrivalKind, axis: SweepAxis, mu: f64, rho: f64, deltas: (f64, f64)) -> Result<QueueRow> {
    let dt = discrete_age(kind, mu, rho)?;
    let ct = continuous_bound(kind, mu, rho)?;
    Ok(QueueRow {
        kind,
        axis,
        mu,
        rho,
        peak_dt: dt.peak,
        ave_dt: dt.average,
        peak_ct_bound: ct.peak,
        ave_ct_bound: ct.average,
        delta_peak: deltas.0,
        delta_ave: deltas.1,
    })
}

const KINDS: [ArrivalKind; 2] = [ArrivalKind::Bernoulli, ArrivalKind::Periodic];

/// Ages against occupancy at a fixed service rate, for both arrival kinds,
/// with the shape checks of the comparison.
pub fn fig2(mu: f64) -> Result<(Vec<QueueRow>, Vec<Check>)> {
    let rhos: Vec<f64> = (1..=19).map(|i| i as f64 * 0.05).collect();
    let mut rows = Vec::new();
    for kind in KINDS {
        let deltas = if mu < 1.0 {
            (delta_gap(kind, AgeMetric::Peak, mu)?, delta_gap(kind, AgeMetric::Average, mu)?)
        } else {
            (0.0, 0.0)
        };
        for &rho in &rhos {
            rows.push(queue_row(kind, SweepAxis::Rho, mu, rho, deltas)?);
        }
    }

    let mut checks = Vec::new();
    for kind in KINDS {
        let of_kind: Vec<&QueueRow> = rows.iter().filter(|r| r.kind == kind).collect();
        let below = of_kind
            .iter()
            .all(|r| r.peak_dt < r.peak_ct_bound && r.ave_dt < r.ave_ct_bound);
        checks.push(Check::new(
            format!("fig2 {kind:?}: discrete below continuous"),
            below,
            format!("{} occupancies at mu = {mu}", of_kind.len()),
        ));
        let gaps: Vec<f64> = of_kind.iter().map(|r| r.peak_ct_bound - r.peak_dt).collect();
        let grows = gaps.windows(2).all(|w| w[1] > w[0]);
        checks.push(Check::new(
            format!("fig2 {kind:?}: peak gap grows with rho"),
            grows,
            format!("gap {:.4} at rho 0.05, {:.4} at rho 0.95", gaps[0], gaps[gaps.len() - 1]),
        ));
    }
    if (mu - 0.8).abs() < 1e-12 {
        let half = rows
            .iter()
            .find(|r| r.kind == ArrivalKind::Bernoulli && (r.rho - 0.5).abs() < 1e-12)
            .expect("rho = 0.5 is on the grid");
        checks.push(Check::new(
            "fig2 Ber/Ber/1 peak at rho 0.5, mu 0.8",
            (half.peak_dt - 4.0).abs() < 1e-9,
            format!("{:.12} (expected 4)", half.peak_dt),
        ));
    }
    Ok((rows, checks))
}

/// Ages at the universal occupancies against the service rate.
pub fn queue_sweep(mus: &[f64]) -> Result<Vec<QueueRow>> {
    let mut rows = Vec::new();
    for kind in KINDS {
        let rho = optimal_rho(kind, AgeMetric::Peak);
        for &mu in mus {
            let deltas = if mu < 1.0 {
                (delta_gap(kind, AgeMetric::Peak, mu)?, delta_gap(kind, AgeMetric::Average, mu)?)
            } else {
                (0.0, 0.0)
            };
            rows.push(queue_row(kind, SweepAxis::Mu, mu, rho, deltas)?);
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig34Config {
    pub n_links: usize,
    pub k: usize,
    pub gamma_good: f64,
    pub gamma_bad: Vec<f64>,
    pub theta: Vec<f64>,
    pub policies: Vec<PolicyName>,
    pub horizon: u64,
    pub warmup: u64,
    pub reps: usize,
    pub seed: u64,
}

impl Fig34Config {
    /// 50 links, θ ∈ {0, 0.1, …, 1}, γ_bad ∈ {0.1, 0.2}, 10^6 slots × 10.
    pub fn new(k: usize, seed: u64) -> Self {
        Fig34Config {
            n_links: 50,
            k,
            gamma_good: 0.9,
            gamma_bad: vec![0.1, 0.2],
            theta: (0..=10).map(|i| i as f64 / 10.0).collect(),
            policies: PolicyName::ALL.to_vec(),
            horizon: 1_000_000,
            warmup: 100_000,
            reps: 10,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig34Row {
    #[serde(rename = "K")]
    pub k: usize,
    pub gamma_bad: f64,
    pub theta: f64,
    pub policy: PolicyName,
    pub peak: f64,
    pub peak_hw: f64,
    pub ave: f64,
    pub ave_hw: f64,
    /// `Σ w_e/(γ_e f_e)` at the policy's nominal frequencies.
    pub analytic_peak: f64,
}

#[derive(Clone, Debug)]
pub struct Fig34Result {
    pub rows: Vec<Fig34Row>,
    pub checks: Vec<Check>,
}

/// Simulated weighted ages of the compared policies over the fraction of
/// bad links.
pub fn fig3_4(cfg: &Fig34Config) -> Result<Fig34Result> {
    if cfg.k == 0 || cfg.n_links == 0 {
        return Err(invalid("need at least one link and K >= 1"));
    }
    if cfg.reps == 0 || cfg.warmup >= cfg.horizon {
        return Err(invalid("need reps >= 1 and warmup < horizon"));
    }
    let n = cfg.n_links;
    let family = ActivationSetFamily::k_link(n, cfg.k)?;
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for &gb in &cfg.gamma_bad {
        for &theta in &cfg.theta {
            let n_bad = (theta * n as f64).round() as usize;
            let net = NetworkSpec::uniform(bad_first(n, n_bad, cfg.gamma_good, gb))?;
            let opt = solve_klink(&net, cfg.k, 1e-12)?;
            let nominal = FrequencyFor::new(&net, cfg.k, &opt.freq.0);
            for &policy in &cfg.policies {
                let scheduler = match policy {
                    PolicyName::Optimal => Scheduler::from_policy(&klink_policy(&opt.freq, cfg.k)?),
                    PolicyName::Uniform => Scheduler::UniformStationary,
                    PolicyName::RoundRobin => Scheduler::round_robin_klink(&net, cfg.k)?,
                };
                let spec = RunSpec {
                    net: net.clone(),
                    family: family.clone(),
                    scheduler,
                    sources: vec![SourceKind::Active; n],
                    horizon: cfg.horizon,
                    warmup: cfg.warmup,
                };
                // common seeds across policies within a cell
                let rep = replicate(&spec, cfg.reps, cfg.seed.wrapping_add(cell * 1_000))?;
                let m = &rep.metrics;
                rows.push(Fig34Row {
                    k: cfg.k,
                    gamma_bad: gb,
                    theta,
                    policy,
                    peak: m.weighted_peak.mean,
                    peak_hw: m.weighted_peak.half_width,
                    ave: m.weighted_ave.mean,
                    ave_hw: m.weighted_ave.half_width,
                    analytic_peak: nominal.peak(policy)?,
                });
            }
            cell += 1;
        }
    }
    let checks = fig3_4_checks(cfg, &rows);
    Ok(Fig34Result { rows, checks })
}

struct FrequencyFor<'a> {
    net: &'a NetworkSpec,
    k: usize,
    optimal: &'a [f64],
}

impl<'a> FrequencyFor<'a> {
    fn new(net: &'a NetworkSpec, k: usize, optimal: &'a [f64]) -> Self {
        FrequencyFor { net, k, optimal }
    }

    fn peak(&self, policy: PolicyName) -> Result<f64> {
        let n = self.net.n_links();
        let f = match policy {
            PolicyName::Optimal => self.optimal.to_vec(),
            PolicyName::Uniform => vec![self.k.min(n) as f64 / n as f64; n],
            // every link sits in exactly one group of the cycle
            PolicyName::RoundRobin => vec![1.0 / n.div_ceil(self.k) as f64; n],
        };
        peak_age_of(&crate::net::FrequencyVector(f), self.net)
    }
}

fn est(mean: f64, half_width: f64) -> Estimate {
    Estimate { mean, half_width }
}

fn fig3_4_checks(cfg: &Fig34Config, rows: &[Fig34Row]) -> Vec<Check> {
    let k = cfg.k;
    let find = |gb: f64, theta: f64, p: PolicyName| {
        rows.iter()
            .find(|r| r.gamma_bad == gb && r.theta == theta && r.policy == p)
    };
    let mut checks = Vec::new();

    if cfg.policies.contains(&PolicyName::Optimal) {
        let mut worst = f64::NEG_INFINITY;
        let mut ok = true;
        for r in rows.iter().filter(|r| r.policy == PolicyName::Optimal) {
            for other in rows.iter().filter(|o| {
                o.policy != PolicyName::Optimal && o.gamma_bad == r.gamma_bad && o.theta == r.theta
            }) {
                let excess = r.peak - other.peak - (r.peak_hw + other.peak_hw);
                worst = worst.max(excess);
                ok &= excess <= 0.0;
            }
        }
        checks.push(Check::new(
            format!("fig3/4 K={k}: optimal policy has least peak age"),
            ok,
            format!("largest excess over CI {worst:.4}"),
        ));
    }

    if cfg.policies.contains(&PolicyName::Uniform) && cfg.policies.contains(&PolicyName::RoundRobin) {
        let mut ok = true;
        let mut worst = 0.0f64;
        for &gb in &cfg.gamma_bad {
            for &theta in &cfg.theta {
                if let (Some(u), Some(rr)) = (find(gb, theta, PolicyName::Uniform), find(gb, theta, PolicyName::RoundRobin)) {
                    let ratio = (u.peak - rr.peak).abs() / (u.peak_hw + rr.peak_hw);
                    worst = worst.max(ratio);
                    ok &= ratio <= 1.0;
                }
            }
        }
        checks.push(Check::new(
            format!("fig3/4 K={k}: round robin equals uniform in peak age"),
            ok,
            format!("largest |difference| / CI {worst:.3}"),
        ));
    }

    for (label, get) in [
        ("peak", (|r: &Fig34Row| est(r.peak, r.peak_hw)) as fn(&Fig34Row) -> Estimate),
        ("average", |r: &Fig34Row| est(r.ave, r.ave_hw)),
    ] {
        let mut ok = true;
        let mut worst = f64::NEG_INFINITY;
        for &gb in &cfg.gamma_bad {
            for &p in &cfg.policies {
                let series: Vec<Estimate> = cfg
                    .theta
                    .iter()
                    .filter_map(|&t| find(gb, t, p))
                    .map(get)
                    .collect();
                for w in series.windows(2) {
                    let drop = w[0].mean - w[1].mean - (w[0].half_width + w[1].half_width);
                    worst = worst.max(drop);
                    ok &= drop <= 0.0;
                }
            }
        }
        checks.push(Check::new(
            format!("fig3/4 K={k}: {label} age increases with theta"),
            ok,
            format!("largest decrease beyond CI {worst:.4}"),
        ));
    }
    checks
}

/// One network of the buffered-source comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig6Case {
    pub name: String,
    pub n_links: usize,
    pub gamma: Vec<f64>,
}

impl Fig6Case {
    /// The three reference networks: 50 and 10 links with 7 bad channels,
    /// and 50 perfect channels.
    pub fn reference() -> Vec<Fig6Case> {
        vec![
            Fig6Case {
                name: "case1".into(),
                n_links: 50,
                gamma: bad_first(50, 7, 0.9, 0.1),
            },
            Fig6Case {
                name: "case2".into(),
                n_links: 10,
                gamma: bad_first(10, 7, 0.9, 0.1),
            },
            Fig6Case {
                name: "case3".into(),
                n_links: 50,
                gamma: vec![1.0; 50],
            },
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig6Config {
    pub cases: Vec<Fig6Case>,
    #[serde(rename = "K")]
    pub k: Vec<usize>,
    pub max_iter: usize,
}

impl Default for Fig6Config {
    fn default() -> Self {
        Fig6Config {
            cases: Fig6Case::reference(),
            k: (1..=10).collect(),
            max_iter: 500,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fig6Row {
    pub case: String,
    #[serde(rename = "K")]
    pub k: usize,
    pub active_peak: f64,
    pub spp_peak: f64,
    pub buffered_peak: f64,
    /// `spp_peak - buffered_peak`.
    pub gap: f64,
    /// `buffered_peak / active_peak`.
    pub ratio: f64,
}

#[derive(Clone, Debug)]
pub struct Fig6Result {
    pub rows: Vec<Fig6Row>,
    pub checks: Vec<Check>,
}

/// Peak age with active sources, under the separation policy, and at the
/// numerically optimized buffered operating point, over K.
pub fn fig6(cfg: &Fig6Config) -> Result<Fig6Result> {
    let mut rows = Vec::new();
    for case in &cfg.cases {
        if case.gamma.len() != case.n_links {
            return Err(invalid(format!("{}: gamma has {} entries", case.name, case.gamma.len())));
        }
        let net = NetworkSpec::uniform(case.gamma.clone())?;
        for &k in &cfg.k {
            let family = ActivationSetFamily::k_link(case.n_links, k)?;
            let active = solve_klink(&net, k, 1e-12)?.peak_age;
            let spp = spp_analytic_age(&build_spp(&net, &family, ArrivalKind::Bernoulli, AgeMetric::Peak)?)?;
            let buffered = buffered_optimum_klink(&net, k, AgeMetric::Peak, cfg.max_iter)?.value;
            rows.push(Fig6Row {
                case: case.name.clone(),
                k,
                active_peak: active,
                spp_peak: spp,
                buffered_peak: buffered,
                gap: spp - buffered,
                ratio: buffered / active,
            });
        }
    }

    let mut checks = Vec::new();
    for case in &cfg.cases {
        let of_case: Vec<&Fig6Row> = rows.iter().filter(|r| r.case == case.name).collect();
        let worst_gap = of_case.iter().map(|r| r.gap).fold(f64::NEG_INFINITY, f64::max);
        checks.push(Check::new(
            format!("fig6 {}: separation within +1 of buffered optimum", case.name),
            worst_gap <= 1.0,
            format!("largest gap {worst_gap:.4}"),
        ));
        let mut by_k = of_case.clone();
        by_k.sort_by_key(|r| r.k);
        let shrinking = by_k.windows(2).all(|w| w[0].gap <= w[1].gap);
        checks.push(Check::new(
            format!("fig6 {}: gap shrinks as K decreases", case.name),
            shrinking,
            format!("gap {:.4} at K={}", by_k[0].gap, by_k[0].k),
        ));
        let (lo, hi) = of_case.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r.ratio), hi.max(r.ratio))
        });
        checks.push(Check::new(
            format!("fig6 {}: buffered / active in [3, 5]", case.name),
            lo >= 3.0 && hi <= 5.0,
            format!("ratio range [{lo:.4}, {hi:.4}]"),
        ));
    }
    Ok(Fig6Result { rows, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig2_reference_point_and_shape() {
        let (rows, checks) = fig2(0.8).unwrap();
        assert_eq!(rows.len(), 38);
        for c in &checks {
            assert!(c.passed, "{c}");
        }
    }

    #[test]
    fn queue_sweep_deltas_are_small() {
        let mus: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
        let rows = queue_sweep(&mus).unwrap();
        assert_eq!(rows.len(), 18);
        assert!(rows.iter().all(|r| r.delta_peak >= 0.0 && r.delta_peak <= 1.0));
    }

    #[test]
    fn fig6_small_case() {
        let cfg = Fig6Config {
            cases: vec![Fig6Case::reference().swap_remove(1)],
            k: vec![1, 2],
            max_iter: 200,
        };
        let res = fig6(&cfg).unwrap();
        assert_eq!(res.rows.len(), 2);
        for r in &res.rows {
            assert!(r.buffered_peak <= r.spp_peak + 1e-9);
            assert!(r.buffered_peak > r.active_peak);
        }
    }

    #[test]
    fn fig3_4_tiny_sweep_runs() {
        let cfg = Fig34Config {
            n_links: 6,
            k: 2,
            gamma_good: 0.9,
            gamma_bad: vec![0.2],
            theta: vec![0.0, 0.5, 1.0],
            policies: PolicyName::ALL.to_vec(),
            horizon: 20_000,
            warmup: 2_000,
            reps: 3,
            seed: 5,
        };
        let res = fig3_4(&cfg).unwrap();
        assert_eq!(res.rows.len(), 9);
        // uniform and round robin share nominal frequencies K/N
        let u = res.rows.iter().find(|r| r.policy == PolicyName::Uniform).unwrap();
        let rr = res.rows.iter().find(|r| r.policy == PolicyName::RoundRobin).unwrap();
        assert!((u.analytic_peak - rr.analytic_peak).abs() < 1e-12);
    }
}
