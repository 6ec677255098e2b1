//! Separation policy for buffered sources: schedule as if the sources were
//! active, then give every link the same queue occupancy `ρ̄`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::net::{ActivationSetFamily, NetworkSpec};
use crate::optimizer::{klink_policy, solve_general, solve_klink, SchedulePolicy, SolverOptions};
use crate::queue::{
    berber1_from_mu, dber1_real, factor_for, optimal_rho, AgeMetric, AgePair, ArrivalKind,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LinkRate {
    Bernoulli { lambda: f64 },
    Periodic { period: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SppConfig {
    pub arrival: ArrivalKind,
    pub metric: AgeMetric,
    pub rho_bar: f64,
    pub policy: SchedulePolicy,
    pub weights: Vec<f64>,
    pub gamma: Vec<f64>,
    pub rates: Vec<LinkRate>,
}

/// Schedules with the peak-age optimal stationary policy and sets each
/// link's generation rate from `ρ̄`.
pub fn build_spp(
    net: &NetworkSpec,
    family: &ActivationSetFamily,
    arrival: ArrivalKind,
    metric: AgeMetric,
) -> Result<SppConfig> {
    let policy = match family.k_link_limit() {
        Some(k) => {
            let sol = solve_klink(net, k, 1e-12)?;
            klink_policy(&sol.freq, k)?
        }
        None => solve_general(net, family, SolverOptions::default())?.policy,
    };
    spp_from_policy(net, policy, arrival, metric)
}

pub fn spp_from_policy(
    net: &NetworkSpec,
    policy: SchedulePolicy,
    arrival: ArrivalKind,
    metric: AgeMetric,
) -> Result<SppConfig> {
    let rho_bar = optimal_rho(arrival, metric);
    let f = policy.frequencies();
    let mut rates = Vec::with_capacity(net.n_links());
    for (e, &g) in net.gamma().iter().enumerate() {
        let mu = g * f[e];
        if !(mu > 0.0) {
            return Err(Error::UnboundedAge { link: e });
        }
        rates.push(match arrival {
            ArrivalKind::Bernoulli => LinkRate::Bernoulli { lambda: rho_bar * mu },
            ArrivalKind::Periodic => LinkRate::Periodic {
                period: stable_period(rho_bar, mu),
            },
        });
    }
    Ok(SppConfig {
        arrival,
        metric,
        rho_bar,
        weights: net.weights().to_vec(),
        gamma: net.gamma().to_vec(),
        policy,
        rates,
    })
}

/// `round(1/(ρ̄ μ))`, raised until `D μ > 1`.
pub fn stable_period(rho_bar: f64, mu: f64) -> u64 {
    let mut d = (1.0 / (rho_bar * mu)).round().max(1.0) as u64;
    while d as f64 * mu <= 1.0 {
        d += 1;
    }
    d
}

impl SppConfig {
    pub fn service_rates(&self) -> Vec<f64> {
        self.gamma
            .iter()
            .zip(self.policy.frequencies().as_slice())
            .map(|(g, f)| g * f)
            .collect()
    }

    /// Analytic ages per link.
    pub fn link_ages(&self) -> Result<Vec<AgePair>> {
        self.service_rates()
            .iter()
            .zip(&self.rates)
            .map(|(&mu, rate)| link_age(mu, *rate))
            .collect()
    }
}

fn link_age(mu: f64, rate: LinkRate) -> Result<AgePair> {
    match rate {
        LinkRate::Bernoulli { lambda } => {
            if !(lambda < mu) {
                return Err(Error::UnstableQueue { lambda, mu });
            }
            berber1_from_mu(mu, lambda / mu)
        }
        LinkRate::Periodic { period } => dber1_real(mu, period as f64),
    }
}

/// `Σ_e w_e A_e` for the configured metric.
pub fn spp_analytic_age(cfg: &SppConfig) -> Result<f64> {
    let ages = cfg.link_ages()?;
    Ok(cfg
        .weights
        .iter()
        .zip(&ages)
        .map(|(w, a)| w * a.get(cfg.metric))
        .sum())
}

/// Resolution of the brute-force joint optimum.
#[derive(Clone, Copy, Debug)]
pub struct OracleBudget {
    pub max_links: usize,
    /// Points per dimension of the coarse grid.
    pub grid: usize,
    /// Refinement factor around the coarse incumbent.
    pub refine: usize,
    /// Largest number of coarse grid cells over frequencies.
    pub max_cells: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_links: 4,
            grid: 200,
            refine: 10,
            max_cells: 10_000_000,
        }
    }
}

/// Smallest age of one buffered link with service rate `mu`, over its own
/// arrival parameter: a grid over `ρ` with a local refinement for Bernoulli
/// arrivals, every stable integer period for periodic ones.
pub fn best_link_age(kind: ArrivalKind, metric: AgeMetric, mu: f64, budget: &OracleBudget) -> f64 {
    match kind {
        ArrivalKind::Bernoulli => {
            let n = budget.grid;
            let step = 1.0 / (n + 1) as f64;
            let age = |r: f64| berber1_from_mu(mu, r).map(|a| a.get(metric)).unwrap_or(f64::INFINITY);
            let (mut best_r, mut best) = (step, f64::INFINITY);
            for i in 1..=n {
                let r = i as f64 * step;
                let v = age(r);
                if v < best {
                    best = v;
                    best_r = r;
                }
            }
            let fine = step / budget.refine as f64;
            for j in 1..2 * budget.refine {
                let r = best_r - step + j as f64 * fine;
                if r > 0.0 && r < 1.0 {
                    best = best.min(age(r));
                }
            }
            best
        }
        ArrivalKind::Periodic => {
            // peak and average both exceed D/2, so the scan can stop early
            let mut d = (1.0 / mu).floor() as u64 + 1;
            let mut best = f64::INFINITY;
            while (d as f64) / 2.0 < best {
                if let Ok(a) = dber1_real(mu, d as f64) {
                    best = best.min(a.get(metric));
                }
                d += 1;
            }
            best
        }
    }
}

/// Grid optimum of the joint frequency and rate problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointOptimum {
    pub value: f64,
    pub freq: Vec<f64>,
}

/// Brute-force `min Σ w_e A_e(γ_e f_e, ρ_e)` over feasible `f` and per-link
/// arrival parameters.
///
/// Frequencies are gridded directly for k-link families, with the last
/// link taking all remaining capacity; for explicit families the grid runs
/// over the activation probabilities of the maximal sets, with no idle mass.
/// Both are valid because every link's best age decreases with its service.
pub fn joint_optimum(
    net: &NetworkSpec,
    family: &ActivationSetFamily,
    kind: ArrivalKind,
    metric: AgeMetric,
    budget: &OracleBudget,
) -> Result<JointOptimum> {
    let n = net.n_links();
    if n > budget.max_links {
        return Err(Error::OracleBudgetExceeded(format!(
            "{n} links, oracle handles at most {}",
            budget.max_links
        )));
    }
    let w = net.weights();
    let g = net.gamma();
    let objective = |f: &[f64]| -> f64 {
        f.iter()
            .enumerate()
            .map(|(e, &fe)| {
                if fe <= 0.0 {
                    f64::INFINITY
                } else {
                    w[e] * best_link_age(kind, metric, (g[e] * fe).min(1.0), budget)
                }
            })
            .sum()
    };

    // coordinates → frequencies
    let (dims, to_freq): (usize, Box<dyn Fn(&[f64]) -> Option<Vec<f64>>>) =
        match family.k_link_limit() {
            Some(k) => {
                let kf = k.min(n) as f64;
                (
                    n - 1,
                    Box::new(move |c: &[f64]| {
                        let used: f64 = c.iter().sum();
                        let last = (kf - used).min(1.0);
                        if last <= 0.0 {
                            return None;
                        }
                        let mut f = c.to_vec();
                        f.push(last);
                        Some(f)
                    }),
                )
            }
            None => {
                let sets = family.maximal_set_list()?;
                let m = sets.len();
                if m > budget.max_links {
                    return Err(Error::OracleBudgetExceeded(format!(
                        "{m} maximal sets, oracle handles at most {}",
                        budget.max_links
                    )));
                }
                (
                    m - 1,
                    Box::new(move |c: &[f64]| {
                        let used: f64 = c.iter().sum();
                        if used > 1.0 + 1e-12 {
                            return None;
                        }
                        let mut x = c.to_vec();
                        x.push((1.0 - used).max(0.0));
                        let mut f = vec![0.0; n];
                        for (s, p) in sets.iter().zip(&x) {
                            for &e in s.links() {
                                f[e] += p;
                            }
                        }
                        Some(f)
                    }),
                )
            }
        };

    let cells = (budget.grid as u128).saturating_pow(dims as u32);
    if cells > budget.max_cells as u128 {
        return Err(Error::OracleBudgetExceeded(format!(
            "{cells} grid cells exceed the budget of {}",
            budget.max_cells
        )));
    }

    let coarse: Vec<f64> = match family.k_link_limit() {
        // f values in (0, 1]
        Some(_) => (1..=budget.grid).map(|i| i as f64 / budget.grid as f64).collect(),
        // probabilities in [0, 1]
        None => (0..=budget.grid).map(|i| i as f64 / budget.grid as f64).collect(),
    };
    let mut best = (f64::INFINITY, Vec::new(), Vec::new());
    for_each_point(&vec![coarse.clone(); dims], &mut |c| {
        if let Some(f) = to_freq(c) {
            let v = objective(&f);
            if v < best.0 {
                best = (v, c.to_vec(), f);
            }
        }
    });
    if !best.0.is_finite() {
        return Err(invalid("no feasible grid point has finite age"));
    }

    let step = 1.0 / budget.grid as f64;
    let fine = step / budget.refine as f64;
    let axes: Vec<Vec<f64>> = best
        .1
        .iter()
        .map(|&c| {
            (0..=2 * budget.refine)
                .map(|j| c - step + j as f64 * fine)
                .filter(|v| *v >= 0.0 && *v <= 1.0)
                .collect()
        })
        .collect();
    for_each_point(&axes, &mut |c| {
        if let Some(f) = to_freq(c) {
            let v = objective(&f);
            if v < best.0 {
                best = (v, c.to_vec(), f);
            }
        }
    });
    Ok(JointOptimum {
        value: best.0,
        freq: best.2,
    })
}

fn for_each_point(axes: &[Vec<f64>], visit: &mut dyn FnMut(&[f64])) {
    let mut point = vec![0.0; axes.len()];
    fn rec(axes: &[Vec<f64>], depth: usize, point: &mut Vec<f64>, visit: &mut dyn FnMut(&[f64])) {
        if depth == axes.len() {
            visit(point);
            return;
        }
        for &v in &axes[depth] {
            point[depth] = v;
            rec(axes, depth + 1, point, visit);
        }
    }
    rec(axes, 0, &mut point, visit);
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdditiveGapReport {
    pub spp_value: f64,
    pub oracle_optimum: f64,
    /// `spp_value - oracle_optimum`.
    pub additive_gap: f64,
    pub within_one: bool,
}

pub fn additive_gap_check(
    cfg: &SppConfig,
    net: &NetworkSpec,
    family: &ActivationSetFamily,
    budget: &OracleBudget,
) -> Result<AdditiveGapReport> {
    let spp_value = spp_analytic_age(cfg)?;
    let opt = joint_optimum(net, family, cfg.arrival, cfg.metric, budget)?;
    let gap = spp_value - opt.value;
    Ok(AdditiveGapReport {
        spp_value,
        oracle_optimum: opt.value,
        additive_gap: gap,
        within_one: gap <= 1.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicativeReport {
    pub factor: f64,
    pub spp_value: f64,
    /// Lower bound on the age of any queue-aware policy: `spp_value / factor`.
    pub implied_lower_bound: f64,
}

pub fn multiplicative_bound_report(cfg: &SppConfig) -> Result<MultiplicativeReport> {
    let spp_value = spp_analytic_age(cfg)?;
    let factor = factor_for(cfg.arrival, cfg.metric).factor;
    Ok(MultiplicativeReport {
        factor,
        spp_value,
        implied_lower_bound: spp_value / factor,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SppReport {
    pub metric: AgeMetric,
    pub arrival: ArrivalKind,
    pub rho_bar: f64,
    pub rates: Vec<LinkRate>,
    pub f: Vec<f64>,
    pub analytic_age: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_optimum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub additive_gap: Option<f64>,
    pub factor: f64,
    pub implied_lower_bound: f64,
}

pub fn spp_report(cfg: &SppConfig, gap: Option<&AdditiveGapReport>) -> Result<SppReport> {
    let mult = multiplicative_bound_report(cfg)?;
    Ok(SppReport {
        metric: cfg.metric,
        arrival: cfg.arrival,
        rho_bar: cfg.rho_bar,
        rates: cfg.rates.clone(),
        f: cfg.policy.frequencies().0.clone(),
        analytic_age: mult.spp_value,
        oracle_optimum: gap.map(|g| g.oracle_optimum),
        additive_gap: gap.map(|g| g.additive_gap),
        factor: mult.factor,
        implied_lower_bound: mult.implied_lower_bound,
    })
}

/// Coefficients of `A(μ, ρ) = c(ρ)/μ - d(ρ)` for Bernoulli arrivals.
fn bernoulli_coeffs(metric: AgeMetric, rho: f64) -> (f64, f64) {
    let r = rho / (1.0 - rho);
    match metric {
        AgeMetric::Peak => (1.0 / rho + 1.0 / (1.0 - rho), r),
        AgeMetric::Average => (1.0 + 1.0 / rho + rho * r, rho * r),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BufferedOptimum {
    pub value: f64,
    pub freq: Vec<f64>,
    pub rho: Vec<f64>,
    pub iterations: usize,
}

/// Joint optimum of frequencies and Bernoulli rates on a k-link network by
/// alternating minimization.
///
/// With `ρ` fixed the objective is `Σ w_e c(ρ_e)/(γ_e f_e)` up to a
/// constant, a k-link peak-age problem with weights `w_e c(ρ_e)`; with `f`
/// fixed each `ρ_e` is a one-dimensional golden-section search.
pub fn buffered_optimum_klink(
    net: &NetworkSpec,
    k: usize,
    metric: AgeMetric,
    max_iter: usize,
) -> Result<BufferedOptimum> {
    let n = net.n_links();
    let w = net.weights();
    let g = net.gamma();
    let mut f = solve_klink(net, k, 1e-12)?.freq.0;
    let mut rho = vec![0.5; n];
    let mut value = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        for e in 0..n {
            let mu = g[e] * f[e];
            let (r, _) = crate::queue::best_rho(ArrivalKind::Bernoulli, metric, mu)?;
            rho[e] = r;
        }
        let scaled: Vec<f64> = (0..n).map(|e| w[e] * bernoulli_coeffs(metric, rho[e]).0).collect();
        let sub = NetworkSpec::new(scaled, g.to_vec())?;
        let f_new = solve_klink(&sub, k, 1e-12)?.freq.0;
        let v: f64 = (0..n)
            .map(|e| {
                let (c, d) = bernoulli_coeffs(metric, rho[e]);
                w[e] * (c / (g[e] * f_new[e]) - d)
            })
            .sum();
        let improved = value - v;
        if v < value {
            f = f_new;
            value = v;
        }
        if improved <= 1e-13 * value.abs() {
            break;
        }
    }
    Ok(BufferedOptimum {
        value,
        freq: f,
        rho,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn singleton_net() -> (NetworkSpec, ActivationSetFamily) {
        (
            NetworkSpec::new(vec![1.0], vec![1.0]).unwrap(),
            ActivationSetFamily::explicit(1, vec![vec![0]]).unwrap(),
        )
    }

    #[test]
    fn single_perfect_link() {
        let (net, fam) = singleton_net();
        let cfg = build_spp(&net, &fam, ArrivalKind::Bernoulli, AgeMetric::Peak).unwrap();
        assert_eq!(cfg.rho_bar, 0.5);
        assert_eq!(cfg.rates, vec![LinkRate::Bernoulli { lambda: 0.5 }]);
        assert!((spp_analytic_age(&cfg).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_two_links() {
        let net = NetworkSpec::uniform(vec![1.0, 1.0]).unwrap();
        let fam = ActivationSetFamily::k_link(2, 1).unwrap();
        let cfg = build_spp(&net, &fam, ArrivalKind::Bernoulli, AgeMetric::Peak).unwrap();
        for r in &cfg.rates {
            match r {
                LinkRate::Bernoulli { lambda } => assert!((lambda - 0.25).abs() < 1e-12),
                _ => unreachable!(),
            }
        }
        assert!((spp_analytic_age(&cfg).unwrap() - 7.0).abs() < 1e-9);
    }

    #[test]
    fn periodic_single_link_period() {
        let (net, fam) = singleton_net();
        let cfg = build_spp(&net, &fam, ArrivalKind::Periodic, AgeMetric::Peak).unwrap();
        assert_eq!(cfg.rates, vec![LinkRate::Periodic { period: 2 }]);
    }

    #[test]
    fn stable_period_bumps_when_rounding_hits_boundary() {
        // rounding gives D = 1 and D = 2 sits on the stability boundary
        assert_eq!(stable_period(2.0, 0.5), 3);
        for mu in [0.01, 0.1, 0.33, 0.5, 0.97, 1.0] {
            for rho in [0.5, 0.6, 0.9, 0.99] {
                assert!(stable_period(rho, mu) as f64 * mu > 1.0);
            }
        }
    }

    #[test]
    fn ave_metric_uses_average_formula() {
        let (net, fam) = singleton_net();
        let cfg = build_spp(&net, &fam, ArrivalKind::Bernoulli, AgeMetric::Average).unwrap();
        let expected = berber1_from_mu(1.0, cfg.rho_bar).unwrap().average;
        assert!((spp_analytic_age(&cfg).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn multiplicative_report_arithmetic() {
        let (net, fam) = singleton_net();
        for kind in [ArrivalKind::Bernoulli, ArrivalKind::Periodic] {
            for metric in [AgeMetric::Peak, AgeMetric::Average] {
                let cfg = build_spp(&net, &fam, kind, metric).unwrap();
                let rep = multiplicative_bound_report(&cfg).unwrap();
                assert!(rep.implied_lower_bound * rep.factor >= rep.spp_value * (1.0 - 1e-12));
            }
        }
        let cfg = build_spp(&net, &fam, ArrivalKind::Bernoulli, AgeMetric::Peak).unwrap();
        assert_eq!(multiplicative_bound_report(&cfg).unwrap().factor, 4.0);
    }

    #[test]
    fn single_link_gap_within_one() {
        let (net, fam) = singleton_net();
        let budget = OracleBudget::default();
        for kind in [ArrivalKind::Bernoulli, ArrivalKind::Periodic] {
            for metric in [AgeMetric::Peak, AgeMetric::Average] {
                let cfg = build_spp(&net, &fam, kind, metric).unwrap();
                let rep = additive_gap_check(&cfg, &net, &fam, &budget).unwrap();
                assert!(rep.within_one, "{kind:?} {metric:?}: {rep:?}");
                assert!(rep.additive_gap >= -1e-9);
            }
        }
    }

    #[test]
    fn oracle_budget_enforced() {
        let net = NetworkSpec::uniform(vec![1.0; 5]).unwrap();
        let fam = ActivationSetFamily::k_link(5, 1).unwrap();
        assert!(matches!(
            joint_optimum(&net, &fam, ArrivalKind::Bernoulli, AgeMetric::Peak, &OracleBudget::default()),
            Err(Error::OracleBudgetExceeded(_))
        ));
    }

    #[test]
    fn alternating_matches_grid_on_two_links() {
        let net = NetworkSpec::new(vec![1.0, 2.0], vec![0.9, 0.3]).unwrap();
        let fam = ActivationSetFamily::k_link(2, 1).unwrap();
        let grid = joint_optimum(&net, &fam, ArrivalKind::Bernoulli, AgeMetric::Peak, &OracleBudget::default()).unwrap();
        let alt = buffered_optimum_klink(&net, 1, AgeMetric::Peak, 1000).unwrap();
        assert!(alt.value <= grid.value + 1e-6);
        assert!((alt.value - grid.value).abs() <= 1e-3 * grid.value);
    }
}
