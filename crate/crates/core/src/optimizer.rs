//! Peak-age optimal stationary scheduling.
//!
//! For a stationary policy activating set `m` with probability `x_m`, link `e`
//! is served a fraction `f_e = (Mx)_e` of slots and the weighted peak age is
//! `Σ w_e / (γ_e f_e)`. The objective is convex in `x`; its partial derivative
//! with respect to `x_m` is `-Ω_m(x)` with `Ω_m = Σ_{e∈m} w_e / (γ_e f_e²)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::net::{ActivationSet, ActivationSetFamily, FrequencyVector, NetworkSpec};

const F_FLOOR: f64 = 1e-12;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// A distribution over activation sets with its induced link frequencies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchedulePolicy {
    sets: Vec<ActivationSet>,
    probs: Vec<f64>,
    freq: FrequencyVector,
}

impl SchedulePolicy {
    /// Probabilities must be non-negative and sum to one.
    pub fn new(n_links: usize, sets: Vec<ActivationSet>, probs: Vec<f64>) -> Result<Self> {
        if sets.len() != probs.len() {
            return Err(invalid("one probability per activation set required"));
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0)) {
            return Err(invalid(format!("negative activation probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("activation probabilities sum to {total}")));
        }
        let mut f = vec![0.0; n_links];
        for (s, p) in sets.iter().zip(&probs) {
            for &e in s.links() {
                if e >= n_links {
                    return Err(Error::UnknownLink { link: e, n_links });
                }
                f[e] += p;
            }
        }
        Ok(SchedulePolicy {
            sets,
            probs,
            freq: FrequencyVector(f),
        })
    }

    pub fn sets(&self) -> &[ActivationSet] {
        &self.sets
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn frequencies(&self) -> &FrequencyVector {
        &self.freq
    }

    pub fn n_links(&self) -> usize {
        self.freq.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conditions {
    /// Every set in the support has `Ω_m = Ω`.
    pub c1: bool,
    /// No set outside the support exceeds `Ω`.
    pub c2: bool,
    /// `x` lies on the simplex.
    pub c3: bool,
}

impl Conditions {
    pub fn all(&self) -> bool {
        self.c1 && self.c2 && self.c3
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalityCertificate {
    /// `Ω_m(x)` for each set of the policy, in policy order.
    pub omega_weights: Vec<(ActivationSet, f64)>,
    /// Best response over the whole family and its weight.
    pub best_response: (ActivationSet, f64),
    /// `Σ_m x_m Ω_m(x)`, which equals the objective at `x`.
    pub omega: f64,
    /// `max_m Ω_m(x) - Ω`.
    pub gap: f64,
    pub conditions: Conditions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralSolution {
    pub policy: SchedulePolicy,
    pub certificate: OptimalityCertificate,
    pub iterations: usize,
    pub objective: f64,
    /// Objective after every iteration, when requested.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub trace: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions {
    /// Stop once both duality gaps fall below `tol · objective`.
    pub tol: f64,
    pub max_iter: usize,
    pub record_trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            record_trace: false,
        }
    }
}

/// Weighted peak age `Σ w_e / (γ_e f_e)` of any policy with frequencies `f`.
pub fn peak_age_of(f: &FrequencyVector, net: &NetworkSpec) -> Result<f64> {
    if f.len() != net.n_links() {
        return Err(invalid(format!(
            "frequency vector has {} entries for {} links",
            f.len(),
            net.n_links()
        )));
    }
    let mut total = 0.0;
    for (e, a) in net.effective_weights().into_iter().enumerate() {
        if !(f[e] > 0.0) {
            return Err(Error::UnboundedAge { link: e });
        }
        total += a / f[e];
    }
    Ok(total)
}

/// Peak and average age of a link that is served with probability `p`
/// independently in every slot. Both equal `1/p`.
pub fn stationary_age_analytic(p: f64) -> Result<(f64, f64)> {
    if p == 0.0 {
        return Err(Error::UnboundedAge { link: 0 });
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(invalid(format!("success probability must be in (0, 1], got {p}")));
    }
    Ok((1.0 / p, 1.0 / p))
}

fn omega_of(set: &[usize], a: &[f64], f: &[f64]) -> f64 {
    set.iter().map(|&e| a[e] / (f[e] * f[e])).sum()
}

/// Conditional gradient with away steps over the simplex of maximal sets.
///
/// Each iteration compares the Frank-Wolfe vertex (largest `Ω_m`) with the
/// away vertex (smallest `Ω_m` in the support) and moves along the direction
/// with the larger gap, using an exact line search.
pub fn solve_general(
    net: &NetworkSpec,
    family: &ActivationSetFamily,
    opts: SolverOptions,
) -> Result<GeneralSolution> {
    let n = net.n_links();
    if family.n_links() != n {
        return Err(invalid(format!(
            "family has {} links, network has {n}",
            family.n_links()
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(invalid("solver tolerance must be positive"));
    }
    let sets = family.maximal_set_list()?;
    let mut covered = vec![false; n];
    for s in &sets {
        for &e in s.links() {
            covered[e] = true;
        }
    }
    if let Some(e) = covered.iter().position(|c| !c) {
        return Err(Error::UncoveredLink(e));
    }

    let a = net.effective_weights();
    let n_sets = sets.len();
    let mut x = vec![1.0 / n_sets as f64; n_sets];
    let mut f = vec![0.0; n];
    let mut omega = vec![0.0; n_sets];
    let mut df = vec![0.0; n];
    let mut trace = Vec::new();

    let mut iter = 0;
    loop {
        frequencies_into(&sets, &x, &mut f);
        let guarded: Vec<f64> = f.iter().map(|v| v.max(F_FLOOR)).collect();
        let obj: f64 = a.iter().zip(&guarded).map(|(a, f)| a / f).sum();
        for (o, s) in omega.iter_mut().zip(&sets) {
            *o = omega_of(s.links(), &a, &guarded);
        }
        // lowest index wins ties
        let mut fw = 0;
        for m in 1..n_sets {
            if omega[m] > omega[fw] {
                fw = m;
            }
        }
        let mut away = usize::MAX;
        for m in 0..n_sets {
            if x[m] > 0.0 && (away == usize::MAX || omega[m] < omega[away]) {
                away = m;
            }
        }
        let fw_gap = omega[fw] - obj;
        let away_gap = obj - omega[away];
        let threshold = opts.tol * obj;

        if fw_gap <= threshold && away_gap <= threshold {
            return finish(net, family, sets, x, iter, trace);
        }
        if iter >= opts.max_iter {
            let gap = fw_gap;
            let best = finish(net, family, sets, x, iter, trace)?;
            return Err(Error::MaxIterExceeded {
                iterations: iter,
                gap,
                best: Box::new(best),
            });
        }

        let toward = fw_gap >= away_gap;
        let step_max;
        if toward {
            for e in 0..n {
                df[e] = -f[e];
            }
            for &e in sets[fw].links() {
                df[e] += 1.0;
            }
            step_max = 1.0;
        } else {
            for e in 0..n {
                df[e] = f[e];
            }
            for &e in sets[away].links() {
                df[e] -= 1.0;
            }
            let xv = x[away];
            step_max = if xv >= 1.0 { f64::INFINITY } else { xv / (1.0 - xv) };
        }
        let step = line_search(&a, &f, &df, step_max);

        if toward {
            for xm in x.iter_mut() {
                *xm *= 1.0 - step;
            }
            x[fw] += step;
        } else {
            for xm in x.iter_mut() {
                *xm *= 1.0 + step;
            }
            if step >= step_max {
                x[away] = 0.0;
            } else {
                x[away] -= step;
                if x[away] < 0.0 {
                    x[away] = 0.0;
                }
            }
        }
        if opts.record_trace {
            trace.push(obj);
        }
        iter += 1;
    }
}

fn frequencies_into(sets: &[ActivationSet], x: &[f64], f: &mut [f64]) {
    f.iter_mut().for_each(|v| *v = 0.0);
    for (s, &p) in sets.iter().zip(x) {
        if p > 0.0 {
            for &e in s.links() {
                f[e] += p;
            }
        }
    }
}

/// Minimizes `φ(t) = Σ a_e / (f_e + t·d_e)` over `[0, t_max]` by bisection
/// on the derivative, which is increasing since `φ` is convex.
fn line_search(a: &[f64], f: &[f64], d: &[f64], t_max: f64) -> f64 {
    let slope = |t: f64| -> f64 {
        a.iter()
            .zip(f)
            .zip(d)
            .filter(|(_, &de)| de != 0.0)
            .map(|((&ae, &fe), &de)| {
                let v = (fe + t * de).max(F_FLOOR);
                -ae * de / (v * v)
            })
            .sum()
    };
    let mut hi = t_max;
    if !hi.is_finite() {
        // unbounded away step; find where the slope turns positive
        hi = 1.0;
        while slope(hi) < 0.0 && hi < 1e12 {
            hi *= 2.0;
        }
    }
    if slope(hi) <= 0.0 {
        return hi;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

fn finish(
    net: &NetworkSpec,
    family: &ActivationSetFamily,
    sets: Vec<ActivationSet>,
    x: Vec<f64>,
    iterations: usize,
    trace: Vec<f64>,
) -> Result<GeneralSolution> {
    let total: f64 = x.iter().sum();
    let (sets, probs): (Vec<_>, Vec<_>) = sets
        .into_iter()
        .zip(x)
        .filter(|(_, p)| *p > 0.0)
        .map(|(s, p)| (s, p / total))
        .unzip();
    let policy = SchedulePolicy::new(net.n_links(), sets, probs)?;
    let objective = peak_age_of(policy.frequencies(), net)?;
    let certificate = certify(&policy, net, family, DEFAULT_TOL)?;
    Ok(GeneralSolution {
        policy,
        certificate,
        iterations,
        objective,
        trace,
    })
}

/// Evaluates the optimality conditions of a stationary policy.
///
/// `tol` is relative to `Ω`; sets with `x_m ≤ tol` are treated as outside
/// the support for the first condition. For k-link families the best
/// response is found without enumeration: it is the `K` links with the
/// largest individual weights.
pub fn certify(
    policy: &SchedulePolicy,
    net: &NetworkSpec,
    family: &ActivationSetFamily,
    tol: f64,
) -> Result<OptimalityCertificate> {
    let n = net.n_links();
    if policy.n_links() != n || family.n_links() != n {
        return Err(invalid("policy, network and family disagree on the number of links"));
    }
    let a = net.effective_weights();
    let f = policy.frequencies().as_slice();
    let omega_m = |s: &[usize]| -> f64 {
        s.iter()
            .map(|&e| if f[e] > 0.0 { a[e] / (f[e] * f[e]) } else { f64::INFINITY })
            .sum()
    };

    let omega_weights: Vec<(ActivationSet, f64)> = policy
        .sets()
        .iter()
        .map(|s| (s.clone(), omega_m(s.links())))
        .collect();
    let omega: f64 = policy
        .probs()
        .iter()
        .zip(&omega_weights)
        .filter(|(p, _)| **p > 0.0)
        .map(|(p, (_, o))| p * o)
        .sum();

    let best_response = match family.k_link_limit() {
        Some(k) => {
            let mut idx: Vec<usize> = (0..n).collect();
            let per_link: Vec<f64> = (0..n).map(|e| omega_m(&[e])).collect();
            idx.sort_by(|&i, &j| per_link[j].total_cmp(&per_link[i]).then(i.cmp(&j)));
            idx.truncate(k.min(n));
            let set = ActivationSet::new(idx)?;
            let w = omega_m(set.links());
            (set, w)
        }
        None => {
            let mut best: Option<(ActivationSet, f64)> = None;
            for s in family.maximal_set_list()? {
                let w = omega_m(s.links());
                if best.as_ref().map_or(true, |(_, b)| w > *b) {
                    best = Some((s, w));
                }
            }
            best.ok_or_else(|| invalid("family has no activation sets"))?
        }
    };

    let gap = if best_response.1.is_infinite() && omega.is_infinite() {
        f64::INFINITY
    } else {
        best_response.1 - omega
    };
    let scale = if omega.is_finite() { omega.abs().max(f64::MIN_POSITIVE) } else { 1.0 };
    let c1 = omega.is_finite()
        && policy
            .probs()
            .iter()
            .zip(&omega_weights)
            .filter(|(p, _)| **p > tol)
            .all(|(_, (_, o))| (o - omega).abs() <= tol * scale);
    let c2 = omega.is_finite() && best_response.1 <= omega + tol * scale;
    let total: f64 = policy.probs().iter().sum();
    let c3 = policy.probs().iter().all(|p| *p >= 0.0) && (total - 1.0).abs() <= tol;

    Ok(OptimalityCertificate {
        omega_weights,
        best_response,
        omega,
        gap,
        conditions: Conditions { c1, c2, c3 },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KLinkSolution {
    pub freq: FrequencyVector,
    pub peak_age: f64,
    /// Multiplier of `Σ f_e ≤ K`; zero when the constraint is slack.
    pub nu: f64,
}

/// Water-filling solution of the k-link problem: `f_e = min(1, sqrt(a_e/ν))`
/// with `a_e = w_e/γ_e` and `ν` chosen so that `Σ f_e = min(K, N)`.
pub fn solve_klink(net: &NetworkSpec, k: usize, tol: f64) -> Result<KLinkSolution> {
    if k == 0 {
        return Err(invalid("k-link problem needs K >= 1"));
    }
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let n = net.n_links();
    let a = net.effective_weights();
    if k >= n {
        let freq = FrequencyVector(vec![1.0; n]);
        let peak_age = peak_age_of(&freq, net)?;
        return Ok(KLinkSolution {
            freq,
            peak_age,
            nu: 0.0,
        });
    }
    let kf = k as f64;
    let total = |nu: f64| -> f64 { a.iter().map(|&ae| (ae / nu).sqrt().min(1.0)).sum() };
    // Σ f(lo) = N > K and Σ f(hi) ≤ K
    let mut lo = a.iter().cloned().fold(f64::INFINITY, f64::min);
    let sum_sqrt: f64 = a.iter().map(|v| v.sqrt()).sum();
    let mut hi = (sum_sqrt / kf).powi(2);
    while hi / lo - 1.0 > 1e-15 {
        let mid = (lo.ln() + 0.5 * (hi.ln() - lo.ln())).exp();
        if mid <= lo || mid >= hi {
            break;
        }
        if total(mid) > kf {
            lo = mid;
        } else {
            hi = mid;
        }
        if (total(hi) - kf).abs() <= tol * kf * 1e-3 {
            break;
        }
    }
    // With the capped set fixed, ν has a closed form; use it when consistent.
    let mut nu = hi;
    let capped: Vec<bool> = a.iter().map(|&ae| ae >= nu).collect();
    let n_capped = capped.iter().filter(|c| **c).count();
    if n_capped < k {
        let free: f64 = a
            .iter()
            .zip(&capped)
            .filter(|(_, c)| !**c)
            .map(|(ae, _)| ae.sqrt())
            .sum();
        let exact = (free / (kf - n_capped as f64)).powi(2);
        let consistent = a
            .iter()
            .zip(&capped)
            .all(|(&ae, &c)| if c { ae >= exact * (1.0 - 1e-12) } else { ae <= exact * (1.0 + 1e-12) });
        if consistent {
            nu = exact;
        }
    }
    let f: Vec<f64> = a.iter().map(|&ae| (ae / nu).sqrt().min(1.0)).collect();
    let freq = FrequencyVector(f);
    let peak_age = peak_age_of(&freq, net)?;
    Ok(KLinkSolution { freq, peak_age, nu })
}

/// Realizes frequencies with `Σ f_e ≤ K` as a distribution over sets of at
/// most `K` links by systematic sampling: lay the `f_e` end to end on
/// `[0, K)` and, for each offset `u ∈ [0,1)`, activate the links covering
/// `u, u+1, …, u+K-1`. At most `N + 1` distinct sets result.
pub fn klink_policy(f: &FrequencyVector, k: usize) -> Result<SchedulePolicy> {
    let n = f.len();
    if let Some(v) = f.as_slice().iter().find(|v| !(**v >= 0.0 && **v <= 1.0 + 1e-12)) {
        return Err(invalid(format!("frequency {v} outside [0, 1]")));
    }
    let total: f64 = f.as_slice().iter().sum();
    if total > k as f64 * (1.0 + 1e-9) {
        return Err(invalid(format!("frequencies sum to {total} > K = {k}")));
    }
    let mut starts = Vec::with_capacity(n);
    let mut acc = 0.0;
    for &v in f.as_slice() {
        starts.push(acc);
        acc += v.min(1.0);
    }
    let mut cuts: Vec<f64> = starts
        .iter()
        .chain(std::iter::once(&acc))
        .map(|s| s - s.floor())
        .collect();
    cuts.push(0.0);
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let mut sets: Vec<ActivationSet> = Vec::new();
    let mut probs: Vec<f64> = Vec::new();
    for w in cuts.windows(2) {
        let len = w[1] - w[0];
        if len <= 0.0 {
            continue;
        }
        let u = 0.5 * (w[0] + w[1]);
        let links: Vec<usize> = (0..n)
            .filter(|&e| {
                let (s, v) = (starts[e], f[e].min(1.0));
                if v <= 0.0 {
                    return false;
                }
                // some integer j with s <= u + j < s + v
                let j = (s - u).ceil();
                u + j < s + v
            })
            .collect();
        let set = ActivationSet::new(links)?;
        match sets.iter().position(|s| *s == set) {
            Some(i) => probs[i] += len,
            None => {
                sets.push(set);
                probs.push(len);
            }
        }
    }
    let norm: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= norm);
    SchedulePolicy::new(n, sets, probs)
}

/// JSON-friendly summary of a solved schedule.
#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub x: Vec<(ActivationSet, f64)>,
    pub f: Vec<f64>,
    pub omega: f64,
    pub gap: f64,
    pub peak_age: f64,
    pub conditions: Conditions,
    pub iterations: usize,
}

impl SolveReport {
    pub fn new(policy: &SchedulePolicy, cert: &OptimalityCertificate, peak_age: f64, iterations: usize) -> Self {
        SolveReport {
            x: policy
                .sets()
                .iter()
                .cloned()
                .zip(policy.probs().iter().cloned())
                .collect(),
            f: policy.frequencies().0.clone(),
            omega: cert.omega,
            gap: cert.gap,
            peak_age,
            conditions: cert.conditions,
            iterations,
        }
    }
}

impl From<&GeneralSolution> for SolveReport {
    fn from(sol: &GeneralSolution) -> Self {
        SolveReport::new(&sol.policy, &sol.certificate, sol.objective, sol.iterations)
    }
}
