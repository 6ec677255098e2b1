//! Age of information for a discrete-time FIFO queue with Bernoulli service.
//!
//! Service succeeds in each slot with probability `μ`. Inter-arrival times
//! `X` are i.i.d. with moment generating function `M_X`. The steady-state
//! system time is geometric with rate `α*`, the root of
//! `α = μ - μ M_X(ln(1-α))` in `(0, μ]`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::{bisect, golden_section};

/// Central-difference step for general MGFs.
pub const FD_STEP: f64 = 1e-6;
/// Step for the second difference; a smaller step loses everything to
/// cancellation.
pub const FD_STEP2: f64 = 1e-4;
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

/// Inter-arrival distribution seen through its MGF.
pub trait InterArrival {
    /// `λ = 1 / E[X]`.
    fn rate(&self) -> f64;

    /// `E[e^{sX}]` for `s ≤ 0`.
    fn mgf(&self, s: f64) -> f64;

    fn mgf_d1(&self, s: f64) -> f64 {
        (self.mgf(s + FD_STEP) - self.mgf(s - FD_STEP)) / (2.0 * FD_STEP)
    }

    fn mgf_d2(&self, s: f64) -> f64 {
        let h = FD_STEP2;
        (self.mgf(s + h) - 2.0 * self.mgf(s) + self.mgf(s - h)) / (h * h)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ArrivalProcess {
    /// A packet in each slot with probability `rate`; geometric gaps.
    Bernoulli { rate: f64 },
    /// A packet every `period` slots.
    Periodic { period: u64 },
}

impl ArrivalProcess {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ArrivalProcess::Bernoulli { rate } if !(rate > 0.0 && rate <= 1.0) => {
                Err(invalid(format!("Bernoulli rate must be in (0, 1], got {rate}")))
            }
            ArrivalProcess::Periodic { period: 0 } => Err(invalid("period must be at least 1")),
            _ => Ok(()),
        }
    }
}

impl InterArrival for ArrivalProcess {
    fn rate(&self) -> f64 {
        match *self {
            ArrivalProcess::Bernoulli { rate } => rate,
            ArrivalProcess::Periodic { period } => 1.0 / period as f64,
        }
    }

    fn mgf(&self, s: f64) -> f64 {
        match *self {
            ArrivalProcess::Bernoulli { rate } => {
                let z = s.exp();
                rate * z / (1.0 - (1.0 - rate) * z)
            }
            ArrivalProcess::Periodic { period } => (period as f64 * s).exp(),
        }
    }

    fn mgf_d1(&self, s: f64) -> f64 {
        match *self {
            ArrivalProcess::Bernoulli { rate } => {
                let z = s.exp();
                let den = 1.0 - (1.0 - rate) * z;
                rate * z / (den * den)
            }
            ArrivalProcess::Periodic { period } => {
                let d = period as f64;
                d * (d * s).exp()
            }
        }
    }

    fn mgf_d2(&self, s: f64) -> f64 {
        match *self {
            ArrivalProcess::Bernoulli { rate } => {
                let z = s.exp();
                let q = (1.0 - rate) * z;
                let den = 1.0 - q;
                rate * z * (1.0 + q) / (den * den * den)
            }
            ArrivalProcess::Periodic { period } => {
                let d = period as f64;
                d * d * (d * s).exp()
            }
        }
    }
}

/// Any renewal arrival process given by a rate and an MGF closure.
pub struct GeneralArrival<F: Fn(f64) -> f64> {
    pub rate: f64,
    pub mgf: F,
}

impl<F: Fn(f64) -> f64> InterArrival for GeneralArrival<F> {
    fn rate(&self) -> f64 {
        self.rate
    }

    fn mgf(&self, s: f64) -> f64 {
        (self.mgf)(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgePair {
    pub peak: f64,
    pub average: f64,
}

impl AgePair {
    pub fn get(&self, metric: AgeMetric) -> f64 {
        match metric {
            AgeMetric::Peak => self.peak,
            AgeMetric::Average => self.average,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArrivalKind {
    Bernoulli,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AgeMetric {
    #[serde(rename = "peak")]
    Peak,
    #[serde(rename = "ave")]
    Average,
}

/// A link's queue: arrivals plus Bernoulli service at rate `mu = γ f`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueueModel {
    pub arrival: ArrivalProcess,
    pub mu: f64,
}

impl QueueModel {
    pub fn rho(&self) -> f64 {
        self.arrival.rate() / self.mu
    }

    pub fn age(&self) -> Result<AgePair> {
        self.arrival.validate()?;
        gber1_age(&self.arrival, self.mu)
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(invalid(format!("service rate must be in (0, 1], got {mu}")));
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(invalid(format!("occupancy must be in (0, 1), got {rho}")));
    }
    Ok(())
}

/// Geometric rate of the system time.
///
/// `g(α) = α - μ + μ M_X(ln(1-α))` is convex with `g(0) = 0` and
/// `g'(0) = 1 - μ/λ < 0`, so it is negative up to its unique interior root.
/// The bracket starts just above zero and ends at `μ`, where `g > 0`.
pub fn alpha_star<A: InterArrival + ?Sized>(arrival: &A, mu: f64, tol: f64) -> Result<f64> {
    check_mu(mu)?;
    let lambda = arrival.rate();
    if !(lambda < mu) {
        return Err(Error::UnstableQueue { lambda, mu });
    }
    if mu == 1.0 {
        return Ok(1.0);
    }
    let g = |a: f64| a - mu + mu * arrival.mgf((1.0 - a).ln());
    let mut lo = lambda * 1e-6;
    while g(lo) >= 0.0 {
        lo *= 10.0;
        if lo >= mu {
            return Err(Error::NoBracket(format!(
                "g(α) has no negative value below μ = {mu}"
            )));
        }
    }
    let hi = mu;
    if !(g(hi) > 0.0) {
        return Err(Error::NoBracket(format!("g(μ) = {} is not positive", g(hi))));
    }
    let root = bisect(g, lo, hi);
    if g(root).abs() > tol.max(1e-15) {
        return Err(Error::NoBracket(format!(
            "residual {} above tolerance {tol}",
            g(root).abs()
        )));
    }
    Ok(root)
}

/// Peak age `1/α* + 1/λ` and average age
/// `λ [M''(0)/2 + M'(ln(1-α*))/α*] + 1/μ + 1/2`.
pub fn gber1_age<A: InterArrival + ?Sized>(arrival: &A, mu: f64) -> Result<AgePair> {
    let alpha = alpha_star(arrival, mu, DEFAULT_ROOT_TOL)?;
    let lambda = arrival.rate();
    let tail = if alpha >= 1.0 {
        0.0
    } else {
        arrival.mgf_d1((1.0 - alpha).ln()) / alpha
    };
    Ok(AgePair {
        peak: 1.0 / alpha + 1.0 / lambda,
        average: lambda * (arrival.mgf_d2(0.0) / 2.0 + tail) + 1.0 / mu + 0.5,
    })
}

/// Closed-form Bernoulli arrivals and Bernoulli service with
/// `μ = γ f` and `λ = ρ μ`.
pub fn berber1_age(f: f64, gamma: f64, rho: f64) -> Result<AgePair> {
    berber1_from_mu(f * gamma, rho)
}

pub(crate) fn berber1_from_mu(mu: f64, rho: f64) -> Result<AgePair> {
    check_mu(mu)?;
    check_rho(rho)?;
    if mu == 1.0 {
        let v = 1.0 + 1.0 / rho;
        return Ok(AgePair { peak: v, average: v });
    }
    let r = rho / (1.0 - rho);
    Ok(AgePair {
        peak: (1.0 / rho + 1.0 / (1.0 - rho)) / mu - r,
        average: (1.0 + 1.0 / rho + rho * r) / mu - rho * r,
    })
}

/// Root in `(0, 1]` of `σ = 1 - (1 - μσ)^D` other than zero, for real
/// `D > 1/μ`.
pub fn sigma_star(mu: f64, d: f64) -> Result<f64> {
    check_mu(mu)?;
    if !(d * mu > 1.0) {
        return Err(Error::UnstableQueue {
            lambda: 1.0 / d,
            mu,
        });
    }
    if mu == 1.0 {
        return Ok(1.0);
    }
    // g < 0 strictly between the two roots
    let g = |s: f64| s - 1.0 + (1.0 - mu * s).powf(d);
    first_interior_root(g, "σ*")
}

/// Root in `(0, 1)` of `σ = 1 - exp(-σ/ρ)`.
pub fn sigma_hat(rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let g = |s: f64| s - 1.0 + (-s / rho).exp();
    first_interior_root(g, "σ̂")
}

fn first_interior_root(g: impl Fn(f64) -> f64, name: &str) -> Result<f64> {
    let mut lo = 1e-9;
    while g(lo) >= 0.0 {
        lo *= 2.0;
        if lo >= 1.0 {
            return Err(Error::NoBracket(format!("{name}: no sign change above zero")));
        }
    }
    if g(1.0) < 0.0 {
        return Err(Error::NoBracket(format!("{name}: g(1) is negative")));
    }
    if g(1.0) == 0.0 {
        return Ok(1.0);
    }
    Ok(bisect(g, lo, 1.0))
}

/// Periodic arrivals every `D` slots with Bernoulli service `μ = γ f`.
pub fn dber1_age(f: f64, gamma: f64, period: u64) -> Result<AgePair> {
    if period == 0 {
        return Err(invalid("period must be at least 1"));
    }
    dber1_real(f * gamma, period as f64)
}

/// Same as [`dber1_age`] with a real-valued period.
pub fn dber1_real(mu: f64, d: f64) -> Result<AgePair> {
    let sigma = sigma_star(mu, d)?;
    let rho = 1.0 / (d * mu);
    Ok(AgePair {
        peak: (1.0 / rho + 1.0 / sigma) / mu,
        average: (1.0 / (2.0 * rho) + 1.0 / sigma) / mu + 0.5,
    })
}

/// Continuous-time M/M/1 expressions with unit mean service `1/μ`.
pub fn mm1_bound(mu: f64, rho: f64) -> Result<AgePair> {
    check_mu(mu)?;
    check_rho(rho)?;
    Ok(AgePair {
        peak: (1.0 / rho + 1.0 / (1.0 - rho)) / mu,
        average: (1.0 + 1.0 / rho + rho * rho / (1.0 - rho)) / mu,
    })
}

/// Continuous-time D/M/1 expressions.
pub fn dm1_bound(mu: f64, rho: f64) -> Result<AgePair> {
    check_mu(mu)?;
    let s = sigma_hat(rho)?;
    Ok(AgePair {
        peak: (1.0 / rho + 1.0 / s) / mu,
        average: (1.0 / (2.0 * rho) + 1.0 / s) / mu + 0.5,
    })
}

/// Discrete-time age of a link served at `mu` with occupancy `rho`; the
/// periodic case uses the real period `1/(ρ μ)`.
pub fn discrete_age(kind: ArrivalKind, mu: f64, rho: f64) -> Result<AgePair> {
    match kind {
        ArrivalKind::Bernoulli => berber1_from_mu(mu, rho),
        ArrivalKind::Periodic => {
            check_rho(rho)?;
            dber1_real(mu, 1.0 / (rho * mu))
        }
    }
}

const RHO_EPS: f64 = 1e-6;
const RHO_TOL: f64 = 1e-10;

/// Occupancy that minimizes the continuous-time upper bound; the same value
/// for every link regardless of its service rate.
pub fn optimal_rho(kind: ArrivalKind, metric: AgeMetric) -> f64 {
    match (kind, metric) {
        (ArrivalKind::Bernoulli, AgeMetric::Peak) => 0.5,
        (ArrivalKind::Bernoulli, AgeMetric::Average) => {
            // stationary point of 1 + 1/ρ + ρ²/(1-ρ)
            bisect(|r| r.powi(4) - 2.0 * r.powi(3) + r * r - 2.0 * r + 1.0, 0.0, 1.0)
        }
        (ArrivalKind::Periodic, metric) => {
            let bracket = |r: f64| {
                let s = sigma_hat(r).expect("occupancy in (0, 1)");
                match metric {
                    AgeMetric::Peak => 1.0 / r + 1.0 / s,
                    AgeMetric::Average => 1.0 / (2.0 * r) + 1.0 / s,
                }
            };
            golden_section(bracket, RHO_EPS, 1.0 - RHO_EPS, RHO_TOL).0
        }
    }
}

/// Smallest discrete-time age over the occupancy, and its argmin.
pub fn best_rho(kind: ArrivalKind, metric: AgeMetric, mu: f64) -> Result<(f64, f64)> {
    check_mu(mu)?;
    let age = |r: f64| discrete_age(kind, mu, r).map(|a| a.get(metric)).unwrap_or(f64::INFINITY);
    let lo = match kind {
        ArrivalKind::Bernoulli => RHO_EPS,
        // periods beyond 1e6 slots are irrelevant and slow to evaluate
        ArrivalKind::Periodic => RHO_EPS.max(1e-6 / mu),
    };
    let (r, v) = golden_section(age, lo, 1.0 - RHO_EPS, RHO_TOL);
    Ok((r, v))
}

/// Excess age from using the universal occupancy instead of the per-link
/// best one.
pub fn delta_gap(kind: ArrivalKind, metric: AgeMetric, mu: f64) -> Result<f64> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(invalid(format!("service rate must be in (0, 1), got {mu}")));
    }
    let at_bar = discrete_age(kind, mu, optimal_rho(kind, metric))?.get(metric);
    let (_, best) = best_rho(kind, metric, mu)?;
    Ok(at_bar - best.min(at_bar))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub kind: ArrivalKind,
    pub metric: AgeMetric,
    pub rho_bar: f64,
    pub factor: f64,
}

/// Multiplicative optimality factors of the separation policy.
///
/// The periodic-average entry is twice the D/M/1 average bracket evaluated at
/// its own optimal occupancy, mirroring the Bernoulli-average entry.
pub fn factor_bounds() -> [Factor; 4] {
    let bp = optimal_rho(ArrivalKind::Bernoulli, AgeMetric::Peak);
    let ba = optimal_rho(ArrivalKind::Bernoulli, AgeMetric::Average);
    let pp = optimal_rho(ArrivalKind::Periodic, AgeMetric::Peak);
    let pa = optimal_rho(ArrivalKind::Periodic, AgeMetric::Average);
    let s_pp = sigma_hat(pp).expect("valid occupancy");
    let s_pa = sigma_hat(pa).expect("valid occupancy");
    [
        Factor {
            kind: ArrivalKind::Bernoulli,
            metric: AgeMetric::Peak,
            rho_bar: bp,
            factor: 1.0 / bp + 1.0 / (1.0 - bp),
        },
        Factor {
            kind: ArrivalKind::Bernoulli,
            metric: AgeMetric::Average,
            rho_bar: ba,
            factor: 2.0 * (1.0 + 1.0 / ba + ba * ba / (1.0 - ba)),
        },
        Factor {
            kind: ArrivalKind::Periodic,
            metric: AgeMetric::Peak,
            rho_bar: pp,
            factor: 1.0 / s_pp + 1.0 / pp,
        },
        Factor {
            kind: ArrivalKind::Periodic,
            metric: AgeMetric::Average,
            rho_bar: pa,
            factor: 2.0 * (1.0 / (2.0 * pa) + 1.0 / s_pa),
        },
    ]
}

pub fn factor_for(kind: ArrivalKind, metric: AgeMetric) -> Factor {
    factor_bounds()
        .into_iter()
        .find(|f| f.kind == kind && f.metric == metric)
        .expect("all four combinations are tabulated")
}
