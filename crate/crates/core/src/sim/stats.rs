use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run, RunConfig, RunOutput, Scheduler, SourceKind};
use crate::error::{invalid, Result};
use crate::net::{ActivationSetFamily, NetworkSpec};

pub const CSV_VERSION: &str = "freshnet-csv v1";

/// Everything except the seed.
#[derive(Clone, Debug)]
pub struct RunSpec {
    pub net: NetworkSpec,
    pub family: ActivationSetFamily,
    pub scheduler: Scheduler,
    pub sources: Vec<SourceKind>,
    pub horizon: u64,
    pub warmup: u64,
}

impl RunSpec {
    pub fn run(&self, seed: u64) -> Result<RunOutput> {
        let cfg = RunConfig {
            horizon: self.horizon,
            warmup: self.warmup,
            seed,
            record_schedule: false,
        };
        run(&self.net, &self.family, &self.scheduler, &self.sources, &cfg)
    }
}

/// Mean across replications with a normal-approximation 95% half-width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub half_width: f64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = pairwise_sum(xs) / n;
        if xs.len() < 2 {
            return Estimate {
                mean,
                half_width: 0.0,
            };
        }
        let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = pairwise_sum(&dev) / (n - 1.0);
        Estimate {
            mean,
            half_width: 1.96 * (var / n).sqrt(),
        }
    }
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkEstimate {
    pub f_hat: Estimate,
    pub peak: Estimate,
    pub ave: Estimate,
    pub q_mean: Estimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgeMetrics {
    pub links: Vec<LinkEstimate>,
    pub weighted_peak: Estimate,
    pub weighted_ave: Estimate,
    /// `Σ w_e/(γ_e f̂_e)` per replication.
    pub frequency_peak: Estimate,
    pub reps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Replicated {
    pub runs: Vec<RunOutput>,
    pub metrics: AgeMetrics,
    pub base_seed: u64,
}

/// Runs `reps` independent replications with seeds `base_seed + i`, in
/// parallel.
pub fn replicate(spec: &RunSpec, reps: usize, base_seed: u64) -> Result<Replicated> {
    if reps == 0 {
        return Err(invalid("at least one replication required"));
    }
    let runs: Vec<RunOutput> = (0..reps as u64)
        .into_par_iter()
        .map(|i| spec.run(base_seed.wrapping_add(i)))
        .collect::<Result<_>>()?;
    let metrics = summarize(&spec.net, &runs);
    Ok(Replicated {
        runs,
        metrics,
        base_seed,
    })
}

pub fn summarize(net: &NetworkSpec, runs: &[RunOutput]) -> AgeMetrics {
    let n = net.n_links();
    let column = |get: &dyn Fn(&RunOutput) -> f64| -> Estimate {
        let xs: Vec<f64> = runs.iter().map(get).collect();
        Estimate::from_samples(&xs)
    };
    let links = (0..n)
        .map(|e| LinkEstimate {
            f_hat: column(&|r| r.links[e].f_hat),
            peak: column(&|r| r.links[e].peak),
            ave: column(&|r| r.links[e].ave),
            q_mean: column(&|r| r.links[e].q_mean),
        })
        .collect();
    AgeMetrics {
        links,
        weighted_peak: column(&|r| r.weighted_peak),
        weighted_ave: column(&|r| r.weighted_ave),
        frequency_peak: column(&|r| super::peak_from_frequencies(net, r)),
        reps: runs.len(),
    }
}

/// One row per (replication, link) and one weighted row per replication,
/// preceded by a version comment.
pub fn write_csv<W: Write>(mut out: W, name: &str, rep: &Replicated) -> Result<()> {
    writeln!(out, "# {CSV_VERSION} {name}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rep", "link", "f_hat", "peak", "ave", "q_mean"])?;
    for (i, r) in rep.runs.iter().enumerate() {
        let seed_idx = i.to_string();
        for (e, l) in r.links.iter().enumerate() {
            w.write_record([
                seed_idx.clone(),
                e.to_string(),
                l.f_hat.to_string(),
                l.peak.to_string(),
                l.ave.to_string(),
                l.q_mean.to_string(),
            ])?;
        }
        w.write_record([
            seed_idx,
            "weighted".to_string(),
            String::new(),
            r.weighted_peak.to_string(),
            r.weighted_ave.to_string(),
            String::new(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::ActivationSet;

    fn spec(horizon: u64) -> RunSpec {
        let net = NetworkSpec::uniform(vec![0.5, 0.5]).unwrap();
        RunSpec {
            family: ActivationSetFamily::k_link(2, 1).unwrap(),
            scheduler: Scheduler::Stationary {
                sets: vec![ActivationSet::new(vec![0]).unwrap(), ActivationSet::new(vec![1]).unwrap()],
                probs: vec![0.5, 0.5],
            },
            sources: vec![SourceKind::Active; 2],
            net,
            horizon,
            warmup: horizon / 10,
        }
    }

    #[test]
    fn single_rep_has_zero_half_width() {
        let r = replicate(&spec(10_000), 1, 0).unwrap();
        assert_eq!(r.metrics.weighted_peak.half_width, 0.0);
        assert_eq!(r.metrics.reps, 1);
    }

    #[test]
    fn seeds_are_consecutive() {
        let s = spec(5_000);
        let r = replicate(&s, 3, 10).unwrap();
        assert_eq!(r.runs[2], s.run(12).unwrap());
    }

    #[test]
    fn symmetric_links_agree() {
        let r = replicate(&spec(100_000), 10, 1).unwrap();
        let (a, b) = (&r.metrics.links[0].peak, &r.metrics.links[1].peak);
        assert!((a.mean - b.mean).abs() <= a.half_width + b.half_width);
    }

    #[test]
    fn half_width_shrinks_with_reps() {
        let s = spec(20_000);
        let small = replicate(&s, 16, 100).unwrap().metrics.weighted_peak.half_width;
        let large = replicate(&s, 64, 100).unwrap().metrics.weighted_peak.half_width;
        let ratio = large / small;
        // expected 1/2; sampling noise in both estimates
        assert!(ratio > 0.3 && ratio < 0.8, "ratio {ratio}");
    }

    #[test]
    fn estimate_arithmetic() {
        let e = Estimate::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((e.half_width - 1.96 * sd / 2.0).abs() < 1e-12);
    }

    #[test]
    fn csv_layout() {
        let r = replicate(&spec(1_000), 2, 0).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, "test", &r).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# freshnet-csv v1 test");
        assert_eq!(lines[1], "rep,link,f_hat,peak,ave,q_mean");
        assert_eq!(lines.len(), 2 + 2 * 3);
        assert!(lines[4].starts_with("0,weighted,"));
    }
}
