use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Scheduling policies compared in the θ sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyName {
    /// Peak-age optimal stationary policy.
    Optimal,
    Uniform,
    RoundRobin,
}

impl PolicyName {
    pub const ALL: [PolicyName; 3] = [PolicyName::Optimal, PolicyName::Uniform, PolicyName::RoundRobin];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyName::Optimal => "optimal",
            PolicyName::Uniform => "uniform",
            PolicyName::RoundRobin => "round-robin",
        }
    }
}

/// JSON experiment description. Every field is optional; missing ones take
/// the experiment's defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default, rename = "N")]
    pub n_links: Option<usize>,
    #[serde(default, rename = "K")]
    pub k: Option<Vec<usize>>,
    #[serde(default)]
    pub gamma_good: Option<f64>,
    #[serde(default)]
    pub gamma_bad: Option<Vec<f64>>,
    #[serde(default)]
    pub theta: Option<Vec<f64>>,
    #[serde(default)]
    pub n_bad: Option<usize>,
    #[serde(default)]
    pub policies: Option<Vec<PolicyName>>,
    #[serde(default)]
    pub horizon: Option<u64>,
    #[serde(default)]
    pub warmup: Option<u64>,
    #[serde(default)]
    pub reps: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Service rate for the queue sweeps.
    #[serde(default)]
    pub mu: Option<f64>,
}

impl ExperimentSpec {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let spec: ExperimentSpec = serde_json::from_str(&text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(thetas) = &self.theta {
            if let Some(t) = thetas.iter().find(|t| !(0.0..=1.0).contains(*t)) {
                return Err(invalid(format!("theta {t} outside [0, 1]")));
            }
        }
        if let (Some(n), Some(b)) = (self.n_links, self.n_bad) {
            if b > n {
                return Err(invalid(format!("n_bad {b} exceeds N = {n}")));
            }
        }
        if let Some(ks) = &self.k {
            if ks.contains(&0) {
                return Err(invalid("K must be at least 1"));
            }
        }
        if self.reps == Some(0) {
            return Err(invalid("reps must be at least 1"));
        }
        if let (Some(h), Some(w)) = (self.horizon, self.warmup) {
            if w >= h {
                return Err(invalid("warmup must be shorter than the horizon"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_spec_parses() {
        let s: ExperimentSpec =
            serde_json::from_str(r#"{"N": 20, "K": [2], "theta": [0.0, 0.5], "policies": ["optimal", "round-robin"]}"#)
                .unwrap();
        assert_eq!(s.n_links, Some(20));
        assert_eq!(s.policies, Some(vec![PolicyName::Optimal, PolicyName::RoundRobin]));
        assert!(s.validate().is_ok());
    }

    #[test]
    fn rejects_bad_values() {
        let bad_theta = ExperimentSpec {
            theta: Some(vec![1.5]),
            ..Default::default()
        };
        assert!(bad_theta.validate().is_err());
        let bad_count = ExperimentSpec {
            n_links: Some(5),
            n_bad: Some(6),
            ..Default::default()
        };
        assert!(bad_count.validate().is_err());
        assert!(serde_json::from_str::<ExperimentSpec>(r#"{"horizn": 5}"#).is_err());
    }
}
