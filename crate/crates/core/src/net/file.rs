use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ActivationSetFamily, NetworkSpec};
use crate::error::{invalid, Result};

/// JSON network description.
///
/// ```json
/// {"links": 4, "weights": "uniform",
///  "gamma": {"good": 0.9, "bad": 0.1, "theta": 0.5},
///  "interference": {"kind": "k-link", "K": 2}}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub links: usize,
    #[serde(default)]
    pub weights: WeightSpec,
    pub gamma: GammaSpec,
    pub interference: InterferenceSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    Uniform(UniformTag),
    Values(Vec<f64>),
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec::Uniform(UniformTag::Uniform)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UniformTag {
    Uniform,
}

/// Per-link success probabilities, or a good/bad split where the first
/// `n_bad` links (default `round(theta * links)`) have the bad channel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaSpec {
    Values(Vec<f64>),
    Pattern {
        good: f64,
        bad: f64,
        #[serde(default)]
        theta: Option<f64>,
        #[serde(default)]
        n_bad: Option<usize>,
    },
}

impl GammaSpec {
    pub fn expand(&self, links: usize) -> Result<Vec<f64>> {
        match self {
            GammaSpec::Values(v) => {
                if v.len() != links {
                    return Err(invalid(format!("gamma has {} entries for {links} links", v.len())));
                }
                Ok(v.clone())
            }
            GammaSpec::Pattern {
                good,
                bad,
                theta,
                n_bad,
            } => {
                let n_bad = match (theta, n_bad) {
                    (_, Some(n)) => *n,
                    (Some(t), None) => {
                        if !(0.0..=1.0).contains(t) {
                            return Err(invalid(format!("theta must be in [0, 1], got {t}")));
                        }
                        (t * links as f64).round() as usize
                    }
                    (None, None) => return Err(invalid("gamma pattern needs theta or n_bad")),
                };
                if n_bad > links {
                    return Err(invalid(format!("n_bad = {n_bad} exceeds {links} links")));
                }
                Ok(bad_first(links, n_bad, *good, *bad))
            }
        }
    }
}

pub(crate) fn bad_first(links: usize, n_bad: usize, good: f64, bad: f64) -> Vec<f64> {
    (0..links).map(|e| if e < n_bad { bad } else { good }).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InterferenceSpec {
    KLink {
        #[serde(rename = "K")]
        k: usize,
    },
    Explicit {
        sets: Vec<Vec<usize>>,
    },
    SingleHop {
        edges: Vec<(usize, usize)>,
    },
}

impl NetworkFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn network(&self) -> Result<NetworkSpec> {
        let gamma = self.gamma.expand(self.links)?;
        let weights = match &self.weights {
            WeightSpec::Uniform(_) => vec![1.0; self.links],
            WeightSpec::Values(v) => v.clone(),
        };
        NetworkSpec::new(weights, gamma)
    }

    pub fn family(&self) -> Result<ActivationSetFamily> {
        let fam = match &self.interference {
            InterferenceSpec::KLink { k } => ActivationSetFamily::k_link(self.links, *k)?,
            InterferenceSpec::Explicit { sets } => {
                ActivationSetFamily::explicit(self.links, sets.clone())?
            }
            InterferenceSpec::SingleHop { edges } => {
                let fam = ActivationSetFamily::single_hop(edges.clone())?;
                if fam.n_links() != self.links {
                    return Err(invalid(format!(
                        "{} edges given for {} links",
                        fam.n_links(),
                        self.links
                    )));
                }
                fam
            }
        };
        Ok(fam)
    }

    pub fn build(&self) -> Result<(NetworkSpec, ActivationSetFamily)> {
        Ok((self.network()?, self.family()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pattern_network() {
        let file: NetworkFile = serde_json::from_str(
            r#"{"links": 4, "weights": "uniform",
                "gamma": {"good": 0.9, "bad": 0.1, "theta": 0.5},
                "interference": {"kind": "k-link", "K": 2}}"#,
        )
        .unwrap();
        let (net, fam) = file.build().unwrap();
        assert_eq!(net.gamma(), &[0.1, 0.1, 0.9, 0.9]);
        assert_eq!(net.weights(), &[0.25; 4]);
        assert_eq!(fam.k_link_limit(), Some(2));
    }

    #[test]
    fn parses_explicit_and_single_hop() {
        let file: NetworkFile = serde_json::from_str(
            r#"{"links": 2, "weights": [1, 3], "gamma": [1, 0.5],
                "interference": {"kind": "explicit", "sets": [[0], [1]]}}"#,
        )
        .unwrap();
        let (net, fam) = file.build().unwrap();
        assert_eq!(net.raw_weights(), &[1.0, 3.0]);
        assert_eq!(fam.maximal_set_list().unwrap().len(), 2);

        let file: NetworkFile = serde_json::from_str(
            r#"{"links": 3, "gamma": [1, 1, 1],
                "interference": {"kind": "single-hop", "edges": [[0,1],[1,2],[2,3]]}}"#,
        )
        .unwrap();
        assert_eq!(file.family().unwrap().maximal_set_list().unwrap().len(), 2);
    }

    #[test]
    fn rejects_mismatched_lengths() {
        let file: NetworkFile = serde_json::from_str(
            r#"{"links": 3, "gamma": [1, 1],
                "interference": {"kind": "k-link", "K": 1}}"#,
        )
        .unwrap();
        assert!(file.network().is_err());
    }

    #[test]
    fn explicit_n_bad_overrides_theta() {
        let g = GammaSpec::Pattern {
            good: 0.9,
            bad: 0.2,
            theta: Some(0.5),
            n_bad: Some(1),
        };
        assert_eq!(g.expand(3).unwrap(), vec![0.2, 0.9, 0.9]);
    }
}
