//! Network model: links, interference structure and the polytope of feasible
//! link activation frequencies.

mod family;
mod feasibility;
mod file;

pub use family::{matchings_of_graph, ActivationSetFamily, Interference, DEFAULT_MATCHING_LINK_CAP, DEFAULT_SET_CAP};
pub use feasibility::{check_feasible, Feasibility, DEFAULT_FEASIBILITY_TOL};
pub(crate) use file::bad_first;
pub use file::{GammaSpec, InterferenceSpec, NetworkFile, WeightSpec};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Dense link index in `0..n_links`.
pub type LinkId = usize;

/// A set of links that may transmit together. Always sorted and free of
/// duplicates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActivationSet(Vec<LinkId>);

impl ActivationSet {
    pub fn new(mut links: Vec<LinkId>) -> Result<Self> {
        links.sort_unstable();
        if links.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid(format!("duplicate link in activation set {links:?}")));
        }
        Ok(ActivationSet(links))
    }

    pub(crate) fn from_sorted(links: Vec<LinkId>) -> Self {
        debug_assert!(links.windows(2).all(|w| w[0] < w[1]));
        ActivationSet(links)
    }

    pub fn empty() -> Self {
        ActivationSet(Vec::new())
    }

    pub fn links(&self) -> &[LinkId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, link: LinkId) -> bool {
        self.0.binary_search(&link).is_ok()
    }

    /// Subset test on two sorted lists.
    pub fn is_subset_of(&self, other: &ActivationSet) -> bool {
        is_sorted_subset(&self.0, &other.0)
    }

    pub(crate) fn without(&self, link: LinkId) -> ActivationSet {
        ActivationSet(self.0.iter().copied().filter(|&e| e != link).collect())
    }
}

pub(crate) fn is_sorted_subset(small: &[usize], big: &[usize]) -> bool {
    if small.len() > big.len() {
        return false;
    }
    let mut j = 0;
    for &e in small {
        while j < big.len() && big[j] < e {
            j += 1;
        }
        if j == big.len() || big[j] != e {
            return false;
        }
        j += 1;
    }
    true
}

/// Links with importance weights and channel success probabilities.
///
/// Weights are normalized to sum to one on construction; the values passed in
/// are kept for reporting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    raw_weights: Vec<f64>,
    weights: Vec<f64>,
    gamma: Vec<f64>,
}

impl NetworkSpec {
    pub fn new(weights: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(invalid("network needs at least one link"));
        }
        if weights.len() != gamma.len() {
            return Err(invalid(format!(
                "{} weights but {} channel probabilities",
                weights.len(),
                gamma.len()
            )));
        }
        if let Some((e, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
            return Err(invalid(format!("weight of link {e} must be positive, got {w}")));
        }
        if let Some((e, g)) = gamma.iter().enumerate().find(|(_, g)| !(**g > 0.0 && **g <= 1.0)) {
            return Err(invalid(format!("channel success of link {e} must be in (0, 1], got {g}")));
        }
        let total: f64 = weights.iter().sum();
        let normalized = weights.iter().map(|w| w / total).collect();
        Ok(NetworkSpec {
            raw_weights: weights,
            weights: normalized,
            gamma,
        })
    }

    /// Equal weights.
    pub fn uniform(gamma: Vec<f64>) -> Result<Self> {
        Self::new(vec![1.0; gamma.len()], gamma)
    }

    pub fn n_links(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn raw_weights(&self) -> &[f64] {
        &self.raw_weights
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// `w_e / γ_e`: the channel enters the peak-age objective only through
    /// this ratio.
    pub fn effective_weights(&self) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.gamma)
            .map(|(w, g)| w / g)
            .collect()
    }
}

/// `M[e][m] = 1` iff link `e` belongs to set `m`.
#[derive(Clone, Debug)]
pub struct IncidenceMatrix {
    n_links: usize,
    n_sets: usize,
    entries: Vec<u8>,
}

impl IncidenceMatrix {
    pub fn new(n_links: usize, sets: &[ActivationSet]) -> Self {
        let mut entries = vec![0u8; n_links * sets.len()];
        for (m, set) in sets.iter().enumerate() {
            for &e in set.links() {
                entries[e * sets.len() + m] = 1;
            }
        }
        IncidenceMatrix {
            n_links,
            n_sets: sets.len(),
            entries,
        }
    }

    pub fn n_links(&self) -> usize {
        self.n_links
    }

    pub fn n_sets(&self) -> usize {
        self.n_sets
    }

    pub fn get(&self, link: LinkId, set: usize) -> u8 {
        self.entries[link * self.n_sets + set]
    }

    /// `f = M x`.
    pub fn apply(&self, x: &[f64]) -> FrequencyVector {
        assert_eq!(x.len(), self.n_sets);
        let f = (0..self.n_links)
            .map(|e| {
                let row = &self.entries[e * self.n_sets..(e + 1) * self.n_sets];
                row.iter().zip(x).filter(|(m, _)| **m == 1).map(|(_, xm)| xm).sum()
            })
            .collect();
        FrequencyVector(f)
    }
}

/// Per-link activation frequencies `f_e`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrequencyVector(pub Vec<f64>);

impl FrequencyVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Index<LinkId> for FrequencyVector {
    type Output = f64;

    fn index(&self, e: LinkId) -> &f64 {
        &self.0[e]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_are_normalized_and_raw_kept() {
        let net = NetworkSpec::new(vec![1.0, 3.0], vec![1.0, 0.5]).unwrap();
        assert_eq!(net.weights(), &[0.25, 0.75]);
        assert_eq!(net.raw_weights(), &[1.0, 3.0]);
        assert_eq!(net.effective_weights(), vec![0.25, 1.5]);
    }

    #[test]
    fn rejects_bad_links() {
        assert!(NetworkSpec::new(vec![1.0], vec![0.0]).is_err());
        assert!(NetworkSpec::new(vec![0.0], vec![0.5]).is_err());
        assert!(NetworkSpec::new(vec![1.0, 1.0], vec![0.5]).is_err());
        assert!(NetworkSpec::new(vec![], vec![]).is_err());
    }

    #[test]
    fn activation_set_is_sorted_and_unique() {
        let s = ActivationSet::new(vec![3, 1, 2]).unwrap();
        assert_eq!(s.links(), &[1, 2, 3]);
        assert!(ActivationSet::new(vec![1, 1]).is_err());
        let big = ActivationSet::new(vec![0, 1, 2, 3]).unwrap();
        assert!(s.is_subset_of(&big));
        assert!(!big.is_subset_of(&s));
    }

    #[test]
    fn incidence_matches_membership() {
        let sets = vec![
            ActivationSet::new(vec![0]).unwrap(),
            ActivationSet::new(vec![0, 2]).unwrap(),
        ];
        let m = IncidenceMatrix::new(3, &sets);
        for (j, set) in sets.iter().enumerate() {
            for e in 0..3 {
                assert_eq!(m.get(e, j) == 1, set.contains(e));
            }
        }
        assert_eq!(m.apply(&[0.25, 0.5]).0, vec![0.75, 0.0, 0.5]);
    }
}
