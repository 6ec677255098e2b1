use serde::{Deserialize, Serialize};

use super::{is_sorted_subset, ActivationSet, LinkId};
use crate::error::{invalid, Error, Result};

/// Largest number of activation sets that will be materialized.
pub const DEFAULT_SET_CAP: usize = 1 << 20;
/// Largest graph (in links) whose maximal matchings will be enumerated.
pub const DEFAULT_MATCHING_LINK_CAP: usize = 20;

/// How the feasible activation sets are described.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Interference {
    /// Listed sets; every subset of a listed set is feasible as well.
    Explicit { sets: Vec<ActivationSet> },
    /// Any subset of at most `k` links.
    KLink { k: usize },
    /// Links are graph edges; feasible sets are matchings.
    SingleHop { edges: Vec<(usize, usize)> },
}

/// The collection 𝒜 of feasible activation sets over `n_links` links.
#[derive(Clone, Debug, PartialEq)]
pub struct ActivationSetFamily {
    n_links: usize,
    interference: Interference,
    set_cap: usize,
    matching_link_cap: usize,
}

impl ActivationSetFamily {
    pub fn explicit(n_links: usize, sets: Vec<Vec<LinkId>>) -> Result<Self> {
        let mut parsed = Vec::with_capacity(sets.len());
        for s in sets {
            let set = ActivationSet::new(s)?;
            if let Some(&bad) = set.links().iter().find(|&&e| e >= n_links) {
                return Err(Error::UnknownLink { link: bad, n_links });
            }
            if !parsed.contains(&set) {
                parsed.push(set);
            }
        }
        Ok(Self::from_parts(n_links, Interference::Explicit { sets: parsed }))
    }

    pub fn k_link(n_links: usize, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(invalid("k-link family needs K >= 1"));
        }
        Ok(Self::from_parts(n_links, Interference::KLink { k }))
    }

    /// Single-hop interference on a simple undirected graph; link `i` is
    /// `edges[i]`.
    pub fn single_hop(edges: Vec<(usize, usize)>) -> Result<Self> {
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u == v {
                return Err(invalid(format!("edge {i} is a self loop")));
            }
            let key = (u.min(v), u.max(v));
            if edges[..i].iter().any(|&(a, b)| (a.min(b), a.max(b)) == key) {
                return Err(invalid(format!("edge {i} duplicates an earlier edge")));
            }
        }
        Ok(Self::from_parts(edges.len(), Interference::SingleHop { edges }))
    }

    fn from_parts(n_links: usize, interference: Interference) -> Self {
        ActivationSetFamily {
            n_links,
            interference,
            set_cap: DEFAULT_SET_CAP,
            matching_link_cap: DEFAULT_MATCHING_LINK_CAP,
        }
    }

    pub fn with_set_cap(mut self, cap: usize) -> Self {
        self.set_cap = cap;
        self
    }

    pub fn with_matching_link_cap(mut self, cap: usize) -> Self {
        self.matching_link_cap = cap;
        self
    }

    pub fn n_links(&self) -> usize {
        self.n_links
    }

    pub fn interference(&self) -> &Interference {
        &self.interference
    }

    pub fn set_cap(&self) -> usize {
        self.set_cap
    }

    /// `Some(K)` for k-link families.
    pub fn k_link_limit(&self) -> Option<usize> {
        match self.interference {
            Interference::KLink { k } => Some(k),
            _ => None,
        }
    }

    /// Whether `links` (sorted, distinct) may be activated together.
    pub fn is_feasible(&self, links: &[LinkId]) -> bool {
        if links.iter().any(|&e| e >= self.n_links) {
            return false;
        }
        match &self.interference {
            Interference::Explicit { sets } => {
                links.is_empty() || sets.iter().any(|s| is_sorted_subset(links, s.links()))
            }
            Interference::KLink { k } => links.len() <= *k,
            Interference::SingleHop { edges } => {
                for (i, &a) in links.iter().enumerate() {
                    let (u1, v1) = edges[a];
                    for &b in &links[i + 1..] {
                        let (u2, v2) = edges[b];
                        if u1 == u2 || u1 == v2 || v1 == u2 || v1 == v2 {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }

    /// All sets of the family as stored or enumerable. For k-link families
    /// this is every non-empty subset of at most K links.
    pub fn materialize(&self) -> Result<Vec<ActivationSet>> {
        match &self.interference {
            Interference::Explicit { sets } => Ok(sets.clone()),
            Interference::KLink { k } => {
                let top = (*k).min(self.n_links);
                let needed: u128 = (1..=top).map(|j| binomial(self.n_links, j)).sum();
                self.check_cap(needed)?;
                let mut out = Vec::with_capacity(needed as usize);
                for j in 1..=top {
                    out.extend(combinations(self.n_links, j));
                }
                Ok(out)
            }
            Interference::SingleHop { edges } => {
                enumerate_maximal_matchings(edges, self.matching_link_cap, self.set_cap)
            }
        }
    }

    /// The sets of the family with no strict superset in the family.
    pub fn maximal_set_list(&self) -> Result<Vec<ActivationSet>> {
        match &self.interference {
            Interference::Explicit { sets } => Ok(sets
                .iter()
                .filter(|s| !sets.iter().any(|t| t.len() > s.len() && s.is_subset_of(t)))
                .cloned()
                .collect()),
            Interference::KLink { k } => {
                let size = (*k).min(self.n_links);
                self.check_cap(binomial(self.n_links, size))?;
                Ok(combinations(self.n_links, size).collect())
            }
            Interference::SingleHop { edges } => {
                enumerate_maximal_matchings(edges, self.matching_link_cap, self.set_cap)
            }
        }
    }

    /// An explicit family holding only the maximal sets.
    pub fn maximal_sets(&self) -> Result<ActivationSetFamily> {
        let sets = self.maximal_set_list()?;
        Ok(ActivationSetFamily {
            n_links: self.n_links,
            interference: Interference::Explicit { sets },
            set_cap: self.set_cap,
            matching_link_cap: self.matching_link_cap,
        })
    }

    /// First link that appears in no set, if any.
    pub fn uncovered_link(&self) -> Result<Option<LinkId>> {
        match &self.interference {
            Interference::KLink { .. } | Interference::SingleHop { .. } => Ok(None),
            Interference::Explicit { sets } => {
                let mut covered = vec![false; self.n_links];
                for s in sets {
                    for &e in s.links() {
                        covered[e] = true;
                    }
                }
                Ok(covered.iter().position(|c| !c))
            }
        }
    }

    fn check_cap(&self, needed: u128) -> Result<()> {
        if needed > self.set_cap as u128 {
            return Err(Error::EnumerationCapExceeded {
                needed,
                cap: self.set_cap as u128,
            });
        }
        Ok(())
    }
}

/// All maximal matchings of a simple graph given as an edge list, as an
/// explicit family over the edges.
pub fn matchings_of_graph(edges: &[(usize, usize)]) -> Result<ActivationSetFamily> {
    let sets = enumerate_maximal_matchings(edges, DEFAULT_MATCHING_LINK_CAP, DEFAULT_SET_CAP)?;
    Ok(ActivationSetFamily::from_parts(
        edges.len(),
        Interference::Explicit { sets },
    ))
}

fn enumerate_maximal_matchings(
    edges: &[(usize, usize)],
    link_cap: usize,
    set_cap: usize,
) -> Result<Vec<ActivationSet>> {
    if edges.len() > link_cap {
        return Err(Error::EnumerationCapExceeded {
            needed: edges.len() as u128,
            cap: link_cap as u128,
        });
    }
    let n_nodes = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let mut used = vec![false; n_nodes];
    let mut chosen = Vec::new();
    let mut out = Vec::new();
    extend_matching(edges, 0, &mut used, &mut chosen, &mut out, set_cap)?;
    Ok(out)
}

// Edges are decided in index order, so each subset is visited once.
fn extend_matching(
    edges: &[(usize, usize)],
    next: usize,
    used: &mut [bool],
    chosen: &mut Vec<usize>,
    out: &mut Vec<ActivationSet>,
    set_cap: usize,
) -> Result<()> {
    if next == edges.len() {
        let maximal = edges
            .iter()
            .all(|&(u, v)| used[u] || used[v]);
        if maximal {
            if out.len() >= set_cap {
                return Err(Error::EnumerationCapExceeded {
                    needed: out.len() as u128 + 1,
                    cap: set_cap as u128,
                });
            }
            out.push(ActivationSet::from_sorted(chosen.clone()));
        }
        return Ok(());
    }
    let (u, v) = edges[next];
    if !used[u] && !used[v] {
        used[u] = true;
        used[v] = true;
        chosen.push(next);
        extend_matching(edges, next + 1, used, chosen, out, set_cap)?;
        chosen.pop();
        used[u] = false;
        used[v] = false;
    }
    // Skipping an edge can only lead to a maximal matching if an earlier
    // choice already blocks it or a later edge might.
    let blocked_now = used[u] || used[v];
    let blockable_later = edges[next + 1..]
        .iter()
        .any(|&(a, b)| a == u || a == v || b == u || b == v);
    if blocked_now || blockable_later {
        extend_matching(edges, next + 1, used, chosen, out, set_cap)?;
    }
    Ok(())
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Lexicographic `k`-subsets of `0..n`.
pub(crate) fn combinations(n: usize, k: usize) -> impl Iterator<Item = ActivationSet> {
    let mut idx: Vec<usize> = (0..k).collect();
    let mut done = k > n;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let current = ActivationSet::from_sorted(idx.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(current)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn links(sets: &[ActivationSet]) -> Vec<Vec<usize>> {
        sets.iter().map(|s| s.links().to_vec()).collect()
    }

    #[test]
    fn maximal_keeps_only_supersets() {
        let fam = ActivationSetFamily::explicit(2, vec![vec![0], vec![1], vec![0, 1]]).unwrap();
        assert_eq!(links(&fam.maximal_set_list().unwrap()), vec![vec![0, 1]]);
    }

    #[test]
    fn k_link_one_gives_singletons() {
        let fam = ActivationSetFamily::k_link(3, 1).unwrap();
        assert_eq!(
            links(&fam.maximal_set_list().unwrap()),
            vec![vec![0], vec![1], vec![2]]
        );
    }

    #[test]
    fn path_graph_conflicts() {
        // a-b-c: e0 = ab, e1 = bc
        let fam = ActivationSetFamily::single_hop(vec![(0, 1), (1, 2)]).unwrap();
        assert_eq!(links(&fam.maximal_set_list().unwrap()), vec![vec![0], vec![1]]);
        assert!(!fam.is_feasible(&[0, 1]));
        assert!(fam.is_feasible(&[1]));
    }

    #[test]
    fn triangle_has_three_single_edge_matchings() {
        let fam = matchings_of_graph(&[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(
            links(&fam.maximal_set_list().unwrap()),
            vec![vec![0], vec![1], vec![2]]
        );
    }

    #[test]
    fn three_edge_path() {
        let fam = matchings_of_graph(&[(0, 1), (1, 2), (2, 3)]).unwrap();
        let mut got = links(&fam.maximal_set_list().unwrap());
        got.sort();
        assert_eq!(got, vec![vec![0, 2], vec![1]]);
    }

    #[test]
    fn four_cycle_perfect_matchings() {
        let fam = matchings_of_graph(&[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let mut got = links(&fam.maximal_set_list().unwrap());
        got.sort();
        assert_eq!(got, vec![vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn star_graph_matchings_are_single_edges() {
        let fam = matchings_of_graph(&[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(fam.maximal_set_list().unwrap().len(), 4);
    }

    #[test]
    fn matching_link_cap_is_enforced() {
        let edges: Vec<_> = (0..21).map(|i| (i, i + 1)).collect();
        assert!(matches!(
            matchings_of_graph(&edges),
            Err(Error::EnumerationCapExceeded { .. })
        ));
    }

    #[test]
    fn set_cap_is_enforced() {
        let fam = ActivationSetFamily::k_link(40, 20).unwrap();
        assert!(matches!(
            fam.maximal_set_list(),
            Err(Error::EnumerationCapExceeded { .. })
        ));
        let small = ActivationSetFamily::k_link(6, 3).unwrap().with_set_cap(10);
        assert!(small.maximal_set_list().is_err());
    }

    #[test]
    fn k_link_materializes_all_small_subsets() {
        let fam = ActivationSetFamily::k_link(4, 2).unwrap();
        assert_eq!(fam.materialize().unwrap().len(), 4 + 6);
        assert_eq!(fam.maximal_set_list().unwrap().len(), 6);
    }

    #[test]
    fn explicit_family_is_downward_closed() {
        let fam = ActivationSetFamily::explicit(3, vec![vec![0, 2], vec![1]]).unwrap();
        assert!(fam.is_feasible(&[0]));
        assert!(fam.is_feasible(&[2]));
        assert!(fam.is_feasible(&[]));
        assert!(!fam.is_feasible(&[0, 1]));
        assert!(!fam.is_feasible(&[3]));
    }

    #[test]
    fn explicit_rejects_unknown_links() {
        assert!(ActivationSetFamily::explicit(2, vec![vec![0, 2]]).is_err());
    }

    #[test]
    fn uncovered_link_detected() {
        let fam = ActivationSetFamily::explicit(3, vec![vec![0], vec![1]]).unwrap();
        assert_eq!(fam.uncovered_link().unwrap(), Some(2));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(50, 10), 10_272_278_170);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(combinations(5, 3).count(), 10);
    }

    #[test]
    fn maximal_sets_idempotent_and_covering() {
        let fam = ActivationSetFamily::explicit(
            4,
            vec![vec![0], vec![0, 1], vec![2], vec![1, 2], vec![3]],
        )
        .unwrap();
        let once = fam.maximal_sets().unwrap();
        let twice = once.maximal_sets().unwrap();
        assert_eq!(once, twice);
        for e in 0..4 {
            assert!(once.maximal_set_list().unwrap().iter().any(|s| s.contains(e)));
        }
    }
}
