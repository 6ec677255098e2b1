use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome};

use super::{ActivationSet, ActivationSetFamily, FrequencyVector};
use crate::error::{invalid, Error, Result};

pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-9;

/// Outcome of a membership test against the activation-frequency polytope.
#[derive(Clone, Debug)]
pub enum Feasibility {
    /// A distribution over feasible sets (mass at most one) reproducing `f`.
    /// Sets may be strict subsets of family members.
    Feasible {
        witness: Vec<(ActivationSet, f64)>,
        residual: f64,
    },
    /// Covering `f` needs more than one unit of time-sharing mass.
    Infeasible { required_mass: f64 },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }
}

/// Decides whether `f = M x` for some `x ≥ 0` with `1ᵀx ≤ 1`.
///
/// Solves `min 1ᵀx s.t. M x ≥ f, x ≥ 0` over the maximal sets; since the
/// family is closed under subsets, covering with mass ≤ 1 is equivalent to
/// exact representation. The covering solution is then thinned link by link
/// into an exact witness.
pub fn check_feasible(
    f: &FrequencyVector,
    family: &ActivationSetFamily,
    tol: f64,
) -> Result<Feasibility> {
    let n = family.n_links();
    if f.len() != n {
        return Err(invalid(format!(
            "frequency vector has {} entries for {} links",
            f.len(),
            n
        )));
    }
    if let Some((e, v)) = f
        .as_slice()
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v >= -tol && **v <= 1.0 + tol))
    {
        return Err(invalid(format!("f[{e}] = {v} is outside [0, 1]")));
    }
    let sets = family.maximal_set_list()?;
    let target: Vec<f64> = f.as_slice().iter().map(|v| v.clamp(0.0, 1.0)).collect();
    if target.iter().all(|&v| v <= tol) {
        return Ok(Feasibility::Feasible {
            witness: Vec::new(),
            residual: target.iter().cloned().fold(0.0, f64::max),
        });
    }

    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = sets.iter().map(|_| lp.add_var(1.0, (0.0, f64::INFINITY))).collect();
    for (e, &fe) in target.iter().enumerate() {
        if fe <= 0.0 {
            continue;
        }
        let row: Vec<_> = sets
            .iter()
            .zip(&vars)
            .filter(|(s, _)| s.contains(e))
            .map(|(_, &v)| (v, 1.0))
            .collect();
        if row.is_empty() {
            if fe > tol {
                return Ok(Feasibility::Infeasible {
                    required_mass: f64::INFINITY,
                });
            }
            continue;
        }
        lp.add_constraint(&row, ComparisonOp::Ge, fe);
    }

    let x: Vec<f64> = match lp.solve() {
        Ok(SolveOutcome::Solution(sol)) => {
            let mass = sol.objective();
            if mass > 1.0 + tol {
                return Ok(Feasibility::Infeasible {
                    required_mass: mass,
                });
            }
            vars.iter().map(|&v| sol[v].max(0.0)).collect()
        }
        Ok(SolveOutcome::Interrupted(_)) => return Err(Error::Lp("solve interrupted".into())),
        Err(microlp::Error::Infeasible) => {
            return Ok(Feasibility::Infeasible {
                required_mass: f64::INFINITY,
            })
        }
        Err(e) => return Err(Error::Lp(e.to_string())),
    };

    let witness = thin_to_exact(&sets, &x, &target);
    let residual = witness_residual(n, &witness, &target);
    Ok(Feasibility::Feasible { witness, residual })
}

/// Moves surplus coverage of each link onto the same set with that link
/// removed, which leaves every other link's coverage unchanged.
fn thin_to_exact(sets: &[ActivationSet], x: &[f64], target: &[f64]) -> Vec<(ActivationSet, f64)> {
    let mut entries: Vec<(ActivationSet, f64)> = sets
        .iter()
        .zip(x)
        .filter(|(_, &p)| p > 0.0)
        .map(|(s, &p)| (s.clone(), p))
        .collect();
    for (e, &fe) in target.iter().enumerate() {
        let cover: f64 = entries.iter().filter(|(s, _)| s.contains(e)).map(|(_, p)| p).sum();
        let mut excess = cover - fe;
        if excess <= 0.0 {
            continue;
        }
        let mut split = Vec::new();
        for (s, p) in entries.iter_mut() {
            if excess <= 0.0 {
                break;
            }
            if !s.contains(e) || *p <= 0.0 {
                continue;
            }
            let moved = p.min(excess);
            *p -= moved;
            excess -= moved;
            split.push((s.without(e), moved));
        }
        entries.extend(split);
        entries.retain(|(_, p)| *p > 0.0);
    }
    // merge identical sets, drop idle mass
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    let mut merged: Vec<(ActivationSet, f64)> = Vec::new();
    for (s, p) in entries {
        if s.is_empty() {
            continue;
        }
        match merged.last_mut() {
            Some((last, q)) if *last == s => *q += p,
            _ => merged.push((s, p)),
        }
    }
    merged
}

fn witness_residual(n: usize, witness: &[(ActivationSet, f64)], target: &[f64]) -> f64 {
    let mut f = vec![0.0; n];
    for (s, p) in witness {
        for &e in s.links() {
            f[e] += p;
        }
    }
    f.iter()
        .zip(target)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(n: usize, sets: Vec<Vec<usize>>) -> ActivationSetFamily {
        ActivationSetFamily::explicit(n, sets).unwrap()
    }

    fn check(f: Vec<f64>, family: &ActivationSetFamily) -> Feasibility {
        check_feasible(&FrequencyVector(f), family, DEFAULT_FEASIBILITY_TOL).unwrap()
    }

    #[test]
    fn time_sharing_is_feasible() {
        match check(vec![0.5, 0.5], &fam(2, vec![vec![0], vec![1]])) {
            Feasibility::Feasible { witness, residual } => {
                assert!(residual <= 1e-9);
                assert_eq!(witness.len(), 2);
                for (_, p) in witness {
                    assert!((p - 0.5).abs() < 1e-9);
                }
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn simplex_violation_is_infeasible() {
        match check(vec![0.6, 0.6], &fam(2, vec![vec![0], vec![1]])) {
            Feasibility::Infeasible { required_mass } => {
                assert!((required_mass - 1.2).abs() < 1e-9)
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn joint_activation_is_feasible() {
        match check(vec![1.0, 1.0], &fam(2, vec![vec![0, 1]])) {
            Feasibility::Feasible { witness, .. } => {
                assert_eq!(witness.len(), 1);
                assert_eq!(witness[0].0.links(), &[0, 1]);
                assert!((witness[0].1 - 1.0).abs() < 1e-9);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn subsets_of_listed_sets_are_used() {
        // only {0,1} is listed but (0.5, 0) needs {0} alone
        match check(vec![0.5, 0.0], &fam(2, vec![vec![0, 1]])) {
            Feasibility::Feasible { witness, residual } => {
                assert!(residual <= 1e-9);
                assert_eq!(witness, vec![(ActivationSet::new(vec![0]).unwrap(), 0.5)]);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn uncovered_positive_link_is_infeasible() {
        assert!(!check(vec![0.1, 0.1], &fam(2, vec![vec![0]])).is_feasible());
    }

    #[test]
    fn out_of_range_input_rejected() {
        let f = FrequencyVector(vec![1.5, 0.0]);
        assert!(check_feasible(&f, &fam(2, vec![vec![0, 1]]), 1e-9).is_err());
    }

    #[test]
    fn zero_vector_is_trivially_feasible() {
        assert!(check(vec![0.0, 0.0], &fam(2, vec![vec![0]])).is_feasible());
    }
}
