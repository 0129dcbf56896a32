//! Solver output: a group plus its objective value, hop diameter, and
//! feasibility flag, with the total order used to pick winners.

use std::cmp::Ordering;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::graph::{cmp_sigma, Group, HeteroGraph, Query};

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub group: Group,
    pub sigma: f64,
    pub total_weight: f64,
    /// Maximum pairwise friend-hop distance; `None` encodes an
    /// unreachable pair.
    pub max_hop: Option<u32>,
    pub strictly_feasible: bool,
    pub solver: String,
    pub elapsed: Duration,
}

impl Solution {
    /// Evaluate a group against the full graph and query.
    pub fn evaluate(g: &HeteroGraph, group: Group, q: &Query, solver: &str) -> Self {
        let total_weight = g.total_potential_weight(&group);
        let sigma = if group.is_empty() {
            0.0
        } else {
            total_weight / group.len() as f64
        };
        let max_hop = g.max_pairwise_hop(&group).ok().flatten();
        let strictly_feasible = group.len() >= q.p && max_hop.is_some_and(|d| d <= q.h);
        Solution {
            group,
            sigma,
            total_weight,
            max_hop,
            strictly_feasible,
            solver: solver.to_owned(),
            elapsed: Duration::ZERO,
        }
    }
}

/// Total order over (total_weight, members): higher sigma first via exact
/// cross-multiplied comparison, then smaller size, then lexicographically
/// smaller member list. Returns `Ordering::Less` when `a` is better.
pub fn cmp_candidates(w_a: f64, m_a: &[usize], w_b: f64, m_b: &[usize]) -> Ordering {
    cmp_sigma(w_b, m_b.len(), w_a, m_a.len())
        .then_with(|| m_a.len().cmp(&m_b.len()))
        .then_with(|| m_a.cmp(m_b))
}

/// Final selection order for solver results: strictly feasible first,
/// then the candidate order above. `Less` means `a` wins.
pub fn cmp_solutions(a: &Solution, b: &Solution) -> Ordering {
    b.strictly_feasible
        .cmp(&a.strictly_feasible)
        .then_with(|| {
            cmp_candidates(
                a.total_weight,
                a.group.members(),
                b.total_weight,
                b.group.members(),
            )
        })
}

/// Stable machine-readable form of a solution, as emitted by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SolutionDocument {
    pub members: Vec<String>,
    pub sigma: f64,
    pub total_weight: f64,
    pub max_hop: Option<u32>,
    pub strictly_feasible: bool,
    pub solver: String,
    pub elapsed_ms: f64,
    pub query: QueryDoc,
    pub config: serde_json::Value,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub struct QueryDoc {
    pub h: u32,
    pub p: usize,
}

impl SolutionDocument {
    pub fn from_solution(
        g: &HeteroGraph,
        s: &Solution,
        q: &Query,
        config: serde_json::Value,
    ) -> Self {
        let mut members: Vec<String> = s.group.iter().map(|&v| g.label(v).to_owned()).collect();
        members.sort();
        SolutionDocument {
            members,
            sigma: s.sigma,
            total_weight: s.total_weight,
            max_hop: s.max_hop,
            strictly_feasible: s.strictly_feasible,
            solver: s.solver.clone(),
            elapsed_ms: s.elapsed.as_secs_f64() * 1e3,
            query: QueryDoc { h: q.h, p: q.p },
            config,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    #[test]
    fn candidate_order_prefers_sigma_then_size_then_lex() {
        // sigma 1.0/2 beats 1.2/3
        assert_eq!(cmp_candidates(1.0, &[0, 1], 1.2, &[0, 1, 2]), Ordering::Less);
        // equal sigma, smaller set wins
        assert_eq!(cmp_candidates(1.0, &[0, 1], 2.0, &[0, 1, 2, 3]), Ordering::Less);
        // full tie broken lexicographically
        assert_eq!(cmp_candidates(1.0, &[0, 2], 1.0, &[0, 3]), Ordering::Less);
    }

    #[test]
    fn strict_beats_relaxed() {
        let g = parse_graph("F a b\nP a c 0.9").unwrap();
        let q = Query::new(1, 2).unwrap();
        let strict = Solution::evaluate(&g, Group::new(vec![0, 1]), &q, "t");
        let relaxed = Solution::evaluate(&g, Group::new(vec![0, 2]), &q, "t");
        assert!(strict.strictly_feasible);
        assert!(!relaxed.strictly_feasible);
        assert!(relaxed.sigma > strict.sigma);
        assert_eq!(cmp_solutions(&strict, &relaxed), Ordering::Less);
    }

    #[test]
    fn document_members_sorted_by_label() {
        let g = parse_graph("F b a\nP b c 0.4").unwrap();
        let q = Query::new(1, 1).unwrap();
        let s = Solution::evaluate(&g, Group::new(vec![0, 1, 2]), &q, "t");
        let doc = SolutionDocument::from_solution(&g, &s, &q, serde_json::json!({}));
        assert_eq!(doc.members, ["a", "b", "c"]);
    }
}
