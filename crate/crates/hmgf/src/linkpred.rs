//! Derive weighted potential edges from the friend relation with
//! neighborhood-based link predictors, then select and normalize them
//! into a new R relation.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{GraphBuilder, HeteroGraph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    CommonNeighbors,
    Jaccard,
    AdamicAdar,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::CommonNeighbors => "common-neighbors",
            Method::Jaccard => "jaccard",
            Method::AdamicAdar => "adamic-adar",
        }
    }

    pub fn from_token(tok: &str) -> Result<Self, LinkPredError> {
        match tok {
            "cn" | "common-neighbors" => Ok(Method::CommonNeighbors),
            "jaccard" => Ok(Method::Jaccard),
            "aa" | "adamic-adar" => Ok(Method::AdamicAdar),
            _ => Err(LinkPredError::UnknownMethod(tok.to_owned())),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum LinkPredError {
    #[error("unknown link prediction method `{0}`")]
    UnknownMethod(String),
    #[error("invalid selection policy: {0}")]
    InvalidPolicy(String),
}

/// A scored non-friend pair at friend-distance exactly 2, u < v.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPair {
    pub u: VertexId,
    pub v: VertexId,
    pub raw_score: f64,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelectionMode {
    TopK(usize),
    Threshold(f64),
}

/// Selection policy; normalization is always divide-by-max.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionPolicy {
    pub mode: SelectionMode,
}

impl SelectionPolicy {
    pub fn validate(&self) -> Result<(), LinkPredError> {
        match self.mode {
            SelectionMode::TopK(k) if k < 1 => {
                Err(LinkPredError::InvalidPolicy("top_k must be \u{2265} 1".into()))
            }
            SelectionMode::Threshold(t) if !(t > 0.0 && t <= 1.0) => Err(
                LinkPredError::InvalidPolicy("threshold must lie in (0,1]".into()),
            ),
            _ => Ok(()),
        }
    }
}

/// Score every pair at friend-distance exactly 2; all three predictors
/// vanish beyond distance 2, so this is the whole candidate universe.
/// Output is ordered by (u, v) ascending.
pub fn score_pairs(g: &HeteroGraph, method: Method) -> Vec<ScoredPair> {
    let mut out = Vec::new();
    for u in 0..g.n() {
        // common-neighbor counts for all distance-2 partners v > u
        let mut common: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
        for &z in g.friends(u) {
            for &v in g.friends(z) {
                if v > u && !g.has_friend_edge(u, v) {
                    common.entry(v).or_default().push(z);
                }
            }
        }
        let mut partners: Vec<VertexId> = common.keys().copied().collect();
        partners.sort_unstable();
        for v in partners {
            let zs = &common[&v];
            let raw_score = match method {
                Method::CommonNeighbors => zs.len() as f64,
                Method::Jaccard => {
                    let union = g.friend_degree(u) + g.friend_degree(v) - zs.len();
                    zs.len() as f64 / union as f64
                }
                Method::AdamicAdar => zs
                    .iter()
                    .map(|&z| 1.0 / (g.friend_degree(z) as f64).ln())
                    .sum(),
            };
            out.push(ScoredPair { u, v, raw_score, method });
        }
    }
    out
}

/// Normalize raw scores by the maximum and keep the pairs admitted by the
/// policy; returns a new graph with the same vertices and friend edges and
/// R set to exactly the selected pairs.
pub fn select_edges(
    g: &HeteroGraph,
    pairs: &[ScoredPair],
    policy: &SelectionPolicy,
) -> Result<HeteroGraph, LinkPredError> {
    policy.validate()?;
    let max = pairs.iter().fold(0.0f64, |m, p| m.max(p.raw_score));
    let mut weighted: Vec<(VertexId, VertexId, f64)> = pairs
        .iter()
        .filter(|p| p.raw_score > 0.0)
        .map(|p| (p.u, p.v, p.raw_score / max))
        .collect();
    let selected: Vec<(VertexId, VertexId, f64)> = match policy.mode {
        SelectionMode::Threshold(t) => weighted
            .into_iter()
            .filter(|&(_, _, w)| w >= t)
            .collect(),
        SelectionMode::TopK(k) => {
            weighted.sort_by(|a, b| {
                b.2.partial_cmp(&a.2)
                    .unwrap()
                    .then_with(|| (a.0, a.1).cmp(&(b.0, b.1)))
            });
            weighted.truncate(k);
            weighted
        }
    };

    let mut builder = GraphBuilder::new();
    for v in 0..g.n() {
        builder.intern(g.label(v));
    }
    for u in 0..g.n() {
        for &v in g.friends(u) {
            if v > u {
                builder
                    .add_friend(g.label(u), g.label(v), 0)
                    .expect("friend edges copied from a valid graph");
            }
        }
    }
    let mut selected = selected;
    selected.sort_by_key(|&(u, v, _)| (u, v));
    for (u, v, w) in selected {
        builder
            .add_potential(g.label(u), g.label(v), w, 0)
            .expect("scored pairs are distinct non-friend pairs");
    }
    Ok(builder.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    #[test]
    fn path_common_neighbors() {
        let g = parse_graph("F a b\nF b c").unwrap();
        let pairs = score_pairs(&g, Method::CommonNeighbors);
        assert_eq!(pairs.len(), 1);
        assert_eq!((pairs[0].u, pairs[0].v, pairs[0].raw_score), (0, 2, 1.0));
    }

    #[test]
    fn star_leaf_pairs() {
        let g = parse_graph("F c x\nF c y\nF c z").unwrap();
        let pairs = score_pairs(&g, Method::CommonNeighbors);
        assert_eq!(pairs.len(), 3);
        assert!(pairs.iter().all(|p| p.raw_score == 1.0));
    }

    #[test]
    fn four_cycle_adamic_adar() {
        let g = parse_graph("F 1 2\nF 2 3\nF 3 4\nF 4 1").unwrap();
        let pairs = score_pairs(&g, Method::AdamicAdar);
        assert_eq!(pairs.len(), 2);
        let expected = 2.0 / 2.0f64.ln();
        for p in &pairs {
            assert!((p.raw_score - expected).abs() < 1e-12, "{}", p.raw_score);
        }
    }

    #[test]
    fn jaccard_path() {
        // a-b-c: |N(a) cap N(c)| = 1, |N(a) cup N(c)| = 1
        let g = parse_graph("F a b\nF b c").unwrap();
        let pairs = score_pairs(&g, Method::Jaccard);
        assert_eq!(pairs[0].raw_score, 1.0);
    }

    #[test]
    fn select_normalizes_by_max() {
        let g = parse_graph("F a b\nF b c").unwrap();
        let pairs = vec![ScoredPair { u: 0, v: 2, raw_score: 3.0, method: Method::CommonNeighbors }];
        let policy = SelectionPolicy { mode: SelectionMode::Threshold(0.5) };
        let out = select_edges(&g, &pairs, &policy).unwrap();
        assert_eq!(out.num_potential_edges(), 1);
        assert_eq!(out.potential_weight(0, 2), Some(1.0));
    }

    #[test]
    fn threshold_drops_low_normalized_scores() {
        let g = parse_graph("F a b\nF b c\nF a d\nF d e").unwrap();
        let pairs = vec![
            ScoredPair { u: 0, v: 2, raw_score: 2.0, method: Method::CommonNeighbors },
            ScoredPair { u: 0, v: 4, raw_score: 1.0, method: Method::CommonNeighbors },
        ];
        let policy = SelectionPolicy { mode: SelectionMode::Threshold(0.6) };
        let out = select_edges(&g, &pairs, &policy).unwrap();
        assert_eq!(out.num_potential_edges(), 1);
        assert_eq!(out.potential_weight(0, 2), Some(1.0));
        assert_eq!(out.potential_weight(0, 4), None);
    }

    #[test]
    fn empty_pairs_leave_graph_unchanged() {
        let g = parse_graph("F a b\nF b c").unwrap();
        let policy = SelectionPolicy { mode: SelectionMode::TopK(5) };
        let out = select_edges(&g, &[], &policy).unwrap();
        assert_eq!(out.num_potential_edges(), 0);
        assert_eq!(out.to_text(), g.to_text());
    }

    #[test]
    fn top_k_ties_broken_by_pair_order() {
        let g = parse_graph("F c x\nF c y\nF c z").unwrap();
        let pairs = score_pairs(&g, Method::CommonNeighbors);
        let policy = SelectionPolicy { mode: SelectionMode::TopK(2) };
        let out = select_edges(&g, &pairs, &policy).unwrap();
        assert_eq!(out.num_potential_edges(), 2);
        // pairs (x,y) < (x,z) < (y,z) by index; (y,z) dropped
        let (x, y, z) = (
            out.vertex("x").unwrap(),
            out.vertex("y").unwrap(),
            out.vertex("z").unwrap(),
        );
        assert!(out.potential_weight(x, y).is_some());
        assert!(out.potential_weight(x, z).is_some());
        assert!(out.potential_weight(y, z).is_none());
    }

    #[test]
    fn invalid_policy_rejected() {
        let g = parse_graph("F a b").unwrap();
        let bad = SelectionPolicy { mode: SelectionMode::Threshold(0.0) };
        assert!(select_edges(&g, &[], &bad).is_err());
        assert!(Method::from_token("pagerank").is_err());
    }
}
