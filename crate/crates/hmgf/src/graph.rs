//! Heterogeneous social graph: unweighted friend edges plus weighted
//! potential edges, with hop distances measured over friend edges only.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

/// Dense vertex index, contiguous in first-seen parse order.
pub type VertexId = usize;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("line {line}: malformed record: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: duplicate edge declaration {u} {v}")]
    DuplicateEdge { line: usize, u: String, v: String },
    #[error("line {line}: weight {w} outside (0,1]")]
    WeightOutOfRange { line: usize, w: f64 },
    #[error("line {line}: self-loop on {v}")]
    SelfLoop { line: usize, v: String },
    #[error("line {line}: pair {u} {v} declared as both friend and potential edge")]
    MixedRelation { line: usize, u: String, v: String },
    #[error("invalid vertex id {0}")]
    InvalidVertex(usize),
    #[error("unknown vertex label {0}")]
    UnknownLabel(String),
    #[error("empty group")]
    EmptyGroup,
}

/// Sorted, duplicate-free vertex set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Group(Vec<VertexId>);

impl Group {
    pub fn new(mut members: Vec<VertexId>) -> Self {
        members.sort_unstable();
        members.dedup();
        Group(members)
    }

    /// Members must already be sorted and unique.
    pub fn from_sorted(members: Vec<VertexId>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Group(members)
    }

    pub fn members(&self) -> &[VertexId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, VertexId> {
        self.0.iter()
    }
}

impl FromIterator<VertexId> for Group {
    fn from_iter<T: IntoIterator<Item = VertexId>>(iter: T) -> Self {
        Group::new(iter.into_iter().collect())
    }
}

/// Immutable heterogeneous graph. Friend adjacency (relation E) and
/// potential adjacency (relation R) are stored symmetrically with
/// neighbor lists sorted by index; E and R are disjoint, weights in (0,1].
#[derive(Debug, Clone, PartialEq)]
pub struct HeteroGraph {
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
    friend_adj: Vec<Vec<VertexId>>,
    potential_adj: Vec<Vec<(VertexId, f64)>>,
}

impl HeteroGraph {
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v]
    }

    pub fn vertex(&self, label: &str) -> Option<VertexId> {
        self.index.get(label).copied()
    }

    pub fn friends(&self, v: VertexId) -> &[VertexId] {
        &self.friend_adj[v]
    }

    pub fn potentials(&self, v: VertexId) -> &[(VertexId, f64)] {
        &self.potential_adj[v]
    }

    pub fn friend_degree(&self, v: VertexId) -> usize {
        self.friend_adj[v].len()
    }

    pub fn num_friend_edges(&self) -> usize {
        self.friend_adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn num_potential_edges(&self) -> usize {
        self.potential_adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_friend_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.friend_adj[u].binary_search(&v).is_ok()
    }

    pub fn potential_weight(&self, u: VertexId, v: VertexId) -> Option<f64> {
        self.potential_adj[u]
            .binary_search_by_key(&v, |&(x, _)| x)
            .ok()
            .map(|i| self.potential_adj[u][i].1)
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v < self.n() {
            Ok(())
        } else {
            Err(GraphError::InvalidVertex(v))
        }
    }

    /// BFS distance over friend edges only; `None` when no friend path exists.
    pub fn hop_distance(&self, u: VertexId, v: VertexId) -> Result<Option<u32>, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Ok(Some(0));
        }
        let mut dist = vec![u32::MAX; self.n()];
        dist[u] = 0;
        let mut queue = VecDeque::from([u]);
        while let Some(x) = queue.pop_front() {
            for &y in &self.friend_adj[x] {
                if dist[y] == u32::MAX {
                    dist[y] = dist[x] + 1;
                    if y == v {
                        return Ok(Some(dist[y]));
                    }
                    queue.push_back(y);
                }
            }
        }
        Ok(None)
    }

    /// Friend-hop distances from `v` truncated at `cap`; entries with
    /// distance > cap (or unreachable) stay `u32::MAX`.
    pub fn bounded_distances(&self, v: VertexId, cap: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n()];
        dist[v] = 0;
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            if dist[x] == cap {
                continue;
            }
            for &y in &self.friend_adj[x] {
                if dist[y] == u32::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Exhaustive friend-hop distances from `v`; unreachable stays `u32::MAX`.
    pub fn distances_from(&self, v: VertexId) -> Vec<u32> {
        self.bounded_distances(v, u32::MAX - 1)
    }

    /// All vertices within `r` friend hops of `v`, including `v`.
    pub fn ball(&self, v: VertexId, r: u32) -> Result<Group, GraphError> {
        self.check_vertex(v)?;
        let dist = self.bounded_distances(v, r);
        Ok(Group::from_sorted(
            (0..self.n()).filter(|&u| dist[u] <= r).collect(),
        ))
    }

    /// Sum of potential-edge weights with both endpoints in `s`,
    /// each undirected edge counted once.
    pub fn total_potential_weight(&self, s: &Group) -> f64 {
        let mut total = 0.0;
        for &u in s.iter() {
            for &(v, w) in &self.potential_adj[u] {
                if v > u && s.contains(v) {
                    total += w;
                }
            }
        }
        total
    }

    /// The objective sigma(s) = w(s)/|s|, 0 for the empty group.
    pub fn average_weight(&self, s: &Group) -> f64 {
        if s.is_empty() {
            0.0
        } else {
            self.total_potential_weight(s) / s.len() as f64
        }
    }

    /// Maximum pairwise friend-hop distance over the full graph;
    /// `Some(None)` encodes an infinite pair. Errors on empty groups.
    pub fn max_pairwise_hop(&self, s: &Group) -> Result<Option<u32>, GraphError> {
        if s.is_empty() {
            return Err(GraphError::EmptyGroup);
        }
        let mut max = 0u32;
        for (i, &u) in s.iter().enumerate() {
            if i + 1 == s.len() {
                break;
            }
            let dist = self.distances_from(u);
            for &v in &s.members()[i + 1..] {
                if dist[v] == u32::MAX {
                    return Ok(None);
                }
                max = max.max(dist[v]);
            }
        }
        Ok(Some(max))
    }

    /// True iff |s| >= p and every pair is within h friend hops.
    pub fn is_feasible(&self, s: &Group, q: &Query) -> bool {
        if s.len() < q.p {
            return false;
        }
        match self.max_pairwise_hop(s) {
            Ok(Some(d)) => d <= q.h,
            _ => false,
        }
    }

    /// Like `is_feasible` but BFS is truncated at h, for hot paths.
    pub fn is_feasible_bounded(&self, s: &Group, q: &Query) -> bool {
        if s.len() < q.p {
            return false;
        }
        for (i, &u) in s.iter().enumerate() {
            if i + 1 == s.len() {
                break;
            }
            let dist = self.bounded_distances(u, q.h);
            if s.members()[i + 1..].iter().any(|&v| dist[v] > q.h) {
                return false;
            }
        }
        true
    }

    /// Canonical text form: comment-free, `F` records before `P`,
    /// endpoints and records in lexicographic label order.
    pub fn to_text(&self) -> String {
        let mut f_lines: Vec<(String, String)> = Vec::new();
        let mut p_lines: Vec<(String, String, f64)> = Vec::new();
        for u in 0..self.n() {
            for &v in &self.friend_adj[u] {
                let (a, b) = ordered_labels(&self.labels[u], &self.labels[v]);
                if a == self.labels[u].as_str() {
                    f_lines.push((a.to_owned(), b.to_owned()));
                }
            }
            for &(v, w) in &self.potential_adj[u] {
                let (a, b) = ordered_labels(&self.labels[u], &self.labels[v]);
                if a == self.labels[u].as_str() {
                    p_lines.push((a.to_owned(), b.to_owned(), w));
                }
            }
        }
        f_lines.sort();
        p_lines.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        let mut out = String::new();
        for (a, b) in f_lines {
            let _ = writeln!(out, "F {a} {b}");
        }
        for (a, b, w) in p_lines {
            let _ = writeln!(out, "P {a} {b} {w}");
        }
        out
    }
}

fn ordered_labels<'a>(a: &'a str, b: &'a str) -> (&'a str, &'a str) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// The query pair: hop constraint h (friend-edge hops) and minimum size p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Query {
    pub h: u32,
    pub p: usize,
}

impl Query {
    pub fn new(h: u32, p: usize) -> Result<Self, String> {
        if h < 1 {
            return Err("h must be \u{2265} 1".into());
        }
        if p < 1 {
            return Err("p must be \u{2265} 1".into());
        }
        Ok(Query { h, p })
    }
}

/// Incremental construction with validation; used by the parser,
/// the generator, and link-prediction augmentation.
#[derive(Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
    friend: Vec<(VertexId, VertexId)>,
    potential: Vec<(VertexId, VertexId, f64)>,
    friend_set: HashSet<(VertexId, VertexId)>,
    potential_set: HashSet<(VertexId, VertexId)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, label: &str) -> VertexId {
        if let Some(&v) = self.index.get(label) {
            return v;
        }
        let v = self.labels.len();
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), v);
        v
    }

    pub fn add_friend(&mut self, u_label: &str, v_label: &str, line: usize) -> Result<(), GraphError> {
        let u = self.intern(u_label);
        let v = self.intern(v_label);
        if u == v {
            return Err(GraphError::SelfLoop { line, v: u_label.to_owned() });
        }
        let key = (u.min(v), u.max(v));
        if self.friend_set.contains(&key) {
            return Err(GraphError::DuplicateEdge {
                line,
                u: u_label.to_owned(),
                v: v_label.to_owned(),
            });
        }
        if self.potential_set.contains(&key) {
            return Err(GraphError::MixedRelation {
                line,
                u: u_label.to_owned(),
                v: v_label.to_owned(),
            });
        }
        self.friend_set.insert(key);
        self.friend.push(key);
        Ok(())
    }

    pub fn add_potential(
        &mut self,
        u_label: &str,
        v_label: &str,
        w: f64,
        line: usize,
    ) -> Result<(), GraphError> {
        if !(w > 0.0 && w <= 1.0) || !w.is_finite() {
            return Err(GraphError::WeightOutOfRange { line, w });
        }
        let u = self.intern(u_label);
        let v = self.intern(v_label);
        if u == v {
            return Err(GraphError::SelfLoop { line, v: u_label.to_owned() });
        }
        let key = (u.min(v), u.max(v));
        if self.potential_set.contains(&key) {
            return Err(GraphError::DuplicateEdge {
                line,
                u: u_label.to_owned(),
                v: v_label.to_owned(),
            });
        }
        if self.friend_set.contains(&key) {
            return Err(GraphError::MixedRelation {
                line,
                u: u_label.to_owned(),
                v: v_label.to_owned(),
            });
        }
        self.potential_set.insert(key);
        self.potential.push((key.0, key.1, w));
        Ok(())
    }

    pub fn build(self) -> HeteroGraph {
        let n = self.labels.len();
        let mut friend_adj = vec![Vec::new(); n];
        let mut potential_adj = vec![Vec::new(); n];
        for (u, v) in self.friend {
            friend_adj[u].push(v);
            friend_adj[v].push(u);
        }
        for (u, v, w) in self.potential {
            potential_adj[u].push((v, w));
            potential_adj[v].push((u, w));
        }
        for adj in &mut friend_adj {
            adj.sort_unstable();
        }
        for adj in &mut potential_adj {
            adj.sort_unstable_by_key(|&(v, _)| v);
        }
        HeteroGraph {
            labels: self.labels,
            index: self.index,
            friend_adj,
            potential_adj,
        }
    }
}

/// Parse the line-oriented graph format: `#` comments, `F <u> <v>`,
/// `P <u> <v> <w>` with w in (0,1]. Blank lines are skipped.
pub fn parse_graph(text: &str) -> Result<HeteroGraph, GraphError> {
    let mut builder = GraphBuilder::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        match fields[0] {
            "F" => {
                if fields.len() != 3 {
                    return Err(GraphError::Malformed {
                        line,
                        msg: format!("expected `F <u> <v>`, got {} fields", fields.len()),
                    });
                }
                builder.add_friend(fields[1], fields[2], line)?;
            }
            "P" => {
                if fields.len() != 4 {
                    return Err(GraphError::Malformed {
                        line,
                        msg: format!("expected `P <u> <v> <w>`, got {} fields", fields.len()),
                    });
                }
                let w: f64 = fields[3].parse().map_err(|_| GraphError::Malformed {
                    line,
                    msg: format!("bad weight `{}`", fields[3]),
                })?;
                builder.add_potential(fields[1], fields[2], w, line)?;
            }
            other => {
                return Err(GraphError::Malformed {
                    line,
                    msg: format!("unknown record type `{other}`"),
                });
            }
        }
    }
    Ok(builder.build())
}

/// Compare sigma values exactly via cross-multiplication of
/// (total_weight, size) pairs, avoiding division rounding.
pub fn cmp_sigma(w_a: f64, n_a: usize, w_b: f64, n_b: usize) -> std::cmp::Ordering {
    let lhs = w_a * n_b as f64;
    let rhs = w_b * n_a as f64;
    lhs.partial_cmp(&rhs).expect("weights are finite")
}
