//! Exact HMGF by anchored subset enumeration inside hop balls, plus the
//! naive all-subsets oracle used to validate it.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::{Group, HeteroGraph, Query, VertexId};
use crate::solution::{cmp_candidates, Solution};

#[derive(Debug, Error, PartialEq)]
pub enum ExactError {
    #[error("ball around vertex {v} has {size} vertices, exceeding the limit {limit}")]
    BallTooLarge { v: VertexId, size: usize, limit: usize },
    #[error("time budget exceeded")]
    TimeBudgetExceeded,
    #[error("graph has {0} vertices; the brute-force oracle is capped at 20")]
    GraphTooLarge(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct ExactConfig {
    pub max_ball_size: usize,
    pub time_budget: Option<Duration>,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig { max_ball_size: 25, time_budget: None }
    }
}

struct BestSet {
    weight: f64,
    members: Vec<VertexId>,
}

impl BestSet {
    fn offer(best: &mut Option<BestSet>, weight: f64, members: &[VertexId]) {
        let replace = match best {
            None => true,
            Some(b) => {
                cmp_candidates(weight, members, b.weight, &b.members) == std::cmp::Ordering::Less
            }
        };
        if replace {
            *best = Some(BestSet { weight, members: members.to_vec() });
        }
    }
}

/// Exhaustive optimum over all 2^n subsets; the independent oracle the
/// anchored solver is checked against. Capped at 20 vertices.
pub fn brute_force_oracle(g: &HeteroGraph, q: &Query) -> Result<Option<Solution>, ExactError> {
    let start = Instant::now();
    let n = g.n();
    if n > 20 {
        return Err(ExactError::GraphTooLarge(n));
    }
    if q.p > n {
        return Ok(None);
    }
    // pairwise distances capped at h: ok[u][v] iff d_G^E(u,v) <= h
    let ok: Vec<Vec<bool>> = (0..n)
        .map(|u| {
            let d = g.bounded_distances(u, q.h);
            (0..n).map(|v| d[v] <= q.h).collect()
        })
        .collect();
    let mut best: Option<BestSet> = None;
    let mut members = Vec::with_capacity(n);
    for mask in 1u32..(1u32 << n) {
        if (mask.count_ones() as usize) < q.p {
            continue;
        }
        members.clear();
        members.extend((0..n).filter(|&v| mask >> v & 1 == 1));
        let feasible = members.iter().enumerate().all(|(i, &u)| {
            members[i + 1..].iter().all(|&v| ok[u][v])
        });
        if !feasible {
            continue;
        }
        let w = g.total_potential_weight(&Group::from_sorted(members.clone()));
        BestSet::offer(&mut best, w, &members);
    }
    Ok(best.map(|b| {
        let mut s = Solution::evaluate(g, Group::from_sorted(b.members), q, "oracle");
        s.elapsed = start.elapsed();
        s
    }))
}

struct AnchorSearch<'a> {
    g: &'a HeteroGraph,
    q: &'a Query,
    verts: Vec<VertexId>,          // anchor ball members with index >= anchor
    ok: Vec<Vec<bool>>,            // pairwise hop feasibility among verts
    suffix_weight: Vec<f64>,       // upper bound on weight addable from position i on
    chosen: Vec<usize>,            // positions into verts
    best: Option<BestSet>,
    deadline: Option<Instant>,
    timed_out: bool,
}

impl AnchorSearch<'_> {
    fn weight_between(&self, a: usize, b: usize) -> f64 {
        self.g
            .potential_weight(self.verts[a], self.verts[b])
            .unwrap_or(0.0)
    }

    fn dfs(&mut self, next: usize, w_cur: f64) {
        if self.timed_out {
            return;
        }
        if let Some(d) = self.deadline {
            if Instant::now() > d {
                self.timed_out = true;
                return;
            }
        }
        if self.chosen.len() >= self.q.p {
            let members: Vec<VertexId> = self.chosen.iter().map(|&i| self.verts[i]).collect();
            if let Some(b) = &self.best {
                // prune whole subtree only if even the optimistic bound loses strictly
                let bound = (w_cur + self.suffix_weight.get(next).copied().unwrap_or(0.0))
                    / self.q.p as f64;
                if crate::graph::cmp_sigma(bound, 1, b.weight, b.members.len())
                    == std::cmp::Ordering::Less
                {
                    BestSet::offer(&mut self.best, w_cur, &members);
                    return;
                }
            }
            BestSet::offer(&mut self.best, w_cur, &members);
        } else {
            // can the floor still be reached?
            let remaining = self.verts.len() - next;
            if self.chosen.len() + remaining < self.q.p {
                return;
            }
            if let Some(b) = &self.best {
                let bound = (w_cur + self.suffix_weight.get(next).copied().unwrap_or(0.0))
                    / self.q.p as f64;
                if crate::graph::cmp_sigma(bound, 1, b.weight, b.members.len())
                    == std::cmp::Ordering::Less
                {
                    return;
                }
            }
        }
        if next >= self.verts.len() {
            return;
        }
        // include verts[next] if it stays pairwise-feasible
        if self.chosen.iter().all(|&i| self.ok[i][next]) {
            let gain: f64 = self.chosen.iter().map(|&i| self.weight_between(i, next)).sum();
            self.chosen.push(next);
            self.dfs(next + 1, w_cur + gain);
            self.chosen.pop();
        }
        // exclude verts[next]
        self.dfs(next + 1, w_cur);
    }
}

/// Exact HMGF: for each anchor v in ascending index order, enumerate the
/// subsets of ball(v, h) whose minimum-index member is v. Every feasible
/// set S is a subset of ball(u, h) for each u in S, so anchoring at the
/// minimum index visits each candidate exactly once.
pub fn solve_exact(
    g: &HeteroGraph,
    q: &Query,
    cfg: &ExactConfig,
) -> Result<Option<Solution>, ExactError> {
    let start = Instant::now();
    let deadline = cfg.time_budget.map(|b| start + b);
    if q.p > g.n() {
        return Ok(None);
    }
    let mut best: Option<BestSet> = None;
    for anchor in 0..g.n() {
        let ball = g.ball(anchor, q.h).expect("anchor is a valid vertex");
        if ball.len() > cfg.max_ball_size {
            return Err(ExactError::BallTooLarge {
                v: anchor,
                size: ball.len(),
                limit: cfg.max_ball_size,
            });
        }
        let verts: Vec<VertexId> = ball.iter().copied().filter(|&u| u >= anchor).collect();
        if verts.len() < q.p {
            continue;
        }
        let ok: Vec<Vec<bool>> = verts
            .iter()
            .map(|&u| {
                let d = g.bounded_distances(u, q.h);
                verts.iter().map(|&v| d[v] <= q.h).collect()
            })
            .collect();
        // suffix_weight[i]: total weight of potential edges inside `verts`
        // whose later endpoint sits at position >= i
        let k = verts.len();
        let mut at_pos = vec![0.0f64; k + 1];
        for a in 0..k {
            for b in (a + 1)..k {
                if let Some(w) = g.potential_weight(verts[a], verts[b]) {
                    at_pos[b] += w;
                }
            }
        }
        let mut suffix_weight = vec![0.0f64; k + 1];
        for i in (0..k).rev() {
            suffix_weight[i] = suffix_weight[i + 1] + at_pos[i];
        }
        let mut search = AnchorSearch {
            g,
            q,
            verts,
            ok,
            suffix_weight,
            chosen: vec![0], // position of the anchor itself
            best: best.take(),
            deadline,
            timed_out: false,
        };
        search.dfs(1, 0.0);
        if search.timed_out {
            return Err(ExactError::TimeBudgetExceeded);
        }
        best = search.best;
    }
    Ok(best.map(|b| {
        let mut s = Solution::evaluate(g, Group::from_sorted(b.members), q, "exact");
        s.elapsed = start.elapsed();
        s
    }))
}
