//! MaxGF approximation solver: hop-bounded candidate subgraphs around each
//! vertex, greedy peeling with a size floor, candidate pruning against the
//! best strict incumbent, and hop-restoring post-processing.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::sync::Mutex;
use std::time::Instant;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::graph::{cmp_sigma, Group, HeteroGraph, Query, VertexId};
use crate::solution::{cmp_candidates, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadiusMode {
    /// r = h: every strictly feasible group containing the center lies
    /// inside the candidate, preserving the 1/3 bound with hops <= 2h.
    Guarantee,
    /// r = ceil(h/2): relaxed hops <= h+1 but no containment argument.
    Tight,
}

impl RadiusMode {
    pub fn radius(&self, h: u32) -> u32 {
        match self {
            RadiusMode::Guarantee => h,
            RadiusMode::Tight => h.div_ceil(2),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MaxGFConfig {
    pub radius_mode: RadiusMode,
    pub strict_only: bool,
    pub parallel_candidates: bool,
    pub prune: bool,
}

impl Default for MaxGFConfig {
    fn default() -> Self {
        MaxGFConfig {
            radius_mode: RadiusMode::Guarantee,
            strict_only: false,
            parallel_candidates: true,
            prune: true,
        }
    }
}

/// One record per surviving peel size >= p.
#[derive(Debug, Clone, PartialEq)]
pub struct PeelRecord {
    pub size: usize,
    pub total_weight: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PeelTrace {
    /// Removed vertices with their incident potential weight at removal.
    pub removals: Vec<(VertexId, f64)>,
    pub records: Vec<PeelRecord>,
}

/// A group together with its exact total potential weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGroup {
    pub group: Group,
    pub total_weight: f64,
}

impl WeightedGroup {
    pub fn sigma(&self) -> f64 {
        if self.group.is_empty() {
            0.0
        } else {
            self.total_weight / self.group.len() as f64
        }
    }
}

#[derive(Debug, Clone)]
pub struct CandidateResult {
    pub center: VertexId,
    pub upper_bound: f64,
    /// Best peel result (pre post-processing); hops bounded by 2*radius.
    pub best_relaxed: Option<WeightedGroup>,
    /// Post-processed result with every pair within h hops.
    pub best_strict: Option<WeightedGroup>,
    pub pruned: bool,
}

/// The hop-bounded candidate around `v`: ball(v, r) with r from the
/// radius mode.
pub fn candidate(g: &HeteroGraph, v: VertexId, q: &Query, cfg: &MaxGFConfig) -> Group {
    g.ball(v, cfg.radius_mode.radius(q.h))
        .expect("center is a valid vertex")
}

/// w(c)/p dominates sigma(S) for every S subseteq c with |S| >= p.
pub fn upper_bound(g: &HeteroGraph, c: &Group, p: usize) -> f64 {
    g.total_potential_weight(c) / p as f64
}

// Candidate subgraph in local index space.
struct LocalCand {
    verts: Vec<VertexId>,
    // potential edges as (local u, local v, w), u < v
    edges: Vec<(usize, usize, f64)>,
    incident: Vec<f64>,
    total_weight: f64,
}

impl LocalCand {
    fn build(g: &HeteroGraph, c: &Group) -> Self {
        let verts: Vec<VertexId> = c.members().to_vec();
        let mut edges = Vec::new();
        let mut incident = vec![0.0f64; verts.len()];
        let mut total_weight = 0.0;
        for (i, &u) in verts.iter().enumerate() {
            for &(v, w) in g.potentials(u) {
                if v > u {
                    if let Ok(j) = verts.binary_search(&v) {
                        edges.push((i, j, w));
                        incident[i] += w;
                        incident[j] += w;
                        total_weight += w;
                    }
                }
            }
        }
        LocalCand { verts, edges, incident, total_weight }
    }
}

/// Greedy peeling with a size floor: repeatedly remove the member with the
/// minimum incident potential weight (ties: smallest index) until only
/// max(p,1) vertices remain; return the visited set of size >= p with the
/// highest sigma, together with the full trace. Absent when |c| < p.
pub fn peel_at_least_p(
    g: &HeteroGraph,
    c: &Group,
    p: usize,
) -> (Option<WeightedGroup>, PeelTrace) {
    let local = LocalCand::build(g, c);
    peel_local(&local, p)
}

fn peel_local(local: &LocalCand, p: usize) -> (Option<WeightedGroup>, PeelTrace) {
    let mut trace = PeelTrace::default();
    let k = local.verts.len();
    if k < p {
        return (None, trace);
    }
    let floor = p.max(1);

    // adjacency in local indices for incremental updates
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); k];
    for &(i, j, w) in &local.edges {
        adj[i].push((j, w));
        adj[j].push((i, w));
    }
    let mut incident = local.incident.clone();
    let mut alive = vec![true; k];
    // non-negative f64 bits order like the values; ties fall to the index
    let mut heap: BTreeSet<(u64, usize)> =
        (0..k).map(|i| (incident[i].to_bits(), i)).collect();

    let mut weight = local.total_weight;
    let mut size = k;
    let record = |trace: &mut PeelTrace, size: usize, weight: f64| {
        trace.records.push(PeelRecord {
            size,
            total_weight: weight,
            sigma: weight / size as f64,
        });
    };
    record(&mut trace, size, weight);

    // best visited set of size >= p; along the trace sets are nested and
    // sizes strictly decrease, so (weight, size) identifies the winner
    let mut best_removed = 0usize;
    let mut best = (weight, size);

    while size > floor {
        let &(bits, i) = heap.iter().next().expect("heap tracks alive vertices");
        heap.remove(&(bits, i));
        alive[i] = false;
        trace.removals.push((local.verts[i], f64::from_bits(bits)));
        for &(j, w) in &adj[i] {
            if alive[j] {
                heap.remove(&(incident[j].to_bits(), j));
                incident[j] = (incident[j] - w).max(0.0);
                heap.insert((incident[j].to_bits(), j));
                weight -= w;
            }
        }
        size -= 1;
        if size >= p {
            record(&mut trace, size, weight);
            // on a sigma tie the smaller (later) set wins per the global order
            if cmp_sigma(weight, size, best.0, best.1) != Ordering::Less {
                best = (weight, size);
                best_removed = trace.removals.len();
            }
        }
    }

    let removed: Vec<VertexId> = trace.removals[..best_removed]
        .iter()
        .map(|&(v, _)| v)
        .collect();
    let members: Vec<VertexId> = local
        .verts
        .iter()
        .copied()
        .filter(|v| !removed.contains(v))
        .collect();
    (
        Some(WeightedGroup {
            group: Group::from_sorted(members),
            total_weight: best.0,
        }),
        trace,
    )
}

fn incident_weight_within(g: &HeteroGraph, members: &[VertexId], v: VertexId) -> f64 {
    g.potentials(v)
        .iter()
        .filter(|(u, _)| members.binary_search(u).is_ok())
        .map(|&(_, w)| w)
        .sum()
}

fn weight_within(g: &HeteroGraph, members: &[VertexId]) -> f64 {
    let grp = Group::from_sorted(members.to_vec());
    g.total_potential_weight(&grp)
}

// reachability-within-h rows for the peel members over every candidate
// vertex; distances are symmetric, so member rows answer both
// member-member and member-outsider queries
struct HopTable {
    verts: Vec<VertexId>,
    row_verts: Vec<VertexId>,
    rows: Vec<Vec<bool>>,
}

impl HopTable {
    fn build(g: &HeteroGraph, c: &Group, members: &[VertexId], h: u32) -> Self {
        let verts = c.members().to_vec();
        let row_verts = members.to_vec();
        let rows = row_verts
            .iter()
            .map(|&u| {
                let dist = g.bounded_distances(u, h);
                verts.iter().map(|&v| dist[v] <= h).collect()
            })
            .collect();
        HopTable { verts, row_verts, rows }
    }

    fn row(&self, v: VertexId) -> &[bool] {
        let i = self.row_verts.binary_search(&v).expect("vertex is a peel member");
        &self.rows[i]
    }

    fn ok_members(&self, u: VertexId, v: VertexId) -> bool {
        let j = self.verts.binary_search(&v).expect("vertex lies in the candidate");
        self.row(u)[j]
    }

    // index pairs into `members` with d > h
    fn viols(&self, members: &[VertexId]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                if !self.ok_members(members[i], members[j]) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Restore the hop constraint on a peel result: (a) while a pair violates
/// d <= h and the group is above the floor, drop the vertex in the most
/// violated pairs (ties: smaller incident weight, then smaller index);
/// (b) at the floor, try single swaps with non-members of the candidate,
/// keeping only swaps with zero violations and the highest sigma; (c) if
/// violations persist, hand the input back unrepaired.
pub fn post_process(
    g: &HeteroGraph,
    s: &WeightedGroup,
    q: &Query,
    c: &Group,
) -> (WeightedGroup, bool) {
    let mut members: Vec<VertexId> = s.group.members().to_vec();
    let table = HopTable::build(g, c, &members, q.h);
    let mut viols = table.viols(&members);
    if viols.is_empty() {
        return (s.clone(), true);
    }

    // phase (a): removal
    while !viols.is_empty() && members.len() > q.p {
        let mut counts = vec![0usize; members.len()];
        for &(i, j) in &viols {
            counts[i] += 1;
            counts[j] += 1;
        }
        let victim = (0..members.len())
            .max_by(|&a, &b| {
                counts[a].cmp(&counts[b]).then_with(|| {
                    let wa = incident_weight_within(g, &members, members[a]);
                    let wb = incident_weight_within(g, &members, members[b]);
                    // prefer dropping the lighter vertex, then the smaller index
                    wb.partial_cmp(&wa)
                        .unwrap()
                        .then_with(|| members[b].cmp(&members[a]))
                })
            })
            .expect("group is nonempty");
        members.remove(victim);
        viols = table.viols(&members);
    }

    if viols.is_empty() {
        let total_weight = weight_within(g, &members);
        return (
            WeightedGroup { group: Group::from_sorted(members), total_weight },
            true,
        );
    }

    // phase (b): single swaps at the floor
    let mut violating: Vec<usize> = Vec::new();
    for &(i, j) in &viols {
        if !violating.contains(&i) {
            violating.push(i);
        }
        if !violating.contains(&j) {
            violating.push(j);
        }
    }
    violating.sort_unstable();
    let mut best_swap: Option<(f64, Vec<VertexId>)> = None;
    for &xi in &violating {
        let x = members[xi];
        let rest: Vec<VertexId> =
            members.iter().copied().filter(|&m| m != x).collect();
        if rest
            .iter()
            .enumerate()
            .any(|(i, &a)| rest[i + 1..].iter().any(|&b| !table.ok_members(a, b)))
        {
            continue;
        }
        for (yl, &y) in table.verts.iter().enumerate() {
            if y == x || members.binary_search(&y).is_ok() {
                continue;
            }
            if rest.iter().any(|&r| !table.row(r)[yl]) {
                continue;
            }
            let mut trial: Vec<VertexId> = members.iter().copied().filter(|&m| m != x).collect();
            trial.push(y);
            trial.sort_unstable();
            let w = weight_within(g, &trial);
            let better = match &best_swap {
                None => true,
                Some((bw, bm)) => cmp_candidates(w, &trial, *bw, bm) == Ordering::Less,
            };
            if better {
                best_swap = Some((w, trial));
            }
        }
    }
    if let Some((w, m)) = best_swap {
        return (
            WeightedGroup { group: Group::from_sorted(m), total_weight: w },
            true,
        );
    }

    // phase (c): unrepairable
    (s.clone(), false)
}

#[derive(Debug)]
pub struct MaxGFReport {
    pub solution: Option<Solution>,
    /// Best pre-post-processing peel result across all candidates.
    pub best_peel: Option<WeightedGroup>,
    pub candidates: usize,
    pub pruned: usize,
}

fn run_candidate(
    g: &HeteroGraph,
    center: VertexId,
    c: &Group,
    q: &Query,
    cfg: &MaxGFConfig,
    incumbent: &Mutex<Option<(f64, usize)>>,
) -> CandidateResult {
    let local = LocalCand::build(g, c);
    let ub = local.total_weight / q.p as f64;
    if c.len() < q.p {
        return CandidateResult {
            center,
            upper_bound: ub,
            best_relaxed: None,
            best_strict: None,
            pruned: false,
        };
    }
    if cfg.prune {
        // stale reads only weaken pruning; a candidate whose bound loses
        // strictly to a strict incumbent can never win the final selection
        let inc = *incumbent.lock().unwrap();
        if let Some((w, n)) = inc {
            if cmp_sigma(ub, 1, w, n) == Ordering::Less {
                return CandidateResult {
                    center,
                    upper_bound: ub,
                    best_relaxed: None,
                    best_strict: None,
                    pruned: true,
                };
            }
        }
    }
    let (peeled, _trace) = peel_local(&local, q.p);
    let best_relaxed = peeled;
    let best_strict = best_relaxed.as_ref().and_then(|s| {
        let (repaired, ok) = post_process(g, s, q, c);
        ok.then_some(repaired)
    });
    if let Some(strict) = &best_strict {
        let mut inc = incumbent.lock().unwrap();
        let dominated = match *inc {
            None => false,
            Some((w, n)) => {
                cmp_sigma(strict.total_weight, strict.group.len(), w, n) != Ordering::Greater
            }
        };
        if !dominated {
            *inc = Some((strict.total_weight, strict.group.len()));
        }
    }
    CandidateResult {
        center,
        upper_bound: ub,
        best_relaxed,
        best_strict,
        pruned: false,
    }
}

/// Full MaxGF with per-candidate detail kept for reporting.
pub fn solve_maxgf_report(g: &HeteroGraph, q: &Query, cfg: &MaxGFConfig) -> MaxGFReport {
    let start = Instant::now();
    if q.p > g.n() {
        return MaxGFReport { solution: None, best_peel: None, candidates: 0, pruned: 0 };
    }
    let incumbent: Mutex<Option<(f64, usize)>> = Mutex::new(None);

    #[cfg(feature = "parallel")]
    let balls: Vec<Group> = if cfg.parallel_candidates {
        (0..g.n())
            .into_par_iter()
            .map(|v| candidate(g, v, q, cfg))
            .collect()
    } else {
        (0..g.n()).map(|v| candidate(g, v, q, cfg)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let balls: Vec<Group> = (0..g.n()).map(|v| candidate(g, v, q, cfg)).collect();

    // distinct balls only: saturated balls at large h collapse to a handful
    // of candidates, and duplicates peel to the same result
    let mut seen: HashSet<&Group> = HashSet::with_capacity(balls.len());
    let unique: Vec<(VertexId, &Group)> = balls
        .iter()
        .enumerate()
        .filter(|(_, c)| seen.insert(c))
        .collect();

    #[cfg(feature = "parallel")]
    let results: Vec<CandidateResult> = if cfg.parallel_candidates {
        unique
            .par_iter()
            .map(|&(v, c)| run_candidate(g, v, c, q, cfg, &incumbent))
            .collect()
    } else {
        unique
            .iter()
            .map(|&(v, c)| run_candidate(g, v, c, q, cfg, &incumbent))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<CandidateResult> = unique
        .iter()
        .map(|&(v, c)| run_candidate(g, v, c, q, cfg, &incumbent))
        .collect();

    let pruned = results.iter().filter(|r| r.pruned).count();
    let pick = |sel: &dyn Fn(&CandidateResult) -> Option<&WeightedGroup>| {
        let mut best: Option<&WeightedGroup> = None;
        for r in &results {
            if let Some(wg) = sel(r) {
                let wins = match best {
                    None => true,
                    Some(b) => {
                        cmp_candidates(
                            wg.total_weight,
                            wg.group.members(),
                            b.total_weight,
                            b.group.members(),
                        ) == Ordering::Less
                    }
                };
                if wins {
                    best = Some(wg);
                }
            }
        }
        best.cloned()
    };
    let best_strict = pick(&|r| r.best_strict.as_ref());
    let best_peel = pick(&|r| r.best_relaxed.as_ref());

    let winner = match (&best_strict, &best_peel) {
        (Some(s), _) => Some(s.clone()),
        (None, Some(r)) if !cfg.strict_only => Some(r.clone()),
        _ => None,
    };
    let solution = winner.map(|wg| {
        let mut s = Solution::evaluate(g, wg.group, q, "maxgf");
        s.elapsed = start.elapsed();
        s
    });
    MaxGFReport {
        solution,
        best_peel,
        candidates: results.len(),
        pruned,
    }
}

pub fn solve_maxgf(g: &HeteroGraph, q: &Query, cfg: &MaxGFConfig) -> Option<Solution> {
    solve_maxgf_report(g, q, cfg).solution
}
