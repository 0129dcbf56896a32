//! Comparators, metrics, instance generation, and sweep execution.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::exact::{solve_exact, ExactConfig};
use crate::graph::{GraphBuilder, Group, HeteroGraph, Query, VertexId};
use crate::maxgf::{solve_maxgf, MaxGFConfig};
use crate::solution::Solution;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("requested size {size} exceeds graph order {n}")]
    SizeExceedsGraph { size: usize, n: usize },
    #[error("batch holds no entries for solver `{0}`")]
    EmptyBatch(String),
    #[error("instance {0} lacks an optimal solution")]
    MissingOptimal(usize),
    #[error("empty solver list")]
    EmptySolverList,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Random instance generator: every unordered pair independently becomes a
/// friend edge with `friend_prob`, otherwise a potential edge with
/// `potential_prob` and a uniform weight in (0,1].
#[derive(Debug, Clone, Copy)]
pub struct GenSpec {
    pub n: usize,
    pub friend_prob: f64,
    pub potential_prob: f64,
    pub seed: u64,
}

pub fn gen_random(spec: &GenSpec) -> HeteroGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut builder = GraphBuilder::new();
    let labels: Vec<String> = (0..spec.n).map(|i| i.to_string()).collect();
    for l in &labels {
        builder.intern(l);
    }
    for u in 0..spec.n {
        for v in (u + 1)..spec.n {
            if rng.gen::<f64>() < spec.friend_prob {
                builder.add_friend(&labels[u], &labels[v], 0).unwrap();
            } else if rng.gen::<f64>() < spec.potential_prob {
                let w = 1.0 - rng.gen::<f64>(); // uniform in (0,1]
                builder.add_potential(&labels[u], &labels[v], w, 0).unwrap();
            }
        }
    }
    builder.build()
}

/// Sparse generator for large instances: `friend_edges` + `potential_edges`
/// distinct random pairs, disjoint between relations.
pub fn gen_sparse(
    n: usize,
    friend_edges: usize,
    potential_edges: usize,
    seed: u64,
) -> HeteroGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut builder = GraphBuilder::new();
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    for l in &labels {
        builder.intern(l);
    }
    let mut taken: HashSet<(usize, usize)> = HashSet::new();
    let draw = |rng: &mut ChaCha8Rng, taken: &mut HashSet<(usize, usize)>| loop {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if taken.insert(key) {
            return key;
        }
    };
    for _ in 0..friend_edges {
        let (u, v) = draw(&mut rng, &mut taken);
        builder.add_friend(&labels[u], &labels[v], 0).unwrap();
    }
    for _ in 0..potential_edges {
        let (u, v) = draw(&mut rng, &mut taken);
        let w = 1.0 - rng.gen::<f64>();
        builder.add_potential(&labels[u], &labels[v], w, 0).unwrap();
    }
    builder.build()
}

/// BFS sampling over friend edges from seeded random starts until `size`
/// vertices are collected; returns the induced subgraph on both relations
/// with the original labels.
pub fn sample_subgraph(
    g: &HeteroGraph,
    size: usize,
    seed: u64,
) -> Result<HeteroGraph, EvalError> {
    if size > g.n() {
        return Err(EvalError::SizeExceedsGraph { size, n: g.n() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<VertexId> = Vec::with_capacity(size);
    let mut visited = vec![false; g.n()];
    while picked.len() < size {
        let start = loop {
            let v = rng.gen_range(0..g.n());
            if !visited[v] {
                break v;
            }
        };
        let mut queue = std::collections::VecDeque::from([start]);
        visited[start] = true;
        picked.push(start);
        while let Some(u) = queue.pop_front() {
            if picked.len() == size {
                break;
            }
            let mut nbrs: Vec<VertexId> = g
                .friends(u)
                .iter()
                .copied()
                .filter(|&v| !visited[v])
                .collect();
            nbrs.shuffle(&mut rng);
            for v in nbrs {
                if picked.len() == size {
                    break;
                }
                if !visited[v] {
                    visited[v] = true;
                    picked.push(v);
                    queue.push_back(v);
                }
            }
        }
    }
    picked.sort_unstable();
    let keep = Group::from_sorted(picked);
    let mut builder = GraphBuilder::new();
    for &v in keep.iter() {
        builder.intern(g.label(v));
    }
    for &u in keep.iter() {
        for &v in g.friends(u) {
            if v > u && keep.contains(v) {
                builder.add_friend(g.label(u), g.label(v), 0).unwrap();
            }
        }
        for &(v, w) in g.potentials(u) {
            if v > u && keep.contains(v) {
                builder.add_potential(g.label(u), g.label(v), w, 0).unwrap();
            }
        }
    }
    Ok(builder.build())
}

/// Hop-blind, edge-type-blind densest p-subgraph heuristic: weight 1 per
/// friend edge plus w per potential edge, peel the minimum combined
/// incident weight (ties: smallest index) until exactly p vertices remain.
pub fn dks_comparator(g: &HeteroGraph, p: usize, q: &Query) -> Result<Solution, EvalError> {
    if p > g.n() {
        return Err(EvalError::SizeExceedsGraph { size: p, n: g.n() });
    }
    let start = Instant::now();
    let mut alive = vec![true; g.n()];
    let mut combined: Vec<f64> = (0..g.n())
        .map(|v| {
            g.friend_degree(v) as f64
                + g.potentials(v).iter().map(|&(_, w)| w).sum::<f64>()
        })
        .collect();
    let mut size = g.n();
    while size > p {
        let victim = (0..g.n())
            .filter(|&v| alive[v])
            .min_by(|&a, &b| combined[a].partial_cmp(&combined[b]).unwrap())
            .unwrap();
        alive[victim] = false;
        size -= 1;
        for &u in g.friends(victim) {
            combined[u] -= 1.0;
        }
        for &(u, w) in g.potentials(victim) {
            combined[u] -= w;
        }
    }
    let group = Group::from_sorted((0..g.n()).filter(|&v| alive[v]).collect());
    let mut s = Solution::evaluate(g, group, q, "dks");
    s.elapsed = start.elapsed();
    Ok(s)
}

/// One evaluated instance: solutions per solver plus the exact optimum
/// when available.
#[derive(Debug)]
pub struct BatchEntry {
    pub instance: usize,
    pub query: Query,
    pub solutions: Vec<(String, Option<Solution>)>,
    pub optimal: Option<Solution>,
}

#[derive(Debug, Default)]
pub struct Batch(pub Vec<BatchEntry>);

impl Batch {
    fn solver_entries<'a>(&'a self, solver: &'a str) -> impl Iterator<Item = (&'a BatchEntry, &'a Option<Solution>)> {
        self.0.iter().flat_map(move |e| {
            e.solutions
                .iter()
                .filter(move |(name, _)| name == solver)
                .map(move |(_, s)| (e, s))
        })
    }
}

/// Fraction of returned solutions that satisfy the strict hop constraint.
pub fn fea_ratio(b: &Batch, solver: &str) -> Result<f64, EvalError> {
    let mut returned = 0usize;
    let mut feasible = 0usize;
    for (_, s) in b.solver_entries(solver) {
        if let Some(s) = s {
            returned += 1;
            if s.strictly_feasible {
                feasible += 1;
            }
        }
    }
    if returned == 0 {
        return Err(EvalError::EmptyBatch(solver.to_owned()));
    }
    Ok(feasible as f64 / returned as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjRatio {
    pub mean: f64,
    pub counted: usize,
    /// Instances skipped because the optimum has sigma 0.
    pub excluded_zero_opt: usize,
}

/// Mean of sigma_solver / sigma_opt over instances with a nonzero optimum;
/// a solver returning nothing counts as ratio 0.
pub fn obj_ratio(b: &Batch, solver: &str) -> Result<ObjRatio, EvalError> {
    let mut sum = 0.0;
    let mut counted = 0usize;
    let mut excluded = 0usize;
    let mut seen = false;
    for (entry, s) in b.solver_entries(solver) {
        seen = true;
        let opt = entry
            .optimal
            .as_ref()
            .ok_or(EvalError::MissingOptimal(entry.instance))?;
        if opt.sigma == 0.0 {
            excluded += 1;
            continue;
        }
        sum += s.as_ref().map_or(0.0, |s| s.sigma / opt.sigma);
        counted += 1;
    }
    if !seen {
        return Err(EvalError::EmptyBatch(solver.to_owned()));
    }
    Ok(ObjRatio {
        mean: if counted == 0 { 0.0 } else { sum / counted as f64 },
        counted,
        excluded_zero_opt: excluded,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    N,
    H,
    P,
}

impl SweepVar {
    fn key(&self) -> &'static str {
        match self {
            SweepVar::N => "n",
            SweepVar::H => "h",
            SweepVar::P => "p",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub sweep: SweepVar,
    pub values: Vec<usize>,
    pub n: usize,
    pub h: u32,
    pub p: usize,
    pub friend_prob: f64,
    pub potential_prob: f64,
    pub solvers: Vec<String>,
    pub reps: usize,
    pub seed: u64,
    pub max_ball_size: usize,
    pub out_dir: Option<PathBuf>,
}

impl SweepConfig {
    /// Plain-text `key=value` config, one per line, `#` comments.
    pub fn parse(text: &str) -> Result<Self, EvalError> {
        let mut cfg = SweepConfig {
            sweep: SweepVar::N,
            values: Vec::new(),
            n: 10,
            h: 2,
            p: 3,
            friend_prob: 0.3,
            potential_prob: 0.2,
            solvers: Vec::new(),
            reps: 30,
            seed: 0,
            max_ball_size: 25,
            out_dir: None,
        };
        let bad = |k: &str, v: &str| EvalError::InvalidConfig(format!("bad value `{v}` for `{k}`"));
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| EvalError::InvalidConfig(format!("expected key=value, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "sweep" => {
                    cfg.sweep = match value {
                        "n" => SweepVar::N,
                        "h" => SweepVar::H,
                        "p" => SweepVar::P,
                        _ => return Err(bad(key, value)),
                    }
                }
                "values" => {
                    cfg.values = value
                        .split(',')
                        .map(|t| t.trim().parse().map_err(|_| bad(key, value)))
                        .collect::<Result<_, _>>()?;
                }
                "n" => cfg.n = value.parse().map_err(|_| bad(key, value))?,
                "h" => cfg.h = value.parse().map_err(|_| bad(key, value))?,
                "p" => cfg.p = value.parse().map_err(|_| bad(key, value))?,
                "friend_prob" => cfg.friend_prob = value.parse().map_err(|_| bad(key, value))?,
                "potential_prob" => {
                    cfg.potential_prob = value.parse().map_err(|_| bad(key, value))?
                }
                "solvers" => {
                    cfg.solvers = value.split(',').map(|t| t.trim().to_owned()).collect();
                }
                "reps" => cfg.reps = value.parse().map_err(|_| bad(key, value))?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad(key, value))?,
                "max_ball_size" => {
                    cfg.max_ball_size = value.parse().map_err(|_| bad(key, value))?
                }
                "out_dir" => cfg.out_dir = Some(PathBuf::from(value)),
                _ => return Err(EvalError::InvalidConfig(format!("unknown key `{key}`"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        if self.solvers.is_empty() {
            return Err(EvalError::EmptySolverList);
        }
        for s in &self.solvers {
            if !matches!(s.as_str(), "exact" | "maxgf" | "dks") {
                return Err(EvalError::InvalidConfig(format!("unknown solver `{s}`")));
            }
        }
        if self.values.is_empty() {
            return Err(EvalError::InvalidConfig("values must be nonempty".into()));
        }
        if !(0.0..=1.0).contains(&self.friend_prob) || !(0.0..=1.0).contains(&self.potential_prob)
        {
            return Err(EvalError::InvalidConfig("probabilities must lie in [0,1]".into()));
        }
        if self.reps == 0 {
            return Err(EvalError::InvalidConfig("reps must be \u{2265} 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ReportRow {
    pub scenario: String,
    pub instance: usize,
    pub solver: String,
    pub sigma: f64,
    pub feasible: bool,
    pub max_hop: Option<u32>,
    pub size: usize,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Aggregate {
    pub scenario: String,
    pub solver: String,
    pub runs: usize,
    pub mean_sigma: f64,
    pub std_sigma: f64,
    pub mean_elapsed_ms: f64,
    pub std_elapsed_ms: f64,
    pub mean_size: f64,
    pub fea_ratio: f64,
    pub obj_ratio: Option<f64>,
    pub obj_excluded_zero_opt: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RowError {
    pub scenario: String,
    pub instance: usize,
    pub solver: String,
    pub message: String,
}

#[derive(Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<ReportRow>,
    pub aggregates: Vec<Aggregate>,
    pub errors: Vec<RowError>,
}

fn mix_seed(base: u64, scenario: usize, rep: usize) -> u64 {
    let mut x = base
        ^ (scenario as u64).wrapping_mul(0x9e3779b97f4a7c15)
        ^ (rep as u64).wrapping_mul(0xd1b54a32d192ed03);
    // splitmix64 finalizer
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

struct InstanceOutcome {
    rows: Vec<ReportRow>,
    errors: Vec<RowError>,
    entry: BatchEntry,
}

fn run_instance(
    cfg: &SweepConfig,
    scenario: &str,
    si: usize,
    rep: usize,
) -> InstanceOutcome {
    let value = cfg.values[si];
    let (n, h, p) = match cfg.sweep {
        SweepVar::N => (value, cfg.h, cfg.p),
        SweepVar::H => (cfg.n, value as u32, cfg.p),
        SweepVar::P => (cfg.n, cfg.h, value),
    };
    let g = gen_random(&GenSpec {
        n,
        friend_prob: cfg.friend_prob,
        potential_prob: cfg.potential_prob,
        seed: mix_seed(cfg.seed, si, rep),
    });
    let q = Query { h, p };
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let mut solutions = Vec::new();
    let mut optimal = None;
    for solver in &cfg.solvers {
        let started = Instant::now();
        let outcome: Result<Option<Solution>, String> = match solver.as_str() {
            "exact" => solve_exact(
                &g,
                &q,
                &ExactConfig { max_ball_size: cfg.max_ball_size, time_budget: None },
            )
            .map_err(|e| e.to_string()),
            "maxgf" => Ok(solve_maxgf(
                &g,
                &q,
                &MaxGFConfig { parallel_candidates: false, ..Default::default() },
            )),
            "dks" => match dks_comparator(&g, q.p.min(g.n()), &q) {
                Ok(s) if q.p <= g.n() => Ok(Some(s)),
                Ok(_) => Ok(None),
                Err(e) => Err(e.to_string()),
            },
            _ => unreachable!("validated solver list"),
        };
        let elapsed_ms = started.elapsed().as_secs_f64() * 1e3;
        match outcome {
            Ok(sol) => {
                rows.push(ReportRow {
                    scenario: scenario.to_owned(),
                    instance: rep,
                    solver: solver.clone(),
                    sigma: sol.as_ref().map_or(0.0, |s| s.sigma),
                    feasible: sol.as_ref().is_some_and(|s| s.strictly_feasible),
                    max_hop: sol.as_ref().and_then(|s| s.max_hop),
                    size: sol.as_ref().map_or(0, |s| s.group.len()),
                    elapsed_ms,
                });
                if solver == "exact" {
                    optimal = sol.clone();
                }
                solutions.push((solver.clone(), sol));
            }
            Err(message) => errors.push(RowError {
                scenario: scenario.to_owned(),
                instance: rep,
                solver: solver.clone(),
                message,
            }),
        }
    }
    InstanceOutcome {
        rows,
        errors,
        entry: BatchEntry { instance: rep, query: q, solutions, optimal },
    }
}

/// Execute the sweep: `reps` seeded instances per scenario, every solver
/// on each, rows plus per-scenario aggregates.
pub fn run_experiment(cfg: &SweepConfig) -> Result<EvalReport, EvalError> {
    cfg.validate()?;
    let mut report = EvalReport::default();
    let mut batches: Vec<(String, Batch)> = Vec::new();
    for (si, &value) in cfg.values.iter().enumerate() {
        let scenario = format!("{}={}", cfg.sweep.key(), value);
        #[cfg(feature = "parallel")]
        let outcomes: Vec<InstanceOutcome> = (0..cfg.reps)
            .into_par_iter()
            .map(|rep| run_instance(cfg, &scenario, si, rep))
            .collect();
        #[cfg(not(feature = "parallel"))]
        let outcomes: Vec<InstanceOutcome> = (0..cfg.reps)
            .map(|rep| run_instance(cfg, &scenario, si, rep))
            .collect();

        let mut batch = Batch::default();
        for o in outcomes {
            report.rows.extend(o.rows);
            report.errors.extend(o.errors);
            batch.0.push(o.entry);
        }
        batches.push((scenario, batch));
    }
    report
        .rows
        .sort_by(|a, b| (&a.scenario, a.instance, &a.solver).cmp(&(&b.scenario, b.instance, &b.solver)));
    for (scenario, batch) in &batches {
        for solver in &cfg.solvers {
            let agg = aggregate_rows(&report.rows, scenario, solver, batch);
            if let Some(agg) = agg {
                report.aggregates.push(agg);
            }
        }
    }
    Ok(report)
}

/// Aggregate the (sorted) rows of one scenario/solver pair; recomputing
/// this from an emitted report reproduces the emitted aggregates exactly.
pub fn aggregate_rows(
    rows: &[ReportRow],
    scenario: &str,
    solver: &str,
    batch: &Batch,
) -> Option<Aggregate> {
    let rows: Vec<&ReportRow> = rows
        .iter()
        .filter(|r| r.scenario == scenario && r.solver == solver)
        .collect();
    if rows.is_empty() {
        return None;
    }
    let sigmas: Vec<f64> = rows.iter().map(|r| r.sigma).collect();
    let times: Vec<f64> = rows.iter().map(|r| r.elapsed_ms).collect();
    let sizes: Vec<f64> = rows.iter().map(|r| r.size as f64).collect();
    let obj = if batch.0.iter().all(|e| e.optimal.is_some()) && solver != "exact" {
        obj_ratio(batch, solver).ok()
    } else {
        None
    };
    Some(Aggregate {
        scenario: scenario.to_owned(),
        solver: solver.to_owned(),
        runs: rows.len(),
        mean_sigma: mean(&sigmas),
        std_sigma: stddev(&sigmas),
        mean_elapsed_ms: mean(&times),
        std_elapsed_ms: stddev(&times),
        mean_size: mean(&sizes),
        fea_ratio: fea_ratio(batch, solver).unwrap_or(0.0),
        obj_ratio: obj.map(|o| o.mean),
        obj_excluded_zero_opt: obj.map_or(0, |o| o.excluded_zero_opt),
    })
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn stddev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

impl EvalReport {
    pub fn to_csv(&self) -> Result<String, EvalError> {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            wtr.serialize(row)?;
        }
        let bytes = wtr.into_inner().map_err(|e| EvalError::InvalidConfig(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn rows_from_csv(text: &str) -> Result<Vec<ReportRow>, EvalError> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for r in rdr.deserialize() {
            rows.push(r?);
        }
        Ok(rows)
    }

    fn plot_tsv(&self, cfg: &SweepConfig, metric: impl Fn(&Aggregate) -> Option<f64>) -> String {
        let mut out = String::new();
        out.push_str(cfg.sweep.key());
        for s in &cfg.solvers {
            out.push('\t');
            out.push_str(s);
        }
        out.push('\n');
        for &value in &cfg.values {
            let scenario = format!("{}={}", cfg.sweep.key(), value);
            out.push_str(&value.to_string());
            for solver in &cfg.solvers {
                out.push('\t');
                let cell = self
                    .aggregates
                    .iter()
                    .find(|a| a.scenario == scenario && &a.solver == solver)
                    .and_then(&metric);
                match cell {
                    Some(x) => out.push_str(&format!("{x}")),
                    None => out.push_str("NA"),
                }
            }
            out.push('\n');
        }
        out
    }

    /// Write report.csv, report.json, and plot_<figure>.tsv files.
    pub fn write_outputs(&self, cfg: &SweepConfig, dir: &Path) -> Result<(), EvalError> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.csv"), self.to_csv()?)?;
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)?)?;
        std::fs::write(
            dir.join("plot_time.tsv"),
            self.plot_tsv(cfg, |a| Some(a.mean_elapsed_ms)),
        )?;
        std::fs::write(
            dir.join("plot_fearatio.tsv"),
            self.plot_tsv(cfg, |a| Some(a.fea_ratio)),
        )?;
        std::fs::write(
            dir.join("plot_objratio.tsv"),
            self.plot_tsv(cfg, |a| a.obj_ratio),
        )?;
        std::fs::write(
            dir.join("plot_size.tsv"),
            self.plot_tsv(cfg, |a| Some(a.mean_size)),
        )?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_fixtures::graph_x;

    #[test]
    fn dks_graph_x() {
        let g = graph_x();
        let q = Query::new(2, 3).unwrap();
        let s = dks_comparator(&g, 3, &q).unwrap();
        let labels: Vec<&str> = s.group.iter().map(|&v| g.label(v)).collect();
        assert_eq!(labels, ["2", "3", "4"]);
        assert_eq!(s.sigma, 0.0);
    }

    #[test]
    fn dks_p_equals_n() {
        let g = graph_x();
        let q = Query::new(2, 5).unwrap();
        let s = dks_comparator(&g, 5, &q).unwrap();
        assert_eq!(s.group.len(), 5);
    }

    #[test]
    fn dks_rejects_oversized_p() {
        let g = graph_x();
        let q = Query::new(2, 3).unwrap();
        assert!(matches!(
            dks_comparator(&g, 6, &q),
            Err(EvalError::SizeExceedsGraph { size: 6, n: 5 })
        ));
    }

    #[test]
    fn dks_friendless_graph_peels_potential_weight() {
        let g = crate::graph::parse_graph("P a b 0.9\nP b c 0.5\nP c d 0.1").unwrap();
        let q = Query::new(1, 2).unwrap();
        let s = dks_comparator(&g, 2, &q).unwrap();
        let labels: Vec<&str> = s.group.iter().map(|&v| g.label(v)).collect();
        assert_eq!(labels, ["a", "b"]);
    }

    #[test]
    fn gen_random_is_seed_deterministic() {
        let spec = GenSpec { n: 10, friend_prob: 0.3, potential_prob: 0.2, seed: 7 };
        let a = gen_random(&spec);
        let b = gen_random(&spec);
        assert_eq!(a.to_text(), b.to_text());
        for v in 0..a.n() {
            for &(_, w) in a.potentials(v) {
                assert!(w > 0.0 && w <= 1.0);
            }
        }
    }

    #[test]
    fn gen_random_edgeless() {
        let spec = GenSpec { n: 6, friend_prob: 0.0, potential_prob: 0.0, seed: 1 };
        let g = gen_random(&spec);
        assert_eq!(g.num_friend_edges(), 0);
        assert_eq!(g.num_potential_edges(), 0);
    }

    #[test]
    fn sample_full_size_is_isomorphic() {
        let g = graph_x();
        let s = sample_subgraph(&g, 5, 3).unwrap();
        assert_eq!(s.to_text(), g.to_text());
    }

    #[test]
    fn sample_single_vertex() {
        let g = graph_x();
        let s = sample_subgraph(&g, 1, 3).unwrap();
        assert_eq!(s.n(), 1);
        assert_eq!(s.num_friend_edges(), 0);
        assert_eq!(s.num_potential_edges(), 0);
    }

    #[test]
    fn sample_graph_x_size_three_follows_bfs() {
        let g = graph_x();
        // Graph X is friend-connected, so every 3-vertex sample must be a
        // friend-connected BFS prefix of it
        let mut seen = std::collections::HashSet::new();
        for seed in 0..40 {
            let s = sample_subgraph(&g, 3, seed).unwrap();
            assert_eq!(s.n(), 3);
            let start = 0;
            let reach = s.ball(start, 2).unwrap();
            assert_eq!(reach.len(), 3, "sample not friend-connected (seed {seed})");
            let mut labels: Vec<String> = (0..3).map(|v| s.label(v).to_owned()).collect();
            labels.sort();
            seen.insert(labels.join(","));
        }
        // starting at vertex 1 both {1,2,3} and {1,2,4} are reachable orders
        assert!(seen.len() > 1, "neighbor order never varied: {seen:?}");
    }

    #[test]
    fn fea_and_obj_ratios() {
        let g = graph_x();
        let q = Query::new(2, 3).unwrap();
        let opt = solve_exact(&g, &q, &ExactConfig::default()).unwrap();
        let maxgf = solve_maxgf(&g, &q, &MaxGFConfig { parallel_candidates: false, ..Default::default() });
        let dks = dks_comparator(&g, 3, &q).unwrap();
        let batch = Batch(vec![BatchEntry {
            instance: 0,
            query: q,
            solutions: vec![
                ("maxgf".into(), maxgf),
                ("dks".into(), Some(dks)),
            ],
            optimal: opt,
        }]);
        assert_eq!(fea_ratio(&batch, "maxgf").unwrap(), 1.0);
        let o = obj_ratio(&batch, "maxgf").unwrap();
        assert!((o.mean - 1.0).abs() < 1e-12);
        let o = obj_ratio(&batch, "dks").unwrap();
        assert_eq!(o.mean, 0.0);
        assert!(matches!(
            fea_ratio(&batch, "nope"),
            Err(EvalError::EmptyBatch(_))
        ));
    }

    #[test]
    fn fea_ratio_counts_feasible_fraction() {
        // synthetic: 4 entries, 3 feasible
        let g = graph_x();
        let q = Query::new(2, 1).unwrap();
        let sol = |members: &[&str], feasible: bool| {
            let grp: Group = members.iter().map(|l| g.vertex(l).unwrap()).collect();
            let mut s = Solution::evaluate(&g, grp, &q, "t");
            s.strictly_feasible = feasible;
            Some(s)
        };
        let entries: Vec<BatchEntry> = [true, true, false, true]
            .iter()
            .enumerate()
            .map(|(i, &f)| BatchEntry {
                instance: i,
                query: q,
                solutions: vec![("t".into(), sol(&["1"], f))],
                optimal: None,
            })
            .collect();
        assert_eq!(fea_ratio(&Batch(entries), "t").unwrap(), 0.75);
    }

    #[test]
    fn config_parse_and_validation() {
        let cfg = SweepConfig::parse(
            "sweep=n\nvalues=8,10\nsolvers=exact,maxgf\nreps=2\nseed=5\nfriend_prob=0.4\n",
        )
        .unwrap();
        assert_eq!(cfg.values, [8, 10]);
        assert_eq!(cfg.solvers, ["exact", "maxgf"]);
        assert!(SweepConfig::parse("sweep=n\nvalues=8\nreps=1\n").is_err()); // no solvers
        assert!(SweepConfig::parse("sweep=q\nvalues=8\nsolvers=maxgf\n").is_err());
        assert!(SweepConfig::parse("nonsense\n").is_err());
    }

    #[test]
    fn experiment_row_arithmetic() {
        let cfg = SweepConfig::parse(
            "sweep=n\nvalues=8,10,12\nsolvers=exact,maxgf,dks\nreps=3\nseed=11\nfriend_prob=0.3\npotential_prob=0.3\nh=2\np=3\n",
        )
        .unwrap();
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.rows.len() + report.errors.len(), 27);
        assert_eq!(report.aggregates.len(), 9);
        // exact rows are always strictly feasible when a solution is returned
        for r in report.rows.iter().filter(|r| r.solver == "exact" && r.size > 0) {
            assert!(r.feasible);
        }
    }

    #[test]
    fn aggregates_match_rows_recomputation() {
        let cfg = SweepConfig::parse(
            "sweep=n\nvalues=8,10\nsolvers=exact,maxgf,dks\nreps=4\nseed=21\nfriend_prob=0.3\npotential_prob=0.3\nh=2\np=3\n",
        )
        .unwrap();
        let report = run_experiment(&cfg).unwrap();
        assert!(!report.aggregates.is_empty());
        for agg in &report.aggregates {
            let rows: Vec<&ReportRow> = report
                .rows
                .iter()
                .filter(|r| r.scenario == agg.scenario && r.solver == agg.solver)
                .collect();
            assert_eq!(rows.len(), agg.runs);
            let mean = |f: &dyn Fn(&ReportRow) -> f64| {
                rows.iter().map(|r| f(r)).sum::<f64>() / rows.len() as f64
            };
            assert_eq!(agg.mean_sigma.to_bits(), mean(&|r| r.sigma).to_bits());
            assert_eq!(agg.mean_elapsed_ms.to_bits(), mean(&|r| r.elapsed_ms).to_bits());
            assert_eq!(agg.mean_size.to_bits(), mean(&|r| r.size as f64).to_bits());
            let m = mean(&|r| r.sigma);
            let std = (rows.iter().map(|r| (r.sigma - m).powi(2)).sum::<f64>()
                / (rows.len() - 1) as f64)
                .sqrt();
            assert_eq!(agg.std_sigma.to_bits(), std.to_bits());
        }
    }

    #[test]
    fn csv_json_round_trip() {
        let cfg = SweepConfig::parse(
            "sweep=h\nvalues=2,3\nsolvers=maxgf\nreps=2\nseed=3\nn=10\np=3\n",
        )
        .unwrap();
        let report = run_experiment(&cfg).unwrap();
        let csv_text = report.to_csv().unwrap();
        assert!(csv_text.starts_with("scenario,instance,solver,sigma,feasible,max_hop,size,elapsed_ms"));
        let rows = EvalReport::rows_from_csv(&csv_text).unwrap();
        assert_eq!(rows, report.rows);
        let json = serde_json::to_string(&report).unwrap();
        let back: EvalReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.rows, report.rows);
        assert_eq!(back.aggregates, report.aggregates);
    }
}
