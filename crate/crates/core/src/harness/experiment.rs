// Copyright 2026 The mgskip Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Builds and runs every `(algorithm, seed)` pair of an experiment.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::config::{
    AlgorithmKind, AlgorithmSpec, ExperimentSpec, GraphSpec, KRule, KappaSpec, ProblemKind,
};
use crate::algorithms::{mg_skip_run, puda_run, Diagnostics, IterRecord, PudaConfig, RunConfig};
use crate::gossip::{default_k, MultiGossipOperator};
use crate::problems::{
    centralized_solve, gen_least_squares, gen_logistic, load_libsvm, logistic_from_partition,
    ProblemInstance, ReferenceSolution, Regularizer,
};
use crate::topology::{
    build_random_connectivity, build_ring, metropolis_weights, Graph, MixingMatrix,
};
use crate::{Error, Result};

/// Tolerance handed to the centralized solver for `x*`.
pub const REFERENCE_TOL: f64 = 1e-13;

pub const TRACE_HEADER: &str = "algorithm,seed,t,theta,comm_rounds,grad_evals,rel_err,psi";

/// One CSV row of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub algorithm: String,
    pub seed: u64,
    pub t: usize,
    pub theta: bool,
    pub comm_rounds: u64,
    pub grad_evals: u64,
    pub rel_err: f64,
    pub psi: Option<f64>,
}

impl TraceRecord {
    pub fn from_iter(algorithm: &str, seed: u64, r: &IterRecord) -> Self {
        TraceRecord {
            algorithm: algorithm.to_string(),
            seed,
            t: r.t,
            theta: r.theta,
            comm_rounds: r.comm_rounds,
            grad_evals: r.grad_evals,
            rel_err: r.rel_err,
            psi: r.psi,
        }
    }

    pub fn to_csv_row(&self) -> String {
        let psi = self.psi.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{}",
            self.algorithm,
            self.seed,
            self.t,
            u8::from(self.theta),
            self.comm_rounds,
            self.grad_evals,
            self.rel_err,
            psi
        )
    }
}

pub fn trace_csv(algorithm: &str, seed: u64, records: &[IterRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&TraceRecord::from_iter(algorithm, seed, r).to_csv_row());
        out.push('\n');
    }
    out
}

fn build_graph(spec: &GraphSpec) -> Result<Graph> {
    match *spec {
        GraphSpec::Ring { n } => build_ring(n),
        GraphSpec::Random { n, iota, seed } => build_random_connectivity(n, iota, seed),
    }
}

/// The graph and its Metropolis–Hastings mixing matrix.
pub fn build_network(spec: &GraphSpec) -> Result<(Graph, Arc<MixingMatrix>)> {
    let g = build_graph(spec)?;
    let w = metropolis_weights(&g)?;
    Ok((g, Arc::new(w)))
}

pub fn build_problem(
    spec: &ExperimentSpec,
    mixing: &MixingMatrix,
    seed: u64,
) -> Result<ProblemInstance> {
    let n = spec.graph.n();
    let p = &spec.problem;
    match &p.kind {
        ProblemKind::LeastSquares { d, mu, kappa } => {
            let kappa = match *kappa {
                KappaSpec::Value(k) => k,
                KappaSpec::Gap => {
                    if mixing.rho() >= 1.0 {
                        return Err(Error::Config("kappa = gap needs rho < 1".into()));
                    }
                    0.5 / (1.0 - mixing.rho())
                }
            };
            if !(kappa >= 1.0) {
                return Err(Error::Config(format!("kappa {kappa} below 1")));
            }
            let inst = gen_least_squares(n, *d, *mu, mu * kappa, seed)?;
            Ok(if p.l1 > 0.0 {
                inst.with_reg(Regularizer::L1 { weight: p.l1 })
            } else {
                inst
            })
        }
        ProblemKind::Logistic {
            d,
            samples_per_node,
        } => gen_logistic(n, *d, *samples_per_node, p.gamma1, p.l1, seed),
        ProblemKind::Libsvm { path } => {
            let data = load_libsvm(path, n, seed)?;
            logistic_from_partition(&data, p.gamma1, p.l1)
        }
    }
}

/// The multi-gossip operator an algorithm communicates through.
pub fn build_gossip(
    alg: &AlgorithmSpec,
    mixing: &Arc<MixingMatrix>,
) -> Result<MultiGossipOperator> {
    match alg.kind {
        AlgorithmKind::Skip1 | AlgorithmKind::Nids => {
            Ok(MultiGossipOperator::single(mixing.clone()))
        }
        AlgorithmKind::MgSkip | AlgorithmKind::PudaMgSkipP1 => {
            let k = match alg.k {
                KRule::Default => default_k(mixing.rho()),
                KRule::Fixed(k) => k,
            };
            MultiGossipOperator::new(mixing.clone(), k, alg.eta)
        }
    }
}

/// What one `(algorithm, seed)` run produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub algorithm: String,
    pub seed: u64,
    pub k: usize,
    /// Vectors per neighbour per round.
    pub payload: u32,
    pub records: Vec<IterRecord>,
    pub converged: bool,
    /// The error that ended the run early, if any.
    pub error: Option<Error>,
    pub elapsed_ms: f64,
}

impl RunOutcome {
    pub fn first_below(&self, tol: f64) -> Option<&IterRecord> {
        self.records.iter().find(|r| r.rel_err <= tol)
    }
}

/// Instances and reference solutions shared by every algorithm.
pub struct Workbench {
    pub graph: Graph,
    pub mixing: Arc<MixingMatrix>,
    problems: BTreeMap<u64, (ProblemInstance, ReferenceSolution)>,
}

impl Workbench {
    pub fn new(spec: &ExperimentSpec) -> Result<Self> {
        let (graph, mixing) = build_network(&spec.graph)?;
        let keys: Vec<u64> = match spec.problem.seed {
            Some(s) => vec![s],
            None => {
                let mut v = spec.seeds.clone();
                v.sort_unstable();
                v.dedup();
                v
            }
        };
        let built: Vec<(u64, Result<(ProblemInstance, ReferenceSolution)>)> = keys
            .par_iter()
            .map(|&s| {
                let r = build_problem(spec, &mixing, s).and_then(|p| {
                    let x = centralized_solve(&p, REFERENCE_TOL)?;
                    Ok((p, x))
                });
                (s, r)
            })
            .collect();
        let mut problems = BTreeMap::new();
        for (s, r) in built {
            problems.insert(
                s,
                r.map_err(|e| Error::Config(format!("problem seed {s}: {e}")))?,
            );
        }
        Ok(Workbench {
            graph,
            mixing,
            problems,
        })
    }

    /// The instance used by run seed `seed`.
    pub fn problem(
        &self,
        spec: &ExperimentSpec,
        seed: u64,
    ) -> &(ProblemInstance, ReferenceSolution) {
        let key = spec.problem.seed.unwrap_or(seed);
        &self.problems[&key]
    }
}

/// Runs one algorithm on one seed, keeping whatever trace exists on failure.
pub fn run_one(
    spec: &ExperimentSpec,
    bench: &Workbench,
    alg: &AlgorithmSpec,
    seed: u64,
) -> RunOutcome {
    let start = Instant::now();
    let (problem, reference) = bench.problem(spec, seed);
    let mut outcome = RunOutcome {
        algorithm: alg.name.clone(),
        seed,
        k: 0,
        payload: 1,
        records: Vec::new(),
        converged: false,
        error: None,
        elapsed_ms: 0.0,
    };
    let result = (|| -> Result<crate::algorithms::Trace> {
        let gossip = build_gossip(alg, &bench.mixing)?;
        outcome.k = gossip.k();
        let alpha = alg.alpha.resolve(problem.l());
        match alg.kind {
            AlgorithmKind::MgSkip | AlgorithmKind::Skip1 => {
                let cfg = RunConfig {
                    alpha,
                    p: alg.p,
                    max_iter: spec.max_iter,
                    tol: spec.tol,
                    seed,
                };
                let diag = spec
                    .diagnostics
                    .then(|| Diagnostics::new(problem, &gossip, &reference.xstar, alpha, alg.p));
                mg_skip_run(problem, &gossip, &cfg, reference, diag.as_ref())
            }
            AlgorithmKind::PudaMgSkipP1 | AlgorithmKind::Nids => {
                let cfg = if alg.kind == AlgorithmKind::Nids {
                    PudaConfig::nids_style(&bench.mixing)?
                } else {
                    PudaConfig::mgskip_p1(&gossip)?
                };
                outcome.payload = cfg.payload;
                puda_run(problem, &cfg, alpha, spec.max_iter, spec.tol, reference)
            }
        }
    })();
    match result {
        Ok(trace) => {
            outcome.records = trace.records;
            outcome.converged = trace.converged;
        }
        Err(Error::Diverged { iteration, trace }) => {
            outcome.records = trace;
            outcome.error = Some(Error::Diverged {
                iteration,
                trace: Vec::new(),
            });
        }
        Err(e) => outcome.error = Some(e),
    }
    outcome.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    outcome
}

/// All runs of an experiment in `(algorithm, seed)` declaration order.
pub fn run_all(spec: &ExperimentSpec, bench: &Workbench) -> Vec<RunOutcome> {
    let jobs: Vec<(&AlgorithmSpec, u64)> = spec
        .algorithms
        .iter()
        .flat_map(|a| spec.seeds.iter().map(move |&s| (a, s)))
        .collect();
    jobs.par_iter()
        .map(|&(a, s)| run_one(spec, bench, a, s))
        .collect()
}

pub const SUMMARY_HEADER: &str = "algorithm,kind,seed,p,K,payload,iterations,converged,iters_to_tol,comm_to_tol,vectors_to_tol,final_rel_err,iter_speedup,comm_speedup,status";

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Per-run rows, then one `mean` row per algorithm over converged runs.
///
/// Speedups are `baseline / this` for iterations and communication rounds,
/// paired by seed for per-run rows and taken on means for `mean` rows.
pub fn summary_csv(spec: &ExperimentSpec, runs: &[RunOutcome]) -> String {
    let to_tol = |r: &RunOutcome| {
        r.first_below(spec.tol)
            .map(|x| (x.t as f64, x.comm_rounds as f64))
    };
    let find = |name: &str, seed: u64| runs.iter().find(|r| r.algorithm == name && r.seed == seed);
    let kind_of = |name: &str| spec.algorithms.iter().find(|a| a.name == name);
    let mean_of = |name: &str| -> Option<(f64, f64)> {
        let hits: Vec<(f64, f64)> = runs
            .iter()
            .filter(|r| r.algorithm == name)
            .filter_map(to_tol)
            .collect();
        if hits.is_empty() || hits.len() < spec.seeds.len() {
            return None;
        }
        let n = hits.len() as f64;
        Some((
            hits.iter().map(|h| h.0).sum::<f64>() / n,
            hits.iter().map(|h| h.1).sum::<f64>() / n,
        ))
    };
    let speedups = |base: Option<(f64, f64)>, this: Option<(f64, f64)>| match (base, this) {
        (Some(b), Some(t)) if t.0 > 0.0 && t.1 > 0.0 => (Some(b.0 / t.0), Some(b.1 / t.1)),
        (Some(b), Some(t)) if t.0 > 0.0 => (Some(b.0 / t.0), None),
        _ => (None, None),
    };

    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for r in runs {
        let alg = kind_of(&r.algorithm).expect("run of a declared algorithm");
        let hit = to_tol(r);
        let base = spec
            .baseline
            .as_deref()
            .and_then(|b| find(b, r.seed))
            .and_then(to_tol);
        let (si, sc) = speedups(base, hit);
        let status = match &r.error {
            None => "ok".to_string(),
            Some(e) => format!("\"{}\"", e.to_string().replace('"', "'")),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.algorithm,
            alg.kind.as_str(),
            r.seed,
            alg.p,
            r.k,
            r.payload,
            r.records.len(),
            r.converged,
            opt(hit.map(|h| h.0)),
            opt(hit.map(|h| h.1)),
            opt(hit.map(|h| h.1 * r.payload as f64)),
            opt(r.records.last().map(|x| x.rel_err)),
            opt(si),
            opt(sc),
            status
        );
    }
    for alg in &spec.algorithms {
        let m = mean_of(&alg.name);
        let base = spec.baseline.as_deref().and_then(mean_of);
        let (si, sc) = speedups(base, m);
        let first = runs.iter().find(|r| r.algorithm == alg.name);
        let k = first.map_or(0, |r| r.k);
        let payload = first.map_or(1, |r| r.payload);
        let all_ok = runs
            .iter()
            .filter(|r| r.algorithm == alg.name)
            .all(|r| r.error.is_none());
        let _ = writeln!(
            out,
            "{},{},mean,{},{},{},,{},{},{},{},,{},{},{}",
            alg.name,
            alg.kind.as_str(),
            alg.p,
            k,
            payload,
            m.is_some(),
            opt(m.map(|h| h.0)),
            opt(m.map(|h| h.1)),
            opt(m.map(|h| h.1 * payload as f64)),
            opt(si),
            opt(sc),
            if all_ok { "ok" } else { "errors" }
        );
    }
    out
}

pub fn spec_hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// File-safe run label.
pub fn run_file_name(algorithm: &str, seed: u64) -> String {
    let clean: String = algorithm
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("{clean}_seed{seed}.csv")
}

/// Paths and outcomes of a finished experiment.
#[derive(Debug)]
pub struct ExperimentReport {
    pub runs: Vec<RunOutcome>,
    pub summary: String,
}

impl ExperimentReport {
    /// The first failed run, with its identity attached.
    pub fn into_result(self) -> Result<Self> {
        match self.runs.iter().position(|r| r.error.is_some()) {
            None => Ok(self),
            Some(i) => {
                let mut runs = self.runs;
                let r = runs.swap_remove(i);
                Err(Error::Run {
                    algorithm: r.algorithm,
                    seed: r.seed,
                    source: Box::new(r.error.expect("checked above")),
                })
            }
        }
    }
}

/// Runs an experiment and writes `traces/*.csv`, `aggregate/*.csv`, `summary.csv`
/// and `manifest.json` under `out`.
///
/// Failed runs still get their partial trace and a summary row; check
/// [`ExperimentReport::into_result`] for failures.
pub fn run_experiment(
    spec: &ExperimentSpec,
    spec_text: &str,
    out: &Path,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    let bench = Workbench::new(spec)?;
    let setup_ms = start.elapsed().as_secs_f64() * 1e3;
    let runs = run_all(spec, &bench);

    let traces = out.join("traces");
    let agg_dir = out.join("aggregate");
    for dir in [&traces, &agg_dir] {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    for r in &runs {
        let path = traces.join(run_file_name(&r.algorithm, r.seed));
        std::fs::write(&path, trace_csv(&r.algorithm, r.seed, &r.records))
            .map_err(|e| Error::io(&path, e))?;
    }
    for alg in &spec.algorithms {
        let per_seed: Vec<&[IterRecord]> = runs
            .iter()
            .filter(|r| r.algorithm == alg.name)
            .map(|r| r.records.as_slice())
            .collect();
        if let Ok(agg) = super::aggregate_seeds(&per_seed) {
            let path = agg_dir.join(run_file_name(&alg.name, 0).replace("_seed0", ""));
            std::fs::write(&path, agg.to_csv()).map_err(|e| Error::io(&path, e))?;
        }
    }
    let summary = summary_csv(spec, &runs);
    let path = out.join("summary.csv");
    std::fs::write(&path, &summary).map_err(|e| Error::io(&path, e))?;

    let timings: serde_json::Map<String, serde_json::Value> = runs
        .iter()
        .map(|r| {
            (
                format!("{}/{}", r.algorithm, r.seed),
                serde_json::json!(r.elapsed_ms),
            )
        })
        .collect();
    let manifest = serde_json::json!({
        "spec_sha256": spec_hash(spec_text),
        "crate": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "rho": bench.mixing.rho(),
        "runs": runs.len(),
        "failed_runs": runs.iter().filter(|r| r.error.is_some()).count(),
        "setup_ms": setup_ms,
        "total_ms": start.elapsed().as_secs_f64() * 1e3,
        "run_ms": timings,
    });
    let path = out.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;

    Ok(ExperimentReport { runs, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> ExperimentSpec {
        ExperimentSpec::parse(text, "t", Path::new(".")).unwrap()
    }

    const BASE: &str = "graph.kind = ring\ngraph.n = 6\nproblem.kind = least_squares\nproblem.d = 3\nproblem.kappa = 4\n";

    #[test]
    fn t_cap_bounds_rows() {
        let s = spec(&format!(
            "{BASE}run.T = 10\nrun.tol = 0\nalgorithm.a.kind = mgskip\nalgorithm.a.p = 0.5\n"
        ));
        let bench = Workbench::new(&s).unwrap();
        let runs = run_all(&s, &bench);
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].records.len(), 10);
        let csv = trace_csv("a", 0, &runs[0].records);
        assert_eq!(csv.lines().count(), 11);
        assert_eq!(csv.lines().next(), Some(TRACE_HEADER));
    }

    #[test]
    fn reference_shared_across_algorithms() {
        let s = spec(&format!(
            "{BASE}run.T = 400\nrun.seeds = 1,2\nalgorithm.a.kind = mgskip\nalgorithm.b.kind = puda_mgskip_p1\nrun.baseline = a\n"
        ));
        let bench = Workbench::new(&s).unwrap();
        assert_eq!(bench.problems.len(), 2);
        let runs = run_all(&s, &bench);
        for seed in [1, 2] {
            let a = runs
                .iter()
                .find(|r| r.algorithm == "a" && r.seed == seed)
                .unwrap();
            let b = runs
                .iter()
                .find(|r| r.algorithm == "b" && r.seed == seed)
                .unwrap();
            assert!(a.converged && b.converged);
            assert_eq!(a.records.len(), b.records.len());
        }
        let summary = summary_csv(&s, &runs);
        let mean_b = summary
            .lines()
            .find(|l| l.starts_with("b,puda_mgskip_p1,mean"))
            .unwrap();
        let cols: Vec<&str> = mean_b.split(',').collect();
        assert_eq!(cols[12], "1");
        assert_eq!(cols[13], "1");
    }

    #[test]
    fn failed_run_carries_identity() {
        let s = spec(&format!(
            "{BASE}run.seeds = 0,4\nalgorithm.a.kind = skip1\nalgorithm.a.alpha = 10\n"
        ));
        let bench = Workbench::new(&s).unwrap();
        let runs = run_all(&s, &bench);
        assert!(runs.iter().all(|r| r.records.is_empty()));
        assert!(summary_csv(&s, &runs).contains("invalid parameter"));
        let report = ExperimentReport {
            runs,
            summary: String::new(),
        };
        match report.into_result() {
            Err(Error::Run {
                algorithm,
                seed,
                source,
            }) => {
                assert_eq!((algorithm.as_str(), seed), ("a", 0));
                assert!(matches!(*source, Error::Parameter(_)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn file_names_are_sanitized() {
        assert_eq!(run_file_name("mg@p=0.5", 3), "mg_p_0_5_seed3.csv");
    }

    #[test]
    fn hash_is_hex_sha256() {
        let h = spec_hash("");
        assert_eq!(
            h,
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
