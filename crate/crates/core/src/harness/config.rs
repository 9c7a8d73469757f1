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

//! Experiment specs in a flat `key = value` format.
//!
//! Keys are dotted paths. A `[section]` line prefixes the keys that follow
//! it, so `[graph]` then `n = 15` is the same as `graph.n = 15`. Blank lines
//! and `#` comments are ignored.
//!
//! ```text
//! graph.kind = ring
//! graph.n = 15
//! problem.kind = least_squares
//! problem.d = 10
//! problem.kappa = gap
//! run.T = 2000
//! run.tol = 1e-7
//! run.seeds = 0..20
//! algorithm.mg.kind = mgskip
//! algorithm.mg.p = 0.34
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::gossip::EtaRule;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum GraphSpec {
    Ring { n: usize },
    Random { n: usize, iota: f64, seed: u64 },
}

impl GraphSpec {
    pub fn n(&self) -> usize {
        match *self {
            GraphSpec::Ring { n } | GraphSpec::Random { n, .. } => n,
        }
    }
}

/// Condition number of a synthetic least-squares instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KappaSpec {
    Value(f64),
    /// `κ = 0.5 / (1 − ρ)` for the configured graph.
    Gap,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemKind {
    LeastSquares { d: usize, mu: f64, kappa: KappaSpec },
    Logistic { d: usize, samples_per_node: usize },
    Libsvm { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    /// L1 weight; for logistic kinds this is `γ₂`.
    pub l1: f64,
    /// `γ₁` for logistic kinds.
    pub gamma1: f64,
    /// Fixed instance seed. When absent every run seed gets its own instance.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmKind {
    MgSkip,
    /// MG-Skip with a single plain gossip round in place of `M̄`.
    Skip1,
    PudaMgSkipP1,
    Nids,
}

impl AlgorithmKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "mgskip" => AlgorithmKind::MgSkip,
            "skip1" => AlgorithmKind::Skip1,
            "puda_mgskip_p1" => AlgorithmKind::PudaMgSkipP1,
            "nids" => AlgorithmKind::Nids,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            AlgorithmKind::MgSkip => "mgskip",
            AlgorithmKind::Skip1 => "skip1",
            AlgorithmKind::PudaMgSkipP1 => "puda_mgskip_p1",
            AlgorithmKind::Nids => "nids",
        }
    }

    /// Whether the algorithm flips communication coins.
    pub fn skips(&self) -> bool {
        matches!(self, AlgorithmKind::MgSkip | AlgorithmKind::Skip1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaRule {
    OneOver5L,
    OneOverL,
    Fixed(f64),
}

impl AlphaRule {
    pub fn resolve(&self, lsmooth: f64) -> f64 {
        match *self {
            AlphaRule::OneOver5L => 1.0 / (5.0 * lsmooth),
            AlphaRule::OneOverL => 1.0 / lsmooth,
            AlphaRule::Fixed(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KRule {
    Default,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSpec {
    pub name: String,
    pub kind: AlgorithmKind,
    pub p: f64,
    pub alpha: AlphaRule,
    pub k: KRule,
    pub eta: EtaRule,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub graph: GraphSpec,
    pub problem: ProblemSpec,
    /// In declaration order.
    pub algorithms: Vec<AlgorithmSpec>,
    pub max_iter: usize,
    pub tol: f64,
    pub seeds: Vec<u64>,
    pub diagnostics: bool,
    /// Name of the algorithm that speedups are measured against.
    pub baseline: Option<String>,
}

struct Entry {
    value: String,
    line: usize,
    used: bool,
}

struct Table<'a> {
    source: &'a str,
    entries: BTreeMap<String, Entry>,
}

impl<'a> Table<'a> {
    fn parse(text: &str, source: &'a str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| Error::Parse {
                    path: source.to_string(),
                    line,
                    msg: format!("unterminated section header `{body}`"),
                })?;
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| Error::Parse {
                path: source.to_string(),
                line,
                msg: format!("expected `key = value`, got `{body}`"),
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Parse {
                    path: source.to_string(),
                    line,
                    msg: "empty key".into(),
                });
            }
            let full = if section.is_empty() {
                key.to_string()
            } else {
                format!("{section}.{key}")
            };
            let entry = Entry {
                value: value.trim().to_string(),
                line,
                used: false,
            };
            if let Some(prev) = entries.insert(full.clone(), entry) {
                return Err(Error::Parse {
                    path: source.to_string(),
                    line,
                    msg: format!("duplicate key `{full}` (first set on line {})", prev.line),
                });
            }
        }
        Ok(Table { source, entries })
    }

    fn err(&self, key: &str, msg: impl std::fmt::Display) -> Error {
        match self.entries.get(key) {
            Some(e) => Error::Parse {
                path: self.source.to_string(),
                line: e.line,
                msg: format!("{key}: {msg}"),
            },
            None => Error::Config(format!("{}: {key}: {msg}", self.source)),
        }
    }

    fn raw(&mut self, key: &str) -> Option<String> {
        self.entries.get_mut(key).map(|e| {
            e.used = true;
            e.value.clone()
        })
    }

    fn required(&mut self, key: &str) -> Result<String> {
        self.raw(key)
            .ok_or_else(|| Error::Config(format!("{}: missing key `{key}`", self.source)))
    }

    fn parsed<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| self.err(key, format!("`{v}`: {e}"))),
        }
    }

    fn parsed_or<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    fn algorithm_names(&self) -> Vec<String> {
        // Declaration order, not key order.
        let mut named: Vec<(usize, String)> = self
            .entries
            .iter()
            .filter_map(|(k, e)| {
                let rest = k.strip_prefix("algorithm.")?;
                let (name, _) = rest.split_once('.')?;
                Some((e.line, name.to_string()))
            })
            .collect();
        named.sort();
        let mut out: Vec<String> = Vec::new();
        for (_, name) in named {
            if !out.contains(&name) {
                out.push(name);
            }
        }
        out
    }

    fn finish(self) -> Result<()> {
        let unused: Vec<_> = self.entries.iter().filter(|(_, e)| !e.used).collect();
        match unused.first() {
            None => Ok(()),
            Some((k, e)) => Err(Error::Parse {
                path: self.source.to_string(),
                line: e.line,
                msg: format!("unknown key `{k}`"),
            }),
        }
    }
}

/// Accepts `1,2,5` and half-open ranges `0..20`, mixed.
pub fn parse_seed_list(s: &str) -> std::result::Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.trim().parse().map_err(|e| format!("`{part}`: {e}"))?;
            let b: u64 = b.trim().parse().map_err(|e| format!("`{part}`: {e}"))?;
            if b <= a {
                return Err(format!("empty range `{part}`"));
            }
            out.extend(a..b);
        } else {
            out.push(part.parse().map_err(|e| format!("`{part}`: {e}"))?);
        }
    }
    if out.is_empty() {
        return Err("seed list is empty".into());
    }
    Ok(out)
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(format!("`{s}` is not a boolean")),
    }
}

impl ExperimentSpec {
    /// Parses an experiment; relative data paths resolve against `base_dir`.
    pub fn parse(text: &str, source: &str, base_dir: &Path) -> Result<Self> {
        let mut t = Table::parse(text, source)?;

        let graph = match t.required("graph.kind")?.as_str() {
            "ring" => GraphSpec::Ring {
                n: t.parsed("graph.n")?
                    .ok_or_else(|| t.err("graph.n", "required"))?,
            },
            "random" => GraphSpec::Random {
                n: t.parsed("graph.n")?
                    .ok_or_else(|| t.err("graph.n", "required"))?,
                iota: t
                    .parsed("graph.iota")?
                    .ok_or_else(|| t.err("graph.iota", "required"))?,
                seed: t.parsed_or("graph.seed", 0)?,
            },
            other => return Err(t.err("graph.kind", format!("unknown graph kind `{other}`"))),
        };

        let kind = match t.required("problem.kind")?.as_str() {
            "least_squares" => {
                let kappa = match t.raw("problem.kappa") {
                    None => return Err(t.err("problem.kappa", "required")),
                    Some(v) if v == "gap" => KappaSpec::Gap,
                    Some(v) => KappaSpec::Value(
                        v.parse()
                            .map_err(|e| t.err("problem.kappa", format!("`{v}`: {e}")))?,
                    ),
                };
                ProblemKind::LeastSquares {
                    d: t.parsed_or("problem.d", 10)?,
                    mu: t.parsed_or("problem.mu", 1.0)?,
                    kappa,
                }
            }
            "logistic" => ProblemKind::Logistic {
                d: t.parsed_or("problem.d", 22)?,
                samples_per_node: t.parsed_or("problem.samples_per_node", 50)?,
            },
            "libsvm" => {
                let rel = PathBuf::from(t.required("problem.path")?);
                let path = if rel.is_absolute() {
                    rel
                } else {
                    base_dir.join(rel)
                };
                if !path.is_file() {
                    return Err(t.err(
                        "problem.path",
                        format!("data file {} does not exist", path.display()),
                    ));
                }
                ProblemKind::Libsvm { path }
            }
            other => return Err(t.err("problem.kind", format!("unknown problem kind `{other}`"))),
        };
        let logistic = !matches!(kind, ProblemKind::LeastSquares { .. });
        let problem = ProblemSpec {
            l1: if logistic {
                t.parsed_or("problem.gamma2", 0.001)?
            } else {
                t.parsed_or("problem.l1", 0.0)?
            },
            gamma1: if logistic {
                t.parsed_or("problem.gamma1", 0.01)?
            } else {
                0.0
            },
            seed: t.parsed("problem.seed")?,
            kind,
        };

        let max_iter = t.parsed_or("run.T", 1000)?;
        let tol = t.parsed_or("run.tol", 1e-7)?;
        let seeds = match t.raw("run.seeds") {
            None => vec![0],
            Some(v) => parse_seed_list(&v).map_err(|e| t.err("run.seeds", e))?,
        };
        let diagnostics = match t.raw("run.diagnostics") {
            None => false,
            Some(v) => parse_bool(&v).map_err(|e| t.err("run.diagnostics", e))?,
        };
        let baseline = t.raw("run.baseline");

        let mut algorithms = Vec::new();
        for name in t.algorithm_names() {
            let key = |field: &str| format!("algorithm.{name}.{field}");
            let kind_key = key("kind");
            let kind_str = t.required(&kind_key)?;
            let kind = AlgorithmKind::parse(&kind_str)
                .ok_or_else(|| t.err(&kind_key, format!("unknown algorithm kind `{kind_str}`")))?;
            let p_key = key("p");
            let p: f64 = t.parsed_or(&p_key, 1.0)?;
            if !(p > 0.0 && p <= 1.0) {
                return Err(t.err(&p_key, "must lie in (0, 1]"));
            }
            if !kind.skips() && p != 1.0 {
                return Err(t.err(&p_key, format!("{} always communicates", kind.as_str())));
            }
            let alpha_key = key("alpha");
            let alpha = match t.raw(&alpha_key).as_deref() {
                None | Some("one_over_5L") => AlphaRule::OneOver5L,
                Some("one_over_L") => AlphaRule::OneOverL,
                Some(v) => match v.parse::<f64>() {
                    Ok(a) if a > 0.0 => AlphaRule::Fixed(a),
                    _ => return Err(t.err(&alpha_key, format!("bad stepsize `{v}`"))),
                },
            };
            let k_key = key("K");
            let k = match t.raw(&k_key).as_deref() {
                None | Some("default") => KRule::Default,
                Some(v) => match v.parse::<usize>() {
                    Ok(k) if k >= 1 => KRule::Fixed(k),
                    _ => return Err(t.err(&k_key, format!("bad round count `{v}`"))),
                },
            };
            let eta_key = key("eta");
            let eta = match t.raw(&eta_key).as_deref() {
                None | Some("standard") => EtaRule::Standard,
                Some("printed") => EtaRule::Printed,
                Some(v) => return Err(t.err(&eta_key, format!("unknown eta rule `{v}`"))),
            };
            algorithms.push(AlgorithmSpec {
                name,
                kind,
                p,
                alpha,
                k,
                eta,
            });
        }
        if algorithms.is_empty() {
            return Err(Error::Config(format!(
                "{source}: no algorithm.<name>.kind entries"
            )));
        }
        if let Some(b) = &baseline {
            if !algorithms.iter().any(|a| &a.name == b) {
                return Err(t.err("run.baseline", format!("no algorithm named `{b}`")));
            }
        }
        t.finish()?;
        Ok(ExperimentSpec {
            graph,
            problem,
            algorithms,
            max_iter,
            tol,
            seeds,
            diagnostics,
            baseline,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, &path.display().to_string(), base)
    }

    /// Replaces every skipping algorithm by one copy per `p`, named
    /// `name@p=<p>`. A skipping baseline maps to its copy at the first `p`.
    pub fn expand_p_grid(&self, ps: &[f64]) -> Result<Self> {
        if ps.is_empty() {
            return Err(Error::Config("empty p grid".into()));
        }
        if let Some(&bad) = ps.iter().find(|&&p| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::Config(format!("grid value {bad} outside (0, 1]")));
        }
        let mut out = self.clone();
        out.algorithms.clear();
        for alg in &self.algorithms {
            if !alg.kind.skips() {
                out.algorithms.push(alg.clone());
                continue;
            }
            for &p in ps {
                let mut a = alg.clone();
                a.name = format!("{}@p={p}", alg.name);
                a.p = p;
                out.algorithms.push(a);
            }
            if self.baseline.as_deref() == Some(alg.name.as_str()) {
                out.baseline = Some(format!("{}@p={}", alg.name, ps[0]));
            }
        }
        Ok(out)
    }
}
