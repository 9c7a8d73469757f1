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

//! Undirected network graphs and their Metropolis–Hastings mixing matrices.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg;
use crate::{Error, Result};

/// Undirected simple graph on nodes `0..n`.
///
/// Edges are stored normalized as `(i, j)` with `i < j` and sorted. The
/// constructors reject self-loops and duplicates; connectivity is checked by
/// [`Graph::connected`] and by every consumer that needs it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph without requiring connectivity.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize("graph needs at least one node".into()));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for {n} nodes"
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at node {a}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({a}, {b})")));
            }
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(Graph {
            n,
            edges,
            adjacency,
        })
    }

    /// Builds a graph and rejects it unless it is connected.
    pub fn connected(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let g = Self::new(n, edges)?;
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Neighbours of `i`, excluding `i` itself.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Breadth-first reachability from node 0.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            for &j in &self.adjacency[i] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    queue.push_back(j);
                }
            }
        }
        count == self.n
    }

    /// Plain edge-list text: `n m` on the first line, then `i j` per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for (a, b) in &self.edges {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let err = |line: usize, msg: &str| Error::Parse {
            path: "<edge list>".into(),
            line,
            msg: msg.into(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hl, header) = lines.next().ok_or_else(|| err(1, "missing header"))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| err(hl, "header must be `n m`"))?;
        let [n, m] = nums[..] else {
            return Err(err(hl, "header must be `n m`"));
        };
        let mut edges = Vec::with_capacity(m);
        for (ln, line) in lines {
            let pair: Vec<usize> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| err(ln, "edge must be `i j`"))?;
            let [a, b] = pair[..] else {
                return Err(err(ln, "edge must be `i j`"));
            };
            edges.push((a, b));
        }
        if edges.len() != m {
            return Err(err(
                hl,
                &format!("header declares {m} edges, found {}", edges.len()),
            ));
        }
        Self::new(n, edges)
    }

    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_edge_list()).map_err(|e| Error::io(path, e))
    }

    pub fn read_edge_list(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_edge_list(&text)
    }
}

/// Cycle `0 - 1 - … - (n-1) - 0`.
pub fn build_ring(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::InvalidSize(format!(
            "ring needs at least 3 nodes, got {n}"
        )));
    }
    Graph::connected(n, (0..n).map(|i| (i, (i + 1) % n)))
}

/// Random connected graph with exactly `⌊iota · n(n-1)/2⌋` edges.
///
/// A random recursive spanning tree guarantees connectivity; the remaining
/// edges are drawn uniformly without replacement from the non-edges.
pub fn build_random_connectivity(n: usize, iota: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidSize("graph needs at least one node".into()));
    }
    if !(iota > 0.0 && iota <= 1.0) {
        return Err(Error::Parameter(format!(
            "connectivity ratio must lie in (0, 1], got {iota}"
        )));
    }
    let pairs = n * (n - 1) / 2;
    let target = (iota * pairs as f64).floor() as usize;
    if target < n - 1 {
        return Err(Error::InfeasibleConnectivity {
            nodes: n,
            edges: target,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut edges = BTreeSet::new();
    for k in 1..n {
        let parent = order[rng.random_range(0..k)];
        let child = order[k];
        edges.insert((parent.min(child), parent.max(child)));
    }

    let mut rest: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|e| !edges.contains(e))
        .collect();
    rest.shuffle(&mut rng);
    edges.extend(rest.into_iter().take(target - (n - 1)));

    Graph::connected(n, edges)
}

/// Symmetric doubly stochastic mixing matrix with its spectrum.
#[derive(Debug, Clone)]
pub struct MixingMatrix {
    w: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    rho: f64,
    rows: Vec<Vec<(usize, f64)>>,
}

impl MixingMatrix {
    /// Wraps a user-supplied matrix after checking symmetry, stochasticity,
    /// non-negativity and (when a graph is given) the sparsity pattern.
    pub fn new(w: DMatrix<f64>, graph: Option<&Graph>) -> Result<Self> {
        let n = w.nrows();
        if n == 0 || w.ncols() != n {
            return Err(Error::Shape {
                expected: "non-empty square matrix".into(),
                got: format!("{}x{}", w.nrows(), w.ncols()),
            });
        }
        if linalg::max_abs_asymmetry(&w) != 0.0 {
            return Err(Error::InvalidMixing("matrix is not symmetric".into()));
        }
        if w.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::InvalidMixing("entries must lie in [0, 1]".into()));
        }
        let defect = linalg::row_sum_defect(&w);
        if defect > 1e-12 {
            return Err(Error::InvalidMixing(format!(
                "rows do not sum to one (defect {defect:e})"
            )));
        }
        if let Some(g) = graph {
            if g.n() != n {
                return Err(Error::Shape {
                    expected: format!("{}x{}", g.n(), g.n()),
                    got: format!("{n}x{n}"),
                });
            }
            for i in 0..n {
                for j in 0..n {
                    if i != j && w[(i, j)] != 0.0 && !g.has_edge(i, j) {
                        return Err(Error::InvalidMixing(format!(
                            "weight on non-edge ({i}, {j})"
                        )));
                    }
                }
            }
        }
        let eigenvalues = linalg::sym_eigenvalues(&w);
        let rho = if n == 1 {
            0.0
        } else {
            eigenvalues[1].abs().max(eigenvalues[n - 1].abs())
        };
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| w[(i, j)] != 0.0)
                    .map(|j| (j, w[(i, j)]))
                    .collect()
            })
            .collect();
        Ok(MixingMatrix {
            w,
            eigenvalues,
            rho,
            rows,
        })
    }

    pub fn n(&self) -> usize {
        self.w.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.w
    }

    /// Spectrum sorted descending, `λ_1 ≥ … ≥ λ_n`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Nonzero weights of row `i` (including the diagonal).
    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    /// One communication round: node `i` returns `Σ_{j ∈ N_i} w_ij s_j`
    /// using only its neighbours' rows of `states`.
    pub fn mix_round(&self, states: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(states.nrows(), states.ncols());
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, wij) in row {
                for k in 0..states.ncols() {
                    out[(i, k)] += wij * states[(j, k)];
                }
            }
        }
        out
    }

    /// One CSV row per node, full precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.w.row_iter() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

/// Metropolis–Hastings weights `w_ij = 1 / (1 + max(deg_i, deg_j))`.
pub fn metropolis_weights(g: &Graph) -> Result<MixingMatrix> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.n();
    let mut w = DMatrix::zeros(n, n);
    for &(i, j) in g.edges() {
        let v = 1.0 / (1.0 + g.degree(i).max(g.degree(j)) as f64);
        w[(i, j)] = v;
        w[(j, i)] = v;
    }
    for i in 0..n {
        let off: f64 = g.neighbors(i).iter().map(|&j| w[(i, j)]).sum();
        w[(i, i)] = 1.0 - off;
    }
    MixingMatrix::new(w, Some(g))
}

/// `max{|λ_2|, |λ_n|}`; zero for a single node.
pub fn spectral_gap(w: &MixingMatrix) -> f64 {
    w.rho()
}
