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

//! Independent reference computations shared by the integration tests.

#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use mgskip::topology::{
    build_random_connectivity, build_ring, metropolis_weights, Graph, MixingMatrix,
};

pub fn mixing(g: &Graph) -> Arc<MixingMatrix> {
    Arc::new(metropolis_weights(g).unwrap())
}

pub fn ring(n: usize) -> Arc<MixingMatrix> {
    mixing(&build_ring(n).unwrap())
}

/// Rings of 5 through 50 nodes and random 20-node graphs at three densities.
pub fn topology_suite() -> Vec<(String, Graph)> {
    let mut out: Vec<(String, Graph)> = (5..=50)
        .map(|n| (format!("ring{n}"), build_ring(n).unwrap()))
        .collect();
    for iota in [0.25, 0.5, 1.0] {
        for seed in 0..5 {
            out.push((
                format!("random20_iota{iota}_seed{seed}"),
                build_random_connectivity(20, iota, seed).unwrap(),
            ));
        }
    }
    out
}

/// Metropolis–Hastings weights built entry by entry from the graph.
pub fn oracle_weights(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    let mut w = DMatrix::zeros(n, n);
    for &(a, b) in g.edges() {
        let v = 1.0 / (1.0 + g.degree(a).max(g.degree(b)) as f64);
        w[(a, b)] = v;
        w[(b, a)] = v;
    }
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| w[(i, j)]).sum();
        w[(i, i)] = 1.0 - off;
    }
    w
}

/// Largest singular value of `W − 11ᵀ/n`.
pub fn oracle_rho(w: &DMatrix<f64>) -> f64 {
    let n = w.nrows();
    let centered = w - DMatrix::from_element(n, n, 1.0 / n as f64);
    centered.singular_values().max()
}

/// `p_K(λ)` from the scalar three-term recursion with `p_0 = p_{−1} = 1`.
pub fn cheb_poly(lambda: f64, k: usize, eta: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0);
    for _ in 0..k {
        let next = (1.0 + eta) * lambda * cur - eta * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Dense `M̄` from the matrix recursion.
pub fn oracle_mbar(w: &DMatrix<f64>, k: usize, eta: f64) -> DMatrix<f64> {
    let n = w.nrows();
    let mut prev = DMatrix::<f64>::identity(n, n);
    let mut cur = prev.clone();
    for _ in 0..k {
        let next = w * &cur * (1.0 + eta) - &prev * eta;
        prev = cur;
        cur = next;
    }
    cur
}

/// The eigenvalues of `W` with the consensus eigenvalue removed.
pub fn non_consensus_eigenvalues(w: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = w
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev.remove(0);
    ev
}

/// Central finite-difference gradient.
pub fn fd_gradient(f: impl Fn(&DVector<f64>) -> f64, x: &DVector<f64>, h: f64) -> DVector<f64> {
    DVector::from_fn(x.len(), |i, _| {
        let mut hi = x.clone();
        let mut lo = x.clone();
        hi[i] += h;
        lo[i] -= h;
        (f(&hi) - f(&lo)) / (2.0 * h)
    })
}

/// Minimizer of `α·w·|x| + ½(x − y)²` over a uniform grid.
pub fn grid_prox_1d(alpha: f64, weight: f64, y: f64, lo: f64, hi: f64, step: f64) -> f64 {
    let steps = ((hi - lo) / step).round() as usize;
    (0..=steps)
        .map(|i| lo + i as f64 * step)
        .map(|x| (x, alpha * weight * x.abs() + 0.5 * (x - y).powi(2)))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap()
        .0
}

pub fn rel_diff(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-12)
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}
