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

//! Centralized reference solver for `min (1/n) Σ f_i + r`.

use nalgebra::DVector;

use super::ProblemInstance;
use crate::{Error, Result};

pub const DEFAULT_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub xstar: DVector<f64>,
    /// Gradient-mapping residual at `xstar` with step `1/L`.
    pub residual: f64,
    pub iterations: usize,
}

/// `‖x − prox_{αr}(x − α (1/n) Σ ∇f_i(x))‖`.
pub fn gradient_mapping_residual(p: &ProblemInstance, alpha: f64, x: &DVector<f64>) -> f64 {
    let step = x - p.mean_gradient(x) * alpha;
    (x - p.reg().prox(alpha, &step)).norm()
}

/// Proximal gradient with step `1/L` from the origin until the
/// gradient-mapping residual is at most `tol · max(1, ‖x‖)`.
pub fn centralized_solve(p: &ProblemInstance, tol: f64) -> Result<ReferenceSolution> {
    centralized_solve_with(p, tol, DEFAULT_MAX_ITER, |_, _| {})
}

/// As [`centralized_solve`], calling `observe(t, h(x_t))` on every iterate.
pub fn centralized_solve_with(
    p: &ProblemInstance,
    tol: f64,
    max_iter: usize,
    mut observe: impl FnMut(usize, f64),
) -> Result<ReferenceSolution> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let alpha = 1.0 / p.l();
    let mut x = DVector::zeros(p.dim());
    let mut best = (f64::INFINITY, x.clone());
    for t in 0..=max_iter {
        observe(t, p.objective(&x));
        let next = p.reg().prox(alpha, &(&x - p.mean_gradient(&x) * alpha));
        let residual = (&x - &next).norm();
        if residual < best.0 {
            best = (residual, x.clone());
        }
        if residual <= tol * x.norm().max(1.0) {
            return Ok(ReferenceSolution {
                xstar: x,
                residual,
                iterations: t,
            });
        }
        x = next;
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual: best.0,
        best: best.1.iter().copied().collect(),
    })
}
