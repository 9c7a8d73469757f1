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

//! Problem instances: per-node smooth losses plus a shared proximable term.

mod bundle;
mod flood;
mod libsvm;
mod loss;
mod reg;
mod solver;
mod synthetic;

use nalgebra::{DMatrix, DVector};

pub use bundle::{read_bundle, write_bundle};
pub use flood::{flood_constants, FloodResult};
pub use libsvm::{load_libsvm, parse_libsvm, NodeData, PartitionedDataset, Sample};
pub use loss::{LeastSquaresLoss, LocalLoss, LogisticLoss, SmoothLoss};
pub use reg::{l1_prox, Regularizer};
pub use solver::{
    centralized_solve, centralized_solve_with, gradient_mapping_residual, ReferenceSolution,
    DEFAULT_MAX_ITER,
};
pub use synthetic::{gen_least_squares, gen_logistic, logistic_from_partition};

use crate::{Error, Result};

/// `F(X) = Σ_i f_i(x_i)` plus `R(X) = Σ_i r(x_i)` over `n` nodes.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    losses: Vec<LocalLoss>,
    reg: Regularizer,
    dim: usize,
    l: f64,
    mu: f64,
}

impl ProblemInstance {
    pub fn new(losses: Vec<LocalLoss>, reg: Regularizer) -> Result<Self> {
        let first = losses
            .first()
            .ok_or_else(|| Error::Parameter("problem needs at least one node".into()))?;
        let dim = first.dim();
        if let Some(bad) = losses.iter().find(|f| f.dim() != dim) {
            return Err(Error::Shape {
                expected: format!("dimension {dim}"),
                got: format!("dimension {}", bad.dim()),
            });
        }
        let l = losses
            .iter()
            .map(SmoothLoss::lsmooth)
            .fold(f64::MIN, f64::max);
        let mu = losses.iter().map(SmoothLoss::mu).fold(f64::MAX, f64::min);
        if !(mu > 0.0 && l >= mu) {
            return Err(Error::Parameter(format!(
                "need L >= mu > 0, got L = {l}, mu = {mu}"
            )));
        }
        Ok(ProblemInstance {
            losses,
            reg,
            dim,
            l,
            mu,
        })
    }

    pub fn with_reg(mut self, reg: Regularizer) -> Self {
        self.reg = reg;
        self
    }

    pub fn n(&self) -> usize {
        self.losses.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn losses(&self) -> &[LocalLoss] {
        &self.losses
    }

    pub fn reg(&self) -> &Regularizer {
        &self.reg
    }

    /// `max_i L_i`.
    pub fn l(&self) -> f64 {
        self.l
    }

    /// `min_i μ_i`.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn kappa(&self) -> f64 {
        self.l / self.mu
    }

    /// Rows of `∇F(X)`.
    pub fn grad_stacked(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(x.nrows(), x.ncols());
        for (i, f) in self.losses.iter().enumerate() {
            let g = f.gradient(&x.row(i).transpose());
            out.set_row(i, &g.transpose());
        }
        out
    }

    /// Row-wise `prox_{αr}`.
    pub fn prox_stacked(&self, alpha: f64, z: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = z.clone();
        for i in 0..z.nrows() {
            let p = self.reg.prox(alpha, &z.row(i).transpose());
            out.set_row(i, &p.transpose());
        }
        out
    }

    /// `(1/n) Σ_i ∇f_i(x)`.
    pub fn mean_gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(self.dim);
        for f in &self.losses {
            g += f.gradient(x);
        }
        g / self.n() as f64
    }

    /// `h(x) = (1/n) Σ_i f_i(x) + r(x)`.
    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        let s: f64 = self.losses.iter().map(|f| f.value(x)).sum();
        s / self.n() as f64 + self.reg.value(x)
    }
}
