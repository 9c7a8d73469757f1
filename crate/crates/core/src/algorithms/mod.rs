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

//! Decentralized iterations and their convergence diagnostics.

mod coins;
mod diagnostics;
mod mgskip;
mod puda;

use nalgebra::DMatrix;

pub use coins::CoinStream;
pub use diagnostics::{
    fixed_point_residual, optimal_dual, zeta, ContractionReport, Diagnostics, FixedPointReport,
};
pub use mgskip::{mg_skip_run, mg_skip_run_with_coins, mg_skip_step, MgSkipState};
pub use puda::{puda_init, puda_run, puda_step, PudaConfig, PudaState};

use crate::{Error, Result};

/// Per-run parameters shared by every iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    /// Stepsize in `(0, 2/L)`.
    pub alpha: f64,
    /// Communication probability in `(0, 1]`.
    pub p: f64,
    /// Iteration cap `T`.
    pub max_iter: usize,
    /// Stop once the relative error drops to this value.
    pub tol: f64,
    /// Seeds the shared coin stream.
    pub seed: u64,
}

impl RunConfig {
    pub fn validate(&self, lsmooth: f64) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha * lsmooth < 2.0) {
            return Err(Error::Parameter(format!(
                "stepsize {} outside (0, 2/L) for L = {lsmooth}",
                self.alpha
            )));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::Parameter(format!(
                "probability {} outside (0, 1]",
                self.p
            )));
        }
        Ok(())
    }
}

/// One row of a run: the state after iteration `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterRecord {
    pub t: usize,
    pub theta: bool,
    pub comm_rounds: u64,
    pub grad_evals: u64,
    pub rel_err: f64,
    pub psi: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Trace {
    pub records: Vec<IterRecord>,
    /// Whether the relative error reached the tolerance before the cap.
    pub converged: bool,
    pub final_x: DMatrix<f64>,
}

impl Trace {
    /// First iteration whose relative error is at most `tol`.
    pub fn first_below(&self, tol: f64) -> Option<&IterRecord> {
        self.records.iter().find(|r| r.rel_err <= tol)
    }
}

/// `‖X − 1x*ᵀ‖_F / ‖1x*ᵀ‖_F`, or the absolute error when `x* = 0`.
pub(crate) fn relative_error(x: &DMatrix<f64>, xstar: &DMatrix<f64>) -> f64 {
    let den = xstar.norm();
    let num = (x - xstar).norm();
    if den > 0.0 {
        num / den
    } else {
        num
    }
}
