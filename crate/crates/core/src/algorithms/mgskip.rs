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

//! MG-Skip: proximal gradient steps with probabilistic multi-gossip.
//!
//! Every node computes `z = x − α∇f(x) − αy`. On a shared coin `θ = 1` the
//! network runs one FastGoss block, `z̄ = ½(I − M̄)z`, updates the scaled dual
//! `y ← y + (p/α) z̄` and takes `x ← prox(z − z̄)`. On `θ = 0` nodes only take
//! the local step `x ← prox(z)`.

use nalgebra::DMatrix;

use super::{relative_error, CoinStream, Diagnostics, IterRecord, RunConfig, Trace};
use crate::gossip::MultiGossipOperator;
use crate::linalg;
use crate::problems::{ProblemInstance, ReferenceSolution};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MgSkipState {
    pub x: DMatrix<f64>,
    /// Scaled dual `y = √(½(I − M̄)) u`; starts at zero.
    pub y: DMatrix<f64>,
    pub t: usize,
    pub comm_rounds: u64,
    pub grad_evals: u64,
}

impl MgSkipState {
    pub fn new(x0: DMatrix<f64>) -> Self {
        let y = DMatrix::zeros(x0.nrows(), x0.ncols());
        MgSkipState {
            x: x0,
            y,
            t: 0,
            comm_rounds: 0,
            grad_evals: 0,
        }
    }

    pub fn zeros(n: usize, d: usize) -> Self {
        Self::new(DMatrix::zeros(n, d))
    }
}

/// One iteration with the coin value supplied by the caller.
pub fn mg_skip_step(
    state: &MgSkipState,
    problem: &ProblemInstance,
    gossip: &MultiGossipOperator,
    cfg: &RunConfig,
    theta: bool,
) -> Result<MgSkipState> {
    let alpha = cfg.alpha;
    let z = &state.x - (problem.grad_stacked(&state.x) + &state.y) * alpha;
    let mut comm_rounds = state.comm_rounds;
    let (x, y) = if theta {
        let zbar = gossip.fast_goss(&z, &mut comm_rounds)? * 0.5;
        let y = &state.y + &zbar * (cfg.p / alpha);
        (problem.prox_stacked(alpha, &(z - zbar)), y)
    } else {
        (problem.prox_stacked(alpha, &z), state.y.clone())
    };
    let t = state.t + 1;
    if !linalg::all_finite(&x) || !linalg::all_finite(&y) {
        return Err(Error::Diverged {
            iteration: t,
            trace: Vec::new(),
        });
    }
    Ok(MgSkipState {
        x,
        y,
        t,
        comm_rounds,
        grad_evals: state.grad_evals + 1,
    })
}

/// Runs from `x⁰ = 0, y⁰ = 0` with the seeded shared coin stream.
pub fn mg_skip_run(
    problem: &ProblemInstance,
    gossip: &MultiGossipOperator,
    cfg: &RunConfig,
    reference: &ReferenceSolution,
    diagnostics: Option<&Diagnostics>,
) -> Result<Trace> {
    let mut coins = CoinStream::new(cfg.seed, cfg.p);
    mg_skip_run_with_coins(problem, gossip, cfg, reference, diagnostics, |_| {
        coins.flip()
    })
}

/// As [`mg_skip_run`] with an explicit coin for each iteration index.
pub fn mg_skip_run_with_coins(
    problem: &ProblemInstance,
    gossip: &MultiGossipOperator,
    cfg: &RunConfig,
    reference: &ReferenceSolution,
    diagnostics: Option<&Diagnostics>,
    mut coin: impl FnMut(usize) -> bool,
) -> Result<Trace> {
    cfg.validate(problem.l())?;
    if gossip.n() != problem.n() {
        return Err(Error::Shape {
            expected: format!("{} nodes", problem.n()),
            got: format!("{} nodes in the gossip operator", gossip.n()),
        });
    }
    let xstar = linalg::stack_rows(&reference.xstar, problem.n());
    let mut state = MgSkipState::zeros(problem.n(), problem.dim());
    let mut records = Vec::new();
    let mut converged = false;
    for t in 0..cfg.max_iter {
        let theta = coin(t);
        state = match mg_skip_step(&state, problem, gossip, cfg, theta) {
            Ok(s) => s,
            Err(Error::Diverged { iteration, .. }) => {
                return Err(Error::Diverged {
                    iteration,
                    trace: records,
                })
            }
            Err(e) => return Err(e),
        };
        let psi = diagnostics.map(|d| d.lyapunov(&state)).transpose()?;
        let rel_err = relative_error(&state.x, &xstar);
        records.push(IterRecord {
            t: state.t,
            theta,
            comm_rounds: state.comm_rounds,
            grad_evals: state.grad_evals,
            rel_err,
            psi,
        });
        if rel_err <= cfg.tol {
            converged = true;
            break;
        }
    }
    Ok(Trace {
        records,
        converged,
        final_x: state.x,
    })
}
