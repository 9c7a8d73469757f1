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

//! PUDA: the generic primal-dual recursion
//!
//! ```text
//! z^t     = B z^{t−1} + C (x^t − x^{t−1}) + α (∇F(x^{t−1}) − ∇F(x^t))
//! x^{t+1} = prox_{αR}(A z^t)
//! ```
//!
//! The matrices are checked once, at construction, against
//! `A² ⪯ B ⪯ I`, `B ≺ I` on `1^⊥` and `0 ⪯ C ⪯ 2I`.

use nalgebra::DMatrix;

use super::{relative_error, IterRecord, Trace};
use crate::gossip::MultiGossipOperator;
use crate::linalg;
use crate::problems::{ProblemInstance, ReferenceSolution};
use crate::topology::MixingMatrix;
use crate::{Error, Result};

const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct PudaConfig {
    pub name: String,
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    c: DMatrix<f64>,
    /// Applications of `W` per iteration.
    pub rounds_per_iter: u64,
    /// Vectors sent per neighbour per round.
    pub payload: u32,
}

fn min_eig(m: &DMatrix<f64>) -> f64 {
    linalg::sym_eigenvalues(m).last().copied().unwrap_or(0.0)
}

impl PudaConfig {
    pub fn new(
        name: impl Into<String>,
        a: DMatrix<f64>,
        b: DMatrix<f64>,
        c: DMatrix<f64>,
        rounds_per_iter: u64,
        payload: u32,
    ) -> Result<Self> {
        let n = a.nrows();
        for (label, m) in [("A", &a), ("B", &b), ("C", &c)] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Shape {
                    expected: format!("{n}x{n}"),
                    got: format!("{label} is {}x{}", m.nrows(), m.ncols()),
                });
            }
            if linalg::max_abs_asymmetry(m) > 1e-12 {
                return Err(Error::PudaCondition(format!("{label} is not symmetric")));
            }
        }
        let id = DMatrix::<f64>::identity(n, n);
        let checks = [
            ("A^2 <= B", &b - &a * &a),
            ("B <= I", &id - &b),
            ("C >= 0", c.clone()),
            ("C <= 2I", &id * 2.0 - &c),
        ];
        for (label, m) in &checks {
            let low = min_eig(m);
            if low < -PSD_TOL {
                return Err(Error::PudaCondition(format!(
                    "{label} fails (min eigenvalue {low:e})"
                )));
            }
        }
        if n > 1 {
            let q = linalg::consensus_complement(n);
            let low = min_eig(&(q.transpose() * (&id - &b) * &q));
            if low <= PSD_TOL {
                return Err(Error::PudaCondition(format!(
                    "B < I fails on the consensus complement (min gap {low:e})"
                )));
            }
        }
        Ok(PudaConfig {
            name: name.into(),
            a,
            b,
            c,
            rounds_per_iter,
            payload,
        })
    }

    /// `A = B = I − ½(I − M̄)`, `C = I`: MG-Skip with `p = 1`.
    pub fn mgskip_p1(gossip: &MultiGossipOperator) -> Result<Self> {
        let n = gossip.n();
        let half = DMatrix::<f64>::identity(n, n) - gossip.laplacian() * 0.5;
        let a = linalg::symmetrize(&half);
        Self::new(
            "mgskip_p1",
            a.clone(),
            a,
            DMatrix::identity(n, n),
            gossip.k() as u64,
            1,
        )
    }

    /// `A = B = C = (I + W)/2`.
    pub fn nids_style(mixing: &MixingMatrix) -> Result<Self> {
        let n = mixing.n();
        let m = (DMatrix::<f64>::identity(n, n) + mixing.matrix()) * 0.5;
        Self::new("nids_style", m.clone(), m.clone(), m, 1, 1)
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PudaState {
    /// `x^t`.
    pub x: DMatrix<f64>,
    pub x_prev: DMatrix<f64>,
    /// `z^{t−1}`.
    pub z_prev: DMatrix<f64>,
    /// `∇F(x^{t−1})`.
    pub grad_prev: DMatrix<f64>,
    pub t: usize,
    pub comm_rounds: u64,
    pub grad_evals: u64,
}

/// First iteration from `x⁰`: `z⁰ = x⁰ − α∇F(x⁰)`, `x¹ = prox(A z⁰)`.
pub fn puda_init(
    x0: DMatrix<f64>,
    problem: &ProblemInstance,
    cfg: &PudaConfig,
    alpha: f64,
) -> PudaState {
    let grad = problem.grad_stacked(&x0);
    let z = &x0 - &grad * alpha;
    let x = problem.prox_stacked(alpha, &(&cfg.a * &z));
    PudaState {
        x,
        x_prev: x0,
        z_prev: z,
        grad_prev: grad,
        t: 1,
        comm_rounds: cfg.rounds_per_iter,
        grad_evals: 1,
    }
}

pub fn puda_step(
    state: &PudaState,
    problem: &ProblemInstance,
    cfg: &PudaConfig,
    alpha: f64,
) -> Result<PudaState> {
    let grad = problem.grad_stacked(&state.x);
    let z = &cfg.b * &state.z_prev
        + &cfg.c * (&state.x - &state.x_prev)
        + (&state.grad_prev - &grad) * alpha;
    let x = problem.prox_stacked(alpha, &(&cfg.a * &z));
    let t = state.t + 1;
    if !linalg::all_finite(&x) {
        return Err(Error::Diverged {
            iteration: t,
            trace: Vec::new(),
        });
    }
    Ok(PudaState {
        x,
        x_prev: state.x.clone(),
        z_prev: z,
        grad_prev: grad,
        t,
        comm_rounds: state.comm_rounds + cfg.rounds_per_iter,
        grad_evals: state.grad_evals + 1,
    })
}

pub fn puda_run(
    problem: &ProblemInstance,
    cfg: &PudaConfig,
    alpha: f64,
    max_iter: usize,
    tol: f64,
    reference: &ReferenceSolution,
) -> Result<Trace> {
    if cfg.a.nrows() != problem.n() {
        return Err(Error::Shape {
            expected: format!("{} nodes", problem.n()),
            got: format!("{} nodes in the PUDA matrices", cfg.a.nrows()),
        });
    }
    if !(alpha > 0.0 && alpha * problem.l() < 2.0) {
        return Err(Error::Parameter(format!(
            "stepsize {alpha} outside (0, 2/L)"
        )));
    }
    let xstar = linalg::stack_rows(&reference.xstar, problem.n());
    let mut records = Vec::new();
    let mut converged = false;
    let mut state: Option<PudaState> = None;
    for _ in 0..max_iter {
        let next = match &state {
            None => puda_init(
                DMatrix::zeros(problem.n(), problem.dim()),
                problem,
                cfg,
                alpha,
            ),
            Some(s) => match puda_step(s, problem, cfg, alpha) {
                Ok(n) => n,
                Err(Error::Diverged { iteration, .. }) => {
                    return Err(Error::Diverged {
                        iteration,
                        trace: records,
                    })
                }
                Err(e) => return Err(e),
            },
        };
        let rel_err = relative_error(&next.x, &xstar);
        records.push(IterRecord {
            t: next.t,
            theta: true,
            comm_rounds: next.comm_rounds,
            grad_evals: next.grad_evals,
            rel_err,
            psi: None,
        });
        state = Some(next);
        if rel_err <= tol {
            converged = true;
            break;
        }
    }
    let final_x = state.map_or_else(|| DMatrix::zeros(problem.n(), problem.dim()), |s| s.x);
    Ok(Trace {
        records,
        converged,
        final_x,
    })
}
