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

//! Optimality and contraction diagnostics.
//!
//! With `S = √(½(I − M̄))` the saddle point is `(X*, U*)` where `X* = 1x*ᵀ`
//! and `S U* = Y*`, `y*_i = (1/n)Σ_j ∇f_j(x*) − ∇f_i(x*)`. The Lyapunov value
//! `Ψ = ‖X − X*‖² + (α²/p²)‖U − U*‖²` recovers `U − U*` from `Y − Y*` through
//! the pseudo-inverse of `S`.

use nalgebra::{DMatrix, DVector};

use super::{mg_skip_step, MgSkipState, RunConfig};
use crate::gossip::{MultiGossipOperator, SIGMA_ZERO};
use crate::linalg;
use crate::problems::ProblemInstance;
use crate::{Error, Result};

/// `max{(1−αμ)², (1−αL)², 1 − p²/5}`.
pub fn zeta(alpha: f64, mu: f64, lsmooth: f64, p: f64) -> f64 {
    (1.0 - alpha * mu)
        .powi(2)
        .max((1.0 - alpha * lsmooth).powi(2))
        .max(1.0 - p * p / 5.0)
}

/// Rows `y*_i = (1/n)Σ_j ∇f_j(x) − ∇f_i(x)` at the consensual point `x`.
pub fn optimal_dual(problem: &ProblemInstance, x: &DVector<f64>) -> DMatrix<f64> {
    let grads = problem.grad_stacked(&linalg::stack_rows(x, problem.n()));
    let mean = problem.mean_gradient(x);
    linalg::stack_rows(&mean, problem.n()) - grads
}

fn half_laplacian(gossip: &MultiGossipOperator) -> DMatrix<f64> {
    gossip.laplacian() * 0.5
}

fn sqrt_half_laplacian(gossip: &MultiGossipOperator) -> DMatrix<f64> {
    linalg::sym_apply(&half_laplacian(gossip), |v| {
        if v > 0.5 * SIGMA_ZERO {
            v.sqrt()
        } else {
            0.0
        }
    })
}

fn pinv_sqrt_half_laplacian(gossip: &MultiGossipOperator) -> DMatrix<f64> {
    linalg::sym_apply(&half_laplacian(gossip), |v| {
        if v > 0.5 * SIGMA_ZERO {
            1.0 / v.sqrt()
        } else {
            0.0
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointReport {
    /// `‖Z* − (X* − α∇F(X*) − αSU*)‖` with `U* = S⁺Y*`.
    pub dual_reconstruction: f64,
    /// `‖S Z*‖`.
    pub consensus: f64,
    /// `‖X* − prox_{αR}(Z*)‖`.
    pub prox: f64,
}

impl FixedPointReport {
    pub fn max(&self) -> f64 {
        self.dual_reconstruction.max(self.consensus).max(self.prox)
    }
}

/// Residual of the three optimality equations at the consensual candidate `x`.
pub fn fixed_point_residual(
    x: &DVector<f64>,
    problem: &ProblemInstance,
    gossip: &MultiGossipOperator,
    alpha: f64,
) -> FixedPointReport {
    let n = problem.n();
    let xs = linalg::stack_rows(x, n);
    let ystar = optimal_dual(problem, x);
    let s = sqrt_half_laplacian(gossip);
    let ustar = pinv_sqrt_half_laplacian(gossip) * &ystar;
    let sy = &s * &ustar;
    let z = &xs - (problem.grad_stacked(&xs) + &sy) * alpha;
    let z_direct = &xs - (problem.grad_stacked(&xs) + &ystar) * alpha;
    FixedPointReport {
        dual_reconstruction: (&z - z_direct).norm(),
        consensus: (&s * &z).norm(),
        prox: (&xs - problem.prox_stacked(alpha, &z)).norm(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionReport {
    pub psi: f64,
    /// `Ψ` after a communicating step.
    pub psi_comm: f64,
    /// `Ψ` after a skipped step.
    pub psi_skip: f64,
    /// `p Ψ(θ=1) + (1−p) Ψ(θ=0)`.
    pub lhs: f64,
    /// `ζ Ψ`.
    pub rhs: f64,
    pub zeta: f64,
    pub ok: bool,
}

/// Precomputed quantities tied to one `(problem, gossip, α, p, x*)`.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    xstar: DMatrix<f64>,
    ystar: DMatrix<f64>,
    s: DMatrix<f64>,
    s_pinv: DMatrix<f64>,
    alpha: f64,
    p: f64,
    zeta: f64,
}

impl Diagnostics {
    pub fn new(
        problem: &ProblemInstance,
        gossip: &MultiGossipOperator,
        xstar: &DVector<f64>,
        alpha: f64,
        p: f64,
    ) -> Self {
        Diagnostics {
            xstar: linalg::stack_rows(xstar, problem.n()),
            ystar: optimal_dual(problem, xstar),
            s: sqrt_half_laplacian(gossip),
            s_pinv: pinv_sqrt_half_laplacian(gossip),
            alpha,
            p,
            zeta: zeta(alpha, problem.mu(), problem.l(), p),
        }
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn xstar(&self) -> &DMatrix<f64> {
        &self.xstar
    }

    pub fn ystar(&self) -> &DMatrix<f64> {
        &self.ystar
    }

    /// `S = √(½(I − M̄))`.
    pub fn sqrt_half_laplacian(&self) -> &DMatrix<f64> {
        &self.s
    }

    /// `U − U* = S⁺(Y − Y*)`, checking that `Y − Y*` lies in `range(S)`.
    pub fn dual_offset(&self, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let dy = y - &self.ystar;
        let du = &self.s_pinv * &dy;
        let miss = (&self.s * &du - &dy).norm();
        if miss > 1e-8 * dy.norm().max(1.0) {
            return Err(Error::DualRange(miss));
        }
        Ok(du)
    }

    pub fn lyapunov(&self, state: &MgSkipState) -> Result<f64> {
        let du = self.dual_offset(&state.y)?;
        let ratio = self.alpha / self.p;
        Ok((&state.x - &self.xstar).norm_squared() + ratio * ratio * du.norm_squared())
    }

    /// Exact conditional expectation of `Ψ` over the next coin, compared to `ζΨ`.
    pub fn check_contraction(
        &self,
        state: &MgSkipState,
        problem: &ProblemInstance,
        gossip: &MultiGossipOperator,
        cfg: &RunConfig,
    ) -> Result<ContractionReport> {
        let psi = self.lyapunov(state)?;
        let psi_comm = self.lyapunov(&mg_skip_step(state, problem, gossip, cfg, true)?)?;
        let psi_skip = self.lyapunov(&mg_skip_step(state, problem, gossip, cfg, false)?)?;
        let lhs = self.p * psi_comm + (1.0 - self.p) * psi_skip;
        let rhs = self.zeta * psi;
        Ok(ContractionReport {
            psi,
            psi_comm,
            psi_skip,
            lhs,
            rhs,
            zeta: self.zeta,
            ok: lhs <= rhs + 1e-9 * psi.max(1.0),
        })
    }
}
