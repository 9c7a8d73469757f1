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

//! Seeded synthetic instances.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::libsvm::PartitionedDataset;
use super::{LeastSquaresLoss, LocalLoss, LogisticLoss, ProblemInstance, Regularizer};
use crate::{Error, Result};

fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Haar-distributed orthogonal matrix via QR with sign correction.
fn random_orthogonal(rng: &mut impl Rng, d: usize) -> DMatrix<f64> {
    let qr = gaussian_matrix(rng, d, d).qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..d {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    q
}

/// `f_i(x) = ½‖A_i x − b_i‖²` with `A_iᵀA_i` spectrum pinned to `[μ, L]`.
///
/// `A_i = diag(s) Q_iᵀ` for a random orthogonal `Q_i`, where `s` has
/// `√μ` and `√L` as its extreme entries and uniform draws in between, so
/// every node attains both bounds exactly. `b_i ~ N(0, I_d)`.
pub fn gen_least_squares(
    n: usize,
    d: usize,
    mu: f64,
    lsmooth: f64,
    seed: u64,
) -> Result<ProblemInstance> {
    if !(mu > 0.0 && mu <= lsmooth) {
        return Err(Error::Parameter(format!(
            "need 0 < mu <= L, got mu = {mu}, L = {lsmooth}"
        )));
    }
    if n == 0 || d == 0 {
        return Err(Error::InvalidSize("need n >= 1 and d >= 1".into()));
    }
    if d == 1 && mu != lsmooth {
        return Err(Error::Parameter(
            "a one-dimensional quadratic cannot attain both mu and L".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (mu.sqrt(), lsmooth.sqrt());
    let losses = (0..n)
        .map(|_| {
            let q = random_orthogonal(&mut rng, d);
            let mut s = DVector::from_fn(d, |_, _| rng.random_range(lo..=hi));
            s[0] = lo;
            s[d - 1] = hi;
            let a = DMatrix::from_diagonal(&s) * q.transpose();
            let b = DVector::from_fn(d, |_, _| rng.sample(StandardNormal));
            LeastSquaresLoss::new(a, b).into()
        })
        .collect();
    ProblemInstance::new(losses, Regularizer::Zero)
}

/// Synthetic composite logistic regression: standard normal features,
/// labels `sign(aᵀw)` for a random hyperplane `w`, ridge `γ₁` on the smooth
/// side and `γ₂‖·‖₁` as the regularizer.
pub fn gen_logistic(
    n: usize,
    d: usize,
    samples_per_node: usize,
    gamma1: f64,
    gamma2: f64,
    seed: u64,
) -> Result<ProblemInstance> {
    check_gammas(gamma1, gamma2)?;
    if n == 0 || d == 0 {
        return Err(Error::InvalidSize("need n >= 1 and d >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth = DVector::<f64>::from_fn(d, |_, _| rng.sample(StandardNormal));
    let losses = (0..n)
        .map(|_| {
            let a = gaussian_matrix(&mut rng, samples_per_node, d);
            let labels = (0..samples_per_node)
                .map(|j| {
                    if a.row(j).dot(&truth.transpose()) >= 0.0 {
                        1.0
                    } else {
                        -1.0
                    }
                })
                .collect();
            LogisticLoss::new(a, labels, gamma1).into()
        })
        .collect();
    ProblemInstance::new(losses, l1_or_zero(gamma2))
}

/// Logistic instance over a loaded, partitioned dataset.
pub fn logistic_from_partition(
    data: &PartitionedDataset,
    gamma1: f64,
    gamma2: f64,
) -> Result<ProblemInstance> {
    check_gammas(gamma1, gamma2)?;
    let losses: Vec<LocalLoss> = data
        .nodes
        .iter()
        .map(|node| LogisticLoss::new(node.dense_features(data.dim), node.labels(), gamma1).into())
        .collect();
    ProblemInstance::new(losses, l1_or_zero(gamma2))
}

fn check_gammas(gamma1: f64, gamma2: f64) -> Result<()> {
    if !(gamma1 > 0.0) {
        return Err(Error::Parameter(format!(
            "gamma1 must be positive for strong convexity, got {gamma1}"
        )));
    }
    if !(gamma2 >= 0.0) {
        return Err(Error::Parameter(format!(
            "gamma2 must be non-negative, got {gamma2}"
        )));
    }
    Ok(())
}

fn l1_or_zero(weight: f64) -> Regularizer {
    if weight == 0.0 {
        Regularizer::Zero
    } else {
        Regularizer::L1 { weight }
    }
}
