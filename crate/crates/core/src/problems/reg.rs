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

use nalgebra::DVector;

/// Shared nonsmooth term `r`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Regularizer {
    #[default]
    Zero,
    /// `weight · ‖x‖₁`.
    L1 { weight: f64 },
}

impl Regularizer {
    pub fn value(&self, x: &DVector<f64>) -> f64 {
        match *self {
            Regularizer::Zero => 0.0,
            Regularizer::L1 { weight } => weight * x.lp_norm(1),
        }
    }

    /// `argmin_u α r(u) + ½‖u − y‖²`.
    pub fn prox(&self, alpha: f64, y: &DVector<f64>) -> DVector<f64> {
        match *self {
            Regularizer::Zero => y.clone(),
            Regularizer::L1 { weight } => l1_prox(alpha, weight, y),
        }
    }
}

/// Componentwise soft thresholding at `alpha · weight`.
pub fn l1_prox(alpha: f64, weight: f64, y: &DVector<f64>) -> DVector<f64> {
    let tau = alpha * weight;
    y.map(|v| v.signum() * (v.abs() - tau).max(0.0))
}
