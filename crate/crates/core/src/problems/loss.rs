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

use nalgebra::{DMatrix, DVector};

use crate::linalg;

/// Strongly convex, smooth local loss `f_i`.
pub trait SmoothLoss {
    fn dim(&self) -> usize;
    fn value(&self, x: &DVector<f64>) -> f64;
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;
    /// Strong-convexity modulus `μ_i`.
    fn mu(&self) -> f64;
    /// Smoothness modulus `L_i`.
    fn lsmooth(&self) -> f64;
}

/// `½‖A x − b‖²` with the moduli taken from the spectrum of `AᵀA`.
#[derive(Debug, Clone)]
pub struct LeastSquaresLoss {
    a: DMatrix<f64>,
    b: DVector<f64>,
    hessian: DMatrix<f64>,
    atb: DVector<f64>,
    mu: f64,
    l: f64,
}

impl LeastSquaresLoss {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>) -> Self {
        assert_eq!(a.nrows(), b.len(), "A and b disagree on row count");
        let hessian = linalg::symmetrize(&(a.transpose() * &a));
        let spectrum = linalg::sym_eigenvalues(&hessian);
        let l = spectrum.first().copied().unwrap_or(0.0);
        let mu = spectrum.last().copied().unwrap_or(0.0);
        let atb = a.transpose() * &b;
        LeastSquaresLoss {
            a,
            b,
            hessian,
            atb,
            mu,
            l,
        }
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn hessian(&self) -> &DMatrix<f64> {
        &self.hessian
    }
}

impl SmoothLoss for LeastSquaresLoss {
    fn dim(&self) -> usize {
        self.a.ncols()
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        0.5 * (&self.a * x - &self.b).norm_squared()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.hessian * x - &self.atb
    }

    fn mu(&self) -> f64 {
        self.mu
    }

    fn lsmooth(&self) -> f64 {
        self.l
    }
}

/// `(1/m) Σ_j ln(1 + exp(−b_j a_jᵀ x)) + γ₁‖x‖²`.
#[derive(Debug, Clone)]
pub struct LogisticLoss {
    features: DMatrix<f64>,
    labels: Vec<f64>,
    gamma1: f64,
    l: f64,
}

impl LogisticLoss {
    /// `features` is `m × d`, one sample per row; labels are `±1`.
    ///
    /// `L_i = 2γ₁ + λ_max(AᵀA) / (4m)` bounds the Hessian since the logistic
    /// curvature never exceeds `1/4`.
    pub fn new(features: DMatrix<f64>, labels: Vec<f64>, gamma1: f64) -> Self {
        assert_eq!(features.nrows(), labels.len(), "one label per sample");
        let m = features.nrows();
        let curvature = if m == 0 {
            0.0
        } else {
            let gram = features.transpose() * &features;
            linalg::sym_eigenvalues(&gram)[0].max(0.0) / (4.0 * m as f64)
        };
        LogisticLoss {
            features,
            labels,
            gamma1,
            l: 2.0 * gamma1 + curvature,
        }
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }
}

/// `ln(1 + e^{s})` without overflow.
fn softplus(s: f64) -> f64 {
    if s > 0.0 {
        s + (-s).exp().ln_1p()
    } else {
        s.exp().ln_1p()
    }
}

fn sigmoid(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

impl SmoothLoss for LogisticLoss {
    fn dim(&self) -> usize {
        self.features.ncols()
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        let m = self.labels.len();
        let mut s = 0.0;
        for (j, &b) in self.labels.iter().enumerate() {
            let margin = self.features.row(j).dot(&x.transpose());
            s += softplus(-b * margin);
        }
        let data = if m == 0 { 0.0 } else { s / m as f64 };
        data + self.gamma1 * x.norm_squared()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let m = self.labels.len();
        let mut g = DVector::zeros(x.len());
        for (j, &b) in self.labels.iter().enumerate() {
            let row = self.features.row(j);
            let margin = row.dot(&x.transpose());
            let w = -b * sigmoid(-b * margin);
            for k in 0..x.len() {
                g[k] += w * row[k];
            }
        }
        if m > 0 {
            g /= m as f64;
        }
        g + x * (2.0 * self.gamma1)
    }

    fn mu(&self) -> f64 {
        2.0 * self.gamma1
    }

    fn lsmooth(&self) -> f64 {
        self.l
    }
}

/// The loss families shipped with the crate.
#[derive(Debug, Clone)]
pub enum LocalLoss {
    LeastSquares(LeastSquaresLoss),
    Logistic(LogisticLoss),
}

impl SmoothLoss for LocalLoss {
    fn dim(&self) -> usize {
        match self {
            LocalLoss::LeastSquares(f) => f.dim(),
            LocalLoss::Logistic(f) => f.dim(),
        }
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        match self {
            LocalLoss::LeastSquares(f) => f.value(x),
            LocalLoss::Logistic(f) => f.value(x),
        }
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        match self {
            LocalLoss::LeastSquares(f) => f.gradient(x),
            LocalLoss::Logistic(f) => f.gradient(x),
        }
    }

    fn mu(&self) -> f64 {
        match self {
            LocalLoss::LeastSquares(f) => f.mu(),
            LocalLoss::Logistic(f) => f.mu(),
        }
    }

    fn lsmooth(&self) -> f64 {
        match self {
            LocalLoss::LeastSquares(f) => f.lsmooth(),
            LocalLoss::Logistic(f) => f.lsmooth(),
        }
    }
}

impl From<LeastSquaresLoss> for LocalLoss {
    fn from(f: LeastSquaresLoss) -> Self {
        LocalLoss::LeastSquares(f)
    }
}

impl From<LogisticLoss> for LocalLoss {
    fn from(f: LogisticLoss) -> Self {
        LocalLoss::Logistic(f)
    }
}
