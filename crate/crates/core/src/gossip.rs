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

//! Chebyshev-accelerated multi-round gossip.
//!
//! `K` consecutive neighbour exchanges realise the polynomial `M_K(W)`
//! defined by `M_{k+1} = (1+η) W M_k − η M_{k−1}` with `M_0 = M_{−1} = I`.
//! The algorithm path only ever calls [`MultiGossipOperator::fast_goss`];
//! the dense matrix `M̄ = M_K` is materialised lazily for diagnostics.

use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;

use crate::linalg;
use crate::topology::MixingMatrix;
use crate::{Error, Result};

/// Which closed form to use for the Chebyshev weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EtaRule {
    /// `(1 − √(1−ρ²)) / (1 + √(1−ρ²))`.
    #[default]
    Standard,
    /// `(1 − √(1−ρ²)) / (1 + √(1+ρ²))`, kept for comparison.
    Printed,
}

pub fn chebyshev_eta(rho: f64) -> Result<f64> {
    chebyshev_eta_with(rho, EtaRule::Standard)
}

pub fn chebyshev_eta_with(rho: f64, rule: EtaRule) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::Domain(format!(
            "spectral gap must lie in [0, 1), got {rho}"
        )));
    }
    let root = (1.0 - rho * rho).sqrt();
    let den = match rule {
        EtaRule::Standard => 1.0 + root,
        EtaRule::Printed => 1.0 + (1.0 + rho * rho).sqrt(),
    };
    Ok((1.0 - root) / den)
}

/// `max(1, ⌊1/√(1−ρ)⌋)`.
pub fn default_k(rho: f64) -> usize {
    let k = (1.0 / (1.0 - rho).sqrt()).floor();
    if k.is_finite() && k >= 1.0 {
        k as usize
    } else {
        1
    }
}

#[derive(Debug)]
pub struct MultiGossipOperator {
    mixing: Arc<MixingMatrix>,
    k: usize,
    eta: f64,
    mbar: OnceLock<DMatrix<f64>>,
}

impl MultiGossipOperator {
    /// Operator with `K = default_k(ρ)` and the standard Chebyshev weight.
    pub fn with_defaults(mixing: Arc<MixingMatrix>) -> Result<Self> {
        let k = default_k(mixing.rho());
        Self::new(mixing, k, EtaRule::Standard)
    }

    pub fn new(mixing: Arc<MixingMatrix>, k: usize, rule: EtaRule) -> Result<Self> {
        let eta = chebyshev_eta_with(mixing.rho(), rule)?;
        Self::with_eta(mixing, k, eta)
    }

    /// Explicit `(K, η)`; `K = 1, η = 0` gives plain single gossip `M̄ = W`.
    pub fn with_eta(mixing: Arc<MixingMatrix>, k: usize, eta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&eta) {
            return Err(Error::Domain(format!(
                "Chebyshev weight must lie in [0, 1), got {eta}"
            )));
        }
        Ok(MultiGossipOperator {
            mixing,
            k: k.max(1),
            eta,
            mbar: OnceLock::new(),
        })
    }

    pub fn single(mixing: Arc<MixingMatrix>) -> Self {
        Self::with_eta(mixing, 1, 0.0).expect("zero weight is always valid")
    }

    pub fn mixing(&self) -> &MixingMatrix {
        &self.mixing
    }

    pub fn n(&self) -> usize {
        self.mixing.n()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Distributed evaluation of `(I − M̄) s`. Each of the `K` rounds is one
    /// neighbour exchange and bumps `rounds` by one.
    pub fn fast_goss(&self, states: &DMatrix<f64>, rounds: &mut u64) -> Result<DMatrix<f64>> {
        if states.nrows() != self.n() {
            return Err(Error::Shape {
                expected: format!("{} rows", self.n()),
                got: format!("{} rows", states.nrows()),
            });
        }
        let mut prev = states.clone();
        let mut cur = states.clone();
        for _ in 0..self.k {
            let mixed = self.mixing.mix_round(&cur);
            *rounds += 1;
            let next = mixed * (1.0 + self.eta) - &prev * self.eta;
            prev = std::mem::replace(&mut cur, next);
        }
        Ok(states - cur)
    }

    /// Dense `M̄ = M_K` via the same recursion.
    pub fn mbar(&self) -> &DMatrix<f64> {
        self.mbar.get_or_init(|| {
            let n = self.n();
            let w = self.mixing.matrix();
            let mut prev = DMatrix::<f64>::identity(n, n);
            let mut cur = prev.clone();
            for _ in 0..self.k {
                let next = (w * &cur) * (1.0 + self.eta) - &prev * self.eta;
                prev = std::mem::replace(&mut cur, next);
            }
            cur
        })
    }

    /// Dense `I − M̄`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        DMatrix::identity(self.n(), self.n()) - self.mbar()
    }

    /// Upper bound `√2 (1 − √(1−ρ))^K` on the radius of `M̄ − 11ᵀ/n`.
    pub fn radius_bound(&self) -> f64 {
        std::f64::consts::SQRT_2 * (1.0 - (1.0 - self.mixing.rho()).sqrt()).powi(self.k as i32)
    }

    pub fn spectral_report(&self) -> SpectralReport {
        let n = self.n();
        let mbar = self.mbar();
        let symmetry_defect = linalg::max_abs_asymmetry(mbar);
        let row_sum_defect = linalg::row_sum_defect(mbar);
        let radius = linalg::spectral_radius_sym(&(mbar - linalg::averaging(n)));
        let radius_bound = self.radius_bound();
        let lap = self.laplacian();
        let sigma_min = linalg::sym_eigenvalues(&lap)
            .into_iter()
            .filter(|&v| v > SIGMA_ZERO)
            .fold(None, |acc: Option<f64>, v| {
                Some(acc.map_or(v, |a| a.min(v)))
            });
        let at_default_k = self.k == default_k(self.mixing.rho());
        let sigma_ok = !at_default_k || sigma_min.is_none_or(|s| s >= 0.4);
        SpectralReport {
            rho: self.mixing.rho(),
            k: self.k,
            eta: self.eta,
            symmetry_defect,
            row_sum_defect,
            radius,
            radius_bound,
            radius_bound_ok: radius <= radius_bound + 1e-9,
            sigma_min,
            at_default_k,
            sigma_min_ok: sigma_ok,
        }
    }
}

/// Eigenvalues of `I − M̄` at or below this are treated as the consensus zero.
pub const SIGMA_ZERO: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub rho: f64,
    pub k: usize,
    pub eta: f64,
    pub symmetry_defect: f64,
    pub row_sum_defect: f64,
    pub radius: f64,
    pub radius_bound: f64,
    pub radius_bound_ok: bool,
    /// Smallest nonzero eigenvalue of `I − M̄`; `None` for a single node.
    pub sigma_min: Option<f64>,
    /// Whether `K` equals `default_k(ρ)`, where the `2/5` floor applies.
    pub at_default_k: bool,
    pub sigma_min_ok: bool,
}

impl SpectralReport {
    pub fn ok(&self) -> bool {
        self.radius_bound_ok
            && self.sigma_min_ok
            && self.symmetry_defect <= 1e-12
            && self.row_sum_defect <= 1e-10
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{build_ring, metropolis_weights, Graph};

    fn ring(n: usize) -> Arc<MixingMatrix> {
        Arc::new(metropolis_weights(&build_ring(n).unwrap()).unwrap())
    }

    fn complete(n: usize) -> Arc<MixingMatrix> {
        let g = Graph::connected(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).unwrap();
        Arc::new(metropolis_weights(&g).unwrap())
    }

    #[test]
    fn eta_values() {
        assert_eq!(chebyshev_eta(0.0).unwrap(), 0.0);
        // (1 - sqrt(0.75)) / (1 + sqrt(0.75)) = 0.0717967...
        assert!((chebyshev_eta(0.5).unwrap() - 0.071_796_769_724_490_9).abs() < 1e-12);
        assert!((chebyshev_eta(0.9424).unwrap() - 0.4987).abs() < 5e-4);
        assert!(chebyshev_eta(1.0).is_err());
        assert!(chebyshev_eta(-0.1).is_err());
        let printed = chebyshev_eta_with(0.5, EtaRule::Printed).unwrap();
        assert!(printed < chebyshev_eta(0.5).unwrap());
    }

    #[test]
    fn eta_monotone() {
        let mut last = -1.0;
        for k in 0..100 {
            let v = chebyshev_eta(k as f64 / 100.0).unwrap();
            assert!(v > last && v < 1.0);
            last = v;
        }
    }

    #[test]
    fn default_k_values() {
        assert_eq!(default_k(0.0), 1);
        assert_eq!(default_k(0.9424), 4);
        assert_eq!(default_k(1.0 - 0.1186), 2);
    }

    #[test]
    fn k_clamped_to_one() {
        let op = MultiGossipOperator::with_eta(ring(5), 0, 0.0).unwrap();
        assert_eq!(op.k(), 1);
    }

    #[test]
    fn consensual_input_maps_to_zero() {
        let op = MultiGossipOperator::with_defaults(ring(15)).unwrap();
        let s = DMatrix::from_fn(15, 4, |_, k| k as f64 - 1.5);
        let mut rounds = 0;
        let out = op.fast_goss(&s, &mut rounds).unwrap();
        assert!(out.norm() < 1e-12);
        assert_eq!(rounds, 4);
    }

    #[test]
    fn complete_graph_basis_rows() {
        let op = MultiGossipOperator::with_defaults(complete(5)).unwrap();
        assert_eq!(op.k(), 1);
        assert_eq!(op.eta(), 0.0);
        let s = DMatrix::<f64>::identity(5, 5);
        let mut rounds = 0;
        let out = op.fast_goss(&s, &mut rounds).unwrap();
        let expected = DMatrix::<f64>::identity(5, 5) - linalg::averaging(5);
        assert!((out - expected).norm() < 1e-12);
    }

    #[test]
    fn shape_error() {
        let op = MultiGossipOperator::with_defaults(ring(5)).unwrap();
        let mut rounds = 0;
        assert!(matches!(
            op.fast_goss(&DMatrix::zeros(4, 2), &mut rounds),
            Err(Error::Shape { .. })
        ));
        assert_eq!(rounds, 0);
    }

    #[test]
    fn spectral_report_complete_graph() {
        let r = MultiGossipOperator::with_defaults(complete(5))
            .unwrap()
            .spectral_report();
        assert!((r.sigma_min.unwrap() - 1.0).abs() < 1e-12);
        assert!(r.ok());
    }

    #[test]
    fn spectral_report_ring15() {
        let r = MultiGossipOperator::with_defaults(ring(15))
            .unwrap()
            .spectral_report();
        assert_eq!(r.k, 4);
        assert!((r.rho - 0.9424).abs() < 1e-3, "{r:?}");
        assert!(r.sigma_min_ok, "{r:?}");
        assert!(r.radius < 1.0, "{r:?}");
        // The contraction of the tail eigenvalue picks up a polynomial factor
        // from the double root at λ = ρ, so the closed-form bound is exceeded.
        assert!(!r.radius_bound_ok, "{r:?}");

        let r1 = MultiGossipOperator::new(ring(15), 1, EtaRule::Standard)
            .unwrap()
            .spectral_report();
        assert!(!r1.at_default_k);
        assert!(r1.radius_bound_ok);
        assert!(r1.sigma_min.unwrap() < 0.4);
    }

    #[test]
    fn single_node_has_no_sigma() {
        let w = Arc::new(metropolis_weights(&Graph::new(1, []).unwrap()).unwrap());
        let r = MultiGossipOperator::with_defaults(w)
            .unwrap()
            .spectral_report();
        assert_eq!(r.sigma_min, None);
        assert!(r.ok());
    }
}
