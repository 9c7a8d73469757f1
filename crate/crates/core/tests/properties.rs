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

//! Property tests against independent oracles.

mod common;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use mgskip::algorithms::{
    mg_skip_run, mg_skip_run_with_coins, mg_skip_step, zeta, CoinStream, Diagnostics, MgSkipState,
    PudaConfig, RunConfig,
};
use mgskip::gossip::MultiGossipOperator;
use mgskip::harness::aggregate_seeds;
use mgskip::linalg;
use mgskip::problems::{
    centralized_solve, centralized_solve_with, flood_constants, gen_least_squares, gen_logistic,
    gradient_mapping_residual, l1_prox, parse_libsvm, Regularizer, SmoothLoss,
};
use mgskip::topology::{build_random_connectivity, build_ring, metropolis_weights, Graph};

use common::*;

fn graph_strategy() -> impl Strategy<Value = Graph> {
    prop_oneof![
        (3usize..40).prop_map(|n| build_ring(n).unwrap()),
        // A connected graph needs n - 1 edges, so iota starts at 2/n.
        (2usize..25, 0.0f64..=1.0, any::<u64>()).prop_map(|(n, u, seed)| {
            let lo = 2.0 / n as f64;
            build_random_connectivity(n, lo + u * (1.0 - lo), seed).unwrap()
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mixing_matrix_invariants(g in graph_strategy()) {
        let w = metropolis_weights(&g).unwrap();
        let m = w.matrix();
        prop_assert!((m - oracle_weights(&g)).amax() <= 1e-15);
        prop_assert!((m - m.transpose()).amax() <= 1e-12);
        for i in 0..g.n() {
            prop_assert!((m.row(i).sum() - 1.0).abs() <= 1e-12);
            for j in 0..g.n() {
                prop_assert!(m[(i, j)] >= 0.0);
                if i != j && !g.has_edge(i, j) {
                    prop_assert_eq!(m[(i, j)], 0.0);
                }
            }
        }
        prop_assert!(w.rho() < 1.0);
        prop_assert!((w.rho() - oracle_rho(m)).abs() <= 1e-10);
    }

    #[test]
    fn fast_goss_matches_dense_operator(g in graph_strategy(), seed in any::<u64>(), k in 1usize..8) {
        let w = mixing(&g);
        let op = MultiGossipOperator::new(w.clone(), k, Default::default()).unwrap();
        let n = g.n();
        let z = DMatrix::from_fn(n, 2, |i, j| ((seed.wrapping_add((i * 7 + j) as u64) % 1000) as f64 / 100.0) - 5.0);
        let mut rounds = 0;
        let got = op.fast_goss(&z, &mut rounds).unwrap();
        prop_assert_eq!(rounds, k as u64);
        let lap = DMatrix::<f64>::identity(n, n) - oracle_mbar(w.matrix(), k, op.eta());
        prop_assert!((&got - &lap * &z).amax() <= 1e-10);
        // Columns of the output are mean-zero: FastGoss maps into 1^⊥.
        for c in 0..2 {
            prop_assert!(got.column(c).sum().abs() <= 1e-10);
        }
    }

    #[test]
    fn mbar_spectrum_is_the_polynomial(g in graph_strategy(), k in 1usize..8) {
        let w = mixing(&g);
        let op = MultiGossipOperator::new(w.clone(), k, Default::default()).unwrap();
        let mut got = linalg::sym_eigenvalues(op.mbar());
        let mut want: Vec<f64> = w.matrix().clone().symmetric_eigen().eigenvalues.iter()
            .map(|&l| cheb_poly(l, k, op.eta())).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn least_squares_gradient_matches_fd(seed in any::<u64>(), x in prop::collection::vec(-3.0f64..3.0, 4)) {
        let p = gen_least_squares(3, 4, 0.3, 7.0, seed).unwrap();
        let x = DVector::from_vec(x);
        for f in p.losses() {
            let fd = fd_gradient(|v| f.value(v), &x, 1e-5);
            prop_assert!(rel_diff(&f.gradient(&x), &fd) <= 1e-5);
        }
    }

    #[test]
    fn logistic_gradient_matches_fd(seed in any::<u64>(), x in prop::collection::vec(-3.0f64..3.0, 5)) {
        let p = gen_logistic(3, 5, 20, 0.01, 0.0, seed).unwrap();
        let x = DVector::from_vec(x);
        for f in p.losses() {
            let fd = fd_gradient(|v| f.value(v), &x, 1e-5);
            prop_assert!(rel_diff(&f.gradient(&x), &fd) <= 1e-5);
        }
    }

    #[test]
    fn losses_respect_their_moduli(
        seed in any::<u64>(),
        x in prop::collection::vec(-3.0f64..3.0, 4),
        y in prop::collection::vec(-3.0f64..3.0, 4),
    ) {
        let x = DVector::from_vec(x);
        let y = DVector::from_vec(y);
        let ls = gen_least_squares(2, 4, 0.5, 4.0, seed).unwrap();
        let lg = gen_logistic(2, 4, 15, 0.05, 0.0, seed).unwrap();
        for f in ls.losses().iter().chain(lg.losses()) {
            let dg = f.gradient(&x) - f.gradient(&y);
            let dx = &x - &y;
            let d2 = dx.norm_squared();
            prop_assert!(dg.dot(&dx) >= f.mu() * d2 - 1e-9 * (1.0 + d2));
            prop_assert!(dg.norm() <= f.lsmooth() * dx.norm() + 1e-9);
        }
    }

    #[test]
    fn l1_prox_is_nonexpansive(
        alpha in 0.01f64..3.0,
        weight in 0.0f64..3.0,
        a in prop::collection::vec(-5.0f64..5.0, 3),
        b in prop::collection::vec(-5.0f64..5.0, 3),
    ) {
        let a = DVector::from_vec(a);
        let b = DVector::from_vec(b);
        let pa = l1_prox(alpha, weight, &a);
        let pb = l1_prox(alpha, weight, &b);
        prop_assert!((&pa - &pb).norm() <= (&a - &b).norm() + 1e-15);
        // Firm nonexpansiveness.
        prop_assert!((&pa - &pb).norm_squared() <= (&pa - &pb).dot(&(&a - &b)) + 1e-12);
    }

    #[test]
    fn l1_prox_matches_grid_in_two_dims(alpha in 0.05f64..2.0, weight in 0.0f64..2.0, y0 in -2.0f64..2.0, y1 in -2.0f64..2.0) {
        // αw‖x‖₁ separates, so the 2-d minimizer is found coordinate-wise on the same grid.
        let got = l1_prox(alpha, weight, &DVector::from_vec(vec![y0, y1]));
        let obj = |x0: f64, x1: f64| alpha * weight * (x0.abs() + x1.abs()) + 0.5 * ((x0 - y0).powi(2) + (x1 - y1).powi(2));
        let step = 1e-2;
        let mut best = (0.0, 0.0, f64::INFINITY);
        for i in 0..=400 {
            for j in 0..=400 {
                let (x0, x1) = (-2.0 + i as f64 * step, -2.0 + j as f64 * step);
                let v = obj(x0, x1);
                if v < best.2 {
                    best = (x0, x1, v);
                }
            }
        }
        prop_assert!((got[0] - best.0).abs() <= step && (got[1] - best.1).abs() <= step);
        prop_assert!(obj(got[0], got[1]) <= best.2 + 1e-12);
    }

    #[test]
    fn flooding_finds_global_extremes(g in graph_strategy(), vals in prop::collection::vec((0.01f64..1.0, 0.0f64..5.0), 25)) {
        let per: Vec<(f64, f64)> = vals.iter().take(g.n()).map(|&(mu, extra)| (mu + extra, mu)).collect();
        prop_assume!(per.len() == g.n());
        let r = flood_constants(&g, &per).unwrap();
        let l = per.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
        let mu = per.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(r.l, l);
        prop_assert_eq!(r.mu, mu);
        prop_assert_eq!(r.rounds, g.n().saturating_sub(1));
    }

    #[test]
    fn libsvm_round_trip(rows in prop::collection::vec((any::<bool>(), prop::collection::btree_map(1usize..30, -9.0f64..9.0, 0..6)), 1..20)) {
        let text: String = rows.iter().map(|(pos, feats)| {
            let mut line = String::from(if *pos { "+1" } else { "-1" });
            for (i, v) in feats {
                line.push_str(&format!(" {i}:{v}"));
            }
            line + "\n"
        }).collect();
        let (samples, dim) = parse_libsvm(&text, "prop").unwrap();
        prop_assert_eq!(samples.len(), rows.len());
        let want_dim = rows.iter().flat_map(|(_, f)| f.keys().copied()).max().unwrap_or(0);
        prop_assert_eq!(dim, want_dim);
        for (s, (pos, feats)) in samples.iter().zip(&rows) {
            prop_assert_eq!(s.label, if *pos { 1.0 } else { -1.0 });
            let got: Vec<(usize, f64)> = s.features.iter().map(|&(i, v)| (i + 1, v)).collect();
            let want: Vec<(usize, f64)> = feats.iter().map(|(&i, &v)| (i, v)).collect();
            prop_assert_eq!(got, want);
        }
    }
}

#[test]
fn solver_residual_is_monotone_and_meets_reference_tolerance() {
    for (i, p) in [
        gen_least_squares(6, 4, 0.2, 5.0, 1)
            .unwrap()
            .with_reg(Regularizer::L1 { weight: 0.3 }),
        gen_logistic(5, 4, 20, 0.01, 0.01, 2).unwrap(),
    ]
    .iter()
    .enumerate()
    {
        let mut hist = Vec::new();
        let sol = centralized_solve_with(p, 1e-13, 1_000_000, |_, h| hist.push(h)).unwrap();
        for w in hist.windows(2) {
            assert!(
                w[1] <= w[0] * (1.0 + 1e-9) + 1e-15,
                "instance {i}: {} > {}",
                w[1],
                w[0]
            );
        }
        let res = gradient_mapping_residual(p, 1.0 / p.l(), &sol.xstar);
        assert!(
            res <= 1e-12 * sol.xstar.norm().max(1.0),
            "instance {i}: {res:e}"
        );
    }
}

fn ring_instance(
    seed: u64,
) -> (
    Arc<mgskip::topology::MixingMatrix>,
    mgskip::problems::ProblemInstance,
) {
    let w = ring(15);
    let kappa = 0.5 / (1.0 - w.rho());
    (w, gen_least_squares(15, 10, 1.0, kappa, seed).unwrap())
}

#[test]
fn dual_columns_stay_mean_zero_and_skips_are_silent() {
    let (w, p) = ring_instance(3);
    let op = MultiGossipOperator::with_defaults(w).unwrap();
    let cfg = RunConfig {
        alpha: 1.0 / (5.0 * p.l()),
        p: 0.3,
        max_iter: 400,
        tol: 0.0,
        seed: 3,
    };
    let mut coins = CoinStream::new(3, cfg.p);
    let mut s = MgSkipState::zeros(15, 10);
    for _ in 0..400 {
        let theta = coins.flip();
        let next = mg_skip_step(&s, &p, &op, &cfg, theta).unwrap();
        let expect = s.comm_rounds + if theta { op.k() as u64 } else { 0 };
        assert_eq!(next.comm_rounds, expect);
        assert_eq!(next.grad_evals, s.grad_evals + 1);
        for c in 0..10 {
            assert!(next.y.column(c).sum().abs() <= 1e-9);
        }
        s = next;
    }
}

#[test]
fn identical_coins_give_identical_runs() {
    let (w, p) = ring_instance(5);
    let op = MultiGossipOperator::with_defaults(w).unwrap();
    let rf = centralized_solve(&p, 1e-13).unwrap();
    let cfg = RunConfig {
        alpha: 1.0 / (5.0 * p.l()),
        p: 0.4,
        max_iter: 300,
        tol: 0.0,
        seed: 9,
    };
    let a = mg_skip_run(&p, &op, &cfg, &rf, None).unwrap();
    let b = mg_skip_run(&p, &op, &cfg, &rf, None).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.final_x, b.final_x);
    // Changing only p reuses the same uniforms, so every coin at the higher p
    // is a superset of the coins at the lower p.
    let hi = mg_skip_run(&p, &op, &RunConfig { p: 0.8, ..cfg }, &rf, None).unwrap();
    for (l, h) in a.records.iter().zip(&hi.records) {
        assert!(!l.theta || h.theta);
    }
}

#[test]
fn skip1_differs_from_multi_gossip_on_a_ring() {
    let (w, p) = ring_instance(1);
    let rf = centralized_solve(&p, 1e-13).unwrap();
    let cfg = RunConfig {
        alpha: 1.0 / (5.0 * p.l()),
        p: 1.0,
        max_iter: 50,
        tol: 0.0,
        seed: 0,
    };
    let mg = MultiGossipOperator::with_defaults(w.clone()).unwrap();
    let single = MultiGossipOperator::single(w);
    let a = mg_skip_run(&p, &mg, &cfg, &rf, None).unwrap();
    let b = mg_skip_run(&p, &single, &cfg, &rf, None).unwrap();
    assert!((a.records[49].rel_err - b.records[49].rel_err).abs() > 1e-6);
    assert_eq!(a.records[49].comm_rounds, 50 * mg.k() as u64);
    assert_eq!(b.records[49].comm_rounds, 50);
}

#[test]
fn nids_preset_passes_condition_check_on_random_graphs() {
    for seed in 0..10 {
        let g = build_random_connectivity(12, 0.2 + 0.05 * seed as f64, seed).unwrap();
        assert!(PudaConfig::nids_style(&metropolis_weights(&g).unwrap()).is_ok());
    }
}

#[test]
fn puda_condition_rejects_bad_matrices() {
    let w = ring(6);
    let h = (DMatrix::<f64>::identity(6, 6) + w.matrix()) * 0.5;
    let id = DMatrix::<f64>::identity(6, 6);
    let bad = [
        (
            "asymmetric A",
            {
                let mut a = h.clone();
                a[(0, 1)] += 0.1;
                a
            },
            h.clone(),
            id.clone(),
        ),
        ("A^2 > B", id.clone(), h.clone(), id.clone()),
        ("B = I", id.clone(), id.clone(), id.clone()),
        ("C < 0", h.clone(), h.clone(), -&id),
        ("C > 2I", h.clone(), h.clone(), &id * 3.0),
    ];
    for (label, a, b, c) in bad {
        let r = PudaConfig::new(label, a, b, c, 1, 1);
        assert!(
            matches!(r, Err(mgskip::Error::PudaCondition(_))),
            "{label} accepted"
        );
    }
    let shape = PudaConfig::new(
        "shape",
        h.clone(),
        DMatrix::identity(5, 5),
        id.clone(),
        1,
        1,
    );
    assert!(matches!(shape, Err(mgskip::Error::Shape { .. })));
    assert!(PudaConfig::new("nids", h.clone(), h, id, 1, 1).is_ok());
}

#[test]
fn lyapunov_envelope_in_expectation() {
    let (w, p) = ring_instance(0);
    let op = MultiGossipOperator::with_defaults(w).unwrap();
    let rf = centralized_solve(&p, 1e-13).unwrap();
    let alpha = 1.0 / (5.0 * p.l());
    let prob = 0.5;
    let diag = Diagnostics::new(&p, &op, &rf.xstar, alpha, prob);
    let z = zeta(alpha, p.mu(), p.l(), prob);
    let psi0 = diag.lyapunov(&MgSkipState::zeros(15, 10)).unwrap();
    let traces: Vec<_> = (0..20u64)
        .map(|seed| {
            let cfg = RunConfig {
                alpha,
                p: prob,
                max_iter: 200,
                tol: 0.0,
                seed,
            };
            let mut coins = CoinStream::new(seed, prob);
            mg_skip_run_with_coins(&p, &op, &cfg, &rf, Some(&diag), |_| coins.flip())
                .unwrap()
                .records
        })
        .collect();
    let refs: Vec<&[_]> = traces.iter().map(Vec::as_slice).collect();
    let agg = aggregate_seeds(&refs).unwrap();
    assert!(!agg.ragged);
    for row in &agg.rows {
        let mean_psi = row.psi.unwrap().mean;
        assert!(
            mean_psi <= z.powi(row.t as i32) * psi0 * 1.10,
            "t {}: {mean_psi:e}",
            row.t
        );
    }
    // The per-seed relative-error envelope with C = Ψ⁰/‖X*‖².
    let c = psi0 / diag.xstar().norm_squared();
    for row in &agg.rows {
        let mean_sq: f64 = traces
            .iter()
            .map(|t| t[row.t - 1].rel_err.powi(2))
            .sum::<f64>()
            / 20.0;
        assert!(mean_sq <= c * z.powi(row.t as i32) * 1.10);
    }
}
