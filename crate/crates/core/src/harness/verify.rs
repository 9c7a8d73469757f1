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

//! The `verify` diagnostic suite: gossip bounds, fixed point, contraction.

use std::fmt::Write as _;

use super::config::{AlgorithmKind, ExperimentSpec};
use super::experiment::{build_gossip, Workbench};
use crate::algorithms::{
    fixed_point_residual, mg_skip_step, CoinStream, Diagnostics, MgSkipState, RunConfig,
};
use crate::gossip::MultiGossipOperator;
use crate::Result;

/// Fixed-point residual allowed at the centralized solution.
pub const KKT_TOL: f64 = 1e-8;
/// Iterations checked by the contraction test.
pub const CONTRACTION_STEPS: usize = 500;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, ok: bool, detail: String) -> Self {
        CheckResult {
            name: name.into(),
            ok,
            detail,
        }
    }
}

/// Checks on `M̄` at the operator's `K`.
pub fn gossip_checks(label: &str, gossip: &MultiGossipOperator) -> Vec<CheckResult> {
    let r = gossip.spectral_report();
    let mut out = vec![
        CheckResult::new(
            format!("{label}: M̄ symmetric, rows sum to 1"),
            r.symmetry_defect <= 1e-12 && r.row_sum_defect <= 1e-12,
            format!(
                "asym {:.1e}, row sum {:.1e}",
                r.symmetry_defect, r.row_sum_defect
            ),
        ),
        CheckResult::new(
            format!("{label}: radius of M̄ − 11ᵀ/n within √2(1−√(1−ρ))^K"),
            r.radius_bound_ok,
            format!(
                "rho {:.6}, K {}, radius {:.6}, bound {:.6}",
                r.rho, r.k, r.radius, r.radius_bound
            ),
        ),
    ];
    if r.at_default_k {
        out.push(CheckResult::new(
            format!("{label}: smallest nonzero eigenvalue of I − M̄ at least 2/5"),
            r.sigma_min_ok,
            format!(
                "sigma_min {}",
                r.sigma_min
                    .map_or("none (n = 1)".into(), |s| format!("{s:.6}"))
            ),
        ));
    }
    out
}

/// Runs every check the experiment supports.
pub fn verify_suite(spec: &ExperimentSpec) -> Result<Vec<CheckResult>> {
    let bench = Workbench::new(spec)?;
    let mut out = Vec::new();

    let default = MultiGossipOperator::with_defaults(bench.mixing.clone())?;
    out.extend(gossip_checks("default K", &default));
    for alg in &spec.algorithms {
        if alg.kind == AlgorithmKind::MgSkip || alg.kind == AlgorithmKind::PudaMgSkipP1 {
            let g = build_gossip(alg, &bench.mixing)?;
            if g.k() != default.k() || g.eta() != default.eta() {
                out.extend(gossip_checks(&alg.name, &g));
            }
        }
    }

    let mut seeds = spec.seeds.clone();
    if spec.problem.seed.is_some() {
        seeds.truncate(1);
    }
    for &seed in &seeds {
        let (problem, reference) = bench.problem(spec, seed);
        let alpha = 1.0 / problem.l();
        let fp = fixed_point_residual(&reference.xstar, problem, &default, alpha);
        out.push(CheckResult::new(
            format!("fixed point at x* (seed {seed})"),
            fp.max() <= KKT_TOL,
            format!(
                "dual {:.1e}, consensus {:.1e}, prox {:.1e}",
                fp.dual_reconstruction, fp.consensus, fp.prox
            ),
        ));
    }

    let steps = spec.max_iter.min(CONTRACTION_STEPS);
    // The ζ guarantee assumes the multi-gossip operator; skip1 is outside it.
    for alg in spec
        .algorithms
        .iter()
        .filter(|a| a.kind == AlgorithmKind::MgSkip)
    {
        let gossip = build_gossip(alg, &bench.mixing)?;
        for &seed in &spec.seeds {
            let (problem, reference) = bench.problem(spec, seed);
            let cfg = RunConfig {
                alpha: alg.alpha.resolve(problem.l()),
                p: alg.p,
                max_iter: steps,
                tol: 0.0,
                seed,
            };
            cfg.validate(problem.l())?;
            let diag = Diagnostics::new(problem, &gossip, &reference.xstar, cfg.alpha, cfg.p);
            let mut coins = CoinStream::new(seed, cfg.p);
            let mut state = MgSkipState::zeros(problem.n(), problem.dim());
            let mut failures = 0usize;
            let mut first_fail = None;
            let mut worst: f64 = 0.0;
            for t in 0..steps {
                let r = diag.check_contraction(&state, problem, &gossip, &cfg)?;
                if !r.ok {
                    failures += 1;
                    first_fail.get_or_insert(t);
                }
                if r.rhs > 0.0 {
                    worst = worst.max((r.lhs - r.rhs) / r.psi.max(1.0));
                }
                state = mg_skip_step(&state, problem, &gossip, &cfg, coins.flip())?;
            }
            out.push(CheckResult::new(
                format!("{}: expected Ψ contracts by ζ (seed {seed})", alg.name),
                failures == 0,
                format!(
                    "zeta {:.6}, {steps} steps, {failures} violations{}, worst excess {worst:.1e}",
                    diag.zeta(),
                    first_fail.map_or(String::new(), |t| format!(" (first at t = {t})"))
                ),
            ));
        }
    }
    Ok(out)
}

pub fn render_table(checks: &[CheckResult]) -> String {
    let width = checks
        .iter()
        .map(|c| c.name.chars().count())
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    for c in checks {
        let pad = width - c.name.chars().count();
        let _ = writeln!(
            out,
            "{}  {}{}  {}",
            if c.ok { "PASS" } else { "FAIL" },
            c.name,
            " ".repeat(pad),
            c.detail
        );
    }
    out
}
