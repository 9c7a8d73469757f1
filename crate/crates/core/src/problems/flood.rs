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

use crate::topology::Graph;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloodResult {
    pub l: f64,
    pub mu: f64,
    pub kappa: f64,
    pub rounds: usize,
}

/// Decentralized max/min flooding of `(L_i, μ_i)`.
///
/// Each of the `n − 1` synchronous rounds replaces a node's pair by the
/// max/min over its closed neighbourhood. Afterwards every node must hold
/// the same pair; disagreement means the graph is disconnected.
pub fn flood_constants(g: &Graph, per_node: &[(f64, f64)]) -> Result<FloodResult> {
    let n = g.n();
    if per_node.len() != n {
        return Err(Error::Shape {
            expected: format!("{n} (L, mu) pairs"),
            got: format!("{}", per_node.len()),
        });
    }
    let mut state = per_node.to_vec();
    let rounds = n - 1;
    for _ in 0..rounds {
        state = (0..n)
            .map(|i| {
                g.neighbors(i).iter().fold(state[i], |(l, mu), &j| {
                    (l.max(state[j].0), mu.min(state[j].1))
                })
            })
            .collect();
    }
    let (l, mu) = state[0];
    if state.iter().any(|&s| s != (l, mu)) {
        return Err(Error::FloodingFailed { rounds });
    }
    Ok(FloodResult {
        l,
        mu,
        kappa: l / mu,
        rounds,
    })
}
