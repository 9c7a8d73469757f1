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

use std::path::PathBuf;

use thiserror::Error;

use crate::algorithms::IterRecord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("infeasible connectivity: {edges} edges cannot connect {nodes} nodes")]
    InfeasibleConnectivity { nodes: usize, edges: usize },

    #[error("graph is not connected")]
    Disconnected,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid mixing matrix: {0}")]
    InvalidMixing(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("empty data: {0}")]
    EmptyData(String),

    #[error("flooding did not reach agreement after {rounds} rounds")]
    FloodingFailed { rounds: usize },

    #[error(
        "centralized solver did not converge in {iterations} iterations (residual {residual:e})"
    )]
    NonConvergence {
        iterations: usize,
        residual: f64,
        best: Vec<f64>,
    },

    #[error("iterates diverged at iteration {iteration}")]
    Diverged {
        iteration: usize,
        trace: Vec<IterRecord>,
    },

    #[error("dual variable leaves range of the gossip square root (residual {0:e})")]
    DualRange(f64),

    #[error("PUDA condition violated: {0}")]
    PudaCondition(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("run {algorithm}/seed {seed}: {source}")]
    Run {
        algorithm: String,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
