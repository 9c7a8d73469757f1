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

//! Decentralized composite optimization with probabilistic multi-gossip
//! communication skipping.
//!
//! The crate is organised bottom-up:
//!
//! - [`topology`]: graphs, Metropolis–Hastings mixing matrices and spectral gaps.
//! - [`gossip`]: the Chebyshev-accelerated multi-round gossip operator.
//! - [`problems`]: local smooth losses, proximable regularizers, synthetic
//!   generators, the LIBSVM loader, constant flooding and a centralized solver.
//! - [`algorithms`]: the MG-Skip iteration, the PUDA baseline engine and the
//!   fixed-point / Lyapunov diagnostics.
//! - [`harness`]: configuration parsing, experiment orchestration and CSV output.

pub mod algorithms;
pub mod error;
pub mod gossip;
pub mod harness;
pub mod linalg;
pub mod problems;
pub mod topology;

pub use error::{Error, Result};
