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

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const COIN_STREAM: u64 = 0x636f_696e; // "coin"

/// The single coin sequence every node shares.
///
/// Iteration `t` draws one uniform `u_t` and communicates iff `u_t < p`, so
/// runs that differ only in `p` see the same `u_t` sequence.
#[derive(Debug, Clone)]
pub struct CoinStream {
    rng: ChaCha8Rng,
    p: f64,
}

impl CoinStream {
    pub fn new(seed: u64, p: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(COIN_STREAM);
        CoinStream { rng, p }
    }

    pub fn next_uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn flip(&mut self) -> bool {
        self.next_uniform() < self.p
    }
}

impl Iterator for CoinStream {
    type Item = bool;

    fn next(&mut self) -> Option<bool> {
        Some(self.flip())
    }
}
