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

//! LIBSVM sparse text format: `label idx:val idx:val ...`, 1-based indices.

use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    /// `±1`.
    pub label: f64,
    /// `(0-based index, value)` pairs in file order.
    pub features: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NodeData {
    pub samples: Vec<Sample>,
}

impl NodeData {
    pub fn dense_features(&self, dim: usize) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.samples.len(), dim);
        for (j, s) in self.samples.iter().enumerate() {
            for &(k, v) in &s.features {
                a[(j, k)] = v;
            }
        }
        a
    }

    pub fn labels(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.label).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedDataset {
    /// Largest feature index seen.
    pub dim: usize,
    pub nodes: Vec<NodeData>,
}

/// Parses LIBSVM text. Returns the samples and the inferred dimension.
/// Labels `0` are mapped to `−1`; anything outside `{−1, 0, +1}` is rejected.
pub fn parse_libsvm(text: &str, source: &str) -> Result<(Vec<Sample>, usize)> {
    let mut samples = Vec::new();
    let mut dim = 0;
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let err = |msg: String| Error::Parse {
            path: source.to_string(),
            line: line_no,
            msg,
        };
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a token");
        let label: f64 = label_tok
            .parse()
            .map_err(|_| err(format!("bad label `{label_tok}`")))?;
        let label = if label == 1.0 {
            1.0
        } else if label == -1.0 || label == 0.0 {
            -1.0
        } else {
            return Err(err(format!("unsupported label `{label_tok}`")));
        };
        let mut features = Vec::new();
        for tok in tokens {
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| err(format!("expected idx:val, got `{tok}`")))?;
            let idx: usize = idx.parse().map_err(|_| err(format!("bad index `{idx}`")))?;
            if idx == 0 {
                return Err(err("indices are 1-based".into()));
            }
            let val: f64 = val.parse().map_err(|_| err(format!("bad value `{val}`")))?;
            dim = dim.max(idx);
            features.push((idx - 1, val));
        }
        samples.push(Sample { label, features });
    }
    if samples.is_empty() {
        return Err(Error::EmptyData(format!("{source} contains no samples")));
    }
    Ok((samples, dim))
}

/// Loads a LIBSVM file and splits it over `n` nodes in contiguous blocks
/// after a seeded shuffle.
pub fn load_libsvm(path: &Path, n: usize, seed: u64) -> Result<PartitionedDataset> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let (samples, dim) = parse_libsvm(&text, &path.display().to_string())?;
    partition(samples, dim, n, seed)
}

pub(crate) fn partition(
    mut samples: Vec<Sample>,
    dim: usize,
    n: usize,
    seed: u64,
) -> Result<PartitionedDataset> {
    if n == 0 {
        return Err(Error::InvalidSize("need at least one node".into()));
    }
    if samples.len() < n {
        return Err(Error::EmptyData(format!(
            "{} samples cannot cover {n} nodes",
            samples.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    samples.shuffle(&mut rng);
    let total = samples.len();
    let mut it = samples.into_iter();
    let nodes = (0..n)
        .map(|i| {
            let take = (i + 1) * total / n - i * total / n;
            NodeData {
                samples: it.by_ref().take(take).collect(),
            }
        })
        .collect();
    Ok(PartitionedDataset { dim, nodes })
}
