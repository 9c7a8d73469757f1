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

//! Per-iteration mean and 95% confidence interval across seeds.

use std::fmt::Write as _;

use crate::algorithms::IterRecord;
use crate::{Error, Result};

const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCi {
    pub mean: f64,
    /// Half-width of the normal-approximation interval.
    pub half_width: f64,
}

impl MeanCi {
    fn of(values: &[f64]) -> Self {
        if values.iter().all(|&v| v == values[0]) {
            return MeanCi {
                mean: values[0],
                half_width: 0.0,
            };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        MeanCi {
            mean,
            half_width: Z95 * (var / n).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub t: usize,
    pub rel_err: MeanCi,
    /// Present only when every seed recorded `Ψ` at this index.
    pub psi: Option<MeanCi>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub seeds: usize,
    pub rows: Vec<AggregateRow>,
    /// Traces had different lengths and were cut to the shortest.
    pub ragged: bool,
}

pub const AGGREGATE_HEADER: &str = "t,seeds,ragged,rel_err_mean,rel_err_ci,psi_mean,psi_ci";

impl Aggregate {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(AGGREGATE_HEADER);
        out.push('\n');
        for r in &self.rows {
            let (pm, pc) = r
                .psi
                .map(|p| (p.mean.to_string(), p.half_width.to_string()))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{pm},{pc}",
                r.t,
                self.seeds,
                u8::from(self.ragged),
                r.rel_err.mean,
                r.rel_err.half_width
            );
        }
        out
    }
}

/// Aligns traces by iteration index, cutting to the shortest.
pub fn aggregate_seeds(traces: &[&[IterRecord]]) -> Result<Aggregate> {
    if traces.is_empty() {
        return Err(Error::EmptyData("no traces to aggregate".into()));
    }
    let len = traces.iter().map(|t| t.len()).min().unwrap_or(0);
    let ragged = traces.iter().any(|t| t.len() != len);
    let rows = (0..len)
        .map(|i| {
            let errs: Vec<f64> = traces.iter().map(|t| t[i].rel_err).collect();
            let psis: Option<Vec<f64>> = traces.iter().map(|t| t[i].psi).collect();
            AggregateRow {
                t: traces[0][i].t,
                rel_err: MeanCi::of(&errs),
                psi: psis.map(|v| MeanCi::of(&v)),
            }
        })
        .collect();
    Ok(Aggregate {
        seeds: traces.len(),
        rows,
        ragged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(t: usize, e: f64, psi: Option<f64>) -> IterRecord {
        IterRecord {
            t,
            theta: true,
            comm_rounds: t as u64,
            grad_evals: t as u64,
            rel_err: e,
            psi,
        }
    }

    #[test]
    fn single_seed_is_identity() {
        let a = vec![rec(1, 0.5, Some(2.0)), rec(2, 0.25, Some(1.0))];
        let g = aggregate_seeds(&[&a]).unwrap();
        assert!(!g.ragged);
        assert_eq!(
            g.rows[1].rel_err,
            MeanCi {
                mean: 0.25,
                half_width: 0.0
            }
        );
        assert_eq!(g.rows[0].psi.unwrap().mean, 2.0);
    }

    #[test]
    fn identical_seeds_have_zero_width() {
        let a = vec![rec(1, 0.3, None), rec(2, 0.1, None)];
        let g = aggregate_seeds(&[&a, &a, &a]).unwrap();
        assert!(g
            .rows
            .iter()
            .all(|r| r.rel_err.half_width == 0.0 && r.psi.is_none()));
    }

    #[test]
    fn ragged_cut_to_shortest() {
        let a = vec![rec(1, 1.0, None), rec(2, 3.0, None), rec(3, 1.0, None)];
        let b = vec![rec(1, 3.0, None), rec(2, 1.0, None)];
        let g = aggregate_seeds(&[&a, &b]).unwrap();
        assert!(g.ragged);
        assert_eq!(g.rows.len(), 2);
        assert_eq!(g.rows[0].rel_err.mean, 2.0);
        // sd = √2, n = 2.
        assert!((g.rows[0].rel_err.half_width - Z95).abs() < 1e-12);
        assert!(g.to_csv().lines().nth(1).unwrap().starts_with("1,2,1,2,"));
    }

    #[test]
    fn empty_is_error() {
        assert!(aggregate_seeds(&[]).is_err());
    }
}
