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

//! Plain-CSV problem bundles: one `meta.csv` plus one file per matrix.
//!
//! ```text
//! meta.csv            key,value rows: n, d, reg, reg_weight, node_<i> = kind
//! node_<i>_a.csv      least squares A_i (row per equation)
//! node_<i>_b.csv      least squares b_i (one value per line)
//! node_<i>_x.csv      logistic features (row per sample)
//! node_<i>_y.csv      logistic labels; the first line is gamma1
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::{LeastSquaresLoss, LocalLoss, LogisticLoss, ProblemInstance, Regularizer, SmoothLoss};
use crate::{Error, Result};

fn matrix_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

fn column_csv(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(|v| format!("{v:e}\n")).collect()
}

fn write(path: &Path, text: String) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

fn parse_rows(path: &Path, cols: usize) -> Result<DMatrix<f64>> {
    let text = read(path)?;
    let mut data = Vec::new();
    let mut rows = 0;
    for (k, line) in text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
    {
        let cells: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| parse_err(path, k + 1, "non-numeric cell"))?;
        if cells.len() != cols {
            return Err(parse_err(path, k + 1, format!("expected {cols} columns")));
        }
        data.extend(cells);
        rows += 1;
    }
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

fn parse_column(path: &Path) -> Result<Vec<f64>> {
    Ok(parse_rows(path, 1)?.iter().copied().collect())
}

pub fn write_bundle(p: &ProblemInstance, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut meta = String::from("key,value\n");
    let _ = writeln!(meta, "n,{}", p.n());
    let _ = writeln!(meta, "d,{}", p.dim());
    match p.reg() {
        Regularizer::Zero => meta.push_str("reg,zero\n"),
        Regularizer::L1 { weight } => {
            let _ = writeln!(meta, "reg,l1\nreg_weight,{weight:e}");
        }
    }
    for (i, f) in p.losses().iter().enumerate() {
        match f {
            LocalLoss::LeastSquares(ls) => {
                let _ = writeln!(meta, "node_{i},least_squares");
                write(&dir.join(format!("node_{i}_a.csv")), matrix_csv(ls.a()))?;
                write(
                    &dir.join(format!("node_{i}_b.csv")),
                    column_csv(ls.b().iter().copied()),
                )?;
            }
            LocalLoss::Logistic(lg) => {
                let _ = writeln!(meta, "node_{i},logistic");
                write(
                    &dir.join(format!("node_{i}_x.csv")),
                    matrix_csv(lg.features()),
                )?;
                let col = std::iter::once(lg.gamma1()).chain(lg.labels().iter().copied());
                write(&dir.join(format!("node_{i}_y.csv")), column_csv(col))?;
            }
        }
    }
    write(&dir.join("meta.csv"), meta)
}

pub fn read_bundle(dir: &Path) -> Result<ProblemInstance> {
    let meta_path = dir.join("meta.csv");
    let meta: BTreeMap<String, String> = read(&meta_path)?
        .lines()
        .skip(1)
        .filter_map(|l| l.split_once(','))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect();
    let get = |key: &str| {
        meta.get(key)
            .ok_or_else(|| parse_err(&meta_path, 0, format!("missing key `{key}`")))
    };
    let num = |key: &str| -> Result<usize> {
        get(key)?
            .parse()
            .map_err(|_| parse_err(&meta_path, 0, format!("bad `{key}`")))
    };
    let n = num("n")?;
    let d = num("d")?;
    let reg = match get("reg")?.as_str() {
        "zero" => Regularizer::Zero,
        "l1" => Regularizer::L1 {
            weight: get("reg_weight")?
                .parse()
                .map_err(|_| parse_err(&meta_path, 0, "bad `reg_weight`"))?,
        },
        other => return Err(parse_err(&meta_path, 0, format!("unknown reg `{other}`"))),
    };
    let mut losses = Vec::with_capacity(n);
    for i in 0..n {
        let loss: LocalLoss = match get(&format!("node_{i}"))?.as_str() {
            "least_squares" => {
                let a = parse_rows(&dir.join(format!("node_{i}_a.csv")), d)?;
                let b = DVector::from_vec(parse_column(&dir.join(format!("node_{i}_b.csv")))?);
                LeastSquaresLoss::new(a, b).into()
            }
            "logistic" => {
                let x = parse_rows(&dir.join(format!("node_{i}_x.csv")), d)?;
                let mut y = parse_column(&dir.join(format!("node_{i}_y.csv")))?;
                if y.is_empty() {
                    return Err(parse_err(
                        &meta_path,
                        0,
                        format!("node {i}: missing gamma1"),
                    ));
                }
                let gamma1 = y.remove(0);
                LogisticLoss::new(x, y, gamma1).into()
            }
            other => return Err(parse_err(&meta_path, 0, format!("unknown loss `{other}`"))),
        };
        debug_assert_eq!(loss.dim(), d);
        losses.push(loss);
    }
    ProblemInstance::new(losses, reg)
}
