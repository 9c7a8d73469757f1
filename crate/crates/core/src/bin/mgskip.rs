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

//! Command-line front end: `run`, `verify`, `topology` and `sweep`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mgskip::gossip::{chebyshev_eta, default_k, MultiGossipOperator};
use mgskip::harness::{render_table, run_experiment, verify_suite, ExperimentSpec, GraphSpec};

#[derive(Parser)]
#[command(
    name = "mgskip",
    version,
    about = "Decentralized composite optimization experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every algorithm and seed of an experiment.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the diagnostic checks and print a pass/fail table.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print ρ, K and η of a topology.
    Topology {
        #[arg(long, value_enum)]
        kind: TopologyKind,
        #[arg(long)]
        n: usize,
        /// Edge density for random graphs.
        #[arg(long, default_value_t = 0.5)]
        iota: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the edge list here.
        #[arg(long)]
        edges: Option<PathBuf>,
        /// Write the mixing matrix as CSV here.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Expand an experiment over a grid of communication probabilities and run it.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.5, 0.2, 0.1])]
        p: Vec<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TopologyKind {
    Ring,
    Random,
}

/// Bad input from the user: exit 2.
struct Usage(String);

fn load(path: &Path) -> Result<(ExperimentSpec, String), Usage> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Usage(format!("cannot read config {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let spec = ExperimentSpec::parse(&text, &path.display().to_string(), base)
        .map_err(|e| Usage(e.to_string()))?;
    Ok((spec, text))
}

fn execute(spec: &ExperimentSpec, text: &str, out: &Path) -> Result<ExitCode, Usage> {
    let report = match run_experiment(spec, text, out) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(1));
        }
    };
    print!("{}", report.summary);
    let failed = report.runs.iter().filter(|r| r.error.is_some()).count();
    eprintln!(
        "{} runs, {failed} failed; results in {}",
        report.runs.len(),
        out.display()
    );
    match report.into_result() {
        Ok(_) => Ok(ExitCode::SUCCESS),
        Err(e) => {
            eprintln!("error: {e}");
            Ok(ExitCode::from(1))
        }
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode, Usage> {
    match cmd {
        Command::Run { config, out } => {
            let (spec, text) = load(&config)?;
            execute(&spec, &text, &out)
        }
        Command::Sweep { config, out, p } => {
            let (spec, text) = load(&config)?;
            let grid = spec.expand_p_grid(&p).map_err(|e| Usage(e.to_string()))?;
            let stamp = format!("{text}\n# sweep p = {p:?}\n");
            execute(&grid, &stamp, &out)
        }
        Command::Verify { config } => {
            let (spec, _) = load(&config)?;
            match verify_suite(&spec) {
                Ok(checks) => {
                    print!("{}", render_table(&checks));
                    let failed = checks.iter().filter(|c| !c.ok).count();
                    println!("{} checks, {failed} failed", checks.len());
                    Ok(if failed == 0 {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    })
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Topology {
            kind,
            n,
            iota,
            seed,
            edges,
            weights,
        } => {
            let spec = match kind {
                TopologyKind::Ring => GraphSpec::Ring { n },
                TopologyKind::Random => GraphSpec::Random { n, iota, seed },
            };
            let (graph, w) =
                mgskip::harness::build_network(&spec).map_err(|e| Usage(e.to_string()))?;
            let rho = w.rho();
            let k = default_k(rho);
            let eta = chebyshev_eta(rho).map_err(|e| Usage(e.to_string()))?;
            let op =
                MultiGossipOperator::with_defaults(w.clone()).map_err(|e| Usage(e.to_string()))?;
            let r = op.spectral_report();
            println!("nodes {}", graph.n());
            println!("edges {}", graph.edge_count());
            println!("rho {rho:.6}");
            println!("K {k}");
            println!("eta {eta:.6}");
            println!("radius {:.6}", r.radius);
            if let Some(s) = r.sigma_min {
                println!("sigma_min {s:.6}");
            }
            let write = |path: &Path, res: mgskip::Result<()>| {
                res.map_err(|e| Usage(format!("cannot write {}: {e}", path.display())))
            };
            if let Some(p) = edges {
                write(&p, graph.write_edge_list(&p))?;
            }
            if let Some(p) = weights {
                write(&p, w.write_csv(&p))?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
