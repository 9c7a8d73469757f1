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

//! Experiment orchestration: config parsing, runs, summaries and checks.

mod aggregate;
mod config;
mod experiment;
mod verify;

pub use aggregate::{aggregate_seeds, Aggregate, AggregateRow, MeanCi, AGGREGATE_HEADER};
pub use config::{
    parse_seed_list, AlgorithmKind, AlgorithmSpec, AlphaRule, ExperimentSpec, GraphSpec, KRule,
    KappaSpec, ProblemKind, ProblemSpec,
};
pub use experiment::{
    build_gossip, build_network, build_problem, run_all, run_experiment, run_file_name, run_one,
    spec_hash, summary_csv, trace_csv, ExperimentReport, RunOutcome, TraceRecord, Workbench,
    REFERENCE_TOL, SUMMARY_HEADER, TRACE_HEADER,
};
pub use verify::{
    gossip_checks, render_table, verify_suite, CheckResult, CONTRACTION_STEPS, KKT_TOL,
};
