// Copyright 2026 The simon-mbqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command-line front end. Every command prints one canonical document:
//! JSON objects with sorted keys, CSV, DOT or a plain line.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::graph_state::{canonical_graph, canonical_resource, ResourceId};
use crate::noise::{calibrate_to_fidelity, Estimate, NoiseKind, NoiseSpec};
use crate::resource_compiler::{
    build_spnn_resource, compile_selection, run_spnn, spnn_counts, SpnnSelection,
};
use crate::simon::{
    bb_catalog, classical_baseline_sp22, classical_success_bound, classify, default_budget,
    expected_runs_to_nonzero, full_catalog, run_simon_mbqc, BbId, Period, SampleSet,
};
use crate::tomography::{tomography_report, TomographyConfig};

/// Environment variable supplying the default master seed.
pub const SEED_ENV: &str = "SIMON_MBQC_SEED";

/// Trials per calibration probe in `tomo --calibrate`.
const CALIBRATION_TRIALS: usize = 20_000;

#[derive(Debug, Parser)]
#[command(
    name = "simon-mbqc",
    version,
    about = "One-way simulation of Simon's problem on cluster states"
)]
pub struct Cli {
    /// Write the output here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a black box and report the y histogram.
    Run(RunArgs),
    /// Emit an SP_nn layout as DOT or its resource counts.
    Resource(ResourceArgs),
    /// Simulated stabilizer fidelity and witness of the linear cluster.
    Tomo(TomoArgs),
    /// Classical query baseline next to the quantum expected runs.
    Baseline(BaselineArgs),
    /// List catalogued black boxes.
    Catalog(CatalogArgs),
    /// Emit a measurement pattern as JSON.
    Pattern(PatternArgs),
}

#[derive(Debug, Args)]
pub struct SeedArg {
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Catalogued black box (s01, s10, s11, a8 … o8).
    #[arg(long, conflicts_with = "spnn", required_unless_present = "spnn")]
    pub bb: Option<BbId>,
    /// Compile an SP_nn selection on n query qubits instead.
    #[arg(long, requires = "period", value_parser = clap::value_parser!(u8).range(2..=4))]
    pub spnn: Option<u8>,
    /// Period of the SP_nn selection (bits or "one-to-one").
    #[arg(long)]
    pub period: Option<Period>,
    /// Ancilla relabeling mask; all zeros by default.
    #[arg(long)]
    pub flips: Option<BitString>,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub shots: u64,
    #[command(flatten)]
    pub seed: SeedArg,
    /// State noise, "white:P" or "depolarizing:Q".
    #[arg(long)]
    pub noise: Option<NoiseSpec>,
    /// Trials behind the expected-runs estimate of 2-1 black boxes.
    #[arg(long, default_value_t = 2_000)]
    pub trials: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Dot,
    Counts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct ResourceArgs {
    /// Query register size of the SP_nn layout.
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=64), required_unless_present = "named")]
    pub n: Option<u8>,
    /// A named resource (linear5, sp22-six, sp22-eight, spnn-N) instead.
    #[arg(long, conflicts_with = "n")]
    pub named: Option<ResourceId>,
    #[arg(long, value_enum, default_value_t = Emit::Counts)]
    pub emit: Emit,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct TomoArgs {
    #[arg(long, default_value_t = ResourceId::LinearCluster5)]
    pub resource: ResourceId,
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(long, conflicts_with = "calibrate")]
    pub noise: Option<NoiseSpec>,
    /// White noise calibrated to this fidelity.
    #[arg(long)]
    pub calibrate: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub resamples: usize,
    /// Error bars below zero that count as entanglement detection.
    #[arg(long, default_value_t = 1.0)]
    pub sigmas: f64,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    /// Register size of the Monte Carlo random-query strategy.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=12))]
    pub n: u8,
    /// Add the random-query Monte Carlo estimate.
    #[arg(long)]
    pub monte_carlo: bool,
    #[arg(long, default_value_t = 1)]
    pub queries: usize,
    #[arg(long, default_value_t = 20_000)]
    pub trials: usize,
    #[command(flatten)]
    pub seed: SeedArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CatalogArgs {
    #[arg(long)]
    pub bb: Option<BbId>,
    #[arg(long)]
    pub flips: Option<BitString>,
}

#[derive(Debug, Args)]
pub struct PatternArgs {
    #[arg(long, conflicts_with = "spnn", required_unless_present = "spnn")]
    pub bb: Option<BbId>,
    #[arg(long, requires = "period", value_parser = clap::value_parser!(u8).range(2..=64))]
    pub spnn: Option<u8>,
    #[arg(long)]
    pub period: Option<Period>,
    #[arg(long)]
    pub flips: Option<BitString>,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub bb: String,
    pub period: Period,
    pub flips: BitString,
    pub shots: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    pub counts: BTreeMap<String, usize>,
    pub probabilities: BTreeMap<String, f64>,
    pub solved_period: String,
    pub expected_runs_estimate: Option<Estimate>,
}

#[derive(Debug, Serialize)]
struct MonteCarloReport {
    n: u8,
    queries: usize,
    trials: usize,
    seed: u64,
    success: Estimate,
    bound: f64,
    respects_bound: bool,
}

#[derive(Debug, Serialize)]
struct BaselineReport {
    classical: String,
    classical_decimal: f64,
    quantum: Estimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    monte_carlo: Option<MonteCarloReport>,
}

fn zeros_or(flips: Option<BitString>, n: usize) -> BitString {
    flips.unwrap_or_else(|| BitString::zeros(n))
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn histogram_report(
    bb: String,
    period: Period,
    flips: BitString,
    samples: &SampleSet,
    args: &RunArgs,
    expected: Option<Estimate>,
) -> Result<RunReport> {
    let n = samples.n();
    let counts: BTreeMap<String, usize> = samples
        .counts()
        .into_iter()
        .map(|(y, c)| (y.to_string(), c))
        .collect();
    let probabilities = counts
        .iter()
        .map(|(y, &c)| (y.clone(), c as f64 / args.shots as f64))
        .collect();
    let solved = classify(samples.samples(), n, default_budget(n))?;
    Ok(RunReport {
        bb,
        period,
        flips,
        shots: args.shots,
        seed: args.seed.seed,
        noise: args.noise,
        counts,
        probabilities,
        solved_period: solved.to_string(),
        expected_runs_estimate: expected,
    })
}

fn cmd_run(args: &RunArgs) -> Result<String> {
    let shots = args.shots as usize;
    let seed = args.seed.seed;
    let report = match (args.bb, args.spnn, args.period) {
        (Some(id), _, _) => {
            let n = match id {
                BbId::Six(_) | BbId::Eight(_) => 2,
            };
            let instance = bb_catalog(id, zeros_or(args.flips, n))?;
            let samples = run_simon_mbqc(&instance, shots, seed, args.noise.as_ref())?;
            let expected = if instance.period.is_two_to_one() && args.noise.is_none() {
                Some(expected_runs_to_nonzero(
                    &instance,
                    args.trials,
                    seed,
                    None,
                )?)
            } else {
                None
            };
            histogram_report(
                id.to_string(),
                instance.period,
                instance.flips,
                &samples,
                args,
                expected,
            )?
        }
        (None, Some(n), Some(period)) => {
            let n = n as usize;
            let r = build_spnn_resource(n)?;
            let sel = SpnnSelection::new(period, zeros_or(args.flips, n))?;
            let samples = run_spnn(&r, &sel, shots, seed, args.noise.as_ref())?;
            histogram_report(format!("spnn-{n}"), period, sel.flips, &samples, args, None)?
        }
        _ => {
            return Err(Error::InvalidArgument(
                "pick --bb or --spnn with --period".into(),
            ))
        }
    };
    json(&report)
}

fn cmd_resource(args: &ResourceArgs) -> Result<String> {
    let (id, graph) = match (args.n, args.named) {
        (_, Some(id)) => (id, canonical_graph(id)?),
        (Some(n), None) => (
            ResourceId::Spnn(n as usize),
            build_spnn_resource(n as usize)?.graph,
        ),
        (None, None) => return Err(Error::InvalidArgument("pick --n or --named".into())),
    };
    match args.emit {
        Emit::Dot => Ok(graph.to_dot(&id.to_string().replace('-', "_"))),
        Emit::Counts => {
            let qubits = graph.num_vertices();
            let edges = graph.num_edges();
            match (args.format, id) {
                (Format::Json, ResourceId::Spnn(n)) => json(&spnn_counts(n)),
                (Format::Json, _) => json(&BTreeMap::from([("qubits", qubits), ("edges", edges)])),
                (Format::Csv, _) => Ok(format!("resource,qubits,edges\n{id},{qubits},{edges}\n")),
                (Format::Text, _) => Ok(format!("{qubits} qubits, {edges} edges\n")),
            }
        }
    }
}

fn cmd_tomo(args: &TomoArgs) -> Result<String> {
    if args.resource != ResourceId::LinearCluster5 {
        return Err(Error::InvalidArgument(format!(
            "the witness is defined on linear5, not {}",
            args.resource
        )));
    }
    let (graph, state) = canonical_resource::<f64>(args.resource)?;
    let seed = args.seed.seed;
    let noise = match (args.noise, args.calibrate) {
        (Some(spec), _) => Some(spec),
        (None, Some(target)) => {
            let p = calibrate_to_fidelity(
                &state,
                target,
                NoiseKind::WhiteNoise,
                CALIBRATION_TRIALS,
                seed,
            )?;
            Some(NoiseSpec::WhiteNoise { p })
        }
        (None, None) => None,
    };
    let cfg = TomographyConfig {
        shots: args.shots,
        seed,
        resamples: args.resamples,
        sigmas: args.sigmas,
        noise,
    };
    json(&tomography_report(&state, &graph, &cfg)?)
}

/// Mean runs to the first nonzero `y`, pooled over the six-qubit black boxes.
fn quantum_expected_runs(trials: usize, seed: u64) -> Result<Estimate> {
    let mut runs = Vec::new();
    for (k, id) in BbId::six().enumerate() {
        let instance = bb_catalog(id, BitString::zeros(2))?;
        let e = expected_runs_to_nonzero(&instance, trials, seed.wrapping_add(k as u64), None)?;
        runs.push(e);
    }
    let mean = runs.iter().map(|e| e.mean).sum::<f64>() / runs.len() as f64;
    let var =
        runs.iter().map(|e| e.std_error.powi(2)).sum::<f64>() / (runs.len() * runs.len()) as f64;
    Ok(Estimate {
        mean,
        std_error: var.sqrt(),
    })
}

fn cmd_baseline(args: &BaselineArgs) -> Result<String> {
    let seed = args.seed.seed;
    let classical = classical_baseline_sp22()?;
    let classical_decimal = *classical.numer() as f64 / *classical.denom() as f64;
    let quantum = quantum_expected_runs(args.trials, seed)?;
    let monte_carlo = if args.monte_carlo {
        let success = classical_success_bound(args.n as usize, args.queries, args.trials, seed)?;
        let bound = 0.5 + 0.5f64.powf(args.n as f64 / 2.0);
        Some(MonteCarloReport {
            n: args.n,
            queries: args.queries,
            trials: args.trials,
            seed,
            success,
            bound,
            respects_bound: success.mean <= bound + 3.0 * success.std_error,
        })
    } else {
        None
    };
    let report = BaselineReport {
        classical: classical.to_string(),
        classical_decimal,
        quantum,
        monte_carlo,
    };
    match args.format {
        Format::Json => json(&report),
        Format::Csv => Ok(format!(
            "strategy,expected_queries,std_error\nclassical,{classical_decimal},0\nquantum,{},{}\n",
            quantum.mean, quantum.std_error
        )),
        Format::Text => Ok(format!(
            "classical {classical} ({classical_decimal:.4}), quantum {:.4} ± {:.4}\n",
            quantum.mean, quantum.std_error
        )),
    }
}

fn cmd_catalog(args: &CatalogArgs) -> Result<String> {
    match args.bb {
        Some(id) => json(&bb_catalog(id, zeros_or(args.flips, 2))?),
        None => json(&full_catalog()?),
    }
}

fn cmd_pattern(args: &PatternArgs) -> Result<String> {
    let pattern = match (args.bb, args.spnn, args.period) {
        (Some(id), _, _) => bb_catalog(id, zeros_or(args.flips, 2))?.pattern,
        (None, Some(n), Some(period)) => {
            let n = n as usize;
            let sel = SpnnSelection::new(period, zeros_or(args.flips, n))?;
            compile_selection(&build_spnn_resource(n)?, &sel)?
        }
        _ => {
            return Err(Error::InvalidArgument(
                "pick --bb or --spnn with --period".into(),
            ))
        }
    };
    let mut s = pattern.to_json()?;
    s.push('\n');
    Ok(s)
}

/// Executes a parsed command and returns its document.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Resource(a) => cmd_resource(a),
        Command::Tomo(a) => cmd_tomo(a),
        Command::Baseline(a) => cmd_baseline(a),
        Command::Catalog(a) => cmd_catalog(a),
        Command::Pattern(a) => cmd_pattern(a),
    }
}

/// Parses `args`, runs the command and maps the result to an exit code:
/// 0 on success, 1 on a domain error, 2 on a usage error.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let written = execute(&cli).and_then(|doc| match &cli.output {
        Some(path) => std::fs::write(path, doc).map_err(Error::from),
        None => std::io::stdout()
            .lock()
            .write_all(doc.as_bytes())
            .map_err(Error::from),
    });
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("simon-mbqc").chain(args.iter().copied()))
    }

    fn run(args: &[&str]) -> Result<String> {
        execute(&parse(args).expect("valid arguments"))
    }

    #[test]
    fn resource_counts_line() {
        assert_eq!(
            run(&["resource", "--n", "2"]).unwrap(),
            "7 qubits, 6 edges\n"
        );
    }

    #[test]
    fn resource_dot_has_all_nodes() {
        let dot = run(&["resource", "--n", "4", "--emit", "dot"]).unwrap();
        assert!(dot.starts_with("graph "));
        assert_eq!(
            (1..=21)
                .filter(|v| dot.contains(&format!("  {v} [")))
                .count(),
            21
        );
    }

    #[test]
    fn resource_n1_is_a_usage_error() {
        let e = parse(&["resource", "--n", "1"]).unwrap_err();
        assert!(e.use_stderr());
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn unknown_bb_is_a_usage_error() {
        assert!(parse(&["run", "--bb", "zz"]).is_err());
    }

    #[test]
    fn run_s01_solves_the_period() {
        let out = run(&[
            "run", "--bb", "s01", "--shots", "2000", "--seed", "7", "--trials", "200",
        ])
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["solved_period"], "01");
        assert_eq!(v["counts"]["01"], 0);
        assert_eq!(v["counts"]["11"], 0);
        assert!(v["expected_runs_estimate"]["mean"].as_f64().unwrap() > 1.0);
    }

    #[test]
    fn run_one_to_one_is_suspected() {
        let out = run(&["run", "--bb", "a8", "--shots", "2000", "--seed", "3"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["solved_period"], "one-to-one suspected");
        assert!(v["expected_runs_estimate"].is_null());
    }

    #[test]
    fn run_spnn_selection() {
        let out = run(&["run", "--spnn", "2", "--period", "11", "--shots", "500"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["counts"]["01"], 0);
        assert_eq!(v["counts"]["10"], 0);
    }

    #[test]
    fn baseline_csv_has_two_rows() {
        let out = run(&["baseline", "--format", "csv", "--trials", "500"]).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("classical,2.66"));
    }

    #[test]
    fn baseline_monte_carlo_respects_bound() {
        let out = run(&["baseline", "--n", "3", "--monte-carlo", "--trials", "2000"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["classical"], "8/3");
        assert_eq!(v["monte_carlo"]["respects_bound"], true);
    }

    #[test]
    fn tomo_zero_shots_is_degenerate() {
        let out = run(&["tomo", "--shots", "0", "--resamples", "2"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["degenerate"], true);
    }

    #[test]
    fn tomo_rejects_other_resources() {
        assert!(run(&["tomo", "--resource", "sp22-six"]).is_err());
    }

    #[test]
    fn pattern_round_trips() {
        let out = run(&["pattern", "--bb", "s11", "--flips", "10"]).unwrap();
        let p = crate::mbqc_engine::Pattern::from_json(&out).unwrap();
        assert_eq!(p.flips().to_string(), "10");
    }
}
