use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use bqa_core::chip::{ChipSpec, CouplingGraph, DurationTable};
use bqa_core::circuit::{emit_circuit, parse_circuit, Circuit};
use bqa_core::clock::simulate;
use bqa_core::layout::Layout;
use bqa_core::report::RoutingReport;
use bqa_core::router::{route_with, verify_routed, InitialLayout, RouteError, RouterConfig, Strategy};
use bqa_core::sweep::{parse_values, run_sweep, write_csv, Axis, Family, SweepConfig, SweepError};
use bqa_core::workloads::{gen_benchmark, gen_random, Benchmark, RandomSpec};
use bqa_core::Execution;
use clap::{Args, Parser, Subcommand};

/// SWAP insertion and makespan simulation for coupling-constrained chips.
#[derive(Parser)]
#[command(name = "bqa", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Route one circuit and write the routed circuit plus a JSON report.
    Route(RouteArgs),
    /// Route many random circuits along one axis and write CSV rows.
    Sweep(SweepArgs),
    /// Check a routed circuit against its original and print the final mapping.
    Verify(VerifyArgs),
    /// Print the makespan of an already-routed circuit as JSON.
    Simulate(SimulateArgs),
    /// Write a random or benchmark circuit.
    Gen(GenArgs),
}

#[derive(Args)]
struct RouteArgs {
    /// Circuit file to route.
    #[arg(long = "in", value_name = "FILE", conflicts_with = "random", required_unless_present = "random")]
    input: Option<PathBuf>,
    /// Random circuit `qubits,gates,p_cx,seed` instead of a file.
    #[arg(long, value_name = "Q,G,P,SEED")]
    random: Option<RandomSpec>,
    /// `linear:N`, `ladder:N`, `square:RxC` or a chip file.
    #[arg(long)]
    chip: String,
    #[arg(long, default_value_t = RouterConfig::default().lookahead)]
    lookahead: usize,
    /// Overrides the chip's SWAP/CNOT time ratio.
    #[arg(long)]
    swap_factor: Option<f64>,
    #[arg(long, default_value = "bqa")]
    strategy: Strategy,
    /// Comma-separated physical qubit for each logical qubit.
    #[arg(long, value_delimiter = ',')]
    initial_layout: Option<Vec<usize>>,
    /// Routed circuit output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report output; stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// One of p_cx, gates, qubits, topology.
    #[arg(long)]
    axis: String,
    /// `start:end:step` or a comma-separated list.
    #[arg(long, alias = "range")]
    values: String,
    /// Seeds per axis value, counting up from --seed.
    #[arg(long, default_value_t = 1)]
    repeats: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "bqa,greedy")]
    strategies: Vec<Strategy>,
    #[arg(long, default_value_t = 16)]
    qubits: usize,
    #[arg(long, default_value_t = 950)]
    gates: usize,
    #[arg(long, default_value_t = 0.5)]
    p_cx: f64,
    /// Chip family for axes other than topology.
    #[arg(long, default_value = "linear")]
    family: String,
    #[arg(long, default_value_t = RouterConfig::default().lookahead)]
    lookahead: usize,
    /// Run repeats one at a time.
    #[arg(long)]
    sequential: bool,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    original: PathBuf,
    #[arg(long)]
    routed: PathBuf,
    #[arg(long)]
    chip: String,
    #[arg(long, value_delimiter = ',')]
    initial_layout: Option<Vec<usize>>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Circuit on physical qubits; every two-qubit gate must sit on an edge.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long)]
    chip: String,
    #[arg(long)]
    swap_factor: Option<f64>,
}

#[derive(Args)]
struct GenArgs {
    /// Random circuit `qubits,gates,p_cx,seed`.
    #[arg(long, value_name = "Q,G,P,SEED", conflicts_with = "bench", required_unless_present = "bench")]
    random: Option<RandomSpec>,
    /// One of and, or, grover, qv.
    #[arg(long)]
    bench: Option<String>,
    #[arg(long, requires = "bench")]
    qubits: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Exit 1 for bad input, 2 for broken invariants.
enum Failure {
    Input(String),
    Internal(String),
}

impl Failure {
    fn input(e: impl std::fmt::Display) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<RouteError> for Failure {
    fn from(e: RouteError) -> Self {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Route { ref source, .. } if source.is_internal() => Failure::Internal(e.to_string()),
            e => Failure::Input(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_or_stdout(path: Option<&Path>, text: &str) -> CmdResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(Failure::input),
    }
}

fn load_circuit(path: &Path) -> Result<Circuit, Failure> {
    parse_circuit(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_chip(spec: &str, swap_factor: Option<f64>) -> Result<(CouplingGraph, DurationTable), Failure> {
    let (graph, dur) = spec.parse::<ChipSpec>().and_then(|s| s.load()).map_err(|e| Failure::Input(format!("chip `{spec}`: {e}")))?;
    let dur = match swap_factor {
        Some(f) => dur.with_swap_factor(f).map_err(Failure::input)?,
        None => dur,
    };
    Ok((graph, dur))
}

fn initial_layout(placement: Option<Vec<usize>>) -> InitialLayout {
    placement.map_or(InitialLayout::Identity, InitialLayout::Explicit)
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(|e| Failure::Internal(e.to_string()))
}

fn cmd_route(a: RouteArgs) -> CmdResult {
    let (source, circuit) = match (&a.input, a.random) {
        (Some(path), _) => (path.display().to_string(), load_circuit(path)?),
        (None, Some(spec)) => (format!("random:{spec}"), gen_random(&spec).map_err(Failure::input)?),
        (None, None) => unreachable!("clap requires --in or --random"),
    };
    let (chip, dur) = load_chip(&a.chip, a.swap_factor)?;
    let cfg = RouterConfig {
        lookahead: a.lookahead,
        swap_factor: a.swap_factor,
        initial_layout: initial_layout(a.initial_layout),
        ..RouterConfig::default()
    };
    let started = Instant::now();
    let routed = route_with(a.strategy, &circuit, &chip, &dur, &cfg)?;
    let route_ms = started.elapsed().as_secs_f64() * 1e3;

    if let Some(out) = &a.out {
        write_or_stdout(Some(out), &emit_circuit(&routed.circuit))?;
    }
    let report = RoutingReport::new(&source, &circuit, &a.chip, a.strategy, &cfg, &dur, &routed, route_ms);
    write_or_stdout(a.report.as_deref(), &to_json(&report)?)
}

fn cmd_sweep(a: SweepArgs) -> CmdResult {
    let axis: Axis = a.axis.parse()?;
    let mut cfg = SweepConfig::new(axis, parse_values(axis, &a.values)?);
    cfg.qubits = a.qubits;
    cfg.gates = a.gates;
    cfg.p_cx = a.p_cx;
    cfg.family = a.family.parse::<Family>()?;
    cfg.seeds = (a.seed..a.seed + a.repeats).collect();
    cfg.strategies = a.strategies;
    cfg.router.lookahead = a.lookahead;
    let exec = if a.sequential { Execution::Sequential } else { Execution::Parallel };
    let rows = run_sweep(&cfg, exec)?;
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf)?;
    write_or_stdout(a.out.as_deref(), &String::from_utf8(buf).map_err(|e| Failure::Internal(e.to_string()))?)
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let original = load_circuit(&a.original)?;
    let routed = load_circuit(&a.routed)?;
    let (chip, dur) = load_chip(&a.chip, None)?;
    let layout = initial_layout(a.initial_layout).build(chip.num_qubits()).map_err(Failure::input)?;
    let fin = verify_routed(&original, &routed, &layout, &chip).map_err(|v| Failure::Input(format!("verify failed: {v}")))?;
    let makespan = simulate(&routed, &chip, &dur, &Layout::identity(chip.num_qubits())).map_err(Failure::input)?.makespan_us;
    let out = serde_json::json!({ "ok": true, "final_mapping": fin.phys2log(), "makespan_us": makespan });
    write_or_stdout(None, &to_json(&out)?)
}

fn cmd_simulate(a: SimulateArgs) -> CmdResult {
    let circuit = load_circuit(&a.input)?;
    let (chip, dur) = load_chip(&a.chip, a.swap_factor)?;
    let report = simulate(&circuit, &chip, &dur, &Layout::identity(chip.num_qubits())).map_err(Failure::input)?;
    write_or_stdout(None, &to_json(&report)?)
}

fn cmd_gen(a: GenArgs) -> CmdResult {
    let circuit = match (a.random, &a.bench) {
        (Some(spec), _) => gen_random(&spec).map_err(Failure::input)?,
        (None, Some(name)) => {
            let bench: Benchmark = name.parse().map_err(Failure::input)?;
            let qubits = a.qubits.ok_or_else(|| Failure::Input("--bench needs --qubits".into()))?;
            gen_benchmark(bench, qubits, a.seed).map_err(Failure::input)?
        }
        (None, None) => unreachable!("clap requires --random or --bench"),
    };
    write_or_stdout(a.out.as_deref(), &emit_circuit(&circuit))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.cmd {
        Cmd::Route(a) => cmd_route(a),
        Cmd::Sweep(a) => cmd_sweep(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Simulate(a) => cmd_simulate(a),
        Cmd::Gen(a) => cmd_gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}
