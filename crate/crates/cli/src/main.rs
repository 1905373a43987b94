//! `bandstop` command-line workbench.
//!
//! Exit codes: 0 success, 1 I/O or parse error, 2 infeasible design,
//! 3 analysis failure (including a failed `compare`).

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod compare;

use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use bandstop::io::quantity;
use bandstop::topology::TopologyId;
use bandstop::{Error, ErrorClass};
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "bandstop",
    version,
    about = "Dual-mode tunable bandstop filter workbench"
)]
struct Cli {
    /// More log output (-v info, -vv debug). RUST_LOG overrides.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize element values and write a design file.
    Synth(SynthArgs),
    /// Sweep a design and write a Touchstone .s2p file.
    Simulate(SimulateArgs),
    /// Print stopband metrics of a Touchstone file.
    Metrics(MetricsArgs),
    /// Fit (C_a, C_b) to a centre frequency and bandwidth target.
    Calibrate(CalibrateArgs),
    /// Write a tuning curve over C_a values or varactor bias points.
    Tune(TuneArgs),
    /// Compare two Touchstone files in dB.
    Compare(CompareArgs),
}

fn hz(s: &str) -> Result<f64, String> {
    quantity::parse_positive(s, "Hz").map_err(|e| e.to_string())
}

fn farad(s: &str) -> Result<f64, String> {
    quantity::parse_positive(s, "F").map_err(|e| e.to_string())
}

fn ohm(s: &str) -> Result<f64, String> {
    quantity::parse_positive(s, "ohm").map_err(|e| e.to_string())
}

fn ohm_or_zero(s: &str) -> Result<f64, String> {
    let v = quantity::parse(s, "ohm").map_err(|e| e.to_string())?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("`{s}` must be >= 0"))
    }
}

fn unitless(s: &str) -> Result<f64, String> {
    quantity::parse(s, "").map_err(|e| e.to_string())
}

fn topology(s: &str) -> Result<TopologyId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Centre frequency, e.g. 0.83GHz.
    #[arg(long, value_parser = hz)]
    f0: f64,
    /// Fractional stopband bandwidth, e.g. 0.18.
    #[arg(long, value_parser = unitless)]
    fbw: f64,
    #[arg(long, default_value_t = 2)]
    order: usize,
    #[arg(long, value_parser = ohm, default_value = "50")]
    z0: f64,
    /// Series capacitor C_C, e.g. 2.2pF.
    #[arg(long, value_parser = farad)]
    cc: f64,
    /// Topology to record; by default the practical variants are simulated
    /// and the best one is chosen.
    #[arg(long, value_parser = topology)]
    topology: Option<TopologyId>,
    /// Design file to write.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LossArgs {
    /// Series resistance per varactor.
    #[arg(long, value_parser = ohm_or_zero)]
    rs: Option<f64>,
    /// Inductor quality factor at f0.
    #[arg(long, value_parser = unitless)]
    q: Option<f64>,
    /// Add bias feed resistors and port DC blocks.
    #[arg(long)]
    bias_network: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    design: PathBuf,
    /// Override the design's topology.
    #[arg(long, value_parser = topology)]
    topology: Option<TopologyId>,
    /// Start frequency (default 0.4 f0).
    #[arg(long, value_parser = hz)]
    fmin: Option<f64>,
    /// Stop frequency (default 1.6 f0).
    #[arg(long, value_parser = hz)]
    fmax: Option<f64>,
    #[arg(long, default_value_t = 801)]
    points: usize,
    #[command(flatten)]
    loss: LossArgs,
    /// Touchstone file to write.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    s2p: PathBuf,
    /// Print JSON instead of a table.
    #[arg(long)]
    json: bool,
    #[arg(long, value_parser = unitless, default_value = "0.2")]
    margin: f64,
    /// Minimum depth of a listed mode (dB).
    #[arg(long, value_parser = unitless, default_value = "20")]
    mode_threshold: f64,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    #[arg(long)]
    design: PathBuf,
    /// Target centre frequency (default: the design's f0).
    #[arg(long, value_parser = hz)]
    f0: Option<f64>,
    /// Target FBW (default: the design's).
    #[arg(long, value_parser = unitless)]
    fbw: Option<f64>,
    #[arg(long, value_parser = unitless, default_value = "0.25")]
    weight_fbw: f64,
    /// Search box is [c/factor, c*factor] around the start point unless
    /// explicit bounds are given.
    #[arg(long, value_parser = unitless, default_value = "3")]
    bounds_factor: f64,
    #[arg(long, value_parser = farad)]
    ca_min: Option<f64>,
    #[arg(long, value_parser = farad)]
    ca_max: Option<f64>,
    #[arg(long, value_parser = farad)]
    cb_min: Option<f64>,
    #[arg(long, value_parser = farad)]
    cb_max: Option<f64>,
    /// Output design file (default: rewrite the input).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum CbRuleArg {
    Fixed,
    Recalibrated,
}

#[derive(Debug, Args)]
struct TuneArgs {
    #[arg(long)]
    design: PathBuf,
    #[arg(long, value_parser = farad, requires = "ca_stop", conflicts_with_all = ["bias", "reference_cases"])]
    ca_start: Option<f64>,
    #[arg(long, value_parser = farad, requires = "ca_start")]
    ca_stop: Option<f64>,
    #[arg(long, default_value_t = 41)]
    points: usize,
    #[arg(long, value_enum, default_value_t = CbRuleArg::Recalibrated)]
    cb_rule: CbRuleArg,
    /// FBW held by the recalibrated rule (default: the design's).
    #[arg(long, value_parser = unitless)]
    fbw: Option<f64>,
    /// Bias points `v1:v2` separated by commas, e.g. `15:35,8.5:30`.
    #[arg(long, conflicts_with = "reference_cases")]
    bias: Option<String>,
    /// Use the five reference bias cases.
    #[arg(long)]
    reference_cases: bool,
    /// Varactor profile (JSON); defaults to the design's profile.
    #[arg(long, conflicts_with = "placeholder_varactor")]
    varactor: Option<PathBuf>,
    /// Use the built-in, non-authoritative placeholder profile.
    #[arg(long)]
    placeholder_varactor: bool,
    #[command(flatten)]
    loss: LossArgs,
    /// CSV file to write.
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
    /// Pass threshold for the largest |S21| and |S11| difference in dB.
    #[arg(long, value_parser = unitless, default_value = "0.1")]
    tol_db: f64,
}

pub(crate) fn color() -> bool {
    std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty()) && std::io::stderr().is_terminal()
}

fn exit_code(e: &Error) -> u8 {
    match e.class() {
        ErrorClass::Input => 1,
        ErrorClass::Infeasible => 2,
        ErrorClass::Analysis => 3,
    }
}

fn main() -> ExitCode {
    let cmd = <Cli as clap::CommandFactory>::command().color(if color() {
        clap::ColorChoice::Auto
    } else {
        clap::ColorChoice::Never
    });
    let cli = match cmd
        .try_get_matches()
        .and_then(|m| <Cli as clap::FromArgMatches>::from_arg_matches(&m))
    {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .write_style(if color() {
            env_logger::WriteStyle::Auto
        } else {
            env_logger::WriteStyle::Never
        })
        .init();

    let result = match cli.command {
        Command::Synth(a) => commands::synth(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Metrics(a) => commands::metrics(a),
        Command::Calibrate(a) => commands::calibrate(a),
        Command::Tune(a) => commands::tune(a),
        Command::Compare(a) => compare::run(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            if color() {
                eprintln!("\x1b[31merror:\x1b[0m {e}");
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
