use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use poq_core::harness::{csv_string, estimate_gap, run_trials, AdversaryEntry};
use poq_core::machines::MachineFile;
use poq_core::markov::{analyze, testbed};
use poq_core::protocols::clock::{default_grid, make_clock_on, CLOCK_SIGMA};
use poq_core::protocols::freivalds::calibrate;
use poq_core::protocols::{min_f1, ProtocolId, ProtocolParams, ProverChoice};
use poq_core::{pad, Rational};

#[derive(Parser)]
#[command(name = "poq", version, about = "Interactive-proof simulation laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run N interactions of a protocol and write one CSV row.
    RunProtocol {
        #[arg(long)]
        protocol: ProtocolId,
        /// Full input string (padded protocols expect `core⋆…`; `*` is accepted for ⋆).
        #[arg(long, conflicts_with = "core", required_unless_present = "core")]
        input: Option<String>,
        /// Core string, padded automatically for padded protocols.
        #[arg(long)]
        core: Option<String>,
        #[arg(long, default_value = "honest")]
        prover: ProverChoice,
        /// TOML parameter file; defaults to the protocol's preset.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        step_cap: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Calibrate the random-walk clock for c·n^t.
    ClockCalibrate {
        #[arg(long)]
        c: u64,
        #[arg(long)]
        t: u32,
        #[arg(long, default_value_t = 0.02)]
        eps: f64,
        /// Comma-separated input lengths checked by the exact DP.
        #[arg(long, value_delimiter = ',')]
        n_grid: Vec<usize>,
    },
    /// Minimise f(1) over per-round truth probabilities.
    FAnalyze {
        #[arg(long)]
        p: Rational,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 21)]
        grid: usize,
    },
    /// Estimate the success gap over a set of cores and an adversary library.
    EstimateGap {
        #[arg(long)]
        protocol: ProtocolId,
        /// Comma-separated cores; padded for padded protocols.
        #[arg(long, value_delimiter = ',')]
        cores: Vec<String>,
        /// Comma-separated adversaries, each optionally `name@maxlen`.
        #[arg(long, value_delimiter = ',', default_value = "no-answer,random-answer,always-lying")]
        adversaries: Vec<String>,
        #[arg(long, default_value = "honest")]
        quantum: ProverChoice,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.99)]
        confidence: f64,
        /// TOML report.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-cell CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Build, rewire and absorb the megastate chain of a PTM on x·y.
    AnalyzeChain {
        /// JSON machine file.
        #[arg(long, conflicts_with = "testbed", required_unless_present = "testbed")]
        machine: Option<PathBuf>,
        /// Built-in test machine instead of a file.
        #[arg(long)]
        testbed: Option<String>,
        #[arg(long, default_value = "")]
        x: String,
        #[arg(long, default_value = "")]
        y: String,
        #[arg(long, default_value_t = 2)]
        work_cells: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smallest d_F reaching a target error for fixed c_F.
    FreivaldsCalibrate {
        #[arg(long, default_value_t = 6)]
        c: u32,
        #[arg(long, default_value_t = 0.1)]
        target: f64,
        #[arg(long, default_value_t = 20)]
        n_max: u32,
        #[arg(long, default_value_t = 12)]
        d_max: u32,
    },
}

fn load_params(protocol: ProtocolId, path: Option<&Path>) -> Result<ProtocolParams> {
    match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(ProtocolParams::from_toml(&text)?)
        }
        None => Ok(match protocol {
            ProtocolId::SupersafeEq => ProtocolParams::supersafe(Rational::new(1, 4), 5),
            ProtocolId::Square => ProtocolParams::square(),
            _ => ProtocolParams::padded(),
        }),
    }
}

fn instance_of(protocol: ProtocolId, core: &str) -> Result<String> {
    Ok(if protocol.is_padded() { pad(core)?.render() } else { core.to_string() })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::RunProtocol { protocol, input, core, prover, params, trials, seed, step_cap, out } => {
            let mut params = load_params(protocol, params.as_deref())?;
            if let Some(cap) = step_cap {
                params.step_cap = cap;
            }
            let input = match (input, core) {
                (Some(i), _) => poq_core::tape::canonical_str(&i),
                (None, Some(c)) => instance_of(protocol, &c)?,
                (None, None) => bail!("one of --input or --core is required"),
            };
            let b = run_trials(protocol, &input, &prover, &params, trials, seed)?;
            eprintln!(
                "{protocol} {prover}: accept {} reject {} timeout {} of {trials} (mean {:.1} verifier steps)",
                b.accept, b.reject, b.timeout, b.steps_mean
            );
            emit(out.as_deref(), &csv_string([&b])?)?;
        }
        Command::ClockCalibrate { c, t, eps, n_grid } => {
            let grid = if n_grid.is_empty() { default_grid(t) } else { n_grid };
            let spec = make_clock_on(c, t, eps, &grid, &CLOCK_SIGMA)?;
            print!("{}", toml_string(&spec.calibration)?);
        }
        Command::FAnalyze { p, m, grid } => {
            let r = min_f1(&p, m, grid)?;
            println!("f1_min = \"{}\"", r.f1_min);
            println!("f1_min_decimal = {}", r.f1_min.to_f64());
            println!("one_minus_p = \"{}\"", Rational::one() - p.clone());
            println!("t_star = [{}]", r.t_star.iter().map(|t| format!("\"{t}\"")).collect::<Vec<_>>().join(", "));
        }
        Command::EstimateGap { protocol, cores, adversaries, quantum, params, trials, seed, confidence, out, csv } => {
            if cores.is_empty() {
                bail!("--cores needs at least one core");
            }
            let params = load_params(protocol, params.as_deref())?;
            let w = cores.iter().map(|c| instance_of(protocol, c)).collect::<Result<Vec<_>>>()?;
            let adv = adversaries.iter().map(|a| a.parse::<AdversaryEntry>()).collect::<poq_core::Result<Vec<_>>>()?;
            let run = estimate_gap(protocol, &w, &quantum, &adv, &params, trials, seed, confidence)?;
            for warning in &run.report.warnings {
                eprintln!("warning: {warning}");
            }
            eprintln!(
                "gap {:.4} (quantum lower {:.4}, classical upper {:.4}, halting {:.4}, library-relative)",
                run.report.gap, run.report.quantum_lower, run.report.classical_upper, run.report.halting
            );
            if let Some(p) = csv {
                emit(Some(&p), &csv_string(&run.batches)?)?;
            }
            emit(out.as_deref(), &run.report.to_toml()?)?;
        }
        Command::AnalyzeChain { machine, testbed: name, x, y, work_cells, out } => {
            let spec = match (machine, name) {
                (Some(path), _) => {
                    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    MachineFile::from_json(&text)?.to_ptm()?
                }
                (None, Some(n)) => match testbed::all().into_iter().find(|(k, _)| *k == n) {
                    Some((_, m)) => m,
                    None => bail!("unknown test machine {n:?}"),
                },
                (None, None) => bail!("one of --machine or --testbed is required"),
            };
            let report = analyze(&spec, &x, &y, work_cells)?;
            emit(out.as_deref(), &toml_string(&report)?)?;
        }
        Command::FreivaldsCalibrate { c, target, n_max, d_max } => {
            print!("{}", toml_string(&calibrate(c, target, n_max, d_max)?)?);
        }
    }
    Ok(())
}

fn toml_string<T: serde::Serialize>(v: &T) -> Result<String> {
    Ok(toml::to_string(v)?)
}
