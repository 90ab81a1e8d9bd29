// SPDX-License-Identifier: Apache-2.0

//! `qca`: compile, verify, trace and synthesize for the globally driven
//! cell array.
//!
//! Exit codes: 0 success, 2 input or compile error, 3 verification
//! failure, 4 no kernel found.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qca_core::collective::GateId;
use qca_core::compiler::Compiler;
use qca_core::layout::{build_layout, Layout};
use qca_core::program_io::{read_program, write_program};
use qca_core::synthesizer::{alphabet_from_ids, load_kernel, synthesize, KernelSpec};
use qca_core::trace::trace_rows;
use qca_core::verifier::{verify_program, Thresholds};
use qca_core::{Circuit, Error, Program};

#[derive(Parser)]
#[command(name = "qca", version, about = "Globally controlled cell-array compiler and simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a circuit to a pulse program.
    Compile {
        circuit: PathBuf,
        #[command(flatten)]
        layout: LayoutArgs,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile (or load) a program and check it against the circuit.
    Verify {
        circuit: PathBuf,
        #[command(flatten)]
        layout: LayoutArgs,
        /// Pass threshold: fidelity >= 1 - t and leakage <= t / 10.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        /// Verify this pulse-program file instead of compiling.
        #[arg(long)]
        program: Option<PathBuf>,
    },
    /// Print the occupancy trace of the compiled program.
    Trace {
        circuit: PathBuf,
        #[command(flatten)]
        layout: LayoutArgs,
    },
    /// Search for a copy kernel and write it to a kernel file.
    Synthesize {
        #[arg(long, default_value_t = 12)]
        max_len: usize,
        #[arg(long, default_value_t = 10)]
        window: usize,
        /// Comma-separated gate ids.
        #[arg(long, default_value = "SWAP,CNOT,CTRL_H,CTRL_Y,NAND")]
        alphabet: String,
        /// Window cell that must carry the copied value (default: the CU cell).
        #[arg(long)]
        carrier: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct LayoutArgs {
    /// Logical qubit count (inferred from the circuit if omitted).
    #[arg(long)]
    qubits: Option<usize>,
    /// Blank cells at each end of the array.
    #[arg(long, default_value_t = 6)]
    margin: usize,
    /// Blanks between qubits 0 and 1; gaps then alternate 3 and 5.
    #[arg(long, default_value_t = 3)]
    first_gap: usize,
    /// Kernel file to use instead of the built-in kernel.
    #[arg(long)]
    kernel: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Verification(String),
    NotFound(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotFound { .. } => Failure::NotFound(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn prepare(circuit_path: &Path, args: &LayoutArgs) -> Result<(Circuit, Layout, Compiler), Failure> {
    let circuit = qca_core::circuit::parse_circuit(&read(circuit_path)?, args.qubits)?;
    let k = args.qubits.unwrap_or(circuit.n_qubits()).max(1);
    let (_, layout) = build_layout(k, args.margin, args.first_gap)?;
    let compiler = match &args.kernel {
        Some(p) => Compiler::new(load_kernel(p)?)?,
        None => Compiler::with_default_kernel()?,
    };
    Ok((circuit, layout, compiler))
}

fn compile(circuit_path: &Path, args: &LayoutArgs) -> Result<(Circuit, Program), Failure> {
    let (circuit, layout, compiler) = prepare(circuit_path, args)?;
    let program = compiler.compile(&circuit, &layout)?;
    Ok((circuit, program))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compile { circuit, layout, out } => {
            let (_, program) = compile(&circuit, &layout)?;
            emit(out.as_deref(), &write_program(&program))
        }
        Command::Verify { circuit, layout, tolerance, program } => {
            let (circ, program) = match program {
                Some(p) => {
                    let (circ, _, _) = prepare(&circuit, &layout)?;
                    (circ, read_program(&read(&p)?)?)
                }
                None => compile(&circuit, &layout)?,
            };
            let thresholds = Thresholds { min_fidelity: 1.0 - tolerance, max_leakage: tolerance / 10.0 };
            let outcome = verify_program(&circ, &program, thresholds)?;
            println!("{}: {outcome}", circuit.display());
            if outcome.passed {
                Ok(())
            } else {
                Err(Failure::Verification(format!("{} failed verification", circuit.display())))
            }
        }
        Command::Trace { circuit, layout } => {
            let (_, program) = compile(&circuit, &layout)?;
            let text: String = trace_rows(&program).iter().map(|r| format!("{r}\n")).collect();
            emit(None, &text)
        }
        Command::Synthesize { max_len, window, alphabet, carrier, out } => {
            let ids = alphabet
                .split(',')
                .map(|t| t.trim().parse::<GateId>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(Failure::Input)?;
            let y_cell = (window / 2) & !1;
            let spec = KernelSpec {
                window_size: window,
                y_cell,
                cu_cell: y_cell + 1,
                carrier_cell: carrier.unwrap_or(y_cell + 1),
                max_len,
                alphabet: alphabet_from_ids(&ids)?,
                ..KernelSpec::default()
            };
            let found = synthesize(&spec)?;
            let kernel = qca_core::synthesizer::Kernel::new(spec, found.steps)?;
            eprintln!("{}", kernel.report);
            emit(out.as_deref(), &kernel.to_file_string())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Input(m) => (2, m),
                Failure::Verification(m) => (3, m),
                Failure::NotFound(m) => (4, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
