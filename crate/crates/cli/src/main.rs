//! `lopforge` command-line front end.
//!
//! Complex numbers on the command line are written `re`, `re+imi` / `re-imi`, `imi` or `re,im`.
//! Exit codes: 0 success, 2 usage / input errors, 3 numerical failures.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use lopforge::acceptance::{self, AcceptanceConfig};
use lopforge::circuit::{Circuit, CircuitJson};
use lopforge::detector::{eta_grid, tradeoff_csv, tradeoff_sweep, Protocol};
use lopforge::engineering::{normalize_triple, postselect, solve_target_with_tolerance};
use lopforge::lop::{matrix_from_json, ModeUnitaryJson};
use lopforge::{decompose, recompose, LopError, ModeUnitary, PureState};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const DEFAULT_SEED: u64 = acceptance::DEFAULT_SEED;
const DEFAULT_TOL: f64 = 1e-10;

#[derive(Parser, Debug)]
#[command(name = "lopforge", version, about = "Linear-optical state engineering toolkit")]
struct Cli {
    /// Seed for randomized commands
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Numerical tolerance for unitarity and normalization checks
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output format (default: csv for sweep, json otherwise)
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ProtocolArg {
    NoClick,
    Click,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compile A|20> + B|11> + C|02> into the most probable circuit acting on |11>|0>
    Prepare {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
        #[arg(allow_hyphen_values = true)]
        c: String,
        /// Photons in the ancilla at the input (only 0 is supported)
        #[arg(long, default_value_t = 0)]
        ancilla_in: usize,
    },
    /// Run a circuit on an input occupation (last mode is the ancilla) and post-select
    Simulate {
        circuit: PathBuf,
        /// Occupation of every mode, ancilla last
        #[arg(long, num_args = 1.., required = true)]
        input: Vec<usize>,
        /// Photons detected in the ancilla
        #[arg(long)]
        ancilla_out: usize,
    },
    /// Probability / fidelity trade-off of an on/off ancilla detector
    Sweep {
        circuit: PathBuf,
        #[arg(long, num_args = 1.., required = true)]
        input: Vec<usize>,
        #[arg(long, value_enum, default_value_t = ProtocolArg::NoClick)]
        protocol: ProtocolArg,
        /// Ideal branch for the click protocol
        #[arg(long, default_value_t = 1)]
        branch: usize,
        #[arg(long, default_value_t = 0.0)]
        eta_min: f64,
        #[arg(long, default_value_t = 1.0)]
        eta_max: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
    },
    /// Decompose a unitary (JSON) into beam splitters and phase shifters
    Decompose { matrix: PathBuf },
    /// Run the acceptance suite
    Selftest,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numerical(String),
}

impl From<LopError> for CliError {
    fn from(e: LopError) -> Self {
        match e {
            LopError::NotUnitary { .. }
            | LopError::NotAntiHermitian { .. }
            | LopError::LogarithmFailed(_)
            | LopError::Infeasible(_)
            | LopError::Unnormalized { .. }
            | LopError::ZeroProbability(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `re`, `re+imi`, `re-imi`, `imi`, `i` or `re,im`.
fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("cannot read {s:?} as a complex number (use re, re+imi or re,im)");
    let num = |x: &str| x.parse::<f64>().map_err(|_| bad());
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((re, im)) = t.split_once(',') {
        return Ok(Complex64::new(num(re)?, num(im)?));
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Ok(Complex64::new(num(&t)?, 0.0));
    };
    let imag = |x: &str| match x {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => num(x),
    };
    // split at the last sign that is not leading and not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(Complex64::new(num(&body[..k])?, imag(&body[k..])?)),
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

/// A circuit file, or the output of `prepare` which carries its circuit under `"circuit"`.
#[derive(Deserialize)]
#[serde(untagged)]
enum CircuitInput {
    Bare(CircuitJson),
    Solution { circuit: CircuitJson },
}

fn read_circuit(path: &Path) -> CliResult<Circuit<f64>> {
    let text = read_file(path)?;
    let parsed: CircuitInput = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: not a circuit: {e}", path.display())))?;
    let json = match parsed {
        CircuitInput::Bare(j) | CircuitInput::Solution { circuit: j } => j,
    };
    Ok(Circuit::from_json(&json)?)
}

/// A unitary given as `{"size": N, "matrix": [...]}`, as any object with a `"matrix"` field
/// (such as the output of `prepare`) or as a bare list of rows. Each entry is an `[re, im]`
/// pair.
#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixInput {
    Wrapped(ModeUnitaryJson),
    Keyed { matrix: Vec<Vec<[f64; 2]>> },
    Rows(Vec<Vec<[f64; 2]>>),
}

fn read_matrix(path: &Path, tol: f64) -> CliResult<ModeUnitary<f64>> {
    let text = read_file(path)?;
    let parsed: MatrixInput = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: not a matrix: {e}", path.display())))?;
    let rows = match parsed {
        MatrixInput::Wrapped(j) => j.matrix,
        MatrixInput::Keyed { matrix } | MatrixInput::Rows(matrix) => matrix,
    };
    let m = matrix_from_json::<f64>(&rows)?;
    ModeUnitary::with_tolerance(m, tol).map_err(|e| match e {
        LopError::NotUnitary { deviation } => CliError::Numerical(format!(
            "input is not unitary: max |M^dag M - I| = {deviation:.3e} exceeds tolerance {tol:.1e}"
        )),
        other => other.into(),
    })
}

fn split_input(input: &[usize], modes: usize) -> CliResult<(PureState<f64>, usize)> {
    if input.len() != modes || modes < 2 {
        return Err(CliError::Usage(format!(
            "--input needs {modes} occupations (ancilla last), got {}",
            input.len()
        )));
    }
    let (comp, anc) = input.split_at(modes - 1);
    Ok((PureState::from_occupation(comp)?, anc[0]))
}

fn emit(text: &str, output: Option<&Path>) -> CliResult<()> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Usage(e.to_string()))
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

fn no_csv(what: &str) -> CliError {
    CliError::Usage(format!("csv output is only available for sweep, not {what}"))
}

#[derive(Serialize)]
struct SimulateOutput {
    input: Vec<usize>,
    ancilla_out: usize,
    probability: f64,
    /// Normalized post-selected state, or `null` for an impossible outcome.
    state: Option<lopforge::fock::StateJson>,
}

fn run(cli: Cli) -> CliResult<()> {
    let tol = cli.tol.unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
    }
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let out = cli.output.as_deref();

    match cli.command {
        Command::Prepare { a, b, c, ancilla_in } => {
            if ancilla_in != 0 {
                return Err(CliError::Usage(
                    "only --ancilla-in 0 is supported: the optimal preparation uses a vacuum ancilla".into(),
                ));
            }
            let (a, b, c) = (
                parse_complex(&a).map_err(CliError::Usage)?,
                parse_complex(&b).map_err(CliError::Usage)?,
                parse_complex(&c).map_err(CliError::Usage)?,
            );
            let norm = (a.norm_sqr() + b.norm_sqr() + c.norm_sqr()).sqrt();
            let [a, b, c] = normalize_triple(a, b, c)
                .ok_or_else(|| CliError::Usage("the target (0, 0, 0) is not a state".into()))?;
            if (norm - 1.0).abs() > tol {
                eprintln!("warning: target norm {norm:.12} rescaled to 1");
            }
            let target = PureState::qutrit(a, b, c)?;
            let sol = solve_target_with_tolerance(&target, tol)?;
            let text = match cli.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&sol.to_json()?),
                Format::Csv => return Err(no_csv("prepare")),
                Format::Text => {
                    let circuit = decompose(&sol.mode_unitary, tol)?;
                    let mut s = format!(
                        "target      {target}\nprobability {:.12}\nk           {:.12}\nancilla in  {}\noutcome     {}\nmatrix\n",
                        sol.success_probability, sol.k, sol.ancilla_in, sol.postselect_outcome
                    );
                    for row in sol.mode_unitary.matrix().rows() {
                        let cells: Vec<String> =
                            row.iter().map(|z| format!("{:+.6}{:+.6}i", z.re, z.im)).collect();
                        s.push_str(&format!("  {}\n", cells.join("  ")));
                    }
                    s.push_str(&format!("circuit ({} elements)\n", circuit.len()));
                    for e in circuit.elements() {
                        s.push_str(&format!("  {e:?}\n"));
                    }
                    s
                }
            };
            emit(&text, out)
        }
        Command::Simulate {
            circuit,
            input,
            ancilla_out,
        } => {
            let circuit = read_circuit(&circuit)?;
            let u = recompose(&circuit);
            let (comp, ancilla_in) = split_input(&input, circuit.modes())?;
            let run = postselect(&u, &comp, ancilla_in, ancilla_out)?;
            let text = match cli.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&SimulateOutput {
                    input,
                    ancilla_out,
                    probability: run.probability,
                    state: run.state.as_ref().map(PureState::to_json),
                }),
                Format::Csv => return Err(no_csv("simulate")),
                Format::Text => match &run.state {
                    Some(s) => format!("probability {:.12}\nstate       {s}\n", run.probability),
                    None => format!("probability {:.12}\nstate       (outcome impossible)\n", run.probability),
                },
            };
            emit(&text, out)
        }
        Command::Sweep {
            circuit,
            input,
            protocol,
            branch,
            eta_min,
            eta_max,
            steps,
        } => {
            let circuit = read_circuit(&circuit)?;
            let u = recompose(&circuit);
            let (comp, ancilla_in) = split_input(&input, circuit.modes())?;
            let grid = eta_grid(eta_min, eta_max, steps)?;
            let protocol = match protocol {
                ProtocolArg::NoClick => Protocol::NoClick,
                ProtocolArg::Click => Protocol::Click { branch },
            };
            let points = tradeoff_sweep(&u, &comp, ancilla_in, protocol, &grid)?;
            let text = match cli.format.unwrap_or(Format::Csv) {
                Format::Csv => tradeoff_csv(&points),
                Format::Json => {
                    let rows: Vec<serde_json::Value> = points
                        .iter()
                        .map(|p| serde_json::json!({"eta": p.eta, "probability": p.probability, "fidelity": p.fidelity}))
                        .collect();
                    to_json(&rows)
                }
                Format::Text => points
                    .iter()
                    .map(|p| format!("eta {:.6}  P {:.12}  F {:.12}\n", p.eta, p.probability, p.fidelity))
                    .collect(),
            };
            emit(&text, out)
        }
        Command::Decompose { matrix } => {
            let m = read_matrix(&matrix, tol)?;
            let c = decompose(&m, tol)?;
            let back = recompose(&c);
            let err = lopforge::linalg::max_abs_diff(back.matrix().view(), m.matrix().view());
            if err > 1e-10_f64.max(tol) {
                return Err(CliError::Numerical(format!("round trip error {err:.3e}")));
            }
            let text = match cli.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&c.to_json()),
                Format::Csv => return Err(no_csv("decompose")),
                Format::Text => {
                    let mut s = format!("{} modes, {} elements, round trip {err:.3e}\n", c.modes(), c.len());
                    for e in c.elements() {
                        s.push_str(&format!("  {e:?}\n"));
                    }
                    s
                }
            };
            emit(&text, out)
        }
        Command::Selftest => {
            eprintln!("seed: {seed}");
            let config = AcceptanceConfig {
                seed,
                tolerance_override: cli.tol,
            };
            let start = Instant::now();
            let mut lines = String::new();
            let mut failed = Vec::new();
            for id in 1..=acceptance::CHECKS.len() {
                let o = acceptance::run_check(id, &config).expect("valid check id");
                eprintln!("{o}");
                lines.push_str(&format!("{o}\n"));
                if !o.passed {
                    failed.push(format!("{} ({})", o.id, o.name));
                }
            }
            lines.push_str(&format!(
                "{} / {} passed in {:.2}s\n",
                acceptance::CHECKS.len() - failed.len(),
                acceptance::CHECKS.len(),
                start.elapsed().as_secs_f64()
            ));
            if out.is_some() {
                emit(&lines, out)?;
            } else {
                print!("{}", lines.lines().last().map(|l| format!("{l}\n")).unwrap_or_default());
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Numerical(format!("failed: {}", failed.join(", "))))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
