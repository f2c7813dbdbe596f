use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spincost::cost::{
    circuit_cost, cost_curve, intensity_requirement, materialized_curve_row, max_feasible_qubits,
    write_curve_csv, MATERIALIZED_CAP,
};
use spincost::route::{cancel_swaps, route_lnn, RoutingStrategy, SwapReport};
use spincost::simulate::{
    apply, circuit_unitary, dft_matrix, equal_up_to_global_phase, StateVector, MATRIX_CAP,
    STATE_CAP,
};
use spincost::synth::{
    append_bit_reversal, build_aqft, build_qft, lower_circuit, LoweringLevel, XorMode,
};
use spincost::{Circuit, ControlMode, CurveKind, Dyadic, Error, HardwareModel, UnitPolicy};

#[derive(Parser)]
#[command(
    name = "spincost",
    version,
    about = "QFT synthesis, LNN routing and time-cost on spin hardware"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a QFT or approximate QFT circuit.
    Build(BuildArgs),
    /// Route a circuit onto a linear nearest-neighbour chain.
    Route(RouteArgs),
    /// Check a circuit against the DFT or another circuit, up to global phase.
    Verify(VerifyArgs),
    /// Time-cost of a circuit, or a cost curve from closed forms.
    Cost(CostArgs),
    /// Register and field limits of a hardware model.
    Limits(LimitsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Lower {
    Logical,
    Xor,
    Elementary,
}

#[derive(Clone, Copy, ValueEnum)]
enum XorModeArg {
    Ideal,
    Physical,
}

#[derive(Args)]
struct BuildArgs {
    n: usize,
    /// Keep only rotations at distance below M.
    #[arg(long, value_name = "M")]
    approx: Option<usize>,
    #[arg(long)]
    bit_reversal: bool,
    #[arg(long, value_enum, default_value = "logical")]
    lower: Lower,
    #[arg(long, value_enum, default_value = "ideal")]
    xor_mode: XorModeArg,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RouteArgs {
    /// Circuit JSON, or - for stdin.
    input: String,
    /// control-to-target, target-to-control or meet-at:<l>.
    #[arg(long, default_value = "target-to-control")]
    strategy: String,
    /// Cancel adjacent swap pairs after routing.
    #[arg(long)]
    reduce: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write the swap-count report here instead of stderr.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    input: String,
    /// dft, dft-no-reversal, or a circuit JSON file.
    #[arg(long, default_value = "dft")]
    against: String,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Seed for random-state checks above the dense-matrix limit.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    samples: usize,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value = "duration")]
    mode: String,
    /// tau0, tauN or custom:<j>.
    #[arg(long, default_value = "tauN")]
    policy: String,
    /// Time resolution, seconds.
    #[arg(long, default_value_t = 1e-6)]
    t_res: f64,
    /// Duration of a pi rotation at the reference field, seconds.
    #[arg(long, default_value_t = 1e-3)]
    tau0: f64,
    /// Field realizing the smallest rotation, tesla.
    #[arg(long)]
    b_min: Option<f64>,
    /// Cost of H, Xor, Swap and Ry(pi/2) in units of t_unit, e.g. 0.25.
    #[arg(long, default_value = "0")]
    fixed_gate_units: String,
    /// Strongest attainable field, tesla.
    #[arg(long, default_value_t = spincost::cost::DEFAULT_FEASIBLE_FIELD_TESLA)]
    field_limit: f64,
}

impl ModelArgs {
    fn model(&self) -> Result<HardwareModel, Error> {
        let m = HardwareModel {
            mode: self.mode.parse::<ControlMode>()?,
            unit_policy: self.policy.parse::<UnitPolicy>()?,
            t_res: self.t_res,
            t_ref: self.tau0,
            fixed_gate_cost: self.fixed_gate_units.parse::<Dyadic>()?,
            b_min: self.b_min,
            b_feasible_max: self.field_limit,
        };
        m.validate()?;
        Ok(m)
    }
}

#[derive(Args)]
struct CostArgs {
    /// Circuit JSON, or - for stdin. Omit with --closed-form.
    input: Option<String>,
    /// qft, aqft:<m> or qft-routed-reduced.
    #[arg(long, value_name = "KIND", conflicts_with = "input")]
    closed_form: Option<String>,
    /// Inclusive range a:b for curves.
    #[arg(long, default_value = "2:16")]
    n_range: String,
    /// Also build each circuit and require an exact match (n <= 64).
    #[arg(long)]
    cross_check: bool,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Emit curve rows as JSON instead of CSV.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct LimitsArgs {
    #[arg(long, default_value_t = 1e-6)]
    t_res: f64,
    #[arg(long, default_value_t = 1e-3)]
    tau0: f64,
    /// Register size for the intensity requirement.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    b_min: Option<f64>,
    #[arg(long, default_value_t = spincost::cost::DEFAULT_FEASIBLE_FIELD_TESLA)]
    field_limit: f64,
}

enum Failure {
    Lib(Error),
    Io(String),
    Mismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn read_input(source: &str) -> Result<String, Failure> {
    if source == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(source).map_err(|e| Failure::Io(format!("{source}: {e}")))
    }
}

fn read_circuit(source: &str) -> Result<Circuit, Failure> {
    Ok(Circuit::from_json(&read_input(source)?)?)
}

/// Writes `body` to `path`, or to stdout when absent.
fn emit(path: Option<&Path>, body: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, body),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()
        }
    }
}

/// Circuit JSON to the file or stdout, with a one-line census on the other
/// stream so stdout stays machine-readable.
fn emit_circuit(path: Option<&Path>, circuit: &Circuit) -> io::Result<()> {
    let json = circuit.to_json() + "\n";
    let census = format!(
        "{} qubits, {} gates {}",
        circuit.num_qubits(),
        circuit.len(),
        circuit.census()
    );
    emit(path, &json)?;
    if path.is_some() {
        println!("{census}");
    } else {
        eprintln!("{census}");
    }
    Ok(())
}

fn run_build(a: BuildArgs) -> CliResult {
    let circuit = match a.approx {
        Some(m) => build_aqft(a.n, m, a.bit_reversal)?,
        None => build_qft(a.n, a.bit_reversal)?,
    };
    let level = match a.lower {
        Lower::Logical => LoweringLevel::Logical,
        Lower::Xor => LoweringLevel::XorLevel,
        Lower::Elementary => LoweringLevel::Elementary,
    };
    let mode = match a.xor_mode {
        XorModeArg::Ideal => XorMode::Ideal,
        XorModeArg::Physical => XorMode::Physical,
    };
    emit_circuit(a.output.as_deref(), &lower_circuit(&circuit, level, mode))?;
    Ok(())
}

fn run_route(a: RouteArgs) -> CliResult {
    let circuit = read_circuit(&a.input)?;
    let strategy: RoutingStrategy = a.strategy.parse()?;
    let mut routed = route_lnn(&circuit, strategy);
    if a.reduce {
        routed = cancel_swaps(&routed);
    }
    emit_circuit(a.output.as_deref(), &routed.circuit)?;
    let report = SwapReport::for_circuit(&circuit, strategy, a.reduce).to_json();
    match a.report {
        Some(p) => fs::write(p, report + "\n")?,
        None => eprintln!("{report}"),
    }
    Ok(())
}

fn bit_reversed_dft(n: usize) -> Result<spincost::simulate::UnitaryMatrix, Error> {
    let mut r = Circuit::new(n)?;
    append_bit_reversal(&mut r);
    circuit_unitary(&r)?.matmul(&dft_matrix(n)?)
}

fn run_verify(a: VerifyArgs) -> CliResult {
    let circuit = read_circuit(&a.input)?;
    let n = circuit.num_qubits();
    let reference = match a.against.as_str() {
        "dft" | "dft-no-reversal" => None,
        path => {
            let other = read_circuit(path)?;
            if other.num_qubits() != n {
                return Err(Failure::Mismatch(format!(
                    "width differs: {n} vs {}",
                    other.num_qubits()
                )));
            }
            Some(other)
        }
    };

    if n > MATRIX_CAP {
        // random-state comparison against another circuit
        let Some(other) = reference else {
            return Err(Error::Capacity {
                num_qubits: n,
                cap: MATRIX_CAP,
            }
            .into());
        };
        if n > STATE_CAP {
            return Err(Error::Capacity {
                num_qubits: n,
                cap: STATE_CAP,
            }
            .into());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let mut worst = 0.0f64;
        for _ in 0..a.samples {
            let index = rand::Rng::gen_range(&mut rng, 0..(1usize << n));
            let psi = StateVector::basis(n, index)?;
            let x = apply(&circuit, &psi)?;
            let y = apply(&other, &psi)?;
            let overlap: num_complex::Complex64 = y
                .amplitudes()
                .iter()
                .zip(x.amplitudes())
                .map(|(b, a)| b.conj() * a)
                .sum();
            worst = worst.max((1.0 - overlap.norm()).abs());
        }
        println!("samples={} worst_overlap_defect={worst:.3e}", a.samples);
        return if worst <= a.tol {
            println!("equal up to global phase");
            Ok(())
        } else {
            Err(Failure::Mismatch(format!(
                "overlap defect {worst:.3e} exceeds {}",
                a.tol
            )))
        };
    }

    let u = circuit_unitary(&circuit)?;
    let target = match (&reference, a.against.as_str()) {
        (Some(other), _) => circuit_unitary(other)?,
        (None, "dft") => dft_matrix(n)?,
        _ => bit_reversed_dft(n)?,
    };
    let m = equal_up_to_global_phase(&u, &target, a.tol)?;
    match m.phase {
        Some(l) => {
            println!(
                "equal up to global phase: lambda={:+.12}{:+.12}i residual={:.3e}",
                l.re, l.im, m.residual
            );
            Ok(())
        }
        None => Err(Failure::Mismatch(format!(
            "not equal: residual={:.3e}",
            m.residual
        ))),
    }
}

fn parse_range(s: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::Parse(format!("bad range {s:?}; expected a:b"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn run_cost(a: CostArgs) -> CliResult {
    let model = a.model.model()?;
    if let Some(kind) = &a.closed_form {
        let kind: CurveKind = kind.parse()?;
        let (lo, hi) = parse_range(&a.n_range)?;
        let rows = cost_curve(lo, hi, &model, kind)?;
        if a.cross_check {
            if hi > MATERIALIZED_CAP {
                return Err(Error::Capacity {
                    num_qubits: hi,
                    cap: MATERIALIZED_CAP,
                }
                .into());
            }
            for row in &rows {
                let built = materialized_curve_row(row.n, &model, kind)?;
                if &built != row {
                    return Err(Failure::Mismatch(format!(
                        "n={}: closed form {} vs built {}",
                        row.n, row.relative_cost, built.relative_cost
                    )));
                }
            }
            eprintln!("cross-check: {} rows agree", rows.len());
        }
        let body = if a.json {
            serde_json::to_string(&rows).expect("rows serialize") + "\n"
        } else {
            let mut buf = Vec::new();
            write_curve_csv(&rows, &mut buf)?;
            String::from_utf8(buf).expect("csv is utf-8")
        };
        emit(a.output.as_deref(), &body)?;
        return Ok(());
    }

    let Some(input) = a.input else {
        return Err(Error::InvalidArgument("give a circuit file or --closed-form".into()).into());
    };
    let report = circuit_cost(&read_circuit(&input)?, &model)?;
    if report.field_feasible == Some(false) {
        eprintln!(
            "note: B_max={:.6e} T exceeds the feasible field {} T",
            report.b_max_tesla.unwrap_or(f64::NAN),
            model.b_feasible_max
        );
    }
    if !report.feasible {
        eprintln!("note: shortest gate is below the time resolution");
    }
    emit(a.output.as_deref(), &(report.to_json_pretty() + "\n"))?;
    Ok(())
}

fn run_limits(a: LimitsArgs) -> CliResult {
    let model = HardwareModel {
        t_res: a.t_res,
        t_ref: a.tau0,
        b_feasible_max: a.field_limit,
        ..HardwareModel::default()
    };
    let nb = max_feasible_qubits(&model, a.tau0)?;
    println!("n_b={nb}");
    if let (Some(n), Some(b)) = (a.n, a.b_min) {
        let req = intensity_requirement(n, b)?;
        println!(
            "intensity_ratio={} B_max={:.6e} T",
            req.ratio, req.b_max_tesla
        );
        if req.b_max_tesla > a.field_limit {
            eprintln!("note: B_max exceeds the feasible field {} T", a.field_limit);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(a) => run_build(a),
        Command::Route(a) => run_route(a),
        Command::Verify(a) => run_verify(a),
        Command::Cost(a) => run_cost(a),
        Command::Limits(a) => run_limits(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Capacity { .. } => 3,
                Error::Infeasible(_) => 4,
                _ => 2,
            })
        }
    }
}
