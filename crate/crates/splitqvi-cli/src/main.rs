//! Command-line front end for the split quasi-variational inequality solver.
//!
//! Subcommands: `generate` builds instances with known solutions, `certify`
//! checks the convergence hypotheses, `solve` runs the iteration and can
//! export a CSV trace, `verify` cross-checks certificate, solver and the
//! independent oracle on one instance.
//!
//! Exit codes: 0 success/certified, 1 usage error, 2 parse error,
//! 3 rejected certificate or failed verification, 4 numerical failure.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use splitqvi::io::{read_problem, write_problem, write_trace_csv};
use splitqvi::{
    certify_problem, generate_problem, oracle_solve, select_variant, solve, AlphaSchedule,
    CertifyMode, Error, Family, GeneratorConfig, ProblemSpec, SolveStatus, SolverParams,
    StepCertificate, Vector,
};

const EXIT_USAGE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_REJECTED: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "splitqvi",
    version,
    about = "Projection solver for split quasi-variational inequalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance with a known solution.
    Generate {
        /// Instance family: interior-zero or boundary-solution.
        #[arg(long, default_value = "interior-zero")]
        family: String,
        /// Dimensions n1 n2 of the two spaces.
        #[arg(long, num_args = 2, value_names = ["N1", "N2"], default_values = ["3", "2"])]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output problem file.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Check the convergence hypotheses for an instance and parameters.
    Certify {
        spec: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        /// Enforce the literal worst-case hypotheses as well.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run the iteration on an instance.
    Solve {
        spec: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        /// Starting point as comma-separated coordinates (default: zeros).
        #[arg(long)]
        x0: Option<String>,
        /// Write the iterate trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Add one CSV column per coordinate of x.
        #[arg(long)]
        trace_coords: bool,
        /// Refuse to run when the certificate is rejected.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        json: bool,
    },
    /// Certify, solve and cross-check against the independent oracle.
    Verify {
        spec: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long)]
    rho1: Option<f64>,
    #[arg(long)]
    rho2: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Relaxation schedule: a constant in (0,1) or "harmonic".
    #[arg(long)]
    alpha_schedule: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidParams(_) => EXIT_USAGE,
        Error::Parse(_)
        | Error::Io(_)
        | Error::InvalidProblem(_)
        | Error::InvalidSet(_)
        | Error::InvalidOperator(_)
        | Error::DimensionMismatch { .. }
        | Error::NonFinite => EXIT_PARSE,
        Error::NoConvergence { .. }
        | Error::SingularOperator
        | Error::InfeasibleConstants(_)
        | Error::Generation(_) => EXIT_NUMERICAL,
    }
}

/// Resolves run parameters: command-line flags override the instance's
/// stored defaults; missing values fall back to ρ = 1 and γ = 1/‖A‖².
fn resolve_params(spec: &ProblemSpec, args: &ParamArgs) -> Result<SolverParams, Error> {
    let base = spec.default_params().cloned().unwrap_or_else(|| {
        let norm_a = spec.a().operator_norm();
        let gamma = if norm_a > 0.0 {
            1.0 / (norm_a * norm_a)
        } else {
            1.0
        };
        SolverParams::new(1.0, 1.0, gamma)
    });
    let schedule = match &args.alpha_schedule {
        None => base.schedule.clone(),
        Some(s) if s == "harmonic" => AlphaSchedule::Harmonic,
        Some(s) => {
            let v: f64 = s.parse().map_err(|_| {
                Error::InvalidParams(format!(
                    "--alpha-schedule expects a number in (0,1) or \"harmonic\", got {s:?}"
                ))
            })?;
            AlphaSchedule::Constant(v)
        }
    };
    let params = SolverParams {
        rho1: args.rho1.unwrap_or(base.rho1),
        rho2: args.rho2.unwrap_or(base.rho2),
        gamma: args.gamma.unwrap_or(base.gamma),
        schedule,
        max_iters: args.max_iters.unwrap_or(base.max_iters),
        tol: args.tol.unwrap_or(base.tol),
    };
    params.validate()?;
    Ok(params)
}

fn parse_x0(text: &str, dim: usize) -> Result<Vector, Error> {
    let entries: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let entries =
        entries.map_err(|e| Error::InvalidParams(format!("--x0: invalid coordinate: {e}")))?;
    if entries.len() != dim {
        return Err(Error::InvalidParams(format!(
            "--x0 has {} coordinates, the instance needs {dim}",
            entries.len()
        )));
    }
    Vector::new(entries).map_err(|_| Error::InvalidParams("--x0 entries must be finite".into()))
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Generate {
            family,
            dims,
            seed,
            output,
        } => {
            let family: Family = family.parse()?;
            let cfg = GeneratorConfig::new(dims[0], dims[1], seed, family);
            let spec = generate_problem(&cfg)?;
            write_problem(&output, &spec)?;
            println!(
                "wrote {} ({}x{} instance, seed {seed}, family {family:?})",
                output.display(),
                dims[0],
                dims[1]
            );
            Ok(0)
        }
        Command::Certify {
            spec,
            params,
            strict,
            json,
        } => {
            let spec = read_problem(&spec)?;
            let params = resolve_params(&spec, &params)?;
            let mode = if strict {
                CertifyMode::Strict
            } else {
                CertifyMode::Standard
            };
            let cert = certify_problem(&spec, &params, mode);
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&cert).expect("serializable")
                );
            } else {
                println!("{cert}");
            }
            Ok(if cert.is_certified() {
                0
            } else {
                EXIT_REJECTED
            })
        }
        Command::Solve {
            spec,
            params,
            x0,
            trace,
            trace_coords,
            strict,
            json,
        } => {
            let spec = read_problem(&spec)?;
            let params = resolve_params(&spec, &params)?;
            let cert = certify_problem(&spec, &params, CertifyMode::Standard);
            if strict && !cert.is_certified() {
                eprintln!("{cert}");
                eprintln!("refusing to solve: certificate rejected (--strict)");
                return Ok(EXIT_REJECTED);
            }
            let x0 = match x0 {
                Some(text) => parse_x0(&text, spec.dims().0)?,
                None => Vector::zeros(spec.dims().0),
            };
            let result = solve(&spec, &params, &x0, Some(cert))?;
            if let Some(path) = trace {
                let file = File::create(&path)?;
                write_trace_csv(BufWriter::new(file), &result.trace, trace_coords)?;
            }
            let final_error = spec.known_solution().map(|xs| (&result.x - xs).norm());
            if json {
                #[derive(Serialize)]
                struct SolveReport<'a> {
                    variant: String,
                    status: &'a str,
                    iterations: usize,
                    final_residual: f64,
                    final_error: Option<f64>,
                    x: Vec<f64>,
                }
                let report = SolveReport {
                    variant: result.trace.header.variant.to_string(),
                    status: status_str(result.status),
                    iterations: result.iterations,
                    final_residual: result.trace.records.last().map_or(f64::NAN, |r| r.residual),
                    final_error,
                    x: result.x.as_slice().to_vec(),
                };
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("serializable")
                );
            } else {
                println!("variant:        {}", result.trace.header.variant);
                println!("status:         {}", status_str(result.status));
                println!("iterations:     {}", result.iterations);
                if let Some(rec) = result.trace.records.last() {
                    println!("final residual: {:e}", rec.residual);
                }
                if let Some(err) = final_error {
                    println!("final error:    {err:e}");
                }
            }
            match result.status {
                SolveStatus::Converged => Ok(0),
                SolveStatus::MaxIters => Ok(EXIT_NUMERICAL),
            }
        }
        Command::Verify { spec, params, json } => {
            let spec = read_problem(&spec)?;
            let params = resolve_params(&spec, &params)?;
            let report = run_verify(&spec, &params)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("serializable")
                );
            } else {
                print!("{}", report.render());
            }
            Ok(if report.passed { 0 } else { EXIT_REJECTED })
        }
    }
}

fn status_str(status: SolveStatus) -> &'static str {
    match status {
        SolveStatus::Converged => "converged",
        SolveStatus::MaxIters => "max-iters",
    }
}

/// Everything `verify` measured on one instance.
#[derive(Serialize)]
struct RunReport {
    variant: String,
    certificate: StepCertificate,
    status: String,
    iterations: usize,
    final_residual: f64,
    final_error: Option<f64>,
    contraction_violations: Option<usize>,
    oracle_method: Option<String>,
    oracle_distance: Option<f64>,
    wall_ms: u128,
    passed: bool,
    failures: Vec<String>,
}

impl RunReport {
    fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("variant:                {}\n", self.variant));
        out.push_str(&format!("{}\n", self.certificate));
        out.push_str(&format!("solve status:           {}\n", self.status));
        out.push_str(&format!("iterations:             {}\n", self.iterations));
        out.push_str(&format!(
            "final residual:         {:e}\n",
            self.final_residual
        ));
        if let Some(e) = self.final_error {
            out.push_str(&format!("final error:            {e:e}\n"));
        }
        if let Some(v) = self.contraction_violations {
            out.push_str(&format!("contraction violations: {v}\n"));
        }
        if let (Some(m), Some(d)) = (&self.oracle_method, self.oracle_distance) {
            out.push_str(&format!("oracle ({m}): distance {d:e}\n"));
        }
        out.push_str(&format!("wall time:              {} ms\n", self.wall_ms));
        if self.passed {
            out.push_str("verification:           PASS\n");
        } else {
            out.push_str("verification:           FAIL\n");
            for f in &self.failures {
                out.push_str(&format!("  - {f}\n"));
            }
        }
        out
    }
}

fn run_verify(spec: &ProblemSpec, params: &SolverParams) -> Result<RunReport, Error> {
    let start = Instant::now();
    let mut failures = Vec::new();

    let cert = certify_problem(spec, params, CertifyMode::Standard);
    if !cert.is_certified() {
        failures.push("certificate rejected".to_string());
    }

    let x0 = Vector::zeros(spec.dims().0);
    let result = solve(spec, params, &x0, Some(cert.clone()))?;
    if result.status != SolveStatus::Converged {
        failures.push(format!(
            "solver did not reach residual {:e} within {} iterations",
            params.tol, params.max_iters
        ));
    }
    let final_residual = result.trace.records.last().map_or(f64::NAN, |r| r.residual);
    let final_error = spec.known_solution().map(|xs| (&result.x - xs).norm());

    let contraction_violations = result.trace.contraction_violations(1e-9);
    if let Some(v) = contraction_violations {
        if v > 0 && cert.is_certified() {
            failures.push(format!("{v} contraction-bound violations"));
        }
    }

    let (oracle_method, oracle_distance) = match oracle_solve(spec, params) {
        Ok(out) => {
            let d = (&out.x - &result.x).norm();
            if d > 1e-6 {
                failures.push(format!("solver and oracle disagree by {d:e}"));
            }
            (Some(out.method.to_string()), Some(d))
        }
        Err(e) => {
            failures.push(format!("oracle failed: {e}"));
            (None, None)
        }
    };

    if let Some(err) = final_error {
        if result.status == SolveStatus::Converged && err > 1e-6 {
            failures.push(format!("final error {err:e} exceeds 1e-6"));
        }
    }

    Ok(RunReport {
        variant: select_variant(spec).to_string(),
        certificate: cert,
        status: status_str(result.status).to_string(),
        iterations: result.iterations,
        final_residual,
        final_error,
        contraction_violations,
        oracle_method,
        oracle_distance,
        wall_ms: start.elapsed().as_millis(),
        passed: failures.is_empty(),
        failures,
    })
}
