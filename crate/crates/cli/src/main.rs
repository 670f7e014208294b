mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qcoh_core::coherence::coherence_report;
use qcoh_core::discord::{delta_discord, quantum_discord, MAX_OPTIMIZED_DIM_B};
use qcoh_core::infotheory::{accessible_info, erasure_information_loss, holevo_chi, information_loss};
use qcoh_core::io::{self, Document, MatrixRepr};
use qcoh_core::operations::coherence_erasing_channel;
use qcoh_core::random::{random_density, random_ensemble, random_separable, seeded_rng};
use qcoh_core::verify::{self, Suite, SuiteConfig, VerificationReport};
use qcoh_core::{Error, OptimizerOptions, ProjectiveBasis};

use report::{envelope, render, Format};

const EXIT_INTERNAL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_COUNTEREXAMPLE: u8 = 3;
const COUNTEREXAMPLE_DIR: &str = "counterexamples";

#[derive(Parser, Debug)]
#[command(name = "qcoh", version, about = "Coherence, accessible information and discord on small quantum states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Write the report (or generated file) here instead of stdout.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
}

#[derive(Args, Debug, Clone)]
struct Optim {
    /// Number of optimizer restarts.
    #[arg(long)]
    restarts: Option<usize>,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long)]
    tol: Option<f64>,

    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
}

impl Optim {
    fn options(&self, default_restarts: usize) -> OptimizerOptions {
        let d = OptimizerOptions::default();
        OptimizerOptions {
            restarts: self.restarts.unwrap_or(default_restarts),
            seed: self.seed,
            tol: self.tol.unwrap_or(d.tol),
            max_iters: self.max_iters.unwrap_or(d.max_iters),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entropy, C_r and C_l1 of a density file.
    Measure {
        input: PathBuf,
        /// Basis file, or one of: computational, hadamard, fourier.
        #[arg(long)]
        basis: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Holevo quantity of an ensemble, with IL and CL in the chosen basis.
    Holevo {
        input: PathBuf,
        #[arg(long)]
        basis: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Projective accessible information of an ensemble.
    Access {
        input: PathBuf,
        #[command(flatten)]
        optim: Optim,
        #[command(flatten)]
        out: Output,
    },
    /// δ(A←B) in a basis on B and the optimized discord D(A←B).
    Discord {
        input: PathBuf,
        /// Basis on B for δ.
        #[arg(long)]
        basis: Option<String>,
        #[command(flatten)]
        optim: Optim,
        #[command(flatten)]
        out: Output,
    },
    /// Apply the coherence-erasing channel and report its information loss.
    Erase {
        input: PathBuf,
        #[arg(long)]
        basis: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Run the randomized verification suites.
    Verify {
        /// theorem1, lemma1, lemma2, eq5to8 or all.
        suite: String,
        #[arg(short = 'n', long = "count", default_value_t = 100)]
        n: usize,
        /// Dimensions AxB for the eq5to8 suite.
        #[arg(long, default_value = "2x2")]
        dims: String,
        #[command(flatten)]
        optim: Optim,
        #[command(flatten)]
        out: Output,
    },
    /// Generate a random instance file.
    Random {
        #[arg(value_enum)]
        kind: RandomKind,
        #[arg(short = 'd', long = "dim", default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value = "2x2")]
        dims: String,
        /// Members (ensemble) or terms (separable).
        #[arg(short = 'n', long = "count", default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RandomKind {
    Density,
    Ensemble,
    Separable,
}

/// Failure carrying the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_input_error() { EXIT_INPUT } else { EXIT_INTERNAL };
        Failure { code, message: e.to_string() }
    }
}

fn input_failure(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

fn parse_dims(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || input_failure(format!("--dims expects AxB with positive integers, got \"{s}\""));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b == 0 {
        return Err(bad());
    }
    Ok((a, b))
}

/// Builtin basis name or a basis/unitary file.
fn resolve_basis(spec: Option<&str>, dim: usize) -> Result<Option<ProjectiveBasis>, Failure> {
    let Some(spec) = spec else { return Ok(None) };
    let basis = match spec {
        "computational" => ProjectiveBasis::computational(dim),
        "fourier" => ProjectiveBasis::fourier(dim),
        "hadamard" if dim == 2 => ProjectiveBasis::hadamard(),
        "hadamard" => return Err(input_failure(format!("hadamard basis needs dimension 2, state has {dim}"))),
        path => io::load_document(path)?.into_basis()?,
    };
    if basis.dim() != dim {
        return Err(input_failure(format!("basis has dimension {}, expected {dim}", basis.dim())));
    }
    Ok(Some(basis))
}

fn basis_json(b: &ProjectiveBasis) -> Value {
    json!({ "label": b.label(), "unitary": MatrixRepr::from(b.unitary()) })
}

fn basis_label(b: Option<&ProjectiveBasis>) -> &str {
    b.map_or("computational", |b| b.label())
}

fn emit(text: &str, out: &Output) -> Result<(), Failure> {
    match &out.output {
        Some(path) => std::fs::write(path, text).map_err(|e| input_failure(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_report(command: &str, seed: Option<u64>, body: Value, out: &Output) -> Result<(), Failure> {
    emit(&render(&envelope(command, seed, body), out.format), out)
}

fn cmd_measure(input: &Path, basis: Option<&str>, out: &Output) -> Result<(), Failure> {
    let rho = io::load_state(input)?;
    let basis = resolve_basis(basis, rho.dim())?;
    let r = coherence_report(&rho, basis.as_ref())?;
    let body = json!({
        "input": input.display().to_string(),
        "dim": rho.dim(),
        "basis": basis_label(basis.as_ref()),
        "entropy": r.entropy,
        "c_r": r.c_r,
        "c_l1": r.c_l1,
    });
    emit_report("measure", None, body, out)
}

fn cmd_holevo(input: &Path, basis: Option<&str>, out: &Output) -> Result<(), Failure> {
    let e = io::load_ensemble(input)?;
    let basis = resolve_basis(basis, e.dim())?;
    let chi = holevo_chi(&e)?;
    let r = information_loss(&e, basis.as_ref())?;
    let body = json!({
        "input": input.display().to_string(),
        "dim": e.dim(),
        "members": e.len(),
        "basis": basis_label(basis.as_ref()),
        "chi": chi,
        "h_xy": r.h_xy,
        "il": r.il,
        "cl": r.cl,
        "il_cl_residual": r.residual,
    });
    emit_report("holevo", None, body, out)
}

fn cmd_access(input: &Path, optim: &Optim, out: &Output) -> Result<(), Failure> {
    let e = io::load_ensemble(input)?;
    let opts = optim.options(OptimizerOptions::default().restarts);
    let r = accessible_info(&e, &opts)?;
    let body = json!({
        "input": input.display().to_string(),
        "dim": e.dim(),
        "members": e.len(),
        "chi": r.chi,
        "accessible_info": r.value,
        "best_basis": basis_json(&r.best_basis),
        "restarts": r.n_restarts,
        "converged": r.converged,
    });
    emit_report("access", Some(opts.seed), body, out)
}

fn cmd_discord(input: &Path, basis: Option<&str>, optim: &Optim, out: &Output) -> Result<(), Failure> {
    let s = io::load_document(input)?.into_bipartite()?;
    let (da, db) = s.dims();
    let basis = resolve_basis(basis, db)?;
    let r = delta_discord(&s, basis.as_ref())?;
    let opts = optim.options(OptimizerOptions::default().restarts);
    let optimized = if db <= MAX_OPTIMIZED_DIM_B {
        let d = quantum_discord(&s, &opts)?;
        json!({
            "discord": d.value,
            "discord_basis": basis_json(&d.best_basis),
            "restarts": d.n_restarts,
            "converged": d.converged,
        })
    } else {
        json!({ "discord": null, "discord_note": format!("optimization skipped for d_B > {MAX_OPTIMIZED_DIM_B}") })
    };
    let mut body = json!({
        "input": input.display().to_string(),
        "dims": [da, db],
        "basis": basis_label(basis.as_ref()),
        "mutual_info": r.mutual_info,
        "classical_info_j": r.classical_info_j,
        "delta": r.delta,
        "local_coherence_ab": r.local_coherence_ab,
        "c_r_b": r.c_r_b,
        "route_gap": r.route_gap,
    });
    if let (Value::Object(b), Value::Object(o)) = (&mut body, optimized) {
        b.extend(o);
    }
    emit_report("discord", Some(opts.seed), body, out)
}

fn cmd_erase(input: &Path, basis: Option<&str>, out: &Output) -> Result<(), Failure> {
    let rho = io::load_state(input)?;
    let basis = resolve_basis(basis, rho.dim())?.unwrap_or_else(|| ProjectiveBasis::computational(rho.dim()));
    let erased = coherence_erasing_channel(&rho, &basis)?;
    let r = erasure_information_loss(&rho, &basis)?;
    let body = json!({
        "input": input.display().to_string(),
        "dim": rho.dim(),
        "basis": basis.label(),
        "kraus_weights": erased.channel.weights,
        "output": MatrixRepr::from(erased.output.matrix()),
        "chi": r.chi,
        "h_xy": r.h_xy,
        "il": r.il,
        "cl": r.cl,
    });
    emit_report("erase", None, body, out)
}

fn cmd_verify(suite: &str, n: usize, dims: &str, optim: &Optim, out: &Output) -> Result<bool, Failure> {
    if n == 0 {
        return Err(input_failure("-n must be at least 1"));
    }
    let cfg = SuiteConfig {
        n_instances: n,
        seed: optim.seed,
        dims: parse_dims(dims)?,
        opts: optim.options(SuiteConfig::default().opts.restarts),
    };
    let report = if suite == "all" {
        verify::run_all(&cfg)?
    } else {
        let s: Suite = suite.parse().map_err(|_| input_failure(format!("unknown suite \"{suite}\" (theorem1, lemma1, lemma2, eq5to8, all)")))?;
        VerificationReport::new(cfg.seed, vec![verify::run_suite(s, &cfg)?])
    };
    let written = verify::write_counterexamples(&report, COUNTEREXAMPLE_DIR)?;
    let mut v = serde_json::to_value(&report).expect("reports serialize");
    v["command"] = "verify".into();
    v["counterexample_files"] = written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().into();
    emit(&render(&v, out.format), out)?;
    Ok(report.passed())
}

#[allow(clippy::too_many_arguments)]
fn cmd_random(kind: RandomKind, dim: usize, rank: Option<usize>, dims: &str, n: usize, seed: u64, out: &Output) -> Result<(), Failure> {
    let mut rng = seeded_rng(seed);
    let doc = match kind {
        RandomKind::Density => Document::from_state(&random_density(dim, rank.unwrap_or(dim), &mut rng)?),
        RandomKind::Ensemble => Document::from_ensemble(&random_ensemble(dim, n, &mut rng)?),
        RandomKind::Separable => Document::from_separable(&random_separable(parse_dims(dims)?, n, &mut rng)?),
    };
    let mut text = doc.to_json();
    text.push('\n');
    emit(&text, out)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match &cli.command {
        Command::Measure { input, basis, out } => cmd_measure(input, basis.as_deref(), out)?,
        Command::Holevo { input, basis, out } => cmd_holevo(input, basis.as_deref(), out)?,
        Command::Access { input, optim, out } => cmd_access(input, optim, out)?,
        Command::Discord { input, basis, optim, out } => cmd_discord(input, basis.as_deref(), optim, out)?,
        Command::Erase { input, basis, out } => cmd_erase(input, basis.as_deref(), out)?,
        Command::Verify { suite, n, dims, optim, out } => return cmd_verify(suite, *n, dims, optim, out),
        Command::Random { kind, dim, rank, dims, n, seed, out } => cmd_random(*kind, *dim, *rank, dims, *n, *seed, out)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_COUNTEREXAMPLE),
        Err(f) => {
            eprintln!("qcoh: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
