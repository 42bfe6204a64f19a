use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use ksr_paving::barrier::certify_maxroot_bound;
use ksr_paving::bounds::{bound_table, default_etas, default_grid};
use ksr_paving::instance::{generate_exact_instance, generate_instance, random_gram_contraction, random_hermitian, rng_from_seed};
use ksr_paving::km::{choose_route, km_char_poly_route, KmContext};
use ksr_paving::mixed::{maxroot_report, mu_of_system, DecompositionInstance};
use ksr_paving::paving::{exhaustive_pave, pave, pave_simultaneous, EXHAUSTIVE_GATE};
use ksr_paving::suite::{oracle_check_exact, oracle_check_float, run_suite, Mode, SuiteConfig};
use ksr_paving::{Error, HermitianMatrix, Result, Scalar};

#[derive(Parser)]
#[command(name = "ksr", version, about = "Mixed characteristic polynomials and constructive KS_r paving")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Clone)]
struct Opts {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Float)]
    mode: ModeArg,
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true)]
    r: Option<usize>,
    #[arg(long, global = true)]
    m: Option<usize>,
    #[arg(long, global = true)]
    d: Option<usize>,
    #[arg(long, global = true)]
    eps: Option<f64>,
    /// Output file (a directory for `suite`); stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON input (an instance, a matrix, or {"matrices": [...]}).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true)]
    override_size_gate: bool,
    /// Worker threads (defaults to the available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Float,
    Exact,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a random decomposition instance as JSON.
    Gen,
    /// Mixed characteristic polynomial of an instance, with the maxroot sandwich.
    Mu,
    /// The (k,m)-characteristic polynomial of a km x km Hermitian matrix.
    Psi,
    /// Bound table as CSV.
    Bounds,
    /// Greedy interlacing-family paving plus verification.
    Pave,
    /// One partition paving k PSD contractions at once.
    PaveSim,
    /// Barrier certificate for the maxroot bound of psi.
    Certify,
    /// Three-route mu and differential-oracle psi agreement on one instance.
    OracleCheck,
    /// The full acceptance suite.
    Suite {
        /// A tenth of the default case counts.
        #[arg(long)]
        quick: bool,
        /// Worker count of the second, comparison run.
        #[arg(long, default_value_t = 1)]
        alt_threads: usize,
    },
}

/// Exit statuses: 0 success, 1 assertion failure, 2 hypothesis not applicable, 3 invalid input.
#[derive(Clone, Copy)]
enum Status {
    Ok = 0,
    Failed = 1,
    NotApplicable = 2,
    Invalid = 3,
}

fn error_status(e: &Error) -> Status {
    match e {
        Error::HypothesisOutOfRange(_) => Status::NotApplicable,
        Error::InvalidInput(_)
        | Error::Json(_)
        | Error::Csv(_)
        | Error::DimensionMismatch(_)
        | Error::DegreeMismatch(_)
        | Error::InvalidPartition(_)
        | Error::Infeasible(_)
        | Error::NotPsd { .. }
        | Error::NotContraction(_)
        | Error::RankTooHigh { .. }
        | Error::InstanceInvalid(_)
        | Error::SizeLimitExceeded(_)
        | Error::WhiteningSingular(_) => Status::Invalid,
        _ => Status::Failed,
    }
}

fn need(v: Option<usize>, name: &str) -> Result<usize> {
    v.ok_or_else(|| Error::InvalidInput(format!("--{name} is required")))
}

fn need_eps(o: &Opts) -> Result<f64> {
    o.eps.ok_or_else(|| Error::InvalidInput("--eps is required".into()))
}

fn say(line: &str) -> Result<()> {
    writeln!(std::io::stdout().lock(), "{line}")?;
    Ok(())
}

fn emit(o: &Opts, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match &o.out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => say(&text)?,
    }
    Ok(())
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn input_is_exact(v: &Value, o: &Opts) -> bool {
    match v.get("mode").and_then(Value::as_str) {
        Some(m) => m == "exact",
        None => matches!(o.mode, ModeArg::Exact),
    }
}

/// The instance named by `--input`, or a generated one.
enum AnyInstance {
    Float(DecompositionInstance<f64>),
    Exact(DecompositionInstance<BigRational>),
}

fn load_instance(o: &Opts) -> Result<AnyInstance> {
    if let Some(path) = &o.input {
        let mut v = read_json(path)?;
        if let Some(r) = o.r {
            v["r"] = json!(r);
        }
        return Ok(if input_is_exact(&v, o) {
            AnyInstance::Exact(DecompositionInstance::from_json(&v)?)
        } else {
            AnyInstance::Float(DecompositionInstance::from_json(&v)?)
        });
    }
    let (d, m, k) = (need(o.d, "d")?, need(o.m, "m")?, need(o.k, "k")?);
    let r = o.r.unwrap_or(2);
    Ok(match o.mode {
        ModeArg::Float => AnyInstance::Float(generate_instance(o.seed, d, m, k, need_eps(o)?, r)?),
        ModeArg::Exact => {
            let inst = generate_exact_instance(o.seed, d, m, k, true)?;
            AnyInstance::Exact(DecompositionInstance::new(inst.system().clone(), r)?)
        }
    })
}

fn gen(o: &Opts) -> Result<Status> {
    let v = match load_instance(o)? {
        AnyInstance::Float(i) => i.to_json(),
        AnyInstance::Exact(i) => i.to_json(),
    };
    emit(o, &v)?;
    Ok(Status::Ok)
}

fn mu_generic<T: Scalar>(o: &Opts, inst: &DecompositionInstance<T>) -> Result<Status> {
    let mu = mu_of_system(inst.system(), o.override_size_gate)?;
    let report = maxroot_report(&mu, inst)?;
    let roots = mu.roots()?;
    emit(o, &json!({ "coefficients": mu.to_json(), "roots": roots.roots, "report": report }))?;
    Ok(if report.ensure().is_err() {
        Status::Failed
    } else if report.upper_ok.is_none() {
        Status::NotApplicable
    } else {
        Status::Ok
    })
}

fn mu(o: &Opts) -> Result<Status> {
    match load_instance(o)? {
        AnyInstance::Float(i) => mu_generic(o, &i),
        AnyInstance::Exact(i) => mu_generic(o, &i),
    }
}

fn psi_generic<T: Scalar>(o: &Opts, a: &HermitianMatrix<T>, k: usize) -> Result<Status> {
    if k == 0 || a.dim() % k != 0 {
        return Err(Error::InvalidInput(format!("matrix size {} is not a multiple of k = {k}", a.dim())));
    }
    let ctx = KmContext::new(k, a.dim() / k)?.with_override(o.override_size_gate);
    let psi = km_char_poly_route(a, &ctx, choose_route(&ctx, a.dim()))?;
    let roots = psi.roots()?;
    emit(o, &json!({ "k": k, "m": ctx.m, "coefficients": psi.to_json(), "roots": roots.roots, "residual_imag": roots.residual_imag }))?;
    Ok(Status::Ok)
}

fn psi(o: &Opts) -> Result<Status> {
    let k = need(o.k, "k")?;
    if let Some(path) = &o.input {
        let v = read_json(path)?;
        return if input_is_exact(&v, o) {
            psi_generic(o, &HermitianMatrix::<BigRational>::from_json(&v)?, k)
        } else {
            psi_generic(o, &HermitianMatrix::<f64>::from_json(&v)?, k)
        };
    }
    let m = need(o.m, "m")?;
    let mut rng = rng_from_seed(o.seed);
    match o.mode {
        ModeArg::Float => psi_generic(o, &random_hermitian(&mut rng, k * m), k),
        ModeArg::Exact => psi_generic(o, &ksr_paving::instance::random_rational_hermitian(&mut rng, k * m, true), k),
    }
}

fn bounds_cmd(o: &Opts) -> Result<Status> {
    let table = bound_table(&default_grid(), &default_etas());
    match &o.out {
        Some(path) => {
            table.write_csv(std::fs::File::create(path)?)?;
            table.write_eta_csv(std::fs::File::create(path.with_extension("eta.csv"))?)?;
        }
        None => {
            let stdout = std::io::stdout();
            table.write_csv(stdout.lock())?;
            say("")?;
            table.write_eta_csv(stdout.lock())?;
        }
    }
    Ok(Status::Ok)
}

fn pave_generic<T: Scalar>(o: &Opts, inst: &DecompositionInstance<T>) -> Result<Status> {
    let (mut report, _) = pave(inst)?;
    let small = (inst.r() as u64).checked_pow(inst.m() as u32).is_some_and(|n| n <= EXHAUSTIVE_GATE);
    if small {
        report.exhaustive_norm = Some(exhaustive_pave(inst)?.1);
    }
    emit(o, &report)?;
    Ok(match report.bound_ok {
        Some(true) => Status::Ok,
        Some(false) => Status::Failed,
        None => Status::NotApplicable,
    })
}

fn pave_cmd(o: &Opts) -> Result<Status> {
    match load_instance(o)? {
        AnyInstance::Float(i) => pave_generic(o, &i),
        AnyInstance::Exact(i) => pave_generic(o, &i),
    }
}

fn pave_sim(o: &Opts) -> Result<Status> {
    let r = o.r.unwrap_or(2);
    let list: Vec<HermitianMatrix<f64>> = match &o.input {
        Some(path) => read_json(path)?["matrices"]
            .as_array()
            .ok_or_else(|| Error::InvalidInput("expected {\"matrices\": [...]}".into()))?
            .iter()
            .map(HermitianMatrix::from_json)
            .collect::<Result<_>>()?,
        None => {
            let (k, m) = (o.k.unwrap_or(2), need(o.m, "m")?);
            let alpha = need_eps(o)?;
            let mut rng = rng_from_seed(o.seed);
            (0..k).map(|_| random_gram_contraction(&mut rng, m, m, alpha)).collect()
        }
    };
    let report = pave_simultaneous(&list, r)?;
    emit(o, &report)?;
    Ok(if report.ok { Status::Ok } else { Status::Failed })
}

fn certify(o: &Opts) -> Result<Status> {
    let (a, k) = match &o.input {
        Some(path) => (HermitianMatrix::<f64>::from_json(&read_json(path)?)?, need(o.k, "k")?),
        None => match load_instance(o)? {
            AnyInstance::Float(i) => (i.system().gram_matrix(), i.k()),
            AnyInstance::Exact(i) => (i.system().gram_matrix().to_f64(), i.k()),
        },
    };
    if k == 0 || a.dim() % k != 0 {
        return Err(Error::InvalidInput(format!("matrix size {} is not a multiple of k = {k}", a.dim())));
    }
    let ctx = KmContext::new(k, a.dim() / k)?.with_override(o.override_size_gate);
    let cert = certify_maxroot_bound(&a, &ctx)?;
    emit(o, &cert)?;
    Ok(Status::Ok)
}

fn oracle_check(o: &Opts) -> Result<Status> {
    let (mu_ok, psi_ok) = match o.mode {
        ModeArg::Exact => oracle_check_exact(o.seed, need(o.d, "d")?, need(o.m, "m")?, need(o.k, "k")?)?,
        ModeArg::Float => match load_instance(o)? {
            AnyInstance::Float(i) => oracle_check_float(&i)?,
            AnyInstance::Exact(i) => oracle_check_float(&i.to_f64())?,
        },
    };
    emit(o, &json!({ "mu_routes_agree": mu_ok, "psi_oracle_agrees": psi_ok }))?;
    Ok(if mu_ok && psi_ok { Status::Ok } else { Status::Failed })
}

fn suite(o: &Opts, quick: bool, alt_threads: usize) -> Result<Status> {
    let mut cfg = if quick { SuiteConfig::quick(o.seed) } else { SuiteConfig::new(o.seed) };
    cfg.mode = match o.mode {
        ModeArg::Float => Mode::Float,
        ModeArg::Exact => Mode::Exact,
    };
    cfg.eps_override = o.eps;
    let threads = o.threads.unwrap_or_else(rayon::current_num_threads);
    let report = run_suite(&cfg, threads, alt_threads)?;
    for c in &report.criteria {
        say(&c.line())?;
        for note in &c.notes {
            say(&format!("        {note}"))?;
        }
    }
    if let Some(dir) = &o.out {
        report.write_artifacts(dir)?;
    }
    Ok(match report.exit_code() {
        0 => Status::Ok,
        2 => Status::NotApplicable,
        _ => Status::Failed,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { Status::Invalid as u8 } else { 0 };
            return ExitCode::from(code);
        }
    };
    let o = &cli.opts;
    if let Some(n) = o.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: invalid --threads {n}");
            return ExitCode::from(Status::Invalid as u8);
        }
    }
    let result = match &cli.command {
        Command::Gen => gen(o),
        Command::Mu => mu(o),
        Command::Psi => psi(o),
        Command::Bounds => bounds_cmd(o),
        Command::Pave => pave_cmd(o),
        Command::PaveSim => pave_sim(o),
        Command::Certify => certify(o),
        Command::OracleCheck => oracle_check(o),
        Command::Suite { quick, alt_threads } => suite(o, *quick, *alt_threads),
    };
    let status = result.unwrap_or_else(|e| match e {
        // A closed downstream pipe (`ksr bounds | head`) is not a failure.
        Error::Io(ref io) if io.kind() == std::io::ErrorKind::BrokenPipe => Status::Ok,
        _ => {
            eprintln!("error: {e}");
            error_status(&e)
        }
    });
    ExitCode::from(status as u8)
}
