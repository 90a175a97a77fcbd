use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qpainleve::acceptance::acceptance_report;
use qpainleve::diffop::{build_cp_hamiltonian, build_nagoya_single, Table1Mode};
use qpainleve::error::{Error, Result};
use qpainleve::params::{parse_params_into, Family, ParamSet};
use qpainleve::radial::{build_radial_hamiltonian, RadialForm};
use qpainleve::report::{Report, SCHEMA_VERSION};
use qpainleve::task::{integral_parameters, run, TaskKind, VerifyTask};

/// Exact and high-precision checks of quantized Calogero-Painleve Hamiltonians.
#[derive(Parser, Debug)]
#[command(name = "qpainleve", version, about)]
struct Cli {
    /// Seed for random points and trials
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Working precision in bits for the numeric path
    #[arg(long, global = true)]
    prec: Option<u32>,
    /// Write only the JSON report (no summary on stderr)
    #[arg(long, global = true)]
    json: bool,
    /// Record per-check timings in milliseconds
    #[arg(long, global = true)]
    timings: bool,
    /// `key = value` file with defaults for any flag
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Run one verification task
    Verify {
        what: VerifyWhat,
        #[command(flatten)]
        args: TaskArgs,
    },
    /// Print a serialized operator
    Print {
        what: PrintWhat,
        #[command(flatten)]
        args: TaskArgs,
    },
    /// Numeric oracle duties
    Oracle {
        what: OracleWhat,
        #[command(flatten)]
        args: TaskArgs,
    },
    /// Run a named suite
    Suite {
        #[arg(long, default_value = "acceptance")]
        suite: String,
        /// Comma-separated subset of criteria (default: all)
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u32>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VerifyWhat {
    Weyl,
    Eom,
    ZeroCurvature,
    Radial,
    Gauge,
    Table1,
    N1,
    Pde,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PrintWhat {
    Hamiltonian,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OracleWhat {
    Moments,
}

#[derive(Args, Debug, Default, Clone)]
struct TaskArgs {
    #[arg(long)]
    family: Option<String>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    hbar: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<String>,
    /// Family parameters, e.g. `b=-1/3,c=-1/5`
    #[arg(long, allow_hyphen_values = true)]
    params: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    /// symbolic|numeric for `pde`, ungauged|gauged for `table1`
    #[arg(long)]
    mode: Option<String>,
    /// Power of the gauge family
    #[arg(long)]
    a: Option<u32>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// cp|radial|nagoya for `print hamiltonian`
    #[arg(long)]
    kind: Option<String>,
    /// reduced|gauged radial form for `print hamiltonian --kind radial`
    #[arg(long)]
    form: Option<String>,
}

struct Settings {
    seed: u64,
    prec: u32,
    json: bool,
    timings: bool,
}

fn read_config(path: &PathBuf) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("{}:{}: expected `key = value`", path.display(), i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse(format!("bad value `{v}` for `{key}`")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Parse(format!("bad value `{v}` for `{key}`"))),
    }
}

/// Fills unset flags from the config file; flags given on the command line win.
fn merge_config(cli: &mut Cli, args: &mut TaskArgs, cfg: &BTreeMap<String, String>) -> Result<()> {
    for (k, v) in cfg {
        let v = v.as_str();
        match k.as_str() {
            "seed" => cli.seed = cli.seed.or(Some(parse_value(k, v)?)),
            "prec" => cli.prec = cli.prec.or(Some(parse_value(k, v)?)),
            "json" => cli.json |= parse_bool(k, v)?,
            "timings" => cli.timings |= parse_bool(k, v)?,
            "family" => args.family = args.family.take().or(Some(v.into())),
            "N" => args.n = args.n.or(Some(parse_value(k, v)?)),
            "m" => args.m = args.m.or(Some(parse_value(k, v)?)),
            "hbar" => args.hbar = args.hbar.take().or(Some(v.into())),
            "t" => args.t = args.t.take().or(Some(v.into())),
            "kappa" => args.kappa = args.kappa.take().or(Some(v.into())),
            "params" => args.params = args.params.take().or(Some(v.into())),
            "trials" => args.trials = args.trials.or(Some(parse_value(k, v)?)),
            "mode" => args.mode = args.mode.take().or(Some(v.into())),
            "a" => args.a = args.a.or(Some(parse_value(k, v)?)),
            "kmax" => args.kmax = args.kmax.or(Some(parse_value(k, v)?)),
            "tol" => args.tol = args.tol.or(Some(parse_value(k, v)?)),
            "kind" => args.kind = args.kind.take().or(Some(v.into())),
            "form" => args.form = args.form.take().or(Some(v.into())),
            other => return Err(Error::Usage(format!("unknown config key `{other}`"))),
        }
    }
    Ok(())
}

fn param_set(args: &TaskArgs) -> Result<ParamSet> {
    let mut p = ParamSet::default();
    if let Some(text) = &args.params {
        parse_params_into(&mut p, text)?;
    }
    if let Some(f) = &args.family {
        p.family = Some(f.parse()?);
    }
    p.n = args.n.or(p.n);
    p.m = args.m.or(p.m);
    for (key, val) in [("hbar", &args.hbar), ("t", &args.t), ("kappa", &args.kappa)] {
        if let Some(v) = val {
            p.set(key, v)?;
        }
    }
    Ok(p)
}

fn task_for(kind: TaskKind, args: &TaskArgs, s: &Settings) -> Result<VerifyTask> {
    let mut task = VerifyTask::new(kind, param_set(args)?);
    task.trials = args.trials;
    task.seed = s.seed;
    task.prec = s.prec;
    task.gauge_a = args.a;
    task.kmax = args.kmax.unwrap_or(6);
    task.tol = args.tol;
    task.timings = s.timings;
    if kind == TaskKind::Table1 {
        task.table_mode = args.mode.as_deref().map(str::parse::<Table1Mode>).transpose()?;
    }
    Ok(task)
}

fn verify_kind(what: VerifyWhat, args: &TaskArgs) -> Result<TaskKind> {
    Ok(match what {
        VerifyWhat::Weyl => TaskKind::Weyl,
        VerifyWhat::Eom => TaskKind::Eom,
        VerifyWhat::ZeroCurvature => TaskKind::ZeroCurvature,
        VerifyWhat::Radial => TaskKind::Radial,
        VerifyWhat::Gauge => TaskKind::Gauge,
        VerifyWhat::Table1 => TaskKind::Table1,
        VerifyWhat::N1 => TaskKind::N1,
        VerifyWhat::Pde => match args.mode.as_deref().unwrap_or("symbolic") {
            "symbolic" => TaskKind::PdeSymbolic,
            "numeric" => TaskKind::PdeNumeric,
            other => return Err(Error::Usage(format!("unknown pde mode `{other}` (expected symbolic or numeric)"))),
        },
    })
}

fn print_hamiltonian(args: &TaskArgs) -> Result<String> {
    let p = param_set(args)?;
    let j: Family = p.family.ok_or_else(|| Error::Usage("missing parameters: family".into()))?;
    let kind = args.kind.as_deref().unwrap_or("cp");
    let need_m = || p.m.ok_or_else(|| Error::Usage("missing parameters: m".into()));
    let need_n = || p.n.ok_or_else(|| Error::Usage("missing parameters: N".into()));
    let op = match kind {
        "cp" => {
            let m = need_m()?;
            let (q, _) = integral_parameters(j, m, &p)?;
            build_cp_hamiltonian(j, need_n()?, m, &q)?
        }
        "nagoya" => {
            let (q, _) = integral_parameters(j, need_m()?, &p)?;
            build_nagoya_single(j, &q)?
        }
        "radial" => {
            let form = match args.form.as_deref().unwrap_or("gauged") {
                "reduced" => RadialForm::Reduced,
                "gauged" => RadialForm::Gauged,
                other => return Err(Error::Usage(format!("unknown radial form `{other}`"))),
            };
            build_radial_hamiltonian(j, need_n()?, &p, form)?
        }
        other => return Err(Error::Usage(format!("unknown hamiltonian kind `{other}` (expected cp, radial or nagoya)"))),
    };
    Ok(op.to_string())
}

/// Writes a line to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn execute(mut cli: Cli) -> Result<ExitCode> {
    let cfg = match &cli.config {
        Some(path) => read_config(path)?,
        None => BTreeMap::new(),
    };
    let mut args = match &cli.cmd {
        Cmd::Verify { args, .. } | Cmd::Print { args, .. } | Cmd::Oracle { args, .. } => args.clone(),
        Cmd::Suite { .. } => TaskArgs::default(),
    };
    merge_config(&mut cli, &mut args, &cfg)?;
    let s = Settings {
        seed: cli.seed.unwrap_or(42),
        prec: cli.prec.unwrap_or(192),
        json: cli.json,
        timings: cli.timings,
    };
    if s.prec < 64 {
        return Err(Error::Usage("--prec must be at least 64 bits".into()));
    }
    let report: Report = match &cli.cmd {
        Cmd::Verify { what, .. } => run(&task_for(verify_kind(*what, &args)?, &args, &s)?)?,
        Cmd::Oracle { what: OracleWhat::Moments, .. } => run(&task_for(TaskKind::OracleMoments, &args, &s)?)?,
        Cmd::Print { what: PrintWhat::Hamiltonian, .. } => {
            let op = print_hamiltonian(&args)?;
            if s.json {
                emit(&json!({ "schema": SCHEMA_VERSION, "operator": op }).to_string());
            } else {
                emit(&op);
            }
            return Ok(ExitCode::SUCCESS);
        }
        Cmd::Suite { suite, criteria } => {
            if suite != "acceptance" {
                return Err(Error::Usage(format!("unknown suite `{suite}` (expected acceptance)")));
            }
            acceptance_report(criteria, s.seed, s.prec, s.timings)?
        }
    };
    emit(&report.to_json());
    if !s.json {
        eprint!("{}", report.summary());
    }
    Ok(ExitCode::from(report.exit_code() as u8))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            emit(&json!({ "schema": SCHEMA_VERSION, "error": e.to_string() }).to_string());
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
