use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fracsplit::harness::csv::{trace_csv, write_experiment};
use fracsplit::harness::verify::{self, SuiteReport};
use fracsplit::harness::{
    run_experiment, run_method, Algorithm, ExperimentConfig, MethodConfig, Overrides,
};
use fracsplit::problems::{read_instance, write_instance, GeneratorSpec, Instance};
use fracsplit::solvers::RunOptions;
use fracsplit::{Error, Result, StopRule, Vector};

/// Fixed-point subgradient splitting for fractional programs.
#[derive(Parser)]
#[command(name = "fracsplit", version)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance file.
    Generate {
        #[command(flatten)]
        spec: SpecArgs,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one method on one instance and write its trace CSV.
    Solve {
        /// Instance file; otherwise one is generated from the spec flags.
        #[arg(long, conflicts_with = "family")]
        instance: Option<PathBuf>,
        #[command(flatten)]
        spec: SpecArgs,
        /// fssm, afssm, ifssm or dinkelbach.
        #[arg(long)]
        method: Algorithm,
        /// Step schedule: const:η, harmonic:c or power:c,p.
        #[arg(long)]
        eta: Option<String>,
        /// Stop rule: any of iters:N, time:S, rel:ε, residual:tol joined by `|`.
        #[arg(long)]
        stop: String,
        /// cyclic or simultaneous.
        #[arg(long)]
        operator: Option<String>,
        /// Constant start value; the family default otherwise.
        #[arg(long)]
        start: Option<f64>,
        /// Trace CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a full experiment and write trace, curve and summary CSVs.
    Bench(BenchArgs),
    /// Run the diagnostic suites.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// all, operators, subgradients, descent or rate.
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long)]
    family: Option<String>,
    #[arg(long, default_value_t = 0)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    p: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SpecArgs {
    fn generate(&self) -> Result<Instance> {
        let family = self
            .family
            .as_deref()
            .ok_or_else(|| Error::Config("--family is required".into()))?
            .parse()?;
        GeneratorSpec::new(family, self.k, self.m, self.p, self.seed).generate()
    }
}

#[derive(Args)]
struct BenchArgs {
    /// TOML experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Keep only this method, or add one running this algorithm.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    eta: Option<String>,
    #[arg(long)]
    stop: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trial worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
}

impl BenchArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            family: self.family.clone(),
            k: self.k,
            m: self.m,
            p: self.p,
            seed: self.seed,
            trials: self.trials,
            method: self.method.clone(),
            eta: self.eta.clone(),
            stop: self.stop.clone(),
            out: self.out.clone(),
            workers: self.workers,
        }
    }
}

fn emit(out: Option<&PathBuf>, body: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, body)?,
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn solve(
    instance: Option<PathBuf>,
    spec: SpecArgs,
    method: Algorithm,
    eta: Option<String>,
    stop: String,
    operator: Option<String>,
    start: Option<f64>,
    out: Option<PathBuf>,
) -> Result<()> {
    let instance = match instance {
        Some(path) => read_instance(&std::fs::read_to_string(&path)?)?,
        None => spec.generate()?,
    };
    let stop: StopRule = stop.parse()?;
    stop.validate()?;
    let mut cfg = MethodConfig::new(method.to_string(), method);
    cfg.eta = eta;
    cfg.operator = operator;
    if method != Algorithm::Dinkelbach && cfg.schedule()?.is_none() {
        return Err(Error::Config(format!("--eta is required for {method}")));
    }
    let x1 = match start {
        Some(v) => Vector::from_element(instance.dim(), v),
        None => instance.default_start(),
    };
    let run = run_method(&instance, &cfg, &stop, x1, &RunOptions::default())?;
    emit(out.as_ref(), &trace_csv(&run.trace))?;
    eprintln!(
        "fracsplit: solved family={} method={} iterations={} objective={:?} feasibility={:?} status={}",
        instance.family(),
        method,
        run.iterations,
        run.final_obj,
        run.final_feas,
        run.trace.status.map_or("none".to_string(), |s| s.to_string())
    );
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let overrides = args.overrides();
    let cfg = match &args.config {
        Some(path) => {
            let mut cfg = ExperimentConfig::load(path)?;
            cfg.apply(&overrides)?;
            cfg
        }
        None => ExperimentConfig::from_overrides(&overrides)?,
    };
    let result = run_experiment(&cfg)?;
    let written = write_experiment(&result, &cfg.out)?;
    for s in &result.summaries {
        eprintln!(
            "fracsplit: method={} trials_ok={} trials_failed={} mean_iters={} mean_final_obj={:?}",
            s.method, s.trials_ok, s.trials_failed, s.mean_iters, s.mean_final_obj
        );
    }
    eprintln!(
        "fracsplit: wrote {} files to {}",
        written.len(),
        cfg.out.display()
    );
    Ok(())
}

fn verify_suites(seed: u64, suite: &str) -> Result<Vec<SuiteReport>> {
    Ok(match suite {
        "all" => verify::default_suites(seed)?,
        "operators" => vec![verify::operator_suite(1000, seed, 1e-10)?],
        "subgradients" => {
            let (a, b) = verify::subgradient_suite(1000, 100, seed, 1e-9, 1e-5)?;
            vec![a, b]
        }
        "descent" => vec![verify::descent_suite(10, 10_000, seed, 1e-9)?],
        "rate" => vec![verify::rate_suite(&[1e-2, 1e-3], 1000, 5, seed)?],
        other => return Err(Error::Config(format!("unknown suite '{other}'"))),
    })
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Generate { spec, out } => {
            emit(out.as_ref(), &write_instance(&spec.generate()?))?;
        }
        Command::Solve {
            instance,
            spec,
            method,
            eta,
            stop,
            operator,
            start,
            out,
        } => solve(instance, spec, method, eta, stop, operator, start, out)?,
        Command::Bench(args) => bench(args)?,
        Command::Verify { seed, suite } => {
            let reports = verify_suites(seed, &suite)?;
            for r in &reports {
                println!("{r}");
            }
            return Ok(reports.iter().all(|r| r.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("fracsplit: error[verify_failed]: one or more diagnostic suites failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("fracsplit: error[{}]: {e}", e.code());
            ExitCode::from(match e {
                Error::Config(_) | Error::InvalidSpec(_) | Error::Format { .. } => 2,
                Error::Io(_) => 3,
                _ => 4,
            })
        }
    }
}
