use clap::{Args, Parser, Subcommand};
use hetcd::bench::{
    run_citest_bench, run_pc_bench, write_results_csv, BenchVariant, DriverSetting, ExperimentConfig, Placement,
    ShapeSetting,
};
use hetcd::commands::{
    run_ci_single, run_simulate, selftest, write_atomic, CiSingleRequest, RandomScm, ScmSource, SimulateRequest,
};
use hetcd::Error;
use serde::de::DeserializeOwned;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "hetcd",
    version,
    about = "Heteroskedasticity-aware CI testing and PC causal discovery"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// KS and AUPC of the CI-test variants on the confounded three-variable model.
    CitestBench(BenchArgs),
    /// PC-stable graph recovery on random heteroskedastic SCMs.
    PcBench(BenchArgs),
    /// Sample an SCM (from JSON or random) and write CSV.
    Simulate(SimArgs),
    /// One CI test on a CSV file; prints the result as JSON.
    CiSingle(CiArgs),
    /// Quick internal consistency checks.
    Selftest,
}

fn named<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

#[derive(Args)]
struct BenchArgs {
    /// JSON config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Results CSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    strengths: Option<Vec<f64>>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    lambda: Option<usize>,
    /// Comma list of ols, wls-estimated, wls-groundtruth.
    #[arg(long, value_delimiter = ',', value_parser = named::<BenchVariant>)]
    variants: Option<Vec<BenchVariant>>,
    /// x-only, both or random-graph.
    #[arg(long, value_parser = named::<Placement>)]
    placement: Option<Placement>,
    /// linear, periodic or random.
    #[arg(long, value_parser = named::<ShapeSetting>)]
    shape: Option<ShapeSetting>,
    /// parent, sampling-index or random.
    #[arg(long, value_parser = named::<DriverSetting>)]
    driver: Option<DriverSetting>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    hetero_fraction: Option<f64>,
    #[arg(long)]
    bootstrap: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl BenchArgs {
    fn config(self, base: ExperimentConfig) -> Result<ExperimentConfig, Error> {
        // config-file fields are laid over the subcommand's defaults
        let mut c = match &self.config {
            Some(p) => {
                let bad = |e: serde_json::Error| Error::Config(format!("{}: {e}", p.display()));
                let file: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p)?).map_err(bad)?;
                let serde_json::Value::Object(fields) = file else {
                    return Err(Error::Config(format!("{}: expected a JSON object", p.display())));
                };
                let mut merged = serde_json::to_value(&base)?;
                merged.as_object_mut().expect("config is an object").extend(fields);
                serde_json::from_value(merged).map_err(bad)?
            }
            None => base.clone(),
        };
        if c.kind != base.kind {
            return Err(Error::Config(format!(
                "config kind {:?} does not match the subcommand",
                c.kind
            )));
        }
        macro_rules! set {
            ($($flag:ident => $field:ident),*) => {
                $(if let Some(v) = self.$flag { c.$field = v; })*
            };
        }
        set!(strengths => strengths, reps => replications, n => n, alpha => alpha, lambda => lambda,
             variants => variants, placement => placement, shape => shape, driver => driver, d => d, m => m,
             hetero_fraction => hetero_fraction, bootstrap => bootstrap, seed => master_seed);
        if self.out.is_some() {
            c.output = self.out;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Args)]
struct SimArgs {
    /// SCM JSON; a random SCM is drawn when omitted.
    #[arg(long)]
    scm: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Also write the true noise standard deviations.
    #[arg(long)]
    sigma_out: Option<PathBuf>,
    /// Also write the SCM as JSON.
    #[arg(long)]
    scm_out: Option<PathBuf>,
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    d: usize,
    #[arg(long, default_value_t = 10)]
    m: usize,
    #[arg(long, default_value_t = 0.0)]
    strength: f64,
    #[arg(long, default_value_t = 0.3)]
    hetero_fraction: f64,
    #[arg(long, default_value = "random", value_parser = named::<ShapeSetting>)]
    shape: ShapeSetting,
    #[arg(long, default_value = "random", value_parser = named::<DriverSetting>)]
    driver: DriverSetting,
    #[arg(long, default_value_t = 0.5)]
    coefficient: f64,
}

#[derive(Args)]
struct CiArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    /// Comma list of conditioning variables.
    #[arg(long, value_delimiter = ',')]
    cond: Vec<String>,
    /// Expert-knowledge JSON; without it the OLS variant runs.
    #[arg(long)]
    knowledge: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    lambda: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
}

fn bench(args: BenchArgs, base: ExperimentConfig) -> Result<(), Error> {
    let cfg = args.config(base)?;
    let rows = match cfg.kind {
        hetcd::bench::ExperimentKind::PcBench => run_pc_bench(&cfg)?,
        _ => run_citest_bench(&cfg)?,
    };
    match &cfg.output {
        Some(p) => write_atomic(p, |w| write_results_csv(w, &rows)),
        None => write_results_csv(std::io::stdout().lock(), &rows),
    }
}

fn run(cmd: Cmd) -> Result<bool, Error> {
    match cmd {
        Cmd::CitestBench(a) => bench(a, ExperimentConfig::citest())?,
        Cmd::PcBench(a) => bench(a, ExperimentConfig::pc())?,
        Cmd::Simulate(a) => {
            let source = match a.scm {
                Some(p) => ScmSource::File(p),
                None => ScmSource::Random(RandomScm {
                    d: a.d,
                    m: a.m,
                    hetero_fraction: a.hetero_fraction,
                    strength: a.strength,
                    shape: a.shape,
                    driver: a.driver,
                    coefficient: a.coefficient,
                }),
            };
            run_simulate(&SimulateRequest {
                source,
                n: a.n,
                seed: a.seed,
                data_out: a.out,
                sigma_out: a.sigma_out,
                spec_out: a.scm_out,
            })?;
        }
        Cmd::CiSingle(a) => {
            let r = run_ci_single(&CiSingleRequest {
                data: a.data,
                x: a.x,
                y: a.y,
                cond: a.cond,
                knowledge: a.knowledge,
                lambda: a.lambda,
                alpha: a.alpha,
            })?;
            println!("{}", serde_json::to_string_pretty(&r)?);
        }
        Cmd::Selftest => {
            let checks = selftest();
            for c in &checks {
                println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
            }
            return Ok(checks.iter().all(|c| c.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
