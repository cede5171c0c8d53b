use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use privlp::experiments::{accuracy_study, run_sweep, to_csv, Experiment, SweepConfig};
use privlp::lp::Components;
use privlp::mdp::{build_gridworld, build_occupancy_lp, hazard_cost, policy_from_occupancy, value_of_policy, GridworldConfig};
use privlp::privacy::{substream, SupportVariant};
use privlp::privatizer::{privatize_with, solve_privatized};
use privlp::{solve, Error, InstanceFile, PrivacyBudget, PrivatizeOptions};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "privlp", version, about = "Differentially private linear programs with guaranteed feasibility")]
struct Cli {
    /// Master seed for all random draws.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte-Carlo trials per point.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON configuration: a sweep config for `sweep`, a gridworld for
    /// `cmdp`, a privacy budget otherwise.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct BudgetArgs {
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Budget weights `α_A,α_b,α_c`.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    alpha: Option<Vec<f64>>,
    /// Privatized components, e.g. `A,b,c` or `A,c`.
    #[arg(long, default_value = "A,b,c")]
    components: String,
    /// `lemma` or `algorithm1` support widths.
    #[arg(long, default_value = "lemma")]
    support_variant: SupportVariant,
    /// Skip the shifts and clamps (not feasibility preserving).
    #[arg(long)]
    unclamped: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Privatize an instance and print the private program with its provenance.
    Privatize {
        instance: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Solve an instance, optionally after privatizing it.
    Solve {
        instance: PathBuf,
        #[arg(long)]
        private: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Run a Monte-Carlo sweep and print CSV.
    Sweep {
        /// ad_eps, ad_size, budget or cmdp; ignored with --config.
        #[arg(long, default_value = "ad_eps")]
        experiment: String,
    },
    /// Compare empirical error with the accuracy bound on one instance.
    Accuracy {
        instance: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Concentration thresholds.
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.05")]
        t: Vec<f64>,
        /// Trials used for the empirical Hoffman lower bound.
        #[arg(long, default_value_t = 200)]
        hoffman_trials: usize,
    },
    /// Private policy synthesis on the hazard gridworld.
    Cmdp {
        #[arg(long, value_delimiter = ',', default_value = "1")]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// Budget weights `α_A,α_b`.
        #[arg(long, value_delimiter = ',', num_args = 2, default_value = "0.99,0.01")]
        alpha: Vec<f64>,
    },
    /// Check an instance and its sensitivity profile.
    Validate { instance: PathBuf },
}

impl Cli {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

enum Failure {
    Usage(String),
    Io(String),
    Falsified(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) => Failure::Io(e.to_string()),
            Error::FeasibilityViolated(_) => Failure::Falsified(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            println!("{}", text.trim_end());
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> CliResult<String> {
    serde_json::to_string_pretty(v).map_err(|e| Failure::Usage(e.to_string()))
}

fn load_instance(path: &Path) -> CliResult<InstanceFile> {
    Ok(InstanceFile::from_json(&read(path)?)?)
}

fn budget_of(cli: &Cli, args: &BudgetArgs) -> CliResult<(PrivacyBudget, Components, PrivatizeOptions)> {
    let components = Components::parse(&args.components)?;
    let budget = match &cli.config {
        Some(p) => serde_json::from_str::<PrivacyBudget>(&read(p)?).map_err(|e| Failure::Usage(e.to_string()))?,
        None => {
            let alpha = match &args.alpha {
                Some(a) => [a[0], a[1], a[2]],
                None => {
                    let k = [components.a, components.b, components.c].iter().filter(|&&v| v).count().max(1) as f64;
                    let w = |on: bool| if on { 1.0 / k } else { 0.0 };
                    [w(components.a), w(components.b), w(components.c)]
                }
            };
            PrivacyBudget { eps: args.eps, delta: args.delta, alpha_a: alpha[0], alpha_b: alpha[1], alpha_c: alpha[2] }
        }
    };
    budget.validate_for(components)?;
    let options = PrivatizeOptions { support_variant: args.support_variant, disable_shift_and_clamp: args.unclamped };
    Ok((budget, components, options))
}

fn profile_of(file: &InstanceFile) -> CliResult<&privlp::SensitivityProfile> {
    file.sensitivity
        .as_ref()
        .ok_or_else(|| Failure::Usage("instance has no `sensitivity` object".into()))
}

#[derive(Serialize)]
struct CmdpOutput {
    value_optimal: f64,
    hazard_cost_optimal: f64,
    f0: f64,
    rows: Vec<privlp::experiments::SweepRow>,
}

#[derive(Serialize)]
struct ValidateOutput {
    valid: bool,
    problems: Vec<String>,
}

fn run(cli: &Cli) -> CliResult<()> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Privatize { instance, budget } => {
            let file = load_instance(instance)?;
            let (b, comps, opts) = budget_of(cli, budget)?;
            let private = privatize_with(&file.lp, profile_of(&file)?, &b, comps, opts, &mut substream(cli.seed(), 0, 0))?;
            emit(out, &json(&private)?)
        }
        Command::Solve { instance, private, budget } => {
            let file = load_instance(instance)?;
            let result = if *private {
                let (b, comps, opts) = budget_of(cli, budget)?;
                let p = privatize_with(&file.lp, profile_of(&file)?, &b, comps, opts, &mut substream(cli.seed(), 0, 0))?;
                solve_privatized(&file.lp, &p)?
            } else {
                solve(&file.lp)?
            };
            emit(out, &json(&result)?)
        }
        Command::Sweep { experiment } => {
            let mut cfg = match &cli.config {
                Some(p) => SweepConfig::from_json(&read(p)?)?,
                None => {
                    let e: Experiment = serde_json::from_value(serde_json::Value::String(experiment.clone()))
                        .map_err(|_| Failure::Usage(format!("unknown experiment `{experiment}`")))?;
                    SweepConfig::new(e)
                }
            };
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            if let Some(s) = cli.samples {
                cfg.samples = s;
            }
            let table = run_sweep(&cfg)?;
            let target = out.map(Path::to_path_buf).or_else(|| cfg.out.as_ref().map(PathBuf::from));
            emit(target.as_deref(), &to_csv(&table)?)?;
            let violations = table.total_violations();
            if violations > 0 && !cfg.options.disable_shift_and_clamp {
                return Err(Failure::Falsified(format!("{violations} trials violated the original constraints")));
            }
            Ok(())
        }
        Command::Accuracy { instance, budget, t, hoffman_trials } => {
            let file = load_instance(instance)?;
            let (b, comps, opts) = budget_of(cli, budget)?;
            let summary = accuracy_study(
                &file.lp,
                profile_of(&file)?,
                &b,
                comps,
                opts,
                cli.samples.unwrap_or(1000),
                cli.seed(),
                t,
                *hoffman_trials,
            )?;
            emit(out, &json(&summary)?)?;
            if summary.violations > 0 && !opts.disable_shift_and_clamp {
                return Err(Failure::Falsified(format!("{} trials violated the original constraints", summary.violations)));
            }
            Ok(())
        }
        Command::Cmdp { eps, delta, alpha } => {
            let gw = match &cli.config {
                Some(p) => serde_json::from_str::<GridworldConfig>(&read(p)?).map_err(|e| Failure::Usage(e.to_string()))?,
                None => GridworldConfig::default(),
            };
            let spec = build_gridworld(&gw)?;
            let lp = build_occupancy_lp(&spec)?;
            let r = solve(&lp)?;
            if !r.is_optimal() {
                return Err(Failure::Usage("the nominal CMDP has no optimal policy".into()));
            }
            let value_optimal = value_of_policy(&spec, &policy_from_occupancy(r.x(), spec.p, spec.q)?, gw.cell(gw.start))?;
            let mut cfg = SweepConfig::new(Experiment::Cmdp);
            cfg.gridworld = gw;
            cfg.eps_values = Some(eps.clone());
            cfg.delta = *delta;
            cfg.alpha = Some([alpha[0], alpha[1], 0.0]);
            cfg.seed = cli.seed();
            cfg.samples = cli.samples.unwrap_or(200);
            let table = run_sweep(&cfg)?;
            let violations = table.total_violations();
            emit(
                out,
                &json(&CmdpOutput {
                    value_optimal,
                    hazard_cost_optimal: hazard_cost(&spec, r.x()),
                    f0: spec.f0,
                    rows: table.rows,
                })?,
            )?;
            if violations > 0 {
                return Err(Failure::Falsified(format!("{violations} private policies violated the hazard constraint")));
            }
            Ok(())
        }
        Command::Validate { instance } => {
            let file = load_instance(instance)?;
            let problems = match &file.sensitivity {
                Some(p) => privlp::validate_profile(&file.lp, p),
                None => Vec::new(),
            };
            let valid = problems.is_empty();
            emit(out, &json(&ValidateOutput { valid, problems })?)?;
            if valid {
                Ok(())
            } else {
                Err(Failure::Usage("sensitivity profile is inconsistent".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Usage(m) => (1, m),
                Failure::Io(m) => (2, m),
                Failure::Falsified(m) => (3, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
