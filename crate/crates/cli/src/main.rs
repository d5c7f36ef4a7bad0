//! Command-line front end for `massreg`.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use massreg::harness::{
    exact_recovery_bench, load_dataset_csv, margin_fraction, sample_synthetic_mixture, write_dataset_csv,
    write_dataset_csv_to, BenchConfig, BenchGrid, Method, SyntheticSpec,
};
use massreg::l1solver::Model;
use massreg::noise::{corrupt_massart, CorruptionStrategy, MassartSpec};
use massreg::relu::{ellipsoid_recover_relu, gd_relu_transformed, EllipsoidConfig, GdMode};
use massreg::{LabeledDataset, RecoveryConfig};

#[derive(Parser)]
#[command(name = "massreg", version, about = "Exact regression under Massart label noise")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the Gaussian-mixture covariates with clean labels from 9e₂ + Σeᵢ.
    Synth(SynthArgs),
    /// Apply a Massart adversary to a dataset.
    Corrupt(CorruptArgs),
    /// Recover a linear parameter with the radial-isotropic ℓ1 pipeline.
    FitLinear(FitLinearArgs),
    /// Recover a ReLU parameter with the ellipsoid method.
    FitRelu(FitReluArgs),
    /// Gradient descent on the ReLU ℓ1 loss under a chosen transform.
    GdRelu(GdReluArgs),
    /// Benchmarks.
    Bench {
        #[command(subcommand)]
        which: BenchCommand,
    },
    /// Evaluation metrics.
    Eval {
        #[command(subcommand)]
        which: EvalCommand,
    },
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Exact-recovery rate over a noise or sample-size grid.
    RecoveryRate(RecoveryRateArgs),
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Fraction of a test set with |w·x − y| ≤ margin.
    Margin(MarginArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Link {
    Linear,
    Relu,
}

impl From<Link> for Model {
    fn from(l: Link) -> Self {
        match l {
            Link::Linear => Model::Linear,
            Link::Relu => Model::Relu,
        }
    }
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "linear")]
    model: Link,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CorruptArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    eta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `gated` (negate when any coordinate exceeds d/2), `flip`, `constant:<v>` or `scale:<c>`.
    #[arg(long, default_value = "gated")]
    strategy: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitLinearArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = massreg::l1solver::DEFAULT_MAX_DENOMINATOR)]
    max_denominator: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report JSON path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitReluArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = massreg::l1solver::DEFAULT_MAX_DENOMINATOR)]
    max_denominator: u64,
    /// Radius of the starting ball; must bound ‖w*‖.
    #[arg(long, default_value_t = 10.0)]
    radius: f64,
    #[arg(long, default_value_t = 20_000)]
    max_steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GdReluArgs {
    #[arg(long)]
    input: PathBuf,
    /// original, normalized, isotropic or radial.
    #[arg(long, default_value = "radial")]
    mode: GdMode,
    /// Step size; defaults to the mode's standard step.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 200)]
    iters: usize,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Comma-separated target used to report distances, e.g. `1,10,1`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    target: Option<Vec<f64>>,
    /// Trajectory CSV (iter,loss,distance).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RecoveryRateArgs {
    #[arg(long, default_value_t = 5)]
    d: usize,
    /// Sample sizes; a single value fixes m for a noise sweep.
    #[arg(long, value_delimiter = ',', default_value = "120")]
    n: Vec<usize>,
    /// Noise rates; a single value fixes η for a sample-size sweep.
    #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.2,0.3,0.4")]
    eta: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = massreg::l1solver::DEFAULT_MAX_DENOMINATOR)]
    max_denominator: u64,
    #[arg(long, value_delimiter = ',', default_value = "rescaled_l1,naive_l1,normalized_l1,least_squares")]
    methods: Vec<Method>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MarginArgs {
    /// Test set CSV.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    w: Vec<f64>,
    #[arg(long, default_value_t = 2.0)]
    margin: f64,
}

fn parse_strategy(s: &str, d: usize) -> Result<CorruptionStrategy> {
    let s = s.trim();
    Ok(match s {
        "gated" => CorruptionStrategy::gated_flip(d),
        "flip" => CorruptionStrategy::FlipNegate,
        _ => match s.split_once(':') {
            Some(("constant", v)) => CorruptionStrategy::Constant { value: v.parse().context("constant value")? },
            Some(("scale", c)) => CorruptionStrategy::Scale { factor: c.parse().context("scale factor")? },
            _ => bail!("unknown strategy `{s}`"),
        },
    })
}

fn write_dataset(out: Option<&Path>, data: &LabeledDataset) -> Result<()> {
    match out {
        Some(p) => write_dataset_csv(p, data)?,
        None => write_dataset_csv_to(io::stdout().lock(), data)?,
    }
    Ok(())
}

fn emit_json(out: Option<&Path>, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    match out {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(a) => {
            if a.d == 0 || a.n == 0 {
                bail!("--d and --n must be positive");
            }
            let spec = SyntheticSpec::standard(a.d, a.n, a.seed);
            let model = Model::from(a.model);
            let data = LabeledDataset::realizable(sample_synthetic_mixture(&spec), &spec.w_star, |t| model.link(t))?;
            write_dataset(a.out.as_deref(), &data)
        }
        Command::Corrupt(a) => {
            let clean = load_dataset_csv(&a.input)?;
            let strategy = parse_strategy(&a.strategy, clean.dim())?;
            let (data, record) = corrupt_massart(&clean, &MassartSpec::new(a.eta, strategy, a.seed)?)?;
            write_dataset(a.out.as_deref(), &data)?;
            eprintln!("{}", json!({ "corrupted": record.corrupted_count(), "total": data.len() }));
            Ok(())
        }
        Command::FitLinear(a) => {
            let data = load_dataset_csv(&a.input)?;
            let cfg = RecoveryConfig {
                gamma: a.gamma,
                max_denominator: a.max_denominator,
                seed: a.seed,
                ..Default::default()
            };
            let report = massreg::recover_linear(&data, &cfg)?;
            let mut v = serde_json::to_value(&report)?;
            v["w_snapped_display"] = json!(report.w_snapped.to_string());
            emit_json(a.out.as_deref(), &v)
        }
        Command::FitRelu(a) => {
            let data = load_dataset_csv(&a.input)?;
            let cfg = EllipsoidConfig {
                gamma: a.gamma,
                max_denominator: a.max_denominator,
                initial_radius: a.radius,
                max_steps: a.max_steps,
                ..Default::default()
            };
            let run = ellipsoid_recover_relu(&data, &cfg)?;
            let v = json!({
                "report": run.report,
                "w_snapped_display": run.report.w_snapped.to_string(),
                "steps": run.steps,
                "cuts": run.cuts.len(),
                "final_volume_log": run.final_state.volume_log,
            });
            emit_json(a.out.as_deref(), &v)
        }
        Command::GdRelu(a) => {
            let data = load_dataset_csv(&a.input)?;
            let d = data.dim();
            if let Some(t) = &a.target {
                if t.len() != d {
                    bail!("--target has {} entries, data has dimension {d}", t.len());
                }
            }
            let alpha = a.alpha.unwrap_or_else(|| a.mode.standard_step(d));
            let traj = gd_relu_transformed(&data, a.mode, alpha, a.iters, &vec![0.0; d], a.target.as_deref(), a.gamma)?;
            if let Some(p) = &a.out {
                let f = File::create(p).with_context(|| format!("creating {}", p.display()))?;
                traj.write_csv(io::BufWriter::new(f))?;
            }
            let last = traj.steps.last().context("empty trajectory")?;
            println!(
                "{}",
                json!({
                    "mode": a.mode.to_string(),
                    "alpha": alpha,
                    "iters": a.iters,
                    "final_w": last.w,
                    "final_loss": last.loss,
                    "final_distance": a.target.as_ref().map(|_| traj.final_distance()),
                })
            );
            Ok(())
        }
        Command::Bench { which: BenchCommand::RecoveryRate(a) } => {
            let grid = match (a.n.as_slice(), a.eta.as_slice()) {
                ([m], etas) => BenchGrid::Noise { etas: etas.to_vec(), m: *m },
                (ms, [eta]) => BenchGrid::Samples { ms: ms.to_vec(), eta: *eta },
                _ => bail!("sweep either --n or --eta, not both"),
            };
            let cfg = BenchConfig {
                d: a.d,
                methods: a.methods,
                grid,
                trials: a.trials,
                seed: a.seed,
                recovery: RecoveryConfig { gamma: a.gamma, max_denominator: a.max_denominator, ..Default::default() },
            };
            let report = exact_recovery_bench(&cfg)?;
            match &a.out {
                Some(p) => std::fs::write(p, report.to_json() + "\n")?,
                None => println!("{}", report.to_json()),
            }
            let mut err = io::stderr().lock();
            for r in &report.rows {
                writeln!(
                    err,
                    "{:<14} eta={:<5} m={:<5} rate={:.3} ± {:.3}",
                    r.method, r.eta, r.m, r.recovery_rate, r.error_bar
                )?;
            }
            Ok(())
        }
        Command::Eval { which: EvalCommand::Margin(a) } => {
            let data = load_dataset_csv(&a.input)?;
            if a.w.len() != data.dim() {
                bail!("--w has {} entries, data has dimension {}", a.w.len(), data.dim());
            }
            let frac = margin_fraction(&a.w, &data, a.margin)?;
            println!("{}", json!({ "margin": a.margin, "fraction": frac, "points": data.len() }));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let chain: Vec<String> = e.chain().skip(1).map(|c| c.to_string()).collect();
            eprintln!("{}", json!({ "error": e.to_string(), "causes": chain }));
            ExitCode::FAILURE
        }
    }
}
