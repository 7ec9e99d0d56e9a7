use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

mod config;
mod experiments;
mod report;

use config::Layers;
use report::Summary;

#[derive(Debug)]
pub enum CliError {
    /// bad flags, config or parameter ranges: exit 2
    Config(String),
    /// a numerical routine failed: exit 1
    Numeric(String),
}

impl From<period_moments::error::Error> for CliError {
    fn from(e: period_moments::error::Error) -> Self {
        match e {
            period_moments::error::Error::Domain(msg) => CliError::Config(msg),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "period-moments",
    version,
    about = "Numerical experiments on Rankin–Selberg moments, Eisenstein series and Whittaker integrals"
)]
struct Cli {
    /// JSON object of parameters; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every sampled experiment
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// CSV output path (default: <experiment>.csv)
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// JSON summary path (default: the CSV path with a .json extension)
    #[arg(long, global = true)]
    summary: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Second moment S(k) over a range of weights with the full bound chain
    Moment(MomentArgs),
    /// Period route against the L-function route for ⟨fE*(·,s), g⟩
    UnfoldCheck(UnfoldArgs),
    /// Stade's formula for random spectral parameters
    Stade(StadeArgs),
    /// Plancherel ball integrals against the product proxy
    Plancherel(PlancherelArgs),
    /// Epstein zeta functional equation for random Gram matrices
    EpsteinFe(EpsteinArgs),
    /// Sampled ratio E*(z,1/2) / (det z^{1/2+ε} + det z̃^{1/2+ε}) on the Siegel set
    Lemma1(Lemma1Args),
    /// Residue of E(z,s) at s = 1 at several points
    EisensteinResidue,
    /// Petersson norm by quadrature against the Rankin–Selberg residue
    NormCrosscheck(NormArgs),
}

#[derive(Args, Debug)]
struct MomentArgs {
    #[arg(long)]
    k_min: Option<u32>,
    #[arg(long)]
    k_max: Option<u32>,
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Args, Debug)]
struct UnfoldArgs {
    /// weights, comma separated
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<u32>>,
    /// real values of s, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    s: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct StadeArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    /// fixed s; by default n = 2 cycles through 0.5, 1, 1.5 and n = 3 uses 1
    #[arg(long)]
    s: Option<f64>,
}

#[derive(Args, Debug)]
struct PlancherelArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    centers: Option<usize>,
    /// centers are drawn uniformly from the ball of this radius
    #[arg(long)]
    radius: Option<f64>,
}

#[derive(Args, Debug)]
struct EpsteinArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args, Debug)]
struct Lemma1Args {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Args, Debug)]
struct NormArgs {
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<u32>>,
}

fn experiment_name(c: &Command) -> &'static str {
    match c {
        Command::Moment(_) => "moment",
        Command::UnfoldCheck(_) => "unfold-check",
        Command::Stade(_) => "stade",
        Command::Plancherel(_) => "plancherel",
        Command::EpsteinFe(_) => "epstein-fe",
        Command::Lemma1(_) => "lemma1",
        Command::EisensteinResidue => "eisenstein-residue",
        Command::NormCrosscheck(_) => "norm-crosscheck",
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let start = Instant::now();
    let name = experiment_name(&cli.command);
    let mut p = Layers::load(cli.config.as_deref())?;
    let seed = p.get("seed", cli.seed, 0u64)?;
    let output: PathBuf = p.get("output", cli.output, PathBuf::from(format!("{name}.csv")))?;
    let summary_path: PathBuf = p.get("summary", cli.summary, output.with_extension("json"))?;
    p.precision()?;
    let outcome = match cli.command {
        Command::Moment(a) => {
            let k_min = p.get("k_min", a.k_min, 12)?;
            let k_max = p.get("k_max", a.k_max, 40)?;
            let eps = p.get("eps", a.eps, 0.1)?;
            experiments::moment(k_min, k_max, eps)?
        }
        Command::UnfoldCheck(a) => {
            let k = p.get("k", a.k, vec![12])?;
            let s = p.get("s", a.s, vec![0.5, 0.75])?;
            experiments::unfold_check(&k, &s)?
        }
        Command::Stade(a) => {
            let n = p.get("n", a.n, 2)?;
            let samples = p.get("samples", a.samples, 5)?;
            let s = p.get("s", a.s.map(Some), None::<f64>)?;
            experiments::stade(n, samples, s, seed)?
        }
        Command::Plancherel(a) => {
            let n = p.get("n", a.n, 2)?;
            let centers = p.get("centers", a.centers, 20)?;
            let radius = p.get("radius", a.radius, 20.0)?;
            experiments::plancherel(n, centers, radius, seed)?
        }
        Command::EpsteinFe(a) => {
            let n = p.get("n", a.n, 2)?;
            let samples = p.get("samples", a.samples, 10)?;
            experiments::epstein_fe(n, samples, seed)?
        }
        Command::Lemma1(a) => {
            let n = p.get("n", a.n, 2)?;
            let samples = p.get("samples", a.samples, 200)?;
            let eps = p.get("eps", a.eps, 0.05)?;
            experiments::lemma1(n, samples, eps, seed)?
        }
        Command::EisensteinResidue => experiments::eisenstein_residue(seed)?,
        Command::NormCrosscheck(a) => {
            let k = p.get("k", a.k, vec![12])?;
            experiments::norm_crosscheck(&k)?
        }
    };
    write_file(&output, &outcome.csv)?;
    let summary = Summary {
        experiment: name.to_string(),
        params: p.into_params(),
        checks: outcome.checks,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    summary.write(&summary_path)?;
    let failed = summary.checks.iter().filter(|c| !c.pass).count();
    eprintln!(
        "{name}: {} checks, {failed} failed; wrote {} and {}",
        summary.checks.len(),
        output.display(),
        summary_path.display()
    );
    Ok(summary.passed())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
