mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cla_core::io::Format;

/// Exit status for a run that found a disagreement between independent checks.
const EXIT_DISAGREEMENT: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "cla-audit", version, about = "Audit choice data under k-th order limited attention")]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, env = "CLA_AUDIT_JOBS", value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide rationalizability for every subject.
    Test(TestArgs),
    /// Minimal lower contours and the guaranteed welfare bound.
    Welfare(TestArgs),
    /// Pass rates, Bronars and bootstrap power, predictive success.
    Power(PowerArgs),
    /// Revealed-preference axiom checks.
    Axioms(AxiomArgs),
    /// Compare the solver against brute force.
    Oracle(OracleArgs),
    /// Write a synthetic study.
    Generate(GenerateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    Json,
    Csv,
}

impl From<InputFormat> for Format {
    fn from(f: InputFormat) -> Self {
        match f {
            InputFormat::Json => Format::Json,
            InputFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Args)]
struct StudyArgs {
    /// Study file (JSON or CSV).
    study: PathBuf,
    /// Overrides detection by file extension.
    #[arg(long, value_enum)]
    input_format: Option<InputFormat>,
}

/// Threshold lists such as `2`, `1,3,5` or `1..8`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct KList(Vec<usize>);

fn parse_klist(s: &str) -> Result<KList, String> {
    let mut ks = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once("..") {
            let b = b.strip_prefix('=').unwrap_or(b);
            let (a, b): (usize, usize) = (
                a.parse().map_err(|_| format!("bad range start `{a}`"))?,
                b.parse().map_err(|_| format!("bad range end `{b}`"))?,
            );
            if a > b {
                return Err(format!("empty range `{part}`"));
            }
            ks.extend(a..=b);
        } else {
            ks.push(part.parse().map_err(|_| format!("bad threshold `{part}`"))?);
        }
    }
    if ks.contains(&0) {
        return Err("thresholds must be at least 1".into());
    }
    Ok(KList(ks))
}

fn parse_threshold(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("thresholds must be at least 1".into()),
        Ok(k) => Ok(k),
        Err(_) => Err(format!("bad threshold `{s}`")),
    }
}

#[derive(Args)]
struct ProfileArgs {
    /// Uniform threshold.
    #[arg(long, value_parser = parse_threshold, conflicts_with_all = ["ks", "profile"])]
    k: Option<usize>,
    /// Several uniform thresholds; defaults to 1 up to the largest budget.
    #[arg(long, value_parser = parse_klist, conflicts_with = "profile")]
    ks: Option<KList>,
    /// JSON profile: `{"uniform": k}` or `{"per_budget": [k per design budget]}`.
    #[arg(long)]
    profile: Option<PathBuf>,
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    study: StudyArgs,
    #[command(flatten)]
    profile: ProfileArgs,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Bronars,
    Bootstrap,
    Both,
}

#[derive(Args)]
struct PowerArgs {
    #[command(flatten)]
    study: StudyArgs,
    #[arg(long, value_parser = parse_klist)]
    ks: Option<KList>,
    #[arg(long, value_enum, default_value_t = MethodArg::Both)]
    method: MethodArg,
    /// Random subjects per method.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.05, value_parser = parse_alpha)]
    alpha: f64,
    /// Omit intervals for rates of exactly 0 or 1.
    #[arg(long)]
    paper_style: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let a: f64 = s.parse().map_err(|_| format!("bad alpha `{s}`"))?;
    if a > 0.0 && a < 1.0 {
        Ok(a)
    } else {
        Err("alpha must lie strictly between 0 and 1".into())
    }
}

#[derive(Args)]
struct AxiomArgs {
    #[command(flatten)]
    study: StudyArgs,
    #[command(flatten)]
    profile: ProfileArgs,
    /// Cross-check both axiom characterizations against the solver.
    #[arg(long)]
    complete_domain: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SweepArg {
    X3,
    X4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    FullFilter,
    Constraint,
}

#[derive(Args)]
struct OracleArgs {
    /// Every complete-domain choice function on three or four alternatives.
    #[arg(long, value_enum, conflicts_with = "study")]
    sweep: Option<SweepArg>,
    #[arg(required_unless_present = "sweep")]
    study: Option<PathBuf>,
    #[arg(long, value_enum)]
    input_format: Option<InputFormat>,
    /// Defaults to full-filter where it applies.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_parser = parse_klist)]
    ks: Option<KList>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 10)]
    universe_size: usize,
    #[arg(long, default_value_t = 20)]
    budgets: usize,
    /// Inclusive budget size range.
    #[arg(long, default_value = "2..8", value_parser = parse_klist)]
    sizes: KList,
    #[arg(long, default_value_t = 113)]
    subjects: usize,
    /// `rational`, `uniform`, `noisy:EPS` or `cla:K[:tight|random]`.
    #[arg(long, default_value = "rational", value_parser = commands::parse_behavior)]
    behavior: cla_core::io::Behavior,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Attach the bundled installment attributes (needs ten alternatives).
    #[arg(long)]
    inoue: bool,
    #[arg(long, value_enum, default_value_t = InputFormat::Json)]
    output_format: InputFormat,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Input(String),
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
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs as usize)
            .build_global()
            .expect("thread pool is configured once");
    }
    let result = match cli.command {
        Command::Test(a) => commands::test(&a),
        Command::Welfare(a) => commands::welfare(&a),
        Command::Power(a) => commands::power(&a),
        Command::Axioms(a) => commands::axioms(&a),
        Command::Oracle(a) => commands::oracle(&a),
        Command::Generate(a) => commands::generate(&a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_DISAGREEMENT),
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
