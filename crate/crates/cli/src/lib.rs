//! `gpc`: build and validate decompositions, evaluate generalized Pauli
//! channels, certify complete positivity, run the sampling harness and the
//! identity suites, and draw tetrahedron slices.
//!
//! Exit codes: `0` success or CP, `1` negative verdict, `2` invalid input or
//! I/O failure.

pub mod plot;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gpc_core::channel::certify::CertifierRegistry;
use gpc_core::channel::{sample_cp_agreement, SampleBox, DEFAULT_SAMPLE_MARGIN};
use gpc_core::constructions::validate_decomposition;
use gpc_core::verify::{run_suite, IdentityReport, Suite};
use gpc_core::{
    CMatrix, ChannelSpec, CpReport, Decomposition, DecompositionRegistry, GeneralizedPauliChannel,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gpc", version, about = "Generalized Pauli channel certifier")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build or validate a decomposition.
    Decomp {
        #[command(subcommand)]
        action: DecompAction,
    },
    /// Evaluate a channel given as `{"decomposition": ..., "lambda": [...]}`.
    Channel {
        #[command(subcommand)]
        action: ChannelAction,
    },
    /// Seeded analytic-vs-numeric CP agreement over a box of λ values.
    Sample {
        /// Builder name or path to a decomposition JSON file.
        #[arg(long)]
        decomp: String,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Interval `lo,hi` for every λ coordinate.
        #[arg(long = "box", default_value = "-1,1", allow_hyphen_values = true)]
        bx: String,
        #[arg(long, default_value_t = DEFAULT_SAMPLE_MARGIN)]
        margin: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Identity suites over n = 2..5.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG of the (λ1, λ2) slice of the qubit CP tetrahedron at fixed λ3.
    PlotTetra {
        #[arg(long, allow_hyphen_values = true)]
        lambda3: f64,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum DecompAction {
    Build {
        /// `qubit-pauli`, `m4-example2` or `mub-p<k>` with `k` prime.
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ChannelAction {
    Apply {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Choi {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    Kraus {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    CheckCp {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Analytic,
    Numeric,
    Both,
    Kraus,
}

impl Method {
    fn certifiers(self) -> &'static [&'static str] {
        match self {
            Method::Analytic => &["analytic"],
            Method::Numeric => &["numeric"],
            Method::Both => &["analytic", "numeric"],
            Method::Kraus => &["kraus"],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    All,
    Lemmas,
    Projections,
    Fmap,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::All => Suite::All,
            SuiteArg::Lemmas => Suite::Lemmas,
            SuiteArg::Projections => Suite::Projections,
            SuiteArg::Fmap => Suite::Fmap,
        }
    }
}

/// What a command produced: its exit code, the payload, and where to put it.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub report: String,
    pub out: Option<PathBuf>,
}

impl CommandResult {
    fn json<T: Serialize>(
        exit_code: i32,
        value: &T,
        out: &Option<PathBuf>,
    ) -> anyhow::Result<Self> {
        let mut report = serde_json::to_string_pretty(value)?;
        report.push('\n');
        Ok(CommandResult {
            exit_code,
            report,
            out: out.clone(),
        })
    }
}

#[derive(Debug, Serialize)]
pub struct Verdict {
    pub method: String,
    pub cp: bool,
}

#[derive(Debug, Serialize)]
pub struct CheckCpOutput {
    pub method: String,
    pub cp: bool,
    pub agree: bool,
    pub verdicts: Vec<Verdict>,
    pub report: CpReport,
}

#[derive(Debug, Serialize)]
pub struct SuiteOutput {
    pub suite: String,
    pub seed: u64,
    pub passed: bool,
    pub reports: Vec<IdentityReport>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> anyhow::Result<T> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {what} from {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {what} in {}", path.display()))
}

fn load_channel(
    path: &Path,
    registry: &DecompositionRegistry,
) -> anyhow::Result<GeneralizedPauliChannel> {
    let spec: ChannelSpec = read_json(path, "channel")?;
    Ok(spec.build(registry)?)
}

fn load_decomposition(
    key: &str,
    registry: &DecompositionRegistry,
) -> anyhow::Result<Decomposition> {
    let path = Path::new(key);
    if path.is_file() {
        read_json(path, "decomposition")
    } else {
        Ok(registry.build(key)?)
    }
}

/// Runs a parsed command without writing anything.
pub fn execute(cli: &Cli) -> anyhow::Result<CommandResult> {
    let registry = DecompositionRegistry::default();
    match &cli.command {
        Command::Decomp { action } => match action {
            DecompAction::Build { name, out } => {
                let d = registry.build(name)?;
                CommandResult::json(EXIT_OK, &d, out)
            }
            DecompAction::Validate { input, out } => {
                let d: Decomposition = read_json(input, "decomposition")?;
                let report = validate_decomposition(&d);
                let code = if report.passed {
                    EXIT_OK
                } else {
                    EXIT_NEGATIVE
                };
                CommandResult::json(code, &report, out)
            }
        },
        Command::Channel { action } => match action {
            ChannelAction::Apply {
                channel,
                state,
                out,
            } => {
                let ch = load_channel(channel, &registry)?;
                let a: CMatrix = read_json(state, "state")?;
                CommandResult::json(EXIT_OK, &ch.apply(&a)?, out)
            }
            ChannelAction::Choi { channel, out } => {
                let ch = load_channel(channel, &registry)?;
                CommandResult::json(EXIT_OK, &ch.choi(), out)
            }
            ChannelAction::Kraus { channel, out } => {
                let ch = load_channel(channel, &registry)?;
                CommandResult::json(EXIT_OK, &ch.kraus_form()?, out)
            }
            ChannelAction::CheckCp {
                channel,
                method,
                out,
            } => {
                let ch = load_channel(channel, &registry)?;
                let certifiers = CertifierRegistry::default();
                let verdicts: Vec<Verdict> = certifiers
                    .run(method.certifiers(), &ch)?
                    .into_iter()
                    .map(|(method, cp)| Verdict { method, cp })
                    .collect();
                let agree = verdicts.windows(2).all(|w| w[0].cp == w[1].cp);
                let cp = agree && verdicts.iter().all(|v| v.cp);
                let code = match (agree, cp) {
                    (false, _) => EXIT_ERROR,
                    (true, true) => EXIT_OK,
                    (true, false) => EXIT_NEGATIVE,
                };
                let output = CheckCpOutput {
                    method: format!("{method:?}").to_lowercase(),
                    cp,
                    agree,
                    verdicts,
                    report: ch.analytic_cp(),
                };
                CommandResult::json(code, &output, out)
            }
        },
        Command::Sample {
            decomp,
            count,
            seed,
            bx,
            margin,
            out,
        } => {
            let bx: SampleBox = bx.parse()?;
            let d = load_decomposition(decomp, &registry)?;
            let stats = sample_cp_agreement(Arc::new(d), *count, *seed, bx, *margin)?;
            let code = if stats.disagree == 0 {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            };
            CommandResult::json(code, &stats, out)
        }
        Command::Verify { suite, seed, out } => {
            let reports = run_suite((*suite).into(), *seed)?;
            let passed = reports.iter().all(|r| r.passed);
            let output = SuiteOutput {
                suite: format!("{suite:?}").to_lowercase(),
                seed: *seed,
                passed,
                reports,
            };
            CommandResult::json(if passed { EXIT_OK } else { EXIT_NEGATIVE }, &output, out)
        }
        Command::PlotTetra {
            lambda3,
            resolution,
            out,
        } => {
            if *resolution < plot::MIN_RESOLUTION {
                bail!(
                    "resolution must be at least {}, got {resolution}",
                    plot::MIN_RESOLUTION
                );
            }
            if !lambda3.is_finite() {
                bail!("lambda3 must be finite");
            }
            Ok(CommandResult {
                exit_code: EXIT_OK,
                report: plot::render_svg(*lambda3, *resolution),
                out: out.clone(),
            })
        }
    }
}

fn emit(result: &CommandResult) -> anyhow::Result<()> {
    match &result.out {
        Some(path) => {
            fs::write(path, &result.report).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(result.report.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

/// Parses `args` (program name first), runs the command, writes its report
/// and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match execute(&cli).and_then(|r| emit(&r).map(|_| r.exit_code)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}
