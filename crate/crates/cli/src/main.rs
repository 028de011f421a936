//! `fricke`: q-expansions, arc zeros and remainder-bound certificates for the
//! Fricke Eisenstein series of level 5 and 7.
//!
//! Exit codes: 0 when everything computed passes, 1 for a verification deficit or a
//! numerical failure, 2 for a usage error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fricke_core::evaluator::Method;

use commands::{CmdError, EvalPoint, Scope};
use config::{FileConfig, Overrides};
use output::Format;

#[derive(Parser)]
#[command(name = "fricke", version, about = "Eisenstein series for the Fricke groups of level 5 and 7")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
struct Global {
    /// Working precision in bits.
    #[arg(long, global = true, env = "FRICKE_PRECISION_BITS")]
    precision_bits: Option<u32>,
    /// Lattice radius for the lattice-sum route.
    #[arg(long, global = true)]
    nmax: Option<u32>,
    /// Scan samples per unit of phase.
    #[arg(long, global = true)]
    samples: Option<u32>,
    /// Evaluation route.
    #[arg(long, global = true, value_enum)]
    method: Option<MethodArg>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// TOML config file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum MethodArg {
    Reduced,
    Lattice,
    Qseries,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Reduced => Method::Reduced,
            MethodArg::Lattice => Method::Lattice,
            MethodArg::Qseries => Method::QSeries,
        }
    }
}

#[derive(Args, Clone)]
struct Target {
    /// Weight: `12`, or an inclusive range `4..100` (even weights only).
    #[arg(short = 'k', long = "weight")]
    weight: Option<String>,
    /// Level, 5 or 7 (default: both).
    #[arg(short = 'p', long = "level")]
    level: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Print a q-expansion.
    Qexp {
        #[command(flatten)]
        target: Target,
        /// Highest power of q.
        #[arg(short = 'M', long = "order", default_value_t = 10)]
        order: usize,
        /// estar, eisenstein, delta5, delta7, e2prime7, delta74, delta710, delta76.
        #[arg(long, default_value = "estar")]
        form: String,
    },
    /// Evaluate E* at a point of the upper half-plane, or an arc function at an angle.
    Eval {
        #[command(flatten)]
        target: Target,
        #[arg(long, allow_hyphen_values = true)]
        re: Option<String>,
        #[arg(long)]
        im: Option<String>,
        #[arg(long)]
        theta: Option<String>,
        /// 1, 2 or glued.
        #[arg(long)]
        arc: Option<String>,
        /// Report F − 2cos(kθ/2) instead of F.
        #[arg(long)]
        remainder: bool,
        /// Truncation order for the q-series route.
        #[arg(short = 'M', long = "order")]
        order: Option<usize>,
    },
    /// Locate the zeros on the boundary arcs and check the valence budget.
    Zeros {
        #[command(flatten)]
        target: Target,
        /// Emit the scan samples (θ, F) instead of the zero report.
        #[arg(long)]
        plot: bool,
    },
    /// Run the lemma and triple certificates.
    Certify {
        #[arg(long, conflicts_with_all = ["lemma", "triples"])]
        all: bool,
        /// A lemma id such as L7-4.
        #[arg(long)]
        lemma: Option<String>,
        /// All triples, or one group such as p5-a1-r2.
        #[arg(long, num_args = 0..=1, default_missing_value = "")]
        triples: Option<String>,
    },
    /// Classify weights by the sub-case that covers them.
    Classify {
        #[command(flatten)]
        target: Target,
        /// Also run the signed-bound probe at this t for remaining-case weights.
        #[arg(long)]
        probe: Option<String>,
    },
    /// Reproduce the low-weight zero tables.
    Tables,
    /// Zero verification over a range of weights.
    ScanRange {
        #[command(flatten)]
        target: Target,
    },
    /// Phase of the head terms at θ₀ ∓ tπ/k.
    ArgTrack {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value = "0.01")]
        t: String,
    },
}

fn weights(s: Option<&str>, default: Option<&str>) -> Result<Vec<i64>, CmdError> {
    let Some(s) = s.or(default) else {
        return Err(CmdError::Usage("a weight is required (-k)".into()));
    };
    let bad = || CmdError::Usage(format!("bad weight {s}: expected an even integer or a range a..b"));
    if let Some((a, b)) = s.split_once("..") {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        let ks: Vec<i64> = (a.max(4)..=b).filter(|k| k % 2 == 0).collect();
        if ks.is_empty() {
            return Err(CmdError::Usage(format!("range {s} holds no even weight >= 4")));
        }
        return Ok(ks);
    }
    let k: i64 = s.trim().parse().map_err(|_| bad())?;
    if k < 4 || k % 2 != 0 {
        return Err(CmdError::Usage(format!("weight must be even and at least 4, got {k}")));
    }
    Ok(vec![k])
}

fn levels(p: Option<u32>) -> Result<Vec<u32>, CmdError> {
    match p {
        None => Ok(vec![5, 7]),
        Some(p @ (5 | 7)) => Ok(vec![p]),
        Some(p) => Err(CmdError::Usage(format!("level must be 5 or 7, got {p}"))),
    }
}

fn single(t: &Target) -> Result<(i64, u32), CmdError> {
    let ks = weights(t.weight.as_deref(), None)?;
    let ps = levels(t.level)?;
    match (ks.as_slice(), ps.as_slice()) {
        ([k], [p]) => Ok((*k, *p)),
        _ => Err(CmdError::Usage("this command takes a single weight and a single level".into())),
    }
}

fn run(cli: Cli) -> Result<bool, CmdError> {
    let g = cli.global;
    let file = match &g.config {
        Some(path) => FileConfig::load(path).map_err(CmdError::Usage)?,
        None => FileConfig::default(),
    };
    let q_order = match &cli.cmd {
        Command::Eval { order, .. } => *order,
        _ => None,
    };
    let st = config::merge(
        file,
        Overrides {
            precision_bits: g.precision_bits,
            nmax: g.nmax,
            q_order,
            samples: g.samples,
            jobs: g.jobs,
            method: g.method.map(Method::from),
            format: g.format,
        },
    );
    st.eval.validate().map_err(CmdError::from)?;
    st.scan.validate().map_err(CmdError::from)?;
    if let Some(n) = st.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CmdError::Failure(e.to_string()))?;
    }
    let (report, ok) = match &cli.cmd {
        Command::Qexp { target, order, form } => {
            let ks = match form.as_str() {
                "estar" | "eisenstein" => weights(target.weight.as_deref(), None)?,
                _ => Vec::new(),
            };
            commands::qexp(form, &ks, &levels(target.level)?, *order)?
        }
        Command::Eval { target, re, im, theta, arc, remainder, .. } => {
            let (k, p) = single(target)?;
            let pt = EvalPoint { re: re.clone(), im: im.clone(), theta: theta.clone(), arc: arc.clone(), remainder: *remainder };
            commands::eval(k, p, &pt, &st)?
        }
        Command::Zeros { target, plot } => {
            commands::zeros(&weights(target.weight.as_deref(), None)?, &levels(target.level)?, *plot, &st)?
        }
        Command::Certify { all, lemma, triples } => {
            let scope = match (all, lemma, triples) {
                (_, Some(id), None) => Scope::Lemma(id.clone()),
                (false, None, Some(g)) => Scope::Triples(if g.is_empty() { None } else { Some(g.clone()) }),
                (_, None, None) => Scope::All,
                _ => return Err(CmdError::Usage("give one of --all, --lemma ID, --triples [GROUP]".into())),
            };
            commands::certify(&scope)?
        }
        Command::Classify { target, probe } => {
            commands::classify(&weights(target.weight.as_deref(), Some("4..200"))?, &levels(target.level)?, probe.as_deref())?
        }
        Command::Tables => commands::tables(&st)?,
        Command::ScanRange { target } => {
            commands::scan_range(&weights(target.weight.as_deref(), Some("4..100"))?, &levels(target.level)?, &st)?
        }
        Command::ArgTrack { target, t } => {
            commands::arg_tracks(&weights(target.weight.as_deref(), None)?, &levels(target.level)?, t)?
        }
    };
    let s = report.render(st.format).map_err(CmdError::Failure)?;
    output::emit(&s, g.out.as_deref()).map_err(CmdError::Failure)?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CmdError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CmdError::Failure(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
