use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use krein_lab::linops::text::read_matrix;
use krein_lab::linops::CMatrix;
use krein_lab::weakpair::{BracketKind, OperatorPair};
use krein_lab_cli::commands::weakpair::WeakpairArgs;
use krein_lab_cli::commands::{self, gamma, lattice, weakpair, wick};
use krein_lab_cli::config::{AutoOr, ExperimentConfig};
use krein_lab_cli::output::{Knobs, Run};
use krein_lab_cli::CliError;
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "krein-lab",
    version,
    about = "Reproducible reports on weakly (anti)commuting operator pairs"
)]
struct Cli {
    /// Suppress progress output on stderr
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write γ_1..γ_n and their relation residuals
    Gamma {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "out/gamma")]
        out: PathBuf,
    },
    /// Decomposition D = D1 + D2 and the constants C, C_old, K over N_list
    LatticeReport {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Condition-(1) constant and the appendix convergence tables
    #[command(group(ArgGroup::new("source").required(true).args(["s", "lattice"])))]
    WeakpairReport {
        /// Matrix file for S
        #[arg(long, requires_all = ["t", "kind"])]
        s: Option<PathBuf>,
        /// Matrix file for T
        #[arg(long, requires = "s")]
        t: Option<PathBuf>,
        #[arg(long)]
        kind: Option<BracketKind>,
        /// Use (D1, D2) of this lattice config
        #[arg(long)]
        lattice: Option<PathBuf>,
        /// Lattice size; defaults to the first entry of N_list
        #[arg(long, requires = "lattice")]
        points: Option<usize>,
        /// `auto` or a positive value
        #[arg(long)]
        lambda0: Option<AutoOr>,
        #[arg(long)]
        grid_count: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Imaginary part of μ, `auto` or a positive value
        #[arg(long)]
        mu: Option<AutoOr>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Wick rotation round trips and the indefinite-module proxies
    #[command(group(ArgGroup::new("source").required(true).args(["input", "random", "lattice"])))]
    WickRoundtrip {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Dimension of a seeded Gaussian matrix
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        lattice: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Every check, driven by one config
    FullSuite {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_matrix(path: &Path) -> Result<CMatrix, CliError> {
    let f = File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_matrix(BufReader::new(f)).map_err(|e| CliError::input(path.display().to_string(), e))
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let quiet = cli.quiet;
    match cli.command {
        Command::Gamma { n, out } => {
            let mut run = Run::new(out, quiet);
            gamma::gamma(&mut run, "", n)?;
            run.finish(
                "gamma",
                None,
                json!({ "n": n }),
                Knobs::new(None, AutoOr::Auto, AutoOr::Auto, 0),
            )
        }
        Command::LatticeReport { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let mut run = Run::new(out.unwrap_or_else(|| cfg.output_dir.clone()), quiet);
            lattice::lattice_report(&mut run, "", &cfg)?;
            let args = json!({ "config": config });
            run.finish("lattice-report", Some(&cfg), args, Knobs::from_config(&cfg))
        }
        Command::WeakpairReport {
            s,
            t,
            kind,
            lattice,
            points,
            lambda0,
            grid_count,
            seed,
            mu,
            out,
        } => {
            let cfg = lattice.as_deref().map(ExperimentConfig::load).transpose()?;
            let base = cfg.as_ref().map(WeakpairArgs::from_config).unwrap_or(WeakpairArgs {
                lambda0: AutoOr::Auto,
                mu: AutoOr::Auto,
                grid_count: 11,
                seed: 42,
            });
            let args = WeakpairArgs {
                lambda0: lambda0.unwrap_or(base.lambda0),
                mu: mu.unwrap_or(base.mu),
                grid_count: grid_count.unwrap_or(base.grid_count),
                seed: seed.unwrap_or(base.seed),
            };
            if args.grid_count < 4 {
                return Err(CliError::input("--grid-count", "must be at least 4"));
            }
            for (flag, v) in [("--lambda0", args.lambda0), ("--mu", args.mu)] {
                if let AutoOr::Value(x) = v {
                    if !(x.is_finite() && x > 0.0) {
                        return Err(CliError::input(flag, "must be `auto` or a positive number"));
                    }
                }
            }
            let mut echo = json!({
                "s": s,
                "t": t,
                "kind": kind,
                "lattice": lattice,
                "points": points,
                "lambda0": args.lambda0,
                "mu": args.mu,
                "grid_count": args.grid_count,
                "seed": args.seed,
            });
            let (label, pair) = match (&cfg, s, t) {
                (Some(cfg), _, _) => {
                    let mut cfg = cfg.clone();
                    if let Some(p) = points {
                        cfg.n_list = vec![p];
                        cfg.validate().map_err(CliError::bad_config)?;
                    }
                    let (p, pair) = commands::lattice_pair(&cfg)?;
                    (format!("lattice_N{p}"), pair)
                }
                (None, Some(s), Some(t)) => {
                    let kind = kind.ok_or_else(|| CliError::input("--kind", "required with --s/--t"))?;
                    let pair = OperatorPair::new(load_matrix(&s)?, load_matrix(&t)?, kind)
                        .map_err(|e| CliError::input(format!("{} / {}", s.display(), t.display()), e))?;
                    ("input".to_string(), pair)
                }
                _ => return Err(CliError::input("--s/--t", "both matrix files are required")),
            };
            let dir = out
                .or_else(|| cfg.as_ref().map(|c| c.output_dir.join("weakpair")))
                .unwrap_or_else(|| PathBuf::from("out/weakpair"));
            let mut run = Run::new(dir, quiet);
            let (report, _) = weakpair::weakpair(&mut run, "", &label, &pair, &args)?;
            let mut knobs = Knobs::new(Some(args.seed), args.lambda0, args.mu, args.grid_count);
            knobs.lambda0_effective = Some(report.lambda0);
            knobs.mu_effective = Some(report.mu.im);
            echo["kind"] = json!(report.kind);
            run.finish("weakpair-report", cfg.as_ref(), echo, knobs)
        }
        Command::WickRoundtrip {
            input,
            random,
            seed,
            lattice,
            out,
        } => {
            let cfg = lattice.as_deref().map(ExperimentConfig::load).transpose()?;
            let dir = out
                .or_else(|| cfg.as_ref().map(|c| c.output_dir.join("wick")))
                .unwrap_or_else(|| PathBuf::from("out/wick"));
            let mut run = Run::new(dir, quiet);
            if let Some(cfg) = &cfg {
                wick::wick_lattice(&mut run, "", cfg)?;
            } else if let Some(path) = &input {
                let d = load_matrix(path)?;
                wick::wick_input(&mut run, "", "input", &d)?;
            } else if let Some(dim) = random {
                if dim == 0 {
                    return Err(CliError::input("--random", "dimension must be positive"));
                }
                wick::wick_random(&mut run, "", &[dim], seed)?;
            }
            let echo = json!({ "input": input, "random": random, "seed": seed, "lattice": lattice });
            let knobs = match &cfg {
                Some(c) => Knobs::from_config(c),
                None => Knobs::new(Some(seed), AutoOr::Auto, AutoOr::Auto, 0),
            };
            run.finish("wick-roundtrip", cfg.as_ref(), echo, knobs)
        }
        Command::FullSuite { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let mut run = Run::new(out.unwrap_or_else(|| cfg.output_dir.clone()), quiet);
            let lambda0 = commands::full_suite(&mut run, &cfg)?;
            let mut knobs = Knobs::from_config(&cfg);
            knobs.lambda0_effective = lambda0;
            knobs.mu_effective = lambda0.map(|l| cfg.mu.value().unwrap_or(2.0 * l));
            run.finish("full-suite", Some(&cfg), json!({ "config": config }), knobs)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(CliError::EXIT_CODE as u8)
        }
    }
}
