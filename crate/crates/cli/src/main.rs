use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hutchfrac::commands::{
    self, Algorithm, AttractorOpts, RemetrizeOpts, VerifyKind,
};
use hutchfrac::resolve_threads;

/// Iterated function systems on point clouds: attractors, contraction
/// classification and certified remetrization.
#[derive(Parser)]
#[command(name = "hutchfrac", version, about)]
struct Cli {
    /// RNG seed for every sampled computation (pinned, never time-based).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads ("auto" or a count); HUTCHFRAC_THREADS overrides.
    #[arg(long, global = true)]
    threads: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Deterministic,
    Chaos,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyArg {
    Edelstein,
    Krasnoselskii,
    BanachPower,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate the Hutchinson operator (or run the chaos game) and
    /// write the final cloud as CSV and/or a PPM raster.
    Attractor {
        config: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = 64)]
        max_iter: usize,
        #[arg(long)]
        out_csv: Option<PathBuf>,
        #[arg(long)]
        render_ppm: Option<PathBuf>,
        #[arg(long, default_value_t = 512)]
        width: usize,
        #[arg(long, default_value_t = 512)]
        height: usize,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::Deterministic)]
        algorithm: AlgorithmArg,
        /// Chaos-game total iterations (including burn-in).
        #[arg(long, default_value_t = 20000)]
        iterations: usize,
        #[arg(long, default_value_t = 100)]
        burn_in: usize,
    },
    /// Run the six-way contractivity classifier over the config's
    /// multimetric and emit the report as JSON.
    Classify {
        config: PathBuf,
        #[arg(long)]
        report_json: Option<PathBuf>,
    },
    /// Build the remetrized pseudometric (or the Banach-power metric)
    /// with a certified truncation tail and optionally verify it on
    /// sampled pairs.
    Remetrize {
        config: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 500)]
        pairs: usize,
        #[arg(long, value_enum)]
        verify: Option<VerifyArg>,
        #[arg(long)]
        report_json: Option<PathBuf>,
        /// Power m for the Banach-power metric.
        #[arg(long, default_value_t = 2)]
        power: usize,
        /// Growth rate a > 1 for the Banach-power metric.
        #[arg(long, default_value_t = 1.2)]
        rate: f64,
        /// Lower end of the Krasnoselskii ratio window.
        #[arg(long, default_value_t = 0.01)]
        window_lo: f64,
        /// Upper end of the Krasnoselskii ratio window (default: twice
        /// the domain diagonal).
        #[arg(long)]
        window_hi: Option<f64>,
    },
    /// Run the self-check suites against the built-in corpus.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Inspect or export the built-in fixture corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// List the available fixture names.
    List,
    /// Write a fixture as a JSON config (stdout when --out is absent).
    Export {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // accepted for interface stability; every computation is
    // deterministic and currently single-threaded
    let _threads = resolve_threads(cli.threads.as_deref());
    let result = match cli.command {
        Command::Attractor {
            config,
            tol,
            max_iter,
            out_csv,
            render_ppm,
            width,
            height,
            algorithm,
            iterations,
            burn_in,
        } => commands::cmd_attractor(
            &config,
            &AttractorOpts {
                tol,
                max_iter,
                out_csv,
                render_ppm,
                width,
                height,
                algorithm: match algorithm {
                    AlgorithmArg::Deterministic => Algorithm::Deterministic,
                    AlgorithmArg::Chaos => Algorithm::Chaos,
                },
                iterations,
                burn_in,
                seed: cli.seed,
            },
        ),
        Command::Classify {
            config,
            report_json,
        } => commands::cmd_classify(&config, report_json.as_deref(), cli.seed),
        Command::Remetrize {
            config,
            eps,
            pairs,
            verify,
            report_json,
            power,
            rate,
            window_lo,
            window_hi,
        } => commands::cmd_remetrize(
            &config,
            &RemetrizeOpts {
                eps,
                pairs,
                verify: verify.map(|v| match v {
                    VerifyArg::Edelstein => VerifyKind::Edelstein,
                    VerifyArg::Krasnoselskii => VerifyKind::Krasnoselskii,
                    VerifyArg::BanachPower => VerifyKind::BanachPower,
                }),
                report_json,
                power,
                rate,
                window_lo,
                window_hi,
                seed: cli.seed,
            },
        ),
        Command::Verify { suite } => commands::cmd_verify(&suite, cli.seed),
        Command::Corpus { action } => match action {
            CorpusAction::List => commands::cmd_corpus_list(),
            CorpusAction::Export { name, out } => {
                commands::cmd_corpus_export(&name, out.as_deref())
            }
        },
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(hutchfrac::exit::CONFIG_ERROR as u8)
        }
    }
}
