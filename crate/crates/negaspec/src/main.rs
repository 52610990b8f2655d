use clap::{Args, Parser, Subcommand};
use negaspec::cli::{self, Command, RunConfig};
use negaspec::Error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Exact and asymptotic negativity spectra for two intervals of free
/// lattice fermions.
#[derive(Parser)]
#[command(name = "negaspec", version, about)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Exact spectrum of the dense covariance matrix (CSV)
    Spectrum(CommonArgs),
    /// Asymptotic eigenvalue predictions from the phase condition (CSV)
    Predict(CommonArgs),
    /// Exact eigenvalue histogram against the predicted density (CSV)
    Density(CommonArgs),
    /// Logarithmic negativity, exact and closed form (JSON)
    Negativity(CommonArgs),
    /// Match the exact spectrum against the predictions (JSON report)
    Compare(CommonArgs),
    /// Negativity summary over a list of geometries (CSV)
    Sweep(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config file; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sites in interval A minus one
    #[arg(long)]
    k: Option<usize>,
    /// Sites in interval B minus one
    #[arg(long)]
    l: Option<usize>,
    /// Distance between the facing interval endpoints
    #[arg(long)]
    gap: Option<usize>,
    /// Filling fraction as a rational p/q, e.g. 1/2
    #[arg(long)]
    pf: Option<String>,
    /// λ window as two comma-separated values, e.g. -0.9,0.9
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Histogram bins for the density command
    #[arg(long)]
    bins: Option<usize>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional SVG rendering
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Diagonalize the plain (undeformed) matrix in `spectrum`
    #[arg(long)]
    plain: bool,
}

fn parse_pf(text: &str) -> Result<(u64, u64), Error> {
    let mut parts = text.splitn(2, '/');
    let p = parts
        .next()
        .and_then(|s| s.trim().parse::<u64>().ok())
        .ok_or_else(|| Error::InvalidInput(format!("cannot parse filling '{text}'")))?;
    let q = parts
        .next()
        .and_then(|s| s.trim().parse::<u64>().ok())
        .ok_or_else(|| Error::InvalidInput(format!("filling '{text}' must look like p/q")))?;
    Ok((p, q))
}

fn build_config(command: Command, args: CommonArgs) -> Result<RunConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_json(&std::fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    cfg.command = command;
    if let Some(k) = args.k {
        cfg.k = k;
    }
    if let Some(l) = args.l {
        cfg.l = l;
    }
    if let Some(gap) = args.gap {
        cfg.gap = gap;
    }
    if let Some(pf) = &args.pf {
        cfg.pf = parse_pf(pf)?;
    }
    if let Some(w) = &args.window {
        let parts: Vec<f64> = w
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| {
                Error::InvalidInput(format!(
                    "window '{w}' must be two comma-separated numbers, e.g. -0.9,0.9"
                ))
            })?;
        if parts.len() != 2 {
            return Err(Error::InvalidInput(
                "window needs exactly two values, e.g. --window -0.9,0.9".into(),
            ));
        }
        cfg.lambda_window = [parts[0], parts[1]];
    }
    if let Some(bins) = args.bins {
        cfg.bins = bins;
    }
    if args.out.is_some() {
        cfg.out = args.out;
    }
    if args.svg.is_some() {
        cfg.svg = args.svg;
    }
    if args.plain {
        cfg.plain = true;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    negaspec::parallel::init_threads_from_env();
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        CliCommand::Spectrum(a) => (Command::Spectrum, a),
        CliCommand::Predict(a) => (Command::Predict, a),
        CliCommand::Density(a) => (Command::Density, a),
        CliCommand::Negativity(a) => (Command::Negativity, a),
        CliCommand::Compare(a) => (Command::Compare, a),
        CliCommand::Sweep(a) => (Command::Sweep, a),
    };
    let result = build_config(command, args).and_then(|cfg| cli::run(&cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("negaspec: {e}");
            ExitCode::from(cli::exit_code(&e) as u8)
        }
    }
}
