//! Command line entry point. Exit codes: 0 success, 1 a verification
//! suite failed, 2 usage or input error.

use clap::{Parser, Subcommand, ValueEnum};
use starprod::{
    cmd_bench, cmd_coeff, cmd_eval, cmd_verify, commands::parse_flag_expr, BenchCutoff, CliError,
    OutputFormat, RunConfig,
};

#[derive(Parser)]
#[command(
    name = "starprod",
    version,
    about = "Exact star product toolkit for the 2x2 Grassmannian chart"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Csv,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => OutputFormat::Text,
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        }
    }
}

fn parse_pq(s: &str) -> Result<(u8, u8), String> {
    let (a, b) = s.split_once(',').ok_or("expected P,Q")?;
    let p: u8 = a.trim().parse().map_err(|_| "P must be a small integer")?;
    let q: u8 = b.trim().parse().map_err(|_| "Q must be a small integer")?;
    if p == 0 || q == 0 {
        return Err("P and Q must be at least 1".into());
    }
    Ok((p, q))
}

#[derive(Subcommand)]
enum Cmd {
    /// Print one order of the bidifferential coefficient table
    Coeff {
        /// Coefficient order (max 6)
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        #[arg(long, value_parser = parse_pq, default_value = "2,2")]
        pq: (u8, u8),
    },
    /// Run a verification suite; exits 1 if any check fails
    Verify {
        /// One of: recurrence, hs-residual, i-independence, fock,
        /// geometry, star-axioms
        #[arg(long)]
        suite: String,
        /// Coefficient order for the table suites
        #[arg(long)]
        n: Option<usize>,
        /// Star truncation order for star-axioms (max 3)
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_parser = parse_pq, default_value = "2,2")]
        pq: (u8, u8),
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        /// Extra associativity triple for star-axioms (give all three)
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        g: Option<String>,
        #[arg(long)]
        h: Option<String>,
    },
    /// Evaluate a truncated star product at a point
    Eval {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        /// Optional third factor, multiplied on the right
        #[arg(long)]
        h: Option<String>,
        /// Truncation order (max 3)
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// Numeric value substituted for hbar, as a rational
        #[arg(long, default_value = "1/10")]
        hbar: String,
        /// JSON file with the evaluation point; a seeded random regular
        /// point is drawn otherwise
        #[arg(long)]
        point: Option<String>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Time the recurrence solver against the naive enumeration
    Bench {
        /// Table order for the recurrence solver (max 6)
        #[arg(long, default_value_t = 6)]
        n: usize,
        /// Order for the naive enumeration (default n - 1)
        #[arg(long)]
        naive_n: Option<usize>,
        /// Abort the naive run after this many seconds and report the
        /// speedup as a lower bound
        #[arg(long)]
        cutoff_secs: Option<f64>,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.cmd {
        Cmd::Coeff { n, format, pq } => {
            let cfg = RunConfig {
                p: pq.0,
                q: pq.1,
                n: Some(n),
                format: format.into(),
                ..RunConfig::default()
            };
            print!("{}", cmd_coeff(&cfg)?);
            Ok(0)
        }
        Cmd::Verify {
            suite,
            n,
            order,
            seed,
            pq,
            format,
            f,
            g,
            h,
        } => {
            let cfg = RunConfig {
                p: pq.0,
                q: pq.1,
                n,
                order,
                seed,
                format: format.into(),
                ..RunConfig::default()
            };
            let extra = match (f, g, h) {
                (Some(f), Some(g), Some(h)) => Some([
                    parse_flag_expr("--f", &f)?,
                    parse_flag_expr("--g", &g)?,
                    parse_flag_expr("--h", &h)?,
                ]),
                (None, None, None) => None,
                _ => {
                    return Err(CliError::Usage(
                        "--f, --g and --h must be given together".into(),
                    ))
                }
            };
            let report = cmd_verify(&cfg, &suite, extra.as_ref())?;
            print!("{}", report.render(cfg.format));
            Ok(if report.passed { 0 } else { 1 })
        }
        Cmd::Eval {
            f,
            g,
            h,
            order,
            hbar,
            point,
            seed,
            format,
        } => {
            let hbar = exact_scalars::rat_parse(&hbar).map_err(CliError::Usage)?;
            let cfg = RunConfig {
                order: Some(order),
                hbar,
                seed,
                format: format.into(),
                ..RunConfig::default()
            };
            let report = cmd_eval(&cfg, &f, &g, h.as_deref(), point.as_deref())?;
            print!("{}", report.render(cfg.format));
            Ok(0)
        }
        Cmd::Bench {
            n,
            naive_n,
            cutoff_secs,
            format,
        } => {
            let cfg = RunConfig {
                n: Some(n),
                format: format.into(),
                ..RunConfig::default()
            };
            let cutoff = match cutoff_secs {
                Some(s) => BenchCutoff::Secs(s),
                None => BenchCutoff::None,
            };
            let report = cmd_bench(&cfg, naive_n, cutoff)?;
            print!("{}", report.render(cfg.format));
            Ok(0)
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}
