//! `g2spectral`: generate Killing fields, extract spectral data, run the Lax
//! flow and the full verification suite.
//!
//! Exit codes: 0 all checks pass, 1 a check failed or a numerical error,
//! 2 usage, 3 file or IO error.

mod commands;
mod field_file;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use g2spectral::checks::{aggregate, SuiteOptions};
use g2spectral::C64;

use commands::{CommandError, VerifyPlan};
use report::ReportDocument;

const DEFAULT_VERIFY_OUT: &str = "verify_report.json";

#[derive(Parser, Debug)]
#[command(name = "g2spectral", version, about = "Spectral curves of G2 polynomial Killing fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a random Killing field of degree 6k+1.
    Gen {
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reality, grading and symmetry residuals of a field file.
    Inspect(Io),
    /// Spectral coefficients, ramification profile and genus report.
    Spectral {
        #[command(flatten)]
        io: Io,
        /// Interpolation samples for det(mu - A).
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Integrate the Lax flow; writes a JSON report and a CSV drift series.
    Flow {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Integrator tolerance.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Selects the flow direction.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fiberwise checks at the given zeta (repeat --zeta re,im).
    Fiber {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_parser = parse_complex)]
        zeta: Vec<C64>,
        /// Number of generic zeta when none is given.
        #[arg(long, default_value_t = 12)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Full acceptance suite over k and a seed range.
    Verify {
        /// Comma separated or repeated.
        #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1, 2])]
        k: Vec<usize>,
        /// Inclusive range `a..b`, or a single seed.
        #[arg(long, value_parser = parse_seeds, default_value = "0..19")]
        seeds: std::ops::RangeInclusive<u64>,
        /// Integrator tolerance for the flow checks.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Generic zeta per seed for the fiberwise checks.
        #[arg(long, default_value_t = 12)]
        samples: usize,
        #[arg(long, default_value_t = 20)]
        frames: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Io {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected re,im, got {s:?}"))?;
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    let z = C64::new(p(re)?, p(im)?);
    if !z.re.is_finite() || !z.im.is_finite() || z.norm() == 0.0 {
        return Err(format!("zeta must be finite and nonzero, got {s:?}"));
    }
    Ok(z)
}

fn parse_seeds(s: &str) -> Result<std::ops::RangeInclusive<u64>, String> {
    let p = |x: &str| x.trim().parse::<u64>().map_err(|e| format!("{x:?}: {e}"));
    let r = match s.split_once("..") {
        Some((a, b)) => p(a)?..=p(b.trim_start_matches('='))?,
        None => {
            let a = p(s)?;
            a..=a
        }
    };
    if r.is_empty() {
        return Err(format!("empty seed range {s:?}"));
    }
    Ok(r)
}

fn configure_threads() {
    if let Some(n) = std::env::var("G2SPECTRAL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // only fails if a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn timestamp() -> Option<u64> {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).ok().map(|d| d.as_secs())
}

/// Writes the report; exit 0 if it passes, 1 with the report path otherwise.
fn finish(doc: &ReportDocument, out: Option<&Path>) -> Result<u8, CommandError> {
    commands::emit(doc, out)?;
    if doc.passed() {
        return Ok(0);
    }
    let failed: Vec<String> =
        doc.criteria().iter().filter(|c| !c.passed).map(|c| c.criterion.to_string()).collect();
    let at = out.map_or_else(|| "<stdout>".to_string(), |p| p.display().to_string());
    eprintln!("checks failed (criteria {}); report: {at}", failed.join(", "));
    Ok(1)
}

fn run(cli: Cli) -> Result<u8, CommandError> {
    let alg = commands::algebra()?;
    match cli.command {
        Command::Gen { k, seed, out } => {
            let f = commands::gen(&alg, k, seed, timestamp());
            commands::write_text(out.as_deref(), &f.to_json())?;
            Ok(0)
        }
        Command::Inspect(io) => {
            let a = commands::read_field(&alg, &io.input)?;
            finish(&commands::inspect(&alg, &a)?, io.out.as_deref())
        }
        Command::Spectral { io, samples } => {
            let a = commands::read_field(&alg, &io.input)?;
            finish(&commands::spectral(&a, samples)?, io.out.as_deref())
        }
        Command::Flow { io, t, tol, seed } => {
            let a = commands::read_field(&alg, &io.input)?;
            let art = commands::flow(&alg, &a, t, tol, seed)?;
            if let Some(p) = &io.out {
                let csv = commands::csv_path(p);
                commands::write_text(Some(&csv), &art.csv)?;
            }
            finish(&art.doc, io.out.as_deref())
        }
        Command::Fiber { io, zeta, samples, seed } => {
            let a = commands::read_field(&alg, &io.input)?;
            let zetas = if zeta.is_empty() { g2spectral::loop_algebra::generic_zetas(samples, seed) } else { zeta };
            finish(&commands::fiber(&a, &zetas)?, io.out.as_deref())
        }
        Command::Verify { k, seeds, tol, samples, frames, out } => {
            let opts = SuiteOptions { flow_tol: tol, fiber_samples: samples.max(1), ..SuiteOptions::default() };
            let plan = VerifyPlan { ks: k, seeds: seeds.collect(), opts, frames };
            let doc = commands::verify(&alg, &plan);
            for s in aggregate(&doc.checks) {
                if s.checks == 0 {
                    continue;
                }
                let verdict = if s.passed { "PASS" } else { "FAIL" };
                println!("criterion {} [{verdict}] {} checks, {} failing", s.criterion, s.checks, s.failures.len());
            }
            let out = out.unwrap_or_else(|| PathBuf::from(DEFAULT_VERIFY_OUT));
            let code = finish(&doc, Some(&out))?;
            if code == 0 {
                println!("report: {}", out.display());
            }
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    configure_threads();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
