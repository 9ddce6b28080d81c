//! `ng2`: batch verification reports for the nearly-g2 toolkit.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "ng2", version, about = "Nearly G2 geometry on S^7: verification reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact integer checks of the cross-product and contraction identities.
    VerifyIdentities {
        /// Flip the sign of one φ triple (0-based, e.g. 0,1,2).
        #[arg(long, hide = true, value_parser = parse_triple)]
        corrupt_phi: Option<[usize; 3]>,
    },
    /// Torsion of the round S^7 by finite differences at random points.
    Torsion {
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
        #[arg(long, default_value_t = 2)]
        order: u32,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
    },
    /// Shape invariants and nearly Kähler defects of an example hypersurface.
    Hypersurface {
        #[command(flatten)]
        example: ExampleArg,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
    },
    /// Grid check of Δh = −(|A|² + 6) h.
    Eigencheck {
        #[command(flatten)]
        example: ExampleArg,
        /// First generator: 8 comma-separated decimals.
        #[arg(long, value_parser = parse_vec8, default_value = "1,0,0,0,0,0,0,0")]
        field1: [f64; 8],
        /// Second generator: 8 comma-separated decimals.
        #[arg(long, value_parser = parse_vec8, default_value = "0,1,0,0,0,0,0,0")]
        field2: [f64; 8],
        /// Grid spacing.
        #[arg(long, default_value_t = 5e-3)]
        grid: f64,
        #[arg(long, default_value_t = 2)]
        order: u32,
        /// Largest accepted relative residual.
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
    },
}

#[derive(Args, Debug)]
struct ExampleArg {
    /// "s6" or "clifford:k" with k in 1..=5.
    #[arg(long, default_value = "clifford:3")]
    example: String,
}

fn parse_list<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated values, got {}", parts.len()));
    }
    let mut out = [0.0_f64; N];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.parse().map_err(|e| format!("{p:?}: {e}"))?;
        if !o.is_finite() {
            return Err(format!("{p:?} is not finite"));
        }
    }
    Ok(out)
}

fn parse_vec8(s: &str) -> Result<[f64; 8], String> {
    parse_list::<8>(s)
}

fn parse_triple(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [a, b, c] if *a < 7 && *b < 7 && *c < 7 && a != b && b != c && a != c => Ok([*a, *b, *c]),
        _ => Err("expected three distinct indices in 0..7".into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::VerifyIdentities { corrupt_phi } => commands::verify_identities(corrupt_phi),
        Command::Torsion {
            samples,
            step,
            order,
            tol,
        } => commands::torsion(samples, cli.seed, step, order, tol),
        Command::Hypersurface { example, samples, tol } => {
            commands::hypersurface(&example.example, samples, cli.seed, tol)
        }
        Command::Eigencheck {
            example,
            field1,
            field2,
            grid,
            order,
            tol,
        } => commands::eigencheck(&example.example, field1, field2, grid, order, tol, cli.seed),
    };
    match outcome {
        Ok(run) => {
            let text = report::render(&run.report, cli.format);
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{text}");
            }
            for line in &run.failures {
                eprintln!("FAIL: {line}");
            }
            if run.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
