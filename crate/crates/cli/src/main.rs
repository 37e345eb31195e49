use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use updown_core::oracle;
use updown_core::phi::{self, PhiRecursion};
use updown_core::report::{self, ChainFormat};
use updown_core::suite::{self, SuiteConfig};
use updown_core::{canonical_chain, verify_chain, Error};

/// Minimum up-down closure sizes of set families.
#[derive(Parser, Debug)]
#[command(name = "updown", version)]
struct Cli {
    /// Lowers the ground-size cap of every command.
    #[arg(long, env = "UPDOWN_MAX_N", global = true, hide_env_values = true)]
    max_ground: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print Φ(n, m).
    Phi {
        n: u32,
        m: u64,
        #[arg(long, value_enum, default_value_t = Method::Fast)]
        method: Method,
    },
    /// Write Φ(n, 0..=2^n).
    Table {
        n: u32,
        #[arg(long, value_enum, default_value_t = TableFormat::Tsv)]
        format: TableFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the canonical witness chain over [n].
    Chain {
        n: u32,
        #[arg(long, value_enum, default_value_t = ChainFormatArg::Text)]
        format: ChainFormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Check every index and anchor; exit 1 on any failure.
        #[arg(long)]
        verify: bool,
    },
    /// Ferrers diagram of (Φ(n,1), .., Φ(n,2^n)); dot list on stdout by default.
    Ferrers {
        n: u32,
        #[arg(long, conflicts_with = "tsv")]
        svg: Option<PathBuf>,
        #[arg(long)]
        tsv: Option<PathBuf>,
    },
    /// Run the invariant suite.
    Verify {
        #[arg(long, default_value_t = 16)]
        max_n: u32,
        #[arg(long, default_value_t = 4)]
        oracle_max: u32,
        /// Corrupt one memoised recursion value before running.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// g(n, m) = 2^n − Φ(n, m); without m, the largest |F| + |G| and its bound.
    CrossSperner { n: u32, m: Option<u64> },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Fast,
    Recursive,
    Both,
    Oracle,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TableFormat {
    Tsv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ChainFormatArg {
    Text,
    Jsonl,
}

/// A check that ran and failed (exit 1), as opposed to bad input (exit 2).
#[derive(Debug)]
struct Failed(String);

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Failed {}

fn cap(n: u32, limit: Option<u32>) -> Result<(), Error> {
    match limit {
        Some(max) if n > max => Err(Error::TooLarge {
            what: "UPDOWN_MAX_N",
            n,
            max,
        }),
        _ => Ok(()),
    }
}

fn write_output(path: Option<&Path>, body: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let limit = cli.max_ground;
    match cli.command {
        Command::Phi { n, m, method } => {
            cap(n, limit)?;
            let value = match method {
                Method::Fast => phi::phi_fast(n, m)?,
                Method::Recursive => phi::phi_recursive(n, m)?,
                Method::Both => {
                    let (fast, recursive) = (phi::phi_fast(n, m)?, phi::phi_recursive(n, m)?);
                    if fast != recursive {
                        bail!(Failed(format!(
                            "methods disagree at n={n} m={m}: fast {fast}, recursive {recursive}"
                        )));
                    }
                    fast
                }
                Method::Oracle => oracle::brute_min_updown(n, m)?.0,
            };
            println!("{value}");
        }
        Command::Table { n, format, out } => {
            cap(n, limit)?;
            let t = phi::phi_table(n)?;
            let body = match format {
                TableFormat::Tsv => report::table_tsv(&t),
                TableFormat::Json => report::table_json(&t),
            };
            write_output(out.as_deref(), &body)?;
        }
        Command::Chain {
            n,
            format,
            out,
            verify,
        } => {
            cap(n, limit)?;
            let chain = canonical_chain(n)?;
            let format = match format {
                ChainFormatArg::Text => ChainFormat::Text,
                ChainFormatArg::Jsonl => ChainFormat::JsonLines,
            };
            match &out {
                Some(p) => {
                    let file =
                        File::create(p).with_context(|| format!("creating {}", p.display()))?;
                    report::write_chain(&chain, format, BufWriter::new(file))?;
                }
                None => report::write_chain(&chain, format, BufWriter::new(io::stdout().lock()))?,
            }
            if verify {
                let r = verify_chain(&chain)?;
                if !r.passed() {
                    bail!(Failed(format!(
                        "chain over [{n}] fails at indices {:?}",
                        r.failing_indices()
                    )));
                }
                eprintln!(
                    "chain over [{n}]: {} indices, {} anchors verified",
                    r.indices.len(),
                    r.anchors.len()
                );
            }
        }
        Command::Ferrers { n, svg, tsv } => {
            cap(n, limit)?;
            let t = phi::phi_table(n)?;
            match (svg, tsv) {
                (Some(p), _) => write_output(Some(&p), &report::ferrers_svg(&t)?)?,
                (None, p) => write_output(p.as_deref(), &report::ferrers_tsv(&t)?)?,
            }
        }
        Command::Verify {
            max_n,
            oracle_max,
            inject_fault,
        } => {
            cap(max_n, limit)?;
            cap(oracle_max, limit)?;
            let mut rec = PhiRecursion::new();
            if inject_fault {
                rec.corrupt(4, 3, 12);
            }
            let outcomes = suite::run_suite(SuiteConfig { max_n, oracle_max }, &mut rec);
            for o in &outcomes {
                println!("{o}");
            }
            let failed = outcomes.iter().filter(|o| !o.passed()).count();
            println!(
                "{} of {} checks passed",
                outcomes.len() - failed,
                outcomes.len()
            );
            if failed > 0 {
                bail!(Failed(format!("{failed} checks failed")));
            }
        }
        Command::CrossSperner { n, m } => {
            cap(n, limit)?;
            match m {
                Some(m) => println!("{}", phi::cross_sperner_g(n, m)?),
                None => println!(
                    "{} {}",
                    phi::cross_sperner_max(n)?,
                    phi::cross_sperner_bound(n)?
                ),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Failed>().is_some() {
                return ExitCode::from(1);
            }
            match e.downcast_ref::<Error>() {
                Some(Error::MethodDisagreement { .. } | Error::PreconditionViolated(_)) => {
                    ExitCode::from(1)
                }
                Some(_) => ExitCode::from(2),
                None => ExitCode::from(1),
            }
        }
    }
}
