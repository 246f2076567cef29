use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use detcode::Scheme;
use detcode_cli::commands::{pareto_table, tradeoff_csv};
use detcode_cli::{audit_code, encode_bytes, parse_range, recover_bytes, repair_shard, CodeSpec, Shard};
use rand::Rng;

#[derive(Parser)]
#[command(
    name = "detcode",
    version,
    about = "Determinant-code shards, repair, security audits and trade-off tables"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CodeArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    m: usize,
    /// Eavesdropper size; must be 0 for the plain scheme.
    #[arg(long, default_value_t = 0)]
    ell: usize,
    #[arg(long, default_value = "plain")]
    scheme: Scheme,
    /// Field size, a prime above n. Defaults to the smallest such prime.
    #[arg(long)]
    q: Option<u32>,
}

impl CodeArgs {
    fn spec(&self) -> CodeSpec {
        CodeSpec {
            n: self.n,
            d: self.d,
            m: self.m,
            ell: self.ell,
            scheme: self.scheme,
            q: self.q,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Encode a file into n shard files.
    Encode {
        input: PathBuf,
        #[command(flatten)]
        code: CodeArgs,
        /// Key seed; without it keys come from the OS and are not stored.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Rebuild the original file from any d shards.
    Recover {
        #[arg(required = true)]
        shards: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Regenerate a lost shard from d helper shards.
    Repair {
        /// Id of the lost node (1-based).
        #[arg(long)]
        failed: usize,
        #[arg(required = true)]
        helpers: Vec<PathBuf>,
        /// Output shard path; defaults to shard_{failed}.detc next to the first helper.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact leakage audit over all eavesdropper sets up to a size.
    Audit {
        #[command(flatten)]
        code: CodeArgs,
        /// Largest set size to audit; defaults to ell.
        #[arg(long)]
        max_set: Option<usize>,
    },
    /// Trade-off table as CSV.
    Tradeoff {
        /// d values: `a..b`, `a,b,c` or a single value.
        #[arg(long)]
        d: String,
        #[arg(long, default_value = "0")]
        ell: String,
        /// Comma-separated schemes.
        #[arg(long, default_value = "type1,type2")]
        scheme: String,
        /// Write normalised values as exact fractions.
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pareto modes per (d, ell).
    Pareto {
        #[arg(long)]
        d: String,
        #[arg(long)]
        ell: String,
        #[arg(long, default_value = "type2")]
        scheme: Scheme,
    },
}

fn read_shards(paths: &[PathBuf]) -> Result<Vec<Shard>> {
    paths
        .iter()
        .map(|p| Shard::read(p).with_context(|| format!("reading {}", p.display())))
        .collect()
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Encode {
            input,
            code,
            seed,
            out,
        } => {
            let data = fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
            let spec = code.spec();
            let params = spec.params()?;
            if params.secret_count() == 0 {
                bail!(
                    "{} at d={} m={} ell={} stores no data",
                    spec.scheme.name(),
                    spec.d,
                    spec.m,
                    spec.ell
                );
            }
            let (seed, present) = match seed {
                Some(s) => (s, true),
                None => (rand::rng().random(), false),
            };
            let shards = encode_bytes(&data, &spec, seed, present)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            for s in &shards {
                s.write_atomic(&out.join(Shard::file_name(s.header.node_id as usize)))?;
            }
            eprintln!(
                "wrote {} shards, {} stripes of {} symbols",
                shards.len(),
                shards[0].header.stripe_count(),
                params.secret_count()
            );
        }
        Cmd::Recover { shards, out } => {
            let data = recover_bytes(&read_shards(&shards)?)?;
            fs::write(&out, &data).with_context(|| format!("writing {}", out.display()))?;
            eprintln!("recovered {} bytes", data.len());
        }
        Cmd::Repair { failed, helpers, out } => {
            let outcome = repair_shard(failed, &read_shards(&helpers)?)?;
            let out = out.unwrap_or_else(|| {
                helpers[0]
                    .parent()
                    .unwrap_or(".".as_ref())
                    .join(Shard::file_name(failed))
            });
            outcome.shard.write_atomic(&out)?;
            println!("repaired node {failed}; bandwidth {} symbols", outcome.bandwidth);
        }
        Cmd::Audit { code, max_set } => {
            let report = audit_code(&code.spec(), max_set)?;
            print!("{}", report.render());
            return Ok(report.pass);
        }
        Cmd::Tradeoff {
            d,
            ell,
            scheme,
            exact,
            out,
        } => {
            let schemes = scheme
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<Scheme>())
                .collect::<Result<Vec<_>, _>>()?;
            let csv = tradeoff_csv(&parse_range(&d)?, &parse_range(&ell)?, &schemes, exact);
            emit(&csv, out.as_ref())?;
        }
        Cmd::Pareto { d, ell, scheme } => {
            print!("{}", pareto_table(&parse_range(&d)?, &parse_range(&ell)?, scheme));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
