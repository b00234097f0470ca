use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use padlock_core::bounds::{best_known, table_for_k, table_for_n};
use padlock_core::constructions::{
    build_2_of_n, build_3_of_n, build_benaloh, build_direct, build_double_daisy, build_recursive,
    build_weighted, fixture_13_participants, Formula, NormalForm,
};
use padlock_core::knots::{
    build_knot, search_minimal, verify_knot_threshold, KnotWord, SearchResult,
};
use padlock_core::model::DEFAULT_ENUMERATION_LIMIT;
use padlock_core::sharing::{
    coalition_shares, deal, min_field_size, reconstruct, RngSource, ShareFile,
};
use padlock_core::verifier::verify_threshold_limited;
use padlock_core::{Error, ThresholdSystem};

#[derive(Parser)]
#[command(
    name = "padlock",
    version,
    about = "Build, verify and bound k-out-of-n padlock systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a system and print its JSON.
    Construct(ConstructArgs),
    /// Check a system file against the k-threshold property.
    Verify {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        k: usize,
        /// Largest participant count to enumerate.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_LIMIT)]
        limit: usize,
    },
    /// Lower and upper bounds on the padlock count.
    Bounds {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: u64,
    },
    /// Bounds table as CSV, either over k at fixed n or over n at fixed k.
    Table {
        #[arg(long, requires = "k_max", conflicts_with = "k")]
        n: Option<u64>,
        #[arg(long)]
        k_max: Option<u64>,
        #[arg(long, requires = "n_max")]
        k: Option<u64>,
        #[arg(long)]
        n_max: Option<u64>,
    },
    /// Knotted systems as free-group words.
    Knot(KnotArgs),
    /// Deal a secret over the circuit of a system.
    Share {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        secret: u64,
        /// Field size; defaults to the smallest prime that fits the circuit.
        #[arg(long)]
        q: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover the secret from the shares a coalition can open.
    Reconstruct {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        shares: PathBuf,
        /// Zero-based participant indices, comma separated.
        #[arg(long, value_delimiter = ',')]
        coalition: Vec<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheme {
    Direct,
    Two,
    Daisy,
    Dnf,
    Cnf,
    Benaloh,
    Weighted,
    Bose,
    Fixture13,
    Recursive,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, value_enum)]
    scheme: Scheme,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    formula: Option<String>,
    #[arg(long, value_delimiter = ',')]
    weights: Vec<u32>,
    #[arg(long = "W")]
    required_weight: Option<u32>,
    /// Also run the verifier and print its report on a second line.
    #[arg(long)]
    verify: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KnotArgs {
    #[arg(long, num_args = 2, value_names = ["K", "N"])]
    build: Option<Vec<usize>>,
    #[arg(long, value_name = "FILE", requires_all = ["k", "n"])]
    verify: Option<PathBuf>,
    #[arg(long, num_args = 2..=3, value_names = ["K", "N", "MAX_LEN"])]
    search: Option<Vec<usize>>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 12)]
    max_len: usize,
}

#[derive(Serialize)]
struct KnotOutput {
    k: usize,
    n: usize,
    length: usize,
    word: String,
}

#[derive(Serialize)]
struct SearchOutput {
    k: usize,
    n: usize,
    max_len: usize,
    result: Option<SearchResult>,
}

#[derive(Serialize)]
struct AccessOutput {
    participants: usize,
    padlocks: usize,
    minimal_sets: Vec<Vec<usize>>,
}

#[derive(Serialize)]
struct ReconstructOutput {
    coalition: Vec<usize>,
    opens: bool,
    secret: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(Error::Parse { .. } | Error::Parameter(_)) => 2,
        Some(_) => 1,
        None if e.downcast_ref::<Usage>().is_some() => 2,
        None => 1,
    }
}

#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Usage(msg.into()))
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Construct(args) => construct(args),
        Command::Verify { system, k, limit } => {
            let system = read_system(&system)?;
            emit(&verify_threshold_limited(&system, k, limit)?)
        }
        Command::Bounds { k, n } => emit(&best_known(k, n)?),
        Command::Table { n, k_max, k, n_max } => {
            let rows = match (n, k_max, k, n_max) {
                (Some(n), Some(k_max), None, _) => table_for_n(n, k_max)?,
                (None, _, Some(k), Some(n_max)) => table_for_k(k, n_max)?,
                _ => return Err(usage("table needs --n with --k-max, or --k with --n-max")),
            };
            let mut w = csv::Writer::from_writer(std::io::stdout().lock());
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
            Ok(())
        }
        Command::Knot(args) => knot(args),
        Command::Share {
            system,
            secret,
            q,
            seed,
            out,
        } => {
            let system = read_system(&system)?;
            let circuit = system.circuit();
            let q = q.unwrap_or_else(|| min_field_size(circuit));
            let mut source = RngSource(ChaCha8Rng::seed_from_u64(seed));
            let dealing = deal(circuit, secret, q, &mut source)?;
            write_out(out.as_deref(), &ShareFile::new(circuit, &dealing).to_json())
        }
        Command::Reconstruct {
            system,
            shares,
            coalition,
        } => {
            let system = read_system(&system)?;
            let file = ShareFile::from_json(&read(&shares)?)?;
            file.check_circuit(system.circuit())?;
            let mut coalition = coalition;
            coalition.sort_unstable();
            coalition.dedup();
            let held = coalition_shares(&system, &file.shares, &coalition)?;
            let secret = reconstruct(system.circuit(), &held, file.q)?;
            emit(&ReconstructOutput {
                opens: system.coalition_open(&coalition)?,
                coalition,
                secret,
            })
        }
    }
}

fn construct(args: ConstructArgs) -> Result<()> {
    let need_n = || args.n.ok_or_else(|| usage("this scheme needs --n"));
    let need_k = || args.k.ok_or_else(|| usage("this scheme needs --k"));
    let (system, natural_k) = match args.scheme {
        Scheme::Direct => (build_direct(need_k()?, need_n()?)?, args.k),
        Scheme::Two => (build_2_of_n(need_n()?)?, Some(2)),
        Scheme::Daisy => (build_double_daisy(need_n()?)?, Some(2)),
        Scheme::Bose => (build_3_of_n(need_n()?)?, Some(3)),
        Scheme::Fixture13 => (fixture_13_participants()?, Some(3)),
        Scheme::Recursive => (build_recursive(need_k()?, need_n()?)?, args.k),
        Scheme::Benaloh => (build_benaloh()?, args.k),
        Scheme::Dnf | Scheme::Cnf => {
            let text = args
                .formula
                .as_deref()
                .ok_or_else(|| usage("this scheme needs --formula"))?;
            let kind = if matches!(args.scheme, Scheme::Dnf) {
                NormalForm::Dnf
            } else {
                NormalForm::Cnf
            };
            (Formula::parse(text, kind)?.to_system()?, args.k)
        }
        Scheme::Weighted => {
            if args.weights.is_empty() {
                return Err(usage("weighted scheme needs --weights"));
            }
            let w = args
                .required_weight
                .ok_or_else(|| usage("weighted scheme needs --W"))?;
            (build_weighted(&args.weights, w)?, args.k)
        }
    };
    let json = system.to_json();
    let report = if !args.verify {
        None
    } else if let Some(k) = args.k.or(natural_k) {
        Some(serde_json::to_string(&verify_threshold_limited(
            &system,
            k,
            DEFAULT_ENUMERATION_LIMIT,
        )?)?)
    } else {
        let access = system.realized_access_structure()?;
        Some(serde_json::to_string(&AccessOutput {
            participants: system.participants(),
            padlocks: system.padlock_count(),
            minimal_sets: access.minimal_sets().to_vec(),
        })?)
    };
    match (&args.out, report) {
        (Some(path), report) => {
            fs::write(path, format!("{json}\n"))
                .with_context(|| format!("writing {}", path.display()))?;
            if let Some(r) = report {
                println!("{r}");
            }
        }
        (None, report) => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{json}")?;
            if let Some(r) = report {
                writeln!(out, "{r}")?;
            }
        }
    }
    Ok(())
}

fn knot(args: KnotArgs) -> Result<()> {
    if let Some(v) = args.build {
        let (k, n) = (v[0], v[1]);
        let word = build_knot(k, n)?;
        return emit(&KnotOutput {
            k,
            n,
            length: word.len(),
            word: word.to_string(),
        });
    }
    if let Some(path) = args.verify {
        let (k, n) = (args.k.unwrap_or_default(), args.n.unwrap_or_default());
        let n = u32::try_from(n).map_err(|_| usage("--n out of range"))?;
        let word = KnotWord::parse(&read(&path)?, n)?;
        return emit(&verify_knot_threshold(&word, k)?);
    }
    if let Some(v) = args.search {
        let (k, n) = (v[0], v[1]);
        let max_len = v.get(2).copied().unwrap_or(args.max_len);
        return emit(&SearchOutput {
            k,
            n,
            max_len,
            result: search_minimal(k, n, max_len)?,
        });
    }
    Err(usage("knot needs --build, --verify or --search"))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Reads the first JSON document of a file, so `construct --verify` output
/// can be fed back in unchanged.
fn read_system(path: &Path) -> Result<ThresholdSystem> {
    let text = read(path)?;
    let first = text.trim_start().lines().next().unwrap_or("");
    let doc = if serde_json::from_str::<serde_json::Value>(first).is_ok() {
        first
    } else {
        text.as_str()
    };
    Ok(ThresholdSystem::from_json(doc)?)
}

fn emit<T: Serialize>(value: &T) -> Result<()> {
    write_out(None, &serde_json::to_string(value)?)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            writeln!(std::io::stdout().lock(), "{text}")?;
            Ok(())
        }
    }
}
