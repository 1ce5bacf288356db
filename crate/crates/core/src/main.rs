use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use quasigroups::format::{self, TableFormat};
use quasigroups::generate::{self, GenKind, GenSpec};
use quasigroups::{decomposition_tree, find_isotopy, fixtures, CorollaryReport, Error, QPredicate, QTable};

/// Finite multary quasigroups: validation, decomposition, isotopy and
/// instance generation.
#[derive(Parser)]
#[command(name = "qgroup", version)]
struct Cli {
    /// Worker threads for library-level parallelism (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a table and report its code parameters.
    Check { path: PathBuf },
    /// Decompose a table into irreducible pieces.
    Reduce { path: PathBuf },
    /// Reconstruct a decomposition from the maximal irreducible retract.
    Theorem1 {
        path: PathBuf,
        /// Re-check the group map under every fixing of the other coordinates.
        #[arg(long)]
        strict: bool,
    },
    /// Generate a table.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        order: usize,
        /// Table arity; ignored by planted-superposition.
        #[arg(long)]
        arity: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Planted groups of one-based predicate positions, e.g. "1,5,6:2,7:3:4".
        #[arg(long)]
        groups: Option<String>,
        /// Search for an irreducible outer instead of drawing a random one.
        #[arg(long)]
        irreducible_outer: bool,
        #[arg(long, default_value_t = generate::DEFAULT_SEARCH_BUDGET)]
        budget: usize,
        #[arg(long, value_enum, default_value_t = Format::Qtable)]
        format: Format,
        /// Output file (default: standard output).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Search for an isotopy from the first table's graph to the second's.
    Isotopic { first: PathBuf, second: PathBuf },
    /// Write a bundled table.
    Fixture {
        name: String,
        #[arg(long, value_enum, default_value_t = Format::Qtable)]
        format: Format,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Group,
    RandomIsotopeOfGroup,
    PlantedSuperposition,
    RandomSearchIrreducible,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Qtable,
    Mdscode,
}

impl From<Format> for TableFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Qtable => TableFormat::QTable,
            Format::Mdscode => TableFormat::MdsCode,
        }
    }
}

const NEGATIVE: u8 = 1;
const USAGE: u8 = 2;

/// Exit status for an error: usage and parse problems give 2, everything
/// else 1.
fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    match err {
        Error::Parse { .. } | Error::Io(_) | Error::Precondition(_) => ExitCode::from(USAGE),
        _ => ExitCode::from(NEGATIVE),
    }
}

fn read_table(path: &Path) -> Result<QTable, Error> {
    let text = fs::read_to_string(path)?;
    Ok(format::parse_table(&text)?.0)
}

fn read_valid(path: &Path) -> Result<QPredicate, Error> {
    QPredicate::from_table(&read_table(path)?)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_groups(text: &str) -> Result<Vec<Vec<usize>>, Error> {
    let usage = |m: String| Error::Precondition(format!("--groups: {m}"));
    text.split(':')
        .map(|g| {
            g.split(',')
                .map(|p| match p.trim().parse::<usize>() {
                    Ok(p) if p >= 1 => Ok(p - 1),
                    _ => Err(usage(format!("bad position {p:?}"))),
                })
                .collect()
        })
        .collect()
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Check { path } => {
            let table = match read_table(&path) {
                Err(e @ Error::NotPredicate(_)) => {
                    println!("invalid: {e}");
                    return Ok(ExitCode::from(NEGATIVE));
                }
                other => other?,
            };
            if let Err(v) = table.validate() {
                println!("invalid: {v}");
                return Ok(ExitCode::from(NEGATIVE));
            }
            let pred = QPredicate::from_table(&table)?;
            println!("valid order={} arity={}", table.order(), table.arity());
            println!("members={}", pred.member_count());
            match pred.min_distance() {
                Some(d) => println!("min-distance={d}"),
                None => println!("min-distance=none"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Reduce { path } => {
            let pred = read_valid(&path)?;
            let tree = decomposition_tree(&pred);
            println!("{}", if tree.is_single_node() { "irreducible" } else { "reducible" });
            print!("{}", format::write_dtree(&tree));
            Ok(ExitCode::SUCCESS)
        }
        Command::Theorem1 { path, strict } => {
            let pred = read_valid(&path)?;
            match quasigroups::corollary_check(&pred, strict)? {
                CorollaryReport::HypothesisNotMet { k, arity } => {
                    println!("hypothesis not met, k={k} (need 4 <= k <= {})", arity as isize - 3);
                    Ok(ExitCode::from(NEGATIVE))
                }
                CorollaryReport::Reducible { decomposition, .. } => {
                    println!("reducible");
                    print!("{}", format::write_theorem(&decomposition)?);
                    Ok(ExitCode::SUCCESS)
                }
            }
        }
        Command::Gen { kind, order, arity, seed, groups, irreducible_outer, budget, format: fmt, out } => {
            let need_arity = || arity.ok_or_else(|| Error::Precondition("--arity is required for this kind".into()));
            let (kind, arity) = match kind {
                Kind::Group => (GenKind::Group, need_arity()?),
                Kind::RandomIsotopeOfGroup => (GenKind::RandomIsotopeOfGroup, need_arity()?),
                Kind::RandomSearchIrreducible => (GenKind::RandomSearchIrreducible { budget }, need_arity()?),
                Kind::PlantedSuperposition => {
                    let text = groups.ok_or_else(|| Error::Precondition("--groups is required".into()))?;
                    let groups = parse_groups(&text)?;
                    let arity = groups.iter().map(Vec::len).sum::<usize>() - 1;
                    (GenKind::PlantedSuperposition { groups, irreducible_outer }, arity)
                }
            };
            let table = generate::generate(&GenSpec { kind, order, arity, seed })?;
            emit(&format::write_table(&table, fmt.into()), out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Isotopic { first, second } => {
            let (p1, p2) = (read_valid(&first)?, read_valid(&second)?);
            if p1.order() != p2.order() || p1.arity() != p2.arity() {
                println!(
                    "not isotopic: orders {}/{} and arities {}/{}",
                    p1.order(),
                    p2.order(),
                    p1.arity(),
                    p2.arity()
                );
                return Ok(ExitCode::from(NEGATIVE));
            }
            match find_isotopy(&p1, &p2)? {
                Some(w) => {
                    println!("isotopic");
                    print!("{w}");
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("not isotopic");
                    Ok(ExitCode::from(NEGATIVE))
                }
            }
        }
        Command::Fixture { name, format: fmt, out } => {
            let f = fixtures::by_name(&name)?;
            emit(&format::write_table(&f.table, fmt.into()), out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE);
        }
    }
    run(cli).unwrap_or_else(|e| fail(&e))
}
