mod cache;
mod failure;
mod homology;
mod verify;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tropgc::graphs::{write_jsonl, GraphSet};
use tropgc::growth::{format_sig, growth_csv, growth_report};

use cache::{SetKind, Store};
use failure::Failure;
use homology::{ComplexKind, DegreeRange};
use verify::Suite;

#[derive(Debug, Parser)]
#[command(name = "tropgc", version, about = "Stable graphs, the graph complex and the tropical moduli space Δ_g")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    /// every stable graph of the genus
    Jg,
    /// loopless weight-0 graphs of minimum valence 3, optionally by degree
    GcGenerators,
    /// trivalent weight-0 graphs
    Trivalent,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write isomorphism classes of graphs as JSONL, sorted by canonical key
    Enumerate {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        genus: u32,
        #[arg(long, value_enum)]
        kind: Kind,
        /// graph-complex degrees `A..B` or `K` (gc-generators only)
        #[arg(long, alias = "degree", allow_hyphen_values = true)]
        degrees: Option<DegreeRange>,
        /// output file; standard output if absent
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "TROPGC_CACHE")]
        cache: Option<PathBuf>,
    },
    /// Rational homology table as CSV
    Homology {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        genus: u32,
        #[arg(long, value_enum)]
        complex: ComplexKind,
        #[arg(long, alias = "degree", allow_hyphen_values = true)]
        degrees: Option<DegreeRange>,
        /// prime used to skip exact elimination where mod-p homology vanishes
        #[arg(long = "mod-p")]
        mod_p: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "TROPGC_CACHE")]
        cache: Option<PathBuf>,
    },
    /// Run an invariant battery and print a JSON report
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        genus: Option<u32>,
        /// largest n for the growth suite
        #[arg(long)]
        max: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "TROPGC_CACHE")]
        cache: Option<PathBuf>,
    },
    /// Coefficients a_n, Lie dimensions A_n and a_n α^n as CSV
    Growth {
        #[arg(long, default_value_t = 400)]
        max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::io(p, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::io(Path::new("<stdout>"), e)),
    }
}

fn select(set: GraphSet, kind: Kind, g: u32, degrees: Option<DegreeRange>) -> GraphSet {
    match (kind, degrees) {
        (Kind::GcGenerators, Some(r)) => set
            .into_iter()
            .filter(|(key, _)| r.contains(key.edge_count() as i32 - 2 * g as i32))
            .collect(),
        _ => set,
    }
}

fn summary(kind: Kind, g: u32, set: &GraphSet) -> String {
    let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for key in set.keys() {
        *counts.entry((key.vertex_count(), key.edge_count())).or_default() += 1;
    }
    let per: Vec<String> = counts.iter().map(|((v, e), n)| format!("v{v}e{e}:{n}")).collect();
    format!(
        "genus={g} kind={} records={} counts={}",
        kind.to_possible_value().expect("named").get_name(),
        set.len(),
        per.join(",")
    )
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Enumerate { genus, kind, degrees, out, cache } => {
            if degrees.is_some() && kind != Kind::GcGenerators {
                return Err(Failure::Usage("--degrees only applies to --kind gc-generators".into()));
            }
            let store = Store::new(cache);
            let set_kind = match kind {
                Kind::Jg => SetKind::Jg,
                Kind::GcGenerators => SetKind::Gc,
                Kind::Trivalent => SetKind::Trivalent,
            };
            let set = select(store.graphs(genus, set_kind)?, kind, genus, degrees);
            let mut buf = Vec::new();
            write_jsonl(&mut buf, set.values()).expect("writing to memory");
            emit(out.as_deref(), std::str::from_utf8(&buf).expect("JSON is UTF-8"))?;
            let line = summary(kind, genus, &set);
            if out.is_some() {
                println!("{line}");
            } else {
                eprintln!("{line}");
            }
            Ok(true)
        }
        Command::Homology { genus, complex, degrees, mod_p, out, cache } => {
            let csv = homology::run(complex, genus, degrees, mod_p, &Store::new(cache))?;
            emit(out.as_deref(), &csv)?;
            Ok(true)
        }
        Command::Verify { suite, genus, max, out, cache } => {
            let report = verify::run(suite, genus, max, &Store::new(cache))?;
            let text = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
            emit(out.as_deref(), &text)?;
            if out.is_some() {
                println!("{} {}", report.suite, if report.passed { "pass" } else { "FAIL" });
            }
            Ok(report.passed)
        }
        Command::Growth { max, out } => {
            let report = growth_report(max, 1e-6)?;
            emit(out.as_deref(), &growth_csv(&report))?;
            if out.is_some() {
                println!(
                    "alpha={} beta0={} residue={} settled_from={:?}",
                    format_sig(report.alpha, 15),
                    format_sig(report.beta0, 15),
                    format_sig(report.residue, 15),
                    report.settled_from
                );
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(f) => {
            eprintln!("tropgc: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
