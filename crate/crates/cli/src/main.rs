//! Command-line front end: parse graph files, run the computations, emit
//! deterministic JSON. Exit codes: 0 success, 1 negative verdict (not
//! admissible, not minimal, incomplete enumeration), 2 input error, 3
//! internal invariant failure.

use clap::{Args, Parser, Subcommand};
use logmap_core::graph_monoid::{associated_monoid, is_admissible, zero_degeneracy, Inadmissibility};
use logmap_core::jsonio;
use logmap_core::minimal::{minimality_check, MinimalityError};
use logmap_core::specialize::{specialize_with_monoid, SpecializationSpec, SpecializeError};
use logmap_core::{validate, EnumerationLimits};
use serde_json::{Map, Value};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "logmap", version, about = "Exact combinatorics of marked dual graphs")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args)]
struct CommonArgs {
    /// Input file (graph or dual-graph JSON)
    #[arg(short, long)]
    input: PathBuf,
    /// Output file; stdout when absent
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Verb {
    /// Compute the monoid attached to a marked graph
    Monoid {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Decide admissibility of a marked graph
    Admissible {
        #[command(flatten)]
        common: CommonArgs,
        /// Also reject degenerate vertices whose degeneracy image is zero
        #[arg(long)]
        strict_degeneracy: bool,
    },
    /// Enumerate admissible decorations of an undecorated dual graph
    Enumerate {
        #[command(flatten)]
        common: CommonArgs,
        /// Cap on the number of solutions reported
        #[arg(long)]
        max_solutions: Option<usize>,
        /// Cap on any single edge contact order
        #[arg(long)]
        max_contact: Option<u64>,
    },
    /// Contract edges and mark vertices nondegenerate, with the induced map
    Specialize {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated edge ids to contract
        #[arg(long, value_delimiter = ',')]
        contract: Vec<String>,
        /// Comma-separated vertex ids to mark nondegenerate
        #[arg(long, value_delimiter = ',')]
        vanish: Vec<String>,
    },
    /// Check whether an assignment makes the target the graph's monoid
    Minimal {
        #[command(flatten)]
        common: CommonArgs,
        /// Target monoid JSON file
        #[arg(long)]
        target: PathBuf,
        /// Generator assignment JSON file
        #[arg(long)]
        assignment: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn input_error(message: String) -> Failure {
    Failure { code: 2, message }
}

fn internal_error(message: String) -> Failure {
    Failure { code: 3, message }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(f) = configure_threads() {
        eprintln!("{}", f.message);
        return ExitCode::from(f.code);
    }
    match run(cli.verb) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    match std::env::var("LOGMAP_THREADS") {
        Err(_) => Ok(()),
        Ok(s) => {
            let n: usize = s
                .parse()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| {
                    input_error(format!(
                        "LOGMAP_THREADS must be a positive integer, found {:?}",
                        s
                    ))
                })?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| internal_error(format!("thread pool setup failed: {}", e)))
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {}", path.display(), e)))
}

fn write_report(output: &Option<PathBuf>, report: &Value) -> Result<(), Failure> {
    let rendered = jsonio::render(report);
    match output {
        Some(path) => fs::write(path, rendered)
            .map_err(|e| internal_error(format!("cannot write {}: {}", path.display(), e))),
        None => std::io::stdout()
            .write_all(rendered.as_bytes())
            .map_err(|e| internal_error(format!("cannot write to stdout: {}", e))),
    }
}

fn parse_valid_graph(path: &Path) -> Result<logmap_core::MarkedGraph, Failure> {
    let text = read_input(path)?;
    let g = jsonio::parse_marked_graph(&text).map_err(|e| input_error(e.to_string()))?;
    let diags = validate(&g);
    if !diags.is_empty() {
        let msgs: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
        return Err(input_error(format!("invalid graph: {}", msgs.join("; "))));
    }
    Ok(g)
}

fn run(verb: Verb) -> Result<u8, Failure> {
    match verb {
        Verb::Monoid { common } => {
            let g = parse_valid_graph(&common.input)?;
            let m = associated_monoid(&g);
            write_report(&common.output, &jsonio::associated_monoid_value(&m))?;
            Ok(0)
        }
        Verb::Admissible { common, strict_degeneracy } => {
            let g = parse_valid_graph(&common.input)?;
            let verdict = match is_admissible(&g) {
                Err(reason) => Some(reason.to_string()),
                Ok(()) => {
                    if strict_degeneracy {
                        zero_degeneracy(&g)
                            .map(|v| Inadmissibility::ZeroDegeneracy(v).to_string())
                    } else {
                        None
                    }
                }
            };
            let mut o = Map::new();
            o.insert("admissible".to_string(), Value::Bool(verdict.is_none()));
            o.insert(
                "reason".to_string(),
                Value::String(verdict.clone().unwrap_or_default()),
            );
            write_report(&common.output, &Value::Object(o))?;
            Ok(if verdict.is_none() { 0 } else { 1 })
        }
        Verb::Enumerate { common, max_solutions, max_contact } => {
            let text = read_input(&common.input)?;
            let input =
                jsonio::parse_dual_input(&text).map_err(|e| input_error(e.to_string()))?;
            let defaults = EnumerationLimits::defaults_for(&input);
            let limits = EnumerationLimits {
                max_solutions: max_solutions.unwrap_or(defaults.max_solutions),
                max_contact: max_contact.unwrap_or(defaults.max_contact),
            };
            if limits.max_solutions < 1 || limits.max_contact < 1 {
                return Err(input_error(
                    "--max-solutions and --max-contact must be at least 1".to_string(),
                ));
            }
            let result = logmap_core::enumerate(&input, &limits)
                .map_err(|e| input_error(e.to_string()))?;
            write_report(&common.output, &jsonio::enumeration_value(&result))?;
            Ok(if result.complete { 0 } else { 1 })
        }
        Verb::Specialize { common, contract, vanish } => {
            let g = parse_valid_graph(&common.input)?;
            let spec =
                SpecializationSpec { contracted_edges: contract, vanishing_vertices: vanish };
            let m = associated_monoid(&g);
            let (g2, q) = specialize_with_monoid(&g, &m, &spec).map_err(|e| match e {
                SpecializeError::Internal(_) => internal_error(e.to_string()),
                _ => input_error(e.to_string()),
            })?;
            write_report(&common.output, &jsonio::specialization_value(&m, &g2, &q))?;
            Ok(0)
        }
        Verb::Minimal { common, target, assignment } => {
            let g = parse_valid_graph(&common.input)?;
            let target_text = read_input(&target)?;
            let target_monoid = jsonio::parse_target_monoid(&target_text)
                .map_err(|e| input_error(format!("target monoid: {}", e)))?;
            let assign_text = read_input(&assignment)?;
            let assign = jsonio::parse_assignment(&assign_text)
                .map_err(|e| input_error(format!("assignment: {}", e)))?;
            let verdict = minimality_check(&g, &target_monoid, &assign).map_err(|e| match e {
                MinimalityError::Internal(_) => internal_error(e.to_string()),
                _ => input_error(e.to_string()),
            })?;
            let mut o = Map::new();
            o.insert("minimal".to_string(), Value::Bool(verdict));
            write_report(&common.output, &Value::Object(o))?;
            Ok(if verdict { 0 } else { 1 })
        }
    }
}
