//! Batch CLI: validate input documents, compute invariant reports, list
//! Reidemeister class transversals, run the geometric oracle, or emit a
//! built-in fixture.
//!
//! Exit codes: 0 success, 1 validation failure, 2 cross-check mismatch,
//! 3 parse error.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nvcoin::error::Error;
use nvcoin::io::{self, Document};
use nvcoin::{fixtures, invariants, oracle};

#[derive(Parser)]
#[command(name = "nvcoin", about = "exact coincidence invariants of n-valued maps on flat manifolds", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// Path of a JSON input document.
    #[arg(long, conflicts_with = "fixture")]
    input: Option<std::path::PathBuf>,
    /// Name of a built-in fixture (see `example --list`).
    #[arg(long)]
    fixture: Option<String>,
    /// Output format.
    #[arg(long, value_parser = ["table", "json"], default_value = "table")]
    format: String,
    /// Output path; stdout when omitted.
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a group, an algebraic pair or an affine pair.
    Validate(InputArgs),
    /// Compute the invariant report L, R, N with averaging diagnostics.
    Compute(InputArgs),
    /// List Reidemeister class transversals (torus targets).
    Classes(InputArgs),
    /// Enumerate coincidence points and cross-check the invariants.
    Oracle(InputArgs),
    /// Write a built-in fixture document.
    Example {
        /// Fixture name.
        #[arg(long)]
        fixture: Option<String>,
        /// List available fixtures.
        #[arg(long)]
        list: bool,
        /// Output path; stdout when omitted.
        #[arg(long)]
        output: Option<std::path::PathBuf>,
    },
}

fn load_document(args: &InputArgs) -> Result<Document, Error> {
    if let Some(path) = &args.input {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        return Document::parse(&text);
    }
    if let Some(name) = &args.fixture {
        return fixtures::get(name)
            .ok_or_else(|| Error::Parse(format!("unknown fixture {name:?}")));
    }
    Err(Error::Parse(
        "either --input or --fixture is required".to_string(),
    ))
}

fn emit(output: &Option<std::path::PathBuf>, text: &str) -> Result<(), Error> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Parse(e.to_string())),
    }
}

/// Builds the morphism pair from either document kind.
fn pair_from_document(
    doc: &Document,
) -> Result<(nvcoin::nvmorph::NvMorphism, nvcoin::crystal::SingleMorphism), Error> {
    match doc {
        Document::AffinePair(w) => {
            let (f, g) = io::affine_pair_from_wire(w)?;
            oracle::derive_morphism(&f, &g)
        }
        Document::AlgebraicPair(w) => {
            let source = io::group_from_wire(&w.source)?;
            let target = io::group_from_wire(&w.target)?;
            let phi = io::nv_morphism_from_wire(&w.phi, &source, &target)?;
            let psi = io::single_morphism_from_wire(&w.psi, &source, &target)?;
            Ok((phi, psi))
        }
        Document::Group(_) => Err(Error::InvalidInput(
            "this command needs a pair document, not a bare group".to_string(),
        )),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Validate(args) => {
            let doc = load_document(&args)?;
            let reports = io::validate_document(&doc)?;
            let text = if args.format == "json" {
                format!(
                    "{}\n",
                    serde_json::to_string_pretty(&reports).expect("serializable")
                )
            } else {
                io::validations_to_table(&reports)
            };
            emit(&args.output, &text)?;
            if reports.iter().any(|r| !r.valid) {
                return Err(Error::InvalidInput("validation failed".to_string()));
            }
            Ok(())
        }
        Command::Compute(args) => {
            let doc = load_document(&args)?;
            let (phi, psi) = pair_from_document(&doc)?;
            let report = invariants::compute_report(&phi, &psi)?;
            let text = if args.format == "json" {
                format!("{}\n", io::report_to_json(&report)?)
            } else {
                io::report_to_table(&report)?
            };
            emit(&args.output, &text)
        }
        Command::Classes(args) => {
            let doc = load_document(&args)?;
            let (phi, psi) = pair_from_document(&doc)?;
            let report = invariants::compute_report(&phi, &psi)?;
            let Some(classes) = &report.classes else {
                return Err(Error::TargetHasHolonomy);
            };
            let text = if args.format == "json" {
                let value = io::report_to_value(&report)?;
                format!(
                    "{}\n",
                    serde_json::to_string_pretty(&value["classes"]).expect("serializable")
                )
            } else {
                let mut s = String::new();
                for o in classes {
                    let orbit: Vec<String> = o.orbit.iter().map(|i| (i + 1).to_string()).collect();
                    s.push_str(&format!(
                        "orbit {{{}}} (rep {}): {} classes\n",
                        orbit.join(","),
                        o.orbit_rep + 1,
                        o.count
                    ));
                    for rep in &o.representatives {
                        let coords: Vec<String> = rep.iter().map(|x| x.to_string()).collect();
                        s.push_str(&format!("  ({}, ({}))\n", o.orbit_rep + 1, coords.join(",")));
                    }
                }
                s
            };
            emit(&args.output, &text)
        }
        Command::Oracle(args) => {
            let doc = load_document(&args)?;
            let Document::AffinePair(w) = &doc else {
                return Err(Error::InvalidInput(
                    "the oracle needs an affine pair document".to_string(),
                ));
            };
            let (f, g) = io::affine_pair_from_wire(w)?;
            let set = oracle::enumerate_coincidences(&f, &g)?;
            let report = oracle::oracle_report(&f, &g)?;
            let text = if args.format == "json" {
                format!(
                    "{}\n",
                    serde_json::to_string_pretty(&io::oracle_to_value(&report, &set)?)
                        .expect("serializable")
                )
            } else {
                io::oracle_to_table(&report, &set)?
            };
            emit(&args.output, &text)
        }
        Command::Example {
            fixture,
            list,
            output,
        } => {
            if list {
                let mut s = String::new();
                for (name, desc) in fixtures::registry() {
                    s.push_str(&format!("{name:<28} {desc}\n"));
                }
                return emit(&output, &s);
            }
            let name = fixture.ok_or_else(|| {
                Error::Parse("example needs --fixture NAME or --list".to_string())
            })?;
            let doc = fixtures::get(&name)
                .ok_or_else(|| Error::Parse(format!("unknown fixture {name:?}")))?;
            emit(&output, &format!("{}\n", doc.to_json()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::MismatchDetected(_) => ExitCode::from(2),
                Error::Parse(_) => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}
