//! Command-line driver: map documents, the analysis pipeline and reports.

pub mod error;
pub mod expr;
pub mod pipeline;
pub mod registry;
pub mod report;
pub mod spec;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::Serialize;
use sha2::{Digest, Sha256};

use error::CliError;
use report::Format;
use spec::{parse_map, MapSpec, ParsedMap};

#[derive(Debug, Parser)]
#[command(name = "qasdyn", version, about = "Degree dynamics of rational self-maps of projective space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    /// Map document (TOML).
    #[arg(long, value_name = "FILE", conflicts_with = "example", required_unless_present = "example")]
    pub map: Option<PathBuf>,
    /// Built-in example key.
    #[arg(long, value_name = "KEY")]
    pub example: Option<String>,
    #[arg(long, value_name = "N")]
    pub horizon: Option<usize>,
    #[arg(long, value_name = "R")]
    pub tolerance: Option<String>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write the report to DIR, named by the content hash of the map document.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full pipeline.
    Analyze {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Include wall-clock timings (makes reports run-dependent).
        #[arg(long)]
        timings: bool,
    },
    /// Iteration ledger only.
    Iterate {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fit and solve a recurrence for an integer sequence.
    Recurrence {
        #[arg(required = true, value_delimiter = ',', allow_negative_numbers = true)]
        terms: Vec<BigInt>,
        #[arg(long, value_name = "R")]
        tolerance: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// List the built-in examples, or print one as a map document.
    Examples {
        key: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

/// Applies command-line overrides, returning the effective document.
pub fn load_spec(args: &MapArgs) -> Result<MapSpec, CliError> {
    let mut spec = match (&args.map, &args.example) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            MapSpec::from_toml(&text)?
        }
        (None, Some(key)) => registry::load(key)?,
        (None, None) => return Err(CliError::Validation("one of --map or --example is required".into())),
    };
    if let Some(h) = args.horizon {
        spec.limits.horizon = h;
    }
    if let Some(t) = &args.tolerance {
        spec.tolerance = t.clone();
    }
    Ok(spec)
}

pub fn spec_hash(spec: &MapSpec) -> String {
    hex::encode(Sha256::digest(spec.to_toml().as_bytes()))
}

fn render<T: Serialize>(report: &T, format: Format, text: impl Fn(&T) -> String) -> String {
    match format {
        Format::Json => report::to_json(report),
        Format::Text => text(report),
    }
}

fn emit(out: &mut dyn Write, body: &str, output: &OutputArgs, stem: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match &output.out {
        None => out.write_all(body.as_bytes()).map_err(io),
        Some(dir) => {
            let ext = match output.format {
                Format::Json => "json",
                Format::Text => "txt",
            };
            let path = write_report(dir, &format!("{stem}.{ext}"), body)?;
            writeln!(out, "{}", path.display()).map_err(io)
        }
    }
}

fn write_report(dir: &Path, name: &str, body: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

fn parsed(args: &MapArgs) -> Result<(ParsedMap, String), CliError> {
    let spec = load_spec(args)?;
    let hash = spec_hash(&spec);
    Ok((parse_map(&spec)?, hash))
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match cli.command {
        Command::Analyze { map, output, timings } => {
            let (parsed, hash) = parsed(&map)?;
            let opts = pipeline::Options {
                timings,
                ..Default::default()
            };
            let analysis = pipeline::run_pipeline(&parsed, &opts, hash.clone());
            let body = render(&analysis.report, output.format, report::analysis_text);
            emit(out, &body, &output, &format!("{hash}-analyze"))?;
            Ok(analysis.exit_code())
        }
        Command::Iterate { map, output } => {
            let (parsed, hash) = parsed(&map)?;
            let rep = pipeline::iterate_only(&parsed, None, hash.clone());
            let code = if rep.budget.exhausted_before_verdict { 3 } else { 0 };
            let body = render(&rep, output.format, report::iterate_text);
            emit(out, &body, &output, &format!("{hash}-iterate"))?;
            Ok(code)
        }
        Command::Recurrence { terms, tolerance, output } => {
            let tol_text = tolerance.unwrap_or_else(|| spec::DEFAULT_TOLERANCE.to_string());
            let tol = expr::parse_rational(&tol_text)
                .filter(|t| t > &num_rational::BigRational::from_integer(0.into()))
                .ok_or_else(|| CliError::Validation(format!("tolerance '{tol_text}' is not a positive number")))?;
            let rep = pipeline::analyze_sequence(&terms, &tol, qasdyn_core::degdyn::DEFAULT_RATIO_N);
            let body = render(&rep, output.format, report::recurrence_text);
            let key: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
            let hash = hex::encode(Sha256::digest(format!("{}\n{tol_text}", key.join(",")).as_bytes()));
            emit(out, &body, &output, &format!("{hash}-recurrence"))?;
            Ok(0)
        }
        Command::Examples { key, format } => {
            match key {
                Some(k) => {
                    let e = registry::lookup(&k)?;
                    let body = match format {
                        Format::Text => e.document.to_string(),
                        Format::Json => report::to_json(&MapSpec::from_toml(e.document)?),
                    };
                    out.write_all(body.as_bytes()).map_err(io)?;
                }
                None => {
                    for e in registry::EXAMPLES {
                        writeln!(out, "{:<24} {}", e.key, e.summary).map_err(io)?;
                    }
                }
            }
            Ok(0)
        }
    }
}

/// Runs the command line `args` (including the program name), writing the
/// report to `out` and diagnostics to stderr. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 0 {
                let _ = write!(out, "{e}");
            } else {
                let _ = e.print();
            }
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
