use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use archspread::analysis::analyze;
use archspread::distance::DistanceWeights;
use archspread::indicators::{IndicatorOptions, MasMode, MaxDScale};
use archspread::io::report::projection_block;
use archspread::io::{bundle_to_json, parse_bundle, parse_bundle_unchecked, AnalysisBundle, ReportDocuments, ReportFormat};
use archspread::model::validate_solution_set;
use archspread::synth::synth_bundle;

#[derive(Parser)]
#[command(name = "archspread", version, about = "Spread indicators for sets of architecture design alternatives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute MS and MAS for every set of a bundle.
    Indicators {
        bundle: PathBuf,
        #[command(flatten)]
        scoring: ScoringArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Project all solutions of a bundle into the plane.
    Mds {
        bundle: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        w_pred: f64,
        /// Write a scatter chart of the projection.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Indicators, correlation and projection in one report.
    Compare {
        bundle: PathBuf,
        #[command(flatten)]
        scoring: ScoringArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a seeded synthetic bundle.
    Synth {
        #[arg(long)]
        sets: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a bundle and list every violated invariant.
    Validate { bundle: PathBuf },
}

#[derive(Args)]
struct ScoringArgs {
    /// Weight of the transformation-name channel; arguments get 1 - w_pred.
    #[arg(long, default_value_t = 0.5)]
    w_pred: f64,
    /// Normalize MAS by the largest padded length over all sets (default).
    #[arg(long, conflicts_with = "per_set_maxd")]
    shared_maxd: bool,
    /// Normalize MAS by each set's own padded length.
    #[arg(long)]
    per_set_maxd: bool,
    /// Explicit normalization for one set, as LABEL=VALUE. Repeatable.
    #[arg(long = "max-d", value_parser = parse_max_d)]
    max_d: Vec<(String, f64)>,
    /// Use the largest pairwise distance for every solution instead of its eccentricity.
    #[arg(long)]
    mas_allpairs: bool,
    /// Min-max normalize objectives across sets before computing MS.
    #[arg(long)]
    normalize_objectives: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
        }
    }
}

fn parse_max_d(s: &str) -> Result<(String, f64), String> {
    let (label, value) = s.rsplit_once('=').ok_or("expected LABEL=VALUE")?;
    let value: f64 = value.parse().map_err(|e| format!("bad value {value:?}: {e}"))?;
    if !(value >= 0.0 && value.is_finite()) {
        return Err(format!("max-d must be a non-negative number, got {value}"));
    }
    Ok((label.to_string(), value))
}

enum Failure {
    Data(String),
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Data(e.to_string())
    }
}

impl ScoringArgs {
    fn resolve(&self) -> Result<(DistanceWeights, IndicatorOptions), Failure> {
        let w = DistanceWeights::from_pred(self.w_pred).map_err(|e| Failure::Usage(e.to_string()))?;
        let options = IndicatorOptions {
            scale: if self.per_set_maxd { MaxDScale::PerSet } else { MaxDScale::Shared },
            mode: if self.mas_allpairs { MasMode::AllPairs } else { MasMode::Eccentricity },
            max_d_overrides: self.max_d.iter().cloned().collect(),
            normalize_objectives: self.normalize_objectives,
        };
        Ok((w, options))
    }
}

fn load(path: &Path) -> Result<AnalysisBundle, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    let parsed = parse_bundle(&text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    for w in &parsed.warnings {
        eprintln!("warning: {w}");
    }
    Ok(parsed.bundle)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Data(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

// CSV points go next to the summary as `<stem>.points.csv`.
fn write_documents(path: Option<&Path>, docs: &ReportDocuments) -> Result<(), Failure> {
    match (path, &docs.points) {
        (Some(p), Some(points)) => {
            write_out(Some(p), &docs.main)?;
            let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            write_out(Some(&p.with_file_name(format!("{stem}.points.csv"))), points)
        }
        (None, Some(points)) => write_out(None, &format!("{}\n{}", docs.main, points)),
        (_, None) => write_out(path, &docs.main),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Indicators { bundle, scoring, format, output } => {
            let (w, options) = scoring.resolve()?;
            let analysis = analyze(&load(&bundle)?, w, &options, false)?;
            write_documents(output.as_deref(), &analysis.render(format.into()))
        }
        Command::Compare { bundle, scoring, format, svg, output } => {
            let (w, options) = scoring.resolve()?;
            let analysis = analyze(&load(&bundle)?, w, &options, true)?;
            if let (Some(path), Some(chart)) = (svg, analysis.svg()) {
                write_out(Some(&path), &chart)?;
            }
            write_documents(output.as_deref(), &analysis.render(format.into()))
        }
        Command::Mds { bundle, w_pred, svg, output } => {
            let w = DistanceWeights::from_pred(w_pred).map_err(|e| Failure::Usage(e.to_string()))?;
            let analysis = analyze(&load(&bundle)?, w, &IndicatorOptions::default(), true)?;
            let projection = analysis.projection.as_ref().expect("projection requested");
            if let (Some(path), Some(chart)) = (svg, analysis.svg()) {
                write_out(Some(&path), &chart)?;
            }
            let mut json = serde_json::to_string_pretty(&projection_block(projection))?;
            json.push('\n');
            write_out(output.as_deref(), &json)
        }
        Command::Synth { sets, n, seed, output } => {
            if sets == 0 || n == 0 {
                return Err(Failure::Usage("--sets and --n must be at least 1".into()));
            }
            write_out(output.as_deref(), &bundle_to_json(&synth_bundle(seed, sets, n)?))
        }
        Command::Validate { bundle } => {
            let text = fs::read_to_string(&bundle).map_err(|e| Failure::Data(format!("{}: {e}", bundle.display())))?;
            let parsed = parse_bundle_unchecked(&text)?;
            for w in &parsed.warnings {
                eprintln!("warning: {w}");
            }
            let mut problems = 0;
            for set in &parsed.bundle.sets {
                for v in validate_solution_set(set) {
                    println!("set {:?}: {v}", set.label);
                    problems += 1;
                }
            }
            if problems > 0 {
                return Err(Failure::Data(format!("{problems} violation(s)")));
            }
            let total: usize = parsed.bundle.sets.iter().map(|s| s.len()).sum();
            println!("ok: {} set(s), {total} solution(s)", parsed.bundle.sets.len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
