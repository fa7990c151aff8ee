//! `zebra`: mobility analysis, diagrams and cross-checks from the command line.
//!
//! Exit status is 0 on success, 1 for data, validation or I/O errors and 2
//! for usage errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;
use zebra_core::analysis::{analyze, analyze_counts, compare, AnalysisError, MobilityReport};
use zebra_core::corpus::{check_entries, load_default, CorpusError};
use zebra_core::diagram::{
    build_diagram, output_file_name, render_svg, render_text, DiagramFormat,
};
use zebra_core::textfmt::{parse, Document, ParseErrors};
use zebra_core::xvalidate::{cross_validate, EnumerationSpec, XvalError, MAX_LINKS, MAX_LOOPS};
use zebra_core::{Mechanism, ValidationErrors};

#[derive(Debug, Parser)]
#[command(
    name = "zebra",
    version,
    about = "Zebra-crossing mobility analysis of mechanisms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the patch census, loop count and mobility of a `.mech` file.
    Analyze {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Plain)]
        format: ReportFormat,
    },
    /// Draw the zebra-crossing diagram of a topology file.
    Render {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = RenderFormat::Text)]
        format: RenderFormat,
        /// Output file, `-` for standard output. Defaults to
        /// `<mechanism>.zebra.txt` or `<mechanism>.zebra.svg`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the zebra mobility with the Kutzbach-Grübler formula.
    Compare {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Plain)]
        format: ReportFormat,
    },
    /// Check the golden corpus; `ZEBRA_CORPUS_DIR` selects an on-disk copy.
    CorpusCheck,
    /// Enumerate small planar chains and compare both mobility formulas.
    Enumerate {
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u8).range(2..=MAX_LINKS as i64))]
        max_links: u8,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=MAX_LINKS as i64))]
        min_links: u8,
        #[arg(long, default_value_t = MAX_LOOPS as u8, value_parser = clap::value_parser!(u8).range(1..=MAX_LOOPS as i64))]
        max_loops: u8,
        /// Allow several joints between one pair of links.
        #[arg(long)]
        multi_joints: bool,
        /// Allow the ground link to carry a single joint.
        #[arg(long)]
        hanging_ground: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Plain,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RenderFormat {
    Text,
    Svg,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{}", prefix_lines(.path, .errors))]
    Parse { path: String, errors: ParseErrors },
    #[error("{path}: invalid mechanism: {errors}")]
    Validation {
        path: String,
        errors: ValidationErrors,
    },
    #[error("{path}: {source}")]
    Analysis {
        path: String,
        #[source]
        source: AnalysisError,
    },
    #[error("CountsModeNotRenderable: {0} holds a patch census, not a topology")]
    CountsModeNotRenderable(String),
    #[error("{0} holds a patch census; comparison needs a topology")]
    CountsModeNotComparable(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Xval(#[from] XvalError),
    #[error("{failed} of {total} corpus entries failed")]
    CorpusFailed { failed: usize, total: usize },
}

fn prefix_lines(path: &str, errors: &ParseErrors) -> String {
    errors
        .0
        .iter()
        .map(|e| format!("{path}:{e}"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn load(path: &Path) -> Result<Document, CliError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: shown.clone(),
        source,
    })?;
    parse(&text).map_err(|errors| CliError::Parse {
        path: shown,
        errors,
    })
}

fn validated(path: &Path, m: Mechanism) -> Result<zebra_core::ValidatedMechanism, CliError> {
    m.validate().map_err(|errors| CliError::Validation {
        path: path.display().to_string(),
        errors,
    })
}

fn plain_report(r: &MobilityReport) -> String {
    let c = &r.counts;
    let ns = c.patches_between.map(|v| v.to_string()).unwrap_or_default();
    format!(
        "name={}\nclass={}\nB={}\nG={}\nW={}\nNw={}\nNs={}\nJf={}\nL={}\nbranch={}\nM={}\n",
        r.name,
        r.class,
        c.black,
        c.grey,
        c.white,
        c.white_between,
        ns,
        c.ground_joints,
        r.loops,
        r.branch,
        r.mobility
    )
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn run(command: Command) -> Result<String, CliError> {
    match command {
        Command::Analyze { path, format } => {
            let analysis_err = |source| CliError::Analysis {
                path: path.display().to_string(),
                source,
            };
            let report = match load(&path)? {
                Document::Topology(m) => analyze(&validated(&path, m)?).map_err(analysis_err)?,
                Document::Counts(r) => analyze_counts(&r).map_err(analysis_err)?,
            };
            Ok(match format {
                ReportFormat::Plain => plain_report(&report),
                ReportFormat::Json => json(&report),
            })
        }
        Command::Render { path, format, out } => {
            let Document::Topology(m) = load(&path)? else {
                return Err(CliError::CountsModeNotRenderable(
                    path.display().to_string(),
                ));
            };
            let v = validated(&path, m)?;
            let diagram = build_diagram(&v);
            let (body, kind) = match format {
                RenderFormat::Text => (render_text(&diagram), DiagramFormat::Text),
                RenderFormat::Svg => (render_svg(&diagram), DiagramFormat::Svg),
            };
            let target = out.unwrap_or_else(|| PathBuf::from(output_file_name(v.name(), kind)));
            if target.as_os_str() == "-" {
                return Ok(body);
            }
            std::fs::write(&target, body).map_err(|source| CliError::Io {
                path: target.display().to_string(),
                source,
            })?;
            Ok(format!("wrote {}\n", target.display()))
        }
        Command::Compare { path, format } => {
            let Document::Topology(m) = load(&path)? else {
                return Err(CliError::CountsModeNotComparable(
                    path.display().to_string(),
                ));
            };
            let cmp = compare(&validated(&path, m)?).map_err(|source| CliError::Analysis {
                path: path.display().to_string(),
                source,
            })?;
            Ok(match format {
                ReportFormat::Json => json(&cmp),
                ReportFormat::Plain => format!(
                    "name={}\nzebra_M={}\nkutzbach_planar={}\nkutzbach_spatial={}\nreference={}\nagree={}\n",
                    cmp.name,
                    cmp.zebra,
                    cmp.kutzbach.planar,
                    cmp.kutzbach.spatial,
                    cmp.reference.as_str(),
                    cmp.agree
                ),
            })
        }
        Command::CorpusCheck => {
            let report = check_entries(&load_default()?);
            let text = report.render();
            if report.all_passed() {
                Ok(text)
            } else {
                print!("{text}");
                Err(CliError::CorpusFailed {
                    failed: report.results.len() - report.passed(),
                    total: report.results.len(),
                })
            }
        }
        Command::Enumerate {
            max_links,
            min_links,
            max_loops,
            multi_joints,
            hanging_ground,
        } => {
            let spec = EnumerationSpec {
                min_links: min_links.into(),
                max_links: max_links.into(),
                max_loops: max_loops.into(),
                multi_joints,
                hanging_ground,
            };
            let report = cross_validate(&spec)?;
            eprintln!("{}", report.summary);
            Ok(report.to_csv())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
