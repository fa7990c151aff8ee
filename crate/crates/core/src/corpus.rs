//! Golden corpus of reference mechanisms with their expected censuses.
//!
//! The `.mech` sources and `manifest.csv` live in the workspace `corpus/`
//! directory and are compiled into the library. [`load_default`] reads them
//! from the directory named by `ZEBRA_CORPUS_DIR` instead when it is set.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{analyze, analyze_counts, MobilityReport};
use crate::textfmt::{parse, Document};

/// Environment variable naming an on-disk corpus directory.
pub const CORPUS_DIR_ENV: &str = "ZEBRA_CORPUS_DIR";

macro_rules! embedded {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/", $name, ".mech")))),*]
    };
}

const MANIFEST: &str = include_str!(concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../../corpus/manifest.csv"
));

const SOURCES: &[(&str, &str)] = embedded!(
    "helical",
    "four_bar",
    "staircase",
    "six_bar",
    "five_bar",
    "four_bar_series",
    "crank_slider",
    "parallel_four_bar_case1",
    "parallel_four_bar_case2",
    "stewart",
    "cartesian",
    "orthoglide",
    "h4",
    "star",
    "delta",
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Topology,
    Counts,
}

/// Golden values of one entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Expected {
    pub black: u32,
    pub grey: u32,
    pub white: u32,
    pub white_between: u32,
    pub ground_joints: u32,
    pub loops: i64,
    pub mobility: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusEntry {
    pub name: String,
    pub mode: Mode,
    /// Contents of the entry's `.mech` file.
    pub source: String,
    pub expected: Expected,
}

#[derive(Debug, Deserialize)]
struct Row {
    name: String,
    mode: Mode,
    #[serde(rename = "B")]
    black: u32,
    #[serde(rename = "G")]
    grey: u32,
    #[serde(rename = "W")]
    white: u32,
    #[serde(rename = "Nw")]
    white_between: u32,
    #[serde(rename = "Jf")]
    ground_joints: u32,
    #[serde(rename = "L")]
    loops: i64,
    #[serde(rename = "M")]
    mobility: i64,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("bad manifest: {0}")]
    Manifest(#[from] csv::Error),
    #[error("no source for manifest entry `{0}`")]
    MissingSource(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn assemble(
    manifest: &str,
    mut source: impl FnMut(&str) -> Result<String, CorpusError>,
) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut reader = csv::Reader::from_reader(manifest.as_bytes());
    let mut out = Vec::new();
    for row in reader.deserialize() {
        let row: Row = row?;
        out.push(CorpusEntry {
            source: source(&row.name)?,
            name: row.name,
            mode: row.mode,
            expected: Expected {
                black: row.black,
                grey: row.grey,
                white: row.white,
                white_between: row.white_between,
                ground_joints: row.ground_joints,
                loops: row.loops,
                mobility: row.mobility,
            },
        });
    }
    Ok(out)
}

/// The embedded corpus in manifest order.
pub fn entries() -> Vec<CorpusEntry> {
    assemble(MANIFEST, |name| {
        SOURCES
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, s)| s.to_string())
            .ok_or_else(|| CorpusError::MissingSource(name.to_string()))
    })
    .expect("embedded corpus is well formed")
}

/// Reads `manifest.csv` and the `<name>.mech` files from `dir`.
pub fn load_dir(dir: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    let read = |path: &Path| {
        std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })
    };
    let manifest = read(&dir.join("manifest.csv"))?;
    assemble(&manifest, |name| read(&dir.join(format!("{name}.mech"))))
}

/// The corpus named by `ZEBRA_CORPUS_DIR`, or the embedded one.
pub fn load_default() -> Result<Vec<CorpusEntry>, CorpusError> {
    match std::env::var_os(CORPUS_DIR_ENV) {
        Some(dir) => load_dir(Path::new(&dir)),
        None => Ok(entries()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub field: &'static str,
    pub expected: i64,
    pub got: i64,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.field, self.expected, self.got)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryResult {
    pub name: String,
    pub mismatches: Vec<Mismatch>,
    /// Set when the source could not be parsed, validated or analyzed.
    pub error: Option<String>,
}

impl EntryResult {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.mismatches.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusReport {
    pub results: Vec<EntryResult>,
}

impl CorpusReport {
    pub fn passed(&self) -> usize {
        self.results.iter().filter(|r| r.passed()).count()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.results.len()
    }

    /// One line per entry followed by a summary line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.results {
            if r.passed() {
                out.push_str(&format!("PASS {}\n", r.name));
            } else if let Some(e) = &r.error {
                out.push_str(&format!("FAIL {}: {e}\n", r.name));
            } else {
                let list: Vec<String> = r.mismatches.iter().map(ToString::to_string).collect();
                out.push_str(&format!("FAIL {}: {}\n", r.name, list.join(" ")));
            }
        }
        out.push_str(&format!(
            "{}/{} entries pass\n",
            self.passed(),
            self.results.len()
        ));
        out
    }
}

/// Parses and analyzes an entry's source.
pub fn run_entry(e: &CorpusEntry) -> Result<MobilityReport, String> {
    let doc = parse(&e.source).map_err(|err| err.to_string())?;
    match (doc, e.mode) {
        (Document::Topology(m), Mode::Topology) => {
            let v = m.validate().map_err(|err| err.to_string())?;
            analyze(&v).map_err(|err| err.to_string())
        }
        (Document::Counts(r), Mode::Counts) => analyze_counts(&r).map_err(|err| err.to_string()),
        (_, mode) => Err(format!("source does not match manifest mode {mode:?}")),
    }
}

pub fn check_entry(e: &CorpusEntry) -> EntryResult {
    let report = match run_entry(e) {
        Ok(r) => r,
        Err(error) => {
            return EntryResult {
                name: e.name.clone(),
                mismatches: Vec::new(),
                error: Some(error),
            }
        }
    };
    let x = &e.expected;
    let c = &report.counts;
    let fields: [(&'static str, i64, i64); 7] = [
        ("B", x.black.into(), c.black.into()),
        ("G", x.grey.into(), c.grey.into()),
        ("W", x.white.into(), c.white.into()),
        ("Nw", x.white_between.into(), c.white_between.into()),
        ("Jf", x.ground_joints.into(), c.ground_joints.into()),
        ("L", x.loops, report.loops),
        ("M", x.mobility, report.mobility),
    ];
    EntryResult {
        name: e.name.clone(),
        mismatches: fields
            .into_iter()
            .filter(|(_, want, got)| want != got)
            .map(|(field, expected, got)| Mismatch {
                field,
                expected,
                got,
            })
            .collect(),
        error: None,
    }
}

pub fn check_entries(entries: &[CorpusEntry]) -> CorpusReport {
    CorpusReport {
        results: entries.iter().map(check_entry).collect(),
    }
}

/// Checks the embedded corpus.
pub fn check_all() -> CorpusReport {
    check_entries(&entries())
}
