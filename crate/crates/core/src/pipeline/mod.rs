//! Per-source curation and cross-source merging.
//!
//! A source file goes through three stages. Each stage drops the records it
//! cannot handle and then drops keys it has already seen in that source, so
//! every removal is charged to exactly one stage:
//!
//! - preprocessing: row splitting, SMILES parsing, repeated source IDs,
//!   duplicates of the parsed structure
//! - standardization: standardization failures, structures that converge on
//!   a key seen earlier
//! - filtering: the feasibility bounds
//!
//! Per-record work runs in parallel over chunks; dedup and bookkeeping are a
//! sequential pass in input order, so results do not depend on scheduling.

pub mod io;
pub mod keyset;
mod merge;
pub mod synth;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::descriptors::compute_descriptors;
use crate::filters::feasibility_check;
use crate::molgraph::{canonicalize, parse_smiles, CanonicalKey};
use crate::standardizer::standardize;

pub use io::{read_rows, write_records, BlockIndex, MalformedRow, RawRow, RecordReader, Row};
pub use keyset::{ShardedKeyMap, ShardedKeySet};
pub use merge::{merge_files, merge_rows, GainRow, GainTable, MergeOutput};

/// Rows handed to the workers at a time.
pub const CHUNK_ROWS: usize = 8192;

/// Reported with every ledger: the dedup key and the length bound use the
/// internal canonical key in place of an InChI string.
pub const KEY_NOTE: &str = "dedup key and key_length bound use the canonical SMILES key (stand-in for InChI)";

pub const LEDGER_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: expected header `source<TAB>source_id<TAB>smiles`, found {found:?}")]
    MalformedHeader { path: PathBuf, found: String },
    #[error("{0}: malformed block index")]
    MalformedIndex(PathBuf),
    #[error("field {0:?} is empty or contains a tab or newline")]
    InvalidField(String),
    #[error("source {origin:?} id {source_id:?} appears with two different structures")]
    DuplicateId { origin: String, source_id: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    ParseFailed,
    StandardizeFailed,
    Filtered,
    Duplicate,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::ParseFailed => "parse_failed",
            Status::StandardizeFailed => "standardize_failed",
            Status::Filtered => "filtered",
            Status::Duplicate => "duplicate",
        }
    }

    /// Whether the record was removed because processing failed, as opposed
    /// to being filtered or deduplicated.
    pub fn is_failure(self) -> bool {
        matches!(self, Status::ParseFailed | Status::StandardizeFailed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Preprocessing,
    Standardization,
    Filtering,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Preprocessing => "preprocessing",
            Stage::Standardization => "standardization",
            Stage::Filtering => "filtering",
        }
    }
}

/// The unit flowing through the pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoleculeRecord {
    pub source: String,
    pub source_id: String,
    /// Canonical SMILES for kept records; the input text otherwise.
    pub smiles: String,
    pub key: Option<CanonicalKey>,
    pub status: Status,
}

/// A removed record with the stage that removed it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuarantineEntry {
    pub source: String,
    pub source_id: String,
    pub smiles: String,
    /// Input line number, 0 when unknown.
    pub line: u64,
    pub stage: Stage,
    pub status: Status,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounts {
    pub preprocessing: u64,
    pub standardization: u64,
    pub filtering: u64,
}

impl StageCounts {
    fn bump(&mut self, stage: Stage) {
        match stage {
            Stage::Preprocessing => self.preprocessing += 1,
            Stage::Standardization => self.standardization += 1,
            Stage::Filtering => self.filtering += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.preprocessing + self.standardization + self.filtering
    }
}

/// Per-source counts: removals per stage, and the duplicate share of them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerRow {
    pub source: String,
    pub initial: u64,
    pub removed: StageCounts,
    pub duplicates: StageCounts,
    #[serde(rename = "final")]
    pub final_count: u64,
}

impl LedgerRow {
    fn new(source: &str) -> LedgerRow {
        LedgerRow {
            source: source.to_string(),
            initial: 0,
            removed: StageCounts::default(),
            duplicates: StageCounts::default(),
            final_count: 0,
        }
    }

    /// initial = removed + final
    pub fn balanced(&self) -> bool {
        self.initial == self.removed.total() + self.final_count
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageLedger {
    pub schema_version: u32,
    pub note: String,
    pub sources: Vec<LedgerRow>,
}

impl StageLedger {
    pub fn balanced(&self) -> bool {
        self.sources.iter().all(LedgerRow::balanced)
    }

    pub fn row(&self, source: &str) -> Option<&LedgerRow> {
        self.sources.iter().find(|r| r.source == source)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Last stage to apply; `Preprocessing` is plain ingestion.
    pub until: Stage,
    pub chunk_rows: usize,
}

impl Default for RunOptions {
    fn default() -> RunOptions {
        RunOptions { until: Stage::Filtering, chunk_rows: CHUNK_ROWS }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub kept: Vec<MoleculeRecord>,
    pub ledger: StageLedger,
    pub quarantine: Vec<QuarantineEntry>,
}

impl RunOutput {
    /// Records lost to processing failures (not filtering or dedup).
    pub fn failures(&self) -> usize {
        self.quarantine.iter().filter(|q| q.status.is_failure()).count()
    }
}

/// What the parallel phase learned about one row.
enum Outcome {
    Malformed(MalformedRow),
    ParseFailed(RawRow, String),
    Parsed {
        row: RawRow,
        parsed_key: String,
        /// Standardized canonical SMILES or the failure; `None` when the run
        /// stops after preprocessing.
        standardized: Option<Result<String, String>>,
        /// Feasibility violations, formatted; `None` when not checked.
        violations: Option<Vec<String>>,
    },
}

fn examine(row: Row, until: Stage) -> Outcome {
    let row = match row {
        Ok(r) => r,
        Err(m) => return Outcome::Malformed(m),
    };
    let mol = match parse_smiles(&row.smiles) {
        Ok(m) => m,
        Err(e) => {
            let reason = e.to_string();
            return Outcome::ParseFailed(row, reason);
        }
    };
    let (_, parsed_key) = canonicalize(&mol);
    if until == Stage::Preprocessing {
        return Outcome::Parsed { row, parsed_key, standardized: None, violations: None };
    }
    let std = match standardize(&mol) {
        Ok(m) => m,
        Err(e) => {
            return Outcome::Parsed { row, parsed_key, standardized: Some(Err(e.to_string())), violations: None }
        }
    };
    let (key, smiles) = canonicalize(&std);
    let violations = (until == Stage::Filtering).then(|| {
        feasibility_check(&compute_descriptors(&std), key.len())
            .violations
            .iter()
            .map(|v| format!("{} {} (bound {})", v.rule, v.observed, v.bound))
            .collect()
    });
    Outcome::Parsed { row, parsed_key, standardized: Some(Ok(smiles)), violations }
}

struct SourceState {
    row: LedgerRow,
    ids: ShardedKeySet,
    parsed: ShardedKeySet,
    standardized: ShardedKeySet,
}

struct Committer {
    until: Stage,
    order: Vec<String>,
    states: std::collections::HashMap<String, SourceState>,
    kept: Vec<MoleculeRecord>,
    quarantine: Vec<QuarantineEntry>,
}

impl Committer {
    fn state(&mut self, source: &str) -> &mut SourceState {
        if !self.states.contains_key(source) {
            self.order.push(source.to_string());
            self.states.insert(
                source.to_string(),
                SourceState {
                    row: LedgerRow::new(source),
                    ids: ShardedKeySet::new(4),
                    parsed: ShardedKeySet::new(6),
                    standardized: ShardedKeySet::new(6),
                },
            );
        }
        self.states.get_mut(source).expect("state")
    }

    fn remove(&mut self, row: &RawRow, stage: Stage, status: Status, reason: String) {
        let st = self.state(&row.source);
        st.row.removed.bump(stage);
        if status == Status::Duplicate {
            st.row.duplicates.bump(stage);
        }
        self.quarantine.push(QuarantineEntry {
            source: row.source.clone(),
            source_id: row.source_id.clone(),
            smiles: row.smiles.clone(),
            line: row.line,
            stage,
            status,
            reason,
        });
    }

    fn commit(&mut self, outcome: Outcome) {
        let (row, parsed_key, standardized, violations) = match outcome {
            Outcome::Malformed(m) => {
                let source = m.text.split('\t').next().filter(|s| !s.is_empty()).unwrap_or("unknown");
                let row = RawRow { line: m.line, source: source.to_string(), source_id: String::new(), smiles: m.text };
                self.state(&row.source).row.initial += 1;
                self.remove(&row, Stage::Preprocessing, Status::ParseFailed, "malformed row".into());
                return;
            }
            Outcome::ParseFailed(row, reason) => {
                self.state(&row.source).row.initial += 1;
                self.state(&row.source).ids.insert(&row.source_id);
                self.remove(&row, Stage::Preprocessing, Status::ParseFailed, reason);
                return;
            }
            Outcome::Parsed { row, parsed_key, standardized, violations } => (row, parsed_key, standardized, violations),
        };
        let st = self.state(&row.source);
        st.row.initial += 1;
        if !st.ids.insert(&row.source_id) {
            self.remove(&row, Stage::Preprocessing, Status::Duplicate, "repeated source_id".into());
            return;
        }
        if !st.parsed.insert(&parsed_key) {
            self.remove(&row, Stage::Preprocessing, Status::Duplicate, "duplicate structure".into());
            return;
        }
        let smiles = match standardized {
            None => parsed_key,
            Some(Err(reason)) => {
                self.remove(&row, Stage::Standardization, Status::StandardizeFailed, reason);
                return;
            }
            Some(Ok(smiles)) => {
                if !self.state(&row.source).standardized.insert(&smiles) {
                    self.remove(&row, Stage::Standardization, Status::Duplicate, "duplicate structure".into());
                    return;
                }
                smiles
            }
        };
        if let Some(v) = violations.filter(|v| !v.is_empty()) {
            self.remove(&row, Stage::Filtering, Status::Filtered, v.join("; "));
            return;
        }
        self.state(&row.source).row.final_count += 1;
        self.kept.push(MoleculeRecord {
            key: Some(CanonicalKey::from_canonical_string(smiles.clone())),
            source: row.source,
            source_id: row.source_id,
            smiles,
            status: Status::Ok,
        });
    }

    fn finish(mut self) -> RunOutput {
        let sources = self.order.iter().map(|s| self.states.remove(s).expect("state").row).collect();
        let ledger = StageLedger { schema_version: LEDGER_SCHEMA_VERSION, note: KEY_NOTE.to_string(), sources };
        debug_assert!(ledger.balanced());
        let _ = self.until;
        RunOutput { kept: self.kept, ledger, quarantine: self.quarantine }
    }
}

/// Run the stages over chunks of rows.
pub fn run_chunks<I>(chunks: I, opts: RunOptions) -> Result<RunOutput, PipelineError>
where
    I: IntoIterator<Item = Result<Vec<Row>, PipelineError>>,
{
    let mut c = Committer {
        until: opts.until,
        order: Vec::new(),
        states: Default::default(),
        kept: Vec::new(),
        quarantine: Vec::new(),
    };
    for chunk in chunks {
        let outcomes: Vec<Outcome> = chunk?.into_par_iter().map(|r| examine(r, opts.until)).collect();
        for o in outcomes {
            c.commit(o);
        }
    }
    let out = c.finish();
    assert!(out.ledger.balanced(), "stage ledger does not balance");
    Ok(out)
}

/// Run the stages over in-memory rows.
pub fn run_rows(rows: Vec<Row>, opts: RunOptions) -> RunOutput {
    let chunk = opts.chunk_rows.max(1);
    let mut rows = rows.into_iter().peekable();
    let chunks = std::iter::from_fn(move || {
        rows.peek()?;
        Some(Ok(rows.by_ref().take(chunk).collect()))
    });
    run_chunks(chunks, opts).expect("in-memory rows cannot fail to read")
}

fn file_chunks(path: &Path, chunk: usize) -> Result<impl Iterator<Item = Result<Vec<Row>, PipelineError>>, PipelineError> {
    let mut reader = RecordReader::open(path)?;
    let mut done = false;
    Ok(std::iter::from_fn(move || {
        if done {
            return None;
        }
        match reader.next_chunk(chunk.max(1)) {
            Ok(v) if v.is_empty() => None,
            Ok(v) => Some(Ok(v)),
            Err(e) => {
                done = true;
                Some(Err(e))
            }
        }
    }))
}

/// Parse and deduplicate one record file (preprocessing only). Kept records
/// carry the canonical SMILES of the parsed, unstandardized structure.
pub fn ingest(path: &Path) -> Result<RunOutput, PipelineError> {
    let opts = RunOptions { until: Stage::Preprocessing, ..RunOptions::default() };
    run_chunks(file_chunks(path, opts.chunk_rows)?, opts)
}

/// Full per-source pipeline over one record file.
pub fn run_source(path: &Path, opts: RunOptions) -> Result<RunOutput, PipelineError> {
    run_chunks(file_chunks(path, opts.chunk_rows)?, opts)
}

pub const QUARANTINE_HEADER: [&str; 7] = ["source", "source_id", "smiles", "line", "stage", "status", "reason"];

fn clean(field: &str) -> String {
    field.replace(['\t', '\n', '\r'], " ")
}

/// Write quarantined records as TSV.
pub fn write_quarantine(path: &Path, entries: &[QuarantineEntry]) -> Result<(), PipelineError> {
    use std::io::Write;
    let err = |e| PipelineError::Io { path: path.to_path_buf(), source: e };
    let mut out = io::create_text(path)?;
    writeln!(out, "{}", QUARANTINE_HEADER.join("\t")).map_err(err)?;
    for q in entries {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            clean(&q.source),
            clean(&q.source_id),
            clean(&q.smiles),
            q.line,
            q.stage.as_str(),
            q.status.as_str(),
            clean(&q.reason)
        )
        .map_err(err)?;
    }
    out.flush().map_err(err)
}

/// Write any serializable report as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| PipelineError::Io { path: path.to_path_buf(), source: e })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(items: &[(&str, &str, &str)]) -> Vec<Row> {
        items
            .iter()
            .enumerate()
            .map(|(i, (s, id, smi))| {
                Ok(RawRow { line: i as u64 + 2, source: s.to_string(), source_id: id.to_string(), smiles: smi.to_string() })
            })
            .collect()
    }

    fn run(items: &[(&str, &str, &str)]) -> RunOutput {
        run_rows(rows(items), RunOptions { chunk_rows: 3, ..RunOptions::default() })
    }

    #[test]
    fn one_failure_per_stage() {
        let out = run(&[
            ("a", "1", "CCO"),
            ("a", "2", "C1CC"),
            ("a", "3", "c1cccc1"),
            ("a", "4", "CC.CC.CC.CC"),
            ("a", "5", "c1ccccc1"),
            ("a", "6", "CC(=O)O"),
            ("a", "7", "CCN"),
            ("a", "8", "CCCl"),
            ("a", "9", "OC1CCCCC1"),
            ("a", "10", "c1ccncc1"),
        ]);
        let row = out.ledger.row("a").unwrap();
        assert_eq!((row.initial, row.final_count), (10, 7));
        assert_eq!(row.removed, StageCounts { preprocessing: 1, standardization: 1, filtering: 1 });
        assert_eq!(out.failures(), 2);
        assert_eq!(out.quarantine.len(), 3);
        assert_eq!(out.quarantine[1].status, Status::StandardizeFailed);
        assert!(out.quarantine[2].reason.starts_with("fragments 4"));
    }

    #[test]
    fn dedup_is_charged_to_the_colliding_stage() {
        let out = run(&[
            ("a", "1", "CCO"),
            ("a", "2", "OCC"),
            ("a", "3", "C1=CC=CC=C1"),
            ("a", "4", "c1ccccc1"),
            ("a", "5", "c1ccccc1"),
            ("a", "1", "CCCC"),
        ]);
        let row = out.ledger.row("a").unwrap();
        assert_eq!(row.removed, StageCounts { preprocessing: 3, standardization: 1, filtering: 0 });
        assert_eq!(row.duplicates, row.removed);
        assert_eq!(out.kept.iter().map(|r| r.source_id.as_str()).collect::<Vec<_>>(), vec!["1", "3"]);
    }

    #[test]
    fn sources_are_counted_separately() {
        let out = run(&[("a", "1", "CCO"), ("b", "1", "CCO"), ("b", "2", "xyz")]);
        assert_eq!(out.ledger.sources.len(), 2);
        assert_eq!(out.ledger.row("a").unwrap().final_count, 1);
        assert_eq!(out.ledger.row("b").unwrap().final_count, 1);
        assert_eq!(out.ledger.row("b").unwrap().removed.preprocessing, 1);
    }

    #[test]
    fn ingest_stops_after_preprocessing() {
        let out = run_rows(
            rows(&[("a", "1", "CCO"), ("a", "2", "c1cccc1"), ("a", "3", "OCC")]),
            RunOptions { until: Stage::Preprocessing, ..RunOptions::default() },
        );
        // an unkekulizable ring still parses, so ingestion keeps it
        assert_eq!(out.kept.len(), 2);
        assert_eq!(out.ledger.row("a").unwrap().removed.preprocessing, 1);
    }

    #[test]
    fn malformed_rows_are_quarantined() {
        let mut r = rows(&[("a", "1", "CCO")]);
        r.push(Err(MalformedRow { line: 3, text: "a".into() }));
        let out = run_rows(r, RunOptions::default());
        assert_eq!(out.ledger.row("a").unwrap().removed.preprocessing, 1);
        assert_eq!(out.quarantine[0].reason, "malformed row");
    }

    #[test]
    fn file_round_trip_and_empty_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("in.tsv");
        std::fs::write(&path, "source\tsource_id\tsmiles\n").unwrap();
        let out = run_source(&path, RunOptions::default()).unwrap();
        assert!(out.kept.is_empty() && out.ledger.sources.is_empty());
        std::fs::write(&path, "source\tsource_id\tsmiles\ns\t1\tCCO\ns\t2\tC(\ns\t3\tCN\n").unwrap();
        let out = ingest(&path).unwrap();
        assert_eq!(out.kept.len(), 2);
        assert_eq!(out.quarantine[0].line, 3);
        let q = dir.path().join("q.tsv");
        write_quarantine(&q, &out.quarantine).unwrap();
        let text = std::fs::read_to_string(&q).unwrap();
        assert!(text.starts_with("source\tsource_id\tsmiles\tline\tstage\tstatus\treason\n"));
        assert_eq!(text.lines().count(), 2);
    }
}
