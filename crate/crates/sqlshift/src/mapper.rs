//! Mapping orchestration: task planning over (source, target) database
//! pairs, batched backend calls, and the append-only record log that makes
//! interrupted runs resumable.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::{Backend, GenerationRequest};
use crate::eval::EmptyInput;
use crate::prompting::{
    build_prompt, parse_response, Demonstration, MappedOutput, OutputStatus, PromptError,
};
use crate::schema_io::DatasetEntry;
use sqlshift_core::{extract_alignment_skeleton, tokenize, AlignmentSkeleton};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskConfig {
    pub max_batch: usize,
    pub samples_k: usize,
    pub backend_id: String,
    pub model_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingTask {
    pub source_db: String,
    pub target_db: String,
    pub entries: Vec<DatasetEntry>,
    pub config: TaskConfig,
}

/// Rendered context a task needs beyond its entries.
#[derive(Debug, Clone)]
pub struct TaskEnv {
    pub source_schema_text: String,
    pub target_schema_text: String,
    pub target_sample_text: String,
    pub demo: Demonstration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MappingRecord {
    pub entry_id: String,
    pub source_db: String,
    pub target_db: String,
    pub source_question: String,
    pub source_sql: String,
    pub output: MappedOutput,
    pub source_skeleton: AlignmentSkeleton,
    pub target_skeleton: Option<AlignmentSkeleton>,
}

#[derive(Debug, Error)]
pub enum MapError {
    #[error("record log io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("record log line {line} is not a valid record: {source}")]
    Corrupt { line: usize, source: serde_json::Error },
    #[error("source SQL for {entry_id} does not tokenize: {detail}")]
    SourceTokenize { entry_id: String, detail: String },
    #[error(transparent)]
    Prompt(#[from] PromptError),
}

/// Append-only JSON-lines record log, one mapping record per line.
pub struct RecordLog {
    path: PathBuf,
}

impl RecordLog {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        RecordLog { path: path.into() }
    }

    pub fn path(&self) -> &std::path::Path {
        &self.path
    }

    /// All records in file order; a missing file reads as empty.
    pub fn read_all(&self) -> Result<Vec<MappingRecord>, MapError> {
        if !self.path.exists() {
            return Ok(Vec::new());
        }
        let text = std::fs::read_to_string(&self.path)?;
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str(l).map_err(|source| MapError::Corrupt { line: i + 1, source })
            })
            .collect()
    }

    pub fn append(&self, record: &MappingRecord) -> Result<(), MapError> {
        if let Some(parent) = self.path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let mut file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        let line = serde_json::to_string(record).expect("record serializes");
        writeln!(file, "{line}")?;
        Ok(())
    }
}

/// One task per (source_db, target_db) pair with source_db ≠ target_db, each
/// holding up to per_db_limit entries in dataset order.
pub fn plan_tasks(
    source_entries: &[DatasetEntry],
    targets: &[String],
    per_db_limit: usize,
    config: &TaskConfig,
) -> Vec<MappingTask> {
    if per_db_limit == 0 {
        return Vec::new();
    }
    let mut source_dbs: Vec<String> = Vec::new();
    for e in source_entries {
        if !source_dbs.contains(&e.db_id) {
            source_dbs.push(e.db_id.clone());
        }
    }
    let mut tasks = Vec::new();
    for source_db in &source_dbs {
        let entries: Vec<DatasetEntry> = source_entries
            .iter()
            .filter(|e| &e.db_id == source_db)
            .take(per_db_limit)
            .cloned()
            .collect();
        for target_db in targets {
            if target_db == source_db {
                continue;
            }
            tasks.push(MappingTask {
                source_db: source_db.clone(),
                target_db: target_db.clone(),
                entries: entries.clone(),
                config: config.clone(),
            });
        }
    }
    tasks
}

fn make_record(task: &MappingTask, entry: &DatasetEntry, output: MappedOutput) -> Result<MappingRecord, MapError> {
    let source_stream = tokenize(&entry.gold_sql).map_err(|e| MapError::SourceTokenize {
        entry_id: entry.id.clone(),
        detail: format!("{e:?}"),
    })?;
    let target_skeleton = if output.status == OutputStatus::Mapped {
        tokenize(&output.sql).ok().map(|ts| extract_alignment_skeleton(&ts))
    } else {
        None
    };
    Ok(MappingRecord {
        entry_id: entry.id.clone(),
        source_db: task.source_db.clone(),
        target_db: task.target_db.clone(),
        source_question: entry.question.clone(),
        source_sql: entry.gold_sql.clone(),
        output,
        source_skeleton: extract_alignment_skeleton(&source_stream),
        target_skeleton,
    })
}

/// Runs one task, appending each new record to the log as it is produced.
/// Entries already present in the log are skipped; batches are sliced over
/// the full original entry list so a resumed run re-issues the exact same
/// prompts and converges on the identical record set. Backend failures mark
/// the affected batch PARSE_FAILURE and the task continues.
pub fn run_task(
    task: &MappingTask,
    env: &TaskEnv,
    backend: &dyn Backend,
    log: &RecordLog,
) -> Result<Vec<MappingRecord>, MapError> {
    let done: BTreeSet<String> = log.read_all()?.into_iter().map(|r| r.entry_id).collect();
    let mut written = Vec::new();
    for batch in task.entries.chunks(task.config.max_batch.max(1)) {
        if batch.iter().all(|e| done.contains(&e.id)) {
            continue;
        }
        let prompt = build_prompt(
            &env.source_schema_text,
            &env.target_schema_text,
            &env.target_sample_text,
            batch,
            &env.demo,
            task.config.max_batch,
        )?;
        let ids: Vec<String> = batch.iter().map(|e| e.id.clone()).collect();
        let request = GenerationRequest::new(prompt.rendered.clone(), task.config.model_name.clone());
        let outputs = match backend.generate(&request) {
            Ok(result) => parse_response(&result.text, &ids),
            Err(e) => {
                log::warn!(
                    "backend error for batch starting at {}: {e}; marking batch PARSE_FAILURE",
                    ids[0]
                );
                ids.iter()
                    .map(|id| MappedOutput {
                        entry_id: id.clone(),
                        status: OutputStatus::ParseFailure,
                        template_text: String::new(),
                        thought: String::new(),
                        question: String::new(),
                        sql: String::new(),
                        raw: format!("backend error: {e}"),
                    })
                    .collect()
            }
        };
        for (entry, output) in batch.iter().zip(outputs) {
            if done.contains(&entry.id) {
                continue;
            }
            let record = make_record(task, entry, output)?;
            log.append(&record)?;
            written.push(record);
        }
    }
    Ok(written)
}

/// Fraction of records with a usable mapped pair: |MAPPED| / n.
pub fn generation_success(records: &[MappingRecord]) -> Result<f64, EmptyInput> {
    if records.is_empty() {
        return Err(EmptyInput);
    }
    let mapped = records
        .iter()
        .filter(|r| r.output.status == OutputStatus::Mapped)
        .count();
    Ok(mapped as f64 / records.len() as f64)
}
