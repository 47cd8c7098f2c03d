//! Command-line plumbing: config resolution, run-directory layout, and the
//! map/eval/diff/select/report commands.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::backend::{backend_from_env, BackendError};
use crate::eval::{
    aggregate_report, evaluate_record, report_to_csv, EmptyInput, EvalReport, EvalRow,
    DEFAULT_TIMEOUT_MS,
};
use crate::mapper::{
    generation_success, plan_tasks, run_task, MapError, MappingRecord, RecordLog, TaskConfig,
    TaskEnv,
};
use crate::prompting::{Demonstration, OutputStatus, DEFAULT_MAX_BATCH};
use crate::schema_io::{
    find_db_path, introspect_schema, load_dataset, render_sample_text, render_schema_text,
    sample_rows, DatasetEntry, DatasetFormat, SchemaIoError, Split,
};
use sqlshift_core::diff::{edit_script, summarize, Bucket};
use sqlshift_core::select::{
    assemble_prompt, filter_pool, retrieve, ExamplePool, PoolEntry, RetrievalConfig,
    RetrievalStrategy, ScorerRegistry, SelectError,
};
use sqlshift_core::{ExecStatus, SchemaDef};

#[derive(Parser, Debug)]
#[command(name = "sqlshift", version, about = "Cross-schema NL-SQL pair mapping pipeline")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub dataset_root: Option<PathBuf>,
    #[arg(long, global = true, value_parser = ["bird", "spider"])]
    pub format: Option<String>,
    #[arg(long, global = true)]
    pub backend: Option<String>,
    #[arg(long, global = true)]
    pub run_id: Option<String>,
    #[arg(long, global = true)]
    pub limit: Option<usize>,
    #[arg(long, global = true)]
    pub batch: Option<usize>,
    #[arg(long, global = true)]
    pub k: Option<usize>,
    #[arg(long, global = true, value_parser = ["unmapped", "mapped", "oracle"])]
    pub strategy: Option<String>,
    #[arg(long, global = true)]
    pub no_exec_filter: bool,
    #[arg(long, global = true)]
    pub no_semantic_filter: bool,
    #[arg(long, global = true)]
    pub timeout_ms: Option<u64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the mapping pipeline and write records.jsonl + manifest.json.
    Map,
    /// Evaluate a finished run: report.json, report.csv, eval_records.jsonl.
    Eval,
    /// Edit-script bucket summary over a finished run: diff.csv.
    Diff,
    /// Build downstream prompts for a test file: prompts.jsonl.
    Select {
        /// JSON file with an array of {id?, question, db_id} objects.
        test_file: PathBuf,
    },
    /// Print the evaluation report of a finished run.
    Report,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub dataset_root: PathBuf,
    pub format: DatasetFormat,
    pub backend: String,
    pub run_id: String,
    pub limit: usize,
    pub batch: usize,
    pub samples_k: usize,
    pub k: usize,
    pub strategy: RetrievalStrategy,
    pub exec_filter: bool,
    pub semantic_filter: bool,
    pub timeout_ms: u64,
    pub out: PathBuf,
    pub model_name: String,
    pub demo_path: Option<PathBuf>,
    pub fixture_dir: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset_root: PathBuf::from("."),
            format: DatasetFormat::Spider,
            backend: "mock".to_string(),
            run_id: "run".to_string(),
            limit: 20,
            batch: DEFAULT_MAX_BATCH,
            samples_k: 3,
            k: 3,
            strategy: RetrievalStrategy::Mapped,
            exec_filter: true,
            semantic_filter: true,
            timeout_ms: DEFAULT_TIMEOUT_MS,
            out: PathBuf::from("runs"),
            model_name: "default-model".to_string(),
            demo_path: None,
            fixture_dir: None,
            seed: 0,
        }
    }
}

/// Flat TOML config file; every key optional, flags win over file values.
#[derive(Debug, Default, Deserialize)]
struct FileConfig {
    dataset_root: Option<PathBuf>,
    format: Option<String>,
    backend: Option<String>,
    run_id: Option<String>,
    limit: Option<usize>,
    batch: Option<usize>,
    samples_k: Option<usize>,
    k: Option<usize>,
    strategy: Option<String>,
    exec_filter: Option<bool>,
    semantic_filter: Option<bool>,
    timeout_ms: Option<u64>,
    out: Option<PathBuf>,
    model_name: Option<String>,
    demo_path: Option<PathBuf>,
    fixture_dir: Option<PathBuf>,
    seed: Option<u64>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    SchemaIo(#[from] SchemaIoError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Empty(#[from] EmptyInput),
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid JSON in {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("run {0} already exists with a different configuration")]
    ConfigMismatch(String),
}

fn parse_format(s: &str) -> Result<DatasetFormat, CliError> {
    match s {
        "bird" => Ok(DatasetFormat::Bird),
        "spider" => Ok(DatasetFormat::Spider),
        other => Err(CliError::Config(format!("unknown format {other}"))),
    }
}

fn parse_strategy(s: &str) -> Result<RetrievalStrategy, CliError> {
    match s {
        "unmapped" => Ok(RetrievalStrategy::Unmapped),
        "mapped" => Ok(RetrievalStrategy::Mapped),
        "oracle" => Ok(RetrievalStrategy::Oracle),
        other => Err(CliError::Config(format!("unknown strategy {other}"))),
    }
}

/// Defaults, overlaid with the TOML config file, overlaid with flags.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.clone(), source })?;
        let file: FileConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(v) = file.dataset_root {
            cfg.dataset_root = v;
        }
        if let Some(v) = file.format {
            cfg.format = parse_format(&v)?;
        }
        if let Some(v) = file.backend {
            cfg.backend = v;
        }
        if let Some(v) = file.run_id {
            cfg.run_id = v;
        }
        if let Some(v) = file.limit {
            cfg.limit = v;
        }
        if let Some(v) = file.batch {
            cfg.batch = v;
        }
        if let Some(v) = file.samples_k {
            cfg.samples_k = v;
        }
        if let Some(v) = file.k {
            cfg.k = v;
        }
        if let Some(v) = file.strategy {
            cfg.strategy = parse_strategy(&v)?;
        }
        if let Some(v) = file.exec_filter {
            cfg.exec_filter = v;
        }
        if let Some(v) = file.semantic_filter {
            cfg.semantic_filter = v;
        }
        if let Some(v) = file.timeout_ms {
            cfg.timeout_ms = v;
        }
        if let Some(v) = file.out {
            cfg.out = v;
        }
        if let Some(v) = file.model_name {
            cfg.model_name = v;
        }
        if let Some(v) = file.demo_path {
            cfg.demo_path = Some(v);
        }
        if let Some(v) = file.fixture_dir {
            cfg.fixture_dir = Some(v);
        }
        if let Some(v) = file.seed {
            cfg.seed = v;
        }
    }
    if let Some(v) = &cli.dataset_root {
        cfg.dataset_root = v.clone();
    }
    if let Some(v) = &cli.format {
        cfg.format = parse_format(v)?;
    }
    if let Some(v) = &cli.backend {
        cfg.backend = v.clone();
    }
    if let Some(v) = &cli.run_id {
        cfg.run_id = v.clone();
    }
    if let Some(v) = cli.limit {
        cfg.limit = v;
    }
    if let Some(v) = cli.batch {
        cfg.batch = v;
    }
    if let Some(v) = cli.k {
        cfg.k = v;
    }
    if let Some(v) = &cli.strategy {
        cfg.strategy = parse_strategy(v)?;
    }
    if cli.no_exec_filter {
        cfg.exec_filter = false;
    }
    if cli.no_semantic_filter {
        cfg.semantic_filter = false;
    }
    if let Some(v) = cli.timeout_ms {
        cfg.timeout_ms = v;
    }
    if let Some(v) = &cli.out {
        cfg.out = v.clone();
    }
    if cfg.batch == 0 || cfg.k == 0 || cfg.timeout_ms == 0 {
        return Err(CliError::Config("numeric knobs must be positive".to_string()));
    }
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub run_id: String,
    pub config: RunConfig,
    pub config_hash: String,
    pub seed: u64,
}

pub fn config_hash(config: &RunConfig) -> String {
    let canonical = serde_json::to_string(config).expect("config serializes");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

pub fn run_dir(cfg: &RunConfig) -> PathBuf {
    cfg.out.join(&cfg.run_id)
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|source| CliError::Io { path: parent.to_path_buf(), source })?;
    }
    std::fs::write(path, content).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn read_manifest(dir: &Path) -> Result<Manifest, CliError> {
    let path = dir.join("manifest.json");
    serde_json::from_str(&read_file(&path)?)
        .map_err(|source| CliError::Json { path, source })
}

fn load_demo(cfg: &RunConfig) -> Result<Demonstration, CliError> {
    match &cfg.demo_path {
        None => Ok(Demonstration::builtin()),
        Some(path) => serde_json::from_str(&read_file(path)?)
            .map_err(|source| CliError::Json { path: path.clone(), source }),
    }
}

struct DbCache {
    root: PathBuf,
    format: DatasetFormat,
    schemas: BTreeMap<String, (PathBuf, SchemaDef, String)>,
}

impl DbCache {
    fn new(root: &Path, format: DatasetFormat) -> Self {
        DbCache { root: root.to_path_buf(), format, schemas: BTreeMap::new() }
    }

    fn get(&mut self, db_id: &str) -> Result<&(PathBuf, SchemaDef, String), CliError> {
        if !self.schemas.contains_key(db_id) {
            let path = find_db_path(&self.root, self.format, db_id).ok_or_else(|| {
                CliError::SchemaIo(SchemaIoError::MissingDatabase {
                    db_id: db_id.to_string(),
                    expected: self.root.join(db_id),
                })
            })?;
            let schema = introspect_schema(&path)?;
            let text = render_schema_text(&schema);
            self.schemas.insert(db_id.to_string(), (path, schema, text));
        }
        Ok(&self.schemas[db_id])
    }
}

/// Runs mapping for every (train source db, dev target db) pair and returns
/// the run directory.
pub fn cmd_map(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = run_dir(cfg);
    let manifest = Manifest {
        run_id: cfg.run_id.clone(),
        config: cfg.clone(),
        config_hash: config_hash(cfg),
        seed: cfg.seed,
    };
    let manifest_path = dir.join("manifest.json");
    if manifest_path.exists() {
        let existing = read_manifest(&dir)?;
        if existing.config_hash != manifest.config_hash {
            return Err(CliError::ConfigMismatch(cfg.run_id.clone()));
        }
    } else {
        write_file(
            &manifest_path,
            &serde_json::to_string_pretty(&manifest).expect("manifest serializes"),
        )?;
    }

    let entries = load_dataset(&cfg.dataset_root, cfg.format)?;
    let sources: Vec<DatasetEntry> =
        entries.iter().filter(|e| e.split == Split::Train).cloned().collect();
    let mut targets: Vec<String> = Vec::new();
    for e in entries.iter().filter(|e| e.split == Split::Dev) {
        if !targets.contains(&e.db_id) {
            targets.push(e.db_id.clone());
        }
    }
    if targets.is_empty() {
        return Err(CliError::Config("dataset has no dev split to target".to_string()));
    }
    let task_config = TaskConfig {
        max_batch: cfg.batch,
        samples_k: cfg.samples_k,
        backend_id: cfg.backend.clone(),
        model_name: cfg.model_name.clone(),
    };
    let tasks = plan_tasks(&sources, &targets, cfg.limit, &task_config);
    let backend = backend_from_env(Some(&cfg.backend), cfg.fixture_dir.as_deref())?;
    let demo = load_demo(cfg)?;
    let log = RecordLog::new(dir.join("records.jsonl"));
    let mut cache = DbCache::new(&cfg.dataset_root, cfg.format);
    for task in &tasks {
        let (_, _, source_text) = cache.get(&task.source_db)?.clone();
        let (tgt_path, tgt_schema, target_text) = cache.get(&task.target_db)?.clone();
        let samples = sample_rows(&tgt_path, &tgt_schema, cfg.samples_k)?;
        let env = TaskEnv {
            source_schema_text: source_text,
            target_schema_text: target_text.clone(),
            target_sample_text: render_sample_text(&tgt_schema, &samples),
            demo: demo.clone(),
        };
        run_task(task, &env, backend.as_ref(), &log)?;
    }
    let records = log.read_all()?;
    match generation_success(&records) {
        Ok(rate) => println!("generation success: {rate:.4} ({} records)", records.len()),
        Err(_) => println!("no records produced"),
    }
    Ok(dir)
}

fn read_records(dir: &Path) -> Result<Vec<MappingRecord>, CliError> {
    let log = RecordLog::new(dir.join("records.jsonl"));
    let records = log.read_all()?;
    if records.is_empty() {
        return Err(CliError::Config(format!(
            "no records found under {}",
            dir.display()
        )));
    }
    Ok(records)
}

/// Evaluates a finished run and writes eval_records.jsonl, report.json, and
/// report.csv into the run directory.
pub fn cmd_eval(cfg: &RunConfig) -> Result<EvalReport, CliError> {
    let dir = run_dir(cfg);
    let manifest = read_manifest(&dir)?;
    let records = read_records(&dir)?;
    let backend = backend_from_env(Some(&cfg.backend), cfg.fixture_dir.as_deref())?;
    let judge = if cfg.semantic_filter { Some(backend.as_ref()) } else { None };
    let mut cache = DbCache::new(&manifest.config.dataset_root, manifest.config.format);
    let mut rows: Vec<EvalRow> = Vec::with_capacity(records.len());
    for record in &records {
        let (_, src_schema, _) = cache.get(&record.source_db)?.clone();
        let (tgt_path, tgt_schema, tgt_text) = cache.get(&record.target_db)?.clone();
        let row = evaluate_record(
            record,
            &src_schema,
            &tgt_schema,
            &tgt_text,
            &tgt_path,
            cfg.timeout_ms,
            judge,
            &cfg.model_name,
        )?;
        rows.push(row);
    }
    let lines: String = rows
        .iter()
        .map(|r| format!("{}\n", serde_json::to_string(r).expect("row serializes")))
        .collect();
    write_file(&dir.join("eval_records.jsonl"), &lines)?;
    let report = aggregate_report(&rows)?;
    write_file(
        &dir.join("report.json"),
        &serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    write_file(&dir.join("report.csv"), &report_to_csv(&report))?;
    Ok(report)
}

/// Writes diff.csv: per-bucket deletion/insertion/mutation counts with the
/// kind-fraction footer.
pub fn cmd_diff(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = run_dir(cfg);
    let records = read_records(&dir)?;
    let scripts: Vec<_> = records
        .iter()
        .filter_map(|r| {
            r.target_skeleton
                .as_ref()
                .map(|tgt| edit_script(&r.source_skeleton, tgt))
        })
        .collect();
    let summary = summarize(scripts.iter().map(|s| s.as_slice()));
    let mut csv = String::from("bucket,deletions,insertions,mutations\n");
    for bucket in Bucket::ALL {
        let counts = summary.per_bucket.get(&bucket).copied().unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{}\n",
            bucket.name(),
            counts.deletions,
            counts.insertions,
            counts.mutations
        ));
    }
    csv.push_str(&format!("TOTAL,{},,\n", summary.total_edits));
    csv.push_str(&format!(
        "FRACTION,{},{},{}\n",
        summary.fraction_deletions, summary.fraction_insertions, summary.fraction_mutations
    ));
    let path = dir.join("diff.csv");
    write_file(&path, &csv)?;
    Ok(path)
}

#[derive(Debug, Deserialize)]
struct TestQuestion {
    #[serde(default)]
    id: Option<String>,
    question: String,
    db_id: String,
}

fn read_eval_rows(dir: &Path) -> Result<BTreeMap<String, EvalRow>, CliError> {
    let path = dir.join("eval_records.jsonl");
    if !path.exists() {
        return Ok(BTreeMap::new());
    }
    let mut map = BTreeMap::new();
    for line in read_file(&path)?.lines().filter(|l| !l.trim().is_empty()) {
        let row: EvalRow = serde_json::from_str(line)
            .map_err(|source| CliError::Json { path: path.clone(), source })?;
        map.insert(row.entry_id.clone(), row);
    }
    Ok(map)
}

fn mapped_pool(records: &[MappingRecord], rows: &BTreeMap<String, EvalRow>) -> ExamplePool {
    let entries = records
        .iter()
        .filter(|r| r.output.status == OutputStatus::Mapped && !r.output.sql.is_empty())
        .map(|r| {
            let row = rows.get(&r.entry_id);
            PoolEntry {
                id: r.entry_id.clone(),
                question: r.output.question.clone(),
                sql: r.output.sql.clone(),
                source_db: r.source_db.clone(),
                target_db: r.target_db.clone(),
                passed_execution: row
                    .and_then(|w| w.exec.as_ref())
                    .map_or(false, |o| o.status == ExecStatus::Success),
                passed_semantic: row
                    .and_then(|w| w.verdict.as_ref())
                    .map_or(false, |v| v.passes()),
            }
        })
        .collect();
    ExamplePool { entries }
}

fn unmapped_pool(records: &[MappingRecord]) -> ExamplePool {
    let mut by_id: BTreeMap<&str, PoolEntry> = BTreeMap::new();
    for r in records {
        by_id.entry(&r.entry_id).or_insert_with(|| PoolEntry {
            id: r.entry_id.clone(),
            question: r.source_question.clone(),
            sql: r.source_sql.clone(),
            source_db: r.source_db.clone(),
            target_db: r.target_db.clone(),
            passed_execution: true,
            passed_semantic: true,
        });
    }
    ExamplePool { entries: by_id.into_values().collect() }
}

fn oracle_pool(entries: &[DatasetEntry], db_id: &str) -> ExamplePool {
    ExamplePool {
        entries: entries
            .iter()
            .filter(|e| e.split == Split::Dev && e.db_id == db_id)
            .map(|e| PoolEntry {
                id: e.id.clone(),
                question: e.question.clone(),
                sql: e.gold_sql.clone(),
                source_db: e.db_id.clone(),
                target_db: e.db_id.clone(),
                passed_execution: true,
                passed_semantic: true,
            })
            .collect(),
    }
}

/// Emits one downstream prompt per test question as prompts.jsonl.
/// PoolTooSmall is reported per question; the run continues.
pub fn cmd_select(cfg: &RunConfig, test_file: &Path) -> Result<PathBuf, CliError> {
    let dir = run_dir(cfg);
    let manifest = read_manifest(&dir)?;
    let records = read_records(&dir)?;
    let eval_rows = read_eval_rows(&dir)?;
    let tests: Vec<TestQuestion> = serde_json::from_str(&read_file(test_file)?)
        .map_err(|source| CliError::Json { path: test_file.to_path_buf(), source })?;
    let dataset = if cfg.strategy == RetrievalStrategy::Oracle {
        load_dataset(&manifest.config.dataset_root, manifest.config.format)?
    } else {
        Vec::new()
    };
    let registry = ScorerRegistry::with_defaults();
    let mut cache = DbCache::new(&manifest.config.dataset_root, manifest.config.format);
    let mut lines = String::new();
    for (i, test) in tests.iter().enumerate() {
        let test_id = test.id.clone().unwrap_or_else(|| format!("test:{i}"));
        let pool = match cfg.strategy {
            RetrievalStrategy::Mapped => {
                let pool = mapped_pool(&records, &eval_rows);
                let pool = ExamplePool {
                    entries: pool
                        .entries
                        .into_iter()
                        .filter(|e| e.target_db == test.db_id)
                        .collect(),
                };
                filter_pool(&pool, cfg.exec_filter, cfg.semantic_filter)
            }
            RetrievalStrategy::Unmapped => unmapped_pool(&records),
            RetrievalStrategy::Oracle => oracle_pool(&dataset, &test.db_id),
        };
        let retrieval = RetrievalConfig {
            k: cfg.k,
            strategy: cfg.strategy,
            require_distinct_source: cfg.strategy == RetrievalStrategy::Mapped,
            scorer_id: "jaccard".to_string(),
        };
        let line = match retrieve(&test.question, &pool, &retrieval, &registry, Some(&test_id)) {
            Ok(examples) => {
                let (_, _, schema_text) = cache.get(&test.db_id)?.clone();
                let prompt = assemble_prompt(&test.question, &schema_text, &examples);
                let picked: Vec<serde_json::Value> = examples
                    .iter()
                    .map(|(e, score)| serde_json::json!({"id": e.id, "score": score}))
                    .collect();
                serde_json::json!({
                    "id": test_id,
                    "db_id": test.db_id,
                    "examples": picked,
                    "prompt": prompt,
                })
            }
            Err(e @ SelectError::PoolTooSmall { .. }) => {
                serde_json::json!({"id": test_id, "db_id": test.db_id, "error": e.to_string()})
            }
            Err(e) => return Err(CliError::Config(e.to_string())),
        };
        lines.push_str(&format!("{line}\n"));
    }
    let path = dir.join("prompts.jsonl");
    write_file(&path, &lines)?;
    Ok(path)
}

/// Prints the stored evaluation report as a plain table.
pub fn cmd_report(cfg: &RunConfig) -> Result<String, CliError> {
    let dir = run_dir(cfg);
    let path = dir.join("report.json");
    let report: EvalReport = serde_json::from_str(&read_file(&path)?)
        .map_err(|source| CliError::Json { path, source })?;
    let mut out = format!(
        "records: {} (mapped {}, null refusals {}, parse failures {})\n",
        report.total, report.mapped, report.null_refusals, report.parse_failures
    );
    for (name, ratio) in &report.metrics {
        out.push_str(&format!(
            "{name}: {:.4} ({}/{})\n",
            ratio.value, ratio.numerator, ratio.denominator
        ));
    }
    if !report.error_histogram.is_empty() {
        out.push_str("errors:\n");
        for (cat, n) in &report.error_histogram {
            out.push_str(&format!("  {cat}: {n}\n"));
        }
    }
    print!("{out}");
    Ok(out)
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve_config(cli)?;
    match &cli.command {
        Command::Map => {
            let dir = cmd_map(&cfg)?;
            println!("run directory: {}", dir.display());
        }
        Command::Eval => {
            cmd_eval(&cfg)?;
            println!("report written to {}", run_dir(&cfg).join("report.json").display());
        }
        Command::Diff => {
            let path = cmd_diff(&cfg)?;
            println!("diff written to {}", path.display());
        }
        Command::Select { test_file } => {
            let path = cmd_select(&cfg, test_file)?;
            println!("prompts written to {}", path.display());
        }
        Command::Report => {
            cmd_report(&cfg)?;
        }
    }
    Ok(())
}
