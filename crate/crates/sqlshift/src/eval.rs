//! Execution harness, semantic judge, per-record evaluation, and the
//! aggregate report.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backend::{Backend, GenerationRequest};
use crate::mapper::MappingRecord;
use crate::prompting::OutputStatus;
use crate::schema_io::{open_read_only, SchemaIoError};
use sqlshift_core::{
    constant_reuse_counts, join_retained, leakage, structural_alignment, tokenize,
    ErrorCategory, ExecOutcome, ExecStatus, LeakageFlags, SchemaDef,
};

/// Fetched-row cap bounding runaway result sets.
pub const ROW_CAP: u64 = 100_000;
pub const DEFAULT_TIMEOUT_MS: u64 = 30_000;

/// Runs a query read-only against the target database. Query failures are
/// data (categorized outcomes); only an unreadable database is an error.
pub fn execute_on_target(
    sql: &str,
    db_path: &Path,
    timeout_ms: u64,
) -> Result<ExecOutcome, SchemaIoError> {
    let conn = open_read_only(db_path)?;
    let started = Instant::now();
    let deadline = Duration::from_millis(timeout_ms);
    conn.progress_handler(100, Some(move || started.elapsed() > deadline));
    let elapsed = |s: Instant| s.elapsed().as_millis() as u64;
    let run = Instant::now();
    let mut stmt = match conn.prepare(sql) {
        Ok(stmt) => stmt,
        Err(e) => return Ok(classify_failure(e, run, deadline)),
    };
    let mut rows = match stmt.query([]) {
        Ok(rows) => rows,
        Err(e) => return Ok(classify_failure(e, run, deadline)),
    };
    let mut count: u64 = 0;
    loop {
        match rows.next() {
            Ok(Some(_)) => {
                if count < ROW_CAP {
                    count += 1;
                } else {
                    break;
                }
            }
            Ok(None) => break,
            Err(e) => return Ok(classify_failure(e, run, deadline)),
        }
    }
    Ok(ExecOutcome::success(count, elapsed(run)))
}

fn classify_failure(e: rusqlite::Error, run: Instant, deadline: Duration) -> ExecOutcome {
    let elapsed = run.elapsed();
    let interrupted = matches!(
        &e,
        rusqlite::Error::SqliteFailure(err, _)
            if err.code == rusqlite::ErrorCode::OperationInterrupted
    );
    if interrupted && elapsed >= deadline {
        ExecOutcome::timeout(elapsed.as_millis() as u64)
    } else {
        ExecOutcome::failure(e.to_string(), elapsed.as_millis() as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JudgeLevel {
    Yes,
    Maybe,
    No,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgeVerdict {
    pub nl_meaningful: JudgeLevel,
    pub sql_nl_aligned: JudgeLevel,
    pub rationale: String,
}

impl JudgeVerdict {
    /// Conservative pass: both verdicts strictly yes; MAYBE fails.
    pub fn passes(&self) -> bool {
        self.nl_meaningful == JudgeLevel::Yes && self.sql_nl_aligned == JudgeLevel::Yes
    }
}

#[derive(Debug, Error)]
#[error("judge unavailable: {0}")]
pub struct JudgeUnavailable(pub String);

pub const JUDGE_PROMPT_MARKER: &str = "-- judge prompt v1";

pub const MOCK_JUDGE_RESPONSE: &str =
    r#"{"nl_meaningful": "yes", "sql_nl_aligned": "yes", "rationale": "mock verdict"}"#;

pub fn judge_prompt(question: &str, sql: &str, target_schema_text: &str) -> String {
    format!(
        "{JUDGE_PROMPT_MARKER}\n\
         You are reviewing a natural language question and a SQL query written for the schema below.\n\
         Answer two questions, each with exactly yes, maybe, or no:\n\
         1. Is the question clear, specific, and meaningful in the context of this schema?\n\
         2. Does the SQL query faithfully express the question?\n\
         Respond as JSON: {{\"nl_meaningful\": ..., \"sql_nl_aligned\": ..., \"rationale\": ...}}\n\
         ### Schema\n{target_schema_text}\n\
         ### Question\n{question}\n\
         ### SQL\n{sql}\n"
    )
}

/// Asks the judge backend for a three-level verdict on meaningfulness and
/// question/SQL alignment.
pub fn judge_semantics(
    question: &str,
    sql: &str,
    target_schema_text: &str,
    judge: &dyn Backend,
    model_name: &str,
) -> Result<JudgeVerdict, JudgeUnavailable> {
    let prompt = judge_prompt(question, sql, target_schema_text);
    let result = judge
        .generate(&GenerationRequest::new(prompt, model_name))
        .map_err(|e| JudgeUnavailable(e.to_string()))?;
    parse_judge_response(&result.text)
}

fn parse_judge_response(raw: &str) -> Result<JudgeVerdict, JudgeUnavailable> {
    let start = raw.find('{');
    let end = raw.rfind('}');
    let (Some(start), Some(end)) = (start, end) else {
        return Err(JudgeUnavailable(format!("no JSON object in judge output: {raw}")));
    };
    serde_json::from_str(&raw[start..=end])
        .map_err(|e| JudgeUnavailable(format!("unparseable judge output: {e}")))
}

/// Per-execution data persisted for aggregation and pool filtering. Latency
/// is deliberately dropped so run artifacts are byte-stable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersistedOutcome {
    pub status: ExecStatus,
    pub row_count: Option<u64>,
    pub error_category: Option<ErrorCategory>,
    pub error_text: Option<String>,
}

impl From<&ExecOutcome> for PersistedOutcome {
    fn from(o: &ExecOutcome) -> Self {
        PersistedOutcome {
            status: o.status,
            row_count: o.row_count,
            error_category: o.error_category,
            error_text: o.error_text.clone(),
        }
    }
}

impl PersistedOutcome {
    pub fn yielded(&self) -> bool {
        self.status == ExecStatus::Success && self.row_count.map_or(false, |n| n > 0)
    }
}

/// One evaluated record: everything the report and the selection pool need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub entry_id: String,
    pub status: OutputStatus,
    pub aligned: Option<bool>,
    pub exec: Option<PersistedOutcome>,
    pub join_kept: Option<bool>,
    pub leakage: Option<LeakageFlags>,
    pub constant_counts: Option<(u64, u64)>,
    pub verdict: Option<JudgeVerdict>,
    pub judge_unavailable: bool,
}

/// Evaluates one mapping record: structural alignment, execution on the
/// target database, leakage against both schemas, and (when a judge backend
/// is supplied) the semantic verdict.
#[allow(clippy::too_many_arguments)]
pub fn evaluate_record(
    record: &MappingRecord,
    src_schema: &SchemaDef,
    tgt_schema: &SchemaDef,
    tgt_schema_text: &str,
    tgt_db_path: &Path,
    timeout_ms: u64,
    judge: Option<&dyn Backend>,
    judge_model: &str,
) -> Result<EvalRow, SchemaIoError> {
    let mut row = EvalRow {
        entry_id: record.entry_id.clone(),
        status: record.output.status,
        aligned: None,
        exec: None,
        join_kept: None,
        leakage: None,
        constant_counts: None,
        verdict: None,
        judge_unavailable: false,
    };
    if record.output.status != OutputStatus::Mapped {
        return Ok(row);
    }
    if let Some(tgt_skel) = &record.target_skeleton {
        row.aligned = Some(structural_alignment(&record.source_skeleton, tgt_skel));
    }
    let outcome = execute_on_target(&record.output.sql, tgt_db_path, timeout_ms)?;
    row.exec = Some(PersistedOutcome::from(&outcome));
    if let (Ok(src_ts), Ok(tgt_ts)) =
        (tokenize(&record.source_sql), tokenize(&record.output.sql))
    {
        row.join_kept = join_retained(&src_ts, &tgt_ts);
        row.leakage = Some(leakage(&src_ts, &tgt_ts, src_schema, tgt_schema));
        row.constant_counts =
            constant_reuse_counts(&src_ts, &tgt_ts).map(|(r, t)| (r as u64, t as u64));
    }
    if let Some(judge) = judge {
        match judge_semantics(
            &record.output.question,
            &record.output.sql,
            tgt_schema_text,
            judge,
            judge_model,
        ) {
            Ok(verdict) => row.verdict = Some(verdict),
            Err(e) => {
                log::warn!("judge unavailable for {}: {e}", record.entry_id);
                row.judge_unavailable = true;
            }
        }
    }
    Ok(row)
}

/// A ratio with its numerator and denominator always reported alongside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub value: f64,
    pub numerator: u64,
    pub denominator: u64,
}

impl Ratio {
    pub fn new(numerator: u64, denominator: u64) -> Self {
        let value = if denominator == 0 { 0.0 } else { numerator as f64 / denominator as f64 };
        Ratio { value, numerator, denominator }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub total: u64,
    pub mapped: u64,
    pub null_refusals: u64,
    pub parse_failures: u64,
    pub metrics: BTreeMap<String, Ratio>,
    pub error_histogram: BTreeMap<String, u64>,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot aggregate an empty record set")]
pub struct EmptyInput;

/// Aggregates evaluated rows into the report. The five headline metric names
/// match the usual comparison tables verbatim.
pub fn aggregate_report(rows: &[EvalRow]) -> Result<EvalReport, EmptyInput> {
    if rows.is_empty() {
        return Err(EmptyInput);
    }
    let total = rows.len() as u64;
    let count = |f: &dyn Fn(&EvalRow) -> bool| rows.iter().filter(|r| f(r)).count() as u64;
    let mapped = count(&|r| r.status == OutputStatus::Mapped);
    let null_refusals = count(&|r| r.status == OutputStatus::NullRefusal);
    let parse_failures = count(&|r| r.status == OutputStatus::ParseFailure);

    let mut metrics = BTreeMap::new();
    let mut add = |name: &str, num: u64, den: u64| {
        metrics.insert(name.to_string(), Ratio::new(num, den));
    };
    add("Generation Success", mapped, total);
    add(
        "Structural Alignment",
        count(&|r| r.aligned == Some(true)),
        count(&|r| r.aligned.is_some()),
    );
    add(
        "Execution Validity",
        count(&|r| r.exec.as_ref().map_or(false, |o| o.status == ExecStatus::Success)),
        count(&|r| r.exec.is_some()),
    );
    add(
        "Result Yield",
        count(&|r| r.exec.as_ref().map_or(false, |o| o.yielded())),
        count(&|r| r.exec.is_some()),
    );
    add(
        "Join Retention",
        count(&|r| r.join_kept == Some(true)),
        count(&|r| r.join_kept.is_some()),
    );
    add(
        "Table Reuse",
        count(&|r| r.leakage.map_or(false, |l| l.table_reuse)),
        count(&|r| r.leakage.is_some()),
    );
    add(
        "Column Reuse",
        count(&|r| r.leakage.map_or(false, |l| l.column_reuse)),
        count(&|r| r.leakage.is_some()),
    );
    add(
        "Constant Reuse",
        count(&|r| r.leakage.map_or(false, |l| l.constant_reuse == Some(true))),
        count(&|r| r.leakage.map_or(false, |l| l.constant_reuse.is_some())),
    );
    let (reused, lits) = rows
        .iter()
        .filter_map(|r| r.constant_counts)
        .fold((0, 0), |(a, b), (r, t)| (a + r, b + t));
    add("Constant Reuse (per constant)", reused, lits);
    let judged = count(&|r| r.verdict.is_some());
    add(
        "NL Meaningfulness",
        count(&|r| r.verdict.as_ref().map_or(false, |v| v.nl_meaningful == JudgeLevel::Yes)),
        judged,
    );
    add(
        "SQL–NL Alignment",
        count(&|r| r.verdict.as_ref().map_or(false, |v| v.sql_nl_aligned == JudgeLevel::Yes)),
        judged,
    );
    add("Judge Coverage", judged, mapped);

    let mut error_histogram = BTreeMap::new();
    for row in rows {
        if let Some(cat) = row.exec.as_ref().and_then(|o| o.error_category) {
            *error_histogram.entry(cat.name().to_string()).or_insert(0) += 1;
        }
    }
    Ok(EvalReport { total, mapped, null_refusals, parse_failures, metrics, error_histogram })
}

/// CSV rendering: counts, then metric rows with numerator and denominator,
/// then the error histogram.
pub fn report_to_csv(report: &EvalReport) -> String {
    let mut out = String::from("section,key,value,numerator,denominator\n");
    out.push_str(&format!("counts,total,{},,\n", report.total));
    out.push_str(&format!("counts,mapped,{},,\n", report.mapped));
    out.push_str(&format!("counts,null_refusals,{},,\n", report.null_refusals));
    out.push_str(&format!("counts,parse_failures,{},,\n", report.parse_failures));
    for (name, ratio) in &report.metrics {
        out.push_str(&format!(
            "metric,\"{}\",{},{},{}\n",
            name, ratio.value, ratio.numerator, ratio.denominator
        ));
    }
    for (cat, n) in &report.error_histogram {
        out.push_str(&format!("error,{cat},{n},,\n"));
    }
    out
}
