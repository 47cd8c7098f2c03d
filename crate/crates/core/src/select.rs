//! In-context example selection: pool filtering, question similarity, top-k
//! retrieval, and downstream prompt assembly.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolEntry {
    pub id: String,
    pub question: String,
    pub sql: String,
    pub source_db: String,
    pub target_db: String,
    pub passed_execution: bool,
    pub passed_semantic: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExamplePool {
    pub entries: Vec<PoolEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RetrievalStrategy {
    Unmapped,
    Mapped,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetrievalConfig {
    pub k: usize,
    pub strategy: RetrievalStrategy,
    pub require_distinct_source: bool,
    pub scorer_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelectError {
    PoolTooSmall { needed: usize, available: usize },
    UnknownScorer(String),
    ZeroK,
}

impl fmt::Display for SelectError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectError::PoolTooSmall { needed, available } => {
                write!(f, "pool too small: needed {needed}, available {available}")
            }
            SelectError::UnknownScorer(id) => write!(f, "unknown scorer id: {id}"),
            SelectError::ZeroK => write!(f, "k must be at least 1"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SelectError {}

/// Keeps entries whose enabled filter flags are all true; with both filters
/// on, the result equals the intersection of the single-filter results.
pub fn filter_pool(pool: &ExamplePool, use_exec: bool, use_semantic: bool) -> ExamplePool {
    ExamplePool {
        entries: pool
            .entries
            .iter()
            .filter(|e| (!use_exec || e.passed_execution) && (!use_semantic || e.passed_semantic))
            .cloned()
            .collect(),
    }
}

fn question_tokens(text: &str) -> BTreeSet<String> {
    text.chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect::<String>()
        .split_whitespace()
        .map(|w| w.chars().flat_map(|c| c.to_lowercase()).collect())
        .collect()
}

/// Token-level Jaccard similarity of case-folded, punctuation-stripped
/// question texts. Two empty texts count as identical.
pub fn jaccard_similarity(a: &str, b: &str) -> f64 {
    let ta = question_tokens(a);
    let tb = question_tokens(b);
    if ta.is_empty() && tb.is_empty() {
        return 1.0;
    }
    let inter = ta.intersection(&tb).count();
    let union = ta.union(&tb).count();
    inter as f64 / union as f64
}

/// Pluggable question-similarity scorer. The lexical default lets everything
/// run offline; embedding-based scorers can register under their own id.
pub trait SimilarityScorer {
    fn score(&self, test_question: &str, candidate_question: &str) -> f64;
}

struct Jaccard;

impl SimilarityScorer for Jaccard {
    fn score(&self, a: &str, b: &str) -> f64 {
        jaccard_similarity(a, b)
    }
}

#[derive(Default)]
pub struct ScorerRegistry {
    scorers: BTreeMap<String, Box<dyn SimilarityScorer>>,
}

impl ScorerRegistry {
    /// Registry with the default lexical scorer under id `jaccard`.
    pub fn with_defaults() -> Self {
        let mut reg = ScorerRegistry::default();
        reg.register("jaccard", Box::new(Jaccard));
        reg
    }

    pub fn register(&mut self, id: &str, scorer: Box<dyn SimilarityScorer>) {
        self.scorers.insert(id.to_owned(), scorer);
    }

    pub fn get(&self, id: &str) -> Result<&dyn SimilarityScorer, SelectError> {
        self.scorers
            .get(id)
            .map(|b| b.as_ref())
            .ok_or_else(|| SelectError::UnknownScorer(id.to_owned()))
    }
}

/// Top-k entries by descending score, ties broken by ascending entry id.
/// With `require_distinct_source`, at most one entry per source database.
/// `exclude_id` drops the test instance itself from consideration.
pub fn retrieve<'a>(
    test_question: &str,
    pool: &'a ExamplePool,
    cfg: &RetrievalConfig,
    registry: &ScorerRegistry,
    exclude_id: Option<&str>,
) -> Result<Vec<(&'a PoolEntry, f64)>, SelectError> {
    if cfg.k == 0 {
        return Err(SelectError::ZeroK);
    }
    let scorer = registry.get(&cfg.scorer_id)?;
    let mut scored: Vec<(&PoolEntry, f64)> = pool
        .entries
        .iter()
        .filter(|e| exclude_id.map_or(true, |x| e.id != x))
        .map(|e| (e, scorer.score(test_question, &e.question)))
        .collect();
    scored.sort_by(|(ea, sa), (eb, sb)| {
        sb.partial_cmp(sa)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then_with(|| ea.id.cmp(&eb.id))
    });
    let mut out: Vec<(&PoolEntry, f64)> = Vec::with_capacity(cfg.k);
    let mut used_sources: BTreeSet<&str> = BTreeSet::new();
    for (entry, score) in scored {
        if cfg.require_distinct_source && !used_sources.insert(entry.source_db.as_str()) {
            continue;
        }
        out.push((entry, score));
        if out.len() == cfg.k {
            return Ok(out);
        }
    }
    Err(SelectError::PoolTooSmall { needed: cfg.k, available: out.len() })
}

/// Downstream text-to-SQL prompt layout. Versioned so recorded runs stay
/// comparable when the wording changes.
pub const DOWNSTREAM_PROMPT_VERSION: &str = "v1";

/// Renders the downstream prompt: schema block, retrieved examples in order,
/// then the test question. Zero examples renders a zero-shot prompt.
pub fn assemble_prompt(
    test_question: &str,
    target_schema_text: &str,
    examples: &[(&PoolEntry, f64)],
) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "-- text-to-sql prompt {DOWNSTREAM_PROMPT_VERSION}\n### Schema\n{target_schema_text}\n"
    ));
    for (i, (entry, _)) in examples.iter().enumerate() {
        out.push_str(&format!(
            "### Example {}\nQuestion: {}\nSQL: {}\n",
            i + 1,
            entry.question,
            entry.sql
        ));
    }
    out.push_str(&format!("### Task\nQuestion: {test_question}\nSQL:\n"));
    out
}

/// Parses an assembled prompt back into (schema text, example pairs, test
/// question). Inverse of `assemble_prompt`; used as a round-trip oracle.
pub fn parse_assembled_prompt(prompt: &str) -> Option<(String, Vec<(String, String)>, String)> {
    let rest = prompt.strip_prefix(&format!(
        "-- text-to-sql prompt {DOWNSTREAM_PROMPT_VERSION}\n### Schema\n"
    ))?;
    let mut blocks: Vec<&str> = rest.split("### ").collect();
    let schema = blocks.remove(0).trim_end_matches('\n').to_string();
    let mut examples = Vec::new();
    let mut question = None;
    for block in blocks {
        if let Some(body) = block.strip_prefix("Task\n") {
            let q = body.strip_prefix("Question: ")?;
            let q = q.strip_suffix("\nSQL:\n").unwrap_or(q);
            question = Some(q.to_string());
        } else if block.starts_with("Example ") {
            let body = block.splitn(2, '\n').nth(1)?;
            let q_line = body.lines().next()?.strip_prefix("Question: ")?;
            let s_line = body.lines().nth(1)?.strip_prefix("SQL: ")?;
            examples.push((q_line.to_string(), s_line.to_string()));
        }
    }
    Some((schema, examples, question?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn entry(id: &str, question: &str, source_db: &str, exec: bool, sem: bool) -> PoolEntry {
        PoolEntry {
            id: id.to_string(),
            question: question.to_string(),
            sql: format!("SELECT 1 -- {id}"),
            source_db: source_db.to_string(),
            target_db: "tgt".to_string(),
            passed_execution: exec,
            passed_semantic: sem,
        }
    }

    fn pool() -> ExamplePool {
        ExamplePool {
            entries: vec![
                entry("a", "how many clients are there", "db1", true, true),
                entry("b", "how many atoms are there", "db1", true, false),
                entry("c", "total number of races held", "db2", false, true),
                entry("d", "list the names of all bonds", "db3", true, true),
            ],
        }
    }

    #[test]
    fn filters_commute_and_intersect() {
        let p = pool();
        let both = filter_pool(&p, true, true);
        let exec_then_sem = filter_pool(&filter_pool(&p, true, false), false, true);
        let sem_then_exec = filter_pool(&filter_pool(&p, false, true), true, false);
        assert_eq!(both, exec_then_sem);
        assert_eq!(both, sem_then_exec);
        assert_eq!(both.entries.len(), 2);
        assert_eq!(filter_pool(&p, false, false), p);
    }

    #[test]
    fn jaccard_edges() {
        assert_eq!(jaccard_similarity("How many clients?", "how many clients"), 1.0);
        assert_eq!(jaccard_similarity("alpha beta", "gamma delta"), 0.0);
        let s = jaccard_similarity("a b c", "a b d");
        assert!((s - 0.5).abs() < 1e-12);
    }

    #[test]
    fn retrieve_top_k_and_ties() {
        let p = pool();
        let reg = ScorerRegistry::with_defaults();
        let cfg = RetrievalConfig {
            k: 1,
            strategy: RetrievalStrategy::Mapped,
            require_distinct_source: false,
            scorer_id: "jaccard".to_string(),
        };
        let got = retrieve("how many clients are there", &p, &cfg, &reg, None).unwrap();
        assert_eq!(got[0].0.id, "a");
    }

    #[test]
    fn distinct_source_constraint() {
        let p = pool();
        let reg = ScorerRegistry::with_defaults();
        let cfg = RetrievalConfig {
            k: 3,
            strategy: RetrievalStrategy::Mapped,
            require_distinct_source: true,
            scorer_id: "jaccard".to_string(),
        };
        let got = retrieve("how many things are there", &p, &cfg, &reg, None).unwrap();
        let sources: BTreeSet<&str> = got.iter().map(|(e, _)| e.source_db.as_str()).collect();
        assert_eq!(sources.len(), 3);
    }

    #[test]
    fn pool_too_small() {
        let p = pool();
        let reg = ScorerRegistry::with_defaults();
        let cfg = RetrievalConfig {
            k: 9,
            strategy: RetrievalStrategy::Mapped,
            require_distinct_source: false,
            scorer_id: "jaccard".to_string(),
        };
        assert!(matches!(
            retrieve("anything", &p, &cfg, &reg, None),
            Err(SelectError::PoolTooSmall { needed: 9, available: 4 })
        ));
    }

    #[test]
    fn unknown_scorer_rejected() {
        let p = pool();
        let reg = ScorerRegistry::with_defaults();
        let cfg = RetrievalConfig {
            k: 1,
            strategy: RetrievalStrategy::Mapped,
            require_distinct_source: false,
            scorer_id: "embedding-9000".to_string(),
        };
        assert!(matches!(
            retrieve("q", &p, &cfg, &reg, None),
            Err(SelectError::UnknownScorer(_))
        ));
    }

    #[test]
    fn exclusion_drops_test_instance() {
        let p = pool();
        let reg = ScorerRegistry::with_defaults();
        let cfg = RetrievalConfig {
            k: 1,
            strategy: RetrievalStrategy::Mapped,
            require_distinct_source: false,
            scorer_id: "jaccard".to_string(),
        };
        let got = retrieve("how many clients are there", &p, &cfg, &reg, Some("a")).unwrap();
        assert_ne!(got[0].0.id, "a");
    }

    #[test]
    fn prompt_round_trip() {
        let p = pool();
        let reg = ScorerRegistry::with_defaults();
        let cfg = RetrievalConfig {
            k: 2,
            strategy: RetrievalStrategy::Mapped,
            require_distinct_source: false,
            scorer_id: "jaccard".to_string(),
        };
        let examples = retrieve("how many clients are there", &p, &cfg, &reg, None).unwrap();
        let prompt = assemble_prompt("how many clients are there", "CREATE TABLE t (a)", &examples);
        let (schema, exs, q) = parse_assembled_prompt(&prompt).unwrap();
        assert_eq!(schema, "CREATE TABLE t (a)");
        assert_eq!(exs.len(), 2);
        assert_eq!(exs[0].0, examples[0].0.question);
        assert_eq!(q, "how many clients are there");
    }

    #[test]
    fn zero_shot_prompt() {
        let prompt = assemble_prompt("q?", "schema", &[]);
        let (schema, exs, q) = parse_assembled_prompt(&prompt).unwrap();
        assert_eq!(schema, "schema");
        assert!(exs.is_empty());
        assert_eq!(q, "q?");
    }
}
