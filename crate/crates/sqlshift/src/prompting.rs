//! Structured mapping prompt construction and response parsing.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::schema_io::DatasetEntry;

pub const DEFAULT_MAX_BATCH: usize = 20;

/// One-shot demonstration pair embedded in every mapping prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Demonstration {
    pub source_schema: String,
    pub target_schema: String,
    pub source_question: String,
    pub source_sql: String,
    pub template: String,
    pub target_question: String,
    pub target_sql: String,
}

impl Demonstration {
    /// The built-in two-table demonstration, overridable via config.
    pub fn builtin() -> Self {
        serde_json::from_str(include_str!("../assets/demo_example.json"))
            .expect("built-in demonstration is valid")
    }

    fn render(&self) -> String {
        let output = serde_json::json!([{
            "tables_columns_replacement": self.template,
            "thought_process": "Replace each placeholder with a table or column from the target schema that plays the same role, pick a fresh constant from the sample data, then phrase the question for the new query.",
            "question": self.target_question,
            "sql": self.target_sql,
        }]);
        format!(
            "Source schema:\n{}Target schema:\n{}Source query: {{{}, {}}}\nOutput:\n{}",
            self.source_schema,
            self.target_schema,
            self.source_question,
            self.source_sql,
            serde_json::to_string(&output).expect("demo output serializes"),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingPrompt {
    pub system_text: String,
    pub instruction_text: String,
    pub demonstration: String,
    pub source_schema_text: String,
    pub target_schema_text: String,
    pub target_sample_text: String,
    pub batch: Vec<(String, String, String)>,
    pub rendered: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PromptError {
    #[error("batch is empty")]
    EmptyBatch,
    #[error("batch of {got} exceeds the maximum of {max}")]
    BatchTooLarge { got: usize, max: usize },
}

const SYSTEM_TEXT: &str = "You are an expert in areas of database design and SQL queries and your job is to swap tables and columns from a query to generate a new query, and new question based on the target schema.";

const INSTRUCTION_TEXT: &str = r#"- The output must be in a valid JSON format.
- For each Source query, there must be a corresponding output in the output array.
- First, create tables_columns_replacement by replacing all table names, column names, and constant values in the source query with placeholders: "table", "column", "constant_value".
- Then, perform the following steps and give your thought process (in not more than 5 sentences) for each step:
  1: Generate a new query from tables_columns_replacement.
    1.1: Use Target schema to replace table and column names that make sense in terms of query.
    1.2: For constant values in tables_columns_replacement:
      - Use meaningful values from the target schema sample data.
      - Do not reuse constant values from the "source_query".
      - Ensure that numerical constant values differ from those in the "source_query".
  2: Generate a new question based on the query that you just generated."#;

/// Builds the structured mapping prompt: system text, instructions,
/// demonstration, schemas, sample data, source query batch, output marker.
pub fn build_prompt(
    source_schema_text: &str,
    target_schema_text: &str,
    target_sample_text: &str,
    batch: &[DatasetEntry],
    demo: &Demonstration,
    max_batch: usize,
) -> Result<MappingPrompt, PromptError> {
    if batch.is_empty() {
        return Err(PromptError::EmptyBatch);
    }
    if batch.len() > max_batch {
        return Err(PromptError::BatchTooLarge { got: batch.len(), max: max_batch });
    }
    let demonstration = demo.render();
    let mut queries = String::new();
    for (i, entry) in batch.iter().enumerate() {
        queries.push_str(&format!(
            "[{n}] Question: {q}\n[{n}] SQL: {s}\n",
            n = i + 1,
            q = entry.question,
            s = entry.gold_sql
        ));
    }
    let rendered = format!(
        "## System prompt: {SYSTEM_TEXT}\n\n\
         ## Instructions:\n{INSTRUCTION_TEXT}\n\n\
         ## Example:\n{demonstration}\n\n\
         ## Generate the query for the following query:\n\
         # Source schema:\n{source_schema_text}\
         # Target schema:\n{target_schema_text}\
         # Target sample data:\n{target_sample_text}\
         # Source query:\n{queries}\
         # Output:\n"
    );
    Ok(MappingPrompt {
        system_text: SYSTEM_TEXT.to_string(),
        instruction_text: INSTRUCTION_TEXT.to_string(),
        demonstration,
        source_schema_text: source_schema_text.to_string(),
        target_schema_text: target_schema_text.to_string(),
        target_sample_text: target_sample_text.to_string(),
        batch: batch
            .iter()
            .map(|e| (e.id.clone(), e.question.clone(), e.gold_sql.clone()))
            .collect(),
        rendered,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputStatus {
    #[serde(rename = "MAPPED")]
    Mapped,
    #[serde(rename = "NULL_REFUSAL")]
    NullRefusal,
    #[serde(rename = "PARSE_FAILURE")]
    ParseFailure,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappedOutput {
    pub entry_id: String,
    pub status: OutputStatus,
    pub template_text: String,
    pub thought: String,
    pub question: String,
    pub sql: String,
    pub raw: String,
}

impl MappedOutput {
    fn parse_failure(entry_id: &str, raw: &str) -> Self {
        MappedOutput {
            entry_id: entry_id.to_string(),
            status: OutputStatus::ParseFailure,
            template_text: String::new(),
            thought: String::new(),
            question: String::new(),
            sql: String::new(),
            raw: raw.to_string(),
        }
    }
}

/// Strips markdown code fences and surrounding prose, keeping the outermost
/// JSON array.
fn extract_json_array(raw: &str) -> Option<&str> {
    let start = raw.find('[')?;
    let end = raw.rfind(']')?;
    if end < start {
        return None;
    }
    Some(&raw[start..=end])
}

fn field<'v>(obj: &'v Value, name: &str) -> Option<&'v str> {
    obj.get(name).and_then(Value::as_str)
}

/// Total parse: every expected id yields exactly one output. Null elements
/// become NULL_REFUSAL; anything unusable becomes PARSE_FAILURE with the raw
/// text preserved. Surplus elements are dropped with a logged warning.
pub fn parse_response(raw: &str, expected_ids: &[String]) -> Vec<MappedOutput> {
    let elements: Option<Vec<Value>> = extract_json_array(raw)
        .and_then(|s| serde_json::from_str::<Value>(s).ok())
        .and_then(|v| match v {
            Value::Array(a) => Some(a),
            _ => None,
        });
    let Some(elements) = elements else {
        return expected_ids
            .iter()
            .map(|id| MappedOutput::parse_failure(id, raw))
            .collect();
    };
    if elements.len() > expected_ids.len() {
        log::warn!(
            "response has {} elements for {} expected queries; surplus ignored",
            elements.len(),
            expected_ids.len()
        );
    }
    expected_ids
        .iter()
        .enumerate()
        .map(|(i, id)| match elements.get(i) {
            Some(Value::Null) => MappedOutput {
                entry_id: id.clone(),
                status: OutputStatus::NullRefusal,
                template_text: String::new(),
                thought: String::new(),
                question: String::new(),
                sql: String::new(),
                raw: "null".to_string(),
            },
            Some(obj @ Value::Object(_)) => {
                let question = field(obj, "question").unwrap_or("");
                let sql = field(obj, "sql").unwrap_or("");
                if question.is_empty() || sql.is_empty() {
                    MappedOutput::parse_failure(id, &obj.to_string())
                } else {
                    MappedOutput {
                        entry_id: id.clone(),
                        status: OutputStatus::Mapped,
                        template_text: field(obj, "tables_columns_replacement")
                            .unwrap_or("")
                            .to_string(),
                        thought: field(obj, "thought_process").unwrap_or("").to_string(),
                        question: question.to_string(),
                        sql: sql.to_string(),
                        raw: obj.to_string(),
                    }
                }
            }
            Some(other) => MappedOutput::parse_failure(id, &other.to_string()),
            None => MappedOutput::parse_failure(id, raw),
        })
        .collect()
}

/// Renders a well-formed response for a list of outputs; None renders an
/// explicit null element. Inverse of `parse_response` for round-trip checks
/// and the mock backend.
pub fn render_synthetic_response(outputs: &[Option<(String, String, String, String)>]) -> String {
    let array: Vec<Value> = outputs
        .iter()
        .map(|o| match o {
            None => Value::Null,
            Some((template, thought, question, sql)) => serde_json::json!({
                "tables_columns_replacement": template,
                "thought_process": thought,
                "question": question,
                "sql": sql,
            }),
        })
        .collect();
    serde_json::to_string(&Value::Array(array)).expect("synthetic response serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema_io::Split;

    fn entry(id: &str, q: &str, sql: &str) -> DatasetEntry {
        DatasetEntry {
            id: id.to_string(),
            question: q.to_string(),
            gold_sql: sql.to_string(),
            db_id: "src".to_string(),
            split: Split::Train,
        }
    }

    #[test]
    fn prompt_contains_each_query_once_and_demo_once() {
        let batch = [entry("train:src:0", "How many rows?", "SELECT COUNT(*) FROM widgets")];
        let demo = Demonstration::builtin();
        let p = build_prompt("src schema\n", "tgt schema\n", "samples\n", &batch, &demo, 20)
            .unwrap();
        assert_eq!(p.rendered.matches("SELECT COUNT(*) FROM widgets").count(), 1);
        assert_eq!(p.rendered.matches(&demo.target_sql).count(), 1);
    }

    #[test]
    fn instruction_steps_present() {
        let batch = [entry("train:src:0", "q", "SELECT 1")];
        let p = build_prompt("s\n", "t\n", "d\n", &batch, &Demonstration::builtin(), 20).unwrap();
        for needle in [
            "  1: Generate a new query from tables_columns_replacement.",
            "    1.1: Use Target schema",
            "    1.2: For constant values",
            "  2: Generate a new question",
            "Do not reuse constant values",
            "The output must be in a valid JSON format",
        ] {
            assert!(p.rendered.contains(needle), "missing: {needle}");
        }
    }

    #[test]
    fn section_order() {
        let batch = [entry("train:src:0", "q", "SELECT 1")];
        let p = build_prompt("SRC_S\n", "TGT_S\n", "TGT_D\n", &batch, &Demonstration::builtin(), 20)
            .unwrap();
        let pos = |needle: &str| p.rendered.find(needle).expect(needle);
        let order = [
            pos("## System prompt:"),
            pos("## Instructions:"),
            pos("## Example:"),
            pos("# Source schema:"),
            pos("# Target schema:"),
            pos("# Target sample data:"),
            pos("# Source query:"),
            pos("# Output:"),
        ];
        assert!(order.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn batch_bounds() {
        let demo = Demonstration::builtin();
        assert_eq!(
            build_prompt("s", "t", "d", &[], &demo, 20),
            Err(PromptError::EmptyBatch)
        );
        let batch: Vec<DatasetEntry> = (0..21)
            .map(|i| entry(&format!("train:src:{i}"), "q", "SELECT 1"))
            .collect();
        assert_eq!(
            build_prompt("s", "t", "d", &batch, &demo, 20),
            Err(PromptError::BatchTooLarge { got: 21, max: 20 })
        );
    }

    #[test]
    fn parse_valid_two_element_array() {
        let raw = r#"```json
[{"tables_columns_replacement":"SELECT column FROM table","thought_process":"swap","question":"Q1","sql":"SELECT a FROM b"},
 {"tables_columns_replacement":"SELECT column FROM table","thought_process":"swap","question":"Q2","sql":"SELECT c FROM d"}]
```"#;
        let ids = vec!["x:1".to_string(), "x:2".to_string()];
        let outs = parse_response(raw, &ids);
        assert_eq!(outs.len(), 2);
        assert!(outs.iter().all(|o| o.status == OutputStatus::Mapped));
        assert_eq!(outs[1].question, "Q2");
        assert_eq!(outs[0].entry_id, "x:1");
    }

    #[test]
    fn null_element_is_refusal() {
        let raw = r#"[null, {"tables_columns_replacement":"t","thought_process":"p","question":"Q","sql":"SELECT 1"}]"#;
        let ids = vec!["a".to_string(), "b".to_string()];
        let outs = parse_response(raw, &ids);
        assert_eq!(outs[0].status, OutputStatus::NullRefusal);
        assert_eq!(outs[1].status, OutputStatus::Mapped);
    }

    #[test]
    fn truncated_json_all_parse_failures_raw_preserved() {
        let raw = r#"[{"question":"Q1","sql":"SELECT"#;
        let ids = vec!["a".to_string(), "b".to_string()];
        let outs = parse_response(raw, &ids);
        assert!(outs.iter().all(|o| o.status == OutputStatus::ParseFailure));
        assert!(outs.iter().all(|o| o.raw == raw));
    }

    #[test]
    fn short_array_pads_with_parse_failures() {
        let raw = r#"[{"question":"Q","sql":"SELECT 1"}]"#;
        let ids = vec!["a".to_string(), "b".to_string()];
        let outs = parse_response(raw, &ids);
        assert_eq!(outs[0].status, OutputStatus::Mapped);
        assert_eq!(outs[1].status, OutputStatus::ParseFailure);
    }

    #[test]
    fn surplus_elements_ignored() {
        let raw = r#"[{"question":"Q","sql":"S"},{"question":"Q2","sql":"S2"}]"#;
        let ids = vec!["a".to_string()];
        let outs = parse_response(raw, &ids);
        assert_eq!(outs.len(), 1);
    }

    #[test]
    fn empty_question_is_parse_failure() {
        let raw = r#"[{"question":"","sql":"SELECT 1"}]"#;
        let outs = parse_response(raw, &["a".to_string()]);
        assert_eq!(outs[0].status, OutputStatus::ParseFailure);
    }

    #[test]
    fn synthetic_round_trip() {
        let outputs = vec![
            Some((
                "SELECT column FROM table".to_string(),
                "swap tables".to_string(),
                "How many?".to_string(),
                "SELECT COUNT(*) FROM x".to_string(),
            )),
            None,
        ];
        let raw = render_synthetic_response(&outputs);
        let ids = vec!["a".to_string(), "b".to_string()];
        let outs = parse_response(&raw, &ids);
        assert_eq!(outs[0].status, OutputStatus::Mapped);
        assert_eq!(outs[0].template_text, "SELECT column FROM table");
        assert_eq!(outs[0].thought, "swap tables");
        assert_eq!(outs[0].question, "How many?");
        assert_eq!(outs[0].sql, "SELECT COUNT(*) FROM x");
        assert_eq!(outs[1].status, OutputStatus::NullRefusal);
    }

    #[test]
    fn parse_totality_on_garbage() {
        for raw in ["", "no json here", "{}", "[1,2,3]", "[\"x\"]"] {
            let ids = vec!["a".to_string(), "b".to_string()];
            assert_eq!(parse_response(raw, &ids).len(), 2, "raw = {raw:?}");
        }
    }
}
