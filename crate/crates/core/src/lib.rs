//! Schema-agnostic SQL structure tooling: lexical tokenization, skeleton and
//! template abstraction, token-level structural diffing, execution-error
//! classification, leakage metrics, and in-context example selection.
//!
//! Everything in this crate is pure computation over owned data; IO, database
//! access, and LLM transport live in the companion `sqlshift` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

#[cfg(feature = "std")]
extern crate std;

pub mod complexity;
pub mod diff;
pub mod exec;
pub mod metrics;
pub mod schema;
pub mod select;
pub mod skeleton;
pub mod template;
pub mod token;

pub use complexity::{classify_complexity, ComplexityClass, ComplexityTier};
pub use diff::{
    classify_buckets, edit_script, replay_script, summarize, Bucket, DiffSummary, EditKind,
    EditRecord, KindCounts,
};
pub use exec::{categorize_error_text, result_yield, ErrorCategory, ExecOutcome, ExecStatus};
pub use metrics::{constant_reuse_counts, join_retained, leakage, LeakageFlags};
pub use schema::{ColumnDef, ForeignKey, SampleData, SchemaDef, SchemaError, TableDef};
pub use select::{
    assemble_prompt, filter_pool, jaccard_similarity, parse_assembled_prompt, retrieve,
    ExamplePool, PoolEntry, RetrievalConfig, RetrievalStrategy, ScorerRegistry, SelectError,
    SimilarityScorer,
};
pub use skeleton::{
    extract_alignment_skeleton, extract_alignment_skeleton_numbered, structural_alignment,
    AlignmentSkeleton, SkelToken,
};
pub use template::{extract_prompt_template, PromptTemplate};
pub use token::{tokenize, LexError, SqlToken, SqlTokenStream, TokenKind};
