//! Pipeline crate: dataset and database IO, mapping-prompt construction,
//! LLM backends, mapping orchestration, evaluation, and the CLI plumbing.
//! Pure structural computation lives in `sqlshift-core`.

pub mod backend;
pub mod cli;
pub mod eval;
pub mod mapper;
pub mod prompting;
pub mod schema_io;
