//! Pure mapping-fidelity metrics: join retention and schema-leakage flags.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::schema::SchemaDef;
use crate::token::{classify_roles, fold_ident, unquote, SqlTokenStream, TokenKind, TokenRole};

/// None when the source query has no JOIN (excluded from the retention
/// denominator); otherwise whether the target kept one.
pub fn join_retained(src: &SqlTokenStream, tgt: &SqlTokenStream) -> Option<bool> {
    let has_join = |s: &SqlTokenStream| {
        s.tokens
            .iter()
            .any(|t| t.kind == TokenKind::Keyword && t.text == "JOIN")
    };
    if !has_join(src) {
        return None;
    }
    Some(has_join(tgt))
}

/// Per-record schema-leakage flags. `constant_reuse` is None when the source
/// query carries no non-trivial literal (ineligible record).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeakageFlags {
    pub table_reuse: bool,
    pub column_reuse: bool,
    pub constant_reuse: Option<bool>,
}

/// Literal values too generic to signal copying.
fn is_trivial_literal(content: &str) -> bool {
    matches!(content, "0" | "1" | "" | "NULL" | "null")
}

/// Literal token content with string quotes stripped.
fn literal_content(text: &str) -> String {
    if text.starts_with('\'') && text.ends_with('\'') && text.len() >= 2 {
        text[1..text.len() - 1].replace("''", "'")
    } else {
        String::from(text)
    }
}

fn referenced_tables(stream: &SqlTokenStream) -> BTreeSet<String> {
    let roles = classify_roles(stream);
    stream
        .tokens
        .iter()
        .zip(&roles)
        .filter(|(t, r)| {
            **r == TokenRole::Table
                && matches!(t.kind, TokenKind::Identifier | TokenKind::QualifiedIdentifier)
        })
        .map(|(t, _)| fold_ident(&t.text))
        .collect()
}

fn referenced_columns(stream: &SqlTokenStream) -> BTreeSet<String> {
    let roles = classify_roles(stream);
    let mut out = BTreeSet::new();
    for (t, r) in stream.tokens.iter().zip(&roles) {
        if *r != TokenRole::Column {
            continue;
        }
        let name = t.text.rsplit('.').next().unwrap_or(&t.text);
        if name != "*" {
            out.insert(fold_ident(unquote(name)));
        }
    }
    out
}

fn nontrivial_literals(stream: &SqlTokenStream) -> BTreeSet<String> {
    stream
        .tokens
        .iter()
        .filter(|t| matches!(t.kind, TokenKind::StringLiteral | TokenKind::NumericLiteral))
        .map(|t| literal_content(&t.text))
        .filter(|c| !is_trivial_literal(c))
        .collect()
}

/// Per-constant reuse counts: (reused, total) over the source query's
/// non-trivial literals. None when the source has none.
pub fn constant_reuse_counts(
    src_sql: &SqlTokenStream,
    tgt_sql: &SqlTokenStream,
) -> Option<(usize, usize)> {
    let src_lits = nontrivial_literals(src_sql);
    if src_lits.is_empty() {
        return None;
    }
    let tgt_lits: BTreeSet<String> = tgt_sql
        .tokens
        .iter()
        .filter(|t| matches!(t.kind, TokenKind::StringLiteral | TokenKind::NumericLiteral))
        .map(|t| literal_content(&t.text))
        .collect();
    let reused = src_lits.iter().filter(|l| tgt_lits.contains(*l)).count();
    Some((reused, src_lits.len()))
}

/// Flags copying of source-schema tables/columns that are invalid in the
/// target schema, and reuse of source-query constants. Identifiers that
/// legitimately exist in the target schema never count as leakage.
pub fn leakage(
    src_sql: &SqlTokenStream,
    tgt_sql: &SqlTokenStream,
    src_schema: &SchemaDef,
    tgt_schema: &SchemaDef,
) -> LeakageFlags {
    let src_tables = src_schema.table_names();
    let tgt_tables = tgt_schema.table_names();
    let src_columns = src_schema.column_names();
    let tgt_columns = tgt_schema.column_names();

    let table_reuse = referenced_tables(tgt_sql)
        .iter()
        .any(|t| src_tables.contains(t) && !tgt_tables.contains(t));
    let column_reuse = referenced_columns(tgt_sql)
        .iter()
        .any(|c| src_columns.contains(c) && !tgt_columns.contains(c));

    let src_lits = nontrivial_literals(src_sql);
    let constant_reuse = if src_lits.is_empty() {
        None
    } else {
        let tgt_lits: Vec<String> = tgt_sql
            .tokens
            .iter()
            .filter(|t| matches!(t.kind, TokenKind::StringLiteral | TokenKind::NumericLiteral))
            .map(|t| literal_content(&t.text))
            .collect();
        Some(tgt_lits.iter().any(|l| src_lits.contains(l)))
    };

    LeakageFlags { table_reuse, column_reuse, constant_reuse }
}
