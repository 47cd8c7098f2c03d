//! Query complexity tiers from the count of distinct table and column
//! references.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::token::{classify_roles, fold_ident, SqlTokenStream, TokenKind, TokenRole};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ComplexityTier {
    Simple,
    Moderate,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexityClass {
    pub tier: ComplexityTier,
    pub element_count: usize,
}

fn tier_for(count: usize) -> ComplexityTier {
    match count {
        0..=5 => ComplexityTier::Simple,
        6..=9 => ComplexityTier::Moderate,
        _ => ComplexityTier::Complex,
    }
}

/// Counts distinct table references plus distinct column references,
/// case-folded, with alias qualifiers resolved to the underlying table name
/// where the query text allows. The same column name under two different
/// tables counts twice.
pub fn classify_complexity(stream: &SqlTokenStream) -> ComplexityClass {
    let roles = classify_roles(stream);
    // alias -> table name, from "table AS alias" sequences.
    let mut alias_to_table: Vec<(String, String)> = Vec::new();
    let mut last_table: Option<String> = None;
    for (tok, role) in stream.tokens.iter().zip(&roles) {
        match role {
            TokenRole::Table => last_table = Some(fold_ident(&tok.text)),
            TokenRole::Alias => {
                if let Some(t) = last_table.take() {
                    alias_to_table.push((fold_ident(&tok.text), t));
                }
            }
            _ => {}
        }
    }
    let resolve = |name: &str| -> String {
        let folded = fold_ident(name);
        alias_to_table
            .iter()
            .find(|(a, _)| *a == folded)
            .map(|(_, t)| t.clone())
            .unwrap_or(folded)
    };

    let mut tables: BTreeSet<String> = BTreeSet::new();
    let mut columns: BTreeSet<(String, String)> = BTreeSet::new();
    for (i, tok) in stream.tokens.iter().enumerate() {
        if tok.kind != TokenKind::Identifier && tok.kind != TokenKind::QualifiedIdentifier {
            continue;
        }
        match roles[i] {
            TokenRole::Table => {
                tables.insert(fold_ident(&tok.text));
            }
            TokenRole::Column => match tok.text.rsplit_once('.') {
                Some((prefix, name)) => {
                    if name != "*" {
                        columns.insert((resolve(prefix), fold_ident(name)));
                    }
                }
                None => {
                    columns.insert((String::new(), fold_ident(&tok.text)));
                }
            },
            _ => {}
        }
    }
    let element_count = tables.len() + columns.len();
    ComplexityClass { tier: tier_for(element_count), element_count }
}
