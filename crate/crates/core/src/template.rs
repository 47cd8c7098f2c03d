//! Prompt templates: alias-preserving abstractions with numbered placeholders
//! (`table1`, `column2`, `constant_value1`, ...). Unlike alignment skeletons,
//! templates are invertible via their placeholder map.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::token::{classify_roles, fold_ident, SqlToken, SqlTokenStream, TokenKind, TokenRole};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplate {
    /// Token stream with identifiers and literals replaced by placeholders.
    pub tokens: Vec<SqlToken>,
    /// Placeholder name -> original text (verbatim, first occurrence).
    pub placeholder_map: BTreeMap<String, String>,
}

impl PromptTemplate {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&t.text);
        }
        out
    }

    /// Applies the placeholder map, recovering the original token stream.
    pub fn invert(&self) -> Vec<SqlToken> {
        self.tokens
            .iter()
            .map(|tok| match tok.kind {
                TokenKind::Identifier => match self.placeholder_map.get(&tok.text) {
                    Some(orig) => original_token(orig),
                    None => tok.clone(),
                },
                TokenKind::QualifiedIdentifier => {
                    let mut parts: Vec<String> = Vec::new();
                    for part in tok.text.split('.') {
                        match self.placeholder_map.get(part) {
                            Some(orig) => parts.push(orig.clone()),
                            None => parts.push(part.to_string()),
                        }
                    }
                    SqlToken { kind: TokenKind::QualifiedIdentifier, text: parts.join(".") }
                }
                _ => tok.clone(),
            })
            .collect()
    }
}

fn original_token(orig: &str) -> SqlToken {
    let kind = if orig.starts_with('\'') {
        TokenKind::StringLiteral
    } else if orig.starts_with(|c: char| c.is_ascii_digit())
        || (orig.starts_with('.') && orig.len() > 1)
    {
        TokenKind::NumericLiteral
    } else {
        TokenKind::Identifier
    };
    SqlToken { kind, text: orig.to_string() }
}

struct Numbering {
    prefix: &'static str,
    assigned: Vec<(String, String)>, // (fold key, placeholder)
    map: BTreeMap<String, String>,
}

impl Numbering {
    fn new(prefix: &'static str) -> Self {
        Numbering { prefix, assigned: Vec::new(), map: BTreeMap::new() }
    }

    fn placeholder(&mut self, key: String, original: &str) -> String {
        if let Some((_, ph)) = self.assigned.iter().find(|(k, _)| *k == key) {
            return ph.clone();
        }
        let ph = format!("{}{}", self.prefix, self.assigned.len() + 1);
        self.assigned.push((key, ph.clone()));
        self.map.insert(ph.clone(), original.to_string());
        ph
    }
}

/// Replaces table names, column names, and constants with numbered
/// placeholders in first-occurrence order; `AS alias` clauses and alias
/// qualifiers are preserved verbatim.
pub fn extract_prompt_template(stream: &SqlTokenStream) -> PromptTemplate {
    let roles = classify_roles(stream);
    // Aliases keep their surface form; everything else qualified by a
    // non-alias prefix treats the prefix as a table name.
    let aliases: Vec<String> = stream
        .tokens
        .iter()
        .zip(&roles)
        .filter(|(_, r)| **r == TokenRole::Alias)
        .map(|(t, _)| fold_ident(&t.text))
        .collect();

    let mut tables = Numbering::new("table");
    let mut columns = Numbering::new("column");
    let mut constants = Numbering::new("constant_value");
    let mut out = Vec::with_capacity(stream.tokens.len());

    for (i, tok) in stream.tokens.iter().enumerate() {
        let replaced = match tok.kind {
            TokenKind::Identifier => match roles[i] {
                TokenRole::Table => SqlToken {
                    kind: TokenKind::Identifier,
                    text: tables.placeholder(fold_ident(&tok.text), &tok.text),
                },
                TokenRole::Alias => tok.clone(),
                _ => SqlToken {
                    kind: TokenKind::Identifier,
                    text: columns.placeholder(fold_ident(&tok.text), &tok.text),
                },
            },
            TokenKind::QualifiedIdentifier => {
                if roles[i] == TokenRole::Table {
                    SqlToken {
                        kind: TokenKind::Identifier,
                        text: tables.placeholder(fold_ident(&tok.text), &tok.text),
                    }
                } else {
                    let (prefix, name) = match tok.text.rsplit_once('.') {
                        Some(pair) => pair,
                        None => ("", tok.text.as_str()),
                    };
                    let prefix_out = if aliases.contains(&fold_ident(prefix)) {
                        prefix.to_string()
                    } else {
                        tables.placeholder(fold_ident(prefix), prefix)
                    };
                    let name_out = if name == "*" {
                        name.to_string()
                    } else {
                        columns.placeholder(fold_ident(name), name)
                    };
                    SqlToken {
                        kind: TokenKind::QualifiedIdentifier,
                        text: format!("{prefix_out}.{name_out}"),
                    }
                }
            }
            TokenKind::StringLiteral | TokenKind::NumericLiteral => SqlToken {
                kind: TokenKind::Identifier,
                text: constants.placeholder(tok.text.clone(), &tok.text),
            },
            _ => tok.clone(),
        };
        out.push(replaced);
    }

    let mut placeholder_map = tables.map;
    placeholder_map.append(&mut columns.map);
    placeholder_map.append(&mut constants.map);
    PromptTemplate { tokens: out, placeholder_map }
}
