//! Alignment skeletons: alias-free query abstractions used for structural
//! comparison. Two queries are structurally aligned iff their skeletons are
//! equal token for token.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::token::{classify_roles, fold_ident, SqlTokenStream, TokenKind, TokenRole};

/// One token of an alignment skeleton. Identifier, literal, and comparison
/// detail is collapsed to placeholders; keywords, function names, and
/// punctuation survive verbatim.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SkelToken {
    /// Table reference; `Some(n)` only in numbered strict mode.
    Table(Option<u32>),
    Column(Option<u32>),
    Const(Option<u32>),
    /// Any of = < > <= >= != <>.
    Cmp,
    Keyword(String),
    Func(String),
    Op(String),
    Punct(String),
}

impl fmt::Display for SkelToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SkelToken::Table(None) => write!(f, "TABLE"),
            SkelToken::Table(Some(n)) => write!(f, "TABLE{n}"),
            SkelToken::Column(None) => write!(f, "COLUMN"),
            SkelToken::Column(Some(n)) => write!(f, "COLUMN{n}"),
            SkelToken::Const(None) => write!(f, "CONST"),
            SkelToken::Const(Some(n)) => write!(f, "CONST{n}"),
            SkelToken::Cmp => write!(f, "CMP"),
            SkelToken::Keyword(s) | SkelToken::Func(s) | SkelToken::Op(s) | SkelToken::Punct(s) => {
                write!(f, "{s}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentSkeleton {
    pub tokens: Vec<SkelToken>,
}

impl AlignmentSkeleton {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&format!("{t}"));
        }
        out
    }
}

/// Comparison operators collapsed to the CMP placeholder. LIKE/IN/BETWEEN are
/// keywords and stay visible in the skeleton.
pub const CMP_OPERATORS: &[&str] = &["=", "<", ">", "<=", ">=", "!=", "<>"];

fn is_cmp(text: &str) -> bool {
    CMP_OPERATORS.contains(&text)
}

/// Recognizes rendered placeholder words so that re-extracting a rendered
/// skeleton is a fixpoint. Matches exact upper-case forms only.
fn parse_placeholder(text: &str) -> Option<SkelToken> {
    let (head, digits) = match text.find(|c: char| c.is_ascii_digit()) {
        Some(pos) => (&text[..pos], &text[pos..]),
        None => (text, ""),
    };
    let num: Option<u32> = if digits.is_empty() {
        None
    } else {
        digits.parse().ok()
    };
    if !digits.is_empty() && num.is_none() {
        return None;
    }
    match head {
        "TABLE" => Some(SkelToken::Table(num)),
        "COLUMN" => Some(SkelToken::Column(num)),
        "CONST" => Some(SkelToken::Const(num)),
        "CMP" if num.is_none() => Some(SkelToken::Cmp),
        _ => None,
    }
}

/// Extracts the default (unnumbered) alignment skeleton: all table references
/// collapse to one placeholder, likewise columns, constants, and comparison
/// operators; `AS alias` pairs are dropped.
pub fn extract_alignment_skeleton(stream: &SqlTokenStream) -> AlignmentSkeleton {
    extract(stream, false)
}

/// Strict variant that numbers placeholders by identifier identity, so
/// repeated-reference structure (e.g. a self-join on the same column) must
/// match for alignment.
pub fn extract_alignment_skeleton_numbered(stream: &SqlTokenStream) -> AlignmentSkeleton {
    extract(stream, true)
}

fn extract(stream: &SqlTokenStream, numbered: bool) -> AlignmentSkeleton {
    let roles = classify_roles(stream);
    let mut tokens = Vec::new();
    let mut table_ids: Vec<String> = Vec::new();
    let mut column_ids: Vec<String> = Vec::new();
    let mut const_ids: Vec<String> = Vec::new();
    let number = |pool: &mut Vec<String>, key: String, numbered: bool| -> Option<u32> {
        if !numbered {
            return None;
        }
        if let Some(pos) = pool.iter().position(|k| *k == key) {
            return Some(pos as u32 + 1);
        }
        pool.push(key);
        Some(pool.len() as u32)
    };
    let mut i = 0;
    let toks = &stream.tokens;
    while i < toks.len() {
        let tok = &toks[i];
        // Drop "AS alias" pairs entirely.
        if tok.kind == TokenKind::Keyword
            && tok.text == "AS"
            && i + 1 < toks.len()
            && roles[i + 1] == TokenRole::Alias
        {
            i += 2;
            continue;
        }
        match tok.kind {
            TokenKind::Identifier | TokenKind::QualifiedIdentifier => {
                if let Some(ph) = parse_placeholder(&tok.text) {
                    tokens.push(ph);
                } else if roles[i] == TokenRole::Table {
                    let n = number(&mut table_ids, fold_ident(&tok.text), numbered);
                    tokens.push(SkelToken::Table(n));
                } else {
                    // Qualified column references drop the dot and prefix.
                    let name = tok.text.rsplit('.').next().unwrap_or(&tok.text);
                    let n = number(&mut column_ids, fold_ident(name), numbered);
                    tokens.push(SkelToken::Column(n));
                }
            }
            TokenKind::StringLiteral | TokenKind::NumericLiteral => {
                let n = number(&mut const_ids, tok.text.clone(), numbered);
                tokens.push(SkelToken::Const(n));
            }
            TokenKind::Operator => {
                if is_cmp(&tok.text) {
                    tokens.push(SkelToken::Cmp);
                } else {
                    tokens.push(SkelToken::Op(tok.text.clone()));
                }
            }
            TokenKind::Keyword => {
                if let Some(ph) = parse_placeholder(&tok.text) {
                    tokens.push(ph);
                } else {
                    tokens.push(SkelToken::Keyword(tok.text.clone()));
                }
            }
            TokenKind::FuncName => tokens.push(SkelToken::Func(tok.text.clone())),
            TokenKind::Punct => tokens.push(SkelToken::Punct(tok.text.clone())),
        }
        i += 1;
    }
    AlignmentSkeleton { tokens }
}

/// True iff both skeletons are token-for-token equal.
pub fn structural_alignment(src: &AlignmentSkeleton, tgt: &AlignmentSkeleton) -> bool {
    src.tokens == tgt.tokens
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::token::tokenize;

    fn skel(sql: &str) -> AlignmentSkeleton {
        extract_alignment_skeleton(&tokenize(sql).unwrap())
    }

    #[test]
    fn literal_only_projection() {
        assert_eq!(skel("SELECT 1").render(), "SELECT CONST");
    }

    #[test]
    fn shared_skeleton_across_schemas() {
        let q1 = "SELECT COUNT(*) FROM client JOIN district ON client.district_id = district.district_id WHERE district.A2 = 'Vsetin'";
        let q2 = "SELECT COUNT(*) FROM atom JOIN molecule ON atom.molecule_id = molecule.molecule_id WHERE molecule.label = '+'";
        assert_eq!(skel(q1), skel(q2));
        assert_eq!(
            skel(q1).render(),
            "SELECT COUNT ( * ) FROM TABLE JOIN TABLE ON COLUMN CMP COLUMN WHERE COLUMN CMP CONST"
        );
    }

    #[test]
    fn aliases_removed() {
        let with_alias = "SELECT T1.a FROM t AS T1 WHERE T1.b = 1";
        let without = "SELECT a FROM t WHERE b = 1";
        assert_eq!(skel(with_alias), skel(without));
    }

    #[test]
    fn comparison_operators_collapse() {
        assert_eq!(skel("SELECT a FROM t WHERE b < 5"), skel("SELECT a FROM t WHERE b != 9"));
        // LIKE is a keyword, not a normalized comparison.
        assert_ne!(skel("SELECT a FROM t WHERE b = 'x'"), skel("SELECT a FROM t WHERE b LIKE 'x'"));
    }

    #[test]
    fn idempotent_on_rendering() {
        let queries = [
            "SELECT COUNT(*) FROM a JOIN b ON a.x = b.y WHERE b.z = 'w'",
            "SELECT a, SUM(b) FROM t GROUP BY a HAVING SUM(b) > 10 ORDER BY a DESC LIMIT 3",
            "SELECT x FROM t WHERE y IN (SELECT y FROM u WHERE z <> 2)",
        ];
        for sql in queries {
            let s1 = skel(sql);
            let s2 = skel(&s1.render());
            assert_eq!(s1, s2, "not idempotent for {sql}");
        }
    }

    #[test]
    fn numbered_mode_distinguishes_repeats() {
        let a = tokenize("SELECT x FROM t WHERE a = b").unwrap();
        let b = tokenize("SELECT x FROM t WHERE a = a").unwrap();
        assert_eq!(extract_alignment_skeleton(&a), extract_alignment_skeleton(&b));
        assert_ne!(
            extract_alignment_skeleton_numbered(&a),
            extract_alignment_skeleton_numbered(&b)
        );
    }

    #[test]
    fn no_raw_identifier_text_survives() {
        let s = skel("SELECT secret_col FROM secret_table WHERE x = 'secret_value'");
        let rendered = s.render();
        assert!(!rendered.contains("secret"));
    }
}
