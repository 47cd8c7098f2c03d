//! Lexical SQL tokenizer.
//!
//! This is deliberately not a grammar parser: downstream structural analysis
//! (skeletons, templates, diffs) only needs a stable token stream with
//! keywords, identifiers, literals, and operators told apart. The embedded
//! database engine remains the semantic authority for whether a query runs.

use alloc::borrow::ToOwned;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Keyword,
    Identifier,
    QualifiedIdentifier,
    StringLiteral,
    NumericLiteral,
    Operator,
    Punct,
    FuncName,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SqlToken {
    pub kind: TokenKind,
    pub text: String,
}

impl SqlToken {
    fn new(kind: TokenKind, text: impl Into<String>) -> Self {
        SqlToken { kind, text: text.into() }
    }
}

/// Normalized token sequence of one SQL statement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SqlTokenStream {
    pub tokens: Vec<SqlToken>,
    pub source_text: String,
}

impl SqlTokenStream {
    /// Token texts joined with single spaces. Re-tokenizing the result yields
    /// an equal token list (round-trip stability).
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
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexError {
    /// Unterminated single-quoted string literal; carries the byte offset of
    /// the opening quote.
    UnterminatedString(usize),
    /// Unterminated quoted identifier (double quote, backtick, or bracket).
    UnterminatedIdentifier(usize),
    EmptyInput,
}

impl fmt::Display for LexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LexError::UnterminatedString(at) => {
                write!(f, "unterminated string literal starting at byte {at}")
            }
            LexError::UnterminatedIdentifier(at) => {
                write!(f, "unterminated quoted identifier starting at byte {at}")
            }
            LexError::EmptyInput => write!(f, "empty SQL input"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for LexError {}

/// SQL keywords recognized by the lexer, matched case-insensitively and
/// emitted upper-cased. Aggregate function names are intentionally absent:
/// they are classified as `FuncName` when a parenthesis follows.
pub const KEYWORDS: &[&str] = &[
    "ALL", "AND", "AS", "ASC", "BETWEEN", "BY", "CASE", "CAST", "COLLATE", "CROSS",
    "CURRENT_DATE", "CURRENT_TIME", "CURRENT_TIMESTAMP", "DELETE", "DESC", "DISTINCT", "ELSE",
    "END", "ESCAPE", "EXCEPT", "EXISTS", "FROM", "FULL", "GLOB", "GROUP", "HAVING", "IN",
    "INNER", "INSERT", "INTERSECT", "INTO", "IS", "JOIN", "LEFT", "LIKE", "LIMIT", "NATURAL",
    "NOT", "NULL", "OFFSET", "ON", "OR", "ORDER", "OUTER", "RECURSIVE", "RIGHT", "SELECT",
    "SET", "THEN", "UNION", "UPDATE", "USING", "VALUES", "WHEN", "WHERE", "WITH",
];

/// Aggregate function names; used for `FuncName` classification here and for
/// the AGG_FUNC diff bucket.
pub const AGG_FUNCS: &[&str] = &["COUNT", "SUM", "AVG", "MIN", "MAX", "TOTAL"];

fn is_keyword(upper: &str) -> bool {
    KEYWORDS.binary_search(&upper).is_ok()
}

pub fn is_agg_func(upper: &str) -> bool {
    AGG_FUNCS.contains(&upper)
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

pub fn tokenize(sql: &str) -> Result<SqlTokenStream, LexError> {
    if sql.trim().is_empty() {
        return Err(LexError::EmptyInput);
    }
    let chars: Vec<char> = sql.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0usize;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '\'' {
            let (text, next) = scan_string(&chars, i)?;
            tokens.push(SqlToken::new(TokenKind::StringLiteral, text));
            i = next;
            continue;
        }
        if c == '"' || c == '`' || c == '[' {
            let (text, next) = scan_quoted_ident(&chars, i)?;
            i = next;
            // May be the head of a qualified reference.
            let (full, next, qualified) = scan_qualification(&chars, i, text)?;
            i = next;
            tokens.push(ident_token(full, qualified, peek_paren(&chars, i)));
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && i + 1 < chars.len() && chars[i + 1].is_ascii_digit())
        {
            let (text, next) = scan_number(&chars, i);
            tokens.push(SqlToken::new(TokenKind::NumericLiteral, text));
            i = next;
            continue;
        }
        if is_ident_start(c) {
            let (word, next) = scan_word(&chars, i);
            i = next;
            let upper = to_upper(&word);
            if is_keyword(&upper) {
                tokens.push(SqlToken::new(TokenKind::Keyword, upper));
                continue;
            }
            let (full, next, qualified) = scan_qualification(&chars, i, word)?;
            i = next;
            tokens.push(ident_token(full, qualified, peek_paren(&chars, i)));
            continue;
        }
        // Operators and punctuation.
        let two: Option<String> = if i + 1 < chars.len() {
            let mut s = String::new();
            s.push(c);
            s.push(chars[i + 1]);
            Some(s)
        } else {
            None
        };
        if let Some(two) = two {
            if matches!(two.as_str(), "<=" | ">=" | "<>" | "!=" | "==" | "||") {
                tokens.push(SqlToken::new(TokenKind::Operator, two));
                i += 2;
                continue;
            }
        }
        match c {
            '=' | '<' | '>' | '+' | '-' | '/' | '%' => {
                tokens.push(SqlToken::new(TokenKind::Operator, c.to_string()));
            }
            '(' | ')' | ',' | ';' | '*' | '.' => {
                tokens.push(SqlToken::new(TokenKind::Punct, c.to_string()));
            }
            other => {
                // Unknown symbols pass through as punctuation rather than
                // failing the whole statement.
                tokens.push(SqlToken::new(TokenKind::Punct, other.to_string()));
            }
        }
        i += 1;
    }
    Ok(SqlTokenStream { tokens, source_text: sql.to_owned() })
}

fn to_upper(s: &str) -> String {
    s.chars().flat_map(|c| c.to_uppercase()).collect()
}

fn ident_token(text: String, qualified: bool, func_follows: bool) -> SqlToken {
    if qualified {
        return SqlToken::new(TokenKind::QualifiedIdentifier, text);
    }
    if func_follows {
        return SqlToken::new(TokenKind::FuncName, to_upper(&text));
    }
    SqlToken::new(TokenKind::Identifier, text)
}

/// True when the next non-whitespace char is an opening parenthesis, which
/// marks the preceding word as a function-call name.
fn peek_paren(chars: &[char], mut i: usize) -> bool {
    while i < chars.len() && chars[i].is_whitespace() {
        i += 1;
    }
    i < chars.len() && chars[i] == '('
}

/// Consumes `.part` suffixes after an identifier head, producing a dotted
/// reference such as `T1.zip_code` or `T1.*` as one token.
fn scan_qualification(
    chars: &[char],
    mut i: usize,
    head: String,
) -> Result<(String, usize, bool), LexError> {
    let mut text = head;
    let mut qualified = false;
    while i < chars.len() && chars[i] == '.' {
        let after = i + 1;
        if after < chars.len() && is_ident_start(chars[after]) {
            let (word, next) = scan_word(chars, after);
            text.push('.');
            text.push_str(&word);
            i = next;
            qualified = true;
        } else if after < chars.len() && (chars[after] == '"' || chars[after] == '`' || chars[after] == '[') {
            let (word, next) = scan_quoted_ident(chars, after)?;
            text.push('.');
            text.push_str(&word);
            i = next;
            qualified = true;
        } else if after < chars.len() && chars[after] == '*' {
            text.push_str(".*");
            i = after + 1;
            qualified = true;
        } else {
            break;
        }
    }
    Ok((text, i, qualified))
}

fn scan_word(chars: &[char], start: usize) -> (String, usize) {
    let mut i = start;
    let mut s = String::new();
    while i < chars.len() && is_ident_continue(chars[i]) {
        s.push(chars[i]);
        i += 1;
    }
    (s, i)
}

fn scan_number(chars: &[char], start: usize) -> (String, usize) {
    let mut i = start;
    let mut s = String::new();
    while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
        s.push(chars[i]);
        i += 1;
    }
    if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
        let mut j = i + 1;
        if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
            j += 1;
        }
        if j < chars.len() && chars[j].is_ascii_digit() {
            s.push(chars[i]);
            if chars[i + 1] == '+' || chars[i + 1] == '-' {
                s.push(chars[i + 1]);
            }
            i = j;
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                i += 1;
            }
        }
    }
    (s, i)
}

/// Single-quoted string with `''` escaping; the token text keeps the quotes.
fn scan_string(chars: &[char], start: usize) -> Result<(String, usize), LexError> {
    let mut i = start + 1;
    let mut s = String::from("'");
    loop {
        if i >= chars.len() {
            return Err(LexError::UnterminatedString(start));
        }
        if chars[i] == '\'' {
            if i + 1 < chars.len() && chars[i + 1] == '\'' {
                s.push_str("''");
                i += 2;
                continue;
            }
            s.push('\'');
            return Ok((s, i + 1));
        }
        s.push(chars[i]);
        i += 1;
    }
}

/// Double-quote / backtick / bracket quoted identifier, token text kept
/// verbatim (quotes included) so rendering round-trips.
fn scan_quoted_ident(chars: &[char], start: usize) -> Result<(String, usize), LexError> {
    let open = chars[start];
    let close = match open {
        '[' => ']',
        other => other,
    };
    let mut i = start + 1;
    let mut s = String::new();
    s.push(open);
    while i < chars.len() {
        if chars[i] == close {
            if close != ']' && i + 1 < chars.len() && chars[i + 1] == close {
                s.push(close);
                s.push(close);
                i += 2;
                continue;
            }
            s.push(close);
            return Ok((s, i + 1));
        }
        s.push(chars[i]);
        i += 1;
    }
    Err(LexError::UnterminatedIdentifier(start))
}

/// Strips identifier quoting for comparison purposes.
pub fn unquote(text: &str) -> &str {
    let bytes = text.as_bytes();
    if bytes.len() >= 2 {
        let (first, last) = (bytes[0], bytes[bytes.len() - 1]);
        if (first == b'"' && last == b'"')
            || (first == b'`' && last == b'`')
            || (first == b'[' && last == b']')
        {
            return &text[1..text.len() - 1];
        }
    }
    text
}

/// Case-folded, quote-stripped identifier text for reuse/equality checks.
pub fn fold_ident(text: &str) -> String {
    unquote(text).chars().flat_map(|c| c.to_lowercase()).collect()
}

/// Syntactic role of a token, resolved from local context only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenRole {
    Table,
    Column,
    /// Alias identifier directly after AS.
    Alias,
    Other,
}

/// Classifies identifiers as table or column references using local context:
/// identifiers after FROM/JOIN/INTO (up to an alias, ON, or clause keyword)
/// are tables; everything else defaults to column.
pub fn classify_roles(stream: &SqlTokenStream) -> Vec<TokenRole> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mode {
        Normal,
        TableNext,
        AfterTable,
        AliasNext,
    }
    let mut roles = Vec::with_capacity(stream.tokens.len());
    // One mode per parenthesis depth so subqueries track their own FROM state.
    let mut stack: Vec<Mode> = alloc::vec![Mode::Normal];
    for tok in &stream.tokens {
        let mode = *stack.last().unwrap();
        let mut role = TokenRole::Other;
        let mut next_mode = mode;
        match tok.kind {
            TokenKind::Punct if tok.text == "(" => {
                roles.push(TokenRole::Other);
                stack.push(Mode::Normal);
                continue;
            }
            TokenKind::Punct if tok.text == ")" => {
                roles.push(TokenRole::Other);
                if stack.len() > 1 {
                    stack.pop();
                }
                continue;
            }
            TokenKind::Keyword => {
                match tok.text.as_str() {
                    "FROM" | "JOIN" | "INTO" => next_mode = Mode::TableNext,
                    "AS" if mode == Mode::AfterTable => next_mode = Mode::AliasNext,
                    // Join qualifiers keep the table context alive.
                    "INNER" | "LEFT" | "RIGHT" | "FULL" | "OUTER" | "CROSS" | "NATURAL" => {}
                    _ => next_mode = Mode::Normal,
                }
            }
            TokenKind::Identifier | TokenKind::QualifiedIdentifier => match mode {
                Mode::TableNext => {
                    role = TokenRole::Table;
                    next_mode = Mode::AfterTable;
                }
                Mode::AliasNext => {
                    role = TokenRole::Alias;
                    next_mode = Mode::AfterTable;
                }
                // Ambiguous positions (e.g. implicit aliases) default to column.
                _ => role = TokenRole::Column,
            },
            TokenKind::Punct if tok.text == "," => {
                if mode == Mode::AfterTable {
                    next_mode = Mode::TableNext;
                }
            }
            _ => {}
        }
        roles.push(role);
        *stack.last_mut().unwrap() = next_mode;
    }
    roles
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(sql: &str) -> Vec<(TokenKind, String)> {
        tokenize(sql)
            .unwrap()
            .tokens
            .into_iter()
            .map(|t| (t.kind, t.text))
            .collect()
    }

    #[test]
    fn minimal_query() {
        assert_eq!(
            kinds("SELECT 1"),
            alloc::vec![
                (TokenKind::Keyword, "SELECT".into()),
                (TokenKind::NumericLiteral, "1".into())
            ]
        );
    }

    #[test]
    fn join_query_tokens() {
        let sql = "SELECT T1.bad_alias FROM avoid AS T1 INNER JOIN zip_data AS T2 \
                   ON T1.zip_code = T2.zip_code WHERE T2.city = 'Aguadilla'";
        let ts = tokenize(sql).unwrap();
        let texts: Vec<&str> = ts.tokens.iter().map(|t| t.text.as_str()).collect();
        assert!(texts.contains(&"T1.bad_alias"));
        assert!(texts.contains(&"INNER"));
        assert!(texts.contains(&"JOIN"));
        assert!(texts.contains(&"'Aguadilla'"));
        let lit = ts.tokens.iter().find(|t| t.text == "'Aguadilla'").unwrap();
        assert_eq!(lit.kind, TokenKind::StringLiteral);
        let q = ts.tokens.iter().find(|t| t.text == "T1.bad_alias").unwrap();
        assert_eq!(q.kind, TokenKind::QualifiedIdentifier);
    }

    #[test]
    fn unterminated_string_is_error() {
        assert!(matches!(
            tokenize("SELECT 'unclosed"),
            Err(LexError::UnterminatedString(_))
        ));
    }

    #[test]
    fn unterminated_quoted_identifier_is_error() {
        assert!(matches!(
            tokenize("SELECT \"School Type FROM x"),
            Err(LexError::UnterminatedIdentifier(_))
        ));
    }

    #[test]
    fn quoted_identifier_with_space_is_one_token() {
        let ts = tokenize("SELECT \"School Type\" FROM schools").unwrap();
        assert_eq!(ts.tokens[1].kind, TokenKind::Identifier);
        assert_eq!(ts.tokens[1].text, "\"School Type\"");
    }

    #[test]
    fn function_names_detected() {
        let ts = tokenize("SELECT COUNT(*), strftime('%Y', created) FROM t").unwrap();
        assert_eq!(ts.tokens[1].kind, TokenKind::FuncName);
        assert_eq!(ts.tokens[1].text, "COUNT");
        let f = ts.tokens.iter().find(|t| t.text == "STRFTIME").unwrap();
        assert_eq!(f.kind, TokenKind::FuncName);
    }

    #[test]
    fn keywords_uppercased() {
        let ts = tokenize("select a from t where a like 'x%'").unwrap();
        assert_eq!(ts.tokens[0].text, "SELECT");
        let like = ts.tokens.iter().find(|t| t.text == "LIKE").unwrap();
        assert_eq!(like.kind, TokenKind::Keyword);
    }

    #[test]
    fn roles_table_vs_column() {
        let ts = tokenize("SELECT a FROM t1 JOIN t2 ON t1.x = t2.y WHERE b = 1").unwrap();
        let roles = classify_roles(&ts);
        let by_text = |text: &str| {
            let idx = ts.tokens.iter().position(|t| t.text == text).unwrap();
            roles[idx]
        };
        assert_eq!(by_text("t1"), TokenRole::Table);
        assert_eq!(by_text("t2"), TokenRole::Table);
        assert_eq!(by_text("a"), TokenRole::Column);
        assert_eq!(by_text("t1.x"), TokenRole::Column);
        assert_eq!(by_text("b"), TokenRole::Column);
    }

    #[test]
    fn from_list_commas() {
        let ts = tokenize("SELECT * FROM a, b WHERE a.x = b.y").unwrap();
        let roles = classify_roles(&ts);
        let idx_a = ts.tokens.iter().position(|t| t.text == "a").unwrap();
        let idx_b = ts.tokens.iter().position(|t| t.text == "b").unwrap();
        assert_eq!(roles[idx_a], TokenRole::Table);
        assert_eq!(roles[idx_b], TokenRole::Table);
    }

    #[test]
    fn round_trip_stability() {
        let samples = [
            "SELECT COUNT ( * ) FROM t WHERE x >= 1.5 AND y != 'a''b'",
            "SELECT T1.a, T2.\"b c\" FROM x AS T1 INNER JOIN y AS T2 ON T1.k = T2.k",
            "SELECT CASE WHEN a = 1 THEN 'x' ELSE 'y' END FROM t GROUP BY a HAVING COUNT(*) > 2",
        ];
        for sql in samples {
            let ts = tokenize(sql).unwrap();
            let re = tokenize(&ts.render()).unwrap();
            assert_eq!(ts.tokens, re.tokens, "round trip failed for {sql}");
        }
    }

    #[test]
    fn keyword_table_sorted_for_binary_search() {
        let mut sorted = KEYWORDS.to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, KEYWORDS);
    }
}
