//! Execution outcome data and the engine-error-to-category rule table.
//! Running queries happens in the companion crate; classification of the
//! resulting error text is pure and lives here.

use alloc::string::String;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExecStatus {
    Success,
    Failure,
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ErrorCategory {
    ColumnRef,
    Syntax,
    TableRef,
    AmbiguousColumn,
    AggMisuse,
    Other,
}

impl ErrorCategory {
    pub const ALL: [ErrorCategory; 6] = [
        ErrorCategory::ColumnRef,
        ErrorCategory::Syntax,
        ErrorCategory::TableRef,
        ErrorCategory::AmbiguousColumn,
        ErrorCategory::AggMisuse,
        ErrorCategory::Other,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ErrorCategory::ColumnRef => "COLUMN_REF",
            ErrorCategory::Syntax => "SYNTAX",
            ErrorCategory::TableRef => "TABLE_REF",
            ErrorCategory::AmbiguousColumn => "AMBIGUOUS_COLUMN",
            ErrorCategory::AggMisuse => "AGG_MISUSE",
            ErrorCategory::Other => "OTHER",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecOutcome {
    pub status: ExecStatus,
    pub row_count: Option<u64>,
    pub error_category: Option<ErrorCategory>,
    pub error_text: Option<String>,
    pub elapsed_ms: u64,
}

impl ExecOutcome {
    pub fn success(row_count: u64, elapsed_ms: u64) -> Self {
        ExecOutcome {
            status: ExecStatus::Success,
            row_count: Some(row_count),
            error_category: None,
            error_text: None,
            elapsed_ms,
        }
    }

    pub fn failure(error_text: String, elapsed_ms: u64) -> Self {
        let category = categorize_error_text(&error_text);
        ExecOutcome {
            status: ExecStatus::Failure,
            row_count: None,
            error_category: Some(category),
            error_text: Some(error_text),
            elapsed_ms,
        }
    }

    pub fn timeout(elapsed_ms: u64) -> Self {
        ExecOutcome {
            status: ExecStatus::Timeout,
            row_count: None,
            error_category: Some(ErrorCategory::Other),
            error_text: Some(String::from("terminated: execution time limit exceeded")),
            elapsed_ms,
        }
    }
}

/// Maps an engine error message to exactly one category. Matching is total:
/// anything unrecognized is OTHER.
pub fn categorize_error_text(text: &str) -> ErrorCategory {
    let lower: String = text.chars().flat_map(|c| c.to_lowercase()).collect();
    if lower.contains("ambiguous column name") {
        ErrorCategory::AmbiguousColumn
    } else if lower.contains("no such column") {
        ErrorCategory::ColumnRef
    } else if lower.contains("syntax error") {
        ErrorCategory::Syntax
    } else if lower.contains("no such table") {
        ErrorCategory::TableRef
    } else if lower.contains("misuse of aggregate")
        || lower.contains("aggregate functions are not allowed")
    {
        ErrorCategory::AggMisuse
    } else {
        ErrorCategory::Other
    }
}

/// Execution success with at least one returned row.
pub fn result_yield(outcome: &ExecOutcome) -> bool {
    outcome.status == ExecStatus::Success && outcome.row_count.map_or(false, |n| n > 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn category_rule_table() {
        assert_eq!(
            categorize_error_text("no such column: SchoolType"),
            ErrorCategory::ColumnRef
        );
        assert_eq!(categorize_error_text("near \"FORM\": syntax error"), ErrorCategory::Syntax);
        assert_eq!(categorize_error_text("no such table: playstore"), ErrorCategory::TableRef);
        assert_eq!(
            categorize_error_text("ambiguous column name: id"),
            ErrorCategory::AmbiguousColumn
        );
        assert_eq!(categorize_error_text("misuse of aggregate: MAX()"), ErrorCategory::AggMisuse);
        assert_eq!(
            categorize_error_text("aggregate functions are not allowed in the WHERE clause"),
            ErrorCategory::AggMisuse
        );
        assert_eq!(categorize_error_text("disk I/O error"), ErrorCategory::Other);
    }

    #[test]
    fn yield_requires_success_and_rows() {
        assert!(!result_yield(&ExecOutcome::success(0, 1)));
        assert!(result_yield(&ExecOutcome::success(3, 1)));
        assert!(!result_yield(&ExecOutcome::failure("no such table: x".to_string(), 1)));
        assert!(!result_yield(&ExecOutcome::timeout(2000)));
    }

    #[test]
    fn failure_invariants() {
        let f = ExecOutcome::failure("no such column: q".to_string(), 2);
        assert_eq!(f.status, ExecStatus::Failure);
        assert!(f.error_category.is_some());
        assert!(f.row_count.is_none());
    }
}
