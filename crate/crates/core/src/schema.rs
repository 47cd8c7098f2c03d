//! Database schema and sample-row data structures. Introspection and IO live
//! in the companion crate; this module only holds the data and its
//! invariants.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::token::fold_ident;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnDef {
    pub name: String,
    pub declared_type: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDef {
    pub name: String,
    pub columns: Vec<ColumnDef>,
    pub primary_key: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForeignKey {
    pub from_table: String,
    pub from_column: String,
    pub to_table: String,
    pub to_column: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaDef {
    pub db_id: String,
    pub tables: Vec<TableDef>,
    pub foreign_keys: Vec<ForeignKey>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemaError {
    DuplicateTable(String),
    DanglingForeignKey(String),
    RowArity { table: String, expected: usize, got: usize },
    UnknownTable(String),
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemaError::DuplicateTable(t) => write!(f, "duplicate table name: {t}"),
            SchemaError::DanglingForeignKey(d) => write!(f, "foreign key names missing endpoint: {d}"),
            SchemaError::RowArity { table, expected, got } => {
                write!(f, "row in table {table} has {got} cells, expected {expected}")
            }
            SchemaError::UnknownTable(t) => write!(f, "sample rows reference unknown table: {t}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SchemaError {}

impl SchemaDef {
    /// Checks table-name uniqueness (case-folded) and that every foreign-key
    /// endpoint names an existing table and column.
    pub fn validate(&self) -> Result<(), SchemaError> {
        let mut seen = BTreeSet::new();
        for t in &self.tables {
            if !seen.insert(fold_ident(&t.name)) {
                return Err(SchemaError::DuplicateTable(t.name.clone()));
            }
        }
        for fk in &self.foreign_keys {
            for (table, column) in [
                (&fk.from_table, &fk.from_column),
                (&fk.to_table, &fk.to_column),
            ] {
                let found = self.table(table).map_or(false, |t| {
                    t.columns.iter().any(|c| fold_ident(&c.name) == fold_ident(column))
                });
                if !found {
                    let mut desc = table.clone();
                    desc.push('.');
                    desc.push_str(column);
                    return Err(SchemaError::DanglingForeignKey(desc));
                }
            }
        }
        Ok(())
    }

    pub fn table(&self, name: &str) -> Option<&TableDef> {
        let folded = fold_ident(name);
        self.tables.iter().find(|t| fold_ident(&t.name) == folded)
    }

    /// Case-folded table names.
    pub fn table_names(&self) -> BTreeSet<String> {
        self.tables.iter().map(|t| fold_ident(&t.name)).collect()
    }

    /// Case-folded column names across all tables.
    pub fn column_names(&self) -> BTreeSet<String> {
        self.tables
            .iter()
            .flat_map(|t| t.columns.iter().map(|c| fold_ident(&c.name)))
            .collect()
    }
}

/// Up to k sampled rows per table, cell values rendered as SQL literals.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleData {
    pub rows_per_table: BTreeMap<String, Vec<Vec<String>>>,
}

impl SampleData {
    /// Rows must come from schema tables and carry one cell per column.
    pub fn validate(&self, schema: &SchemaDef) -> Result<(), SchemaError> {
        for (table, rows) in &self.rows_per_table {
            let def = schema
                .table(table)
                .ok_or_else(|| SchemaError::UnknownTable(table.clone()))?;
            for row in rows {
                if row.len() != def.columns.len() {
                    return Err(SchemaError::RowArity {
                        table: table.clone(),
                        expected: def.columns.len(),
                        got: row.len(),
                    });
                }
            }
        }
        Ok(())
    }
}
