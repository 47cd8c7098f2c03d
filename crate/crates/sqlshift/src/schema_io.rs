//! Benchmark dataset loading (SPIDER and BIRD layouts), live-database schema
//! introspection, and deterministic sample-row extraction.

use std::fmt;
use std::path::{Path, PathBuf};

use rusqlite::{Connection, OpenFlags};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use sqlshift_core::schema::{ColumnDef, ForeignKey, SampleData, SchemaDef, TableDef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetFormat {
    Bird,
    Spider,
}

impl fmt::Display for DatasetFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetFormat::Bird => write!(f, "bird"),
            DatasetFormat::Spider => write!(f, "spider"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Split::Train => write!(f, "train"),
            Split::Dev => write!(f, "dev"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub id: String,
    pub question: String,
    pub gold_sql: String,
    pub db_id: String,
    pub split: Split,
}

#[derive(Debug, Error)]
pub enum SchemaIoError {
    #[error("malformed record in {file} at index {index}: {reason}")]
    FormatError { file: PathBuf, index: usize, reason: String },
    #[error("no database file for db_id {db_id} (expected {expected})")]
    MissingDatabase { db_id: String, expected: PathBuf },
    #[error("cannot open database {path}: {source}")]
    DbOpenError { path: PathBuf, source: rusqlite::Error },
    #[error("dataset root {0} has no split files for the requested format")]
    NoSplitFiles(PathBuf),
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid JSON in {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("introspected schema failed validation: {0}")]
    InvalidSchema(String),
}

/// Split file locations per benchmark layout.
fn split_files(root: &Path, format: DatasetFormat) -> Vec<(Split, PathBuf, &'static str)> {
    match format {
        DatasetFormat::Spider => vec![
            (Split::Train, root.join("train_spider.json"), "query"),
            (Split::Dev, root.join("dev.json"), "query"),
        ],
        DatasetFormat::Bird => vec![
            (Split::Train, root.join("train/train.json"), "SQL"),
            (Split::Dev, root.join("dev/dev.json"), "SQL"),
        ],
    }
}

/// Path to a database file for a db_id under the benchmark layout.
pub fn db_path(root: &Path, format: DatasetFormat, split: Split, db_id: &str) -> PathBuf {
    let dir = match (format, split) {
        (DatasetFormat::Spider, _) => root.join("database"),
        (DatasetFormat::Bird, Split::Train) => root.join("train_databases"),
        (DatasetFormat::Bird, Split::Dev) => root.join("dev_databases"),
    };
    dir.join(db_id).join(format!("{db_id}.sqlite"))
}

/// Locates a database file for a db_id, trying both splits.
pub fn find_db_path(root: &Path, format: DatasetFormat, db_id: &str) -> Option<PathBuf> {
    [Split::Train, Split::Dev]
        .iter()
        .map(|s| db_path(root, format, *s, db_id))
        .find(|p| p.exists())
}

/// Loads every question record from the split files present under `root`.
/// Entries get stable ids "<split>:<db_id>:<index>" in file order.
pub fn load_dataset(root: &Path, format: DatasetFormat) -> Result<Vec<DatasetEntry>, SchemaIoError> {
    let mut entries = Vec::new();
    let mut any_file = false;
    for (split, path, sql_field) in split_files(root, format) {
        if !path.exists() {
            continue;
        }
        any_file = true;
        let text = std::fs::read_to_string(&path)
            .map_err(|source| SchemaIoError::Io { path: path.clone(), source })?;
        let records: Vec<Value> = serde_json::from_str(&text)
            .map_err(|source| SchemaIoError::Json { path: path.clone(), source })?;
        for (index, rec) in records.iter().enumerate() {
            let field = |name: &str| -> Result<String, SchemaIoError> {
                rec.get(name)
                    .and_then(Value::as_str)
                    .map(str::to_owned)
                    .ok_or_else(|| SchemaIoError::FormatError {
                        file: path.clone(),
                        index,
                        reason: format!("missing or non-string field \"{name}\""),
                    })
            };
            let question = field("question")?;
            let gold_sql = field(sql_field)?;
            let db_id = field("db_id")?;
            if find_db_path(root, format, &db_id).is_none() {
                return Err(SchemaIoError::MissingDatabase {
                    expected: db_path(root, format, split, &db_id),
                    db_id,
                });
            }
            entries.push(DatasetEntry {
                id: format!("{split}:{db_id}:{index}"),
                question,
                gold_sql,
                db_id,
                split,
            });
        }
    }
    if !any_file {
        return Err(SchemaIoError::NoSplitFiles(root.to_path_buf()));
    }
    Ok(entries)
}

pub fn open_read_only(path: &Path) -> Result<Connection, SchemaIoError> {
    Connection::open_with_flags(path, OpenFlags::SQLITE_OPEN_READ_ONLY)
        .map_err(|source| SchemaIoError::DbOpenError { path: path.to_path_buf(), source })
}

/// Reads tables, columns, primary keys, and foreign keys from a live
/// database file in catalog order.
pub fn introspect_schema(path: &Path) -> Result<SchemaDef, SchemaIoError> {
    let conn = open_read_only(path)?;
    let db_id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let map_err = |source: rusqlite::Error| SchemaIoError::DbOpenError {
        path: path.to_path_buf(),
        source,
    };

    let mut stmt = conn
        .prepare("SELECT name FROM sqlite_master WHERE type = 'table' AND name NOT LIKE 'sqlite_%' ORDER BY rowid")
        .map_err(map_err)?;
    let table_names: Vec<String> = stmt
        .query_map([], |row| row.get(0))
        .map_err(map_err)?
        .collect::<Result<_, _>>()
        .map_err(map_err)?;

    let mut tables = Vec::new();
    let mut foreign_keys = Vec::new();
    for name in &table_names {
        let mut cols = conn
            .prepare(&format!("PRAGMA table_info(\"{}\")", name.replace('"', "\"\"")))
            .map_err(map_err)?;
        let mut columns = Vec::new();
        // (pk ordinal, column name)
        let mut pk: Vec<(i64, String)> = Vec::new();
        let rows = cols
            .query_map([], |row| {
                let cname: String = row.get("name")?;
                let ctype: String = row.get("type")?;
                let pk_ord: i64 = row.get("pk")?;
                Ok((cname, ctype, pk_ord))
            })
            .map_err(map_err)?;
        for row in rows {
            let (cname, ctype, pk_ord) = row.map_err(map_err)?;
            if pk_ord > 0 {
                pk.push((pk_ord, cname.clone()));
            }
            columns.push(ColumnDef { name: cname, declared_type: ctype });
        }
        pk.sort();
        tables.push(TableDef {
            name: name.clone(),
            columns,
            primary_key: pk.into_iter().map(|(_, c)| c).collect(),
        });

        let mut fks = conn
            .prepare(&format!("PRAGMA foreign_key_list(\"{}\")", name.replace('"', "\"\"")))
            .map_err(map_err)?;
        let rows = fks
            .query_map([], |row| {
                let to_table: String = row.get("table")?;
                let from_col: String = row.get("from")?;
                let to_col: Option<String> = row.get("to")?;
                Ok((to_table, from_col, to_col))
            })
            .map_err(map_err)?;
        for row in rows {
            let (to_table, from_column, to_col) = row.map_err(map_err)?;
            foreign_keys.push(ForeignKey {
                from_table: name.clone(),
                from_column,
                to_column: to_col.unwrap_or_default(),
                to_table,
            });
        }
    }
    // Implicit FK targets ("to" = NULL) reference the parent primary key.
    for fk in &mut foreign_keys {
        if fk.to_column.is_empty() {
            if let Some(parent) = tables.iter().find(|t| t.name == fk.to_table) {
                if let Some(first) = parent.primary_key.first() {
                    fk.to_column = first.clone();
                }
            }
        }
    }
    let schema = SchemaDef { db_id, tables, foreign_keys };
    schema
        .validate()
        .map_err(|e| SchemaIoError::InvalidSchema(e.to_string()))?;
    Ok(schema)
}

/// Renders a database value as a SQL literal.
fn render_cell(value: rusqlite::types::ValueRef<'_>) -> String {
    use rusqlite::types::ValueRef;
    match value {
        ValueRef::Null => "NULL".to_string(),
        ValueRef::Integer(i) => i.to_string(),
        ValueRef::Real(r) => r.to_string(),
        ValueRef::Text(t) => {
            let s = String::from_utf8_lossy(t);
            format!("'{}'", s.replace('\'', "''"))
        }
        ValueRef::Blob(b) => format!("X'{}'", hex::encode(b)),
    }
}

/// First k rows per table under a fixed deterministic order: primary key
/// ascending when present, otherwise rowid order.
pub fn sample_rows(
    path: &Path,
    schema: &SchemaDef,
    k: usize,
) -> Result<SampleData, SchemaIoError> {
    let conn = open_read_only(path)?;
    let map_err = |source: rusqlite::Error| SchemaIoError::DbOpenError {
        path: path.to_path_buf(),
        source,
    };
    let mut data = SampleData::default();
    for table in &schema.tables {
        let quoted = format!("\"{}\"", table.name.replace('"', "\"\""));
        let order = if table.primary_key.is_empty() {
            "rowid".to_string()
        } else {
            table
                .primary_key
                .iter()
                .map(|c| format!("\"{}\"", c.replace('"', "\"\"")))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let sql = format!("SELECT * FROM {quoted} ORDER BY {order} LIMIT {k}");
        let mut stmt = conn.prepare(&sql).map_err(map_err)?;
        let ncols = stmt.column_count();
        let rows = stmt
            .query_map([], |row| {
                let mut cells = Vec::with_capacity(ncols);
                for i in 0..ncols {
                    cells.push(render_cell(row.get_ref(i)?));
                }
                Ok(cells)
            })
            .map_err(map_err)?;
        let collected: Vec<Vec<String>> = rows.collect::<Result<_, _>>().map_err(map_err)?;
        data.rows_per_table.insert(table.name.clone(), collected);
    }
    data.validate(schema)
        .map_err(|e| SchemaIoError::InvalidSchema(e.to_string()))?;
    Ok(data)
}

/// Prompt-facing cell rendering: values longer than 64 characters are
/// truncated with an ellipsis marker. Membership checks always use the full
/// value, never this rendering.
fn truncate_cell(cell: &str) -> String {
    if cell.chars().count() > 64 {
        let prefix: String = cell.chars().take(61).collect();
        format!("{prefix}...")
    } else {
        cell.to_string()
    }
}

/// Compact CREATE-TABLE-like schema listing with foreign keys as comment
/// lines; deterministic for a given schema.
pub fn render_schema_text(schema: &SchemaDef) -> String {
    let mut out = String::new();
    for table in &schema.tables {
        out.push_str(&format!("CREATE TABLE {} (\n", table.name));
        for (i, col) in table.columns.iter().enumerate() {
            let pk = if table.primary_key.contains(&col.name) { " PRIMARY KEY" } else { "" };
            let comma = if i + 1 < table.columns.len() { "," } else { "" };
            out.push_str(&format!("  {} {}{}{}\n", col.name, col.declared_type, pk, comma));
        }
        out.push_str(");\n");
    }
    for fk in &schema.foreign_keys {
        out.push_str(&format!(
            "-- FK: {}.{} -> {}.{}\n",
            fk.from_table, fk.from_column, fk.to_table, fk.to_column
        ));
    }
    out
}

/// Sample rows rendered for prompts, one block per table in schema order.
pub fn render_sample_text(schema: &SchemaDef, samples: &SampleData) -> String {
    let mut out = String::new();
    for table in &schema.tables {
        let Some(rows) = samples.rows_per_table.get(&table.name) else {
            continue;
        };
        let cols: Vec<&str> = table.columns.iter().map(|c| c.name.as_str()).collect();
        out.push_str(&format!("Table {} ({}):\n", table.name, cols.join(", ")));
        for row in rows {
            let cells: Vec<String> = row.iter().map(|c| truncate_cell(c)).collect();
            out.push_str(&format!("  ({})\n", cells.join(", ")));
        }
    }
    out
}
