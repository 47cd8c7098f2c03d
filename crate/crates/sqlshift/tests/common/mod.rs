#![allow(dead_code)]

//! Shared fixtures for integration tests: a small SPIDER-layout dataset tree
//! with two source databases and one dev target, all on the same schema so
//! the mock backend's echoed SQL executes on the target.

use std::fs;
use std::path::Path;

pub fn seed_db(path: &Path) {
    let conn = rusqlite::Connection::open(path).unwrap();
    conn.execute_batch(
        "CREATE TABLE zip_data (zip_code INTEGER PRIMARY KEY, city TEXT);
         CREATE TABLE avoid (zip_code INTEGER, bad_alias TEXT,
             FOREIGN KEY (zip_code) REFERENCES zip_data(zip_code));
         INSERT INTO zip_data VALUES (601, 'Adjuntas'), (602, 'Aguada'), (603, 'Aguadilla');
         INSERT INTO avoid VALUES (601, 'Colinas del Gigante'), (602, 'Urb San Antonio');",
    )
    .unwrap();
}

pub const TRAIN_JSON: &str = r#"[
  {"question": "How many zip codes are there?", "query": "SELECT COUNT(*) FROM zip_data", "db_id": "db_a"},
  {"question": "List all cities", "query": "SELECT city FROM zip_data", "db_id": "db_a"},
  {"question": "Which zip codes map to Aguada?", "query": "SELECT zip_code FROM zip_data WHERE city = 'Aguada'", "db_id": "db_a"},
  {"question": "How many aliases?", "query": "SELECT COUNT(*) FROM avoid", "db_id": "db_b"},
  {"question": "[refuse] impossible request", "query": "SELECT bad_alias FROM avoid", "db_id": "db_b"},
  {"question": "[garble] broken request", "query": "SELECT zip_code FROM avoid", "db_id": "db_b"},
  {"question": "Count rows avoided in Aguadilla", "query": "SELECT COUNT(*) FROM avoid AS T1 INNER JOIN zip_data AS T2 ON T1.zip_code = T2.zip_code WHERE T2.city = 'Aguadilla'", "db_id": "db_a"}
]"#;

pub const DEV_JSON: &str = r#"[
  {"question": "How many cities named Aguadilla?", "query": "SELECT COUNT(*) FROM zip_data WHERE city = 'Aguadilla'", "db_id": "db_t"},
  {"question": "List aliases", "query": "SELECT bad_alias FROM avoid", "db_id": "db_t"}
]"#;

fn query_variant(i: usize) -> (String, String) {
    let sqls = [
        "SELECT COUNT(*) FROM zip_data",
        "SELECT city FROM zip_data WHERE zip_code = 601",
        "SELECT bad_alias FROM avoid",
        "SELECT COUNT(*) FROM avoid AS T1 INNER JOIN zip_data AS T2 ON T1.zip_code = T2.zip_code WHERE T2.city = 'Adjuntas'",
        "SELECT DISTINCT city FROM zip_data ORDER BY city",
    ];
    let marker = match i {
        103 => "[refuse] ",
        104 => "[garble] ",
        _ => "",
    };
    (format!("{marker}question variant {i}"), sqls[i % sqls.len()].to_string())
}

/// Larger SPIDER-layout tree: `per_db` train entries on each of db_a and
/// db_b, 2 dev entries on db_t. Entries 103 and 104 (db_b) carry the mock
/// refusal and garble markers.
pub fn write_spider_tree_sized(root: &Path, per_db: usize) {
    for db in ["db_a", "db_b", "db_t"] {
        let dir = root.join("database").join(db);
        fs::create_dir_all(&dir).unwrap();
        seed_db(&dir.join(format!("{db}.sqlite")));
    }
    let mut train = Vec::new();
    for (db, base) in [("db_a", 0usize), ("db_b", 100)] {
        for i in 0..per_db {
            let (question, sql) = query_variant(base + i);
            train.push(serde_json::json!({"question": question, "query": sql, "db_id": db}));
        }
    }
    fs::write(
        root.join("train_spider.json"),
        serde_json::to_string_pretty(&train).unwrap(),
    )
    .unwrap();
    fs::write(root.join("dev.json"), DEV_JSON).unwrap();
}

/// SPIDER-layout dataset tree: 7 train entries over db_a and db_b, 2 dev
/// entries on db_t.
pub fn write_spider_tree(root: &Path) {
    for db in ["db_a", "db_b", "db_t"] {
        let dir = root.join("database").join(db);
        fs::create_dir_all(&dir).unwrap();
        seed_db(&dir.join(format!("{db}.sqlite")));
    }
    fs::write(root.join("train_spider.json"), TRAIN_JSON).unwrap();
    fs::write(root.join("dev.json"), DEV_JSON).unwrap();
}
