//! Property tests over randomly generated queries and pools.

use proptest::collection::vec;
use proptest::prelude::*;

use sqlshift_core::select::{RetrievalStrategy, ScorerRegistry};
use sqlshift_core::{
    edit_script, extract_alignment_skeleton, extract_prompt_template, filter_pool,
    jaccard_similarity, replay_script, retrieve, structural_alignment, tokenize, ExamplePool,
    PoolEntry, RetrievalConfig,
};

fn ident() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,8}"
}

fn literal() -> impl Strategy<Value = String> {
    prop_oneof![
        "[0-9]{1,4}",
        "'[A-Za-z ]{1,10}'".prop_map(|s| s),
    ]
}

fn cmp_op() -> impl Strategy<Value = &'static str> {
    prop_oneof![
        Just("="),
        Just("<"),
        Just(">"),
        Just("<="),
        Just(">="),
        Just("!="),
        Just("<>")
    ]
}

/// Small random SELECT queries: optional join, where, grouping, ordering.
fn query() -> impl Strategy<Value = String> {
    (
        ident(),
        ident(),
        ident(),
        ident(),
        literal(),
        cmp_op(),
        any::<bool>(),
        any::<bool>(),
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(
            |(t1, t2, c1, c2, lit, op, join, alias, group, order)| {
                let mut q = format!("SELECT {c1}");
                if alias {
                    q.push_str(&format!(" FROM {t1} AS T1"));
                } else {
                    q.push_str(&format!(" FROM {t1}"));
                }
                if join {
                    q.push_str(&format!(" JOIN {t2} ON {t1}.{c1} = {t2}.{c2}"));
                }
                q.push_str(&format!(" WHERE {c2} {op} {lit}"));
                if group {
                    q.push_str(&format!(" GROUP BY {c1} HAVING COUNT(*) > 2"));
                }
                if order {
                    q.push_str(&format!(" ORDER BY {c1} DESC LIMIT 5"));
                }
                q
            },
        )
}

fn pool_entry() -> impl Strategy<Value = PoolEntry> {
    (
        "[a-z0-9]{6}",
        "[a-z ]{5,30}",
        ident(),
        0usize..5,
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(id, question, _sql, src, exec, sem)| PoolEntry {
            id,
            question,
            sql: "SELECT 1".to_string(),
            source_db: format!("db{src}"),
            target_db: "tgt".to_string(),
            passed_execution: exec,
            passed_semantic: sem,
        })
}

proptest! {
    #[test]
    fn skeleton_extraction_is_idempotent(sql in query()) {
        let s1 = extract_alignment_skeleton(&tokenize(&sql).unwrap());
        let s2 = extract_alignment_skeleton(&tokenize(&s1.render()).unwrap());
        prop_assert_eq!(s1, s2);
    }

    #[test]
    fn tokenizer_round_trip(sql in query()) {
        let ts = tokenize(&sql).unwrap();
        let re = tokenize(&ts.render()).unwrap();
        prop_assert_eq!(ts.tokens, re.tokens);
    }

    #[test]
    fn template_inversion(sql in query()) {
        let ts = tokenize(&sql).unwrap();
        let tpl = extract_prompt_template(&ts);
        prop_assert_eq!(tpl.invert(), ts.tokens);
    }

    #[test]
    fn template_numbering_deterministic(sql in query()) {
        let a = extract_prompt_template(&tokenize(&sql).unwrap());
        let b = extract_prompt_template(&tokenize(&sql).unwrap());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn edit_script_replay_soundness(a in query(), b in query()) {
        let sa = extract_alignment_skeleton(&tokenize(&a).unwrap());
        let sb = extract_alignment_skeleton(&tokenize(&b).unwrap());
        let script = edit_script(&sa, &sb);
        prop_assert_eq!(replay_script(&sa, &sb, &script), sb.clone());
        prop_assert_eq!(script.is_empty(), structural_alignment(&sa, &sb));
    }

    #[test]
    fn edit_script_swap_inverts_kinds(a in query(), b in query()) {
        use sqlshift_core::EditKind;
        let sa = extract_alignment_skeleton(&tokenize(&a).unwrap());
        let sb = extract_alignment_skeleton(&tokenize(&b).unwrap());
        let fwd = edit_script(&sa, &sb);
        let rev = edit_script(&sb, &sa);
        prop_assert_eq!(fwd.len(), rev.len());
        for (f, r) in fwd.iter().zip(&rev) {
            let expected = match f.kind {
                EditKind::Deletion => EditKind::Insertion,
                EditKind::Insertion => EditKind::Deletion,
                EditKind::Mutation => EditKind::Mutation,
            };
            prop_assert_eq!(r.kind, expected);
        }
    }

    #[test]
    fn jaccard_symmetry_and_identity(a in "[a-z ]{1,30}", b in "[a-z ]{1,30}") {
        prop_assert_eq!(jaccard_similarity(&a, &b), jaccard_similarity(&b, &a));
        prop_assert_eq!(jaccard_similarity(&a, &a), 1.0);
        let s = jaccard_similarity(&a, &b);
        prop_assert!((0.0..=1.0).contains(&s));
    }

    #[test]
    fn filters_monotone_and_commute(entries in vec(pool_entry(), 0..30)) {
        let pool = ExamplePool { entries };
        let exec = filter_pool(&pool, true, false);
        let sem = filter_pool(&pool, false, true);
        let both = filter_pool(&pool, true, true);
        prop_assert!(exec.entries.len() <= pool.entries.len());
        prop_assert!(sem.entries.len() <= pool.entries.len());
        prop_assert_eq!(&filter_pool(&exec, false, true), &both);
        prop_assert_eq!(&filter_pool(&sem, true, false), &both);
    }

    #[test]
    fn retrieval_ordering_and_constraints(
        entries in vec(pool_entry(), 1..30),
        question in "[a-z ]{5,30}",
        k in 1usize..5,
        distinct in any::<bool>(),
    ) {
        let pool = ExamplePool { entries };
        let registry = ScorerRegistry::with_defaults();
        let cfg = RetrievalConfig {
            k,
            strategy: RetrievalStrategy::Mapped,
            require_distinct_source: distinct,
            scorer_id: "jaccard".to_string(),
        };
        match retrieve(&question, &pool, &cfg, &registry, None) {
            Ok(got) => {
                prop_assert_eq!(got.len(), k);
                for w in got.windows(2) {
                    prop_assert!(w[0].1 >= w[1].1);
                }
                if distinct {
                    let mut sources: Vec<&str> =
                        got.iter().map(|(e, _)| e.source_db.as_str()).collect();
                    sources.sort_unstable();
                    sources.dedup();
                    prop_assert_eq!(sources.len(), got.len());
                }
                for (e, _) in &got {
                    prop_assert!(pool.entries.iter().any(|p| p.id == e.id));
                }
            }
            Err(_) => {
                // PoolTooSmall is the only admissible failure here.
                let eligible = if distinct {
                    let mut s: Vec<&str> =
                        pool.entries.iter().map(|e| e.source_db.as_str()).collect();
                    s.sort_unstable();
                    s.dedup();
                    s.len()
                } else {
                    pool.entries.len()
                };
                prop_assert!(eligible < k);
            }
        }
    }
}
