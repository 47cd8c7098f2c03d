//! Token-level structural diffs between alignment skeletons.
//!
//! Edit scripts come from a longest-common-subsequence alignment; each edit is
//! a deletion, insertion, or mutation (an adjacent delete-run/insert-run pair
//! at one alignment gap) and is labeled with one or more semantic buckets.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::skeleton::AlignmentSkeleton;
use crate::skeleton::SkelToken;
use crate::token::is_agg_func;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EditKind {
    Deletion,
    Insertion,
    Mutation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Bucket {
    Join,
    Cond,
    Distinct,
    FuncOther,
    AggFunc,
    Grouping,
    Order,
    Subquery,
    PunctSelect,
    Other,
}

impl Bucket {
    pub const ALL: [Bucket; 10] = [
        Bucket::Join,
        Bucket::Cond,
        Bucket::Distinct,
        Bucket::FuncOther,
        Bucket::AggFunc,
        Bucket::Grouping,
        Bucket::Order,
        Bucket::Subquery,
        Bucket::PunctSelect,
        Bucket::Other,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Bucket::Join => "JOIN",
            Bucket::Cond => "COND",
            Bucket::Distinct => "DISTINCT",
            Bucket::FuncOther => "FUNC_OTHER",
            Bucket::AggFunc => "AGG_FUNC",
            Bucket::Grouping => "GROUPING",
            Bucket::Order => "ORDER",
            Bucket::Subquery => "SUBQUERY",
            Bucket::PunctSelect => "PUNCT_SELECT",
            Bucket::Other => "OTHER",
        }
    }
}

/// One structural edit. Spans are half-open token index ranges into the
/// source and target skeletons; a deletion has an empty target span, an
/// insertion an empty source span, a mutation both non-empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditRecord {
    pub kind: EditKind,
    pub src_span: (usize, usize),
    pub tgt_span: (usize, usize),
    pub buckets: BTreeSet<Bucket>,
}

/// Minimal edit script between two skeletons based on an LCS alignment.
/// Empty iff the skeletons are equal.
pub fn edit_script(src: &AlignmentSkeleton, tgt: &AlignmentSkeleton) -> Vec<EditRecord> {
    let a = &src.tokens;
    let b = &tgt.tokens;
    // Tie-breaking between equal-length LCS paths is computed on a canonical
    // ordering of the pair, so swapping arguments inverts the script exactly
    // (deletions <-> insertions, mutations fixed).
    let gaps = if a <= b {
        lcs_gaps(a, b)
    } else {
        lcs_gaps(b, a).into_iter().map(|(sr, tr)| (tr, sr)).collect()
    };
    let src_ctx = token_contexts(a);
    let tgt_ctx = token_contexts(b);
    let mut script = Vec::new();
    for (sr, tr) in gaps {
        let kind = match (sr.0 < sr.1, tr.0 < tr.1) {
            (true, true) => EditKind::Mutation,
            (true, false) => EditKind::Deletion,
            (false, true) => EditKind::Insertion,
            (false, false) => continue,
        };
        let mut rec = EditRecord { kind, src_span: sr, tgt_span: tr, buckets: BTreeSet::new() };
        rec.buckets = bucket_set(&rec, a, &src_ctx, b, &tgt_ctx);
        script.push(rec);
    }
    script
}

/// Assigns the semantic bucket set for one edit given both skeletons.
pub fn classify_buckets(
    edit: &EditRecord,
    src: &AlignmentSkeleton,
    tgt: &AlignmentSkeleton,
) -> BTreeSet<Bucket> {
    bucket_set(
        edit,
        &src.tokens,
        &token_contexts(&src.tokens),
        &tgt.tokens,
        &token_contexts(&tgt.tokens),
    )
}

/// Per-bucket counts, split by edit kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindCounts {
    pub deletions: u64,
    pub insertions: u64,
    pub mutations: u64,
}

impl KindCounts {
    pub fn total(&self) -> u64 {
        self.deletions + self.insertions + self.mutations
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiffSummary {
    pub per_bucket: BTreeMap<Bucket, KindCounts>,
    pub total_edits: u64,
    pub fraction_deletions: f64,
    pub fraction_insertions: f64,
    pub fraction_mutations: f64,
}

pub fn summarize<'a, I>(scripts: I) -> DiffSummary
where
    I: IntoIterator<Item = &'a [EditRecord]>,
{
    let mut per_bucket: BTreeMap<Bucket, KindCounts> = BTreeMap::new();
    let mut kinds = KindCounts::default();
    for script in scripts {
        for edit in script {
            let slot = match edit.kind {
                EditKind::Deletion => &mut kinds.deletions,
                EditKind::Insertion => &mut kinds.insertions,
                EditKind::Mutation => &mut kinds.mutations,
            };
            *slot += 1;
            for bucket in &edit.buckets {
                let entry = per_bucket.entry(*bucket).or_default();
                match edit.kind {
                    EditKind::Deletion => entry.deletions += 1,
                    EditKind::Insertion => entry.insertions += 1,
                    EditKind::Mutation => entry.mutations += 1,
                }
            }
        }
    }
    let total = kinds.total();
    let frac = |n: u64| if total == 0 { 0.0 } else { n as f64 / total as f64 };
    DiffSummary {
        per_bucket,
        total_edits: total,
        fraction_deletions: frac(kinds.deletions),
        fraction_insertions: frac(kinds.insertions),
        fraction_mutations: frac(kinds.mutations),
    }
}

/// LCS alignment gaps: for each unmatched stretch, the source and target
/// index ranges it covers, in order.
fn lcs_gaps(a: &[SkelToken], b: &[SkelToken]) -> Vec<((usize, usize), (usize, usize))> {
    let n = a.len();
    let m = b.len();
    // dp[i][j] = LCS length of a[i..], b[j..]
    let mut dp = vec![vec![0u32; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            dp[i][j] = if a[i] == b[j] {
                dp[i + 1][j + 1] + 1
            } else {
                dp[i + 1][j].max(dp[i][j + 1])
            };
        }
    }
    let mut gaps = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    let (mut gi, mut gj) = (0usize, 0usize);
    let mut in_gap = false;
    while i < n || j < m {
        if i < n && j < m && a[i] == b[j] && dp[i][j] == dp[i + 1][j + 1] + 1 {
            if in_gap {
                gaps.push(((gi, i), (gj, j)));
                in_gap = false;
            }
            i += 1;
            j += 1;
        } else {
            if !in_gap {
                gi = i;
                gj = j;
                in_gap = true;
            }
            if i < n && (j >= m || dp[i + 1][j] >= dp[i][j + 1]) {
                i += 1;
            } else {
                j += 1;
            }
        }
    }
    if in_gap {
        gaps.push(((gi, n), (gj, m)));
    }
    gaps
}

/// Per-token context: parenthesis depth and whether the token sits inside a
/// SELECT projection list (between SELECT and the matching FROM).
#[derive(Clone, Copy)]
struct TokenContext {
    depth: usize,
    in_select_list: bool,
}

fn token_contexts(tokens: &[SkelToken]) -> Vec<TokenContext> {
    let mut ctx = Vec::with_capacity(tokens.len());
    let mut depth = 0usize;
    // One select-list flag per depth level.
    let mut select_list: Vec<bool> = vec![false];
    for tok in tokens {
        match tok {
            SkelToken::Punct(p) if p == "(" => {
                ctx.push(TokenContext { depth, in_select_list: select_list[depth] });
                depth += 1;
                if select_list.len() <= depth {
                    select_list.push(false);
                } else {
                    select_list[depth] = false;
                }
                continue;
            }
            SkelToken::Punct(p) if p == ")" => {
                depth = depth.saturating_sub(1);
                ctx.push(TokenContext { depth, in_select_list: select_list[depth] });
                continue;
            }
            SkelToken::Keyword(k) if k == "SELECT" => {
                select_list[depth] = true;
            }
            SkelToken::Keyword(k)
                if matches!(
                    k.as_str(),
                    "FROM" | "WHERE" | "GROUP" | "ORDER" | "HAVING" | "LIMIT" | "UNION"
                        | "INTERSECT" | "EXCEPT"
                ) =>
            {
                select_list[depth] = false;
            }
            _ => {}
        }
        ctx.push(TokenContext { depth, in_select_list: select_list[depth] });
    }
    ctx
}

const JOIN_KEYWORDS: &[&str] = &[
    "JOIN", "INNER", "LEFT", "RIGHT", "FULL", "OUTER", "CROSS", "ON", "USING",
];
const COND_KEYWORDS: &[&str] = &[
    "WHERE", "AND", "OR", "NOT", "IN", "LIKE", "BETWEEN", "IS", "EXISTS", "CASE", "WHEN",
    "THEN", "ELSE", "END",
];
const GROUPING_KEYWORDS: &[&str] = &["GROUP", "HAVING"];
const ORDER_KEYWORDS: &[&str] = &["ORDER", "ASC", "DESC", "LIMIT", "OFFSET"];
const SET_OP_KEYWORDS: &[&str] = &["UNION", "INTERSECT", "EXCEPT"];

fn token_buckets(tok: &SkelToken, ctx: TokenContext, out: &mut BTreeSet<Bucket>) {
    match tok {
        SkelToken::Cmp => {
            out.insert(Bucket::Cond);
        }
        SkelToken::Keyword(k) => {
            let k = k.as_str();
            if JOIN_KEYWORDS.contains(&k) {
                out.insert(Bucket::Join);
            }
            if COND_KEYWORDS.contains(&k) {
                out.insert(Bucket::Cond);
            }
            if k == "DISTINCT" {
                out.insert(Bucket::Distinct);
            }
            if GROUPING_KEYWORDS.contains(&k) {
                out.insert(Bucket::Grouping);
            }
            if ORDER_KEYWORDS.contains(&k) {
                out.insert(Bucket::Order);
            }
            if SET_OP_KEYWORDS.contains(&k) || (k == "SELECT" && ctx.depth > 0) {
                out.insert(Bucket::Subquery);
            }
        }
        SkelToken::Func(name) => {
            if is_agg_func(name) {
                out.insert(Bucket::AggFunc);
            } else {
                out.insert(Bucket::FuncOther);
            }
        }
        SkelToken::Punct(p) if p == "," && ctx.in_select_list => {
            out.insert(Bucket::PunctSelect);
        }
        _ => {}
    }
}

fn bucket_set(
    edit: &EditRecord,
    src: &[SkelToken],
    src_ctx: &[TokenContext],
    tgt: &[SkelToken],
    tgt_ctx: &[TokenContext],
) -> BTreeSet<Bucket> {
    let mut out = BTreeSet::new();
    for i in edit.src_span.0..edit.src_span.1 {
        token_buckets(&src[i], src_ctx[i], &mut out);
    }
    for j in edit.tgt_span.0..edit.tgt_span.1 {
        token_buckets(&tgt[j], tgt_ctx[j], &mut out);
    }
    if out.is_empty() {
        out.insert(Bucket::Other);
    }
    out
}

/// Replays `script` against `src`, splicing in target tokens from `tgt`.
pub fn replay_script(
    src: &AlignmentSkeleton,
    tgt: &AlignmentSkeleton,
    script: &[EditRecord],
) -> AlignmentSkeleton {
    let mut out: Vec<SkelToken> = Vec::new();
    let mut pos = 0usize;
    for edit in script {
        let (s0, s1) = edit.src_span;
        let (t0, t1) = edit.tgt_span;
        out.extend_from_slice(&src.tokens[pos..s0]);
        out.extend_from_slice(&tgt.tokens[t0..t1]);
        pos = s1;
    }
    out.extend_from_slice(&src.tokens[pos..]);
    AlignmentSkeleton { tokens: out }
}
