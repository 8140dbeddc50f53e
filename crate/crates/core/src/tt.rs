//! Transposition tables and the table-based negamax searches.
//!
//! Two searches are provided. [`negamax_ttw`] returns stored results only
//! when they decide the current window on their own. [`negamax_ttm`] uses
//! stored bounds to narrow the window, propagates values fail-soft,
//! classifies results against the current alpha and never overwrites a
//! deeper entry. [`negamax_ttw_hybrid`] adds the last three of those
//! behaviours to the first search, individually selectable.
//!
//! Tables are moved in and returned, so a sequence of calls threads one
//! table through explicitly.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::alphabeta::Window;
use crate::error::{Error, Result};
use crate::format;
use crate::tree::{Node, Score};
use crate::witness;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    Exact,
    Lowerbound,
    Upperbound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TableEntry {
    pub value: Score,
    pub depth: usize,
    pub flag: Flag,
}

impl TableEntry {
    pub fn new(value: Score, depth: usize, flag: Flag) -> TableEntry {
        TableEntry { value, depth, flag }
    }
}

/// Map from trees (by structural identity) to stored results.
///
/// Buckets are keyed by fingerprint and resolved by full structural
/// comparison, so fingerprint collisions cannot alias entries. Iteration
/// order is by fingerprint and is deterministic.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TranspositionTable {
    buckets: BTreeMap<u64, Vec<(Node, TableEntry)>>,
    len: usize,
}

impl TranspositionTable {
    pub fn new() -> TranspositionTable {
        TranspositionTable::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, u: &Node) -> Option<&TableEntry> {
        self.buckets
            .get(&u.fingerprint())?
            .iter()
            .find(|(k, _)| k == u)
            .map(|(_, e)| e)
    }

    pub fn contains(&self, u: &Node) -> bool {
        self.get(u).is_some()
    }

    pub fn insert(&mut self, u: Node, entry: TableEntry) -> Option<TableEntry> {
        let bucket = self.buckets.entry(u.fingerprint()).or_default();
        if let Some(slot) = bucket.iter_mut().find(|(k, _)| *k == u) {
            return Some(std::mem::replace(&mut slot.1, entry));
        }
        bucket.push((u, entry));
        self.len += 1;
        None
    }

    pub fn remove(&mut self, u: &Node) -> Option<TableEntry> {
        let fp = u.fingerprint();
        let bucket = self.buckets.get_mut(&fp)?;
        let pos = bucket.iter().position(|(k, _)| k == u)?;
        let (_, entry) = bucket.remove(pos);
        if bucket.is_empty() {
            self.buckets.remove(&fp);
        }
        self.len -= 1;
        Some(entry)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Node, &TableEntry)> {
        self.buckets.values().flatten().map(|(k, e)| (k, e))
    }

    /// Snapshot records sorted by fingerprint, then by canonical text.
    pub fn snapshot(&self) -> Vec<TableRecord> {
        let mut records: Vec<(u64, TableRecord)> = self
            .iter()
            .map(|(k, e)| {
                (
                    k.fingerprint(),
                    TableRecord {
                        tree: format::serialize(k),
                        value: e.value,
                        depth: e.depth,
                        flag: e.flag,
                    },
                )
            })
            .collect();
        records.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.tree.cmp(&b.1.tree)));
        records.into_iter().map(|(_, r)| r).collect()
    }

    pub fn from_snapshot(records: &[TableRecord]) -> Result<TranspositionTable> {
        let mut table = TranspositionTable::new();
        for r in records {
            let key = format::parse(&r.tree)?;
            if table
                .insert(key, TableEntry::new(r.value, r.depth, r.flag))
                .is_some()
            {
                return Err(Error::Contract(format!("duplicate table key {}", r.tree)));
            }
        }
        Ok(table)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.snapshot()).expect("table records serialize")
    }

    pub fn from_json(text: &str) -> Result<TranspositionTable> {
        let records: Vec<TableRecord> = serde_json::from_str(text)?;
        TranspositionTable::from_snapshot(&records)
    }
}

/// One entry of a table snapshot. `tree` holds the canonical tree text.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRecord {
    pub tree: String,
    pub value: Score,
    pub depth: usize,
    pub flag: Flag,
}

/// Behaviours of [`negamax_ttm`] that can be grafted onto
/// [`negamax_ttw`] one at a time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HybridOptions {
    /// Loop with `value := max(value, -search(v, -β, -max(α, value)))` and
    /// cut off on `value ≥ β`, leaving `α` untouched.
    pub failsoft_propagation: bool,
    /// Classify the stored flag against the loop's current `α` instead of
    /// the `α` the call started with.
    pub current_alpha_flags: bool,
    /// Only store when there is no entry or the existing one is not deeper.
    pub depth_preserving_updates: bool,
}

impl HybridOptions {
    pub const NONE: HybridOptions = HybridOptions {
        failsoft_propagation: false,
        current_alpha_flags: false,
        depth_preserving_updates: false,
    };

    pub const ALL: HybridOptions = HybridOptions {
        failsoft_propagation: true,
        current_alpha_flags: true,
        depth_preserving_updates: true,
    };

    /// All eight combinations, in binary counting order.
    pub fn all_combinations() -> impl Iterator<Item = HybridOptions> {
        (0..8u8).map(|bits| HybridOptions {
            failsoft_propagation: bits & 1 != 0,
            current_alpha_flags: bits & 2 != 0,
            depth_preserving_updates: bits & 4 != 0,
        })
    }
}

/// Which bound case the store classification tests first.
///
/// With flags classified against the current `α` the two bound cases can
/// both hold, and only [`FlagOrder::LowerFirst`] is sound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FlagOrder {
    UpperFirst,
    LowerFirst,
}

impl FlagOrder {
    /// The order used by [`negamax_ttw_hybrid`] for the given options.
    pub fn for_options(opts: HybridOptions) -> FlagOrder {
        if opts.current_alpha_flags {
            FlagOrder::LowerFirst
        } else {
            FlagOrder::UpperFirst
        }
    }

    fn classify(self, value: Score, alpha: Score, beta: Score) -> Flag {
        let upper = value <= alpha;
        let lower = value >= beta;
        match self {
            FlagOrder::UpperFirst if upper => Flag::Upperbound,
            FlagOrder::UpperFirst if lower => Flag::Lowerbound,
            FlagOrder::LowerFirst if lower => Flag::Lowerbound,
            FlagOrder::LowerFirst if upper => Flag::Upperbound,
            _ => Flag::Exact,
        }
    }
}

/// Contract checks run on every recursive call of [`negamax_ttw_checked`].
/// Each check enumerates expansions, bounded by `guard`.
#[derive(Clone, Copy, Debug)]
struct Ghost {
    guard: u64,
}

fn entry_check(u: &Node, w: Window) -> Result<()> {
    u.check_searchable()?;
    debug_assert!(w.alpha() < w.beta());
    Ok(())
}

/// Table-based negamax that returns stored results only when they settle
/// the window directly.
pub fn negamax_ttw(
    u: &Node,
    w: Window,
    depth: usize,
    table: TranspositionTable,
) -> Result<(Score, TranspositionTable)> {
    negamax_ttw_variant(
        u,
        w,
        depth,
        table,
        HybridOptions::NONE,
        FlagOrder::UpperFirst,
    )
}

pub fn negamax_ttw_hybrid(
    u: &Node,
    w: Window,
    depth: usize,
    table: TranspositionTable,
    opts: HybridOptions,
) -> Result<(Score, TranspositionTable)> {
    negamax_ttw_variant(u, w, depth, table, opts, FlagOrder::for_options(opts))
}

/// [`negamax_ttw_hybrid`] with an explicit flag classification order.
/// `FlagOrder::UpperFirst` together with `current_alpha_flags` is unsound;
/// it exists so the fuzzer can demonstrate that.
pub fn negamax_ttw_variant(
    u: &Node,
    w: Window,
    depth: usize,
    mut table: TranspositionTable,
    opts: HybridOptions,
    order: FlagOrder,
) -> Result<(Score, TranspositionTable)> {
    entry_check(u, w)?;
    let mut search = Ttw {
        table: &mut table,
        opts,
        order,
        ghost: None,
    };
    let value = search.run(u, w.alpha(), w.beta(), depth)?;
    Ok((value, table))
}

/// [`negamax_ttw`] with contract checking: table validity on entry, and at
/// every loop iteration the existence of an expansion for which the running
/// value is a partial alpha-beta result. Exponential; for tests only.
pub fn negamax_ttw_checked(
    u: &Node,
    w: Window,
    depth: usize,
    mut table: TranspositionTable,
    guard: u64,
) -> Result<(Score, TranspositionTable)> {
    entry_check(u, w)?;
    let mut search = Ttw {
        table: &mut table,
        opts: HybridOptions::NONE,
        order: FlagOrder::UpperFirst,
        ghost: Some(Ghost { guard }),
    };
    let value = search.run(u, w.alpha(), w.beta(), depth)?;
    Ok((value, table))
}

struct Ttw<'t> {
    table: &'t mut TranspositionTable,
    opts: HybridOptions,
    order: FlagOrder,
    ghost: Option<Ghost>,
}

impl Ttw<'_> {
    fn run(&mut self, u: &Node, alpha0: Score, beta: Score, depth: usize) -> Result<Score> {
        if let Some(g) = self.ghost {
            for (key, entry) in self.table.iter() {
                let report = witness::check_valid_table_entry(entry, key, g.guard)?;
                if report.verdict() == witness::Verdict::Refuted {
                    return Err(Error::Contract(format!(
                        "table entry {entry:?} for {key} has no witness"
                    )));
                }
            }
        }

        if let Some(t) = self.table.get(u) {
            if t.depth >= depth {
                match t.flag {
                    Flag::Exact => return Ok(t.value),
                    Flag::Lowerbound if t.value >= beta => return Ok(t.value),
                    Flag::Upperbound if t.value <= alpha0 => return Ok(t.value),
                    _ => {}
                }
            }
        }

        if depth == 0 || u.is_leaf() {
            return Ok(u.signed_eval());
        }

        let mut value = Score::NEG_INFINITY;
        let mut alpha = alpha0;
        for (i, v) in u.children().iter().enumerate() {
            if self.opts.failsoft_propagation {
                value = value.max(-self.run(v, -beta, -alpha.max(value), depth - 1)?);
                self.check_loop(u, value, i + 1, alpha0, beta, depth)?;
                if value >= beta {
                    break;
                }
            } else {
                value = value.max(-self.run(v, -beta, -alpha, depth - 1)?);
                alpha = alpha.max(value);
                self.check_loop(u, value, i + 1, alpha0, beta, depth)?;
                if alpha >= beta {
                    break;
                }
            }
        }

        let flag_alpha = if self.opts.current_alpha_flags {
            alpha
        } else {
            alpha0
        };
        let flag = self.order.classify(value, flag_alpha, beta);
        let store = !self.opts.depth_preserving_updates
            || self.table.get(u).is_none_or(|t| t.depth <= depth);
        if store {
            self.table
                .insert(u.clone(), TableEntry::new(value, depth, flag));
        }
        Ok(value)
    }

    fn check_loop(
        &self,
        u: &Node,
        value: Score,
        done: usize,
        alpha0: Score,
        beta0: Score,
        depth: usize,
    ) -> Result<()> {
        let Some(g) = self.ghost else {
            return Ok(());
        };
        let w = Window::from_scores(alpha0, beta0)?;
        let report = witness::check_partial_result(value, u, done, w, depth, g.guard)?;
        if report.verdict() == witness::Verdict::Refuted {
            return Err(Error::Contract(format!(
                "after {done} children the value {value} is not a partial result of any expansion of {u}"
            )));
        }
        Ok(())
    }
}

/// Table-based negamax that narrows the window with stored bounds.
///
/// Carries no witness-correctness guarantee.
pub fn negamax_ttm(
    u: &Node,
    w: Window,
    depth: usize,
    mut table: TranspositionTable,
) -> Result<(Score, TranspositionTable)> {
    entry_check(u, w)?;
    let value = ttm(u, w.alpha(), w.beta(), depth, &mut table);
    Ok((value, table))
}

fn ttm(
    u: &Node,
    mut alpha: Score,
    mut beta: Score,
    depth: usize,
    table: &mut TranspositionTable,
) -> Score {
    if let Some(t) = table.get(u) {
        if t.depth >= depth {
            match t.flag {
                Flag::Exact => return t.value,
                Flag::Lowerbound => alpha = alpha.max(t.value),
                Flag::Upperbound => beta = beta.min(t.value),
            }
            if alpha >= beta {
                return t.value;
            }
        }
    }

    if depth == 0 || u.is_leaf() {
        return u.signed_eval();
    }

    let mut value = Score::NEG_INFINITY;
    for v in u.children() {
        value = value.max(-ttm(v, -beta, -alpha.max(value), depth - 1, table));
        if value >= beta {
            break;
        }
    }

    let mut flag = Flag::Exact;
    if value <= alpha {
        flag = Flag::Upperbound;
    }
    if value >= beta {
        flag = Flag::Lowerbound;
    }
    if table.get(u).is_none_or(|t| t.depth <= depth) {
        table.insert(u.clone(), TableEntry::new(value, depth, flag));
    }
    value
}

/// Removes a seeded random subset of entries, modelling eviction.
pub fn perturb_table(table: TranspositionTable, seed: u64) -> TranspositionTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = TranspositionTable::new();
    for (k, e) in table.iter() {
        if rng.gen_bool(0.5) {
            out.insert(k.clone(), *e);
        }
    }
    out
}
