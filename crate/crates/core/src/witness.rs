//! All-or-none expansions and the brute-force witness checker.
//!
//! An all-or-none expansion of `(u, d)` is a tree `u'` with
//! `⌊u⌋_d ⊆ u' ⊆ u` in which every node keeps either all of its children
//! from `u` or none of them. A value returned by a table-based search is
//! correct when some expansion justifies it, and a stored table entry is
//! valid when some expansion at the entry's depth justifies its bound.
//!
//! Both questions are existential over an exponentially large set, so the
//! checkers take a `guard` and answer [`Verdict::Unknown`] instead of
//! enumerating past it.
//!
//! Enumeration order is fixed: at a node below the horizon the "stop"
//! choice comes first, and combinations of child expansions are produced
//! in lexicographic order with the last child varying fastest.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::alphabeta::{is_ab_result, Window};
use crate::error::{Error, Result};
use crate::format;
use crate::tree::{Node, Score};
use crate::tt::{Flag, TableEntry, TranspositionTable};

/// Enumeration stopped after `guard` expansions with more remaining.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GuardExceeded {
    pub guard: u64,
}

impl fmt::Display for GuardExceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "more than {} expansions", self.guard)
    }
}

impl std::error::Error for GuardExceeded {}

pub fn is_aon_expansion(expansion: &Node, u: &Node, depth: usize) -> bool {
    if expansion.eval() != u.eval() || expansion.color() != u.color() {
        return false;
    }
    let (ours, theirs) = (expansion.children(), u.children());
    let corresponds = |d: usize| {
        ours.len() == theirs.len()
            && ours
                .iter()
                .zip(theirs)
                .all(|(a, b)| is_aon_expansion(a, b, d))
    };
    if depth > 0 {
        corresponds(depth - 1)
    } else {
        ours.is_empty() || corresponds(0)
    }
}

/// Number of all-or-none expansions of `(u, depth)`, saturating.
pub fn count_aon_expansions(u: &Node, depth: usize) -> u128 {
    if u.is_leaf() {
        return 1;
    }
    let below = depth.saturating_sub(1);
    let product = u.children().iter().fold(1u128, |acc, c| {
        acc.saturating_mul(count_aon_expansions(c, below))
    });
    if depth == 0 {
        product.saturating_add(1)
    } else {
        product
    }
}

/// Iterator over the expansions of `(u, depth)`.
///
/// Yields at most `guard` trees; if more exist, one final
/// `Err(GuardExceeded)` follows.
pub struct AonExpansions {
    items: std::vec::IntoIter<Node>,
    exceeded: Option<GuardExceeded>,
}

impl Iterator for AonExpansions {
    type Item = Result<Node, GuardExceeded>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.items.next() {
            Some(n) => Some(Ok(n)),
            None => self.exceeded.take().map(Err),
        }
    }
}

pub fn enumerate_aon_expansions(u: &Node, depth: usize, guard: u64) -> AonExpansions {
    let cap = usize::try_from(guard.max(1)).unwrap_or(usize::MAX);
    let (items, more) = expansion_prefix(u, depth, cap);
    AonExpansions {
        items: items.into_iter(),
        exceeded: more.then_some(GuardExceeded { guard }),
    }
}

/// The first `cap` expansions in enumeration order, and whether more exist.
///
/// Truncating each child's list to `cap` is enough: the first `cap`
/// combinations never index past position `cap - 1` of any factor.
fn expansion_prefix(u: &Node, depth: usize, cap: usize) -> (Vec<Node>, bool) {
    if u.is_leaf() {
        return (vec![u.clone()], false);
    }
    let mut out = Vec::new();
    if depth == 0 {
        out.push(u.to_leaf());
    }
    let below = depth.saturating_sub(1);
    let lists: Vec<(Vec<Node>, bool)> = u
        .children()
        .iter()
        .map(|c| expansion_prefix(c, below, cap))
        .collect();
    let mut more = lists.iter().any(|(_, m)| *m);
    let mut odo = Odometer::new(lists.iter().map(|(l, _)| l.len()).collect());
    loop {
        if out.len() >= cap {
            more |= !odo.done;
            break;
        }
        let Some(picks) = odo.current() else { break };
        out.push(
            u.with_children(
                lists
                    .iter()
                    .zip(picks)
                    .map(|((l, _), &i)| l[i].clone())
                    .collect(),
            ),
        );
        odo.advance();
    }
    (out, more)
}

/// Mixed-radix counter, last position fastest.
struct Odometer {
    radix: Vec<usize>,
    digits: Vec<usize>,
    done: bool,
}

impl Odometer {
    fn new(radix: Vec<usize>) -> Odometer {
        let done = radix.contains(&0);
        Odometer {
            digits: vec![0; radix.len()],
            radix,
            done,
        }
    }

    fn current(&self) -> Option<&[usize]> {
        (!self.done).then_some(&self.digits[..])
    }

    fn advance(&mut self) {
        for i in (0..self.digits.len()).rev() {
            self.digits[i] += 1;
            if self.digits[i] < self.radix[i] {
                return;
            }
            self.digits[i] = 0;
        }
        self.done = true;
    }
}

/// Negamax values of every expansion of one node, in enumeration order,
/// with enough structure to rebuild any expansion by index.
struct Space<'a> {
    node: &'a Node,
    stop: bool,
    children: Vec<Space<'a>>,
    values: Vec<Score>,
}

impl<'a> Space<'a> {
    fn build(u: &'a Node, depth: usize, guard: u64) -> Option<Space<'a>> {
        if u.is_leaf() {
            return Some(Space {
                node: u,
                stop: false,
                children: Vec::new(),
                values: vec![u.signed_eval()],
            });
        }
        let stop = depth == 0;
        let children = u
            .children()
            .iter()
            .map(|c| Space::build(c, depth.saturating_sub(1), guard))
            .collect::<Option<Vec<_>>>()?;
        let total = product_len(&children, guard)? + stop as u64;
        if total > guard {
            return None;
        }
        let mut values = Vec::with_capacity(total as usize);
        if stop {
            values.push(u.signed_eval());
        }
        let mut odo = Odometer::new(children.iter().map(|c| c.values.len()).collect());
        while let Some(picks) = odo.current() {
            let best = children
                .iter()
                .zip(picks)
                .map(|(c, &i)| -c.values[i])
                .max()
                .unwrap();
            values.push(best);
            odo.advance();
        }
        Some(Space {
            node: u,
            stop,
            children,
            values,
        })
    }

    fn tree(&self, index: usize) -> Node {
        if self.node.is_leaf() {
            return self.node.clone();
        }
        let mut k = index;
        if self.stop {
            if k == 0 {
                return self.node.to_leaf();
            }
            k -= 1;
        }
        let picks = decode(&self.children, k);
        self.node.with_children(
            self.children
                .iter()
                .zip(picks)
                .map(|(c, i)| c.tree(i))
                .collect(),
        )
    }
}

fn product_len(children: &[Space<'_>], guard: u64) -> Option<u64> {
    children.iter().try_fold(1u64, |acc, c| {
        let p = acc.checked_mul(c.values.len() as u64)?;
        (p <= guard).then_some(p)
    })
}

fn decode(children: &[Space<'_>], mut k: usize) -> Vec<usize> {
    let mut picks = vec![0; children.len()];
    for (i, c) in children.iter().enumerate().rev() {
        picks[i] = k % c.values.len();
        k /= c.values.len();
    }
    picks
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Satisfied,
    Refuted,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Refuted => "refuted",
            Verdict::Unknown => "unknown",
        })
    }
}

/// Outcome of a witness search.
///
/// `exhausted` is false exactly when the guard stopped the search, in which
/// case an unsatisfied report means "unknown" rather than "refuted".
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ReportRecord", into = "ReportRecord")]
pub struct WitnessReport {
    pub satisfied: bool,
    pub witness: Option<Node>,
    pub expansions_examined: u64,
    pub exhausted: bool,
}

impl WitnessReport {
    pub fn verdict(&self) -> Verdict {
        if self.satisfied {
            Verdict::Satisfied
        } else if self.exhausted {
            Verdict::Refuted
        } else {
            Verdict::Unknown
        }
    }

    fn unknown(guard: u64) -> WitnessReport {
        WitnessReport {
            satisfied: false,
            witness: None,
            expansions_examined: guard,
            exhausted: false,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ReportRecord {
    verdict: Verdict,
    witness: Option<String>,
    expansions_examined: u64,
    exhausted: bool,
}

impl From<WitnessReport> for ReportRecord {
    fn from(r: WitnessReport) -> ReportRecord {
        ReportRecord {
            verdict: r.verdict(),
            witness: r.witness.as_ref().map(format::serialize),
            expansions_examined: r.expansions_examined,
            exhausted: r.exhausted,
        }
    }
}

impl TryFrom<ReportRecord> for WitnessReport {
    type Error = Error;

    fn try_from(r: ReportRecord) -> Result<WitnessReport> {
        let witness = r.witness.as_deref().map(format::parse).transpose()?;
        let report = WitnessReport {
            satisfied: r.verdict == Verdict::Satisfied,
            witness,
            expansions_examined: r.expansions_examined,
            exhausted: r.exhausted,
        };
        if report.verdict() != r.verdict || report.satisfied != report.witness.is_some() {
            return Err(Error::Contract("inconsistent witness report".into()));
        }
        Ok(report)
    }
}

fn search(u: &Node, depth: usize, guard: u64, accept: impl Fn(Score) -> bool) -> WitnessReport {
    let Some(space) = Space::build(u, depth, guard) else {
        return WitnessReport::unknown(guard);
    };
    match space.values.iter().position(|&e| accept(e)) {
        Some(i) => WitnessReport {
            satisfied: true,
            witness: Some(space.tree(i)),
            expansions_examined: i as u64 + 1,
            exhausted: true,
        },
        None => WitnessReport {
            satisfied: false,
            witness: None,
            expansions_examined: space.values.len() as u64,
            exhausted: true,
        },
    }
}

/// Decides whether some expansion `u'` of `(u, depth)` makes `x` an
/// alpha-beta result for `w`.
pub fn check_negamax_tt_result(
    x: Score,
    u: &Node,
    w: Window,
    depth: usize,
    guard: u64,
) -> Result<WitnessReport> {
    u.check_searchable()?;
    Ok(search(u, depth, guard, |e| is_ab_result(x, e, w)))
}

/// Decides whether some expansion at the entry's depth justifies its bound.
pub fn check_valid_table_entry(t: &TableEntry, u: &Node, guard: u64) -> Result<WitnessReport> {
    u.check_searchable()?;
    let v = t.value;
    Ok(match t.flag {
        Flag::Upperbound => search(u, t.depth, guard, |e| v >= e),
        Flag::Exact => search(u, t.depth, guard, |e| v == e),
        Flag::Lowerbound => search(u, t.depth, guard, |e| v <= e),
    })
}

/// One report per entry, in table iteration order.
pub fn check_valid_table(
    table: &TranspositionTable,
    guard: u64,
) -> Result<Vec<(Node, WitnessReport)>> {
    table
        .iter()
        .map(|(k, e)| Ok((k.clone(), check_valid_table_entry(e, k, guard)?)))
        .collect()
}

/// Distinct negamax values over all expansions of `(u, depth)`.
pub fn witness_value_set(u: &Node, depth: usize, guard: u64) -> Result<BTreeSet<Score>> {
    u.check_searchable()?;
    let space =
        Space::build(u, depth, guard).ok_or(Error::GuardExceeded(GuardExceeded { guard }))?;
    Ok(space.values.into_iter().collect())
}

/// Decides whether some expansion `u'` of `(u, depth)` has `x` as an
/// alpha-beta result for the best value over its first `count` children.
/// Requires `depth ≥ 1`, an internal `u`, and `1 ≤ count ≤ |children|`.
pub fn check_partial_result(
    x: Score,
    u: &Node,
    count: usize,
    w: Window,
    depth: usize,
    guard: u64,
) -> Result<WitnessReport> {
    u.check_searchable()?;
    if count == 0 || count > u.children().len() {
        return Err(Error::ChildIndex {
            index: count,
            len: u.children().len(),
        });
    }
    if depth == 0 {
        return Err(Error::Contract("partial results need depth >= 1".into()));
    }
    let Some(children) = u
        .children()
        .iter()
        .map(|c| Space::build(c, depth - 1, guard))
        .collect::<Option<Vec<_>>>()
    else {
        return Ok(WitnessReport::unknown(guard));
    };
    if product_len(&children, guard).is_none() {
        return Ok(WitnessReport::unknown(guard));
    }
    let mut odo = Odometer::new(children.iter().map(|c| c.values.len()).collect());
    let mut examined = 0u64;
    while let Some(picks) = odo.current() {
        examined += 1;
        let partial = children[..count]
            .iter()
            .zip(picks)
            .map(|(c, &i)| -c.values[i])
            .max()
            .unwrap();
        if is_ab_result(x, partial, w) {
            let witness = u.with_children(
                children
                    .iter()
                    .zip(picks)
                    .map(|(c, &i)| c.tree(i))
                    .collect(),
            );
            return Ok(WitnessReport {
                satisfied: true,
                witness: Some(witness),
                expansions_examined: examined,
                exhausted: true,
            });
        }
        odo.advance();
    }
    Ok(WitnessReport {
        satisfied: false,
        witness: None,
        expansions_examined: examined,
        exhausted: true,
    })
}
