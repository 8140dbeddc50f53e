use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::generator::{gen_tree, GeneratorConfig};
use super::schedule::{gen_schedule, Call, CallSchedule};
use crate::alphabeta::{alphabeta_failhard, alphabeta_failsoft, is_negamax_ab_result, Window};
use crate::error::{Error, Result};
use crate::tree::{Node, Score};
use crate::tt::{
    negamax_ttm, negamax_ttw, negamax_ttw_hybrid, negamax_ttw_variant, perturb_table, FlagOrder,
    HybridOptions, TableEntry, TranspositionTable,
};
use crate::witness::{check_negamax_tt_result, check_valid_table_entry, Verdict, WitnessReport};

/// Search algorithms the fuzzer can drive.
///
/// Text form: `ttw`, `ttm`, `failsoft`, `failhard`, `ttw-hybrid[-FLAGS]` and
/// `ttw-swapped[-FLAGS]`, where `FLAGS` is any of `s` (fail-soft
/// propagation), `a` (current-alpha flags) and `d` (depth-preserving
/// updates). `ttw-swapped` tests the upper-bound case first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Ttw,
    Ttm,
    TtwHybrid(HybridOptions),
    TtwSwapped(HybridOptions),
    FailSoft,
    FailHard,
}

impl Algorithm {
    pub fn uses_table(self) -> bool {
        !matches!(self, Algorithm::FailSoft | Algorithm::FailHard)
    }

    /// Runs one top-level call.
    pub fn search(
        self,
        u: &Node,
        w: Window,
        depth: usize,
        table: TranspositionTable,
    ) -> Result<(Score, TranspositionTable)> {
        match self {
            Algorithm::Ttw => negamax_ttw(u, w, depth, table),
            Algorithm::Ttm => negamax_ttm(u, w, depth, table),
            Algorithm::TtwHybrid(o) => negamax_ttw_hybrid(u, w, depth, table, o),
            Algorithm::TtwSwapped(o) => {
                negamax_ttw_variant(u, w, depth, table, o, FlagOrder::UpperFirst)
            }
            Algorithm::FailSoft => Ok((alphabeta_failsoft(u, w, depth)?, table)),
            Algorithm::FailHard => Ok((alphabeta_failhard(u, w, depth)?, table)),
        }
    }
}

fn flags(o: HybridOptions) -> String {
    let mut s = String::new();
    if o.failsoft_propagation {
        s.push('s');
    }
    if o.current_alpha_flags {
        s.push('a');
    }
    if o.depth_preserving_updates {
        s.push('d');
    }
    if s.is_empty() {
        s
    } else {
        format!("-{s}")
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Ttw => f.write_str("ttw"),
            Algorithm::Ttm => f.write_str("ttm"),
            Algorithm::TtwHybrid(o) => write!(f, "ttw-hybrid{}", flags(*o)),
            Algorithm::TtwSwapped(o) => write!(f, "ttw-swapped{}", flags(*o)),
            Algorithm::FailSoft => f.write_str("failsoft"),
            Algorithm::FailHard => f.write_str("failhard"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Algorithm> {
        let unknown = || Error::UnknownAlgorithm(s.to_string());
        let parse_flags = |rest: &str| -> Result<HybridOptions> {
            let letters = match rest {
                "" => "",
                r => r.strip_prefix('-').ok_or_else(unknown)?,
            };
            let mut o = HybridOptions::NONE;
            for c in letters.chars() {
                let slot = match c {
                    's' => &mut o.failsoft_propagation,
                    'a' => &mut o.current_alpha_flags,
                    'd' => &mut o.depth_preserving_updates,
                    _ => return Err(unknown()),
                };
                if std::mem::replace(slot, true) {
                    return Err(unknown());
                }
            }
            Ok(o)
        };
        match s {
            "ttw" => Ok(Algorithm::Ttw),
            "ttm" => Ok(Algorithm::Ttm),
            "failsoft" => Ok(Algorithm::FailSoft),
            "failhard" => Ok(Algorithm::FailHard),
            _ => {
                if let Some(rest) = s.strip_prefix("ttw-hybrid") {
                    Ok(Algorithm::TtwHybrid(parse_flags(rest)?))
                } else if let Some(rest) = s.strip_prefix("ttw-swapped") {
                    Ok(Algorithm::TtwSwapped(parse_flags(rest)?))
                } else {
                    Err(unknown())
                }
            }
        }
    }
}

impl Serialize for Algorithm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Algorithm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Algorithm, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    /// A returned value has no justifying expansion.
    Result,
    /// A stored table entry has no justifying expansion.
    Table,
}

/// A reproducible failure of a correctness check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub algorithm: Algorithm,
    pub kind: ViolationKind,
    #[serde(with = "node_text")]
    pub tree: Node,
    pub schedule: CallSchedule,
    /// Index of the call whose result (or whose resulting table) failed.
    pub call: usize,
    /// The returned value, or the stored value for table violations.
    pub observed: Score,
    /// Table key and entry, for table violations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entry: Option<KeyedEntry>,
    pub report: WitnessReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyedEntry {
    #[serde(with = "node_text")]
    pub key: Node,
    #[serde(flatten)]
    pub entry: TableEntry,
}

impl Violation {
    pub fn verdict(&self) -> Verdict {
        self.report.verdict()
    }

    /// Depth and window of the failing check, as `(window, depth)`.
    pub fn probe(&self) -> (Window, usize) {
        let c = &self.schedule.calls[self.call];
        match &self.entry {
            Some(k) => (c.window, k.entry.depth),
            None => (c.window, c.depth),
        }
    }
}

pub(crate) mod node_text {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::format;
    use crate::tree::Node;

    pub fn serialize<S: Serializer>(u: &Node, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format::serialize(u))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Node, D::Error> {
        let text = String::deserialize(d)?;
        format::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Result of running a schedule with all checks.
#[derive(Clone, Debug, PartialEq)]
pub struct Replay {
    pub values: Vec<Score>,
    pub table: TranspositionTable,
    pub violation: Option<Violation>,
    /// Checks that hit the guard.
    pub unknown_checks: usize,
    pub checks: usize,
}

/// Runs `schedule` on `tree`, checking every returned value and, for table
/// algorithms, every table entry after each call. Stops at the first
/// violation.
pub fn run_schedule(
    tree: &Node,
    schedule: &CallSchedule,
    algorithm: Algorithm,
    guard: u64,
) -> Result<Replay> {
    let mut table = TranspositionTable::new();
    let mut replay = Replay {
        values: Vec::new(),
        table: TranspositionTable::new(),
        violation: None,
        unknown_checks: 0,
        checks: 0,
    };
    let violation = |call: usize, kind, observed, entry, report| Violation {
        algorithm,
        kind,
        tree: tree.clone(),
        schedule: schedule.clone(),
        call,
        observed,
        entry,
        report,
    };

    for (
        i,
        &Call {
            window,
            depth,
            perturb_seed,
        },
    ) in schedule.calls.iter().enumerate()
    {
        if let Some(seed) = perturb_seed {
            table = perturb_table(table, seed);
        }
        let before = table.clone();
        let (x, after) = algorithm.search(tree, window, depth, table)?;
        table = after;
        replay.values.push(x);

        let report = if algorithm.uses_table() {
            check_negamax_tt_result(x, tree, window, depth, guard)?
        } else {
            alpha_beta_report(algorithm, x, tree, window, depth)?
        };
        replay.checks += 1;
        match report.verdict() {
            Verdict::Satisfied => {}
            Verdict::Unknown => replay.unknown_checks += 1,
            Verdict::Refuted => {
                replay.violation = Some(violation(i, ViolationKind::Result, x, None, report));
                break;
            }
        }

        if let Some((bad, report)) = check_table(&table, &before, guard, &mut replay)? {
            let observed = bad.entry.value;
            replay.violation = Some(violation(
                i,
                ViolationKind::Table,
                observed,
                Some(bad),
                report,
            ));
            break;
        }
    }
    replay.table = table;
    Ok(replay)
}

// Entries unchanged since `before` were checked after an earlier call.
fn check_table(
    table: &TranspositionTable,
    before: &TranspositionTable,
    guard: u64,
    replay: &mut Replay,
) -> Result<Option<(KeyedEntry, WitnessReport)>> {
    for (key, entry) in table.iter() {
        if before.get(key) == Some(entry) {
            continue;
        }
        let report = check_valid_table_entry(entry, key, guard)?;
        replay.checks += 1;
        match report.verdict() {
            Verdict::Satisfied => {}
            Verdict::Unknown => replay.unknown_checks += 1,
            Verdict::Refuted => {
                let bad = KeyedEntry {
                    key: key.clone(),
                    entry: *entry,
                };
                return Ok(Some((bad, report)));
            }
        }
    }
    Ok(None)
}

fn alpha_beta_report(
    algorithm: Algorithm,
    x: Score,
    u: &Node,
    w: Window,
    depth: usize,
) -> Result<WitnessReport> {
    let truncated = u.truncate(depth);
    let mut ok = is_negamax_ab_result(x, &truncated, w)?;
    if algorithm == Algorithm::FailHard {
        ok &= w.alpha() <= x && x <= w.beta();
    }
    Ok(WitnessReport {
        satisfied: ok,
        witness: ok.then_some(truncated),
        expansions_examined: 1,
        exhausted: true,
    })
}

/// Summary of a fuzzing campaign.
#[derive(Clone, Debug, PartialEq)]
pub struct FuzzReport {
    pub algorithm: Algorithm,
    pub trials: u64,
    /// `(trial index, violation)` in trial order.
    pub violations: Vec<(u64, Violation)>,
    /// Trials in which at least one check hit the guard.
    pub unknown_trials: Vec<u64>,
    pub checks: u64,
}

/// Seed of trial `index` under master seed `seed`.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generates the tree and schedule of one trial.
pub fn trial_input(cfg: &GeneratorConfig, index: u64) -> Result<(Node, CallSchedule)> {
    let seed = trial_seed(cfg.seed, index);
    let tree = gen_tree(&cfg.with_seed(seed))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5c4e_d01e);
    let schedule = gen_schedule(&tree, &mut rng);
    Ok((tree, schedule))
}

/// Differential fuzzing of `algorithm` against the witness and alpha-beta
/// oracles. Trials run in parallel; results are reported in trial order.
pub fn fuzz(
    algorithm: Algorithm,
    cfg: &GeneratorConfig,
    trials: u64,
    guard: u64,
) -> Result<FuzzReport> {
    cfg.validate()?;
    if !cfg.turn_based {
        return Err(Error::Config(
            "negamax searches need turn-based trees".into(),
        ));
    }
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|i| {
            let (tree, schedule) = trial_input(cfg, i)?;
            run_schedule(&tree, &schedule, algorithm, guard)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = FuzzReport {
        algorithm,
        trials,
        violations: Vec::new(),
        unknown_trials: Vec::new(),
        checks: 0,
    };
    for (i, r) in (0u64..).zip(outcomes) {
        report.checks += r.checks as u64;
        if r.unknown_checks > 0 {
            report.unknown_trials.push(i);
        }
        if let Some(v) = r.violation {
            report.violations.push((i, v));
        }
    }
    Ok(report)
}

/// Outcome of [`find_ttm_counterexample`].
#[derive(Clone, Debug, PartialEq)]
pub enum CounterexampleSearch {
    Found { violation: Violation, trials: u64 },
    NotFound { trials: u64 },
}

const COUNTEREXAMPLE_SEED: u64 = 0x7d3a_91c5_0b2e_4f68;

/// Searches for an input on which [`negamax_ttm`] returns a value with no
/// justifying expansion.
///
/// The first half of the budget targets the known failure shape: a
/// subtree searched deep with a narrow window, leaving a lower bound in the
/// table, and then searched shallower with a wider window. The rest falls
/// back to general fuzzing with heavy duplication.
pub fn find_ttm_counterexample(budget: u64, guard: u64) -> Result<CounterexampleSearch> {
    find_counterexample(Algorithm::Ttm, budget, guard, COUNTEREXAMPLE_SEED)
}

/// [`find_ttm_counterexample`] for any table algorithm, with an explicit seed.
pub fn find_counterexample(
    algorithm: Algorithm,
    budget: u64,
    guard: u64,
    seed: u64,
) -> Result<CounterexampleSearch> {
    if budget == 0 {
        return Err(Error::Contract("budget must be at least 1".into()));
    }
    let directed = budget.div_ceil(2);
    const CHUNK: u64 = 512;

    let mut start = 0;
    while start < directed {
        let end = (start + CHUNK).min(directed);
        let found = (start..end)
            .into_par_iter()
            .map(|i| directed_trial(algorithm, seed, i, guard))
            .collect::<Result<Vec<_>>>()?;
        if let Some((i, v)) = (start..end).zip(found).find_map(|(i, v)| Some((i, v?))) {
            return Ok(CounterexampleSearch::Found {
                violation: v,
                trials: i + 1,
            });
        }
        start = end;
    }

    let cfg = GeneratorConfig {
        max_depth: 5,
        branching: (1, 3),
        eval_range: (-5, 5),
        duplicate_probability: 0.4,
        max_nodes: 200,
        seed,
        ..Default::default()
    };
    let mut start = 0;
    let rest = budget - directed;
    while start < rest {
        let end = (start + CHUNK).min(rest);
        let found = (start..end)
            .into_par_iter()
            .map(|i| {
                let (tree, schedule) = trial_input(&cfg, i)?;
                Ok(run_schedule(&tree, &schedule, algorithm, guard)?.violation)
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some((i, v)) = (start..end).zip(found).find_map(|(i, v)| Some((i, v?))) {
            return Ok(CounterexampleSearch::Found {
                violation: v,
                trials: directed + i + 1,
            });
        }
        start = end;
    }
    Ok(CounterexampleSearch::NotFound { trials: budget })
}

fn directed_trial(
    algorithm: Algorithm,
    seed: u64,
    index: u64,
    guard: u64,
) -> Result<Option<Violation>> {
    let s = trial_seed(seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(s);
    let cfg = GeneratorConfig {
        max_depth: rng.gen_range(2..=4),
        branching: (1, 3),
        eval_range: (-2, 6),
        duplicate_probability: 0.3,
        max_nodes: 120,
        seed: s,
        ..Default::default()
    };
    let tree = gen_tree(&cfg)?;
    if tree.height() < 2 {
        return Ok(None);
    }
    let deep = tree.height().clamp(2, 4);
    let shallow = deep - 2;
    let (narrow, wide) = if index.is_multiple_of(2) {
        (Window::new(0, 2)?, Window::new(0, 5)?)
    } else {
        let alpha = rng.gen_range(-3..=3);
        let b1 = alpha + rng.gen_range(1..=3);
        let b2 = b1 + rng.gen_range(1..=4);
        (Window::new(alpha, b1)?, Window::new(alpha, b2)?)
    };

    // The pattern needs the first call to fail high at the root.
    let (value, _) = algorithm.search(&tree, narrow, deep, TranspositionTable::new())?;
    if value < narrow.beta() {
        return Ok(None);
    }
    let schedule = CallSchedule {
        calls: vec![
            Call {
                window: narrow,
                depth: deep,
                perturb_seed: None,
            },
            Call {
                window: wide,
                depth: shallow,
                perturb_seed: None,
            },
        ],
    };
    let replay = run_schedule(&tree, &schedule, algorithm, guard)?;
    // For TTM only the reuse of the stored bound by the second call counts.
    Ok(replay.violation.filter(|v| {
        algorithm != Algorithm::Ttm || (v.kind == ViolationKind::Result && v.call == 1)
    }))
}
