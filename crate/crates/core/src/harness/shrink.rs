use super::fuzz::{run_schedule, Algorithm, Violation, ViolationKind};
use super::schedule::{Call, CallSchedule};
use crate::alphabeta::Window;
use crate::error::{Error, Result};
use crate::tree::Node;

/// Greedily minimizes a violation.
///
/// Reductions: shorten the schedule (drop a call, drop a perturbation,
/// lower a depth, move window bounds toward zero), drop a subtree
/// everywhere it occurs, replace a subtree by a leaf everywhere, and move
/// evaluations toward zero. A reduction is
/// kept iff the schedule still produces a violation of the same kind.
/// Every reduction strictly decreases a well-founded measure, so the loop
/// reaches a fixpoint.
pub fn shrink(v: &Violation, guard: u64) -> Result<Violation> {
    let mut best = reproduce(&v.tree, &v.schedule, v.algorithm, v.kind, guard)?
        .ok_or_else(|| Error::Contract("violation does not reproduce".into()))?;
    'outer: loop {
        for (tree, schedule) in candidates(&best.tree, &best.schedule) {
            if let Some(found) = reproduce(&tree, &schedule, v.algorithm, v.kind, guard)? {
                best = found;
                continue 'outer;
            }
        }
        return Ok(best);
    }
}

fn reproduce(
    tree: &Node,
    schedule: &CallSchedule,
    algorithm: Algorithm,
    kind: ViolationKind,
    guard: u64,
) -> Result<Option<Violation>> {
    Ok(run_schedule(tree, schedule, algorithm, guard)?
        .violation
        .filter(|found| found.kind == kind))
}

fn candidates(tree: &Node, schedule: &CallSchedule) -> Vec<(Node, CallSchedule)> {
    let mut out = Vec::new();
    let calls = &schedule.calls;
    let with_call = |i: usize, edit: &dyn Fn(&mut Call)| {
        let mut s = schedule.clone();
        edit(&mut s.calls[i]);
        (tree.clone(), s)
    };

    // Coarse reductions first: they shrink the most per check.
    if calls.len() > 1 {
        for i in 0..calls.len() {
            let mut s = schedule.clone();
            s.calls.remove(i);
            out.push((tree.clone(), s));
        }
    }
    for (i, c) in calls.iter().enumerate() {
        if c.perturb_seed.is_some() {
            out.push(with_call(i, &|c| c.perturb_seed = None));
        }
    }
    let subtrees = tree.distinct_subtrees();
    for s in subtrees.iter().skip(1) {
        out.push((tree.remove_all(s), schedule.clone()));
    }
    for s in subtrees.iter().filter(|s| !s.is_leaf()) {
        out.push((tree.replace_all(s, &s.to_leaf()), schedule.clone()));
    }

    for (i, c) in calls.iter().enumerate() {
        if c.depth > 0 {
            out.push(with_call(i, &|c| c.depth -= 1));
        }
        for w in smaller_windows(c.window) {
            out.push(with_call(i, &|c| c.window = w));
        }
    }
    for s in &subtrees {
        for t in toward_zero(s.eval().get() as i64) {
            let smaller = s.with_eval(t).expect("closer to zero stays in range");
            out.push((tree.replace_all(s, &smaller), schedule.clone()));
        }
    }
    out
}

/// Bounds moved toward zero. The full window counts as smallest.
fn smaller_windows(w: Window) -> Vec<Window> {
    let full = Window::full();
    if w == full {
        return Vec::new();
    }
    let (a, b) = (w.alpha().get() as i64, w.beta().get() as i64);
    let moved_alpha = toward_zero(a).into_iter().map(|x| (x, b));
    let moved_beta = toward_zero(b).into_iter().map(|x| (a, x));
    std::iter::once(full)
        .chain(
            moved_alpha
                .chain(moved_beta)
                .filter_map(|(x, y)| Window::new(x, y).ok())
                .filter(|n| *n != full),
        )
        .collect()
}

/// `x - d` for `d = x, x/2, x/4, ..., ±1`: nearest zero first, then
/// progressively closer to `x`.
fn toward_zero(x: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let mut d = x;
    while d != 0 {
        out.push(x - d);
        d /= 2;
    }
    out
}
