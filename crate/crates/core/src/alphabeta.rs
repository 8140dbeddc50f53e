//! Alpha-beta windows, the result predicates that say when a value is an
//! acceptable approximation, and the fail-soft / fail-hard searches.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reference::negamax;
use crate::tree::{Node, Score};

/// An open interval `(alpha, beta)` with `alpha < beta`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawWindow", into = "RawWindow")]
pub struct Window {
    alpha: Score,
    beta: Score,
}

#[derive(Serialize, Deserialize)]
struct RawWindow {
    alpha: i64,
    beta: i64,
}

impl TryFrom<RawWindow> for Window {
    type Error = Error;

    fn try_from(w: RawWindow) -> Result<Window> {
        Window::new(w.alpha, w.beta)
    }
}

impl From<Window> for RawWindow {
    fn from(w: Window) -> RawWindow {
        RawWindow {
            alpha: w.alpha.into(),
            beta: w.beta.into(),
        }
    }
}

impl Window {
    pub fn new(alpha: i64, beta: i64) -> Result<Window> {
        Window::from_scores(Score::new(alpha)?, Score::new(beta)?)
    }

    pub fn from_scores(alpha: Score, beta: Score) -> Result<Window> {
        if alpha >= beta {
            return Err(Error::InvalidWindow {
                alpha: alpha.into(),
                beta: beta.into(),
            });
        }
        Ok(Window { alpha, beta })
    }

    /// `(-INFINITY + 1, INFINITY)`: every value is computed exactly.
    pub fn full() -> Window {
        Window {
            alpha: -Score::INFINITY.pred(),
            beta: Score::INFINITY,
        }
    }

    pub fn alpha(&self) -> Score {
        self.alpha
    }

    pub fn beta(&self) -> Score {
        self.beta
    }

    pub fn contains(&self, x: Score) -> bool {
        self.alpha < x && x < self.beta
    }
}

impl Score {
    pub(crate) fn pred(self) -> Score {
        Score::new(self.get() as i64 - 1).expect("pred of -INFINITY")
    }
}

/// `x` is an acceptable approximation of the exact value `e` for window `w`:
/// `(e ≤ x ≤ α) ∨ (α < e = x < β) ∨ (β ≤ x ≤ e)`.
pub fn is_ab_result(x: Score, e: Score, w: Window) -> bool {
    let (a, b) = (w.alpha, w.beta);
    (e <= x && x <= a) || (a < e && e == x && x < b) || (b <= x && x <= e)
}

pub fn is_negamax_ab_result(x: Score, u: &Node, w: Window) -> Result<bool> {
    u.check_searchable()?;
    Ok(is_ab_result(x, negamax(u), w))
}

/// Best negamax value over the first `count` children of `u`.
pub fn pnm(u: &Node, count: usize) -> Result<Score> {
    u.check_searchable()?;
    if count == 0 || count > u.children().len() {
        return Err(Error::ChildIndex {
            index: count,
            len: u.children().len(),
        });
    }
    Ok(pnm_unchecked(u, count))
}

pub(crate) fn pnm_unchecked(u: &Node, count: usize) -> Score {
    u.children()[..count]
        .iter()
        .map(|v| -negamax(v))
        .max()
        .unwrap()
}

pub fn is_partial_negamax_ab_result(x: Score, u: &Node, count: usize, w: Window) -> Result<bool> {
    Ok(is_ab_result(x, pnm(u, count)?, w))
}

/// Fail-soft alpha-beta: the returned value may lie outside the window and
/// is then a bound on the depth-limited negamax value.
pub fn alphabeta_failsoft(u: &Node, w: Window, depth: usize) -> Result<Score> {
    u.check_searchable()?;
    Ok(failsoft(u, w.alpha, w.beta, depth))
}

fn failsoft(u: &Node, alpha: Score, beta: Score, depth: usize) -> Score {
    if depth == 0 || u.is_leaf() {
        return u.signed_eval();
    }
    let mut value = Score::NEG_INFINITY;
    for v in u.children() {
        value = value.max(-failsoft(v, -beta, -alpha.max(value), depth - 1));
        if value >= beta {
            break;
        }
    }
    value
}

/// Fail-hard alpha-beta: the result is always clamped into `[alpha, beta]`.
pub fn alphabeta_failhard(u: &Node, w: Window, depth: usize) -> Result<Score> {
    u.check_searchable()?;
    Ok(failhard(u, w.alpha, w.beta, depth))
}

fn failhard(u: &Node, mut alpha: Score, beta: Score, depth: usize) -> Score {
    if depth == 0 || u.is_leaf() {
        return u.signed_eval().clamp(alpha, beta);
    }
    for v in u.children() {
        let value = -failhard(v, -beta, -alpha, depth - 1);
        if value >= beta {
            return beta;
        }
        alpha = alpha.max(value);
    }
    alpha
}
