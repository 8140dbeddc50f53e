//! Reference minimax and negamax.
//!
//! The `*_spec` functions are direct recursive definitions and serve as the
//! oracle for every other search in the crate. The `*_alg` functions are the
//! imperative loop formulations with `±INFINITY` sentinels.

use crate::error::Result;
use crate::tree::{Color, Node, Score, MAX_SEARCH_HEIGHT};
use crate::Error;

fn check_height(u: &Node) -> Result<()> {
    if u.height() > MAX_SEARCH_HEIGHT {
        return Err(Error::TooDeep {
            height: u.height(),
            limit: MAX_SEARCH_HEIGHT,
        });
    }
    Ok(())
}

pub fn minimax_spec(u: &Node) -> Result<Score> {
    check_height(u)?;
    Ok(minimax(u))
}

pub(crate) fn minimax(u: &Node) -> Score {
    let values = u.children().iter().map(minimax);
    match u.color() {
        _ if u.is_leaf() => u.eval(),
        Color::Min => values.min().unwrap(),
        Color::Max => values.max().unwrap(),
    }
}

pub fn minimax_alg(u: &Node) -> Result<Score> {
    check_height(u)?;
    Ok(minimax_loop(u))
}

fn minimax_loop(u: &Node) -> Score {
    if u.is_leaf() {
        return u.eval();
    }
    if u.color() == Color::Min {
        let mut value = Score::INFINITY;
        for v in u.children() {
            value = value.min(minimax_loop(v));
        }
        value
    } else {
        let mut value = Score::NEG_INFINITY;
        for v in u.children() {
            value = value.max(minimax_loop(v));
        }
        value
    }
}

/// Negamax value of a turn-based tree.
pub fn negamax_spec(u: &Node) -> Result<Score> {
    u.check_searchable()?;
    Ok(negamax(u))
}

/// Unchecked negamax; callers guarantee a turn-based tree of searchable height.
pub(crate) fn negamax(u: &Node) -> Score {
    if u.is_leaf() {
        return u.signed_eval();
    }
    u.children().iter().map(|v| -negamax(v)).max().unwrap()
}

pub fn negamax_alg(u: &Node) -> Result<Score> {
    u.check_searchable()?;
    Ok(negamax_loop(u))
}

fn negamax_loop(u: &Node) -> Score {
    if u.is_leaf() {
        return u.signed_eval();
    }
    let mut value = Score::NEG_INFINITY;
    for v in u.children() {
        value = value.max(-negamax_loop(v));
    }
    value
}

pub fn minimax_depth(u: &Node, depth: usize) -> Result<Score> {
    minimax_spec(&u.truncate(depth))
}

pub fn negamax_depth(u: &Node, depth: usize) -> Result<Score> {
    negamax_spec(&u.truncate(depth))
}
