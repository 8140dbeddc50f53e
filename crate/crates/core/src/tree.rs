//! Immutable game trees.
//!
//! A [`Node`] is a plain value: evaluation, player to move and an ordered
//! list of children. Subtrees are reference counted so that duplicating a
//! subtree is cheap, but identity is always structural. Every node caches a
//! fingerprint computed bottom-up at construction time; it is used to key
//! transposition tables and as a fast path for equality.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Neg;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bound of the value domain. Search sentinels use `-INFINITY`.
pub const INFINITY: i32 = 1 << 20;

/// Largest legal leaf evaluation magnitude. Kept strictly below
/// [`INFINITY`] so the loop sentinel is never a legal evaluation.
pub const MAX_EVAL: i32 = INFINITY - 1;

/// Deepest tree the recursive searches accept.
pub const MAX_SEARCH_HEIGHT: usize = 512;

/// An integer in `[-INFINITY, INFINITY]`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(try_from = "i64", into = "i64")]
pub struct Score(i32);

impl Score {
    pub const INFINITY: Score = Score(INFINITY);
    pub const NEG_INFINITY: Score = Score(-INFINITY);
    pub const ZERO: Score = Score(0);

    pub fn new(value: i64) -> Result<Score> {
        if value.unsigned_abs() > INFINITY as u64 {
            return Err(Error::ValueOutOfRange {
                value,
                max: INFINITY as i64,
            });
        }
        Ok(Score(value as i32))
    }

    pub const fn get(self) -> i32 {
        self.0
    }
}

impl Neg for Score {
    type Output = Score;

    fn neg(self) -> Score {
        Score(-self.0)
    }
}

impl TryFrom<i64> for Score {
    type Error = Error;

    fn try_from(value: i64) -> Result<Score> {
        Score::new(value)
    }
}

impl From<Score> for i64 {
    fn from(s: Score) -> i64 {
        s.0 as i64
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Player to move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Max,
    Min,
}

impl Color {
    /// `+1` for [`Color::Max`], `-1` for [`Color::Min`].
    pub const fn sign(self) -> i32 {
        match self {
            Color::Max => 1,
            Color::Min => -1,
        }
    }

    pub fn from_sign(sign: i64) -> Option<Color> {
        match sign {
            1 => Some(Color::Max),
            -1 => Some(Color::Min),
            _ => None,
        }
    }

    pub const fn opponent(self) -> Color {
        match self {
            Color::Max => Color::Min,
            Color::Min => Color::Max,
        }
    }

    /// `sign · score`.
    pub fn apply(self, score: Score) -> Score {
        match self {
            Color::Max => score,
            Color::Min => -score,
        }
    }
}

struct NodeData {
    eval: Score,
    color: Color,
    children: Vec<Node>,
    fingerprint: u64,
    height: usize,
    size: u64,
}

/// A game tree. Cloning is `O(1)`.
#[derive(Clone)]
pub struct Node(Arc<NodeData>);

impl Node {
    /// Builds a node with exactly the given fields.
    pub fn new(eval: i64, color: Color, children: Vec<Node>) -> Result<Node> {
        if eval.unsigned_abs() > MAX_EVAL as u64 {
            return Err(Error::EvalOutOfRange {
                value: eval,
                max: MAX_EVAL as i64,
            });
        }
        Ok(Node::build(Score(eval as i32), color, children))
    }

    pub fn leaf(eval: i64, color: Color) -> Result<Node> {
        Node::new(eval, color, Vec::new())
    }

    // `eval` must already satisfy |eval| <= MAX_EVAL.
    fn build(eval: Score, color: Color, children: Vec<Node>) -> Node {
        debug_assert!(eval.get().unsigned_abs() <= MAX_EVAL as u32);
        let mut fp = mix(0x6a09_e667_f3bc_c908 ^ (eval.get() as i64 as u64));
        fp = mix(fp ^ color.sign() as i64 as u64);
        fp = mix(fp ^ children.len() as u64);
        let mut height = 0;
        let mut size = 1u64;
        for child in &children {
            fp = mix(fp.rotate_left(23) ^ child.fingerprint());
            height = height.max(child.height() + 1);
            size = size.saturating_add(child.node_count());
        }
        Node(Arc::new(NodeData {
            eval,
            color,
            children,
            fingerprint: fp,
            height,
            size,
        }))
    }

    pub fn eval(&self) -> Score {
        self.0.eval
    }

    pub fn color(&self) -> Color {
        self.0.color
    }

    pub fn children(&self) -> &[Node] {
        &self.0.children
    }

    pub fn is_leaf(&self) -> bool {
        self.0.children.is_empty()
    }

    /// `color · eval`, the negamax value of this node seen as a leaf.
    pub fn signed_eval(&self) -> Score {
        self.color().apply(self.eval())
    }

    /// Structural hash, equal for structurally equal trees.
    pub fn fingerprint(&self) -> u64 {
        self.0.fingerprint
    }

    /// Number of nodes, counting duplicated subtrees once per occurrence.
    pub fn node_count(&self) -> u64 {
        self.0.size
    }

    /// Length of the longest root-to-leaf path; 0 for a leaf.
    pub fn height(&self) -> usize {
        self.0.height
    }

    /// Same evaluation and color, different children.
    pub fn with_children(&self, children: Vec<Node>) -> Node {
        Node::build(self.eval(), self.color(), children)
    }

    /// Same children and color, different evaluation.
    pub fn with_eval(&self, eval: i64) -> Result<Node> {
        Node::new(eval, self.color(), self.children().to_vec())
    }

    /// This node with its children removed.
    pub fn to_leaf(&self) -> Node {
        if self.is_leaf() {
            self.clone()
        } else {
            self.with_children(Vec::new())
        }
    }

    /// `⌊u⌋_d`: all nodes within distance `depth` of the root.
    pub fn truncate(&self, depth: usize) -> Node {
        if self.height() <= depth {
            return self.clone();
        }
        if depth == 0 {
            return self.to_leaf();
        }
        self.with_children(
            self.children()
                .iter()
                .map(|c| c.truncate(depth - 1))
                .collect(),
        )
    }

    /// Every child has the opposite color of its parent, everywhere.
    pub fn is_turn_based(&self) -> bool {
        self.children()
            .iter()
            .all(|c| c.color() == self.color().opponent() && c.is_turn_based())
    }

    /// Copy keeping only the first `count` children of the root.
    pub fn with_first_children(&self, count: usize) -> Node {
        self.with_children(self.children()[..count.min(self.children().len())].to_vec())
    }

    /// Pre-order traversal, duplicates visited once per occurrence.
    pub fn preorder(&self) -> Vec<&Node> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(n.children().iter().rev());
        }
        out
    }

    /// Distinct subtrees in first-occurrence pre-order.
    pub fn distinct_subtrees(&self) -> Vec<Node> {
        let mut seen = std::collections::HashSet::new();
        self.preorder()
            .into_iter()
            .filter(|n| seen.insert((*n).clone()))
            .cloned()
            .collect()
    }

    /// Replaces every occurrence of `target` by `replacement`.
    pub fn replace_all(&self, target: &Node, replacement: &Node) -> Node {
        if self == target {
            return replacement.clone();
        }
        if self.height() < target.height() {
            return self.clone();
        }
        let children: Vec<Node> = self
            .children()
            .iter()
            .map(|c| c.replace_all(target, replacement))
            .collect();
        if children
            .iter()
            .zip(self.children())
            .all(|(a, b)| Arc::ptr_eq(&a.0, &b.0))
        {
            self.clone()
        } else {
            self.with_children(children)
        }
    }

    /// Removes every occurrence of `target` from every child list.
    pub fn remove_all(&self, target: &Node) -> Node {
        if self.height() <= target.height() {
            return self.clone();
        }
        let children: Vec<Node> = self
            .children()
            .iter()
            .filter(|c| *c != target)
            .map(|c| c.remove_all(target))
            .collect();
        self.with_children(children)
    }

    pub(crate) fn check_searchable(&self) -> Result<()> {
        if self.height() > MAX_SEARCH_HEIGHT {
            return Err(Error::TooDeep {
                height: self.height(),
                limit: MAX_SEARCH_HEIGHT,
            });
        }
        if !self.is_turn_based() {
            return Err(Error::NotTurnBased);
        }
        Ok(())
    }
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Structural equality: same eval, color and pairwise equal children in order.
impl PartialEq for Node {
    fn eq(&self, other: &Node) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.fingerprint() == other.fingerprint()
                && self.eval() == other.eval()
                && self.color() == other.color()
                && self.children() == other.children())
    }
}

impl Eq for Node {}

impl Hash for Node {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.fingerprint());
    }
}

impl fmt::Debug for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::serialize(self))
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::serialize(self))
    }
}
