use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{Color, Node, MAX_EVAL, MAX_SEARCH_HEIGHT};

/// Parameters of the random tree generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub max_depth: usize,
    /// Inclusive range of child counts for internal slots. The root always
    /// gets at least one child when `max_depth > 0`.
    pub branching: (usize, usize),
    pub eval_range: (i64, i64),
    pub turn_based: bool,
    /// Chance that a child slot is filled with a copy of an already
    /// generated subtree instead of a fresh one.
    pub duplicate_probability: f64,
    pub max_nodes: u64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            max_depth: 5,
            branching: (0, 3),
            eval_range: (-100, 100),
            turn_based: true,
            duplicate_probability: 0.0,
            max_nodes: 500,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.eval_range;
        if lo > hi {
            return Err(Error::Config(format!("eval range {lo}..{hi} is empty")));
        }
        if lo.unsigned_abs() > MAX_EVAL as u64 || hi.unsigned_abs() > MAX_EVAL as u64 {
            return Err(Error::Config(format!(
                "eval range {lo}..{hi} exceeds ±{MAX_EVAL}"
            )));
        }
        if self.branching.0 > self.branching.1 {
            return Err(Error::Config(format!(
                "branching {}..{} is empty",
                self.branching.0, self.branching.1
            )));
        }
        if !(0.0..=1.0).contains(&self.duplicate_probability) {
            return Err(Error::Config(format!(
                "duplicate probability {} is not in [0, 1]",
                self.duplicate_probability
            )));
        }
        if self.max_nodes < 1 {
            return Err(Error::Config("max_nodes must be at least 1".into()));
        }
        if self.max_depth > MAX_SEARCH_HEIGHT {
            return Err(Error::Config(format!(
                "max_depth {} exceeds {MAX_SEARCH_HEIGHT}",
                self.max_depth
            )));
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            seed,
            ..self.clone()
        }
    }
}

/// Generates a random tree, deterministic in `cfg` (including its seed).
pub fn gen_tree(cfg: &GeneratorConfig) -> Result<Node> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let color = if rng.gen_bool(0.5) {
        Color::Max
    } else {
        Color::Min
    };
    let mut gen = Generator {
        cfg,
        rng,
        pool: Vec::new(),
        budget: cfg.max_nodes,
    };
    Ok(gen.node(0, color))
}

struct Generator<'a> {
    cfg: &'a GeneratorConfig,
    rng: ChaCha8Rng,
    /// Finished internal subtrees available for duplication.
    pool: Vec<Node>,
    budget: u64,
}

impl Generator<'_> {
    fn node(&mut self, level: usize, color: Color) -> Node {
        let (lo, hi) = self.cfg.eval_range;
        let eval = self.rng.gen_range(lo..=hi);
        self.budget -= 1;
        let remaining = self.cfg.max_depth - level;
        if remaining == 0 || self.budget == 0 {
            return Node::new(eval, color, Vec::new()).expect("eval range validated");
        }

        let (bmin, bmax) = self.cfg.branching;
        let bmin = if level == 0 { bmin.max(1) } else { bmin };
        let count = self.rng.gen_range(bmin..=bmax.max(bmin));
        let mut children = Vec::with_capacity(count);
        for _ in 0..count {
            if self.budget == 0 {
                break;
            }
            let child_color = if self.cfg.turn_based || self.rng.gen_bool(0.5) {
                color.opponent()
            } else {
                color
            };
            let child = self
                .duplicate(child_color, remaining - 1)
                .unwrap_or_else(|| self.node(level + 1, child_color));
            children.push(child);
        }
        let node = Node::new(eval, color, children).expect("eval range validated");
        if !node.is_leaf() {
            self.pool.push(node.clone());
        }
        node
    }

    fn duplicate(&mut self, color: Color, max_height: usize) -> Option<Node> {
        if self.pool.is_empty() || !self.rng.gen_bool(self.cfg.duplicate_probability) {
            return None;
        }
        let budget = self.budget;
        let candidates: Vec<&Node> = self
            .pool
            .iter()
            .filter(|n| n.color() == color && n.height() <= max_height && n.node_count() <= budget)
            .collect();
        let pick = (*candidates.choose(&mut self.rng)?).clone();
        self.budget -= pick.node_count();
        Some(pick)
    }
}
