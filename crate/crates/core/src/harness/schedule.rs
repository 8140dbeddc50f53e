use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::alphabeta::Window;
use crate::tree::{Node, INFINITY};

/// One top-level search call. When `perturb_seed` is set, the table is
/// perturbed with that seed immediately before the call.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Call {
    pub window: Window,
    pub depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturb_seed: Option<u64>,
}

/// A sequence of calls on the same root, threading one table.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CallSchedule {
    pub calls: Vec<Call>,
}

impl CallSchedule {
    pub fn single(window: Window, depth: usize) -> CallSchedule {
        CallSchedule {
            calls: vec![Call {
                window,
                depth,
                perturb_seed: None,
            }],
        }
    }

    pub fn len(&self) -> usize {
        self.calls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.calls.is_empty()
    }
}

/// Random schedule of one to three calls on `u`.
///
/// Windows are anchored at values that actually occur in the tree so that
/// cutoffs and bound reuse happen; depths range over `0..=height + 1`.
pub fn gen_schedule<R: Rng>(u: &Node, rng: &mut R) -> CallSchedule {
    let mut anchors: Vec<i64> = u
        .preorder()
        .into_iter()
        .flat_map(|n| {
            let e = n.signed_eval().get() as i64;
            [e, -e]
        })
        .collect();
    anchors.sort_unstable();
    anchors.dedup();
    let spread = (anchors[anchors.len() - 1] - anchors[0]).max(2);

    let n = rng.gen_range(1..=3);
    let calls = (0..n)
        .map(|i| Call {
            window: gen_window(rng, &anchors, spread),
            depth: rng.gen_range(0..=u.height() + 1),
            perturb_seed: (i > 0 && rng.gen_bool(0.5)).then(|| rng.gen()),
        })
        .collect();
    CallSchedule { calls }
}

fn gen_window<R: Rng>(rng: &mut R, anchors: &[i64], spread: i64) -> Window {
    let limit = INFINITY as i64;
    if rng.gen_bool(0.1) {
        return Window::full();
    }
    let anchor = *anchors.choose(rng).expect("tree has at least one node");
    let alpha = if rng.gen_bool(0.1) {
        -limit
    } else {
        anchor + rng.gen_range(-2..=2)
    };
    let beta = if rng.gen_bool(0.1) {
        limit
    } else {
        alpha + rng.gen_range(1..=spread)
    };
    Window::new(
        alpha.clamp(-limit, limit - 1),
        beta.clamp(-limit + 1, limit),
    )
    .expect("alpha < beta by construction")
}
