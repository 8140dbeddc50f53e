use std::collections::BTreeSet;

use gtsearch_core::alphabeta::{
    alphabeta_failhard, alphabeta_failsoft, is_ab_result, is_negamax_ab_result, pnm,
};
use gtsearch_core::format;
use gtsearch_core::harness::{gen_tree, run_schedule, Algorithm, CallSchedule, GeneratorConfig};
use gtsearch_core::reference::{
    minimax_alg, minimax_depth, minimax_spec, negamax_alg, negamax_depth, negamax_spec,
};
use gtsearch_core::tt::{negamax_ttm, negamax_ttw, negamax_ttw_checked, perturb_table};
use gtsearch_core::witness::{
    check_negamax_tt_result, check_partial_result, check_valid_table, count_aon_expansions,
    enumerate_aon_expansions, is_aon_expansion, witness_value_set,
};
use gtsearch_core::{Color, HybridOptions, Node, Score, TranspositionTable, Verdict, Window};
use proptest::prelude::*;

const GUARD: u64 = 20_000;

#[derive(Clone, Debug)]
enum Shape {
    Leaf(i64),
    Inner(i64, Vec<Shape>),
}

fn shape() -> impl Strategy<Value = Shape> {
    let leaf = (-6i64..=6).prop_map(Shape::Leaf);
    leaf.prop_recursive(4, 40, 3, |inner| {
        ((-6i64..=6), prop::collection::vec(inner, 1..=3)).prop_map(|(e, c)| Shape::Inner(e, c))
    })
}

fn build(s: &Shape, color: Color) -> Node {
    match s {
        Shape::Leaf(e) => Node::leaf(*e, color).unwrap(),
        Shape::Inner(e, cs) => Node::new(
            *e,
            color,
            cs.iter().map(|c| build(c, color.opponent())).collect(),
        )
        .unwrap(),
    }
}

/// Turn-based trees, optionally with a repeated subtree to create transpositions.
fn tree() -> impl Strategy<Value = Node> {
    (shape(), any::<bool>(), any::<bool>()).prop_map(|(s, min_root, dup)| {
        let color = if min_root { Color::Min } else { Color::Max };
        let t = build(&s, color);
        if !dup || t.children().len() < 2 {
            return t;
        }
        let mut cs = t.children().to_vec();
        cs[1] = cs[0].clone();
        t.with_children(cs)
    })
}

fn window() -> impl Strategy<Value = Window> {
    (-8i64..=8, 1i64..=8).prop_map(|(a, len)| Window::new(a, a + len).unwrap())
}

fn sc(v: i64) -> Score {
    Score::new(v).unwrap()
}

/// Value set by enumerating every expansion and evaluating it directly.
fn brute_value_set(u: &Node, d: usize) -> BTreeSet<Score> {
    enumerate_aon_expansions(u, d, GUARD)
        .map(|t| negamax_spec(&t.unwrap()).unwrap())
        .collect()
}

fn small(u: &Node, d: usize) -> bool {
    count_aon_expansions(u, d) <= 2_000
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn text_round_trip(u in tree()) {
        let text = format::serialize(&u);
        let back = format::parse(&text).unwrap();
        prop_assert_eq!(&back, &u);
        prop_assert_eq!(back.fingerprint(), u.fingerprint());
        prop_assert_eq!(format::serialize(&back), text);
    }

    #[test]
    fn negamax_is_signed_minimax(u in tree()) {
        let sign = match u.color() { Color::Max => 1, Color::Min => -1 };
        prop_assert_eq!(negamax_spec(&u).unwrap().get(), sign * minimax_spec(&u).unwrap().get());
    }

    #[test]
    fn algorithms_match_specs(u in tree()) {
        prop_assert_eq!(minimax_alg(&u).unwrap(), minimax_spec(&u).unwrap());
        prop_assert_eq!(negamax_alg(&u).unwrap(), negamax_spec(&u).unwrap());
    }

    #[test]
    fn truncation_laws(u in tree(), a in 0usize..6, b in 0usize..6) {
        let ta = u.truncate(a);
        prop_assert!(ta.height() <= a);
        prop_assert_eq!(ta.truncate(b), u.truncate(a.min(b)));
        prop_assert_eq!(u.truncate(u.height()), u.clone());
        prop_assert_eq!(minimax_depth(&u, a).unwrap(), minimax_spec(&ta).unwrap());
        prop_assert_eq!(negamax_depth(&u, u.height() + b).unwrap(), negamax_spec(&u).unwrap());
    }

    #[test]
    fn alphabeta_postconditions(u in tree(), w in window(), d in 0usize..6) {
        let exact = negamax_depth(&u, d).unwrap();
        let soft = alphabeta_failsoft(&u, w, d).unwrap();
        let hard = alphabeta_failhard(&u, w, d).unwrap();
        prop_assert!(is_ab_result(soft, exact, w));
        prop_assert!(is_ab_result(hard, exact, w));
        prop_assert!(w.alpha() <= hard && hard <= w.beta());
        if w.alpha() < exact && exact < w.beta() {
            prop_assert_eq!(soft, exact);
            prop_assert_eq!(hard, exact);
        }
        if soft <= w.alpha() { prop_assert!(exact <= soft); }
        if soft >= w.beta() { prop_assert!(exact >= soft); }
    }

    #[test]
    fn full_window_collapses(u in tree(), d in 0usize..6) {
        let exact = negamax_depth(&u, d).unwrap();
        let w = Window::full();
        prop_assert_eq!(alphabeta_failsoft(&u, w, d).unwrap(), exact);
        prop_assert_eq!(alphabeta_failhard(&u, w, d).unwrap(), exact);
        prop_assert_eq!(negamax_ttw(&u, w, d, TranspositionTable::new()).unwrap().0, exact);
    }

    #[test]
    fn ttw_empty_table_is_alphabeta(u in tree(), w in window(), d in 0usize..6) {
        let (x, table) = negamax_ttw(&u, w, d, TranspositionTable::new()).unwrap();
        prop_assert!(is_negamax_ab_result(x, &u.truncate(d), w).unwrap());
        for (_, r) in check_valid_table(&table, GUARD).unwrap() {
            prop_assert_ne!(r.verdict(), Verdict::Refuted);
        }
    }

    #[test]
    fn ttw_and_hybrids_survive_schedules(
        u in tree(),
        calls in prop::collection::vec((window(), 0usize..6, prop::option::of(any::<u64>())), 1..4),
    ) {
        let schedule: CallSchedule = serde_json::from_value(serde_json::Value::Array(
            calls.iter().enumerate().map(|(i, (w, d, p))| {
                let mut c = serde_json::json!({"window": w, "depth": d});
                if let (true, Some(p)) = (i > 0, p) {
                    c["perturb_seed"] = (*p).into();
                }
                c
            }).collect(),
        )).unwrap();
        for alg in [Algorithm::Ttw, Algorithm::TtwHybrid(HybridOptions::ALL)] {
            let replay = run_schedule(&u, &schedule, alg, GUARD).unwrap();
            prop_assert!(replay.violation.is_none(), "{:?}", replay.violation);
        }
    }

    #[test]
    fn ghost_checked_search_agrees(u in tree(), w in window(), d in 0usize..4) {
        prop_assume!(small(&u, d));
        let (_, warm) = negamax_ttw(&u, w, d, TranspositionTable::new()).unwrap();
        let (x, t) = negamax_ttw_checked(&u, w, d, warm.clone(), GUARD).unwrap();
        let (y, s) = negamax_ttw(&u, w, d, warm).unwrap();
        prop_assert_eq!(x, y);
        prop_assert_eq!(t, s);
    }

    #[test]
    fn enumeration_matches_count(u in tree(), d in 0usize..5) {
        prop_assume!(small(&u, d));
        let all: Vec<Node> = enumerate_aon_expansions(&u, d, GUARD).map(|t| t.unwrap()).collect();
        prop_assert_eq!(all.len() as u128, count_aon_expansions(&u, d));
        prop_assert_eq!(&all[0], &u.truncate(d));
        prop_assert!(all.contains(&u));
        let distinct: BTreeSet<String> = all.iter().map(format::serialize).collect();
        prop_assert_eq!(distinct.len(), all.len());
        for t in &all {
            prop_assert!(is_aon_expansion(t, &u, d));
        }
    }

    #[test]
    fn value_set_matches_enumeration(u in tree(), d in 0usize..5) {
        prop_assume!(small(&u, d));
        let set = witness_value_set(&u, d, GUARD).unwrap();
        prop_assert_eq!(&set, &brute_value_set(&u, d));
        if d >= u.height() {
            prop_assert_eq!(set, BTreeSet::from([negamax_spec(&u).unwrap()]));
        }
    }

    #[test]
    fn result_check_matches_value_set(u in tree(), w in window(), d in 0usize..5, x in -9i64..=9) {
        prop_assume!(small(&u, d));
        let x = sc(x);
        let report = check_negamax_tt_result(x, &u, w, d, GUARD).unwrap();
        let expected = brute_value_set(&u, d).iter().any(|&e| is_ab_result(x, e, w));
        prop_assert_eq!(report.satisfied, expected);
        prop_assert!(report.exhausted);
        if let Some(witness) = report.witness {
            prop_assert!(is_aon_expansion(&witness, &u, d));
            prop_assert!(is_ab_result(x, negamax_spec(&witness).unwrap(), w));
        }
    }

    #[test]
    fn partial_check_matches_slicing(u in tree(), w in window(), d in 1usize..5, x in -9i64..=9, k in 1usize..4) {
        prop_assume!(!u.is_leaf() && small(&u, d));
        let k = k.min(u.children().len());
        let x = sc(x);
        let oracle_pnm = u.children()[..k].iter().map(|c| -negamax_spec(c).unwrap()).max().unwrap();
        prop_assert_eq!(pnm(&u, k).unwrap(), oracle_pnm);

        let report = check_partial_result(x, &u, k, w, d, GUARD).unwrap();
        let expected = enumerate_aon_expansions(&u, d, GUARD).any(|t| {
            let t = t.unwrap();
            let best = t.children()[..k].iter().map(|c| -negamax_spec(c).unwrap()).max().unwrap();
            is_ab_result(x, best, w)
        });
        prop_assert_eq!(report.satisfied, expected);
    }

    #[test]
    fn perturbation_only_removes(u in tree(), w in window(), d in 0usize..5, seed in any::<u64>()) {
        let (_, table) = negamax_ttw(&u, w, d, TranspositionTable::new()).unwrap();
        let kept = perturb_table(table.clone(), seed);
        prop_assert!(kept.len() <= table.len());
        for (k, e) in kept.iter() {
            prop_assert_eq!(table.get(k), Some(e));
        }
        prop_assert!(perturb_table(TranspositionTable::new(), seed).is_empty());
    }

    #[test]
    fn ttm_is_deterministic(u in tree(), w in window(), d in 0usize..5) {
        let (_, warm) = negamax_ttm(&u, w, d, TranspositionTable::new()).unwrap();
        let a = negamax_ttm(&u, w, d.saturating_sub(1), warm.clone()).unwrap();
        let b = negamax_ttm(&u, w, d.saturating_sub(1), warm).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn generator_respects_config(seed in any::<u64>(), max_depth in 0usize..6, dup in 0.0f64..1.0) {
        let cfg = GeneratorConfig {
            max_depth,
            branching: (1, 4),
            eval_range: (-10, 10),
            duplicate_probability: dup,
            max_nodes: 300,
            seed,
            ..Default::default()
        };
        let t = gen_tree(&cfg).unwrap();
        prop_assert_eq!(&t, &gen_tree(&cfg).unwrap());
        prop_assert!(t.height() <= max_depth);
        prop_assert!(t.node_count() <= 300);
        prop_assert!(t.is_turn_based());
        prop_assert!(t.preorder().iter().all(|n| (-10..=10).contains(&(n.eval().get() as i64))));
    }
}
