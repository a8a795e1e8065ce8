use std::collections::BTreeSet;

use pebble_core::figures::{fig1_strategy, php1_tree};
use pebble_core::matching::{GameSize, Record};
use pebble_core::phptree::{
    build_php_tree, commit_to_root, forbid_holes, loop_lemma_start, loop_witness_bound, loop_witness_length, PhpTree,
};
use pebble_core::simple::{all_plays, delayer_wins_lengths, find_loops, play_simplified, PlayOutcome, SimpleStrategy};
use pebble_core::Error;
use proptest::prelude::*;

fn arb_strategy(n: u32) -> impl Strategy<Value = SimpleStrategy> {
    let cells = ((n + 1) * n) as usize;
    (0..=n, prop::collection::vec(0..=n, cells))
        .prop_map(move |(init, table)| SimpleStrategy::standard(n, n + 1, init, table).unwrap())
}

#[test]
fn shipped_example_tree() {
    let t = php1_tree();
    assert_eq!((t.n(), t.len(), t.depth()), (3, 8, 3));
    assert!(t.is_valid());
    assert!(!t.is_complete());
    assert!(!t.is_symmetric());
    let loose = t.loose_pairs(&GameSize::new(3).unwrap());
    assert!(loose.contains(&Record::new(0, 1)));
    assert!(!loose.contains(&Record::new(0, 0)));
}

#[test]
fn text_form_round_trips() {
    let t = php1_tree();
    assert_eq!(PhpTree::from_text(&t.to_text()).unwrap(), t);
    let small = "n 2\n- label=0\n1 label=2\nedge 1 1\n";
    assert_eq!(PhpTree::from_text(small).unwrap().to_text(), small);
}

#[test]
fn text_form_errors_carry_positions() {
    let cases: &[(&str, usize, usize)] = &[
        ("n 2\n- label=0\n2 label=1\nedge 2 0\n", 3, 1),
        ("n 2\n- label=0\n1 label=1\n", 3, 1),
        ("n 2\n- label=0\n1 label=x\nedge 1 0\n", 3, 9),
        ("n 2\n- label=0\nedge 1 0\n", 3, 1),
        ("n 2\n- label=0\nbogus\n", 3, 1),
    ];
    for (src, line, col) in cases {
        match PhpTree::from_text(src) {
            Err(Error::Parse { line: l, col: c, .. }) => assert_eq!((l, c), (*line, *col), "{src}"),
            other => panic!("unexpected {other:?} for {src:?}"),
        }
    }
}

#[test]
fn repeated_label_on_a_path_is_invalid() {
    let mut t = PhpTree::with_root(2, 0);
    let a = t.add_child(0, 0, 1);
    t.add_child(a, 1, 0);
    assert!(!t.is_valid());
    let mut u = PhpTree::with_root(2, 0);
    let b = u.add_child(0, 0, 1);
    u.add_child(b, 0, 2);
    assert!(!u.is_valid());
}

#[test]
fn tree_of_the_example_strategy() {
    let t = build_php_tree(&fig1_strategy(0, 4));
    assert_eq!((t.len(), t.depth()), (14, 3));
    assert!(t.is_valid() && t.is_symmetric() && !t.is_complete());
}

#[test]
fn commit_to_root_on_a_closed_table() {
    // 0 -(0)-> 1, and the rest stays on pigeons {1,2} with hole 1; hole 1
    // at the root leads to 2, whose hole 0 returns to the root.
    let st = SimpleStrategy::standard(2, 3, 0, vec![1, 2, 2, 2, 0, 1]).unwrap();
    let red = commit_to_root(&st, 0).unwrap();
    assert_eq!(red.pigeons, vec![1, 2]);
    assert_eq!(red.holes, vec![1]);
    assert_eq!(red.strategy.s(), 2);
    assert_eq!(red.preamble, vec![Record::new(0, 0)]);
    let lifted = red.lift_play(&pebble_core::simple::Play::new(vec![0, 0]));
    assert_eq!(lifted.answers, vec![0, 1, 1]);
    let err = commit_to_root(&st, 1).unwrap_err().to_string();
    assert!(err.contains("escape"), "{err}");
}

#[test]
fn forbid_holes_checks_closure() {
    let st = fig1_strategy(0, 4);
    let err = forbid_holes(&st, &BTreeSet::from([2]), &BTreeSet::from([2])).unwrap_err().to_string();
    assert!(err.contains("(1,0)->2"), "{err}");
    let red = forbid_holes(&st, &BTreeSet::from([2]), &BTreeSet::from([3])).unwrap();
    assert_eq!(red.strategy.table(), &[1, 1, 2, 2, 2, 2]);
    assert!(forbid_holes(&st, &BTreeSet::from([2]), &BTreeSet::from([0])).is_err());
    assert!(forbid_holes(&st, &BTreeSet::from([1, 2]), &BTreeSet::from([3])).is_err());
}

#[test]
fn loop_witness_examples() {
    let st = fig1_strategy(0, 4);
    // 0 -(0,2)-> 3 -(3,1)-> 2 avoids hole 0; pigeon 3 is only entered along hole 2.
    assert_eq!(loop_witness_length(&st, 2, 0), Some(2));
    assert_eq!(loop_witness_length(&st, 2, 1), None);
    assert_eq!(loop_witness_length(&st, 3, 2), None);
    assert_eq!(loop_witness_length(&fig1_strategy(3, 4), 3, 2), Some(0));
    assert_eq!(loop_witness_bound(3), 3);
    assert_eq!(loop_lemma_start(&st, 4), Some(4));
    assert_eq!(loop_lemma_start(&st, 1), Some(3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn built_trees_are_valid_and_symmetric(st in prop_oneof![arb_strategy(3), arb_strategy(4)]) {
        let t = build_php_tree(&st);
        prop_assert!(t.is_valid());
        prop_assert!(t.is_symmetric());
        prop_assert!(t.depth() <= st.n());
        prop_assert_eq!(PhpTree::from_text(&t.to_text()).unwrap().to_text(), t.to_text());
    }

    #[test]
    fn reductions_lift_delayer_wins(st in arb_strategy(3), h in 0u32..3) {
        if let Ok(red) = commit_to_root(&st, h) {
            for p in all_plays(&red.strategy) {
                if play_simplified(&red.strategy, &p).unwrap() == PlayOutcome::DelayerWins {
                    prop_assert_eq!(play_simplified(&st, &red.lift_play(&p)).unwrap(), PlayOutcome::DelayerWins);
                }
            }
        }
        if let Ok(red) = forbid_holes(&st, &BTreeSet::from([h]), &BTreeSet::from([(h + 1) % 4])) {
            for p in all_plays(&red.strategy) {
                if play_simplified(&red.strategy, &p).unwrap() == PlayOutcome::DelayerWins {
                    prop_assert_eq!(play_simplified(&st, &red.lift_play(&p)).unwrap(), PlayOutcome::DelayerWins);
                }
            }
        }
    }

    #[test]
    fn loop_witness_within_bound(st in arb_strategy(3)) {
        for e in find_loops(&st) {
            if let Some(w) = loop_witness_length(&st, e.tail, e.label) {
                prop_assert!(w <= loop_witness_bound(3), "loop {} witness {}", e, w);
            }
        }
    }

    #[test]
    fn loop_start_agrees_with_certificate(st in prop_oneof![arb_strategy(3), arb_strategy(4)], s0 in 1u32..8) {
        if let Some(t) = loop_lemma_start(&st, s0) {
            prop_assert!(t >= s0);
            let cert = delayer_wins_lengths(&st, 64);
            prop_assert!((t..=200).all(|s| cert.wins(s)));
        }
    }
}
