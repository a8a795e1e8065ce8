use std::cmp::Ordering;

use pebble_core::g1::{g1_delayer_canonical, g1_step, G1Config, G1Outcome, G1Position, G1Round, G1Transcript};
use pebble_core::g2::{
    decode_index, encode_pair, g2_apply, g2_exhaustive, g2_play, parse_answer_lines, parse_g2_rounds,
    prover_root_ramify, FirstCoverDelayer, G2Config, G2Outcome, G2Position, ObliviousStrategy, ProverMove,
    ScriptedDelayer,
};
use pebble_core::matching::{Item, Matching, Record};
use pebble_core::tree::{tree_compare, FiniteTree, Vertex};
use pebble_core::verify::{g2_playout, g2prime_replay};
use pebble_core::Error;
use proptest::prelude::*;

fn m(recs: &[(u32, u32)]) -> Matching {
    Matching::new(recs.iter().map(|&(p, h)| Record::new(p, h))).unwrap()
}

#[test]
fn g1_prover_wins_when_queries_are_wide() {
    // Two holes, queries of size |2| = 2: fill both holes, then ask the third pigeon.
    let cfg = G1Config::new(2, 1).unwrap();
    let pos = G1Position::initial();
    let q = [Item::Pigeon(0), Item::Pigeon(1)];
    let a = g1_delayer_canonical(&pos, &q, &cfg).unwrap();
    assert_eq!(a, m(&[(0, 0), (1, 1)]));
    let G1Outcome::Ongoing(pos) = g1_step(&pos, &q, &a, &cfg).unwrap() else { panic!("ongoing") };
    let q2 = [Item::Pigeon(2)];
    assert_eq!(g1_step(&pos, &q2, &m(&[(2, 0)]), &cfg).unwrap(), G1Outcome::ProverWins);
}

#[test]
fn g1_rejects_non_covers_and_oversized_queries() {
    let cfg = G1Config::new(3, 1).unwrap();
    let pos = G1Position::initial();
    let q = [Item::Pigeon(0)];
    assert!(matches!(g1_step(&pos, &q, &m(&[(1, 0)]), &cfg), Err(Error::Malformed(_))));
    assert!(matches!(g1_step(&pos, &q, &m(&[(0, 0), (1, 1)]), &cfg), Err(Error::Malformed(_))));
    let wide = [Item::Pigeon(0), Item::Pigeon(1), Item::Pigeon(2)];
    assert!(matches!(g1_step(&pos, &wide, &m(&[(0, 0), (1, 1), (2, 2)]), &cfg), Err(Error::Malformed(_))));
}

#[test]
fn g1_reaches_the_length_cap() {
    let cfg = G1Config::new(8, 1).unwrap().with_cap(3);
    let mut pos = G1Position::initial();
    let q = [Item::Hole(1)];
    for _ in 0..2 {
        let a = g1_delayer_canonical(&pos, &q, &cfg).unwrap();
        let G1Outcome::Ongoing(next) = g1_step(&pos, &q, &a, &cfg).unwrap() else { panic!("ongoing") };
        pos = next;
    }
    let a = g1_delayer_canonical(&pos, &q, &cfg).unwrap();
    assert_eq!(g1_step(&pos, &q, &a, &cfg).unwrap(), G1Outcome::DelayerWinsAtCap);
}

#[test]
fn g1_transcript_round_trips() {
    let t = G1Transcript {
        n: 3,
        c: 1,
        rounds: vec![
            G1Round { query: vec![Item::Pigeon(0), Item::Hole(2)], answer: m(&[(0, 0), (1, 2)]) },
            G1Round { query: vec![Item::Pigeon(1)], answer: m(&[(1, 2)]) },
        ],
    };
    let text = t.to_string();
    assert_eq!(text, "game g1\nn 3\nC 1\nquery: p0 h2\nanswer: (0,0) (1,2)\nquery: p1\nanswer: (1,2)\n");
    assert_eq!(G1Transcript::parse(&text).unwrap(), t);
    let cfg = G1Config::new(3, 1).unwrap();
    assert!(matches!(t.replay(&cfg).unwrap(), G1Outcome::Ongoing(p) if p.len() == 3));
}

#[test]
fn g1_transcript_errors_have_positions() {
    match G1Transcript::parse("game g1\nn 3\nC 1\nquery: p0 q1\n") {
        Err(Error::Parse { line: 4, col: 11, .. }) => {}
        other => panic!("unexpected {other:?}"),
    }
}

fn query_seq() -> impl Strategy<Value = Vec<Vec<Item>>> {
    let item = prop_oneof![(0u32..9).prop_map(Item::Pigeon), (0u32..8).prop_map(Item::Hole)];
    prop::collection::vec(prop::collection::vec(item, 1..=4), 1..40)
}

proptest! {
    // With 2|n|^C ≤ n the greedy answer always extends the last matching.
    #[test]
    fn g1_canonical_delayer_survives(queries in query_seq()) {
        let cfg = G1Config::new(8, 1).unwrap();
        prop_assert!(2 * cfg.lp.width() <= 8);
        let mut pos = G1Position::initial();
        for q in &queries {
            let a = g1_delayer_canonical(&pos, q, &cfg).unwrap();
            match g1_step(&pos, q, &a, &cfg).unwrap() {
                G1Outcome::Ongoing(next) => pos = next,
                G1Outcome::DelayerWinsAtCap => break,
                G1Outcome::ProverWins => prop_assert!(false, "Prover won against the canonical answer"),
            }
        }
    }

    #[test]
    fn pair_encoding_round_trips(b in 1u32..40, k in 1u32..40, a in 2u32..40) {
        prop_assume!(k <= b && a <= b);
        prop_assert_eq!(decode_index(encode_pair(k, a, b), b), Some((k, a)));
    }

    #[test]
    fn random_playouts_increase_and_halt(seed in any::<u64>(), n in 3u32..=5) {
        prop_assert_eq!(g2_playout(n, 2, seed).unwrap(), None);
    }

    #[test]
    fn aux_free_translation_preserves_plays(seed in any::<u64>(), n in 3u32..=4) {
        prop_assert_eq!(g2prime_replay(n, 2, seed).unwrap(), None);
    }
}

#[test]
fn raw_indices_decode_as_aux_one() {
    assert_eq!(decode_index(3, 4), Some((3, 1)));
    assert_eq!(decode_index(encode_pair(2, 1, 4), 4), Some((2, 1)));
    assert_eq!(decode_index(0, 4), None);
    assert_eq!(decode_index(encode_pair(0, 2, 4), 4), None);
}

#[test]
fn determinacy_bound_value() {
    let cfg = G2Config::new(3, 2).unwrap();
    assert_eq!(cfg.cap, 16);
    assert_eq!(cfg.determinacy_bound_log2(), 4096u32.into());
}

#[test]
fn root_ramification_beats_every_delayer() {
    for n in [3, 4] {
        let cfg = G2Config::new(n, 2).unwrap();
        let (tree, prover) = prover_root_ramify(n, &cfg).unwrap();
        let s = g2_exhaustive(&cfg, &tree, &prover, 64).unwrap();
        assert_eq!((s.prover_loses, s.unfinished), (0, 0), "n={n}: {s:?}");
        assert_eq!(s.prover_wins, s.branches);
        if n == 3 {
            assert!(s.branches <= 243, "{s:?}");
        }
    }
}

#[test]
fn root_ramification_preconditions() {
    assert!(prover_root_ramify(1, &G2Config::new(1, 2).unwrap()).is_err());
    assert!(prover_root_ramify(3, &G2Config::new(3, 1).unwrap()).is_err());
    assert!(prover_root_ramify(3, &G2Config::new(3, 2).unwrap().with_cap(3)).is_err());
    assert!(prover_root_ramify(3, &G2Config::new(4, 2).unwrap()).is_err());
}

#[test]
fn transcript_round_trips_and_replays() {
    let cfg = G2Config::new(3, 2).unwrap();
    let (tree, prover) = prover_root_ramify(3, &cfg).unwrap();
    let t = g2_play(&cfg, &tree, &prover, &FirstCoverDelayer { size: cfg.size }, 1000).unwrap();
    assert_eq!(t.outcome, G2Outcome::ProverWins);
    let text = t.to_string();
    assert!(text.starts_with("game g2\nn 3\nC 2\nquery: p0\nanswer: (0,0)\nmove: o=1 x=1 B=1\n"), "{text}");
    assert!(text.ends_with("outcome: prover-wins\n"));
    let answers = parse_answer_lines(&text).unwrap();
    let replay = g2_play(&cfg, &tree, &prover, &ScriptedDelayer::new(answers), 1000).unwrap();
    assert_eq!(replay, t);
    // Every move in the text applies to the position it was made in.
    let mut pos = G2Position::initial();
    for (q, a, mv) in parse_g2_rounds(&text).unwrap() {
        match g2_apply(&pos, &q, &a, &mv, &cfg, &tree).unwrap() {
            G2Outcome::Ongoing(next) => {
                assert_eq!(tree_compare(&pos.dom(), &next.dom()), Ordering::Less);
                assert_eq!(G2Position::from_snapshot(&next.to_snapshot()).unwrap(), next);
                pos = next;
            }
            other => assert_eq!(other, G2Outcome::ProverWins),
        }
    }
}

#[test]
fn scripted_delayer_runs_out() {
    let cfg = G2Config::new(3, 2).unwrap();
    let (tree, prover) = prover_root_ramify(3, &cfg).unwrap();
    let err = g2_play(&cfg, &tree, &prover, &ScriptedDelayer::new(vec![m(&[(0, 0)])]), 1000).unwrap_err();
    assert!(matches!(err, Error::Invalid(ref s) if s.contains("exhausted")), "{err:?}");
}

#[test]
fn apply_validates_answers_and_moves() {
    let cfg = G2Config::new(3, 2).unwrap();
    let tree = FiniteTree::from_paths(&[&[], &[1], &[1, 1], &[2]]).unwrap();
    let pos = G2Position::initial();
    let q = [Item::Pigeon(0)];
    let climb = |x, b| ProverMove::Climb { x, b };
    assert!(matches!(g2_apply(&pos, &q, &m(&[(1, 0)]), &climb(1, 1), &cfg, &tree), Err(Error::Malformed(_))));
    assert!(matches!(g2_apply(&pos, &q, &m(&[(0, 0)]), &climb(1, 0), &cfg, &tree), Err(Error::Malformed(_))));
    assert!(matches!(g2_apply(&pos, &q, &m(&[(0, 0)]), &climb(17, 1), &cfg, &tree), Err(Error::Malformed(_))));
    assert_eq!(g2_apply(&pos, &q, &m(&[(0, 0)]), &climb(3, 1), &cfg, &tree).unwrap(), G2Outcome::ProverLoses);
    let back = ProverMove::Backtrack { x: Vertex::root(), b: 1 };
    assert!(matches!(g2_apply(&pos, &q, &m(&[(0, 0)]), &back, &cfg, &tree), Err(Error::Malformed(_))));
    let G2Outcome::Ongoing(p1) = g2_apply(&pos, &q, &m(&[(0, 0)]), &climb(1, 5), &cfg, &tree).unwrap() else {
        panic!("ongoing")
    };
    assert_eq!(p1.to_snapshot(), "- |  |\n1 | (0,0) | 5\n");
    // Climbing with an answer that contradicts the frontier is a Prover win.
    assert_eq!(g2_apply(&p1, &q, &m(&[(0, 1)]), &climb(1, 1), &cfg, &tree).unwrap(), G2Outcome::ProverWins);
    assert_eq!(g2_apply(&p1, &q, &m(&[(0, 0)]), &climb(2, 1), &cfg, &tree).unwrap(), G2Outcome::ProverLoses);
    // The sibling move only needs consistency with the label of `x`.
    let sib = ProverMove::Sibling { x: Vertex::root(), b: 2 };
    let G2Outcome::Ongoing(p2) = g2_apply(&p1, &q, &m(&[(0, 1)]), &sib, &cfg, &tree).unwrap() else {
        panic!("ongoing")
    };
    assert_eq!(p2.frontier().0.to_string(), "2");
    assert_eq!(p2.to_snapshot(), "- |  |\n1 | (0,0) | 5\n2 | (0,1) | 2\n");
}

#[test]
fn snapshot_parse_checks_structure() {
    assert!(G2Position::from_snapshot("- | |\n1 | (0,0) | 2\n").is_ok());
    match G2Position::from_snapshot("- | |\n1 | (0,0) 2\n") {
        Err(Error::Parse { line: 2, .. }) => {}
        other => panic!("unexpected {other:?}"),
    }
    assert!(matches!(G2Position::from_snapshot("- | |\n1.1 | (0,0) | 2 2\n"), Err(Error::Parse { .. })));
    assert!(matches!(G2Position::from_snapshot("- | |\n1 | (0,0) | 2 2\n"), Err(Error::Parse { .. })));
}

#[test]
fn oblivious_prover_ignores_history() {
    let cfg = G2Config::new(3, 2).unwrap();
    let (_, prover) = prover_root_ramify(3, &cfg).unwrap();
    let v: Vertex = "2".parse().unwrap();
    let q1 = prover.query(&v, &m(&[(0, 0)]), &[1]).unwrap();
    let q2 = prover.query(&v, &m(&[(0, 2), (1, 0)]), &[3]).unwrap();
    assert_eq!(q1, q2);
    assert_eq!(prover.window(), 2);
}
