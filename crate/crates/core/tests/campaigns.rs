use std::collections::BTreeSet;

use pebble_core::simple::{delayer_wins_lengths, SimpleStrategy};
use pebble_core::tree::all_trees;
use pebble_core::verify::{
    check_order_axioms, enumerate_strategies, oracle_disagreements, run_claim, shard_range, strategy_at,
    strategy_space, verify_symmetry, verify_theorem_main, CampaignOptions, Symmetry, CLAIMS,
};
use proptest::prelude::*;

fn opts() -> CampaignOptions {
    CampaignOptions { shards: 8, threads: 2, wall_clock: false, ..CampaignOptions::default() }
}

/// Reference: some `s ≤ 12` where no answer sequence is Delayer-winning.
fn naive_prover_wins_somewhere(st: &SimpleStrategy) -> bool {
    let n = st.n() as u64;
    let clash = |a: (u32, u32), b: (u32, u32)| (a.0 == b.0) != (a.1 == b.1);
    (1..=12u32).any(|s| {
        !(0..n.pow(s)).any(|mut code| {
            let mut recs = Vec::new();
            let mut q = st.init();
            for _ in 0..s {
                let h = (code % n) as u32;
                code /= n;
                recs.push((q, h));
                q = st.get(q, h);
            }
            let last = *recs.last().unwrap();
            recs.windows(2).all(|w| !clash(w[0], w[1])) && recs.iter().all(|&r| !clash(r, last))
        })
    })
}

#[test]
fn spaces_and_indexing() {
    assert_eq!(strategy_space(1), Some(8));
    assert_eq!(strategy_space(2), Some(2187));
    assert_eq!(strategy_space(3), Some(1 << 26));
    let st = strategy_at(2, 2186, 5);
    assert_eq!((st.init(), st.table(), st.s()), (2, &[2, 2, 2, 2, 2, 2][..], 5));
    let st = strategy_at(2, 1, 1);
    assert_eq!((st.init(), st.table()), (0, &[0, 0, 0, 0, 0, 1][..]));
    assert_eq!(enumerate_strategies(2, false).unwrap().count(), 2187);
    assert!(enumerate_strategies(4, false).is_err());
}

#[test]
fn two_holes_have_exactly_108_prover_wins() {
    let bad: Vec<u64> = (0..2187).filter(|&i| naive_prover_wins_somewhere(&strategy_at(2, i, 1))).collect();
    assert_eq!(bad.len(), 108);
    let report = verify_theorem_main(2, &opts()).unwrap();
    assert_eq!(report.space, 2187);
    let names: Vec<String> = bad.iter().map(|i| format!("n2-{i}.strat")).collect();
    assert_eq!(report.counterexamples.iter().map(|c| c.name.clone()).collect::<Vec<_>>(), names);
}

#[test]
fn one_hole_has_four_prover_wins() {
    let report = verify_theorem_main(1, &opts()).unwrap();
    assert_eq!((report.space, report.counterexamples.len()), (8, 4));
    assert!(!report.success());
}

#[test]
fn counterexample_files_use_first_loss() {
    let dir = tempfile::tempdir().unwrap();
    let report = verify_theorem_main(2, &opts()).unwrap();
    report.write_counterexamples(dir.path()).unwrap();
    for c in &report.counterexamples {
        let st = SimpleStrategy::from_text(&std::fs::read_to_string(dir.path().join(&c.name)).unwrap()).unwrap();
        assert_eq!(delayer_wins_lengths(&st, 64).first_loss(), Some(st.s()), "{}", c.name);
    }
}

#[test]
fn checkpoint_resume_skips_finished_shards() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ckpt");
    let o = CampaignOptions { checkpoint: Some(path.clone()), ..opts() };
    let first = verify_theorem_main(2, &o).unwrap();
    let lines = std::fs::read_to_string(&path).unwrap();
    assert_eq!(lines.lines().count(), 8);
    assert!(lines.lines().all(|l| l.starts_with("shard ") && l.contains(" next ") && l.contains(" found")));
    let again = verify_theorem_main(2, &o).unwrap();
    assert_eq!(again.counterexamples, first.counterexamples);

    // Claimed-finished shards with nothing found are trusted on resume.
    let fake: String = (0..8).map(|k| format!("shard {k}/8 next {} found\n", shard_range(2187, k, 8).end)).collect();
    std::fs::write(&path, fake).unwrap();
    assert!(verify_theorem_main(2, &o).unwrap().success());

    // A different shard count ignores the file.
    let o4 = CampaignOptions { shards: 4, ..o };
    assert_eq!(verify_theorem_main(2, &o4).unwrap().counterexamples.len(), 108);
}

#[test]
fn symmetry_classes_cover_the_space() {
    let sym = Symmetry::new(2);
    assert_eq!(sym.group_order(), 12);
    let report = verify_symmetry(2, &opts()).unwrap();
    assert!(report.success(), "{report}");
    let sym_run = verify_theorem_main(2, &CampaignOptions { symmetry: true, ..opts() }).unwrap();
    assert_eq!(sym_run.space, 2187);
    let canon: BTreeSet<Vec<u32>> = (0..729).map(|i| sym.canonical(strategy_at(2, i, 1).table()).0).collect();
    assert!(canon.len() < 729);
}

#[test]
fn oracle_gate_sample_agrees() {
    assert!(oracle_disagreements(3, 200, 8, 7).unwrap().is_empty());
    assert!(oracle_disagreements(2, 200, 10, 7).unwrap().is_empty());
}

#[test]
fn order_axioms_on_the_small_cube() {
    let check = check_order_axioms(&all_trees(2, 2), 3, 2, None);
    assert_eq!((check.pairs, check.triples), (625, 15625));
    assert!(check.failures.is_empty(), "{:?}", check.failures);
}

#[test]
fn reports_are_deterministic_without_wall_clock() {
    let a = run_claim("small-n", &opts()).unwrap();
    let b = run_claim("small-n", &opts()).unwrap();
    assert_eq!(a.to_string(), "claim=small-n space=73 counterexamples=0 seconds=0.000");
    assert_eq!(a, b);
    let subset = run_claim("subset-prop", &opts()).unwrap().to_string();
    assert_eq!(subset, "claim=subset-prop space=1114 counterexamples=0 seconds=0.000");
    assert!(run_claim("nope", &opts()).is_err());
    assert_eq!(CLAIMS.len(), 13);
}

proptest! {
    #[test]
    fn shards_partition_the_range(total in 0u64..1_000_000, m in 1u32..100) {
        let mut next = 0;
        for k in 0..m {
            let r = shard_range(total, k, m);
            prop_assert_eq!(r.start, next);
            next = r.end;
        }
        prop_assert_eq!(next, total);
    }

    #[test]
    fn index_decoding_is_injective(a in 0u64..2187, b in 0u64..2187) {
        let (x, y) = (strategy_at(2, a, 1), strategy_at(2, b, 1));
        prop_assert_eq!(a == b, x == y);
    }

    #[test]
    fn relabeling_keeps_the_verdict(i in 0u64..(1 << 26)) {
        let sym = Symmetry::new(3);
        let st = strategy_at(3, i, 1);
        let rep = sym.canonical_strategy(&st);
        prop_assert!(sym.is_canonical(rep.table()));
        prop_assert_eq!(delayer_wins_lengths(&st, 40).all_winning(), delayer_wins_lengths(&rep, 40).all_winning());
    }
}
