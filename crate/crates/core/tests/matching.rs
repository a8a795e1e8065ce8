use pebble_core::matching::{
    bit_length, matchings_consistent, minimal_covers, records_conflict, GameSize, Item, LogPower, Matching, Record,
};
use pebble_core::Error;
use proptest::prelude::*;

fn m(recs: &[(u32, u32)]) -> Matching {
    Matching::new(recs.iter().map(|&(p, h)| Record::new(p, h))).unwrap()
}

/// Reference: every matching over the board that covers `q` and has no
/// covering proper subset, by subset enumeration.
fn covers_by_subsets(q: &[Item], size: &GameSize) -> Vec<Matching> {
    let all: Vec<Record> =
        (0..size.pigeons()).flat_map(|p| (0..size.holes()).map(move |h| Record::new(p, h))).collect();
    let is_matching = |mask: u32| {
        let rs: Vec<Record> = (0..all.len()).filter(|i| mask >> i & 1 == 1).map(|i| all[i]).collect();
        rs.iter().enumerate().all(|(i, a)| rs[i + 1..].iter().all(|b| !records_conflict(*a, *b)))
    };
    let covers = |mask: u32| {
        q.iter().all(|it| {
            (0..all.len()).any(|i| {
                mask >> i & 1 == 1
                    && match *it {
                        Item::Pigeon(p) => all[i].pigeon == p,
                        Item::Hole(h) => all[i].hole == h,
                    }
            })
        })
    };
    let good: Vec<u32> = (0..1u32 << all.len()).filter(|&x| is_matching(x) && covers(x)).collect();
    let mut out: Vec<Matching> = good
        .iter()
        .filter(|&&x| !good.iter().any(|&y| y != x && y & x == y))
        .map(|&x| Matching::new((0..all.len()).filter(|i| x >> i & 1 == 1).map(|i| all[i])).unwrap())
        .collect();
    out.sort();
    out
}

#[test]
fn conflict_is_sharing_exactly_one_coordinate() {
    assert!(records_conflict(Record::new(0, 1), Record::new(0, 2)));
    assert!(records_conflict(Record::new(0, 1), Record::new(3, 1)));
    assert!(!records_conflict(Record::new(0, 1), Record::new(0, 1)));
    assert!(!records_conflict(Record::new(0, 1), Record::new(2, 3)));
}

#[test]
fn matching_rejects_conflicts_and_collapses_duplicates() {
    assert!(matches!(Matching::new([Record::new(0, 0), Record::new(0, 1)]), Err(Error::Invalid(_))));
    assert_eq!(m(&[(1, 0), (1, 0), (0, 1)]).records(), &[Record::new(0, 1), Record::new(1, 0)]);
    assert_eq!(m(&[(1, 0)]).union(&m(&[(1, 1)])), None);
    assert_eq!(m(&[(1, 0)]).union(&m(&[(2, 1)])), Some(m(&[(1, 0), (2, 1)])));
}

#[test]
fn text_form_round_trips_and_stops_at_blank_line() {
    let a = m(&[(0, 2), (3, 1)]);
    assert_eq!(a.to_text(), "0 2\n3 1\n\n");
    assert_eq!(Matching::from_text(&a.to_text()).unwrap(), a);
    assert_eq!(Matching::from_text("0 2\n\n5 5\n").unwrap(), m(&[(0, 2)]));
}

#[test]
fn text_form_reports_line_and_column() {
    match Matching::from_text("0 1\n2 x\n") {
        Err(Error::Parse { line: 2, col: 3, .. }) => {}
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn single_pigeon_query_has_one_cover_per_hole() {
    let size = GameSize::new(3).unwrap();
    let covers = minimal_covers(&[Item::Pigeon(2)], None, &size);
    assert_eq!(covers, vec![m(&[(2, 0)]), m(&[(2, 1)]), m(&[(2, 2)])]);
}

#[test]
fn too_many_pigeons_have_no_cover() {
    let size = GameSize::new(2).unwrap();
    let q = [Item::Pigeon(0), Item::Pigeon(1), Item::Pigeon(2)];
    assert!(minimal_covers(&q, None, &size).is_empty());
}

#[test]
fn covers_can_be_restricted_to_a_base() {
    let size = GameSize::new(2).unwrap();
    let base = m(&[(0, 0)]);
    let covers = minimal_covers(&[Item::Pigeon(1)], Some(&base), &size);
    assert_eq!(covers, vec![m(&[(1, 1)])]);
}

#[test]
fn log_power_and_cap() {
    assert_eq!(bit_length(0), 0);
    assert_eq!(bit_length(3), 2);
    assert_eq!(bit_length(4), 3);
    let lp = LogPower::new(3, 2).unwrap();
    assert_eq!((lp.log_n(), lp.width(), lp.cap()), (2, 4, Some(16)));
    assert_eq!(LogPower::new(5, 2).unwrap().cap(), Some(512));
    assert_eq!(LogPower::new(1 << 20, 3).unwrap().cap(), None);
}

fn query_strategy(n: u32) -> impl Strategy<Value = Vec<Item>> {
    prop::collection::vec(prop_oneof![(0..n + 1).prop_map(Item::Pigeon), (0..n).prop_map(Item::Hole)], 0..4)
}

proptest! {
    #[test]
    fn minimal_covers_match_subset_enumeration(n in 1u32..=3, q in query_strategy(3)) {
        let size = GameSize::new(n).unwrap();
        let q: Vec<Item> = q.into_iter().filter(|it| match *it {
            Item::Pigeon(p) => p <= n,
            Item::Hole(h) => h < n,
        }).collect();
        prop_assert_eq!(minimal_covers(&q, None, &size), covers_by_subsets(&q, &size));
    }

    #[test]
    fn every_cover_is_minimal_and_consistent_with_base(q in query_strategy(3), base in prop::sample::subsequence(vec![(0u32, 0u32), (1, 1), (2, 2)], 0..3)) {
        let size = GameSize::new(3).unwrap();
        let base = m(&base);
        for c in minimal_covers(&q, Some(&base), &size) {
            prop_assert!(c.is_minimal_cover(&q));
            prop_assert!(matchings_consistent(&c, &base));
        }
    }

    #[test]
    fn union_is_a_matching_iff_consistent(a in prop::sample::subsequence(vec![(0u32, 0u32), (1, 2), (3, 1)], 0..3),
                                          b in prop::sample::subsequence(vec![(0u32, 1u32), (2, 2), (3, 3)], 0..3)) {
        let (a, b) = (m(&a), m(&b));
        prop_assert_eq!(a.union(&b).is_some(), matchings_consistent(&a, &b));
    }
}
