use pebble_core::figures::{figure, figures, FIGURES_SRC};
use pebble_core::simple::{check_cover_by_two, EdgeRef, FigureSpec};
use pebble_core::Error;

const NAMES: [&str; 16] = [
    "fig4", "fig5", "fig6", "fig7", "fig9", "fig12", "fig14", "fig15", "fig19", "fig21", "fig24", "php5", "php6",
    "php7", "php10", "php12",
];

#[test]
fn every_shipped_figure_checks_out() {
    let figs = figures();
    assert_eq!(figs.iter().map(|f| f.name.as_str()).collect::<Vec<_>>(), NAMES);
    for f in &figs {
        assert_eq!((f.threshold, f.horizon), (4, 60), "{}", f.name);
        let failures = f.report().unwrap().failures();
        assert!(failures.is_empty(), "{}: {failures:?}", f.name);
    }
}

#[test]
fn figure_text_round_trips() {
    for f in figures() {
        assert_eq!(FigureSpec::parse_all(&f.to_string()).unwrap(), vec![f]);
    }
}

#[test]
fn two_path_residue_classes() {
    // At n = 3 the first path of fig5 wins exactly when s − n − 1 is odd, and
    // the first path of fig6 exactly when s − n − 2 ≡ 0 or 1 (mod 3).
    let r5 = figure("fig5").unwrap().report().unwrap();
    let want5: Vec<u32> = (4..=64).filter(|s| (s - 4) % 2 == 1).collect();
    assert_eq!(r5.winning_lengths(0), want5);
    let r6 = figure("fig6").unwrap().report().unwrap();
    let want6: Vec<u32> = (5..=64).filter(|s| (s - 5) % 3 != 2).collect();
    assert_eq!(r6.winning_lengths(0), want6);
}

#[test]
fn dropping_a_red_mark_is_caught() {
    for f in figures() {
        let report = f.report().unwrap();
        for (j, p) in f.paths.iter().enumerate() {
            // Red marks on prefix edges that never end a walk in the window are inert.
            let ends: Vec<EdgeRef> = report.rows.iter().map(|row| row[j].last).collect();
            for r in p.red.iter().filter(|r| ends.contains(r)) {
                let mut g = f.clone();
                g.paths[j].red.remove(r);
                assert!(!g.check().unwrap(), "{} {} without red {r}", f.name, p.name);
            }
        }
    }
}

#[test]
fn marking_a_usable_edge_red_is_caught() {
    for f in figures() {
        let report = f.report().unwrap();
        for (j, p) in f.paths.iter().enumerate() {
            let usable = report.rows.iter().map(|row| row[j]).find(|u| u.wins()).expect("some usable length");
            let mut g = f.clone();
            g.paths[j].red.insert(usable.last);
            assert!(!g.check().unwrap(), "{} {} with red {}", f.name, p.name, usable.last);
        }
    }
}

#[test]
fn locally_inconsistent_cycle_is_caught() {
    let mut f = figure("fig5").unwrap();
    f.paths[0].cycle = vec![EdgeRef::new(1, 0), EdgeRef::new(0, 0)];
    f.paths[0].red.clear();
    let failures = f.report().unwrap().failures();
    assert!(failures.iter().any(|m| m.contains("not locally consistent")), "{failures:?}");
}

#[test]
fn single_path_needs_a_partner_where_it_is_red() {
    let f = figure("fig5").unwrap();
    assert!(check_cover_by_two(&f.paths[0], Some(&f.paths[1]), 4, 60).unwrap());
    assert!(!check_cover_by_two(&f.paths[0], None, 4, 60).unwrap());
}

#[test]
fn figure_file_errors_carry_positions() {
    let cases: &[(&str, usize, usize)] = &[
        ("figure a\npath p\ncycle (0,0)\n", 3, 12),
        ("path p\n", 1, 1),
        ("figure a\nprefix (0,0)\nend\n", 2, 1),
        ("figure a\npath p\ncycle (0,x)\nend\n", 3, 10),
        ("figure a\npath p\ncycle (0,0)\nred (1,1)\nend\n", 5, 1),
        ("figure a\npath p\ncycle (0,0)\npath q\ncycle (0,1)\npath r\n", 6, 1),
        ("figure a\npath p\nprefix (0,0) (1,1)\ncycle (0,0) (2,2)\nend\n", 5, 1),
    ];
    for (src, line, col) in cases {
        match FigureSpec::parse_all(src) {
            Err(Error::Parse { line: l, col: c, .. }) => assert_eq!((l, c), (*line, *col), "{src}"),
            other => panic!("unexpected {other:?} for {src:?}"),
        }
    }
    assert_eq!(FigureSpec::parse_all(FIGURES_SRC).unwrap().len(), 16);
}
