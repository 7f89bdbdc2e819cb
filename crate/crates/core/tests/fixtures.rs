//! Fixture transcriptions, frozen by golden files.
//!
//! Set `UPDATE_GOLDEN=1` to rewrite the files after an intended change.

use std::path::PathBuf;

use afgraph::dot::{diagram_to_dot, graph_to_dot};
use afgraph::fixtures::{fixture, fixture_a, fixture_e, fixture_f, fixture_m3, Fixture, FixtureName};
use afgraph::ideals::recognize_separated;
use afgraph::io::{to_pretty, ToJson};
use afgraph::realize::realize_separated;
use afgraph::{prefix_isomorphic, telescope, Subsequence};
use serde_json::json;

fn golden(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "golden file {name} differs");
}

fn fixture_text(name: FixtureName) -> String {
    match fixture::<u64, i64>(name) {
        Fixture::Diagram(d) => to_pretty(&d),
        Fixture::Graph { graph, vector } => {
            let mut s = serde_json::to_string_pretty(&json!({"graph": graph.to_json(), "vector": vector.to_json()})).unwrap();
            s.push('\n');
            s
        }
    }
}

#[test]
fn fixture_documents_are_frozen() {
    for name in FixtureName::ALL {
        golden(&format!("{name}.json"), &fixture_text(name));
    }
}

#[test]
fn m3_realization_dot_is_frozen() {
    let d = fixture_m3::<u64>();
    let ss = recognize_separated(&d, 4).unwrap().unwrap().structure;
    let g = realize_separated(&d, &ss, 4).unwrap();
    let dot = graph_to_dot(&g.graph);
    for n in 2..=4 {
        assert!(dot.contains(&format!("\"z_3\" -> \"v{n}\" [label=\"6\"];")));
    }
    assert!(!dot.contains('∞'));
    assert_eq!(dot, graph_to_dot(&g.graph));
    golden("m3_realization.dot", &dot);
}

#[test]
fn f_dot_is_frozen() {
    golden("F_depth3.dot", &diagram_to_dot(&fixture_f::<u64>(), 3).unwrap());
}

/// The drawn row reads 4, 24, 43, 64, 84, …, so the linear rule `20n + 4`
/// counts levels from zero: level `n` has degree `20(n − 1) + 4` from
/// level 4 on.
#[test]
fn m3_degrees_follow_the_linear_rule() {
    let m = fixture_m3::<u64>().materialize(12).unwrap();
    let got: Vec<u64> = (1..=12).map(|n| *m.degree(n, &format!("v{n}")).unwrap()).collect();
    let mut want = vec![4, 24, 43, 64];
    want.extend((5..=12).map(|n| 20 * (n - 1) + 4));
    assert_eq!(got, want);
}

#[test]
fn e_bottom_feeds_top_six_times() {
    let m = fixture_e::<u64>().materialize(8).unwrap();
    for n in 1..8 {
        assert_eq!(m.mult(n, &format!("bot{n}"), &format!("top{}", n + 1)), 6);
    }
}

#[test]
fn stored_a_matches_the_computed_odd_telescope() {
    // The computed telescope is authoritative; a mismatch here means the
    // stored transcription is wrong.
    let computed = telescope(&fixture_f::<u64>(), &Subsequence::odds()).unwrap().diagram;
    let iso = prefix_isomorphic(&computed, &fixture_a(), 6).unwrap();
    assert!(iso.is_some(), "stored A disagrees with telescope(F, odds)");
}
