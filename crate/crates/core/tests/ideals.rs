use std::collections::BTreeSet;

use afgraph::fixtures::{fixture_b, fixture_e, fixture_f, fixture_m3};
use afgraph::ideals::{
    auto_ideal, detect_mk_tail, diagram_graph, enumerate_saturated_hereditary, is_hereditary, is_saturated,
    is_unital, recognize_separated, saturated_hereditary_closure, LevelSet, UnitalStatus, VertexSet,
};
use afgraph::model::{tail_step, DiagramBuilder, LabelRule, TailTemplate};
use afgraph::{Error, Mult, MultGraph};
use proptest::prelude::*;

/// Graphs on up to 7 vertices with arbitrary edges, loops and infinite
/// multiplicities included.
fn graph_strategy() -> impl Strategy<Value = MultGraph<u64>> {
    (1usize..=7).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n, 0u8..4), 0..=2 * n).prop_map(move |edges| {
            let mut g = MultGraph::new();
            for i in 0..n {
                g.add_vertex(format!("v{i}")).unwrap();
            }
            for (s, t, m) in edges {
                let mult = if m == 0 { Mult::Infinite } else { Mult::Finite(u64::from(m)) };
                g.add_edge(&format!("v{s}"), &format!("v{t}"), mult).unwrap();
            }
            g
        })
    })
}

fn subset(g: &MultGraph<u64>, mask: u32) -> VertexSet {
    g.vertices()
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, v)| v.clone())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closure_is_the_least_saturated_hereditary_superset(g in graph_strategy(), mask in any::<u32>()) {
        let seed = subset(&g, mask);
        let closed = saturated_hereditary_closure(&g, &seed, None).unwrap();
        prop_assert!(seed.is_subset(&closed));
        prop_assert!(is_hereditary(&g, &closed) && is_saturated(&g, &closed));
        prop_assert_eq!(saturated_hereditary_closure(&g, &closed, None).unwrap(), closed.clone());
        let all = enumerate_saturated_hereditary(&g, 20).unwrap();
        let least = all.iter().filter(|s| seed.is_subset(s)).fold(None::<VertexSet>, |acc, s| {
            Some(match acc {
                None => s.clone(),
                Some(a) => a.intersection(s).cloned().collect(),
            })
        });
        prop_assert_eq!(Some(closed), least);
    }

    #[test]
    fn closure_is_monotone(g in graph_strategy(), a in any::<u32>(), b in any::<u32>()) {
        let small = subset(&g, a & b);
        let large = subset(&g, a);
        let cs = saturated_hereditary_closure(&g, &small, None).unwrap();
        let cl = saturated_hereditary_closure(&g, &large, None).unwrap();
        prop_assert!(cs.is_subset(&cl));
    }

    #[test]
    fn enumeration_is_a_linear_extension(g in graph_strategy()) {
        let all = enumerate_saturated_hereditary(&g, 20).unwrap();
        prop_assert!(all.contains(&VertexSet::new()));
        prop_assert!(all.contains(&g.vertices().iter().cloned().collect()));
        for (i, s) in all.iter().enumerate() {
            for t in &all[..i] {
                prop_assert!(!s.is_subset(t) || s == t);
            }
        }
    }
}

#[test]
fn enumeration_cap_and_staged_graphs() {
    let mut g = MultGraph::<u64>::new();
    for i in 0..21 {
        g.add_vertex(format!("v{i}")).unwrap();
    }
    assert!(matches!(
        enumerate_saturated_hereditary(&g, 20),
        Err(Error::GraphTooLarge { vertices: 21, cap: 20 })
    ));
    let staged = diagram_graph(&fixture_m3::<u64>(), 4).unwrap();
    assert_eq!(
        saturated_hereditary_closure(&staged, &BTreeSet::from(["v1".to_string()]), None),
        Err(Error::StagedWithoutDepth)
    );
}

#[test]
fn m3_ideal_is_the_v_row() {
    let g = diagram_graph(&fixture_m3::<u64>(), 6).unwrap();
    let closed = saturated_hereditary_closure(&g, &BTreeSet::from(["v1".to_string()]), Some(6)).unwrap();
    let expected: VertexSet = (1..=6).map(|n| format!("v{n}")).collect();
    assert_eq!(closed, expected);
}

#[test]
fn constant_chain_is_unital_and_fixtures_are_not() {
    let chain = DiagramBuilder::<u64>::new()
        .level([("a1", 5)])
        .build_with_tail(TailTemplate {
            start_level: 1,
            steps: vec![tail_step(&["a"], &[("a", "a", 1)], &[])],
            labels: LabelRule::default(),
        })
        .unwrap();
    assert_eq!(is_unital(&chain, 6).unwrap().status, UnitalStatus::UnitalWitnessed);
    for d in [fixture_f::<u64>(), fixture_b(), fixture_e(), fixture_m3()] {
        assert_eq!(is_unital(&d, 6).unwrap().status, UnitalStatus::NoWitnessAtDepth);
    }
}

#[test]
fn separated_structures_of_fixtures() {
    let m3 = recognize_separated(&fixture_m3::<u64>(), 6).unwrap().unwrap();
    assert_eq!(m3.structure.k, 3);
    assert!(m3.proper);
    let e = recognize_separated(&fixture_e::<u64>(), 6).unwrap().unwrap();
    assert_eq!((e.structure.k, e.proper), (1, true));
    let f = recognize_separated(&fixture_f::<u64>(), 6).unwrap().unwrap();
    assert_eq!(f.structure.k, 1);
    assert!(!f.proper);
    assert!(f.defect_zero.iter().all(|v| v.label.starts_with("top")));
}

#[test]
fn mk_tail_of_the_top_and_middle_rows() {
    let d = fixture_f::<u64>();
    let s = LevelSet::rows(&d, 6, &["top", "mid"]).unwrap();
    let tail = detect_mk_tail(&d, &s, 6).unwrap().unwrap();
    assert_eq!((tail.m, tail.k), (1, 1));
    let (auto, t) = auto_ideal(&d, 6).unwrap().unwrap();
    assert_eq!(auto, s);
    assert_eq!(t, tail);
}
