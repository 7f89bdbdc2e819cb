mod oracles;

use afgraph::decide::{classify, realize_auto, Verdict};
use afgraph::fixtures::{fixture_b, fixture_e, fixture_f, fixture_m3};
use afgraph::ideals::{recognize_separated, SeparatedStructure};
use afgraph::random::{random_diagram, RandomParams};
use afgraph::realize::{
    realize_separated, realize_strict, reconstruct_diagram, verify_realization, CheckKind, RealizedGraph,
};
use afgraph::separation::properify;
use afgraph::{BratteliDiagram, Error, Mult};
use oracles::dfs_path_count;

fn strict_params() -> RandomParams {
    RandomParams {
        levels: 6,
        max_width: 5,
        max_mult: 3,
        strict: true,
        separated: None,
    }
}

fn separated_params(k: u64) -> RandomParams {
    RandomParams {
        levels: 6,
        max_width: 4,
        max_mult: 3,
        strict: false,
        separated: Some(k),
    }
}

fn assert_path_counts_match_dfs(g: &RealizedGraph<u64>) {
    let pc = g.graph.path_counts().unwrap();
    for v in g.graph.vertices() {
        assert_eq!(pc[v], dfs_path_count(&g.graph, v), "{v}");
    }
}

#[test]
fn strict_round_trip() {
    for seed in 1..=20 {
        let d = random_diagram::<u64>(seed, &strict_params()).unwrap();
        let g = realize_strict(&d, 5).unwrap();
        assert!(verify_realization(&g, &d, 5).unwrap().pass);
        assert_eq!(reconstruct_diagram(&g, 5).unwrap(), d.materialize(5).unwrap());
        assert!(g.graph.infinite_emitters().is_empty());
    }
}

#[test]
fn separated_generator_is_recognized() {
    for seed in 1..=50 {
        let d = random_diagram::<u64>(seed, &separated_params(2)).unwrap();
        let rep = recognize_separated(&d, 6).unwrap().unwrap_or_else(|| panic!("seed {seed}"));
        assert!(rep.proper, "seed {seed}");
        assert_eq!(rep.structure.k, 2);
    }
}

#[test]
fn separated_round_trip() {
    for seed in 1..=20 {
        let d = random_diagram::<u64>(seed, &separated_params(3)).unwrap();
        let ss = recognize_separated(&d, 5).unwrap().unwrap().structure;
        let g = realize_separated(&d, &ss, 5).unwrap();
        assert_eq!(g.graph.infinite_emitters().len(), 1);
        assert!(verify_realization(&g, &d, 5).unwrap().pass);
        assert_eq!(reconstruct_diagram(&g, 5).unwrap(), d.materialize(5).unwrap());
    }
}

#[test]
fn path_counts_of_realized_fixtures_match_enumeration() {
    let m3 = fixture_m3::<u64>();
    let ss = recognize_separated(&m3, 4).unwrap().unwrap().structure;
    assert_path_counts_match_dfs(&realize_separated(&m3, &ss, 4).unwrap());
    let e = fixture_e::<u64>();
    let ss = recognize_separated(&e, 4).unwrap().unwrap().structure;
    assert_path_counts_match_dfs(&realize_separated(&e, &ss, 4).unwrap());
    assert_path_counts_match_dfs(&realize_auto(&fixture_f::<u64>(), 4).unwrap().graph);
    let strict = random_diagram::<u64>(3, &strict_params()).unwrap();
    assert_path_counts_match_dfs(&realize_strict(&strict, 4).unwrap());
}

#[test]
fn m3_path_counts_equal_degrees_through_eight_levels() {
    let d = fixture_m3::<u64>();
    let ss = recognize_separated(&d, 8).unwrap().unwrap().structure;
    let g = realize_separated(&d, &ss, 8).unwrap();
    let pc = g.graph.path_counts().unwrap();
    let got: Vec<u64> = (1..=8).map(|n| pc[&format!("v{n}")]).collect();
    assert_eq!(got, vec![4, 24, 43, 64, 84, 104, 124, 144]);
}

#[test]
fn non_proper_input_is_rejected_with_the_vertex() {
    let f = fixture_f::<u64>();
    let ss = recognize_separated(&f, 4).unwrap().unwrap().structure;
    let err = realize_separated(&f, &ss, 4).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
    assert!(err.to_string().contains("top"), "{err}");
}

#[test]
fn empty_ideal_level_is_rejected() {
    // Level 3 has no vertex outside the y row.
    let d = BratteliDiagram::<u64>::new(
        vec![
            afgraph::Level::new(1, vec![afgraph::Vertex::new("h1", 2), afgraph::Vertex::new("y1", 1)]),
            afgraph::Level::new(2, vec![afgraph::Vertex::new("h2", 4), afgraph::Vertex::new("y2", 1)]),
            afgraph::Level::new(3, vec![afgraph::Vertex::new("y3", 6)]),
        ],
        vec![
            {
                let mut m = afgraph::MultMatrix::new(1);
                m.set("h1", "h2", 1);
                m.set("y1", "h2", 1);
                m.set("y1", "y2", 1);
                m
            },
            {
                let mut m = afgraph::MultMatrix::new(2);
                m.set("y2", "y3", 1);
                m.set("h2", "y3", 1);
                m
            },
        ],
        None,
    )
    .unwrap();
    let ss = SeparatedStructure {
        k: 1,
        y: vec!["y1".into(), "y2".into(), "y3".into()],
    };
    assert!(realize_separated(&d, &ss, 3).is_err());
}

#[test]
fn corrupted_graphs_fail_verification_at_the_corruption() {
    let d = fixture_m3::<u64>();
    let ss = recognize_separated(&d, 5).unwrap().unwrap().structure;
    let clean = realize_separated(&d, &ss, 5).unwrap();

    let mut g = clean.clone();
    g.graph.set_edge("z_3", "v3", Mult::Finite(5)).unwrap();
    let cert = verify_realization(&g, &d, 5).unwrap();
    assert_eq!(
        cert.first_failure().unwrap().kind,
        CheckKind::Multiplicity {
            src: "z_3".into(),
            dst: "v3".into()
        }
    );
    assert!(cert.comparisons[..cert.first_failure.unwrap()].iter().all(|c| c.ok));

    let mut g = clean.clone();
    g.graph.add_edge("v1", "v3", Mult::Finite(1)).unwrap();
    let cert = verify_realization(&g, &d, 5).unwrap();
    assert!(!cert.pass);
    assert_eq!(cert.first_failure().unwrap().level, 3);

    let mut g = clean;
    g.graph.add_vertex("x_9^v5").unwrap();
    g.graph.add_edge("x_9^v5", "v5", Mult::Finite(1)).unwrap();
    let cert = verify_realization(&g, &d, 5).unwrap();
    assert!(!cert.pass);
}

#[test]
fn properified_f_realizes() {
    let f = fixture_f::<u64>();
    let ss = recognize_separated(&f, 4).unwrap().unwrap().structure;
    let p = properify(&f, &ss, 4).unwrap();
    let g = realize_separated(&p.diagram, &p.structure, 4).unwrap();
    assert!(verify_realization(&g, &p.diagram, 4).unwrap().pass);
    assert_eq!(reconstruct_diagram(&g, 4).unwrap(), p.diagram.materialize(4).unwrap());
    assert_eq!(p.trace.b, fixture_b());
}

#[test]
fn realizable_verdicts_persist_with_depth() {
    let mut corpus: Vec<(String, BratteliDiagram<u64>, usize)> = vec![
        ("F".into(), fixture_f(), 8),
        ("B".into(), fixture_b(), 8),
        ("E".into(), fixture_e(), 8),
        ("M3".into(), fixture_m3(), 8),
    ];
    for seed in 1..=10 {
        corpus.push((format!("strict {seed}"), random_diagram(seed, &strict_params()).unwrap(), 6));
        corpus.push((format!("separated {seed}"), random_diagram(seed, &separated_params(2)).unwrap(), 6));
    }
    for (name, d, max) in corpus {
        let mut seen = None;
        for depth in 2..=max {
            let v = classify(&d, depth).unwrap().verdict;
            if let Some(prev) = seen {
                assert_eq!(v, prev, "{name} changed verdict at depth {depth}");
            }
            if v.is_realizable() {
                seen = Some(v);
            }
        }
        assert!(seen.is_some(), "{name} never realizable");
    }
}

#[test]
fn auto_realization_always_verifies() {
    for d in [fixture_m3::<u64>(), fixture_e(), fixture_f()] {
        let a = realize_auto(&d, 5).unwrap();
        assert!(a.certificate.pass);
        assert_eq!(a.report.verdict, Verdict::RealizableSeparated);
    }
    let strict = random_diagram::<u64>(11, &strict_params()).unwrap();
    let a = realize_auto(&strict, 5).unwrap();
    assert_eq!(a.report.verdict, Verdict::RealizableStrict);
    assert!(a.certificate.pass);
}
