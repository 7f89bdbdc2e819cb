mod oracles;

use afgraph::fixtures::corner32;
use afgraph::ktheory::{
    corner_graph, head_label, monoid_contains, source_positive, truncated_generators, unit_normalize, K0Vector,
};
use afgraph::{Error, Mult, MultGraph};
use num_bigint::BigInt;
use oracles::{all_vectors, brute_monoid, dag_shapes, random_amplified_dag};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dense_apply(a: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
    a.iter().map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum()).collect()
}

#[test]
fn membership_agrees_with_the_oracle_on_small_shapes() {
    let mut checked = 0;
    for g in dag_shapes(3) {
        for x in all_vectors(g.vertices(), 3) {
            let (member, cert) = monoid_contains(&g, &x).unwrap();
            assert_eq!(member, brute_monoid(&g, &x), "{x} on {:?}", g.edges().keys().collect::<Vec<_>>());
            assert!(cert.replay(&g, &x).unwrap());
            checked += 1;
        }
    }
    assert!(checked > 1000);
}

#[test]
fn membership_in_big_integers() {
    let (g, _) = corner32::<u64, BigInt>();
    let mut x = K0Vector::<BigInt>::new();
    x.set("v", BigInt::from(1));
    x.set("w", -BigInt::from(10).pow(40));
    let (member, cert) = monoid_contains(&g, &x).unwrap();
    assert!(member);
    assert!(cert.replay(&g, &x).unwrap());
    x.set("v", BigInt::from(0));
    assert!(!monoid_contains(&g, &x).unwrap().0);
}

#[test]
fn unit_normalization_identities_on_seeded_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut done = 0;
    while done < 60 {
        let n_vertices = rng.gen_range(2..=5);
        let g = random_amplified_dag(&mut rng, n_vertices, 0.5);
        let dense: Vec<i64> = (0..n_vertices).map(|_| rng.gen_range(-3..=3)).collect();
        let n = K0Vector::from_dense(g.vertices(), &dense);
        if !source_positive(&g, &n) || !monoid_contains(&g, &n).unwrap().0 {
            continue;
        }
        let u = unit_normalize(&g, &n).unwrap();
        let size = u.order.len();
        for i in 0..size {
            let col: Vec<i64> = (0..size).map(|j| u.beta[j][i]).collect();
            let e = dense_apply(&u.alpha, &col);
            for (j, x) in e.iter().enumerate() {
                assert_eq!(*x, i64::from(i == j));
            }
        }
        let m = dense_apply(&u.alpha, &n.to_dense(&u.order));
        assert_eq!(K0Vector::from_dense(&u.order, &m), u.m);
        assert!(m.iter().all(|&c| c >= 1));
        for x in truncated_generators::<u64, i64>(&g) {
            let y = K0Vector::from_dense(&u.order, &dense_apply(&u.alpha, &x.to_dense(&u.order)));
            let (member, cert) = monoid_contains(&g, &y).unwrap();
            assert!(member && cert.replay(&g, &y).unwrap());
        }
        done += 1;
    }
}

#[test]
fn normalization_preconditions() {
    let (g, _) = corner32::<u64, i64>();
    let zero_source = K0Vector::<i64>::from_pairs([("v", 0), ("w", 1)]);
    assert!(matches!(unit_normalize(&g, &zero_source), Err(Error::Precondition(_))));
    let mut finite = MultGraph::<u64>::new();
    finite.add_vertex("a").unwrap();
    finite.add_vertex("b").unwrap();
    finite.add_edge("a", "b", Mult::Finite(1)).unwrap();
    assert!(matches!(
        unit_normalize(&finite, &K0Vector::<i64>::basis("a")),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn corner_of_three_two() {
    let (g, x) = corner32::<u64, i64>();
    let c = corner_graph(&g, &x).unwrap();
    assert_eq!(c.len(), 5);
    assert_eq!(c.mult(&head_label(1, "v"), &head_label(2, "v")), Some(&Mult::Finite(1)));
    assert_eq!(c.mult(&head_label(2, "v"), "v"), Some(&Mult::Finite(1)));
    assert_eq!(c.mult(&head_label(1, "w"), "w"), Some(&Mult::Finite(1)));
    assert_eq!(c.mult("v", "w"), Some(&Mult::Infinite));
    assert_eq!(c.edges().len(), 4);
}

#[test]
fn normalization_moves_negative_classes_up() {
    let (g, _) = corner32::<u64, i64>();
    let n = K0Vector::<i64>::from_pairs([("v", 2), ("w", -3)]);
    let u = unit_normalize(&g, &n).unwrap();
    // k_{w,v} = ceil((1 + 3) / 2) = 2, so m_w = −3 + 2·2 = 1.
    assert_eq!(u.m, K0Vector::from_pairs([("v", 2), ("w", 1)]));
    let c = corner_graph(&g, &n).unwrap();
    assert_eq!(c.len(), 3);
}
