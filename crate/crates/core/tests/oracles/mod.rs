//! Brute-force reference implementations shared by the integration tests
//! and the acceptance suite. None of these call the library routine they
//! are compared against.

#![allow(dead_code)]

use std::collections::BTreeMap;

use afgraph::ktheory::K0Vector;
use afgraph::{BratteliDiagram, Mult, MultGraph};
use rand::Rng;

/// Monoid membership by exhaustive search over generator multisets.
///
/// A sum of instances `δ_a − (subtraction along out-edges of a)` is
/// described by `g_a`, the number of instances at each apex, and the total
/// amount subtracted at each vertex, which must be nonnegative and may be
/// positive only if some parent owns an instance. With `‖x‖∞ ≤ 3`,
/// counts up to 3 suffice: replacing a positive `g_w` by `max(x_w, 1)`
/// keeps every constraint satisfiable.
pub fn brute_monoid(g: &MultGraph<u64>, x: &K0Vector<i64>) -> bool {
    let vs = g.vertices().to_vec();
    let n = vs.len();
    let parents: Vec<Vec<usize>> = vs
        .iter()
        .map(|v| {
            vs.iter()
                .enumerate()
                .filter(|(_, p)| g.mult(p, v).is_some())
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let xs: Vec<i64> = vs.iter().map(|v| x.get(v)).collect();
    let mut counts = vec![0i64; n];
    loop {
        let ok = (0..n).all(|w| {
            let sub = counts[w] - xs[w];
            sub == 0 || (sub > 0 && parents[w].iter().any(|&p| counts[p] >= 1))
        });
        if ok {
            return true;
        }
        let mut i = 0;
        loop {
            if i == n {
                return false;
            }
            counts[i] += 1;
            if counts[i] <= 3 {
                break;
            }
            counts[i] = 0;
            i += 1;
        }
    }
}

/// Every acyclic amplified graph on `1..=max_n` vertices whose edges go
/// from lower to higher index.
pub fn dag_shapes(max_n: usize) -> Vec<MultGraph<u64>> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let names: Vec<String> = (0..n).map(|i| format!("u{i}")).collect();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        for mask in 0u32..(1 << pairs.len()) {
            let mut g = MultGraph::new();
            for v in &names {
                g.add_vertex(v.clone()).unwrap();
            }
            for (b, (i, j)) in pairs.iter().enumerate() {
                if mask & (1 << b) != 0 {
                    g.add_edge(&names[*i], &names[*j], Mult::Infinite).unwrap();
                }
            }
            out.push(g);
        }
    }
    out
}

/// All vectors over `labels` with coordinates in `-bound..=bound`.
pub fn all_vectors(labels: &[String], bound: i64) -> Vec<K0Vector<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![-bound; labels.len()];
    loop {
        out.push(K0Vector::from_dense(labels, &cur));
        let mut i = 0;
        loop {
            if i == labels.len() {
                return out;
            }
            cur[i] += 1;
            if cur[i] <= bound {
                break;
            }
            cur[i] = -bound;
            i += 1;
        }
    }
}

/// Random acyclic amplified graph on `n` vertices.
pub fn random_amplified_dag(rng: &mut impl Rng, n: usize, p: f64) -> MultGraph<u64> {
    let names: Vec<String> = (0..n).map(|i| format!("u{i}")).collect();
    let mut g = MultGraph::new();
    for v in &names {
        g.add_vertex(v.clone()).unwrap();
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(&names[i], &names[j], Mult::Infinite).unwrap();
            }
        }
    }
    g
}

/// Number of paths ending at `v`, the trivial path included, found by
/// walking every individual edge backwards.
pub fn dfs_path_count(g: &MultGraph<u64>, v: &str) -> u64 {
    let mut total = 1;
    for (u, m) in g.in_edges(v) {
        let copies = *m.finite().expect("finite edges");
        for _ in 0..copies {
            total += dfs_path_count(g, u);
        }
    }
    total
}

/// Number of level-by-level paths from `src` at level `a` to `dst` at
/// level `b`, by explicit enumeration of vertex sequences.
pub fn brute_paths(d: &BratteliDiagram<u64>, a: usize, src: &str, b: usize, dst: &str) -> u64 {
    if a == b {
        return u64::from(src == dst);
    }
    let mut total = 0;
    for w in d.level(a + 1).unwrap().labels() {
        let m = d.mult(a, src, w);
        if m > 0 {
            total += m * brute_paths(d, a + 1, w, b, dst);
        }
    }
    total
}

/// Degree sequence per level, keyed by label.
pub fn degrees(d: &BratteliDiagram<u64>) -> Vec<BTreeMap<String, u64>> {
    d.levels()
        .iter()
        .map(|l| l.vertices.iter().map(|v| (v.label.clone(), v.degree)).collect())
        .collect()
}
