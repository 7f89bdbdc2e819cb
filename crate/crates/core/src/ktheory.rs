//! The positive cone of K₀ for finite acyclic amplified graphs, the
//! unit-normalizing automorphism and the corner graph with finite heads.
//!
//! For an amplified graph the cone is the monoid `H ⊆ ⊕_v ℤ` generated by
//! the basis vectors `δ_v` and by `δ_v − Σ_{e∈T} δ_{r(e)}` for every
//! non-sink `v` and finite set `T` of edges out of `v`. Because every edge
//! is repeated infinitely often, `T` may hit each out-neighbour any finite
//! number of times.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{Mult, MultGraph};
use crate::num::{Coeff, Count};

/// Finitely supported integer vector indexed by vertex labels. Zero
/// coordinates are not stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct K0Vector<Z> {
    coords: BTreeMap<String, Z>,
}

impl<Z: Coeff> K0Vector<Z> {
    pub fn new() -> Self {
        K0Vector {
            coords: BTreeMap::new(),
        }
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, i64)>) -> Self {
        let mut v = Self::new();
        for (k, x) in pairs {
            v.set(k, Z::from_i64(x).expect("small coefficient"));
        }
        v
    }

    pub fn basis(v: &str) -> Self {
        let mut x = Self::new();
        x.set(v, Z::one());
        x
    }

    pub fn get(&self, v: &str) -> Z {
        self.coords.get(v).cloned().unwrap_or_else(Z::zero)
    }

    pub fn set(&mut self, v: &str, x: Z) {
        if x.is_zero() {
            self.coords.remove(v);
        } else {
            self.coords.insert(v.to_string(), x);
        }
    }

    pub fn add_at(&mut self, v: &str, x: &Z) -> Result<()> {
        let cur = self.get(v);
        self.set(v, cur.try_add(x)?);
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Z)> {
        self.coords.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn support(&self) -> impl Iterator<Item = &str> {
        self.coords.keys().map(String::as_str)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (k, v) in other.iter() {
            out.add_at(k, v)?;
        }
        Ok(out)
    }

    /// Coordinates in the given vertex order.
    pub fn to_dense(&self, order: &[String]) -> Vec<Z> {
        order.iter().map(|v| self.get(v)).collect()
    }

    pub fn from_dense(order: &[String], xs: &[Z]) -> Self {
        let mut v = Self::new();
        for (k, x) in order.iter().zip(xs) {
            v.set(k, x.clone());
        }
        v
    }

    fn check_support<C: Count>(&self, g: &MultGraph<C>) -> Result<()> {
        match self.support().find(|v| !g.contains(v)) {
            Some(v) => Err(Error::UnknownLabel(v.to_string())),
            None => Ok(()),
        }
    }
}

impl<Z: fmt::Display> fmt::Display for K0Vector<Z> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (k, v)) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k}: {v}")?;
        }
        write!(f, ")")
    }
}

/// `δ_apex − Σ_w subtract[w]·δ_w` with every `w` an out-neighbour of the
/// apex; an empty subtraction is the plain basis vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorInstance<Z> {
    pub apex: String,
    pub subtract: BTreeMap<String, Z>,
}

impl<Z: Coeff> GeneratorInstance<Z> {
    pub fn value(&self) -> Result<K0Vector<Z>> {
        let mut x = K0Vector::basis(&self.apex);
        for (w, c) in &self.subtract {
            x.add_at(w, &-c.clone())?;
        }
        Ok(x)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonoidCertificate<Z> {
    /// Generator instances summing to the element.
    Sum(Vec<GeneratorInstance<Z>>),
    /// A negative coordinate with no strict ancestor carrying a positive one.
    Refutation { vertex: String, value: Z },
}

impl<Z: Coeff> MonoidCertificate<Z> {
    /// Re-checks the certificate against the graph and the claimed element.
    pub fn replay<C: Count>(&self, g: &MultGraph<C>, x: &K0Vector<Z>) -> Result<bool> {
        match self {
            MonoidCertificate::Sum(gens) => {
                let mut acc = K0Vector::new();
                for inst in gens {
                    if !g.contains(&inst.apex) {
                        return Ok(false);
                    }
                    for (w, c) in &inst.subtract {
                        if c.is_negative() || g.mult(&inst.apex, w).is_none() {
                            return Ok(false);
                        }
                    }
                    acc = acc.try_add(&inst.value()?)?;
                }
                Ok(&acc == x)
            }
            MonoidCertificate::Refutation { vertex, value } => {
                if x.get(vertex) != *value || !value.is_negative() {
                    return Ok(false);
                }
                Ok(g.strict_ancestors(vertex).iter().all(|u| !x.get(u).is_positive()))
            }
        }
    }
}

fn require_amplified<C: Count>(g: &MultGraph<C>) -> Result<()> {
    if !g.is_amplified() {
        return Err(Error::Unsupported(
            "monoid computations need every edge to have infinite multiplicity".into(),
        ));
    }
    if !g.is_acyclic() {
        return Err(Error::Unsupported("graph has a cycle".into()));
    }
    Ok(())
}

/// Decides `x ∈ H`.
///
/// `x ∈ H` exactly when every vertex with a negative coordinate has a
/// strict ancestor with a positive one: a single instance at that ancestor
/// may subtract any amount along its out-edges, and the subtraction is
/// passed down a path by instances whose `+1` cancels the previous `−1`.
pub fn monoid_contains<C: Count, Z: Coeff>(
    g: &MultGraph<C>,
    x: &K0Vector<Z>,
) -> Result<(bool, MonoidCertificate<Z>)> {
    require_amplified(g)?;
    x.check_support(g)?;
    let order = g.topological_order().expect("checked acyclic");
    // Pick, for every vertex that needs funding, a parent on a path from a
    // positive vertex; `active` marks vertices that will own an instance.
    let mut active: BTreeSet<String> = order.iter().filter(|v| x.get(v).is_positive()).cloned().collect();
    let mut feeder: BTreeMap<String, String> = BTreeMap::new();
    for v in &order {
        if x.get(v).is_negative() {
            let Some(path) = funding_path(g, x, v) else {
                return Ok((
                    false,
                    MonoidCertificate::Refutation {
                        vertex: v.clone(),
                        value: x.get(v),
                    },
                ));
            };
            for pair in path.windows(2) {
                feeder.entry(pair[1].clone()).or_insert_with(|| pair[0].clone());
                active.insert(pair[0].clone());
            }
        }
    }
    // g_v instances at v: max(x_v, 1) when active, otherwise max(x_v, 0).
    let mut apex_count: BTreeMap<String, Z> = BTreeMap::new();
    for v in &order {
        let xv = x.get(v);
        let gv = if active.contains(v) {
            xv.clone().max(Z::one())
        } else {
            xv.clone().max(Z::zero())
        };
        apex_count.insert(v.clone(), gv);
    }
    // The surplus g_v − x_v at every vertex is subtracted by its feeder.
    let mut subtract: BTreeMap<String, BTreeMap<String, Z>> = BTreeMap::new();
    for v in &order {
        let surplus = apex_count[v].try_sub(&x.get(v))?;
        if surplus.is_zero() {
            continue;
        }
        let f = feeder
            .get(v)
            .expect("a vertex with surplus lies on a funding path")
            .clone();
        let e = subtract.entry(f).or_default().entry(v.clone()).or_insert_with(Z::zero);
        *e = e.try_add(&surplus)?;
    }
    let mut gens = Vec::new();
    for v in &order {
        let mut count = apex_count[v].clone();
        if count.is_zero() {
            continue;
        }
        gens.push(GeneratorInstance {
            apex: v.clone(),
            subtract: subtract.remove(v).unwrap_or_default(),
        });
        count = count - Z::one();
        while count.is_positive() {
            gens.push(GeneratorInstance {
                apex: v.clone(),
                subtract: BTreeMap::new(),
            });
            count = count - Z::one();
        }
    }
    let cert = MonoidCertificate::Sum(gens);
    debug_assert!(cert.replay(g, x).unwrap_or(false));
    Ok((true, cert))
}

/// Shortest path (by BFS backwards) from a positive vertex to `v`.
fn funding_path<C: Count, Z: Coeff>(g: &MultGraph<C>, x: &K0Vector<Z>, v: &str) -> Option<Vec<String>> {
    let mut prev: BTreeMap<String, String> = BTreeMap::new();
    let mut queue = std::collections::VecDeque::from([v.to_string()]);
    let mut seen = BTreeSet::from([v.to_string()]);
    while let Some(u) = queue.pop_front() {
        let mut parents: Vec<&str> = g.in_edges(&u).map(|(s, _)| s).collect();
        parents.sort();
        for p in parents {
            if !seen.insert(p.to_string()) {
                continue;
            }
            prev.insert(p.to_string(), u.clone());
            if x.get(p).is_positive() {
                let mut path = vec![p.to_string()];
                let mut cur = p.to_string();
                while let Some(next) = prev.get(&cur) {
                    path.push(next.clone());
                    cur = next.clone();
                }
                return Some(path);
            }
            queue.push_back(p.to_string());
        }
    }
    None
}

/// `n_v ≥ 1` at every source: the necessary condition for `n` to be the
/// class of a full projection.
pub fn source_positive<C: Count, Z: Coeff>(g: &MultGraph<C>, n: &K0Vector<Z>) -> bool {
    g.sources().iter().all(|v| n.get(v) >= Z::one())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitNormalization<Z> {
    /// Vertex order used for the matrices.
    pub order: Vec<String>,
    pub m: K0Vector<Z>,
    /// `alpha[i][j]` is the coefficient of `δ_{order[i]}` in `α(δ_{order[j]})`.
    pub alpha: Vec<Vec<Z>>,
    pub beta: Vec<Vec<Z>>,
    /// `k_{v,w}` for every vertex `v` and source `w` above it.
    pub k_table: BTreeMap<(String, String), Z>,
}

pub fn mat_mul<Z: Coeff>(a: &[Vec<Z>], b: &[Vec<Z>]) -> Result<Vec<Vec<Z>>> {
    let n = a.len();
    let mut out = vec![vec![Z::zero(); b.first().map_or(0, Vec::len)]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            if a[i][k].is_zero() {
                continue;
            }
            for (j, bkj) in bk.iter().enumerate() {
                out[i][j] = out[i][j].try_add(&a[i][k].try_mul(bkj)?)?;
            }
        }
    }
    Ok(out)
}

pub fn apply<Z: Coeff>(a: &[Vec<Z>], order: &[String], x: &K0Vector<Z>) -> Result<K0Vector<Z>> {
    let col: Vec<Vec<Z>> = x.to_dense(order).into_iter().map(|c| vec![c]).collect();
    let out = mat_mul(a, &col)?;
    let flat: Vec<Z> = out.into_iter().map(|r| r[0].clone()).collect();
    Ok(K0Vector::from_dense(order, &flat))
}

/// The finite generating family used to test `α(H) ⊆ H`: every `δ_v` and
/// every instance subtracting one or two edges (possibly parallel).
pub fn truncated_generators<C: Count, Z: Coeff>(g: &MultGraph<C>) -> Vec<K0Vector<Z>> {
    let mut out = Vec::new();
    for v in g.vertices() {
        out.push(K0Vector::basis(v));
        let nbrs: Vec<&str> = g.out_edges(v).map(|(t, _)| t).collect();
        for (i, a) in nbrs.iter().enumerate() {
            let mut x = K0Vector::basis(v);
            x.add_at(a, &-Z::one()).expect("small");
            out.push(x.clone());
            for b in &nbrs[i..] {
                let mut y = x.clone();
                y.add_at(b, &-Z::one()).expect("small");
                out.push(y);
            }
        }
    }
    out
}

/// Moves a source-positive class `n ∈ H` to a class `m ≥ 1` everywhere by
/// an automorphism `α` of `⊕ℤ` with `α(H) = H`.
///
/// `k_{v,w} = max(0, ⌈(1 − n_v)/n_w⌉)` for each source `w` above `v`, and
/// `α(δ_w) = δ_w + Σ_{v : w ∈ T_v} k_{v,w} δ_v` on sources. The inverse
/// subtracts the same coefficients. Every stated identity is checked before
/// returning.
pub fn unit_normalize<C: Count, Z: Coeff>(g: &MultGraph<C>, n: &K0Vector<Z>) -> Result<UnitNormalization<Z>> {
    require_amplified(g)?;
    n.check_support(g)?;
    let sources = g.sources();
    if let Some(s) = sources.iter().find(|s| n.get(s) < Z::one()) {
        return Err(Error::pre(format!("source {s:?} has n = {} < 1", n.get(s))));
    }
    if !monoid_contains(g, n)?.0 {
        return Err(Error::pre(format!("{n} is not in the positive cone")));
    }
    let order: Vec<String> = g.vertices().to_vec();
    let idx: BTreeMap<&str, usize> = order.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let source_set: BTreeSet<&str> = sources.iter().map(String::as_str).collect();

    let mut k_table = BTreeMap::new();
    let mut m = K0Vector::new();
    for v in &order {
        let mut t_v: Vec<&str> = g
            .strict_ancestors(v)
            .into_iter()
            .filter(|w| source_set.contains(w.as_str()))
            .map(|w| order[idx[w.as_str()]].as_str())
            .collect();
        if source_set.contains(v.as_str()) {
            t_v.push(v);
        }
        t_v.sort();
        let nv = n.get(v);
        let mut mv = nv.clone();
        for w in t_v {
            let nw = n.get(w);
            let need = Z::one().try_sub(&nv)?;
            let k = if need.is_positive() { need.div_ceil(&nw) } else { Z::zero() };
            mv = mv.try_add(&nw.try_mul(&k)?)?;
            k_table.insert((v.clone(), w.to_string()), k);
        }
        m.set(v, mv);
    }

    let size = order.len();
    let mut alpha = vec![vec![Z::zero(); size]; size];
    let mut beta = vec![vec![Z::zero(); size]; size];
    for i in 0..size {
        alpha[i][i] = Z::one();
        beta[i][i] = Z::one();
    }
    for ((v, w), k) in &k_table {
        if v == w || k.is_zero() {
            continue;
        }
        let (i, j) = (idx[v.as_str()], idx[w.as_str()]);
        alpha[i][j] = k.clone();
        beta[i][j] = -k.clone();
    }

    let ab = mat_mul(&alpha, &beta)?;
    for (i, row) in ab.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let want = if i == j { Z::one() } else { Z::zero() };
            if *x != want {
                return Err(Error::Verification(format!("alpha*beta is not the identity at ({i},{j})")));
            }
        }
    }
    if apply(&alpha, &order, n)? != m {
        return Err(Error::Verification("alpha(n) differs from m".into()));
    }
    if let Some(v) = order.iter().find(|v| m.get(v) < Z::one()) {
        return Err(Error::Verification(format!("m_{v} < 1")));
    }
    for x in truncated_generators::<C, Z>(g) {
        for (name, mat) in [("alpha", &alpha), ("beta", &beta)] {
            let y = apply(mat, &order, &x)?;
            if !monoid_contains(g, &y)?.0 {
                return Err(Error::Verification(format!("{name}({x}) = {y} is not in H")));
            }
        }
    }
    Ok(UnitNormalization {
        order,
        m,
        alpha,
        beta,
        k_table,
    })
}

/// Label of the `i`-th head vertex in front of `v`.
pub fn head_label(i: usize, v: &str) -> String {
    format!("w_{{{i},{v}}}")
}

/// The graph `g` with a head `w_{1,v} → … → w_{m_v−1,v} → v` of
/// multiplicity-one edges at every vertex, where `m` comes from
/// [`unit_normalize`].
pub fn corner_graph<C: Count, Z: Coeff>(g: &MultGraph<C>, n: &K0Vector<Z>) -> Result<MultGraph<C>> {
    let norm = unit_normalize(g, n)?;
    let mut out = g.clone();
    for v in &norm.order {
        let len = norm
            .m
            .get(v)
            .to_usize()
            .ok_or_else(|| Error::Unsupported(format!("head length at {v:?} does not fit in memory")))?
            - 1;
        for i in 1..=len {
            out.add_vertex(head_label(i, v))?;
        }
        for i in 1..=len {
            let next = if i == len { v.clone() } else { head_label(i + 1, v) };
            out.add_edge(&head_label(i, v), &next, Mult::Finite(C::one()))?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vw() -> MultGraph<u64> {
        MultGraph::amplified(&["v", "w"], &[("v", "w")]).unwrap()
    }

    #[test]
    fn generator_with_large_subtraction() {
        let x = K0Vector::<i64>::from_pairs([("v", 1), ("w", -5)]);
        let (ok, cert) = monoid_contains(&vw(), &x).unwrap();
        assert!(ok);
        assert!(cert.replay(&vw(), &x).unwrap());
        match cert {
            MonoidCertificate::Sum(g) => assert_eq!(g.len(), 1),
            _ => panic!("expected a sum"),
        }
    }

    #[test]
    fn unfunded_negative_is_refuted() {
        let x = K0Vector::<i64>::from_pairs([("w", -1)]);
        let (ok, cert) = monoid_contains(&vw(), &x).unwrap();
        assert!(!ok);
        assert!(cert.replay(&vw(), &x).unwrap());
    }

    #[test]
    fn finite_edges_are_unsupported() {
        let mut g = MultGraph::<u64>::new();
        g.add_vertex("a").unwrap();
        g.add_vertex("b").unwrap();
        g.add_edge("a", "b", Mult::Finite(1)).unwrap();
        assert!(matches!(
            monoid_contains(&g, &K0Vector::<i64>::basis("a")),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn normalize_one_zero() {
        let n = K0Vector::<i64>::from_pairs([("v", 1)]);
        let u = unit_normalize(&vw(), &n).unwrap();
        assert_eq!(u.k_table[&("w".to_string(), "v".to_string())], 1);
        assert_eq!(u.m, K0Vector::from_pairs([("v", 1), ("w", 1)]));
        let image = apply(&u.alpha, &u.order, &K0Vector::basis("v")).unwrap();
        assert_eq!(image, K0Vector::from_pairs([("v", 1), ("w", 1)]));
    }

    #[test]
    fn normalize_rejects_zero_source() {
        let n = K0Vector::<i64>::from_pairs([("w", 5)]);
        assert!(matches!(unit_normalize(&vw(), &n), Err(Error::Precondition(_))));
        assert!(!source_positive(&vw(), &n));
    }

    #[test]
    fn head_labels() {
        assert_eq!(head_label(2, "v"), "w_{2,v}");
    }
}
