//! Graphs whose C*-algebras realize a diagram's AF-algebra, and an
//! independent path-count verifier.
//!
//! Separated construction (proper M_k-separated input): keep the ideal
//! part `H` with its edges, add a chain `z_1, …, z_{k−1} → z_k`, let `z_k`
//! emit `m(v) = |y_{n−1}E¹v|` edges into each `v ∈ H_n`, and attach
//! `δ(v) = defect(v) − 1` sources `x_i^v → v`. `z_k` is the only infinite
//! emitter.
//!
//! Strict construction (every degree ≥ 2, every defect ≥ 1): keep the whole
//! diagram and attach `δ(v)` sources to each vertex.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{Mult, MultGraph};
use crate::ideals::{check_separated, SeparatedStructure};
use crate::model::{BratteliDiagram, Level, MultMatrix, Vertex};
use crate::num::Count;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Construction {
    Separated,
    Strict,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Role {
    /// A vertex of the source diagram.
    Diagram { level: usize },
    /// `z_i` of the separated construction.
    Chain { index: usize },
    /// `x_i^v`, the `index`-th source attached to `target`.
    Source { target: String, index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizedGraph<C> {
    pub construction: Construction,
    /// Levels of the source diagram represented.
    pub depth: usize,
    pub graph: MultGraph<C>,
    pub roles: BTreeMap<String, Role>,
    /// Source-diagram level contents in their original order, including
    /// the `y`-row vertex in the separated case.
    pub layout: Vec<Vec<String>>,
    /// `y_1, …, y_depth` for the separated construction.
    pub y_row: Option<Vec<String>>,
    pub k: Option<C>,
    pub delta: BTreeMap<String, C>,
    pub m: BTreeMap<String, C>,
}

pub fn chain_label(i: usize) -> String {
    format!("z_{i}")
}

pub fn source_label(i: usize, v: &str) -> String {
    format!("x_{i}^{v}")
}

fn to_usize<C: Count>(c: &C, what: &str) -> Result<usize> {
    c.to_usize()
        .ok_or_else(|| Error::Unsupported(format!("{what} = {c} is too large to materialize")))
}

fn add_sources<C: Count>(
    graph: &mut MultGraph<C>,
    roles: &mut BTreeMap<String, Role>,
    v: &str,
    level: usize,
    delta: &C,
) -> Result<()> {
    for i in 1..=to_usize(delta, "δ")? {
        let x = source_label(i, v);
        graph.add_vertex(x.clone())?;
        graph.set_level(&x, level)?;
        graph.add_edge(&x, v, Mult::Finite(C::one()))?;
        roles.insert(
            x,
            Role::Source {
                target: v.to_string(),
                index: i,
            },
        );
    }
    Ok(())
}

/// Separated construction through `depth` levels.
pub fn realize_separated<C: Count>(
    d: &BratteliDiagram<C>,
    ss: &SeparatedStructure<C>,
    depth: usize,
) -> Result<RealizedGraph<C>> {
    if ss.depth() < depth {
        return Err(Error::pre(format!("structure covers {} levels, {depth} requested", ss.depth())));
    }
    let e = d.materialize(depth)?;
    let ss = SeparatedStructure {
        k: ss.k.clone(),
        y: ss.y[..depth].to_vec(),
    };
    if let Some(why) = check_separated(&e, &ss)? {
        return Err(Error::pre(format!("not M_k-separated: {why}")));
    }
    let k = to_usize(&ss.k, "k")?;
    if k == 0 {
        return Err(Error::pre("k must be at least 1"));
    }
    let mut graph = MultGraph::new();
    let mut roles = BTreeMap::new();
    let mut delta = BTreeMap::new();
    let mut mvals = BTreeMap::new();
    for i in 1..=k {
        graph.add_vertex(chain_label(i))?;
        roles.insert(chain_label(i), Role::Chain { index: i });
    }
    for i in 1..k {
        graph.add_edge(&chain_label(i), &chain_label(k), Mult::Finite(C::one()))?;
    }
    let zk = chain_label(k);
    graph.mark_infinite_emitter(&zk)?;
    let mut layout = Vec::with_capacity(depth);
    for n in 1..=depth {
        layout.push(e.level(n)?.labels().map(str::to_string).collect());
        for v in ss.h_at(&e, n)? {
            let def = e.defect(n, &v)?;
            let dv = def
                .sub_nonneg(&C::one())
                .ok_or_else(|| Error::pre(format!("{v:?} at level {n} has zero defect; input is not proper")))?;
            graph.add_vertex(v.clone())?;
            graph.set_level(&v, n)?;
            roles.insert(v.clone(), Role::Diagram { level: n });
            if n >= 2 {
                for w in ss.h_at(&e, n - 1)? {
                    graph.add_edge(&w, &v, Mult::Finite(e.mult(n - 1, &w, &v)))?;
                }
            }
            let mv = if n == 1 { C::zero() } else { e.mult(n - 1, ss.y_at(n - 1), &v) };
            graph.add_edge(&zk, &v, Mult::Finite(mv.clone()))?;
            add_sources(&mut graph, &mut roles, &v, n, &dv)?;
            delta.insert(v.clone(), dv);
            mvals.insert(v, mv);
        }
    }
    graph.set_staged_depth(Some(depth));
    Ok(RealizedGraph {
        construction: Construction::Separated,
        depth,
        graph,
        roles,
        layout,
        y_row: Some(ss.y.clone()),
        k: Some(ss.k.clone()),
        delta,
        m: mvals,
    })
}

/// Strict construction through `depth` levels.
pub fn realize_strict<C: Count>(d: &BratteliDiagram<C>, depth: usize) -> Result<RealizedGraph<C>> {
    let e = d.materialize(depth)?;
    let two = C::one() + C::one();
    let mut graph = MultGraph::new();
    let mut roles = BTreeMap::new();
    let mut delta = BTreeMap::new();
    let mut layout = Vec::with_capacity(depth);
    for n in 1..=depth {
        let level = e.level(n)?;
        layout.push(level.labels().map(str::to_string).collect());
        for v in &level.vertices {
            if v.degree < two {
                return Err(Error::pre(format!(
                    "{:?} at level {n} has degree {} < 2",
                    v.label, v.degree
                )));
            }
            let dv = e.defect(n, &v.label)?.sub_nonneg(&C::one()).ok_or_else(|| {
                Error::pre(format!("{:?} at level {n} has zero defect", v.label))
            })?;
            graph.add_vertex(v.label.clone())?;
            graph.set_level(&v.label, n)?;
            roles.insert(v.label.clone(), Role::Diagram { level: n });
            if n >= 2 {
                if let Some(mat) = e.matrix_from(n - 1) {
                    for (w, c) in mat.incoming(&v.label) {
                        graph.add_edge(w, &v.label, Mult::Finite(c.clone()))?;
                    }
                }
            }
            add_sources(&mut graph, &mut roles, &v.label, n, &dv)?;
            delta.insert(v.label.clone(), dv);
        }
    }
    if !d.is_finite() || depth < d.prefix_len() {
        graph.set_staged_depth(Some(depth));
    }
    Ok(RealizedGraph {
        construction: Construction::Strict,
        depth,
        graph,
        roles,
        layout,
        y_row: None,
        k: None,
        delta,
        m: BTreeMap::new(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckKind {
    /// `|src G¹ dst|` against the diagram.
    Multiplicity { src: String, dst: String },
    /// Number of sources attached to a vertex against `defect − 1`.
    Sources { vertex: String },
    /// Path count into a vertex against its degree.
    PathCount { vertex: String },
    /// Shape of the `z` chain.
    Chain { detail: String },
    /// Edges into a vertex that the construction does not produce.
    Unexpected { src: String, dst: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    pub level: usize,
    pub kind: CheckKind,
    pub expected: String,
    pub actual: String,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizationCertificate {
    pub depth: usize,
    pub comparisons: Vec<Comparison>,
    pub pass: bool,
    /// Index into `comparisons` of the first failure.
    pub first_failure: Option<usize>,
}

impl RealizationCertificate {
    fn push<T: ToString>(&mut self, level: usize, kind: CheckKind, expected: T, actual: T) {
        let (expected, actual) = (expected.to_string(), actual.to_string());
        let ok = expected == actual;
        if !ok && self.first_failure.is_none() {
            self.first_failure = Some(self.comparisons.len());
        }
        self.pass &= ok;
        self.comparisons.push(Comparison {
            level,
            kind,
            expected,
            actual,
            ok,
        });
    }

    pub fn first_failure(&self) -> Option<&Comparison> {
        self.first_failure.map(|i| &self.comparisons[i])
    }

    /// Checked path count of a vertex, if recorded.
    pub fn path_count(&self, vertex: &str) -> Option<&str> {
        self.comparisons.iter().find_map(|c| match &c.kind {
            CheckKind::PathCount { vertex: v } if v == vertex => Some(c.actual.as_str()),
            _ => None,
        })
    }
}

/// Compares a realized graph with its source diagram through `depth`.
///
/// Expected values come from the diagram alone; the graph contributes only
/// its edges and the role of each vertex. Per level, multiplicities and
/// source counts are compared before path counts.
pub fn verify_realization<C: Count>(
    g: &RealizedGraph<C>,
    d: &BratteliDiagram<C>,
    depth: usize,
) -> Result<RealizationCertificate> {
    if depth > g.depth || depth > g.layout.len() {
        return Err(Error::pre(format!("graph covers {} levels, {depth} requested", g.depth)));
    }
    let e = d.materialize(depth)?;
    let gr = &g.graph;
    let mut cert = RealizationCertificate {
        depth,
        comparisons: Vec::new(),
        pass: true,
        first_failure: None,
    };
    let (zk, k, y_row) = match g.construction {
        Construction::Separated => {
            let k = g.k.clone().ok_or_else(|| Error::pre("separated graph without k"))?;
            let y = g.y_row.clone().ok_or_else(|| Error::pre("separated graph without y-row"))?;
            (Some(chain_label(to_usize(&k, "k")?)), Some(k), Some(y))
        }
        Construction::Strict => (None, None, None),
    };
    if let (Some(zk), Some(k)) = (&zk, &k) {
        let kk = to_usize(k, "k")?;
        for i in 1..kk {
            let actual = gr.mult(&chain_label(i), zk).cloned();
            cert.push(
                0,
                CheckKind::Chain {
                    detail: format!("{} -> {zk}", chain_label(i)),
                },
                Mult::Finite(C::one()).to_string(),
                actual.map_or_else(|| "absent".to_string(), |m| m.to_string()),
            );
        }
        cert.push(
            0,
            CheckKind::Chain {
                detail: format!("{zk} is an infinite emitter"),
            },
            "true".to_string(),
            gr.is_infinite_emitter(zk).to_string(),
        );
        let emitters: Vec<&String> = gr.infinite_emitters().iter().collect();
        cert.push(
            0,
            CheckKind::Chain {
                detail: "infinite emitters".into(),
            },
            format!("[{zk:?}]"),
            format!("{emitters:?}"),
        );
    }
    let pc = gr.path_counts()?;
    let is_h = |n: usize, v: &str| y_row.as_ref().is_none_or(|y| y[n - 1] != v);
    for n in 1..=depth {
        let level = e.level(n)?;
        let h: Vec<&Vertex<C>> = level.vertices.iter().filter(|v| is_h(n, &v.label)).collect();
        for v in &h {
            let mut expected_in: BTreeSet<String> = BTreeSet::new();
            if n >= 2 {
                for w in e.level(n - 1)?.labels().filter(|w| is_h(n - 1, w)) {
                    let want = e.mult(n - 1, w, &v.label);
                    let got = gr.finite_mult(w, &v.label).unwrap_or_else(|_| C::zero());
                    if !want.is_zero() || !got.is_zero() {
                        cert.push(
                            n,
                            CheckKind::Multiplicity {
                                src: w.to_string(),
                                dst: v.label.clone(),
                            },
                            want,
                            got,
                        );
                    }
                    expected_in.insert(w.to_string());
                }
            }
            if let Some(zk) = &zk {
                let want = if n == 1 {
                    C::zero()
                } else {
                    e.mult(n - 1, &y_row.as_ref().expect("separated")[n - 2], &v.label)
                };
                let got = gr.finite_mult(zk, &v.label).unwrap_or_else(|_| C::zero());
                cert.push(
                    n,
                    CheckKind::Multiplicity {
                        src: zk.clone(),
                        dst: v.label.clone(),
                    },
                    want,
                    got,
                );
                expected_in.insert(zk.clone());
            }
            let defect = e.defect(n, &v.label)?;
            let want_sources = defect.sub_nonneg(&C::one()).map_or_else(|| "negative".to_string(), |c| c.to_string());
            let mut sources = 0usize;
            for (src, m) in gr.in_edges(&v.label) {
                match g.roles.get(src) {
                    Some(Role::Source { target, .. }) if target == &v.label && gr.in_edges(src).next().is_none() => {
                        sources += 1;
                        if *m != Mult::Finite(C::one()) {
                            cert.push(
                                n,
                                CheckKind::Multiplicity {
                                    src: src.to_string(),
                                    dst: v.label.clone(),
                                },
                                Mult::Finite(C::one()).to_string(),
                                m.to_string(),
                            );
                        }
                    }
                    _ if expected_in.contains(src) => {}
                    _ => cert.push(
                        n,
                        CheckKind::Unexpected {
                            src: src.to_string(),
                            dst: v.label.clone(),
                        },
                        "absent".to_string(),
                        m.to_string(),
                    ),
                }
            }
            cert.push(
                n,
                CheckKind::Sources {
                    vertex: v.label.clone(),
                },
                want_sources,
                sources.to_string(),
            );
        }
        for v in &h {
            let got = pc
                .get(&v.label)
                .map_or_else(|| "absent".to_string(), |c| c.to_string());
            cert.push(
                n,
                CheckKind::PathCount {
                    vertex: v.label.clone(),
                },
                v.degree.to_string(),
                got,
            );
        }
    }
    Ok(cert)
}

/// The diagram of the canonical filtration of the realized graph: degrees
/// are path counts and matrices are edge multiplicities. In the separated
/// case the `y`-slot has degree `pathcount(z_k)` and feeds `v` with
/// `|z_k G¹ v|` edges.
pub fn reconstruct_diagram<C: Count>(g: &RealizedGraph<C>, depth: usize) -> Result<BratteliDiagram<C>> {
    if depth > g.layout.len() {
        return Err(Error::pre(format!("graph covers {} levels, {depth} requested", g.layout.len())));
    }
    let gr = &g.graph;
    let pc = gr.path_counts()?;
    let zk = match g.construction {
        Construction::Separated => Some(chain_label(to_usize(
            g.k.as_ref().ok_or_else(|| Error::pre("separated graph without k"))?,
            "k",
        )?)),
        Construction::Strict => None,
    };
    let y_at = |n: usize| g.y_row.as_ref().map(|y| y[n - 1].as_str());
    let mut levels = Vec::with_capacity(depth);
    let mut matrices = Vec::with_capacity(depth.saturating_sub(1));
    for n in 1..=depth {
        let mut vertices = Vec::new();
        for v in &g.layout[n - 1] {
            let degree = if Some(v.as_str()) == y_at(n) {
                pc[zk.as_ref().expect("separated")].clone()
            } else {
                pc.get(v)
                    .cloned()
                    .ok_or_else(|| Error::UnknownLabel(v.clone()))?
            };
            vertices.push(Vertex::new(v.clone(), degree));
        }
        levels.push(Level::new(n, vertices));
        if n >= 2 {
            let mut mat = MultMatrix::new(n - 1);
            for w in &g.layout[n - 2] {
                for v in &g.layout[n - 1] {
                    let mult = match (Some(w.as_str()) == y_at(n - 1), Some(v.as_str()) == y_at(n)) {
                        (true, true) => C::one(),
                        (true, false) => gr.finite_mult(zk.as_ref().expect("separated"), v)?,
                        (false, true) => C::zero(),
                        (false, false) => gr.finite_mult(w, v)?,
                    };
                    mat.set(w.clone(), v.clone(), mult);
                }
            }
            matrices.push(mat);
        }
    }
    Ok(BratteliDiagram::new_unchecked(levels, matrices, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fixture_e, fixture_m3};
    use crate::ideals::recognize_separated;

    #[test]
    fn m3_sources_and_path_counts() {
        let d = fixture_m3::<u64>();
        let ss = recognize_separated(&d, 6).unwrap().unwrap().structure;
        let g = realize_separated(&d, &ss, 6).unwrap();
        let deltas: Vec<u64> = (1..=4).map(|n| g.delta[&format!("v{n}")]).collect();
        assert_eq!(deltas, vec![3, 1, 0, 2]);
        assert_eq!(g.graph.finite_mult("z_1", "z_3").unwrap(), 1);
        assert_eq!(g.graph.finite_mult("z_3", "v2").unwrap(), 6);
        let cert = verify_realization(&g, &d, 6).unwrap();
        assert!(cert.pass);
        assert_eq!(cert.path_count("v2"), Some("24"));
        assert_eq!(reconstruct_diagram(&g, 6).unwrap(), d.materialize(6).unwrap());
    }

    #[test]
    fn strict_rejects_degree_one() {
        let err = realize_strict(&fixture_e::<u64>(), 3).unwrap_err();
        assert!(err.to_string().contains("bot1"));
    }

    #[test]
    fn corrupted_multiplicity_is_the_first_failure() {
        let d = fixture_m3::<u64>();
        let ss = recognize_separated(&d, 4).unwrap().unwrap().structure;
        let mut g = realize_separated(&d, &ss, 4).unwrap();
        g.graph.set_edge("v2", "v3", Mult::Finite(2)).unwrap();
        let cert = verify_realization(&g, &d, 4).unwrap();
        assert!(!cert.pass);
        let first = cert.first_failure().unwrap();
        assert_eq!(
            first.kind,
            CheckKind::Multiplicity {
                src: "v2".into(),
                dst: "v3".into()
            }
        );
        let idx = cert.first_failure.unwrap();
        assert!(cert.comparisons[..idx].iter().all(|c| c.ok));
    }
}
