//! Directed multigraphs with multiplicities in ℕ ∪ {∞}.
//!
//! A graph is either finite or a depth truncation of an infinite staged
//! graph (`staged_depth`), in which case vertices carry level annotations
//! and the vertices at the last level have lost their outgoing edges.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::num::Count;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mult<C> {
    Finite(C),
    Infinite,
}

impl<C: Count> Mult<C> {
    pub fn finite(&self) -> Option<&C> {
        match self {
            Mult::Finite(c) => Some(c),
            Mult::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Mult::Infinite)
    }
}

impl<C: fmt::Display> fmt::Display for Mult<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mult::Finite(c) => write!(f, "{c}"),
            Mult::Infinite => write!(f, "∞"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultGraph<C> {
    vertices: Vec<String>,
    members: BTreeSet<String>,
    edges: BTreeMap<(String, String), Mult<C>>,
    levels: BTreeMap<String, usize>,
    emitters: BTreeSet<String>,
    staged_depth: Option<usize>,
}

impl<C: Count> Default for MultGraph<C> {
    fn default() -> Self {
        Self::new()
    }
}

impl<C: Count> MultGraph<C> {
    pub fn new() -> Self {
        MultGraph {
            vertices: Vec::new(),
            members: BTreeSet::new(),
            edges: BTreeMap::new(),
            levels: BTreeMap::new(),
            emitters: BTreeSet::new(),
            staged_depth: None,
        }
    }

    /// Graph whose every listed edge has multiplicity ∞.
    pub fn amplified(vertices: &[&str], edges: &[(&str, &str)]) -> Result<Self> {
        let mut g = Self::new();
        for v in vertices {
            g.add_vertex(*v)?;
        }
        for (s, t) in edges {
            g.add_edge(s, t, Mult::Infinite)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, label: impl Into<String>) -> Result<()> {
        let label = label.into();
        if !self.members.insert(label.clone()) {
            return Err(Error::InvalidGraph(format!("duplicate vertex {label:?}")));
        }
        self.vertices.push(label);
        Ok(())
    }

    /// Adds (or accumulates onto) an edge. A zero finite multiplicity is a
    /// no-op; an infinite one flags the source as an infinite emitter.
    pub fn add_edge(&mut self, src: &str, dst: &str, mult: Mult<C>) -> Result<()> {
        for v in [src, dst] {
            if !self.members.contains(v) {
                return Err(Error::InvalidGraph(format!("edge references unknown vertex {v:?}")));
            }
        }
        let key = (src.to_string(), dst.to_string());
        let merged = match (self.edges.get(&key), mult) {
            (_, Mult::Finite(c)) if c.is_zero() => return Ok(()),
            (Some(Mult::Infinite), _) | (_, Mult::Infinite) => Mult::Infinite,
            (Some(Mult::Finite(a)), Mult::Finite(b)) => Mult::Finite(a.try_add(&b)?),
            (None, m) => m,
        };
        if merged.is_infinite() {
            self.emitters.insert(src.to_string());
        }
        self.edges.insert(key, merged);
        Ok(())
    }

    /// Overwrites an edge multiplicity; used for fault injection in tests
    /// and by callers that need exact replacement.
    pub fn set_edge(&mut self, src: &str, dst: &str, mult: Mult<C>) -> Result<()> {
        self.edges.remove(&(src.to_string(), dst.to_string()));
        self.add_edge(src, dst, mult)
    }

    pub fn set_level(&mut self, v: &str, level: usize) -> Result<()> {
        if !self.members.contains(v) {
            return Err(Error::UnknownLabel(v.to_string()));
        }
        self.levels.insert(v.to_string(), level);
        Ok(())
    }

    /// Declares a vertex with infinitely many outgoing edges even though
    /// every individual multiplicity is finite (the staged `z_k`).
    pub fn mark_infinite_emitter(&mut self, v: &str) -> Result<()> {
        if !self.members.contains(v) {
            return Err(Error::UnknownLabel(v.to_string()));
        }
        self.emitters.insert(v.to_string());
        Ok(())
    }

    pub fn set_staged_depth(&mut self, depth: Option<usize>) {
        self.staged_depth = depth;
    }

    pub fn staged_depth(&self) -> Option<usize> {
        self.staged_depth
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: &str) -> bool {
        self.members.contains(v)
    }

    pub fn edges(&self) -> &BTreeMap<(String, String), Mult<C>> {
        &self.edges
    }

    pub fn mult(&self, src: &str, dst: &str) -> Option<&Mult<C>> {
        self.edges.get(&(src.to_string(), dst.to_string()))
    }

    /// Finite multiplicity of `src → dst`, zero when absent.
    pub fn finite_mult(&self, src: &str, dst: &str) -> Result<C> {
        match self.mult(src, dst) {
            None => Ok(C::zero()),
            Some(Mult::Finite(c)) => Ok(c.clone()),
            Some(Mult::Infinite) => Err(Error::Unsupported(format!(
                "arithmetic on infinite multiplicity {src:?}->{dst:?}"
            ))),
        }
    }

    pub fn level(&self, v: &str) -> Option<usize> {
        self.levels.get(v).copied()
    }

    pub fn levels(&self) -> &BTreeMap<String, usize> {
        &self.levels
    }

    pub fn out_edges<'a>(&'a self, v: &'a str) -> impl Iterator<Item = (&'a str, &'a Mult<C>)> + 'a {
        self.edges
            .range((v.to_string(), String::new())..)
            .take_while(move |((s, _), _)| s == v)
            .map(|((_, t), m)| (t.as_str(), m))
    }

    pub fn in_edges<'a>(&'a self, v: &'a str) -> impl Iterator<Item = (&'a str, &'a Mult<C>)> + 'a {
        self.edges
            .iter()
            .filter(move |((_, t), _)| t == v)
            .map(|((s, _), m)| (s.as_str(), m))
    }

    pub fn is_sink(&self, v: &str) -> bool {
        self.out_edges(v).next().is_none()
    }

    pub fn is_infinite_emitter(&self, v: &str) -> bool {
        self.emitters.contains(v)
    }

    pub fn infinite_emitters(&self) -> &BTreeSet<String> {
        &self.emitters
    }

    /// Vertices with no incoming edges, in vertex order.
    pub fn sources(&self) -> Vec<String> {
        let targets: BTreeSet<&str> = self.edges.keys().map(|(_, t)| t.as_str()).collect();
        self.vertices
            .iter()
            .filter(|v| !targets.contains(v.as_str()))
            .cloned()
            .collect()
    }

    /// Every present edge has multiplicity ∞.
    pub fn is_amplified(&self) -> bool {
        self.edges.values().all(Mult::is_infinite)
    }

    /// Kahn topological order; `None` when the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<String>> {
        let mut indeg: BTreeMap<&str, usize> = self.vertices.iter().map(|v| (v.as_str(), 0)).collect();
        for (_, t) in self.edges.keys() {
            *indeg.get_mut(t.as_str()).expect("edge targets are vertices") += 1;
        }
        let mut queue: VecDeque<&str> = self
            .vertices
            .iter()
            .map(String::as_str)
            .filter(|v| indeg[v] == 0)
            .collect();
        let mut order = Vec::with_capacity(self.vertices.len());
        while let Some(v) = queue.pop_front() {
            order.push(v.to_string());
            for (t, _) in self.out_edges(v) {
                let d = indeg.get_mut(t).expect("edge targets are vertices");
                *d -= 1;
                if *d == 0 {
                    queue.push_back(t);
                }
            }
        }
        (order.len() == self.vertices.len()).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// Vertices reachable from `v` by paths of length ≥ 1.
    pub fn strict_descendants(&self, v: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<&str> = self.out_edges(v).map(|(t, _)| t).collect();
        while let Some(u) = stack.pop() {
            if seen.insert(u.to_string()) {
                stack.extend(self.out_edges(u).map(|(t, _)| t));
            }
        }
        seen
    }

    /// Vertices from which `v` is reachable by paths of length ≥ 1.
    pub fn strict_ancestors(&self, v: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<String> = self.in_edges(v).map(|(s, _)| s.to_string()).collect();
        while let Some(u) = stack.pop() {
            if seen.insert(u.clone()) {
                stack.extend(self.in_edges(&u).map(|(s, _)| s.to_string()));
            }
        }
        seen
    }

    /// Number of finite paths ending at each vertex, trivial path included:
    /// `pc(v) = 1 + Σ_{u→v} |uG¹v|·pc(u)`. Requires an acyclic graph whose
    /// edges are all finite.
    pub fn path_counts(&self) -> Result<BTreeMap<String, C>> {
        let order = self
            .topological_order()
            .ok_or_else(|| Error::Unsupported("path counts on a graph with cycles".into()))?;
        let mut pc: BTreeMap<String, C> = BTreeMap::new();
        for v in &order {
            let mut acc = C::one();
            for (u, m) in self.in_edges(v) {
                let m = m.finite().ok_or_else(|| {
                    Error::Unsupported(format!("infinitely many paths through {u:?}->{v:?}"))
                })?;
                acc = acc.try_add(&m.try_mul(&pc[u])?)?;
            }
            pc.insert(v.clone(), acc);
        }
        Ok(pc)
    }

    /// The subgraph on vertices whose level annotation is at most `depth`
    /// (unannotated vertices are kept).
    pub fn truncate(&self, depth: usize) -> Self {
        let keep = |v: &str| self.level(v).is_none_or(|l| l <= depth);
        let mut g = Self::new();
        for v in self.vertices.iter().filter(|v| keep(v)) {
            g.add_vertex(v.clone()).expect("subset of distinct vertices");
            if let Some(l) = self.level(v) {
                g.levels.insert(v.clone(), l);
            }
            if self.emitters.contains(v) {
                g.emitters.insert(v.clone());
            }
        }
        for ((s, t), m) in &self.edges {
            if keep(s) && keep(t) {
                g.edges.insert((s.clone(), t.clone()), m.clone());
            }
        }
        g.staged_depth = self.staged_depth.map(|d| d.min(depth));
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_edges_flag_their_source() {
        let g = MultGraph::<u64>::amplified(&["v", "w"], &[("v", "w")]).unwrap();
        assert!(g.is_infinite_emitter("v"));
        assert!(!g.is_infinite_emitter("w"));
        assert!(g.is_amplified());
        assert_eq!(g.sources(), vec!["v".to_string()]);
        assert!(g.finite_mult("v", "w").is_err());
    }

    #[test]
    fn parallel_edges_accumulate() {
        let mut g = MultGraph::<u64>::new();
        g.add_vertex("a").unwrap();
        g.add_vertex("b").unwrap();
        g.add_edge("a", "b", Mult::Finite(2)).unwrap();
        g.add_edge("a", "b", Mult::Finite(3)).unwrap();
        assert_eq!(g.finite_mult("a", "b").unwrap(), 5);
        g.add_edge("a", "b", Mult::Finite(0)).unwrap();
        assert_eq!(g.finite_mult("a", "b").unwrap(), 5);
        assert!(g.add_edge("a", "c", Mult::Finite(1)).is_err());
        assert!(g.add_vertex("a").is_err());
    }

    #[test]
    fn path_counts_on_a_diamond() {
        let mut g = MultGraph::<u64>::new();
        for v in ["a", "b", "c", "d"] {
            g.add_vertex(v).unwrap();
        }
        g.add_edge("a", "b", Mult::Finite(2)).unwrap();
        g.add_edge("a", "c", Mult::Finite(1)).unwrap();
        g.add_edge("b", "d", Mult::Finite(1)).unwrap();
        g.add_edge("c", "d", Mult::Finite(3)).unwrap();
        let pc = g.path_counts().unwrap();
        assert_eq!(pc["a"], 1);
        assert_eq!(pc["b"], 3);
        assert_eq!(pc["c"], 2);
        // trivial + via b (3) + via c (3·2)
        assert_eq!(pc["d"], 1 + 3 + 6);
    }

    #[test]
    fn cycles_are_detected() {
        let mut g = MultGraph::<u64>::new();
        g.add_vertex("a").unwrap();
        g.add_vertex("b").unwrap();
        g.add_edge("a", "b", Mult::Finite(1)).unwrap();
        g.add_edge("b", "a", Mult::Finite(1)).unwrap();
        assert!(!g.is_acyclic());
        assert!(g.path_counts().is_err());
        assert_eq!(g.strict_descendants("a").len(), 2);
    }
}
