//! Hereditary and saturated vertex sets, unitality witnesses, eventually
//! constant singleton tails, and recognition of M_k-separated structure.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{Mult, MultGraph};
use crate::model::{BratteliDiagram, VertexRef};
use crate::num::Count;

pub type VertexSet = BTreeSet<String>;

/// Every edge leaving the set lands in the set.
pub fn is_hereditary<C: Count>(g: &MultGraph<C>, set: &VertexSet) -> bool {
    set.iter().all(|v| g.out_edges(v).all(|(t, _)| set.contains(t)))
}

/// Vertices that saturation may force in: regular vertices whose outgoing
/// edges are all visible (not on a truncation frontier).
fn saturable<C: Count>(g: &MultGraph<C>, v: &str) -> bool {
    if g.is_sink(v) || g.is_infinite_emitter(v) {
        return false;
    }
    match (g.staged_depth(), g.level(v)) {
        (Some(depth), Some(l)) => l < depth,
        _ => true,
    }
}

/// Every saturable vertex whose outgoing ranges all lie in the set is in it.
pub fn is_saturated<C: Count>(g: &MultGraph<C>, set: &VertexSet) -> bool {
    g.vertices()
        .iter()
        .filter(|v| !set.contains(*v) && saturable(g, v))
        .all(|v| g.out_edges(v).any(|(t, _)| !set.contains(t)))
}

/// Smallest saturated hereditary superset of `seed`.
///
/// A staged graph needs a depth bound; the closure is then computed on the
/// truncation, whose last level is never forced in by saturation.
pub fn saturated_hereditary_closure<C: Count>(
    g: &MultGraph<C>,
    seed: &VertexSet,
    depth: Option<usize>,
) -> Result<VertexSet> {
    let truncated;
    let g = match (g.staged_depth(), depth) {
        (Some(_), None) => return Err(Error::StagedWithoutDepth),
        (_, Some(d)) => {
            truncated = g.truncate(d);
            &truncated
        }
        (None, None) => g,
    };
    let mut set = VertexSet::new();
    let mut stack: Vec<String> = Vec::new();
    for v in seed {
        if !g.contains(v) {
            // Vertices cut off by the depth bound are simply dropped.
            if depth.is_some() {
                continue;
            }
            return Err(Error::UnknownLabel(v.clone()));
        }
        stack.push(v.clone());
    }
    loop {
        while let Some(v) = stack.pop() {
            if set.insert(v.clone()) {
                stack.extend(g.out_edges(&v).map(|(t, _)| t.to_string()));
            }
        }
        let forced: Vec<String> = g
            .vertices()
            .iter()
            .filter(|v| !set.contains(*v) && saturable(g, v))
            .filter(|v| g.out_edges(v).all(|(t, _)| set.contains(t)))
            .cloned()
            .collect();
        if forced.is_empty() {
            return Ok(set);
        }
        stack.extend(forced);
    }
}

/// Default vertex cap for [`enumerate_saturated_hereditary`].
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// All saturated hereditary subsets of a finite graph, smallest first (a
/// linear extension of inclusion), ties broken by sorted label lists.
pub fn enumerate_saturated_hereditary<C: Count>(g: &MultGraph<C>, cap: usize) -> Result<Vec<VertexSet>> {
    if g.staged_depth().is_some() {
        return Err(Error::pre("enumeration needs a finite graph"));
    }
    if g.len() > cap {
        return Err(Error::GraphTooLarge { vertices: g.len(), cap });
    }
    let verts = g.vertices();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << verts.len()) {
        let set: VertexSet = verts
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, v)| v.clone())
            .collect();
        if is_hereditary(g, &set) && is_saturated(g, &set) {
            out.push(set);
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter())));
    Ok(out)
}

/// The first `depth` levels of a diagram as a leveled graph. Templated
/// diagrams give a staged graph truncated at `depth`.
pub fn diagram_graph<C: Count>(d: &BratteliDiagram<C>, depth: usize) -> Result<MultGraph<C>> {
    let m = d.materialize(depth)?;
    let mut g = MultGraph::new();
    for level in m.levels() {
        for v in &level.vertices {
            g.add_vertex(v.label.clone())?;
            g.set_level(&v.label, level.index)?;
        }
    }
    for mat in m.matrices() {
        for ((s, t), c) in &mat.entries {
            g.add_edge(s, t, Mult::Finite(c.clone()))?;
        }
    }
    if !d.is_finite() || depth < d.prefix_len() {
        g.set_staged_depth(Some(depth));
    }
    Ok(g)
}

/// A vertex subset of a diagram window, one set per level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSet {
    pub levels: Vec<BTreeSet<String>>,
}

/// Label with its trailing level digits removed (`mid12` → `mid`).
pub fn label_stem(label: &str) -> &str {
    label.trim_end_matches(|c: char| c.is_ascii_digit())
}

impl LevelSet {
    pub fn from_fn<C: Count>(
        d: &BratteliDiagram<C>,
        depth: usize,
        f: impl Fn(usize, &str) -> bool,
    ) -> Result<Self> {
        let m = d.ensure_depth(depth)?;
        let levels = (1..=depth)
            .map(|n| {
                Ok(m.level(n)?
                    .labels()
                    .filter(|l| f(n, l))
                    .map(str::to_string)
                    .collect())
            })
            .collect::<Result<_>>()?;
        Ok(LevelSet { levels })
    }

    /// Vertices whose label stem is one of `stems`.
    pub fn rows<C: Count>(d: &BratteliDiagram<C>, depth: usize, stems: &[&str]) -> Result<Self> {
        Self::from_fn(d, depth, |_, l| stems.contains(&label_stem(l)))
    }

    pub fn labels<C: Count>(d: &BratteliDiagram<C>, depth: usize, labels: &BTreeSet<String>) -> Result<Self> {
        Self::from_fn(d, depth, |_, l| labels.contains(l))
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn contains(&self, level: usize, label: &str) -> bool {
        level >= 1 && self.levels.get(level - 1).is_some_and(|s| s.contains(label))
    }

    pub fn at(&self, level: usize) -> &BTreeSet<String> {
        &self.levels[level - 1]
    }

    pub fn all(&self) -> VertexSet {
        self.levels.iter().flatten().cloned().collect()
    }
}

/// Hereditary within the window: edges out of the set below the last level
/// land in the set.
pub fn is_hereditary_in<C: Count>(d: &BratteliDiagram<C>, s: &LevelSet) -> Result<bool> {
    let m = d.ensure_depth(s.depth())?;
    for n in 1..s.depth() {
        let mat = m.matrix_from(n).ok_or(Error::UnknownLevel(n + 1))?;
        for v in s.at(n) {
            if mat.outgoing(v).any(|(t, _)| !s.contains(n + 1, t)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Saturated within the window: no vertex below the last level outside the
/// set has all its out-edges into the set.
pub fn is_saturated_in<C: Count>(d: &BratteliDiagram<C>, s: &LevelSet) -> Result<bool> {
    let m = d.ensure_depth(s.depth())?;
    for n in 1..s.depth() {
        let mat = m.matrix_from(n).ok_or(Error::UnknownLevel(n + 1))?;
        for v in m.level(n)?.labels() {
            if !s.contains(n, v) && mat.outgoing(v).all(|(t, _)| s.contains(n + 1, t)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitalStatus {
    UnitalWitnessed,
    NoWitnessAtDepth,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitalReport {
    pub status: UnitalStatus,
    pub depth: usize,
    /// Nearest full-sum descendant of every witnessed vertex.
    pub witnesses: BTreeMap<VertexRef, VertexRef>,
    pub unwitnessed: Vec<VertexRef>,
    /// Vertices where `d(w) = Σ_{α ∈ W₁E*w} d(s(α))`.
    pub full_sum: BTreeSet<VertexRef>,
}

/// `Σ_{α ∈ W₁E*w} d(s(α))` for every vertex through the materialized depth.
pub fn first_level_sums<C: Count>(m: &BratteliDiagram<C>) -> Result<Vec<BTreeMap<String, C>>> {
    let mut sums: Vec<BTreeMap<String, C>> = Vec::with_capacity(m.prefix_len());
    sums.push(
        m.level(1)?
            .vertices
            .iter()
            .map(|v| (v.label.clone(), v.degree.clone()))
            .collect(),
    );
    for n in 2..=m.prefix_len() {
        let mat = m.matrix_from(n - 1).ok_or(Error::UnknownLevel(n))?;
        let prev = &sums[n - 2];
        let mut cur = BTreeMap::new();
        for v in m.level(n)?.labels() {
            let mut acc = C::zero();
            for (u, c) in mat.incoming(v) {
                acc = acc.try_add(&c.try_mul(&prev[u])?)?;
            }
            cur.insert(v.to_string(), acc);
        }
        sums.push(cur);
    }
    Ok(sums)
}

/// Looks for a full-sum descendant of every vertex within the window.
/// Level-1 vertices satisfy the full-sum condition trivially.
pub fn is_unital<C: Count>(d: &BratteliDiagram<C>, depth: usize) -> Result<UnitalReport> {
    let m = d.materialize(depth)?;
    let sums = first_level_sums(&m)?;
    let mut full_sum = BTreeSet::new();
    for level in m.levels() {
        for v in &level.vertices {
            if sums[level.index - 1][&v.label] == v.degree {
                full_sum.insert(VertexRef::new(level.index, v.label.clone()));
            }
        }
    }
    // Nearest witness, computed from the top level down.
    let mut nearest: BTreeMap<VertexRef, VertexRef> = BTreeMap::new();
    for n in (1..=depth).rev() {
        for v in m.level(n)?.labels() {
            let here = VertexRef::new(n, v);
            if full_sum.contains(&here) {
                nearest.insert(here.clone(), here);
                continue;
            }
            if n == depth {
                continue;
            }
            let mat = m.matrix_from(n).ok_or(Error::UnknownLevel(n + 1))?;
            let best = mat
                .outgoing(v)
                .filter_map(|(t, _)| nearest.get(&VertexRef::new(n + 1, t)))
                .min_by(|a, b| a.level.cmp(&b.level).then_with(|| a.label.cmp(&b.label)))
                .cloned();
            if let Some(w) = best {
                nearest.insert(here, w);
            }
        }
    }
    let mut unwitnessed = Vec::new();
    for level in m.levels() {
        for v in level.labels() {
            let r = VertexRef::new(level.index, v);
            if !nearest.contains_key(&r) {
                unwitnessed.push(r);
            }
        }
    }
    Ok(UnitalReport {
        status: if unwitnessed.is_empty() {
            UnitalStatus::UnitalWitnessed
        } else {
            UnitalStatus::NoWitnessAtDepth
        },
        depth,
        witnesses: nearest,
        unwitnessed,
        full_sum,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MkTail<C> {
    /// First level of the constant singleton complement.
    pub m: usize,
    pub k: C,
    /// The complement vertex at levels `m..=depth`.
    pub row: Vec<String>,
}

/// First level `m` from which every level through `depth` has exactly one
/// vertex outside `s`, all of the same degree `k`.
pub fn detect_mk_tail<C: Count>(d: &BratteliDiagram<C>, s: &LevelSet, depth: usize) -> Result<Option<MkTail<C>>> {
    if s.depth() < depth {
        return Err(Error::pre(format!(
            "vertex set covers {} levels, {depth} requested",
            s.depth()
        )));
    }
    let m = d.materialize(depth)?;
    let mut row: Vec<String> = Vec::new();
    let mut k: Option<C> = None;
    let mut first = None;
    for n in (1..=depth).rev() {
        let level = m.level(n)?;
        let comp: Vec<_> = level.vertices.iter().filter(|v| !s.contains(n, &v.label)).collect();
        let ok = comp.len() == 1 && k.as_ref().is_none_or(|k| *k == comp[0].degree);
        if !ok {
            break;
        }
        k = Some(comp[0].degree.clone());
        row.push(comp[0].label.clone());
        first = Some(n);
    }
    Ok(first.map(|m| {
        row.reverse();
        MkTail {
            m,
            k: k.expect("set together with first"),
            row,
        }
    }))
}

/// Non-ancestors of a last-level vertex form a saturated hereditary set
/// within the window. Returns the one whose complement gives the earliest
/// constant singleton tail.
pub fn auto_ideal<C: Count>(d: &BratteliDiagram<C>, depth: usize) -> Result<Option<(LevelSet, MkTail<C>)>> {
    let m = d.materialize(depth)?;
    let mut best: Option<(LevelSet, MkTail<C>)> = None;
    for x in m.level(depth)?.labels() {
        let mut anc: Vec<BTreeSet<String>> = vec![BTreeSet::new(); depth];
        anc[depth - 1].insert(x.to_string());
        for n in (1..depth).rev() {
            let mat = m.matrix_from(n).ok_or(Error::UnknownLevel(n + 1))?;
            let next = anc[n].clone();
            anc[n - 1] = m
                .level(n)?
                .labels()
                .filter(|v| mat.outgoing(v).any(|(t, _)| next.contains(t)))
                .map(str::to_string)
                .collect();
        }
        let s = LevelSet::from_fn(&m, depth, |n, l| !anc[n - 1].contains(l))?;
        if let Some(tail) = detect_mk_tail(&m, &s, depth)? {
            if best.as_ref().is_none_or(|(_, b)| tail.m < b.m) {
                best = Some((s, tail));
            }
        }
    }
    Ok(best)
}

/// A split `W_n = H_n ⊔ {y_n}` of a diagram window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatedStructure<C> {
    pub k: C,
    /// `y_1, …, y_depth`.
    pub y: Vec<String>,
}

impl<C: Count> SeparatedStructure<C> {
    pub fn depth(&self) -> usize {
        self.y.len()
    }

    pub fn y_at(&self, n: usize) -> &str {
        &self.y[n - 1]
    }

    /// `H_n` in level order.
    pub fn h_at(&self, d: &BratteliDiagram<C>, n: usize) -> Result<Vec<String>> {
        Ok(d.level(n)?
            .labels()
            .filter(|l| *l != self.y_at(n))
            .map(str::to_string)
            .collect())
    }

    pub fn h_set(&self, d: &BratteliDiagram<C>) -> Result<LevelSet> {
        LevelSet::from_fn(d, self.depth(), |n, l| l != self.y_at(n))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatedReport<C> {
    pub structure: SeparatedStructure<C>,
    /// Strictly positive defect on every `H_n` through the window.
    pub proper: bool,
    /// `H`-vertices with zero defect.
    pub defect_zero: Vec<VertexRef>,
}

/// Checks the five separation properties for a given split; returns the
/// first violation.
pub fn check_separated<C: Count>(m: &BratteliDiagram<C>, ss: &SeparatedStructure<C>) -> Result<Option<String>> {
    let depth = ss.depth();
    for n in 1..=depth {
        let level = m.level(n)?;
        let y = ss.y_at(n);
        let Some(dy) = level.degree(y) else {
            return Ok(Some(format!("y_{n} = {y:?} is not at level {n}")));
        };
        if *dy != ss.k {
            return Ok(Some(format!("d(y_{n}) = {dy} differs from k = {}", ss.k)));
        }
        if n == depth {
            break;
        }
        let mat = m.matrix_from(n).ok_or(Error::UnknownLevel(n + 1))?;
        let y_next = ss.y_at(n + 1);
        let into_y: Vec<_> = mat.incoming(y_next).collect();
        if into_y.iter().any(|(s, _)| *s != y) {
            return Ok(Some(format!("H_{n} reaches y_{}", n + 1)));
        }
        if mat.get(y, y_next) != C::one() {
            return Ok(Some(format!("|y_{n} E* y_{}| is not 1", n + 1)));
        }
        if !mat.outgoing(y).any(|(t, _)| t != y_next) {
            return Ok(Some(format!("y_{n} reaches no vertex of H_{}", n + 1)));
        }
    }
    Ok(None)
}

/// Finds a split satisfying the separation properties through `depth` and
/// reports whether it is proper. When several y-rows qualify, a proper one
/// is preferred, then the lexicographically smallest.
pub fn recognize_separated<C: Count>(d: &BratteliDiagram<C>, depth: usize) -> Result<Option<SeparatedReport<C>>> {
    if depth < 2 {
        return Err(Error::pre("recognizing separated structure needs depth ≥ 2"));
    }
    let m = d.materialize(depth)?;
    let mut chains: Vec<Vec<String>> = m.level(1)?.labels().map(|l| vec![l.to_string()]).collect();
    for n in 1..depth {
        let mat = m.matrix_from(n).ok_or(Error::UnknownLevel(n + 1))?;
        let mut next = Vec::new();
        for chain in chains {
            let y = chain.last().expect("nonempty").as_str();
            let dy = m.degree(n, y)?;
            for (t, mult) in mat.outgoing(y) {
                let only_from_y = mat.incoming(t).all(|(s, _)| s == y);
                if *mult == C::one() && only_from_y && m.degree(n + 1, t)? == dy {
                    let mut c = chain.clone();
                    c.push(t.to_string());
                    next.push(c);
                }
            }
        }
        chains = next;
    }
    let mut best: Option<SeparatedReport<C>> = None;
    for y in chains {
        let k = m.degree(1, &y[0])?.clone();
        let ss = SeparatedStructure { k, y };
        if check_separated(&m, &ss)?.is_some() {
            continue;
        }
        let mut defect_zero = Vec::new();
        for n in 1..=depth {
            for h in ss.h_at(&m, n)? {
                if m.defect(n, &h)?.is_zero() {
                    defect_zero.push(VertexRef::new(n, h));
                }
            }
        }
        let report = SeparatedReport {
            proper: defect_zero.is_empty(),
            structure: ss,
            defect_zero,
        };
        let better = match &best {
            None => true,
            Some(b) => (report.proper && !b.proper) || (report.proper == b.proper && report.structure.y < b.structure.y),
        };
        if better {
            best = Some(report);
        }
    }
    Ok(best)
}
