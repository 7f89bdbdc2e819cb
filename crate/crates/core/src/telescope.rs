//! Telescoping along level subsequences and bounded-depth equivalence.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::model::{BratteliDiagram, Level, MultMatrix, TailStep, TailTemplate, LabelRule};
use crate::num::Count;

/// A strictly increasing choice of levels `n_1 < n_2 < …`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Subsequence {
    Explicit(Vec<usize>),
    /// `n_m = start + (m - 1)·step`.
    Arithmetic { start: usize, step: usize },
}

impl Subsequence {
    pub fn explicit(levels: Vec<usize>) -> Result<Self> {
        let s = Subsequence::Explicit(levels);
        s.check()?;
        Ok(s)
    }

    pub fn arithmetic(start: usize, step: usize) -> Result<Self> {
        let s = Subsequence::Arithmetic { start, step };
        s.check()?;
        Ok(s)
    }

    pub fn identity() -> Self {
        Subsequence::Arithmetic { start: 1, step: 1 }
    }

    pub fn odds() -> Self {
        Subsequence::Arithmetic { start: 1, step: 2 }
    }

    pub fn evens() -> Self {
        Subsequence::Arithmetic { start: 2, step: 2 }
    }

    pub fn check(&self) -> Result<()> {
        match self {
            Subsequence::Explicit(v) => {
                if v.is_empty() {
                    return Err(Error::Subsequence("empty level list".into()));
                }
                if v[0] == 0 {
                    return Err(Error::Subsequence("level indices start at 1".into()));
                }
                if v.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Subsequence(format!("{v:?} is not strictly increasing")));
                }
            }
            Subsequence::Arithmetic { start, step } => {
                if *start == 0 || *step == 0 {
                    return Err(Error::Subsequence("start and step must be at least 1".into()));
                }
            }
        }
        Ok(())
    }

    /// `n_m` for 1-based `m`, or `None` past the end of an explicit list.
    pub fn index(&self, m: usize) -> Option<usize> {
        if m == 0 {
            return None;
        }
        match self {
            Subsequence::Explicit(v) => v.get(m - 1).copied(),
            Subsequence::Arithmetic { start, step } => Some(start + (m - 1) * step),
        }
    }

    /// The first `count` indices (fewer for a short explicit list).
    pub fn take(&self, count: usize) -> Vec<usize> {
        (1..=count).map_while(|m| self.index(m)).collect()
    }

    /// `m ↦ self(t(m))`: telescoping by `self` and then by `t`.
    pub fn compose(&self, t: &Subsequence) -> Subsequence {
        match (self, t) {
            (
                Subsequence::Arithmetic { start: a, step: b },
                Subsequence::Arithmetic { start: c, step: e },
            ) => Subsequence::Arithmetic {
                start: a + (c - 1) * b,
                step: b * e,
            },
            (_, Subsequence::Explicit(v)) => {
                Subsequence::Explicit(v.iter().map_while(|&m| self.index(m)).collect())
            }
            (Subsequence::Explicit(v), Subsequence::Arithmetic { .. }) => {
                let out = (1..).map_while(|m| t.index(m)).map_while(|i| v.get(i - 1).copied());
                Subsequence::Explicit(out.collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Telescoped<C> {
    pub diagram: BratteliDiagram<C>,
    /// The input had a tail that could not be carried over, so the output
    /// is a finite materialization.
    pub tail_dropped: bool,
}

/// Path-count matrix `|vE*w|` from level `a` to level `b ≥ a` of a finite
/// (or sufficiently materialized) diagram.
pub fn path_matrix<C: Count>(d: &BratteliDiagram<C>, a: usize, b: usize) -> Result<MultMatrix<C>> {
    if a > b {
        return Err(Error::Subsequence(format!("level {a} lies above level {b}")));
    }
    let start = d.level(a)?;
    d.level(b)?;
    let mut out = MultMatrix::new(a);
    for src in &start.vertices {
        let mut row: BTreeMap<String, C> = BTreeMap::from([(src.label.clone(), C::one())]);
        for n in a..b {
            let m = d.matrix_from(n).ok_or(Error::UnknownLevel(n + 1))?;
            let mut next: BTreeMap<String, C> = BTreeMap::new();
            for (u, cu) in &row {
                for (t, mult) in m.outgoing(u) {
                    let e = next.entry(t.to_string()).or_insert_with(C::zero);
                    *e = e.try_add(&cu.try_mul(mult)?)?;
                }
            }
            row = next;
        }
        for (t, c) in row {
            out.set(src.label.clone(), t, c);
        }
    }
    Ok(out)
}

fn telescope_prefix<C: Count>(d: &BratteliDiagram<C>, idx: &[usize]) -> Result<BratteliDiagram<C>> {
    if let Some(&last) = idx.last() {
        if last > d.prefix_len() {
            return Err(Error::Subsequence(format!(
                "level {last} escapes a diagram with {} levels",
                d.prefix_len()
            )));
        }
    }
    let mut levels = Vec::with_capacity(idx.len());
    let mut matrices = Vec::with_capacity(idx.len().saturating_sub(1));
    for (m, &n) in idx.iter().enumerate() {
        levels.push(Level::new(m + 1, d.level(n)?.vertices.clone()));
        if let Some(&next) = idx.get(m + 1) {
            let mut pm = path_matrix(d, n, next)?;
            pm.from_level = m + 1;
            matrices.push(pm);
        }
    }
    Ok(BratteliDiagram::new_unchecked(levels, matrices, None))
}

/// Telescopes `d` along `s`.
///
/// Arithmetic subsequences on a templated diagram produce a templated
/// output whose period is `p / gcd(p, step)`; explicit lists on a templated
/// diagram force materialization and set `tail_dropped`. On a finite diagram
/// an arithmetic rule is cut off at the last stored level.
pub fn telescope<C: Count>(d: &BratteliDiagram<C>, s: &Subsequence) -> Result<Telescoped<C>> {
    s.check()?;
    let (diagram, tail_dropped) = match (d.tail(), s) {
        (Some(tail), Subsequence::Arithmetic { start, step }) => {
            (telescope_templated(d, tail, *start, *step)?, false)
        }
        (Some(_), Subsequence::Explicit(v)) => {
            let m = d.materialize(*v.last().expect("checked nonempty"))?;
            (telescope_prefix(&m, v)?, true)
        }
        (None, Subsequence::Explicit(v)) => (telescope_prefix(d, v)?, false),
        (None, Subsequence::Arithmetic { start, step }) => {
            if *start > d.prefix_len() {
                return Err(Error::Subsequence(format!(
                    "start level {start} escapes a diagram with {} levels",
                    d.prefix_len()
                )));
            }
            let idx: Vec<usize> = (*start..=d.prefix_len()).step_by(*step).collect();
            (telescope_prefix(d, &idx)?, false)
        }
    };
    let report = diagram.validate();
    if !report.is_valid() {
        return Err(Error::Verification(format!("telescope output is invalid: {report}")));
    }
    Ok(Telescoped { diagram, tail_dropped })
}

fn telescope_templated<C: Count>(
    d: &BratteliDiagram<C>,
    tail: &TailTemplate<C>,
    start: usize,
    step: usize,
) -> Result<BratteliDiagram<C>> {
    let s0 = tail.start_level;
    let n_of = |m: usize| start + (m - 1) * step;
    // First output level that sits inside the generated tail.
    let m0 = if start >= s0 { 1 } else { (s0 - start).div_ceil(step) + 1 };
    let mat = d.materialize(n_of(m0))?;
    let idx: Vec<usize> = (1..=m0).map(n_of).collect();
    let prefix = telescope_prefix(&mat, &idx)?;

    let period = tail.period() / tail.period().gcd(&step);
    let mut steps = Vec::with_capacity(period);
    for j in 0..period {
        let from = n_of(m0 + j);
        let mut rows: BTreeMap<String, BTreeMap<String, C>> = tail
            .stems_at(from)
            .iter()
            .map(|s| (s.clone(), BTreeMap::from([(s.clone(), C::one())])))
            .collect();
        let mut defects: BTreeMap<String, C> = BTreeMap::new();
        for lvl in from + 1..=from + step {
            let st = tail.step_into(lvl);
            let mut next_rows = BTreeMap::new();
            for (src, row) in &rows {
                let mut out: BTreeMap<String, C> = BTreeMap::new();
                for t in &st.vertices {
                    let mut acc = C::zero();
                    for (u, cu) in row {
                        acc = acc.try_add(&cu.try_mul(&st.mult(u, t))?)?;
                    }
                    if !acc.is_zero() {
                        out.insert(t.clone(), acc);
                    }
                }
                next_rows.insert(src.clone(), out);
            }
            let mut next_def = BTreeMap::new();
            for t in &st.vertices {
                let mut acc = st.defect(t);
                for (u, du) in &defects {
                    acc = acc.try_add(&du.try_mul(&st.mult(u, t))?)?;
                }
                if !acc.is_zero() {
                    next_def.insert(t.clone(), acc);
                }
            }
            rows = next_rows;
            defects = next_def;
        }
        let mut entries = BTreeMap::new();
        for (src, row) in rows {
            for (t, c) in row {
                entries.insert((src.clone(), t), c);
            }
        }
        steps.push(TailStep {
            vertices: tail.stems_at(from + step).to_vec(),
            entries,
            defects,
        });
    }
    let scale = tail.labels.scale;
    let labels = LabelRule {
        scale: scale * step as i64,
        offset: scale * (start as i64 - step as i64) + tail.labels.offset,
    };
    Ok(BratteliDiagram::new_unchecked(
        prefix.levels,
        prefix.matrices,
        Some(TailTemplate {
            start_level: m0,
            steps,
            labels,
        }),
    ))
}

/// Per-level label bijections from the first diagram to the second.
pub type LevelBijections = Vec<BTreeMap<String, String>>;

/// Searches exhaustively for per-level bijections through `depth` that
/// preserve degrees and every multiplicity.
pub fn prefix_isomorphic<C: Count>(
    d1: &BratteliDiagram<C>,
    d2: &BratteliDiagram<C>,
    depth: usize,
) -> Result<Option<LevelBijections>> {
    let a = d1.materialize(depth)?;
    let b = d2.materialize(depth)?;
    for n in 1..=depth {
        let (la, lb) = (a.level(n)?, b.level(n)?);
        if la.len() != lb.len() {
            return Ok(None);
        }
        let mut da: Vec<&C> = la.vertices.iter().map(|v| &v.degree).collect();
        let mut db: Vec<&C> = lb.vertices.iter().map(|v| &v.degree).collect();
        da.sort();
        db.sort();
        if da != db {
            return Ok(None);
        }
    }
    let mut acc = Vec::with_capacity(depth);
    Ok(search_level(&a, &b, 1, depth, &mut acc).then_some(acc))
}

fn out_signature<C: Count>(d: &BratteliDiagram<C>, n: usize, v: &str) -> Vec<C> {
    let mut sig: Vec<C> = d
        .matrix_from(n)
        .map(|m| m.outgoing(v).map(|(_, c)| c.clone()).collect())
        .unwrap_or_default();
    sig.sort();
    sig
}

fn search_level<C: Count>(
    a: &BratteliDiagram<C>,
    b: &BratteliDiagram<C>,
    n: usize,
    depth: usize,
    acc: &mut LevelBijections,
) -> bool {
    if n > depth {
        return true;
    }
    let la = &a.levels()[n - 1];
    let lb = &b.levels()[n - 1];
    let last = n == depth;
    // Candidate targets per source vertex, filtered by invariants that do
    // not depend on the choice at this level.
    let mut cands: Vec<Vec<usize>> = Vec::with_capacity(la.len());
    for v in &la.vertices {
        let sig = (!last).then(|| out_signature(a, n, &v.label));
        let col: Vec<(String, C)> = if n == 1 {
            Vec::new()
        } else {
            let prev = &acc[n - 2];
            a.levels()[n - 2]
                .vertices
                .iter()
                .map(|w| (prev[&w.label].clone(), a.mult(n - 1, &w.label, &v.label)))
                .collect()
        };
        let c: Vec<usize> = lb
            .vertices
            .iter()
            .enumerate()
            .filter(|(_, u)| u.degree == v.degree)
            .filter(|(_, u)| col.iter().all(|(w2, m)| b.mult(n - 1, w2, &u.label) == *m))
            .filter(|(_, u)| sig.as_ref().is_none_or(|s| *s == out_signature(b, n, &u.label)))
            .map(|(i, _)| i)
            .collect();
        if c.is_empty() {
            return false;
        }
        cands.push(c);
    }
    let mut used = vec![false; lb.len()];
    let mut choice = vec![0usize; la.len()];
    assign(a, b, n, depth, acc, &cands, 0, &mut used, &mut choice)
}

#[allow(clippy::too_many_arguments)]
fn assign<C: Count>(
    a: &BratteliDiagram<C>,
    b: &BratteliDiagram<C>,
    n: usize,
    depth: usize,
    acc: &mut LevelBijections,
    cands: &[Vec<usize>],
    i: usize,
    used: &mut [bool],
    choice: &mut [usize],
) -> bool {
    if i == cands.len() {
        let la = &a.levels()[n - 1];
        let lb = &b.levels()[n - 1];
        let map: BTreeMap<String, String> = la
            .vertices
            .iter()
            .zip(choice.iter())
            .map(|(v, &j)| (v.label.clone(), lb.vertices[j].label.clone()))
            .collect();
        acc.push(map);
        if search_level(a, b, n + 1, depth, acc) {
            return true;
        }
        acc.pop();
        return false;
    }
    for &j in &cands[i] {
        if used[j] {
            continue;
        }
        used[j] = true;
        choice[i] = j;
        if assign(a, b, n, depth, acc, cands, i + 1, used, choice) {
            return true;
        }
        used[j] = false;
    }
    false
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub depth: usize,
    pub bijections: Option<LevelBijections>,
    pub tail_dropped: (bool, bool),
}

/// Telescopes both diagrams along their subsequences and looks for a
/// level-preserving isomorphism of the results through `depth`.
pub fn check_equivalence_witness<C: Count>(
    d1: &BratteliDiagram<C>,
    d2: &BratteliDiagram<C>,
    s1: &Subsequence,
    s2: &Subsequence,
    depth: usize,
) -> Result<EquivalenceReport> {
    let t1 = telescope(d1, s1)?;
    let t2 = telescope(d2, s2)?;
    let bijections = prefix_isomorphic(&t1.diagram, &t2.diagram, depth)?;
    Ok(EquivalenceReport {
        equivalent: bijections.is_some(),
        depth,
        bijections,
        tail_dropped: (t1.tail_dropped, t2.tail_dropped),
    })
}

/// Labels of every vertex in the stored prefix, for quick set checks.
pub fn prefix_labels<C: Count>(d: &BratteliDiagram<C>) -> BTreeSet<String> {
    d.levels()
        .iter()
        .flat_map(|l| l.vertices.iter().map(|v| v.label.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DiagramBuilder;

    fn two_step() -> BratteliDiagram<u64> {
        DiagramBuilder::new()
            .level([("a", 1u64), ("b", 1)])
            .level([("c", 3u64), ("d", 2)])
            .edge("a", "c", 2)
            .edge("b", "c", 1)
            .edge("b", "d", 1)
            .level([("e", 5u64), ("f", 4)])
            .edge("c", "e", 1)
            .edge("d", "e", 1)
            .edge("c", "f", 1)
            .build()
            .unwrap()
    }

    #[test]
    fn composed_matrix_counts_paths() {
        let d = two_step();
        let t = telescope(&d, &Subsequence::explicit(vec![1, 3]).unwrap()).unwrap();
        let m = &t.diagram.matrices()[0];
        // a→c→e (2), a→c→f (2), b→c→e + b→d→e (2), b→c→f (1)
        assert_eq!(m.get("a", "e"), 2);
        assert_eq!(m.get("a", "f"), 2);
        assert_eq!(m.get("b", "e"), 2);
        assert_eq!(m.get("b", "f"), 1);
        assert!(!t.tail_dropped);
    }

    #[test]
    fn escaping_subsequence_is_rejected() {
        let d = two_step();
        assert!(matches!(
            telescope(&d, &Subsequence::Explicit(vec![1, 4])),
            Err(Error::Subsequence(_))
        ));
        assert!(Subsequence::explicit(vec![2, 2]).is_err());
        assert!(Subsequence::explicit(vec![0, 2]).is_err());
    }

    #[test]
    fn compose_arithmetic() {
        let s = Subsequence::arithmetic(2, 3).unwrap();
        let t = Subsequence::arithmetic(3, 2).unwrap();
        let c = s.compose(&t);
        for m in 1..10 {
            assert_eq!(c.index(m), s.index(t.index(m).unwrap()));
        }
    }

    #[test]
    fn permuted_labels_are_isomorphic() {
        let d = two_step();
        let e = DiagramBuilder::new()
            .level([("B", 1u64), ("A", 1)])
            .level([("D", 2u64), ("C", 3)])
            .edge("A", "C", 2)
            .edge("B", "C", 1)
            .edge("B", "D", 1)
            .level([("F", 4u64), ("E", 5)])
            .edge("C", "E", 1)
            .edge("D", "E", 1)
            .edge("C", "F", 1)
            .build()
            .unwrap();
        let bij = prefix_isomorphic(&d, &e, 3).unwrap().unwrap();
        assert_eq!(bij[0]["a"], "A");
        assert_eq!(bij[2]["f"], "F");
    }
}
