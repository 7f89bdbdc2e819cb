//! Bratteli diagrams with degree functions.
//!
//! A diagram is a finite prefix of levels (1-based, consecutive) joined by
//! multiplicity matrices, optionally followed by a periodic [`TailTemplate`]
//! that generates every further level through the degree recurrence
//! `d(v) = Σ_w M[w,v]·d(w) + defect(v)`.
//!
//! Vertex labels are unique across the whole diagram, not just within a
//! level, so that diagram vertices can be embedded verbatim into realized
//! graphs.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::num::Count;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vertex<C> {
    pub label: String,
    pub degree: C,
}

impl<C> Vertex<C> {
    pub fn new(label: impl Into<String>, degree: C) -> Self {
        Vertex {
            label: label.into(),
            degree,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level<C> {
    pub index: usize,
    pub vertices: Vec<Vertex<C>>,
}

impl<C> Level<C> {
    pub fn new(index: usize, vertices: Vec<Vertex<C>>) -> Self {
        Level { index, vertices }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.label == label)
    }

    pub fn degree(&self, label: &str) -> Option<&C> {
        self.vertices.iter().find(|v| v.label == label).map(|v| &v.degree)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.vertices.iter().map(|v| v.label.as_str())
    }
}

/// Edge multiplicities from level `from_level` to level `from_level + 1`.
/// Zero entries are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultMatrix<C> {
    pub from_level: usize,
    pub entries: BTreeMap<(String, String), C>,
}

impl<C: Count> MultMatrix<C> {
    pub fn new(from_level: usize) -> Self {
        MultMatrix {
            from_level,
            entries: BTreeMap::new(),
        }
    }

    pub fn get(&self, src: &str, dst: &str) -> C {
        self.entries
            .get(&(src.to_string(), dst.to_string()))
            .cloned()
            .unwrap_or_else(C::zero)
    }

    /// Sets an entry; a zero multiplicity removes it.
    pub fn set(&mut self, src: impl Into<String>, dst: impl Into<String>, mult: C) {
        let key = (src.into(), dst.into());
        if mult.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, mult);
        }
    }

    pub fn add(&mut self, src: &str, dst: &str, mult: &C) -> Result<()> {
        let cur = self.get(src, dst);
        self.set(src, dst, cur.try_add(mult)?);
        Ok(())
    }

    pub fn incoming<'a>(&'a self, dst: &'a str) -> impl Iterator<Item = (&'a str, &'a C)> + 'a {
        self.entries
            .iter()
            .filter(move |((_, d), _)| d == dst)
            .map(|((s, _), m)| (s.as_str(), m))
    }

    pub fn outgoing<'a>(&'a self, src: &'a str) -> impl Iterator<Item = (&'a str, &'a C)> + 'a {
        self.entries
            .range((src.to_string(), String::new())..)
            .take_while(move |((s, _), _)| s == src)
            .map(|((_, d), m)| (d.as_str(), m))
    }
}

/// How generated tail levels are labelled: a template vertex with stem `s`
/// at level `n` is called `format!("{s}{scale*n + offset}")`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LabelRule {
    pub scale: i64,
    pub offset: i64,
}

impl Default for LabelRule {
    fn default() -> Self {
        LabelRule { scale: 1, offset: 0 }
    }
}

impl LabelRule {
    pub fn label(&self, stem: &str, level: usize) -> String {
        format!("{stem}{}", self.scale * level as i64 + self.offset)
    }
}

/// One step of a periodic tail: the matrix from the previous level into a
/// generated level, the stems present at that generated level (in order),
/// and the defect added to each of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailStep<C> {
    pub vertices: Vec<String>,
    pub entries: BTreeMap<(String, String), C>,
    pub defects: BTreeMap<String, C>,
}

impl<C: Count> TailStep<C> {
    pub fn mult(&self, src: &str, dst: &str) -> C {
        self.entries
            .get(&(src.to_string(), dst.to_string()))
            .cloned()
            .unwrap_or_else(C::zero)
    }

    pub fn defect(&self, stem: &str) -> C {
        self.defects.get(stem).cloned().unwrap_or_else(C::zero)
    }
}

/// Periodic continuation of a diagram past its prefix.
///
/// Step `i` produces level `start_level + 1 + i + j·period`. The stems
/// present at `start_level` itself are those of the last step, so the
/// template closes up across the period boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailTemplate<C> {
    pub start_level: usize,
    pub steps: Vec<TailStep<C>>,
    pub labels: LabelRule,
}

impl<C: Count> TailTemplate<C> {
    pub fn period(&self) -> usize {
        self.steps.len()
    }

    /// Index of the step that produces `level` (`level > start_level`).
    pub fn phase_into(&self, level: usize) -> usize {
        debug_assert!(level > self.start_level);
        (level - 1 - self.start_level) % self.period()
    }

    /// Stems present at `level` (`level >= start_level`).
    pub fn stems_at(&self, level: usize) -> &[String] {
        if level == self.start_level {
            &self.steps[self.period() - 1].vertices
        } else {
            &self.steps[self.phase_into(level)].vertices
        }
    }

    pub fn step_into(&self, level: usize) -> &TailStep<C> {
        &self.steps[self.phase_into(level)]
    }

    /// Maps each materialized label at `level` back to its stem.
    pub fn stem_map(&self, level: usize) -> BTreeMap<String, String> {
        self.stems_at(level)
            .iter()
            .map(|s| (self.labels.label(s, level), s.clone()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BratteliDiagram<C> {
    pub(crate) levels: Vec<Level<C>>,
    pub(crate) matrices: Vec<MultMatrix<C>>,
    pub(crate) tail: Option<TailTemplate<C>>,
}

/// Coordinates of a vertex inside a diagram.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexRef {
    pub level: usize,
    pub label: String,
}

impl VertexRef {
    pub fn new(level: usize, label: impl Into<String>) -> Self {
        VertexRef {
            level,
            label: label.into(),
        }
    }
}

impl fmt::Display for VertexRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.label, self.level)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Issue {
    EmptyDiagram,
    LevelIndex { position: usize, found: usize },
    EmptyLevel { level: usize },
    DuplicateLabel { level: usize, label: String },
    ZeroDegree { level: usize, label: String },
    MatrixLevel { position: usize, found: usize },
    MatrixCount { levels: usize, matrices: usize },
    DanglingLabel { level: usize, label: String },
    ZeroMultiplicity { level: usize, src: String, dst: String },
    Sink { level: usize, label: String },
    DegreeInequality { level: usize, label: String, degree: String, incoming: String },
    Tail(String),
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::EmptyDiagram => write!(f, "diagram has no levels"),
            Issue::LevelIndex { position, found } => {
                write!(f, "level at position {position} has index {found}, expected {}", position + 1)
            }
            Issue::EmptyLevel { level } => write!(f, "level {level} is empty"),
            Issue::DuplicateLabel { level, label } => {
                write!(f, "label {label:?} at level {level} is already used")
            }
            Issue::ZeroDegree { level, label } => write!(f, "vertex {label:?} at level {level} has degree 0"),
            Issue::MatrixLevel { position, found } => {
                write!(f, "matrix at position {position} has from_level {found}, expected {}", position + 1)
            }
            Issue::MatrixCount { levels, matrices } => {
                write!(f, "{levels} levels need {} matrices, found {matrices}", levels.saturating_sub(1))
            }
            Issue::DanglingLabel { level, label } => {
                write!(f, "matrix references unknown label {label:?} around level {level}")
            }
            Issue::ZeroMultiplicity { level, src, dst } => {
                write!(f, "zero multiplicity {src:?}->{dst:?} from level {level} must be omitted")
            }
            Issue::Sink { level, label } => write!(f, "vertex {label:?} at level {level} is a sink"),
            Issue::DegreeInequality {
                level,
                label,
                degree,
                incoming,
            } => write!(
                f,
                "vertex {label:?} at level {level} has degree {degree} < incoming {incoming}"
            ),
            Issue::Tail(msg) => write!(f, "tail: {msg}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "valid");
        }
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

impl<C: Count> BratteliDiagram<C> {
    /// Builds a diagram and rejects it unless [`validate`](Self::validate)
    /// reports no issues.
    pub fn new(
        levels: Vec<Level<C>>,
        matrices: Vec<MultMatrix<C>>,
        tail: Option<TailTemplate<C>>,
    ) -> Result<Self> {
        let d = Self::new_unchecked(levels, matrices, tail);
        let report = d.validate();
        if report.is_valid() {
            Ok(d)
        } else {
            Err(Error::InvalidDiagram(report))
        }
    }

    pub fn new_unchecked(
        levels: Vec<Level<C>>,
        matrices: Vec<MultMatrix<C>>,
        tail: Option<TailTemplate<C>>,
    ) -> Self {
        BratteliDiagram { levels, matrices, tail }
    }

    pub fn levels(&self) -> &[Level<C>] {
        &self.levels
    }

    pub fn matrices(&self) -> &[MultMatrix<C>] {
        &self.matrices
    }

    pub fn tail(&self) -> Option<&TailTemplate<C>> {
        self.tail.as_ref()
    }

    pub fn is_finite(&self) -> bool {
        self.tail.is_none()
    }

    /// Number of explicitly stored levels.
    pub fn prefix_len(&self) -> usize {
        self.levels.len()
    }

    /// Level `n` (1-based) of the stored prefix.
    pub fn level(&self, n: usize) -> Result<&Level<C>> {
        if n == 0 {
            return Err(Error::UnknownLevel(n));
        }
        self.levels.get(n - 1).ok_or(Error::UnknownLevel(n))
    }

    /// Matrix from level `n` to `n + 1`, if stored.
    pub fn matrix_from(&self, n: usize) -> Option<&MultMatrix<C>> {
        if n == 0 {
            return None;
        }
        self.matrices.get(n - 1)
    }

    pub fn mult(&self, n: usize, src: &str, dst: &str) -> C {
        self.matrix_from(n).map_or_else(C::zero, |m| m.get(src, dst))
    }

    pub fn degree(&self, n: usize, label: &str) -> Result<&C> {
        self.level(n)?.degree(label).ok_or_else(|| Error::UnknownVertex {
            level: n,
            label: label.to_string(),
        })
    }

    /// Level of a label within the stored prefix.
    pub fn level_of(&self, label: &str) -> Option<usize> {
        self.levels
            .iter()
            .find(|l| l.position(label).is_some())
            .map(|l| l.index)
    }

    /// `Σ_w M[w,v]·d(w)` over the level below `v`; zero at level 1.
    pub fn incoming_sum(&self, n: usize, label: &str) -> Result<C> {
        self.degree(n, label)?;
        if n == 1 {
            return Ok(C::zero());
        }
        let prev = self.level(n - 1)?;
        let Some(m) = self.matrix_from(n - 1) else {
            return Ok(C::zero());
        };
        let mut acc = C::zero();
        for (src, mult) in m.incoming(label) {
            let d = prev.degree(src).ok_or_else(|| Error::UnknownVertex {
                level: n - 1,
                label: src.to_string(),
            })?;
            acc = acc.try_add(&mult.try_mul(d)?)?;
        }
        Ok(acc)
    }

    /// Dense `|W_n| × |W_{n+1}|` matrix in level vertex order.
    pub fn dense(&self, n: usize) -> Result<Vec<Vec<C>>> {
        let a = self.level(n)?;
        let b = self.level(n + 1)?;
        let m = self.matrix_from(n);
        Ok(a.vertices
            .iter()
            .map(|s| {
                b.vertices
                    .iter()
                    .map(|t| m.map_or_else(C::zero, |m| m.get(&s.label, &t.label)))
                    .collect()
            })
            .collect())
    }

    /// Checks every structural axiom and returns all violations found.
    ///
    /// The last stored level of a finite diagram is a truncation, so it is
    /// exempt from the no-sink axiom.
    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        if self.levels.is_empty() {
            issues.push(Issue::EmptyDiagram);
            return ValidationReport { issues };
        }
        let mut seen = HashSet::new();
        for (pos, level) in self.levels.iter().enumerate() {
            if level.index != pos + 1 {
                issues.push(Issue::LevelIndex {
                    position: pos,
                    found: level.index,
                });
            }
            if level.vertices.is_empty() {
                issues.push(Issue::EmptyLevel { level: pos + 1 });
            }
            for v in &level.vertices {
                if !seen.insert(v.label.clone()) {
                    issues.push(Issue::DuplicateLabel {
                        level: pos + 1,
                        label: v.label.clone(),
                    });
                }
                if v.degree.is_zero() {
                    issues.push(Issue::ZeroDegree {
                        level: pos + 1,
                        label: v.label.clone(),
                    });
                }
            }
        }
        if self.matrices.len() + 1 != self.levels.len() {
            issues.push(Issue::MatrixCount {
                levels: self.levels.len(),
                matrices: self.matrices.len(),
            });
        }
        for (pos, m) in self.matrices.iter().enumerate() {
            if m.from_level != pos + 1 {
                issues.push(Issue::MatrixLevel {
                    position: pos,
                    found: m.from_level,
                });
            }
            let (Some(a), Some(b)) = (self.levels.get(pos), self.levels.get(pos + 1)) else {
                continue;
            };
            for ((s, t), mult) in &m.entries {
                if a.position(s).is_none() {
                    issues.push(Issue::DanglingLabel {
                        level: pos + 1,
                        label: s.clone(),
                    });
                }
                if b.position(t).is_none() {
                    issues.push(Issue::DanglingLabel {
                        level: pos + 2,
                        label: t.clone(),
                    });
                }
                if mult.is_zero() {
                    issues.push(Issue::ZeroMultiplicity {
                        level: pos + 1,
                        src: s.clone(),
                        dst: t.clone(),
                    });
                }
            }
        }
        // Sinks: every vertex below the last stored level needs an out-edge.
        for (pos, m) in self.matrices.iter().enumerate() {
            let Some(a) = self.levels.get(pos) else { continue };
            for v in &a.vertices {
                if m.outgoing(&v.label).next().is_none() {
                    issues.push(Issue::Sink {
                        level: pos + 1,
                        label: v.label.clone(),
                    });
                }
            }
        }
        // Degree inequality, only meaningful once the labels are sound.
        if issues.is_empty() {
            for level in self.levels.iter().skip(1) {
                for v in &level.vertices {
                    match self.incoming_sum(level.index, &v.label) {
                        Ok(inc) if inc > v.degree => issues.push(Issue::DegreeInequality {
                            level: level.index,
                            label: v.label.clone(),
                            degree: v.degree.to_string(),
                            incoming: inc.to_string(),
                        }),
                        Ok(_) => {}
                        Err(_) => issues.push(Issue::DegreeInequality {
                            level: level.index,
                            label: v.label.clone(),
                            degree: v.degree.to_string(),
                            incoming: "overflow".into(),
                        }),
                    }
                }
            }
        }
        if let Some(tail) = &self.tail {
            self.validate_tail(tail, &mut issues);
        }
        ValidationReport { issues }
    }

    fn validate_tail(&self, tail: &TailTemplate<C>, issues: &mut Vec<Issue>) {
        let p = tail.period();
        if p == 0 {
            issues.push(Issue::Tail("period must be at least 1".into()));
            return;
        }
        if tail.start_level != self.levels.len() {
            issues.push(Issue::Tail(format!(
                "start_level {} must equal the last prefix level {}",
                tail.start_level,
                self.levels.len()
            )));
            return;
        }
        if tail.labels.scale < 1 {
            issues.push(Issue::Tail("label scale must be positive".into()));
        }
        // The last prefix level must carry exactly the stems of the closing step.
        let last = &self.levels[self.levels.len() - 1];
        let expected: BTreeSet<String> = tail
            .stems_at(tail.start_level)
            .iter()
            .map(|s| tail.labels.label(s, tail.start_level))
            .collect();
        let actual: BTreeSet<String> = last.vertices.iter().map(|v| v.label.clone()).collect();
        if expected != actual {
            issues.push(Issue::Tail(format!(
                "level {} labels {:?} do not match template labels {:?}",
                tail.start_level, actual, expected
            )));
        }
        for (i, step) in tail.steps.iter().enumerate() {
            let sources = &tail.steps[(i + p - 1) % p].vertices;
            let src_set: BTreeSet<&String> = sources.iter().collect();
            let dst_set: BTreeSet<&String> = step.vertices.iter().collect();
            if step.vertices.is_empty() {
                issues.push(Issue::Tail(format!("step {i} has no vertices")));
            }
            if dst_set.len() != step.vertices.len() {
                issues.push(Issue::Tail(format!("step {i} repeats a stem")));
            }
            for ((s, t), mult) in &step.entries {
                if !src_set.contains(s) {
                    issues.push(Issue::Tail(format!("step {i} references unknown source stem {s:?}")));
                }
                if !dst_set.contains(t) {
                    issues.push(Issue::Tail(format!("step {i} references unknown target stem {t:?}")));
                }
                if mult.is_zero() {
                    issues.push(Issue::Tail(format!("step {i} stores a zero multiplicity {s:?}->{t:?}")));
                }
            }
            for stem in step.defects.keys() {
                if !dst_set.contains(stem) {
                    issues.push(Issue::Tail(format!("step {i} has a defect for unknown stem {stem:?}")));
                }
            }
            for s in sources {
                if !step.entries.keys().any(|(a, _)| a == s) {
                    issues.push(Issue::Tail(format!("stem {s:?} is a sink at step {i}")));
                }
            }
            for t in &step.vertices {
                let fed = step.entries.keys().any(|(_, b)| b == t);
                if !fed && step.defect(t).is_zero() {
                    issues.push(Issue::Tail(format!(
                        "stem {t:?} at step {i} has no incoming edges and zero defect, so degree 0"
                    )));
                }
            }
        }
        // Label collisions only show up once levels are generated; probe two periods.
        if issues.is_empty() {
            let probe = self.levels.len() + 2 * p;
            if let Err(Error::InvalidDiagram(r)) = self.materialize(probe) {
                issues.extend(r.issues);
            }
        }
    }

    /// The first `depth` levels as a finite diagram, generating tail levels
    /// as needed. Idempotent on finite diagrams with at least `depth` levels.
    pub fn materialize(&self, depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::pre("depth must be at least 1"));
        }
        if depth <= self.levels.len() {
            return Ok(BratteliDiagram {
                levels: self.levels[..depth].to_vec(),
                matrices: self.matrices[..depth - 1].to_vec(),
                tail: None,
            });
        }
        let Some(tail) = &self.tail else {
            return Err(Error::InsufficientLevels {
                requested: depth,
                available: self.levels.len(),
            });
        };
        let mut levels = self.levels.clone();
        let mut matrices = self.matrices.clone();
        let mut seen: HashSet<String> = levels
            .iter()
            .flat_map(|l| l.vertices.iter().map(|v| v.label.clone()))
            .collect();
        for n in levels.len() + 1..=depth {
            let step = tail.step_into(n);
            let prev_stems = tail.stems_at(n - 1);
            let prev = &levels[n - 2];
            let mut matrix = MultMatrix::new(n - 1);
            let mut vertices = Vec::with_capacity(step.vertices.len());
            for t in &step.vertices {
                let t_label = tail.labels.label(t, n);
                let mut degree = step.defect(t);
                for s in prev_stems {
                    let mult = step.mult(s, t);
                    if mult.is_zero() {
                        continue;
                    }
                    let s_label = tail.labels.label(s, n - 1);
                    let ds = prev.degree(&s_label).ok_or_else(|| Error::UnknownVertex {
                        level: n - 1,
                        label: s_label.clone(),
                    })?;
                    degree = degree.try_add(&mult.try_mul(ds)?)?;
                    matrix.set(s_label, t_label.clone(), mult);
                }
                if !seen.insert(t_label.clone()) {
                    return Err(Error::InvalidDiagram(ValidationReport {
                        issues: vec![Issue::DuplicateLabel { level: n, label: t_label }],
                    }));
                }
                vertices.push(Vertex::new(t_label, degree));
            }
            matrices.push(matrix);
            levels.push(Level::new(n, vertices));
        }
        Ok(BratteliDiagram {
            levels,
            matrices,
            tail: None,
        })
    }

    /// Materializes only when the stored prefix is too short.
    pub fn ensure_depth(&self, depth: usize) -> Result<std::borrow::Cow<'_, Self>> {
        if self.tail.is_none() && depth <= self.levels.len() {
            Ok(std::borrow::Cow::Borrowed(self))
        } else {
            Ok(std::borrow::Cow::Owned(self.materialize(depth)?))
        }
    }

    /// `d(v) − Σ_w M[w,v]·d(w)`; the full degree at level 1.
    pub fn defect(&self, level: usize, label: &str) -> Result<C> {
        if level == 0 {
            return Err(Error::UnknownLevel(0));
        }
        let d = self.ensure_depth(level)?;
        let deg = d.degree(level, label)?.clone();
        let inc = d.incoming_sum(level, label)?;
        deg.sub_nonneg(&inc).ok_or_else(|| {
            Error::pre(format!(
                "degree inequality violated at {label:?} (level {level}): {deg} < {inc}"
            ))
        })
    }

    /// Degrees of level `n` in vertex order.
    pub fn degrees(&self, n: usize) -> Result<Vec<C>> {
        Ok(self.level(n)?.vertices.iter().map(|v| v.degree.clone()).collect())
    }
}

/// Report-style validation; an empty report means the diagram is valid.
pub fn validate_diagram<C: Count>(d: &BratteliDiagram<C>) -> ValidationReport {
    d.validate()
}

/// Small builder used by fixtures, the generator and tests.
#[derive(Debug, Clone)]
pub struct DiagramBuilder<C> {
    levels: Vec<Level<C>>,
    matrices: Vec<MultMatrix<C>>,
}

impl<C: Count> Default for DiagramBuilder<C> {
    fn default() -> Self {
        Self::new()
    }
}

impl<C: Count> DiagramBuilder<C> {
    pub fn new() -> Self {
        DiagramBuilder {
            levels: Vec::new(),
            matrices: Vec::new(),
        }
    }

    /// Appends a level; a matrix slot for the edges into it is opened.
    pub fn level<S: Into<String>>(mut self, vertices: impl IntoIterator<Item = (S, C)>) -> Self {
        let index = self.levels.len() + 1;
        if index > 1 {
            self.matrices.push(MultMatrix::new(index - 1));
        }
        self.levels.push(Level::new(
            index,
            vertices.into_iter().map(|(l, d)| Vertex::new(l, d)).collect(),
        ));
        self
    }

    /// Adds `mult` edges from `src` on the previous level to `dst` on the
    /// most recently added level.
    pub fn edge(mut self, src: &str, dst: &str, mult: C) -> Self {
        let m = self.matrices.last_mut().expect("edge before second level");
        m.set(src, dst, mult);
        self
    }

    pub fn build_unchecked(self) -> BratteliDiagram<C> {
        BratteliDiagram::new_unchecked(self.levels, self.matrices, None)
    }

    pub fn build(self) -> Result<BratteliDiagram<C>> {
        BratteliDiagram::new(self.levels, self.matrices, None)
    }

    pub fn build_with_tail(self, tail: TailTemplate<C>) -> Result<BratteliDiagram<C>> {
        BratteliDiagram::new(self.levels, self.matrices, Some(tail))
    }
}

/// Builder for a single tail step.
pub fn tail_step<C: Count>(
    vertices: &[&str],
    entries: &[(&str, &str, C)],
    defects: &[(&str, C)],
) -> TailStep<C> {
    TailStep {
        vertices: vertices.iter().map(|s| s.to_string()).collect(),
        entries: entries
            .iter()
            .filter(|(_, _, m)| !m.is_zero())
            .map(|(s, t, m)| ((s.to_string(), t.to_string()), m.clone()))
            .collect(),
        defects: defects
            .iter()
            .filter(|(_, d)| !d.is_zero())
            .map(|(s, d)| (s.to_string(), d.clone()))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(k: u64, n: usize) -> BratteliDiagram<u64> {
        let mut b = DiagramBuilder::new().level([("a1", k)]);
        for i in 2..=n {
            b = b.level([(format!("a{i}"), k)]).edge(&format!("a{}", i - 1), &format!("a{i}"), 1);
        }
        b.build().unwrap()
    }

    #[test]
    fn constant_chain_is_valid() {
        let d = chain(3, 5);
        assert!(d.validate().is_valid());
        assert_eq!(d.defect(1, "a1").unwrap(), 3);
        assert_eq!(d.defect(4, "a4").unwrap(), 0);
    }

    #[test]
    fn degree_inequality_is_reported_at_the_vertex() {
        let d = DiagramBuilder::<u64>::new()
            .level([("p", 2)])
            .level([("q", 2)])
            .edge("p", "q", 2)
            .build_unchecked();
        let r = d.validate();
        assert_eq!(r.issues.len(), 1);
        assert!(matches!(&r.issues[0], Issue::DegreeInequality { level: 2, label, .. } if label == "q"));
        assert!(d.defect(2, "q").is_err());
    }

    #[test]
    fn sinks_and_dangling_labels() {
        let d = DiagramBuilder::<u64>::new()
            .level([("p", 1), ("s", 1)])
            .level([("q", 5)])
            .edge("p", "q", 1)
            .edge("p", "ghost", 1)
            .build_unchecked();
        let r = d.validate();
        assert!(r.issues.iter().any(|i| matches!(i, Issue::Sink { label, .. } if label == "s")));
        assert!(r.issues.iter().any(|i| matches!(i, Issue::DanglingLabel { label, .. } if label == "ghost")));
    }

    #[test]
    fn duplicate_labels_across_levels_are_rejected() {
        let d = DiagramBuilder::<u64>::new()
            .level([("p", 1)])
            .level([("p", 1)])
            .edge("p", "p", 1)
            .build_unchecked();
        assert!(d
            .validate()
            .issues
            .iter()
            .any(|i| matches!(i, Issue::DuplicateLabel { level: 2, .. })));
    }

    #[test]
    fn materialize_constant_tail() {
        let d = DiagramBuilder::new()
            .level([("a1", 7u64)])
            .build_with_tail(TailTemplate {
                start_level: 1,
                steps: vec![tail_step(&["a"], &[("a", "a", 1)], &[])],
                labels: LabelRule::default(),
            })
            .unwrap();
        let m = d.materialize(3).unwrap();
        assert_eq!(m.prefix_len(), 3);
        assert!(m.levels().iter().all(|l| l.vertices[0].degree == 7));
        assert_eq!(m.level(3).unwrap().vertices[0].label, "a3");
        assert_eq!(m.materialize(3).unwrap(), m);
        assert!(matches!(
            m.materialize(4),
            Err(Error::InsufficientLevels { requested: 4, available: 3 })
        ));
        assert!(m.materialize(0).is_err());
    }

    #[test]
    fn tail_with_unknown_stem_is_invalid() {
        let r = DiagramBuilder::new()
            .level([("a1", 7u64)])
            .build_with_tail(TailTemplate {
                start_level: 1,
                steps: vec![tail_step(&["a"], &[("a", "b", 1)], &[])],
                labels: LabelRule::default(),
            });
        assert!(matches!(r, Err(Error::InvalidDiagram(_))));
    }

    #[test]
    fn outgoing_iterates_only_the_source_row() {
        let mut m = MultMatrix::<u64>::new(1);
        m.set("a", "x", 1);
        m.set("ab", "y", 2);
        m.set("b", "z", 3);
        let out: Vec<_> = m.outgoing("a").collect();
        assert_eq!(out, vec![("x", &1)]);
        m.set("a", "x", 0);
        assert!(m.outgoing("a").next().is_none());
    }
}
