//! JSON documents for diagrams, graphs, K₀ vectors and reports.
//!
//! Counts are written as JSON integers of any size. Output key order is
//! fixed by construction, so serializing the same value always yields the
//! same bytes. Parse errors carry a JSON pointer to the offending value.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde_json::{json, Map, Number, Value};

use crate::decide::{AutoRealization, ClassificationReport, StrictStatus};
use crate::error::{Error, Result};
use crate::graph::{Mult, MultGraph};
use crate::ideals::{MkTail, SeparatedReport, SeparatedStructure, UnitalReport, UnitalStatus};
use crate::ktheory::{K0Vector, MonoidCertificate, UnitNormalization};
use crate::model::{
    BratteliDiagram, Issue, LabelRule, Level, MultMatrix, TailStep, TailTemplate, ValidationReport, Vertex,
    VertexRef,
};
use crate::num::{Coeff, Count};
use crate::realize::{CheckKind, Construction, RealizationCertificate, RealizedGraph, Role};
use crate::separation::{ProperificationTrace, Separation, SixPrimeReport};
use crate::telescope::{EquivalenceReport, Subsequence};

pub const DEFAULT_INFINITE_TOKEN: &str = "inf";

/// Serialization to a `serde_json::Value` with a fixed key order.
pub trait ToJson {
    fn to_json(&self) -> Value;
}

/// Pretty-printed JSON followed by a newline.
pub fn to_pretty<T: ToJson + ?Sized>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(&x.to_json()).expect("values serialize");
    s.push('\n');
    s
}

fn num<T: ToString>(x: &T) -> Value {
    Value::Number(Number::from_str(&x.to_string()).expect("integers are valid JSON numbers"))
}

fn escape_pointer(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

/// A borrowed value together with its JSON pointer.
#[derive(Clone)]
struct Node<'a> {
    v: &'a Value,
    ptr: String,
}

impl<'a> Node<'a> {
    fn root(v: &'a Value) -> Self {
        Node { v, ptr: String::new() }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(if self.ptr.is_empty() { "/".to_string() } else { self.ptr.clone() }, msg)
    }

    fn obj(&self) -> Result<&'a Map<String, Value>> {
        self.v.as_object().ok_or_else(|| self.err("expected an object"))
    }

    fn opt(&self, key: &str) -> Result<Option<Node<'a>>> {
        Ok(self.obj()?.get(key).filter(|v| !v.is_null()).map(|v| Node {
            v,
            ptr: format!("{}/{}", self.ptr, escape_pointer(key)),
        }))
    }

    fn field(&self, key: &str) -> Result<Node<'a>> {
        self.opt(key)?
            .ok_or_else(|| self.err(format!("missing field {key:?}")))
    }

    fn items(&self) -> Result<Vec<Node<'a>>> {
        let arr = self.v.as_array().ok_or_else(|| self.err("expected an array"))?;
        Ok(arr
            .iter()
            .enumerate()
            .map(|(i, v)| Node {
                v,
                ptr: format!("{}/{i}", self.ptr),
            })
            .collect())
    }

    fn entries(&self) -> Result<Vec<(String, Node<'a>)>> {
        Ok(self
            .obj()?
            .iter()
            .map(|(k, v)| {
                (
                    k.clone(),
                    Node {
                        v,
                        ptr: format!("{}/{}", self.ptr, escape_pointer(k)),
                    },
                )
            })
            .collect())
    }

    fn str(&self) -> Result<&'a str> {
        self.v.as_str().ok_or_else(|| self.err("expected a string"))
    }

    fn integer_text(&self) -> Result<String> {
        match self.v {
            Value::Number(n) => Ok(n.to_string()),
            _ => Err(self.err("expected an integer")),
        }
    }

    fn count<C: Count>(&self) -> Result<C> {
        let t = self.integer_text()?;
        t.parse::<C>()
            .map_err(|_| self.err(format!("expected a nonnegative integer, found {t}")))
    }

    fn coeff<Z: Coeff>(&self) -> Result<Z> {
        let t = self.integer_text()?;
        t.parse::<Z>()
            .map_err(|_| self.err(format!("expected an integer, found {t}")))
    }

    fn usize(&self) -> Result<usize> {
        let t = self.integer_text()?;
        t.parse::<usize>()
            .map_err(|_| self.err(format!("expected a nonnegative integer, found {t}")))
    }

    fn i64(&self) -> Result<i64> {
        let t = self.integer_text()?;
        t.parse::<i64>().map_err(|_| self.err(format!("expected an integer, found {t}")))
    }
}

fn parse_text(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        Error::parse(
            "/",
            format!("invalid JSON at line {} column {}: {e}", e.line(), e.column()),
        )
    })
}

fn entries_json<C: Count>(entries: &BTreeMap<(String, String), C>) -> Value {
    Value::Array(
        entries
            .iter()
            .map(|((s, t), m)| json!({"src": s, "dst": t, "mult": num(m)}))
            .collect(),
    )
}

fn parse_entries<C: Count>(node: &Node<'_>) -> Result<BTreeMap<(String, String), C>> {
    let mut out = BTreeMap::new();
    for e in node.items()? {
        let src = e.field("src")?.str()?.to_string();
        let dst = e.field("dst")?.str()?.to_string();
        let mult: C = e.field("mult")?.count()?;
        if out.insert((src.clone(), dst.clone()), mult).is_some() {
            return Err(e.err(format!("duplicate entry {src} -> {dst}")));
        }
    }
    Ok(out)
}

fn count_map_json<C: Count>(m: &BTreeMap<String, C>) -> Value {
    Value::Object(m.iter().map(|(k, v)| (k.clone(), num(v))).collect())
}

fn parse_count_map<C: Count>(node: &Node<'_>) -> Result<BTreeMap<String, C>> {
    node.entries()?
        .into_iter()
        .map(|(k, n)| Ok((k, n.count()?)))
        .collect()
}

impl<C: Count> ToJson for BratteliDiagram<C> {
    fn to_json(&self) -> Value {
        let mut out = Map::new();
        out.insert(
            "levels".into(),
            Value::Array(
                self.levels()
                    .iter()
                    .map(|l| {
                        json!({
                            "index": l.index,
                            "vertices": l.vertices.iter()
                                .map(|v| json!({"id": v.label, "degree": num(&v.degree)}))
                                .collect::<Vec<_>>(),
                        })
                    })
                    .collect(),
            ),
        );
        out.insert(
            "matrices".into(),
            Value::Array(
                self.matrices()
                    .iter()
                    .map(|m| json!({"from_level": m.from_level, "entries": entries_json(&m.entries)}))
                    .collect(),
            ),
        );
        if let Some(t) = self.tail() {
            let mut tail = Map::new();
            tail.insert("start_level".into(), json!(t.start_level));
            tail.insert("period".into(), json!(t.period()));
            if t.labels != LabelRule::default() {
                tail.insert(
                    "label_index".into(),
                    json!({"scale": t.labels.scale, "offset": t.labels.offset}),
                );
            }
            tail.insert(
                "matrices".into(),
                Value::Array(
                    t.steps
                        .iter()
                        .map(|s| {
                            json!({
                                "vertices": s.vertices,
                                "entries": entries_json(&s.entries),
                                "defects": count_map_json(&s.defects),
                            })
                        })
                        .collect(),
                ),
            );
            out.insert("tail".into(), Value::Object(tail));
        }
        Value::Object(out)
    }
}

fn parse_tail<C: Count>(node: &Node<'_>) -> Result<TailTemplate<C>> {
    let start_level = node.field("start_level")?.usize()?;
    let shared_defects = match node.opt("defects")? {
        Some(n) => Some(parse_count_map::<C>(&n)?),
        None => None,
    };
    let labels = match node.opt("label_index")? {
        Some(n) => LabelRule {
            scale: n.field("scale")?.i64()?,
            offset: n.field("offset")?.i64()?,
        },
        None => LabelRule::default(),
    };
    let mats = node.field("matrices")?;
    let mut steps = Vec::new();
    for m in mats.items()? {
        let entries = parse_entries::<C>(&m.field("entries")?)?;
        let defects = match (m.opt("defects")?, &shared_defects) {
            (Some(n), _) => parse_count_map::<C>(&n)?,
            (None, Some(d)) => d.clone(),
            (None, None) => BTreeMap::new(),
        };
        let vertices = match m.opt("vertices")? {
            Some(n) => n
                .items()?
                .iter()
                .map(|x| x.str().map(str::to_string))
                .collect::<Result<Vec<_>>>()?,
            None => {
                // Targets in order of first appearance, then defect-only stems.
                let mut seen: Vec<String> = Vec::new();
                for (_, t) in entries.keys() {
                    if !seen.contains(t) {
                        seen.push(t.clone());
                    }
                }
                for k in defects.keys() {
                    if !seen.contains(k) {
                        seen.push(k.clone());
                    }
                }
                seen
            }
        };
        steps.push(TailStep {
            vertices,
            entries: entries.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
            defects: defects.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        });
    }
    if steps.is_empty() {
        return Err(mats.err("tail needs at least one matrix"));
    }
    if let Some(p) = node.opt("period")? {
        if p.usize()? != steps.len() {
            return Err(p.err(format!("period {} does not match {} tail matrices", p.usize()?, steps.len())));
        }
    }
    Ok(TailTemplate {
        start_level,
        steps,
        labels,
    })
}

fn diagram_from_value<C: Count>(v: &Value) -> Result<BratteliDiagram<C>> {
    let root = Node::root(v);
    let mut levels = Vec::new();
    for l in root.field("levels")?.items()? {
        let index = l.field("index")?.usize()?;
        let mut vertices = Vec::new();
        for x in l.field("vertices")?.items()? {
            vertices.push(Vertex::new(x.field("id")?.str()?, x.field("degree")?.count::<C>()?));
        }
        levels.push(Level::new(index, vertices));
    }
    let mut matrices = Vec::new();
    if let Some(ms) = root.opt("matrices")? {
        for m in ms.items()? {
            let mut mat = MultMatrix::new(m.field("from_level")?.usize()?);
            for ((s, t), c) in parse_entries::<C>(&m.field("entries")?)? {
                mat.set(s, t, c);
            }
            matrices.push(mat);
        }
    }
    let tail = match root.opt("tail")? {
        Some(t) => Some(parse_tail(&t)?),
        None => None,
    };
    Ok(BratteliDiagram::new_unchecked(levels, matrices, tail))
}

/// Parses and validates a diagram document.
pub fn parse_diagram<C: Count>(text: &str) -> Result<BratteliDiagram<C>> {
    let d = parse_diagram_unchecked(text)?;
    let report = d.validate();
    if report.is_valid() {
        Ok(d)
    } else {
        Err(Error::InvalidDiagram(report))
    }
}

/// Parses a diagram document without checking the axioms; structural
/// errors are still reported.
pub fn parse_diagram_unchecked<C: Count>(text: &str) -> Result<BratteliDiagram<C>> {
    diagram_from_value(&parse_text(text)?)
}

impl<C: Count> ToJson for MultGraph<C> {
    fn to_json(&self) -> Value {
        let mut out = Map::new();
        out.insert("vertices".into(), json!(self.vertices()));
        out.insert(
            "edges".into(),
            Value::Array(
                self.edges()
                    .iter()
                    .map(|((s, t), m)| {
                        let mult = match m {
                            Mult::Finite(c) => num(c),
                            Mult::Infinite => json!(DEFAULT_INFINITE_TOKEN),
                        };
                        json!({"src": s, "dst": t, "mult": mult})
                    })
                    .collect(),
            ),
        );
        out.insert("infinite_mult_token".into(), json!(DEFAULT_INFINITE_TOKEN));
        if !self.levels().is_empty() {
            let levels: Map<String, Value> = self
                .vertices()
                .iter()
                .filter_map(|v| self.level(v).map(|n| (v.clone(), json!(n))))
                .collect();
            out.insert("levels".into(), Value::Object(levels));
        }
        if !self.infinite_emitters().is_empty() {
            out.insert("infinite_emitters".into(), json!(self.infinite_emitters()));
        }
        if let Some(d) = self.staged_depth() {
            out.insert("staged_depth".into(), json!(d));
        }
        Value::Object(out)
    }
}

fn graph_from_value<C: Count>(v: &Value) -> Result<MultGraph<C>> {
    let root = Node::root(v);
    let token = match root.opt("infinite_mult_token")? {
        Some(t) => t.str()?.to_string(),
        None => DEFAULT_INFINITE_TOKEN.to_string(),
    };
    let mut g = MultGraph::new();
    for x in root.field("vertices")?.items()? {
        g.add_vertex(x.str()?).map_err(|e| x.err(e.to_string()))?;
    }
    if let Some(es) = root.opt("edges")? {
        for e in es.items()? {
            let src = e.field("src")?.str()?;
            let dst = e.field("dst")?.str()?;
            let mn = e.field("mult")?;
            let mult = match mn.v {
                Value::String(s) if *s == token => Mult::Infinite,
                Value::String(s) => {
                    return Err(mn.err(format!("expected an integer or {token:?}, found {s:?}")));
                }
                _ => Mult::Finite(mn.count()?),
            };
            g.add_edge(src, dst, mult).map_err(|err| e.err(err.to_string()))?;
        }
    }
    if let Some(ls) = root.opt("levels")? {
        for (k, n) in ls.entries()? {
            g.set_level(&k, n.usize()?).map_err(|e| n.err(e.to_string()))?;
        }
    }
    if let Some(es) = root.opt("infinite_emitters")? {
        for x in es.items()? {
            g.mark_infinite_emitter(x.str()?).map_err(|e| x.err(e.to_string()))?;
        }
    }
    if let Some(d) = root.opt("staged_depth")? {
        g.set_staged_depth(Some(d.usize()?));
    }
    Ok(g)
}

pub fn parse_graph<C: Count>(text: &str) -> Result<MultGraph<C>> {
    graph_from_value(&parse_text(text)?)
}

impl<Z: Coeff> ToJson for K0Vector<Z> {
    fn to_json(&self) -> Value {
        Value::Object(self.iter().map(|(k, v)| (k.to_string(), num(v))).collect())
    }
}

/// Parses `{"v": 3, "w": -2}`.
pub fn parse_k0_vector<Z: Coeff>(text: &str) -> Result<K0Vector<Z>> {
    let v = parse_text(text)?;
    let root = Node::root(&v);
    let mut x = K0Vector::new();
    for (k, n) in root.entries()? {
        x.set(&k, n.coeff()?);
    }
    Ok(x)
}

impl ToJson for VertexRef {
    fn to_json(&self) -> Value {
        json!({"level": self.level, "vertex": self.label})
    }
}

fn refs(v: &[VertexRef]) -> Value {
    Value::Array(v.iter().map(ToJson::to_json).collect())
}

impl ToJson for Issue {
    fn to_json(&self) -> Value {
        json!({"message": self.to_string()})
    }
}

impl ToJson for ValidationReport {
    fn to_json(&self) -> Value {
        json!({
            "valid": self.is_valid(),
            "issues": self.issues.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
        })
    }
}

impl ToJson for Subsequence {
    fn to_json(&self) -> Value {
        match self {
            Subsequence::Explicit(v) => json!({"levels": v}),
            Subsequence::Arithmetic { start, step } => json!({"start": start, "step": step}),
        }
    }
}

impl ToJson for EquivalenceReport {
    fn to_json(&self) -> Value {
        json!({
            "equivalent": self.equivalent,
            "depth": self.depth,
            "tail_dropped": self.tail_dropped,
            "bijections": self.bijections.as_ref().map(|bs| {
                bs.iter().map(|b| Value::Object(
                    b.iter().map(|(k, v)| (k.clone(), json!(v))).collect()
                )).collect::<Vec<_>>()
            }),
        })
    }
}

impl ToJson for UnitalReport {
    fn to_json(&self) -> Value {
        json!({
            "unital": self.status == UnitalStatus::UnitalWitnessed,
            "status": match self.status {
                UnitalStatus::UnitalWitnessed => "unital-witnessed",
                UnitalStatus::NoWitnessAtDepth => "no-witness-at-depth",
            },
            "depth": self.depth,
            "unwitnessed": refs(&self.unwitnessed),
        })
    }
}

impl<C: Count> ToJson for SeparatedStructure<C> {
    fn to_json(&self) -> Value {
        json!({"k": num(&self.k), "y": self.y})
    }
}

impl<C: Count> ToJson for SeparatedReport<C> {
    fn to_json(&self) -> Value {
        json!({
            "k": num(&self.structure.k),
            "proper": self.proper,
            "y": self.structure.y,
            "defect_zero": refs(&self.defect_zero),
        })
    }
}

impl<C: Count> ToJson for MkTail<C> {
    fn to_json(&self) -> Value {
        json!({"m": self.m, "k": num(&self.k), "row": self.row})
    }
}

impl ToJson for SixPrimeReport {
    fn to_json(&self) -> Value {
        json!({
            "holds": self.holds,
            "offenders": refs(&self.offenders),
            "a_sets": Value::Object(self.a_sets.iter().map(|(n, a)| (n.to_string(), json!(a))).collect()),
        })
    }
}

impl<C: Count> ToJson for Separation<C> {
    fn to_json(&self) -> Value {
        json!({
            "subsequence": self.subsequence,
            "m1": self.m1,
            "structure": self.structure.to_json(),
            "diagram": self.diagram.to_json(),
        })
    }
}

impl<C: Count> ToJson for ProperificationTrace<C> {
    fn to_json(&self) -> Value {
        json!({
            "window": self.window,
            "a_sets": Value::Object(self.a_sets.iter().map(|(n, a)| (n.to_string(), json!(a))).collect()),
            "path_counts": self.path_counts.iter().map(|p| json!({
                "level": p.level, "v": p.v, "w": p.w,
                "into_v": num(&p.into_v), "out_of_v": num(&p.out_of_v), "p": num(&p.p),
            })).collect::<Vec<_>>(),
            "reroutes": self.reroutes.iter().map(|r| json!({
                "level": r.level, "src": r.src, "dst": r.dst, "added": num(&r.added),
            })).collect::<Vec<_>>(),
            "odd_levels": self.odd_levels.to_json(),
            "even_levels": self.even_levels.to_json(),
            "degree_identities_checked": self.degree_identities_checked,
            "b": self.b.to_json(),
        })
    }
}

impl<C: Count> ToJson for RealizedGraph<C> {
    fn to_json(&self) -> Value {
        let roles: Map<String, Value> = self
            .roles
            .iter()
            .map(|(k, r)| {
                let v = match r {
                    Role::Diagram { level } => json!({"diagram": level}),
                    Role::Chain { index } => json!({"chain": index}),
                    Role::Source { target, index } => json!({"source": target, "index": index}),
                };
                (k.clone(), v)
            })
            .collect();
        json!({
            "construction": match self.construction {
                Construction::Separated => "separated",
                Construction::Strict => "strict",
            },
            "depth": self.depth,
            "k": self.k.as_ref().map(num),
            "y": self.y_row,
            "layout": self.layout,
            "delta": count_map_json(&self.delta),
            "m": count_map_json(&self.m),
            "roles": Value::Object(roles),
            "graph": self.graph.to_json(),
        })
    }
}

fn realized_from_value<C: Count>(v: &Value) -> Result<RealizedGraph<C>> {
    let root = Node::root(v);
    let construction = match root.field("construction")?.str()? {
        "separated" => Construction::Separated,
        "strict" => Construction::Strict,
        other => {
            return Err(root
                .field("construction")?
                .err(format!("unknown construction {other:?}")))
        }
    };
    let strings = |n: &Node<'_>| -> Result<Vec<String>> {
        n.items()?.iter().map(|x| x.str().map(str::to_string)).collect()
    };
    let mut layout = Vec::new();
    for l in root.field("layout")?.items()? {
        layout.push(strings(&l)?);
    }
    let y_row = match root.opt("y")? {
        Some(n) => Some(strings(&n)?),
        None => None,
    };
    let k = match root.opt("k")? {
        Some(n) => Some(n.count()?),
        None => None,
    };
    let mut roles = BTreeMap::new();
    for (label, r) in root.field("roles")?.entries()? {
        let role = if let Some(l) = r.opt("diagram")? {
            Role::Diagram { level: l.usize()? }
        } else if let Some(i) = r.opt("chain")? {
            Role::Chain { index: i.usize()? }
        } else {
            Role::Source {
                target: r.field("source")?.str()?.to_string(),
                index: r.field("index")?.usize()?,
            }
        };
        roles.insert(label, role);
    }
    let graph = graph_from_value(root.field("graph")?.v).map_err(|e| match e {
        Error::Parse { pointer, message } => Error::parse(format!("/graph{pointer}"), message),
        e => e,
    })?;
    Ok(RealizedGraph {
        construction,
        depth: root.field("depth")?.usize()?,
        graph,
        roles,
        layout,
        y_row,
        k,
        delta: parse_count_map(&root.field("delta")?)?,
        m: parse_count_map(&root.field("m")?)?,
    })
}

/// Parses the document written for a [`RealizedGraph`].
pub fn parse_realized<C: Count>(text: &str) -> Result<RealizedGraph<C>> {
    realized_from_value(&parse_text(text)?)
}

impl ToJson for RealizationCertificate {
    fn to_json(&self) -> Value {
        let entry = |c: &crate::realize::Comparison| {
            let (kind, what) = match &c.kind {
                CheckKind::Multiplicity { src, dst } => ("multiplicity", format!("{src} -> {dst}")),
                CheckKind::Sources { vertex } => ("sources", vertex.clone()),
                CheckKind::PathCount { vertex } => ("path-count", vertex.clone()),
                CheckKind::Chain { detail } => ("chain", detail.clone()),
                CheckKind::Unexpected { src, dst } => ("unexpected-edge", format!("{src} -> {dst}")),
            };
            json!({
                "level": c.level, "check": kind, "subject": what,
                "expected": c.expected, "actual": c.actual, "ok": c.ok,
            })
        };
        json!({
            "pass": self.pass,
            "depth": self.depth,
            "checks": self.comparisons.len(),
            "first_failure": self.first_failure().map(entry),
            "comparisons": self.comparisons.iter().map(entry).collect::<Vec<_>>(),
        })
    }
}

impl ToJson for StrictStatus {
    fn to_json(&self) -> Value {
        json!({
            "holds": self.holds,
            "offender": self.offender.as_ref().map(|(v, why)| {
                json!({"level": v.level, "vertex": v.label, "reason": why})
            }),
        })
    }
}

impl<C: Count> ToJson for ClassificationReport<C> {
    fn to_json(&self) -> Value {
        json!({
            "depth": self.depth,
            "verdict": self.verdict.to_string(),
            "unital": self.unital.to_json(),
            "strict": self.strict.to_json(),
            "separated": self.separated.as_ref().map(ToJson::to_json),
            "six_prime": self.six_prime.as_ref().map(ToJson::to_json),
            "proper": self.proper,
            "evidence": self.evidence,
        })
    }
}

impl<C: Count> ToJson for AutoRealization<C> {
    fn to_json(&self) -> Value {
        json!({
            "report": self.report.to_json(),
            "source": self.source.to_json(),
            "realization": self.graph.to_json(),
            "certificate": self.certificate.to_json(),
        })
    }
}

impl<Z: Coeff> ToJson for MonoidCertificate<Z> {
    fn to_json(&self) -> Value {
        match self {
            MonoidCertificate::Sum(gens) => json!({
                "kind": "sum",
                "generators": gens.iter().map(|g| json!({
                    "apex": g.apex,
                    "subtract": Value::Object(g.subtract.iter().map(|(k, v)| (k.clone(), num(v))).collect()),
                })).collect::<Vec<_>>(),
            }),
            MonoidCertificate::Refutation { vertex, value } => json!({
                "kind": "refutation",
                "vertex": vertex,
                "value": num(value),
            }),
        }
    }
}

impl<Z: Coeff> ToJson for UnitNormalization<Z> {
    fn to_json(&self) -> Value {
        let matrix = |a: &Vec<Vec<Z>>| {
            Value::Array(
                a.iter()
                    .map(|row| Value::Array(row.iter().map(num).collect()))
                    .collect(),
            )
        };
        json!({
            "order": self.order,
            "m": self.m.to_json(),
            "alpha": matrix(&self.alpha),
            "beta": matrix(&self.beta),
            "k": self.k_table.iter().map(|((v, w), k)| json!({"v": v, "w": w, "k": num(k)})).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fixture_b, fixture_m3};

    #[test]
    fn diagrams_roundtrip() {
        for d in [fixture_m3::<u64>(), fixture_b()] {
            let text = to_pretty(&d);
            assert_eq!(parse_diagram::<u64>(&text).unwrap(), d);
        }
    }

    #[test]
    fn negative_degree_is_located() {
        let text = r#"{"levels":[{"index":1,"vertices":[{"id":"a","degree":-1}]}],"matrices":[]}"#;
        match parse_diagram::<u64>(text).unwrap_err() {
            Error::Parse { pointer, .. } => assert_eq!(pointer, "/levels/0/vertices/0/degree"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn dangling_label_names_the_label() {
        let text = r#"{"levels":[{"index":1,"vertices":[{"id":"a","degree":1}]},
            {"index":2,"vertices":[{"id":"b","degree":1}]}],
            "matrices":[{"from_level":1,"entries":[{"src":"a","dst":"ghost","mult":1}]}]}"#;
        let e = parse_diagram::<u64>(text).unwrap_err();
        assert!(matches!(e, Error::InvalidDiagram(_)));
        assert!(e.to_string().contains("ghost"));
    }

    #[test]
    fn graph_tokens() {
        let text = r#"{"vertices":["v","w"],"edges":[{"src":"v","dst":"w","mult":"∞"}],"infinite_mult_token":"∞"}"#;
        let g = parse_graph::<u64>(text).unwrap();
        assert!(g.is_amplified());
        assert_eq!(parse_graph::<u64>(&to_pretty(&g)).unwrap(), g);
    }
}
