//! Normalizing a diagram into M_k-separated form, checking the weakened
//! strictness property, and making it proper by rerouting the vertices
//! that are fed entirely by the `y`-row.
//!
//! Weak strictness is checked between adjacent levels: every `v ∈ U_n`
//! (`n ≥ 2`) has positive defect, or `d(v) = |y_{n−1}E¹v|·k` exactly.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::ideals::{check_separated, detect_mk_tail, recognize_separated, LevelSet, SeparatedStructure};
use crate::model::{BratteliDiagram, Level, MultMatrix, TailStep, TailTemplate, VertexRef};
use crate::num::Count;
use crate::telescope::{check_equivalence_witness, path_matrix, telescope, Subsequence};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separation<C> {
    /// Finite telescope of the input along `subsequence`.
    pub diagram: BratteliDiagram<C>,
    pub structure: SeparatedStructure<C>,
    pub subsequence: Vec<usize>,
    /// First level after which no edge runs from the ideal to the
    /// complement row.
    pub m1: usize,
}

/// Telescopes `d` so that the complement of `s` becomes the `y`-row of an
/// M_k-separated diagram.
///
/// The chosen levels are those `n ≥ m1` where the complement vertex has an
/// edge into the ideal, followed by the last level of the window.
pub fn separate<C: Count>(d: &BratteliDiagram<C>, s: &LevelSet, k: &C, depth: usize) -> Result<Separation<C>> {
    let tail = detect_mk_tail(d, s, depth)?
        .ok_or_else(|| Error::pre(format!("no constant singleton complement through depth {depth}")))?;
    if tail.k != *k {
        return Err(Error::pre(format!("complement row has degree {}, not {k}", tail.k)));
    }
    let m = d.materialize(depth)?;
    let x = |n: usize| tail.row[n - tail.m].as_str();
    let mut m1 = tail.m;
    for n in tail.m..depth {
        let mat = m.matrix_from(n).ok_or(Error::UnknownLevel(n + 1))?;
        if mat.incoming(x(n + 1)).any(|(src, _)| s.contains(n, src)) {
            m1 = n + 1;
        }
    }
    if m1 >= depth {
        return Err(Error::pre(format!("claim-2 not stabilized at depth {depth}")));
    }
    let mut levels: Vec<usize> = (m1..depth)
        .filter(|&n| {
            m.matrix_from(n)
                .is_some_and(|mat| mat.outgoing(x(n)).any(|(t, _)| s.contains(n + 1, t)))
        })
        .collect();
    if levels.is_empty() {
        return Err(Error::pre(format!("claim-1 violated at depth {depth}")));
    }
    levels.push(depth);
    let out = telescope(&m, &Subsequence::explicit(levels.clone())?)?.diagram;
    let structure = SeparatedStructure {
        k: k.clone(),
        y: levels.iter().map(|&n| x(n).to_string()).collect(),
    };
    if let Some(why) = check_separated(&out, &structure)? {
        return Err(Error::Verification(format!("separated telescope fails: {why}")));
    }
    Ok(Separation {
        diagram: out,
        structure,
        subsequence: levels,
        m1,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SixPrimeReport {
    pub holds: bool,
    /// Vertices failing both alternatives.
    pub offenders: Vec<VertexRef>,
    /// `A_n`: vertices meeting the second alternative with zero defect.
    pub a_sets: BTreeMap<usize, Vec<String>>,
}

fn fed_by_y<C: Count>(m: &BratteliDiagram<C>, ss: &SeparatedStructure<C>, n: usize, v: &str) -> Result<bool> {
    let via_y = m.mult(n - 1, ss.y_at(n - 1), v).try_mul(&ss.k)?;
    Ok(*m.degree(n, v)? == via_y)
}

/// Checks weak strictness for `2 ≤ n ≤ depth`.
pub fn check_property_6prime<C: Count>(
    d: &BratteliDiagram<C>,
    ss: &SeparatedStructure<C>,
    depth: usize,
) -> Result<SixPrimeReport> {
    if ss.depth() < depth {
        return Err(Error::pre(format!("structure covers {} levels, {depth} requested", ss.depth())));
    }
    let m = d.materialize(depth)?;
    let mut offenders = Vec::new();
    let mut a_sets = BTreeMap::new();
    for n in 2..=depth {
        let mut a = Vec::new();
        for v in ss.h_at(&m, n)? {
            let strict = !m.defect(n, &v)?.is_zero();
            let fed = fed_by_y(&m, ss, n, &v)?;
            if fed && !strict {
                a.push(v.clone());
            }
            if !strict && !fed {
                offenders.push(VertexRef::new(n, v));
            }
        }
        a_sets.insert(n, a);
    }
    Ok(SixPrimeReport {
        holds: offenders.is_empty(),
        offenders,
        a_sets,
    })
}

/// Greedy search for levels `l_1 < l_2 < …` within the window such that
/// every `v ∈ U_{l_{j+1}}` satisfies one alternative measured from level
/// `l_j`; telescoping along them yields weak strictness.
pub fn find_6prime_telescope<C: Count>(
    d: &BratteliDiagram<C>,
    ss: &SeparatedStructure<C>,
    depth: usize,
) -> Result<Option<Vec<usize>>> {
    let m = d.materialize(depth)?;
    let mut levels = vec![1usize];
    'outer: while let Some(&from) = levels.last() {
        for n in from + 1..=depth {
            let pm = path_matrix(&m, from, n)?;
            let lower = m.level(from)?;
            let mut ok = true;
            for v in ss.h_at(&m, n)? {
                let mut sum = C::zero();
                for w in &lower.vertices {
                    sum = sum.try_add(&pm.get(&w.label, &v).try_mul(&w.degree)?)?;
                }
                let dv = m.degree(n, &v)?;
                let via_y = pm.get(ss.y_at(from), &v).try_mul(&ss.k)?;
                if !(*dv > sum || *dv == via_y) {
                    ok = false;
                    break;
                }
            }
            if ok {
                levels.push(n);
                continue 'outer;
            }
        }
        break;
    }
    Ok((levels.len() >= 2).then_some(levels))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathThrough<C> {
    /// Level of `v` (even).
    pub level: usize,
    pub v: String,
    pub w: String,
    /// `|y_{n−1}F¹v|`.
    pub into_v: C,
    /// `|vF¹w|`.
    pub out_of_v: C,
    pub p: C,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reroute<C> {
    /// Level of the `y`-vertex the new edges leave from.
    pub level: usize,
    pub src: String,
    pub dst: String,
    pub added: C,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProperificationTrace<C> {
    /// `A_n` for even `n` in the window.
    pub a_sets: BTreeMap<usize, Vec<String>>,
    pub path_counts: Vec<PathThrough<C>>,
    pub reroutes: Vec<Reroute<C>>,
    /// The intermediate diagram (templated when the input is).
    pub b: BratteliDiagram<C>,
    /// Levels of the input materialized to build `B`.
    pub window: usize,
    /// `F` and `B` telescoped along this both give the same diagram.
    pub odd_levels: Subsequence,
    /// `B` telescoped along this is the output.
    pub even_levels: Subsequence,
    /// Vertices of `B` at which `Σ_{e∈B¹w} d(s(e)) = Σ_{e∈F¹w} d(s(e))` was checked.
    pub degree_identities_checked: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Properified<C> {
    pub diagram: BratteliDiagram<C>,
    pub structure: SeparatedStructure<C>,
    pub trace: ProperificationTrace<C>,
}

/// Builds a proper M_k-separated diagram equivalent to `d`.
///
/// `depth` is the verification window of the output: the input is
/// materialized to at least `2·depth` levels. Equivalence through the odd
/// levels, the degree identity at every vertex of `B` and properness of
/// the output are checked before returning.
pub fn properify<C: Count>(
    d: &BratteliDiagram<C>,
    ss: &SeparatedStructure<C>,
    depth: usize,
) -> Result<Properified<C>> {
    if depth < 2 {
        return Err(Error::pre("properify needs depth ≥ 2"));
    }
    let tail_shape = d.tail().map(|t| {
        let p = t.period().lcm(&2);
        (t.start_level + 1, p)
    });
    let window = match tail_shape {
        Some((s_b, p)) => (2 * depth).max(s_b + 2 * p),
        None => 2 * depth,
    };
    let f = d.materialize(window)?;
    let ss = extend_structure(&f, ss, window)?;
    let six = check_property_6prime(&f, &ss, window)?;
    if !six.holds {
        let first = &six.offenders[0];
        return Err(Error::pre(format!("weak strictness fails at {first}")));
    }
    let a_sets: BTreeMap<usize, Vec<String>> = six
        .a_sets
        .iter()
        .filter(|(n, _)| *n % 2 == 0)
        .map(|(n, a)| (*n, a.clone()))
        .collect();
    let removed: BTreeSet<(usize, &str)> = a_sets
        .iter()
        .flat_map(|(n, a)| a.iter().map(move |v| (*n, v.as_str())))
        .collect();

    // B on the window.
    let mut levels = Vec::with_capacity(window);
    for level in f.levels() {
        let vs = level
            .vertices
            .iter()
            .filter(|v| !removed.contains(&(level.index, v.label.as_str())))
            .cloned()
            .collect();
        levels.push(Level::new(level.index, vs));
    }
    let mut matrices: Vec<MultMatrix<C>> = Vec::with_capacity(window - 1);
    for mat in f.matrices() {
        let n = mat.from_level;
        let mut out = MultMatrix::new(n);
        for ((s, t), c) in &mat.entries {
            if !removed.contains(&(n, s.as_str())) && !removed.contains(&(n + 1, t.as_str())) {
                out.set(s.clone(), t.clone(), c.clone());
            }
        }
        matrices.push(out);
    }
    let mut path_counts = Vec::new();
    let mut reroutes = Vec::new();
    for (&n, a) in &a_sets {
        if n + 1 > window {
            continue;
        }
        let targets = ss.h_at(&f, n + 1)?;
        let mut added: BTreeMap<String, C> = BTreeMap::new();
        for v in a {
            let into_v = f.mult(n - 1, ss.y_at(n - 1), v);
            for w in &targets {
                let out_of_v = f.mult(n, v, w);
                if out_of_v.is_zero() {
                    continue;
                }
                let p = into_v.try_mul(&out_of_v)?;
                let e = added.entry(w.clone()).or_insert_with(C::zero);
                *e = e.try_add(&p)?;
                path_counts.push(PathThrough {
                    level: n,
                    v: v.clone(),
                    w: w.clone(),
                    into_v: into_v.clone(),
                    out_of_v,
                    p,
                });
            }
        }
        for (w, c) in added {
            matrices[n - 1].add(ss.y_at(n), &w, &c)?;
            reroutes.push(Reroute {
                level: n,
                src: ss.y_at(n).to_string(),
                dst: w,
                added: c,
            });
        }
    }
    let b_window = BratteliDiagram::new(levels, matrices, None)
        .map_err(|e| Error::Verification(format!("rerouted diagram is invalid: {e}")))?;

    let mut checked = 0;
    for n in 2..=window {
        for w in b_window.level(n)?.labels() {
            let lhs = b_window.incoming_sum(n, w)?;
            let rhs = f.incoming_sum(n, w)?;
            if lhs != rhs {
                return Err(Error::Verification(format!(
                    "degree identity fails at {w:?} (level {n}): B gives {lhs}, F gives {rhs}"
                )));
            }
            checked += 1;
        }
    }

    let b = match (d.tail(), tail_shape) {
        _ if removed.is_empty() => d.clone(),
        (Some(t), Some((s_b, p))) => templated_b(&b_window, t, s_b, p)?,
        _ => b_window.clone(),
    };

    let e = telescope(&b, &Subsequence::evens())?.diagram;
    let witness = check_equivalence_witness(d, &b, &Subsequence::odds(), &Subsequence::odds(), depth)?;
    if !witness.equivalent {
        return Err(Error::Verification("F and B differ after telescoping at odd levels".into()));
    }
    let report = recognize_separated(&e, depth)?
        .ok_or_else(|| Error::Verification("output is not M_k-separated".into()))?;
    if !report.proper || report.structure.k != ss.k {
        return Err(Error::Verification(format!(
            "output is not properly M_{}-separated (proper = {}, k = {})",
            ss.k, report.proper, report.structure.k
        )));
    }
    Ok(Properified {
        diagram: e,
        structure: report.structure,
        trace: ProperificationTrace {
            a_sets,
            path_counts,
            reroutes,
            b,
            window,
            odd_levels: Subsequence::odds(),
            even_levels: Subsequence::evens(),
            degree_identities_checked: checked,
        },
    })
}

/// Re-derives the split on a longer window, insisting it agrees with the
/// one supplied.
fn extend_structure<C: Count>(
    f: &BratteliDiagram<C>,
    ss: &SeparatedStructure<C>,
    window: usize,
) -> Result<SeparatedStructure<C>> {
    if ss.depth() >= window {
        let cut = SeparatedStructure {
            k: ss.k.clone(),
            y: ss.y[..window].to_vec(),
        };
        if let Some(why) = check_separated(f, &cut)? {
            return Err(Error::pre(format!("supplied structure is not separated: {why}")));
        }
        return Ok(cut);
    }
    let report = recognize_separated(f, window)?
        .ok_or_else(|| Error::pre(format!("no separated structure through level {window}")))?;
    let ext = report.structure;
    if ext.k != ss.k || ext.y[..ss.depth()] != ss.y[..] {
        return Err(Error::pre("supplied structure does not extend to the properify window"));
    }
    Ok(ext)
}

/// Reads the periodic part of `B` off its materialized window.
fn templated_b<C: Count>(
    b: &BratteliDiagram<C>,
    f_tail: &TailTemplate<C>,
    s_b: usize,
    period: usize,
) -> Result<BratteliDiagram<C>> {
    let step_at = |level: usize| -> Result<TailStep<C>> {
        let stems_here = f_tail.stem_map(level);
        let stems_prev = f_tail.stem_map(level - 1);
        let stem = |map: &BTreeMap<String, String>, l: &str| {
            map.get(l)
                .cloned()
                .ok_or_else(|| Error::UnstableTail(format!("label {l:?} has no template stem")))
        };
        let mut vertices = Vec::new();
        let mut defects = BTreeMap::new();
        for v in b.level(level)?.labels() {
            let s = stem(&stems_here, v)?;
            let def = b.defect(level, v)?;
            if !def.is_zero() {
                defects.insert(s.clone(), def);
            }
            vertices.push(s);
        }
        let mut entries = BTreeMap::new();
        let mat = b.matrix_from(level - 1).ok_or(Error::UnknownLevel(level))?;
        for ((s, t), c) in &mat.entries {
            entries.insert((stem(&stems_prev, s)?, stem(&stems_here, t)?), c.clone());
        }
        Ok(TailStep {
            vertices,
            entries,
            defects,
        })
    };
    let mut steps = Vec::with_capacity(period);
    for j in 0..period {
        let level = s_b + 1 + j;
        let step = step_at(level)?;
        if step_at(level + period)? != step {
            return Err(Error::UnstableTail(format!(
                "levels {level} and {} of the rerouted diagram differ",
                level + period
            )));
        }
        steps.push(step);
    }
    let prefix = b.materialize(s_b)?;
    let out = BratteliDiagram::new(
        prefix.levels().to_vec(),
        prefix.matrices().to_vec(),
        Some(TailTemplate {
            start_level: s_b,
            steps,
            labels: f_tail.labels,
        }),
    )
    .map_err(|e| Error::UnstableTail(format!("extracted template is invalid: {e}")))?;
    if out.materialize(b.prefix_len())? != *b {
        return Err(Error::UnstableTail("extracted template does not regenerate the window".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fixture_e, fixture_f, fixture_m3};
    use crate::telescope::prefix_isomorphic;

    #[test]
    fn six_prime_on_fixtures() {
        let f = fixture_f::<u64>();
        let ss = recognize_separated(&f, 6).unwrap().unwrap().structure;
        let r = check_property_6prime(&f, &ss, 6).unwrap();
        assert!(r.holds);
        assert_eq!(r.a_sets[&2], vec!["top2".to_string()]);
        let e = fixture_e::<u64>();
        let ss = recognize_separated(&e, 6).unwrap().unwrap().structure;
        let r = check_property_6prime(&e, &ss, 6).unwrap();
        assert!(r.holds && r.a_sets.values().all(Vec::is_empty));
    }

    #[test]
    fn properify_f_gives_e() {
        let f = fixture_f::<u64>();
        let ss = recognize_separated(&f, 4).unwrap().unwrap().structure;
        let out = properify(&f, &ss, 4).unwrap();
        assert!(prefix_isomorphic(&out.diagram, &fixture_e::<u64>(), 4).unwrap().is_some());
        assert!(out.trace.b.tail().is_some());
        assert_eq!(out.trace.a_sets[&2], vec!["top2".to_string()]);
        assert!(out.trace.reroutes.iter().any(|r| r.src == "bot2" && r.dst == "mid3" && r.added == 2));
    }

    #[test]
    fn properify_proper_input_is_a_plain_telescope() {
        let m3 = fixture_m3::<u64>();
        let ss = recognize_separated(&m3, 3).unwrap().unwrap().structure;
        let out = properify(&m3, &ss, 3).unwrap();
        assert_eq!(out.trace.b, m3);
        assert!(out.trace.reroutes.is_empty());
        assert_eq!(out.diagram, telescope(&m3, &Subsequence::evens()).unwrap().diagram);
    }

    #[test]
    fn separate_is_identity_on_m3() {
        let m3 = fixture_m3::<u64>();
        let s = LevelSet::rows(&m3, 6, &["v"]).unwrap();
        let sep = separate(&m3, &s, &3, 6).unwrap();
        assert_eq!(sep.subsequence, vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(sep.diagram, m3.materialize(6).unwrap());
    }
}
