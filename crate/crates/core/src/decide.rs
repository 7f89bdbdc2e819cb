//! Bounded-depth classification and automatic realization.
//!
//! The classifier is one-sided: it reports a realizable verdict only when
//! one of the constructive cases applies through the requested depth, and
//! `Unknown` otherwise. It never asserts that a diagram is not realizable.

use std::fmt;

use crate::error::{Error, Result};
use crate::ideals::{is_unital, recognize_separated, SeparatedReport, UnitalReport, UnitalStatus};
use crate::model::{BratteliDiagram, VertexRef};
use crate::num::Count;
use crate::realize::{realize_separated, realize_strict, verify_realization, RealizationCertificate, RealizedGraph};
use crate::separation::{check_property_6prime, find_6prime_telescope, properify, SixPrimeReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// Proper M_k-separated, possibly after properification.
    RealizableSeparated,
    /// Every degree ≥ 2 and every defect ≥ 1.
    RealizableStrict,
    /// A unital witness was found; no constructive case covers it.
    UnitalOutOfScope,
    Unknown,
}

impl Verdict {
    pub fn is_realizable(self) -> bool {
        matches!(self, Verdict::RealizableSeparated | Verdict::RealizableStrict)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::RealizableSeparated => "realizable-separated",
            Verdict::RealizableStrict => "realizable-strict",
            Verdict::UnitalOutOfScope => "unital-out-of-scope",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrictStatus {
    pub holds: bool,
    /// First vertex, in level order, breaking a strict-form condition.
    pub offender: Option<(VertexRef, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationReport<C> {
    pub depth: usize,
    pub unital: UnitalReport,
    pub strict: StrictStatus,
    pub separated: Option<SeparatedReport<C>>,
    pub six_prime: Option<SixPrimeReport>,
    pub proper: bool,
    pub verdict: Verdict,
    pub evidence: Vec<String>,
}

pub fn strict_status<C: Count>(d: &BratteliDiagram<C>, depth: usize) -> Result<StrictStatus> {
    let m = d.materialize(depth)?;
    let two = C::one() + C::one();
    for level in m.levels() {
        for v in &level.vertices {
            let why = if v.degree < two {
                Some(format!("degree {} < 2", v.degree))
            } else if m.defect(level.index, &v.label)?.is_zero() {
                Some("defect 0".to_string())
            } else {
                None
            };
            if let Some(why) = why {
                return Ok(StrictStatus {
                    holds: false,
                    offender: Some((VertexRef::new(level.index, v.label.clone()), why)),
                });
            }
        }
    }
    Ok(StrictStatus {
        holds: true,
        offender: None,
    })
}

/// Classifies `d` through `depth ≥ 2` levels.
pub fn classify<C: Count>(d: &BratteliDiagram<C>, depth: usize) -> Result<ClassificationReport<C>> {
    if depth < 2 {
        return Err(Error::pre("classification needs depth ≥ 2"));
    }
    let mut evidence = Vec::new();
    let unital = is_unital(d, depth)?;
    let strict = strict_status(d, depth)?;
    let separated = recognize_separated(d, depth)?;
    let mut six_prime = None;
    let mut proper = false;
    let mut verdict = Verdict::Unknown;

    if unital.status == UnitalStatus::UnitalWitnessed {
        evidence.push(format!("every vertex through level {depth} has a full-sum descendant"));
        verdict = Verdict::UnitalOutOfScope;
    } else {
        evidence.push(format!(
            "{} has no full-sum descendant through level {depth}",
            unital.unwitnessed[0]
        ));
    }

    match &strict.offender {
        None => {
            evidence.push("every degree is at least 2 and every defect at least 1".into());
            if verdict == Verdict::Unknown {
                verdict = Verdict::RealizableStrict;
            }
        }
        Some((v, why)) => evidence.push(format!("strict form fails at {v}: {why}")),
    }

    match &separated {
        None => evidence.push(format!("no M_k-separated structure through level {depth}")),
        Some(rep) => {
            let k = &rep.structure.k;
            proper = rep.proper;
            evidence.push(format!("M_{k}-separated with y-row starting at {}", rep.structure.y[0]));
            if proper {
                evidence.push("every vertex of H has positive defect".into());
                if verdict == Verdict::Unknown {
                    verdict = Verdict::RealizableSeparated;
                }
            } else {
                evidence.push(format!("not proper: {} has zero defect", rep.defect_zero[0]));
                let six = check_property_6prime(d, &rep.structure, depth)?;
                if six.holds {
                    evidence.push("weak strictness holds".into());
                    if verdict == Verdict::Unknown {
                        match properify(d, &rep.structure, depth) {
                            Ok(_) => {
                                evidence.push("properification succeeded".into());
                                verdict = Verdict::RealizableSeparated;
                            }
                            Err(e) => evidence.push(format!("properification failed: {e}")),
                        }
                    }
                } else {
                    evidence.push(format!("weak strictness fails at {}", six.offenders[0]));
                    if let Some(levels) = find_6prime_telescope(d, &rep.structure, depth)? {
                        evidence.push(format!("telescoping along levels {levels:?} would give weak strictness"));
                    }
                }
                six_prime = Some(six);
            }
        }
    }

    Ok(ClassificationReport {
        depth,
        unital,
        strict,
        separated,
        six_prime,
        proper,
        verdict,
        evidence,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutoRealization<C> {
    pub report: ClassificationReport<C>,
    /// The diagram actually realized: the input, or its properification.
    pub source: BratteliDiagram<C>,
    pub graph: RealizedGraph<C>,
    pub certificate: RealizationCertificate,
}

/// Classifies, dispatches to the applicable construction and verifies the
/// result against the diagram it was built from.
pub fn realize_auto<C: Count>(d: &BratteliDiagram<C>, depth: usize) -> Result<AutoRealization<C>> {
    let report = classify(d, depth)?;
    let (source, graph) = match report.verdict {
        Verdict::RealizableStrict => (d.clone(), realize_strict(d, depth)?),
        Verdict::RealizableSeparated => {
            let rep = report.separated.as_ref().expect("separated verdict carries a structure");
            if rep.proper {
                (d.clone(), realize_separated(d, &rep.structure, depth)?)
            } else {
                let p = properify(d, &rep.structure, depth)?;
                let g = realize_separated(&p.diagram, &p.structure, depth)?;
                (p.diagram, g)
            }
        }
        v => return Err(Error::pre(format!("verdict {v}: no constructive case applies"))),
    };
    let certificate = verify_realization(&graph, &source, depth)?;
    if !certificate.pass {
        let c = certificate.first_failure().expect("failing certificate has a failure");
        return Err(Error::Verification(format!(
            "level {}: {:?} expected {}, got {}",
            c.level, c.kind, c.expected, c.actual
        )));
    }
    Ok(AutoRealization {
        report,
        source,
        graph,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{fixture_f, fixture_m3};
    use crate::model::{tail_step, DiagramBuilder, LabelRule, TailTemplate};

    #[test]
    fn fixture_verdicts() {
        assert_eq!(classify(&fixture_m3::<u64>(), 5).unwrap().verdict, Verdict::RealizableSeparated);
        let f = classify(&fixture_f::<u64>(), 4).unwrap();
        assert_eq!(f.verdict, Verdict::RealizableSeparated);
        assert!(!f.proper);
    }

    #[test]
    fn constant_chain_is_unital() {
        let d = DiagramBuilder::<u64>::new()
            .level([("a1", 3)])
            .build_with_tail(TailTemplate {
                start_level: 1,
                steps: vec![tail_step(&["a"], &[("a", "a", 1)], &[])],
                labels: LabelRule::default(),
            })
            .unwrap();
        let r = classify(&d, 4).unwrap();
        assert_eq!(r.verdict, Verdict::UnitalOutOfScope);
        assert!(realize_auto(&d, 4).is_err());
    }

    #[test]
    fn auto_realization_of_f_uses_the_properified_form() {
        let a = realize_auto(&fixture_f::<u64>(), 4).unwrap();
        assert!(a.certificate.pass);
        assert_ne!(a.source, fixture_f());
    }
}
