//! Hand-transcribed example diagrams and graphs.
//!
//! Row naming: the three-row diagrams use `top`, `mid` and `bot`; the
//! bottom row is always the constant-degree row outside the ideal. In the
//! M₃ diagram `v` is the ideal row and `y` the degree-3 row.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::MultGraph;
use crate::ktheory::K0Vector;
use crate::model::{tail_step, BratteliDiagram, DiagramBuilder, LabelRule, TailTemplate};
use crate::num::{Coeff, Count};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FixtureName {
    F,
    A,
    B,
    E,
    M3,
    Corner32,
}

impl FixtureName {
    pub const ALL: [FixtureName; 6] = [
        FixtureName::F,
        FixtureName::A,
        FixtureName::B,
        FixtureName::E,
        FixtureName::M3,
        FixtureName::Corner32,
    ];

    pub const DIAGRAMS: [FixtureName; 5] = [
        FixtureName::F,
        FixtureName::A,
        FixtureName::B,
        FixtureName::E,
        FixtureName::M3,
    ];
}

impl fmt::Display for FixtureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FixtureName::F => "F",
            FixtureName::A => "A",
            FixtureName::B => "B",
            FixtureName::E => "E",
            FixtureName::M3 => "M3",
            FixtureName::Corner32 => "corner32",
        };
        f.write_str(s)
    }
}

impl FromStr for FixtureName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "F" | "f" => Ok(FixtureName::F),
            "A" | "a" => Ok(FixtureName::A),
            "B" | "b" => Ok(FixtureName::B),
            "E" | "e" => Ok(FixtureName::E),
            "M3" | "m3" => Ok(FixtureName::M3),
            "corner32" | "Corner32" => Ok(FixtureName::Corner32),
            other => Err(Error::pre(format!("unknown fixture {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fixture<C, Z> {
    Diagram(BratteliDiagram<C>),
    Graph { graph: MultGraph<C>, vector: K0Vector<Z> },
}

pub fn fixture<C: Count, Z: Coeff>(name: FixtureName) -> Fixture<C, Z> {
    match name {
        FixtureName::F => Fixture::Diagram(fixture_f()),
        FixtureName::A => Fixture::Diagram(fixture_a()),
        FixtureName::B => Fixture::Diagram(fixture_b()),
        FixtureName::E => Fixture::Diagram(fixture_e()),
        FixtureName::M3 => Fixture::Diagram(fixture_m3()),
        FixtureName::Corner32 => {
            let (graph, vector) = corner32();
            Fixture::Graph { graph, vector }
        }
    }
}

fn c<C: Count>(n: u64) -> C {
    C::from_u64(n).expect("fixture constants fit every count type")
}

fn one_level<C: Count>(rows: &[(&str, u64)]) -> DiagramBuilder<C> {
    DiagramBuilder::new().level(rows.iter().map(|(s, d)| (format!("{s}1"), c::<C>(*d))))
}

fn period_one<C: Count>(step: crate::model::TailStep<C>) -> TailTemplate<C> {
    TailTemplate {
        start_level: 1,
        steps: vec![step],
        labels: LabelRule::default(),
    }
}

/// Three rows: `top` with degrees 1, 2, 2, …; `mid` with 1, 4, 8, 12, …
/// (`4(n−1)` from level 2); `bot` constantly 1. Edges per level:
/// top→mid 1, mid→mid 1, bot→top 2, bot→mid 1, bot→bot 1. Defects: mid 1,
/// top and bot 0. The top-row vertices are fed entirely by the bottom row.
pub fn fixture_f<C: Count>() -> BratteliDiagram<C> {
    one_level(&[("top", 1), ("mid", 1), ("bot", 1)])
        .build_with_tail(period_one(tail_step(
            &["top", "mid", "bot"],
            &[
                ("top", "mid", c(1)),
                ("mid", "mid", c(1)),
                ("bot", "top", c(2)),
                ("bot", "mid", c(1)),
                ("bot", "bot", c(1)),
            ],
            &[("mid", c(1))],
        )))
        .expect("fixture F is valid")
}

/// The odd-level telescope of F as drawn: `mid` degrees 1, 8, 16, 24, …
/// (`8(n−1)`), `top` 1, 2, 2, …, `bot` 1. Edges: top→mid 1, mid→mid 1,
/// bot→top 2, bot→mid 4, bot→bot 1; defect 2 on `mid`. Tests treat the
/// computed telescope as authoritative and compare against this.
pub fn fixture_a<C: Count>() -> BratteliDiagram<C> {
    one_level(&[("top", 1), ("mid", 1), ("bot", 1)])
        .build_with_tail(period_one(tail_step(
            &["top", "mid", "bot"],
            &[
                ("top", "mid", c(1)),
                ("mid", "mid", c(1)),
                ("bot", "top", c(2)),
                ("bot", "mid", c(4)),
                ("bot", "bot", c(1)),
            ],
            &[("mid", c(2))],
        )))
        .expect("fixture A is valid")
}

/// F with the top-row vertex removed at every even level and its paths
/// rerouted through the bottom row. Odd levels keep all three rows; even
/// levels have only `mid` and `bot`. Odd→even edges are F's; even→odd
/// edges are bot→top 2, bot→mid 1+2 = 3, mid→mid 1, bot→bot 1.
pub fn fixture_b<C: Count>() -> BratteliDiagram<C> {
    DiagramBuilder::new()
        .level([("top1", c::<C>(1)), ("mid1", c(1)), ("bot1", c(1))])
        .level([("mid2", c::<C>(4)), ("bot2", c(1))])
        .edge("top1", "mid2", c(1))
        .edge("mid1", "mid2", c(1))
        .edge("bot1", "mid2", c(1))
        .edge("bot1", "bot2", c(1))
        .build_with_tail(TailTemplate {
            start_level: 2,
            steps: vec![
                // even → odd
                tail_step(
                    &["top", "mid", "bot"],
                    &[
                        ("mid", "mid", c(1)),
                        ("bot", "top", c(2)),
                        ("bot", "mid", c(3)),
                        ("bot", "bot", c(1)),
                    ],
                    &[("mid", c(1))],
                ),
                // odd → even
                tail_step(
                    &["mid", "bot"],
                    &[
                        ("top", "mid", c(1)),
                        ("mid", "mid", c(1)),
                        ("bot", "mid", c(1)),
                        ("bot", "bot", c(1)),
                    ],
                    &[("mid", c(1))],
                ),
            ],
            labels: LabelRule::default(),
        })
        .expect("fixture B is valid")
}

/// Two rows: `top` with degrees 4, 12, 20, … (`4 + 8(n−1)`), `bot`
/// constantly 1. Edges: top→top 1, bot→top 6, bot→bot 1; defect 2 on top.
pub fn fixture_e<C: Count>() -> BratteliDiagram<C> {
    one_level(&[("top", 4), ("bot", 1)])
        .build_with_tail(period_one(tail_step(
            &["top", "bot"],
            &[("top", "top", c(1)), ("bot", "top", c(6)), ("bot", "bot", c(1))],
            &[("top", c(2))],
        )))
        .expect("fixture E is valid")
}

/// The proper M₃-separated diagram: `v` row 4, 24, 43, 64, then `20n+4`;
/// `y` row constantly 3. Edges: v→v 1, y→y 1, y→v 6 (from level 2 on).
/// Defects on `v`: 4, 2, 1, 3, then 2 forever.
pub fn fixture_m3<C: Count>() -> BratteliDiagram<C> {
    let mut b = DiagramBuilder::new().level([("v1", c::<C>(4)), ("y1", c(3))]);
    for (n, deg) in [(2, 24), (3, 43), (4, 64)] {
        let (vp, yp) = (format!("v{}", n - 1), format!("y{}", n - 1));
        let (v, y) = (format!("v{n}"), format!("y{n}"));
        b = b
            .level([(v.clone(), c::<C>(deg)), (y.clone(), c(3))])
            .edge(&vp, &v, c(1))
            .edge(&yp, &y, c(1))
            .edge(&yp, &v, c(6));
    }
    b.build_with_tail(TailTemplate {
        start_level: 4,
        steps: vec![tail_step(
            &["v", "y"],
            &[("v", "v", c(1)), ("y", "y", c(1)), ("y", "v", c(6))],
            &[("v", c(2))],
        )],
        labels: LabelRule::default(),
    })
    .expect("fixture M3 is valid")
}

/// The amplified graph v→w with the K₀ class (3, 2).
pub fn corner32<C: Count, Z: Coeff>() -> (MultGraph<C>, K0Vector<Z>) {
    let g = MultGraph::amplified(&["v", "w"], &[("v", "w")]).expect("fixture graph is valid");
    let x = K0Vector::from_pairs([("v", 3), ("w", 2)]);
    (g, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(d: &BratteliDiagram<u64>, stem: &str, depth: usize) -> Vec<u64> {
        let m = d.materialize(depth).unwrap();
        (1..=depth)
            .filter_map(|n| m.degree(n, &format!("{stem}{n}")).ok().copied())
            .collect()
    }

    #[test]
    fn m3_rows() {
        let d = fixture_m3::<u64>();
        assert_eq!(row(&d, "v", 8), vec![4, 24, 43, 64, 84, 104, 124, 144]);
        assert_eq!(row(&d, "y", 5), vec![3; 5]);
        let defects: Vec<u64> = (1..=5).map(|n| d.defect(n, &format!("v{n}")).unwrap()).collect();
        assert_eq!(defects, vec![4, 2, 1, 3, 2]);
    }

    #[test]
    fn f_rows() {
        let d = fixture_f::<u64>();
        assert_eq!(row(&d, "mid", 5), vec![1, 4, 8, 12, 16]);
        assert_eq!(row(&d, "top", 4), vec![1, 2, 2, 2]);
        let m = d.materialize(4).unwrap();
        assert!(m.levels().iter().all(|l| l.len() == 3));
    }

    #[test]
    fn e_rows() {
        let d = fixture_e::<u64>();
        assert_eq!(row(&d, "top", 5), vec![4, 12, 20, 28, 36]);
        let m = d.materialize(5).unwrap();
        for n in 1..5 {
            assert_eq!(m.mult(n, &format!("bot{n}"), &format!("top{}", n + 1)), 6);
        }
    }

    #[test]
    fn b_level_shapes_alternate() {
        let m = fixture_b::<u64>().materialize(6).unwrap();
        let sizes: Vec<usize> = m.levels().iter().map(|l| l.len()).collect();
        assert_eq!(sizes, vec![3, 2, 3, 2, 3, 2]);
        assert_eq!(m.degree(4, "mid4").unwrap(), &12);
    }

    #[test]
    fn names_roundtrip() {
        for n in FixtureName::ALL {
            assert_eq!(n.to_string().parse::<FixtureName>().unwrap(), n);
        }
        assert!("Z".parse::<FixtureName>().is_err());
    }
}
