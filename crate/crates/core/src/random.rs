//! Seeded random diagrams.
//!
//! The generator is ChaCha8 seeded with `seed_from_u64`; for a fixed seed
//! and parameters the output never changes. Vertices are labelled
//! `L{level}_{i}`; in separated mode the `y`-row vertex is `L{level}_y`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{BratteliDiagram, Level, MultMatrix, Vertex};
use crate::num::Count;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomParams {
    pub levels: usize,
    pub max_width: usize,
    pub max_mult: u64,
    /// Every degree ≥ 2 and every defect ≥ 1.
    pub strict: bool,
    /// Produce a proper M_k-separated diagram with this `k`.
    pub separated: Option<u64>,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            levels: 6,
            max_width: 4,
            max_mult: 3,
            strict: false,
            separated: None,
        }
    }
}

fn c<C: Count>(n: u64) -> Result<C> {
    C::from_u64(n).ok_or(Error::Overflow)
}

fn check(p: &RandomParams) -> Result<()> {
    if p.levels == 0 || p.max_width == 0 || p.max_mult == 0 {
        return Err(Error::pre("levels, max_width and max_mult must be positive"));
    }
    if let Some(k) = p.separated {
        if k == 0 {
            return Err(Error::pre("separated k must be positive"));
        }
        if p.max_width < 2 {
            return Err(Error::pre("separated diagrams need max_width ≥ 2"));
        }
        if p.strict {
            return Err(Error::pre("the y-row of a separated diagram has zero defect; strict is unsatisfiable"));
        }
    }
    Ok(())
}

pub fn random_diagram<C: Count>(seed: u64, p: &RandomParams) -> Result<BratteliDiagram<C>> {
    check(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h_max = if p.separated.is_some() { p.max_width - 1 } else { p.max_width };
    let (defect_lo, degree_lo) = match (p.strict, p.separated.is_some()) {
        (true, _) => (1u64, 2u64),
        (false, true) => (1, 1),
        (false, false) => (0, 1),
    };
    let mut levels: Vec<Level<C>> = Vec::with_capacity(p.levels);
    let mut matrices = Vec::with_capacity(p.levels.saturating_sub(1));
    for n in 1..=p.levels {
        let width = rng.gen_range(1..=h_max);
        let labels: Vec<String> = (0..width).map(|i| format!("L{n}_{i}")).collect();
        let y = format!("L{n}_y");
        let mut incoming: Vec<C> = vec![C::zero(); width];
        if let Some(prev) = levels.last() {
            let mut mat = MultMatrix::new(n - 1);
            let prev_y = format!("L{}_y", n - 1);
            for u in &prev.vertices {
                let is_y = p.separated.is_some() && u.label == prev_y;
                let fanout = rng.gen_range(1..=width);
                let mut targets = sample(&mut rng, width, fanout).into_vec();
                targets.sort_unstable();
                for t in targets {
                    let mult: C = c(rng.gen_range(1..=p.max_mult))?;
                    incoming[t] = incoming[t].try_add(&mult.try_mul(&u.degree)?)?;
                    mat.set(u.label.clone(), labels[t].clone(), mult);
                }
                if is_y {
                    mat.set(u.label.clone(), y.clone(), C::one());
                }
            }
            matrices.push(mat);
        }
        let mut vertices = Vec::with_capacity(width + 1);
        for (label, inc) in labels.into_iter().zip(incoming) {
            let mut defect = rng.gen_range(defect_lo..=2);
            let floor: C = c(degree_lo)?;
            let mut degree = inc.try_add(&c(defect)?)?;
            while degree < floor {
                defect += 1;
                degree = inc.try_add(&c(defect)?)?;
            }
            vertices.push(Vertex::new(label, degree));
        }
        if let Some(k) = p.separated {
            vertices.push(Vertex::new(y, c(k)?));
        }
        levels.push(Level::new(n, vertices));
    }
    BratteliDiagram::new(levels, matrices, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_diagrams_have_positive_defects() {
        let p = RandomParams {
            strict: true,
            ..RandomParams::default()
        };
        let d = random_diagram::<u64>(1, &p).unwrap();
        for l in d.levels() {
            for v in &l.vertices {
                assert!(v.degree >= 2);
                assert!(d.defect(l.index, &v.label).unwrap() >= 1);
            }
        }
        assert_eq!(random_diagram::<u64>(1, &p).unwrap(), d);
    }

    #[test]
    fn unsatisfiable_parameters() {
        let p = RandomParams {
            max_width: 0,
            ..RandomParams::default()
        };
        assert!(random_diagram::<u64>(1, &p).is_err());
    }
}
