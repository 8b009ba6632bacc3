//! Composite constructions: exact maps of stars and binary trees with small
//! entropy, and graph maps obtained by gluing free ends of pure mixing
//! stages.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{PointOnGraph, Quotient, TopoGraph};
use crate::logval::LogValue;
use crate::plmap::{entropy, EntropyEnclosure, EntropyOptions, MarkovPartition, PLMarkovMap};
use crate::rational::{int, rat, Rational};

use super::basic::{b1_base, tent3, wedge_power};
use super::purify::purify_stage;
use super::surgery::{edge_add, totalize};
use super::{endpoint_cycle, Construction, ConstructionTrace, PeriodicOrbitSpec};

/// Stage of the pure mixing construction used for the glued examples.
pub const QUOTIENT_STAGE: usize = 2;

fn wrap(kind: &str, mut c: Construction, steps: Vec<ConstructionTrace>, eps: &Rational) -> Construction {
    c.trace.kind = kind.into();
    c.trace.epsilon = Some(super::fmt(eps));
    c.trace.steps = steps;
    c
}

/// Exact map of the `n`-star whose endpoints form one cycle, with entropy in
/// `[log 3 / n, log 3 / n + eps)`.
pub fn star_exact(n: usize, eps: &Rational) -> Result<Construction> {
    if n < 2 {
        return Err(Error::domain("star_exact needs n >= 2"));
    }
    let w = wedge_power(&tent3(), &PointOnGraph::Vertex(0), n)?;
    let t = totalize(&w, eps)?;
    let mut c = wrap("star_exact", t, vec![], eps);
    c.trace.notes.push(format!("wedge power {n} of the 3-horseshoe, then totalize"));
    c.root = Some(PointOnGraph::Vertex(0));
    Ok(c)
}

/// Exact map of the binary tree with `2^n` endpoints, all in one cycle, with
/// entropy in `[log 3 / 2^n, log 3 / 2^n + eps)` and a fixed central root.
pub fn binary_exact(n: usize, eps: &Rational) -> Result<Construction> {
    if n == 0 {
        return Err(Error::domain("binary_exact needs n >= 1"));
    }
    if n == 1 {
        let m = b1_base();
        let t = totalize(&m, eps)?;
        let root = t.map.graph().point(0, rat(1, 2))?;
        let mut c = wrap("binary_exact", t, vec![], eps);
        c.root = Some(root);
        return Ok(c);
    }
    let third = eps / int(3);
    let prev = binary_exact(n - 1, &third)?;
    let root = prev.root.clone().expect("binary maps carry their root");
    let grown = edge_add(&prev.map, &root, &third)?;
    let end = grown.root.clone().expect("edge_add returns the new end");
    let doubled = wedge_power(&grown.map, &end, 2)?;
    let t = totalize(&doubled, &third)?;
    let mut c = wrap("binary_exact", t, vec![prev.trace, grown.trace], eps);
    c.root = Some(end);
    Ok(c)
}

/// Identifies each class of vertices of `m`'s graph. Fails unless the
/// identified points have identified images.
pub fn quotient_map(m: &PLMarkovMap, classes: &[Vec<usize>]) -> Result<(PLMarkovMap, Quotient)> {
    let q = m.graph().identify_points(classes)?;
    let p = m.partition();
    let part = MarkovPartition::new(q.graph.clone(), p.interior_cuts())?;
    let mut images: Vec<Option<PointOnGraph>> = vec![None; part.num_points()];
    for i in 0..p.num_points() {
        let x = q.project(p.point(i));
        let y = q.project(p.point(m.point_image(i)));
        let k = part.point_index(&x).expect("projected cut point");
        match &images[k] {
            Some(prev) if *prev != y => {
                return Err(Error::domain(format!(
                    "identified points have different images: {} and {}",
                    part.describe(prev),
                    part.describe(&y)
                )))
            }
            _ => images[k] = Some(y),
        }
    }
    let images = images.into_iter().map(|y| y.expect("every point has a preimage")).collect();
    let map = PLMarkovMap::new(part, images, m.paths().to_vec())?;
    Ok((map, q))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuotientKind {
    Sigma,
    ThetaCandidate,
    Figure8,
    Dumbbell,
}

impl QuotientKind {
    pub const ALL: [QuotientKind; 4] =
        [QuotientKind::Sigma, QuotientKind::ThetaCandidate, QuotientKind::Figure8, QuotientKind::Dumbbell];

    pub fn name(self) -> &'static str {
        match self {
            QuotientKind::Sigma => "sigma",
            QuotientKind::ThetaCandidate => "theta_candidate",
            QuotientKind::Figure8 => "figure8",
            QuotientKind::Dumbbell => "dumbbell",
        }
    }

    /// Entropy the example approaches from above.
    pub fn target(self) -> LogValue {
        match self {
            QuotientKind::Sigma => LogValue::of(3, 2),
            QuotientKind::ThetaCandidate => LogValue::of(3, 3),
            QuotientKind::Figure8 | QuotientKind::Dumbbell => LogValue::of(3, 4),
        }
    }
}

impl fmt::Display for QuotientKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QuotientKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        QuotientKind::ALL
            .into_iter()
            .find(|k| k.name() == s || (s == "theta" && *k == QuotientKind::ThetaCandidate))
            .ok_or_else(|| Error::domain(format!("unknown example {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct QuotientExample {
    pub kind: QuotientKind,
    /// The tree map before gluing.
    pub tree: Construction,
    pub graph: TopoGraph,
    pub map: PLMarkovMap,
    pub entropy: EntropyEnclosure,
    /// The glued free ends, an inaccessible cycle in the limit map.
    pub inaccessible: Vec<PointOnGraph>,
    /// Classes of tree vertices that were glued.
    pub classes: Vec<Vec<usize>>,
}

/// Builds the tree example, takes a pure mixing stage and glues its free
/// ends into the target graph.
pub fn quotient_example(kind: QuotientKind, eps: &Rational) -> Result<QuotientExample> {
    let (base, part_eps, steps) = match kind {
        QuotientKind::Sigma => {
            let third = eps / int(3);
            let t = totalize(&b1_base(), &third)?;
            let half = t.map.graph().point(0, rat(1, 2))?;
            let grown = edge_add(&t.map, &half, &third)?;
            let steps = vec![t.trace.clone(), grown.trace.clone()];
            (grown, third, steps)
        }
        QuotientKind::ThetaCandidate | QuotientKind::Figure8 => {
            let n = if kind == QuotientKind::Figure8 { 4 } else { 3 };
            let half = eps / int(2);
            let s = star_exact(n, &half)?;
            let steps = vec![s.trace.clone()];
            (s, half, steps)
        }
        QuotientKind::Dumbbell => {
            let half = eps / int(2);
            let b = binary_exact(2, &half)?;
            let steps = vec![b.trace.clone()];
            (b, half, steps)
        }
    };
    let cycle = endpoint_cycle(&base.map).ok_or_else(|| Error::domain("no endpoint cycle"))?;
    let orbit = PeriodicOrbitSpec::new(&base.map, cycle)?;
    let stage = purify_stage(&base.map, &orbit, &part_eps, QUOTIENT_STAGE)?;
    let ends: Vec<usize> = stage
        .endpoint_cycle
        .iter()
        .map(|x| match x {
            PointOnGraph::Vertex(v) => *v,
            PointOnGraph::Interior { .. } => unreachable!(),
        })
        .collect();
    let classes: Vec<Vec<usize>> = match kind {
        QuotientKind::Sigma | QuotientKind::ThetaCandidate => vec![ends.clone()],
        QuotientKind::Figure8 | QuotientKind::Dumbbell => vec![vec![ends[0], ends[2]], vec![ends[1], ends[3]]],
    };
    let (map, q) = quotient_map(&stage.map, &classes)?;
    let e = entropy(&map, &EntropyOptions::default());
    let mut inaccessible: Vec<PointOnGraph> = classes.iter().map(|c| q.project(&PointOnGraph::Vertex(c[0]))).collect();
    inaccessible.dedup();
    let mut tree = stage;
    let mut steps = steps;
    steps.push(tree.trace.clone());
    tree.trace = ConstructionTrace {
        kind: kind.name().into(),
        epsilon: Some(super::fmt(eps)),
        steps,
        ..tree.trace.clone()
    };
    Ok(QuotientExample { kind, tree, graph: q.graph.clone(), map, entropy: e, inaccessible, classes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{catalog, disconnection_number};
    use crate::plmap::classify;

    #[test]
    fn two_star() {
        let eps = rat(1, 10);
        let c = star_exact(2, &eps).unwrap();
        assert!(classify(&c.map).exact);
        assert!(c.entropy.lower >= LogValue::of(3, 2));
        assert!(c.entropy.upper.lt_plus(&LogValue::of(3, 2), &eps));
    }

    #[test]
    fn binary_one_keeps_root() {
        let c = binary_exact(1, &rat(1, 10)).unwrap();
        let root = c.root.clone().unwrap();
        assert_eq!(c.map.evaluate(&root), root);
        assert_eq!(c.endpoint_cycle.len(), 2);
    }

    #[test]
    fn sigma_quotient() {
        let eps = rat(1, 10);
        let ex = quotient_example(QuotientKind::Sigma, &eps).unwrap();
        assert_eq!(ex.graph.euler_characteristic(), 0);
        assert_eq!(disconnection_number(&ex.graph), disconnection_number(&catalog::sigma()));
        assert!(ex.entropy.upper.lt_plus(&LogValue::of(3, 2), &eps));
        assert_eq!(ex.inaccessible.len(), 1);
        assert_eq!(ex.map.evaluate(&ex.inaccessible[0]), ex.inaccessible[0]);
    }
}
