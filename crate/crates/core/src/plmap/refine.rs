//! Refining the partition of a map and building its iterates.

use std::collections::BTreeSet;

use num_traits::Zero;

use super::{Dir, MarkovPartition, PLMarkovMap, Step};
use crate::error::{Error, Result};
use crate::graph::PointOnGraph;
use crate::rational::Rational;

impl PLMarkovMap {
    /// The same map on a finer partition. The added points together with the
    /// old ones must be carried into themselves.
    pub fn refine(&self, extra: &[PointOnGraph]) -> Result<PLMarkovMap> {
        let old = self.partition();
        let mut cuts = old.interior_cuts();
        let mut seen: BTreeSet<PointOnGraph> = old.points().iter().cloned().collect();
        for x in extra {
            if let PointOnGraph::Interior { edge, offset } = x {
                if seen.insert(x.clone()) {
                    cuts.push((*edge, offset.clone(), None));
                }
            }
        }
        let part = MarkovPartition::new(old.graph().clone(), cuts)?;
        let mut images = Vec::with_capacity(part.num_points());
        for x in part.points() {
            let y = self.evaluate(x);
            if part.point_index(&y).is_none() {
                return Err(Error::domain(format!(
                    "refinement is not invariant: {} maps to {}",
                    part.describe(x),
                    part.describe(&y)
                )));
            }
            images.push(y);
        }
        // New intervals making up each old one.
        let pieces: Vec<Vec<usize>> = old
            .intervals()
            .iter()
            .map(|b| {
                part.edge_intervals(b.edge)
                    .filter(|&k| part.interval(k).lo >= b.lo && part.interval(k).hi <= b.hi)
                    .collect()
            })
            .collect();
        let mut paths = vec![Vec::new(); part.num_intervals()];
        for (i, b) in old.intervals().iter().enumerate() {
            let mut fine: Vec<Step> = Vec::new();
            for st in self.path(i) {
                let ps = &pieces[st.interval];
                match st.dir {
                    Dir::Forward => fine.extend(ps.iter().map(|&k| Step::new(k, Dir::Forward))),
                    Dir::Backward => fine.extend(ps.iter().rev().map(|&k| Step::new(k, Dir::Backward))),
                }
            }
            let mut starts = Vec::with_capacity(fine.len() + 1);
            let mut acc = Rational::zero();
            for st in &fine {
                starts.push(acc.clone());
                acc += part.interval(st.interval).length();
            }
            starts.push(acc);
            let alpha = self.slope(i);
            for &k in &pieces[i] {
                let sub = part.interval(k);
                let sa = (&sub.lo - &b.lo) * &alpha;
                let sb = (&sub.hi - &b.lo) * &alpha;
                let from = starts.binary_search(&sa).map_err(|_| Error::domain("refinement misaligned"))?;
                let to = starts.binary_search(&sb).map_err(|_| Error::domain("refinement misaligned"))?;
                paths[k] = fine[from..to].to_vec();
            }
        }
        PLMarkovMap::new(part, images, paths)
    }

    /// Preimages of the given cut points, over all basic intervals.
    pub fn preimages(&self, targets: &[PointOnGraph]) -> Vec<PointOnGraph> {
        let p = self.partition();
        let mut out = BTreeSet::new();
        for i in 0..p.num_intervals() {
            let b = p.interval(i);
            let alpha = self.slope(i);
            for (k, st) in self.path(i).iter().enumerate() {
                let j = p.interval(st.interval);
                for y in targets {
                    let e = p.graph().edge(j.edge);
                    let offs: Vec<Rational> = match y {
                        PointOnGraph::Interior { edge, offset } if *edge == j.edge && j.contains_offset(offset) => {
                            vec![offset.clone()]
                        }
                        PointOnGraph::Interior { .. } => continue,
                        PointOnGraph::Vertex(v) => {
                            let mut o = Vec::new();
                            if e.ends.0 == *v && j.lo.is_zero() {
                                o.push(Rational::zero());
                            }
                            if e.ends.1 == *v && j.hi == e.length {
                                o.push(j.hi.clone());
                            }
                            o
                        }
                    };
                    for off in offs {
                        let u = match st.dir {
                            Dir::Forward => &off - &j.lo,
                            Dir::Backward => &j.hi - &off,
                        };
                        let s = &self.step_offsets(i)[k] + u;
                        let x = &b.lo + s / &alpha;
                        out.insert(p.point_in(i, x));
                    }
                }
            }
        }
        out.into_iter().collect()
    }
}

/// `f^k` as a Markov map on the partition refined by the preimages of the
/// cut points up to order `k - 1`.
pub fn iterate(m: &PLMarkovMap, k: usize) -> Result<PLMarkovMap> {
    if k == 0 {
        return Err(Error::domain("iterate needs k >= 1"));
    }
    let mut q: BTreeSet<PointOnGraph> = m.partition().points().iter().cloned().collect();
    for _ in 1..k {
        let pts: Vec<PointOnGraph> = q.iter().cloned().collect();
        q.extend(m.preimages(&pts));
    }
    let extra: Vec<PointOnGraph> = q.into_iter().collect();
    let r = m.refine(&extra)?;
    let p = r.partition().clone();
    let images: Vec<PointOnGraph> = (0..p.num_points())
        .map(|i| {
            let mut j = i;
            for _ in 0..k {
                j = r.point_image(j);
            }
            p.point(j).clone()
        })
        .collect();
    let paths = (0..p.num_intervals())
        .map(|i| {
            let mut seq = vec![Step::new(i, Dir::Forward)];
            for _ in 0..k {
                let mut next = Vec::new();
                for st in seq {
                    match st.dir {
                        Dir::Forward => next.extend_from_slice(r.path(st.interval)),
                        Dir::Backward => next.extend(r.path(st.interval).iter().rev().map(|s| s.reversed())),
                    }
                }
                seq = next;
            }
            seq
        })
        .collect();
    PLMarkovMap::new(p, images, paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plmap::tests::tent3;
    use crate::plmap::{entropy, EntropyOptions};
    use crate::logval::LogValue;
    use crate::rational::rat;

    #[test]
    fn second_iterate_of_tent() {
        let m = tent3();
        let m2 = iterate(&m, 2).unwrap();
        assert_eq!(m2.num_intervals(), 9);
        let e = entropy(&m2, &EntropyOptions::default());
        assert_eq!(e.lower, LogValue::of(9, 1));
        let x = m.graph().point(0, rat(2, 7)).unwrap();
        assert_eq!(m2.evaluate(&x), m.evaluate_n(&x, 2));
    }
}
