//! Affine branches and exact periodic points.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{Dir, Location, PLMarkovMap};
use crate::error::{Error, Result};
use crate::graph::PointOnGraph;
use crate::rational::Rational;

/// `x -> slope * x + shift` between edge offsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine {
    pub slope: Rational,
    pub shift: Rational,
}

impl Affine {
    pub fn identity() -> Self {
        Affine { slope: Rational::one(), shift: Rational::zero() }
    }

    pub fn apply(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.shift
    }

    /// `self` after `first`.
    pub fn after(&self, first: &Affine) -> Affine {
        Affine { slope: &self.slope * &first.slope, shift: &self.slope * &first.shift + &self.shift }
    }

    pub fn inverse(&self) -> Affine {
        let inv = self.slope.recip();
        Affine { shift: -(&self.shift * &inv), slope: inv }
    }
}

impl PLMarkovMap {
    /// Branch of the map from basic interval `i` onto the `k`-th interval of
    /// its image path, in edge offsets, with its domain `[lo, hi]` in `i`.
    pub fn branch(&self, i: usize, k: usize) -> (Affine, Rational, Rational) {
        let p = self.partition();
        let src = p.interval(i);
        let step = self.path(i)[k];
        let dst = p.interval(step.interval);
        let alpha = self.slope(i);
        let c = &self.step_offsets(i)[k];
        let lo = &src.lo + c / &alpha;
        let hi = &src.lo + (c + dst.length()) / &alpha;
        // position along the path: s = alpha (x - src.lo); local u = s - c
        let base = &alpha * &src.lo + c;
        let aff = match step.dir {
            Dir::Forward => Affine { slope: alpha.clone(), shift: &dst.lo - &base },
            Dir::Backward => Affine { slope: -alpha.clone(), shift: &dst.hi + &base },
        };
        (aff, lo, hi)
    }

    /// Position of interval `j` on the path of `i`, if it is there.
    pub fn step_index(&self, i: usize, j: usize) -> Option<usize> {
        self.path(i).iter().position(|s| s.interval == j)
    }

    /// Composed branch along a walk `i_0 -> i_1 -> ... -> i_n` in the Markov
    /// graph, with the subinterval of `i_0` following it. `None` if some
    /// consecutive pair is not an arc.
    pub fn walk_branch(&self, walk: &[usize]) -> Option<(Affine, Rational, Rational)> {
        let first = self.partition().interval(walk[0]);
        let mut total = Affine::identity();
        let mut lo = first.lo.clone();
        let mut hi = first.hi.clone();
        for w in walk.windows(2) {
            let k = self.step_index(w[0], w[1])?;
            let (b, blo, bhi) = self.branch(w[0], k);
            // Pull the branch domain back to i_0 and intersect.
            let inv = total.inverse();
            let (mut a, mut c) = (inv.apply(&blo), inv.apply(&bhi));
            if a > c {
                std::mem::swap(&mut a, &mut c);
            }
            if a > lo {
                lo = a;
            }
            if c < hi {
                hi = c;
            }
            total = b.after(&total);
        }
        Some((total, lo, hi))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicPoint {
    pub point: PointOnGraph,
    /// Basic intervals visited by `x, f(x), ..., f^(n-1)(x)`; empty for cut
    /// points.
    pub itinerary: Vec<usize>,
    /// The closed walk carries a whole segment of periodic points; this is
    /// its midpoint.
    pub non_unique: bool,
}

/// Fixed point of the closed walk `itinerary + [itinerary[0]]`, if any.
pub(crate) fn solve_closed_walk(m: &PLMarkovMap, itinerary: &[usize]) -> Option<(Rational, bool)> {
    let mut walk = itinerary.to_vec();
    walk.push(itinerary[0]);
    let (g, lo, hi) = m.walk_branch(&walk)?;
    if lo > hi {
        return None;
    }
    let one = Rational::one();
    if g.slope == one {
        return g.shift.is_zero().then(|| ((&lo + &hi) / Rational::from_integer(2.into()), true));
    }
    let x = &g.shift / (&one - &g.slope);
    (lo <= x && x <= hi).then_some((x, false))
}

/// All points with `f^n(x) = x`: cut points plus one solution per closed
/// walk of length `n` in the Markov graph. Fails once more than `cap` walks
/// are enumerated.
pub fn periodic_points(m: &PLMarkovMap, n: usize, cap: usize) -> Result<Vec<PeriodicPoint>> {
    if n == 0 {
        return Err(Error::domain("period must be at least 1"));
    }
    let p = m.partition();
    let mut found: BTreeMap<PointOnGraph, PeriodicPoint> = BTreeMap::new();
    for i in 0..p.num_points() {
        let mut j = i;
        for _ in 0..n {
            j = m.point_image(j);
        }
        if j == i {
            found.insert(p.point(i).clone(), PeriodicPoint { point: p.point(i).clone(), itinerary: vec![], non_unique: false });
        }
    }
    let rows: Vec<Vec<usize>> = (0..m.num_intervals()).map(|i| m.path(i).iter().map(|s| s.interval).collect()).collect();
    let mut walks = 0usize;
    for start in 0..m.num_intervals() {
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        let mut walk = vec![start];
        while let Some((v, k)) = stack.pop() {
            if walk.len() == n {
                if rows[v].contains(&start) {
                    walks += 1;
                    if walks > cap {
                        return Err(Error::Resource(format!("more than {cap} closed walks of length {n}")));
                    }
                    if let Some((x, non_unique)) = solve_closed_walk(m, &walk) {
                        let pt = p.point_in(start, x);
                        found.entry(pt.clone()).or_insert(PeriodicPoint { point: pt, itinerary: walk.clone(), non_unique });
                    }
                }
                walk.pop();
                continue;
            }
            if k < rows[v].len() {
                stack.push((v, k + 1));
                let w = rows[v][k];
                stack.push((w, 0));
                walk.push(w);
            } else {
                walk.pop();
            }
        }
    }
    Ok(found.into_values().collect())
}

/// Basic interval containing `x`, preferring the lower neighbour at a cut
/// point. Used to check itineraries.
pub(crate) fn intervals_containing(m: &PLMarkovMap, x: &PointOnGraph) -> Vec<usize> {
    let p = m.partition();
    match p.locate(x) {
        Location::Inside { interval, .. } => vec![interval],
        Location::AtPoint(i) => p.intervals_at(i).into_iter().map(|(j, _)| j).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plmap::tests::tent3;
    use crate::rational::{int, rat};

    #[test]
    fn tent_fixed_points() {
        let m = tent3();
        let pts = periodic_points(&m, 1, 1000).unwrap();
        let g = m.graph();
        let want = [g.point(0, int(0)).unwrap(), g.point(0, rat(1, 2)).unwrap(), g.point(0, int(1)).unwrap()];
        let got: Vec<_> = pts.iter().map(|p| p.point.clone()).collect();
        for w in &want {
            assert!(got.contains(w), "{w:?} missing");
        }
        assert_eq!(got.len(), 3);
    }

    #[test]
    fn tent_period_two_contains_one_fifth() {
        let m = tent3();
        let pts = periodic_points(&m, 2, 1000).unwrap();
        let fifth = m.graph().point(0, rat(1, 5)).unwrap();
        let hit = pts.iter().find(|p| p.point == fifth).unwrap();
        assert_eq!(hit.itinerary, vec![0, 1]);
        for p in &pts {
            assert_eq!(m.evaluate_n(&p.point, 2), p.point);
        }
        // 3^2 = 9 laps of the second iterate, each crossing the diagonal once.
        assert_eq!(pts.len(), 9);
    }

    #[test]
    fn branch_matches_evaluate() {
        let m = tent3();
        let (b, lo, hi) = m.branch(1, 0);
        assert_eq!((lo.clone(), hi.clone()), (rat(1, 3), rat(4, 9)));
        let x = rat(2, 5);
        assert_eq!(m.evaluate(&m.graph().point(0, x.clone()).unwrap()), m.graph().point(0, b.apply(&x)).unwrap());
    }
}
