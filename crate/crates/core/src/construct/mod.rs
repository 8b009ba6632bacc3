//! Low-entropy transitive maps built by surgery on tree maps.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{PointOnGraph, TopoGraph};
use crate::logval::{LogRecord, LogValue};
use crate::plmap::{Dir, EntropyEnclosure, PLMarkovMap};
use crate::rational::{format_rational, int, pow, simplest_between, Rational};

pub mod basic;
pub mod builder;
pub mod pipelines;
pub mod purify;
pub mod surgery;
pub mod unfold;

pub use basic::{b1_base, tent3, wedge_power};
pub use builder::{make_vertex, TreeMapBuilder};
pub use pipelines::{binary_exact, quotient_example, quotient_map, star_exact, QuotientExample, QuotientKind};
pub use purify::purify_stage;
pub use surgery::{edge_add, totalize};
pub use unfold::{same_up_to_vertex_names, side_image, sides_at, unfold, Side, UnfoldReport, Unfolding, UNFOLD_SAMPLES};

/// Largest window tried before giving up.
pub const MAX_WINDOW: u64 = 1 << 12;

/// Record of the choices made while building a map.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstructionTrace {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub w_chain: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inserted: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub orbit: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub schedules: BTreeMap<String, Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy_lower: Option<LogRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy_upper: Option<LogRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub steps: Vec<ConstructionTrace>,
}

impl ConstructionTrace {
    pub fn new(kind: impl Into<String>) -> Self {
        ConstructionTrace { kind: kind.into(), ..Default::default() }
    }

    /// Every point id mentioned at this level (not in nested steps).
    pub fn point_ids(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        out.extend(self.w_chain.iter().map(String::as_str));
        out.extend(self.inserted.iter().map(String::as_str));
        out.extend(self.orbit.iter().map(String::as_str));
        for v in self.schedules.values() {
            out.extend(v.iter().map(String::as_str));
        }
        out
    }

    fn set_entropy(&mut self, e: &EntropyEnclosure) {
        self.entropy_lower = Some(e.lower.record());
        self.entropy_upper = Some(e.upper.record());
    }
}

/// A constructed map with its certified entropy and trace.
#[derive(Clone, Debug)]
pub struct Construction {
    pub map: PLMarkovMap,
    pub entropy: EntropyEnclosure,
    pub trace: ConstructionTrace,
    /// A distinguished fixed point: the central root of a binary tree map,
    /// or the free end of an added arc.
    pub root: Option<PointOnGraph>,
    /// An endpoint cycle of the map, in dynamical order.
    pub endpoint_cycle: Vec<PointOnGraph>,
}

impl Construction {
    pub(crate) fn with_entropy(map: PLMarkovMap, entropy: EntropyEnclosure, mut trace: ConstructionTrace) -> Self {
        trace.set_entropy(&entropy);
        let endpoint_cycle = endpoint_cycle(&map).unwrap_or_default();
        Construction { map, entropy, trace, root: None, endpoint_cycle }
    }
}

/// Ordered single cycle of partition points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicOrbitSpec {
    pub points: Vec<PointOnGraph>,
    pub in_endpoints: bool,
}

impl PeriodicOrbitSpec {
    /// Checks that `m` cycles the points in the given order and records
    /// whether they are all endpoints.
    pub fn new(m: &PLMarkovMap, points: Vec<PointOnGraph>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::domain("empty orbit"));
        }
        let p = m.partition();
        let mut idx = Vec::with_capacity(points.len());
        for x in &points {
            let i = p.point_index(x).ok_or_else(|| Error::domain(format!("{} is not a cut point", p.describe(x))))?;
            if idx.contains(&i) {
                return Err(Error::domain("orbit points must be distinct"));
            }
            idx.push(i);
        }
        if !m.is_cycle(&idx) {
            return Err(Error::domain("points do not form a cycle in the given order"));
        }
        let g = m.graph();
        let in_endpoints = points.iter().all(|x| matches!(x, PointOnGraph::Vertex(v) if g.valence(*v) == 1));
        Ok(PeriodicOrbitSpec { points, in_endpoints })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Forward orbit of a cut point, until it returns.
pub fn orbit_of(m: &PLMarkovMap, x: &PointOnGraph) -> Result<Vec<PointOnGraph>> {
    let p = m.partition();
    let start = p.point_index(x).ok_or_else(|| Error::domain("not a cut point"))?;
    let mut out = vec![x.clone()];
    let mut i = m.point_image(start);
    while i != start {
        if out.len() > p.num_points() {
            return Err(Error::domain(format!("{} is not periodic", p.describe(x))));
        }
        out.push(p.point(i).clone());
        i = m.point_image(i);
    }
    Ok(out)
}

/// Longest cycle made of endpoints (valence one vertices), in dynamical
/// order starting from its first endpoint.
pub fn endpoint_cycle(m: &PLMarkovMap) -> Option<Vec<PointOnGraph>> {
    let g = m.graph();
    let is_end = |x: &PointOnGraph| matches!(x, PointOnGraph::Vertex(v) if g.valence(*v) == 1);
    let mut best: Option<Vec<PointOnGraph>> = None;
    for v in 0..g.num_vertices() {
        let x = PointOnGraph::Vertex(v);
        if !is_end(&x) {
            continue;
        }
        if let Ok(orbit) = orbit_of(m, &x) {
            if orbit.iter().all(is_end) && best.as_ref().is_none_or(|b| orbit.len() > b.len()) {
                best = Some(orbit);
            }
        }
    }
    best
}

/// Constants `r < s` with `hu < log r < hl + eps/3` and
/// `hu + 2 eps/3 < log s < hl + eps`, and the least `L` with `3 r^L < s^L`.
pub(crate) fn choose_constants(lower: &LogValue, upper: &LogValue, eps: &Rational) -> Result<(Rational, Rational, u64)> {
    let third = eps / int(3);
    let two_thirds = &third * int(2);
    if !upper.lt_plus(lower, &third) {
        return Err(Error::domain("entropy enclosure is wider than a third of epsilon"));
    }
    let one = Rational::one();
    // log t > floor + gap
    let above = |t: &Rational, floor: &LogValue, gap: &Rational| {
        let lt = LogValue::new(t.clone(), 1);
        if gap.is_zero() {
            lt > *floor
        } else {
            !lt.lt_plus(floor, gap)
        }
    };
    let below = |t: &Rational, ceil: &LogValue, gap: &Rational| {
        *t <= Rational::zero() || LogValue::new(t.clone(), 1).lt_plus(ceil, gap)
    };
    let r = simplest_between(|t| above(t, upper, &Rational::zero()), |t| below(t, lower, &third));
    let s = simplest_between(|t| above(t, upper, &two_thirds), |t| below(t, lower, eps));
    if r <= one || s <= r {
        return Err(Error::domain("could not separate r and s"));
    }
    let three = int(3);
    let mut l = 1u64;
    while pow(&s, l) <= &three * pow(&r, l) {
        l += 1;
    }
    Ok((r, s, l))
}

/// Direction of the path of interval `i` as it leaves its endpoint `at`.
pub(crate) fn first_step_from(m: &PLMarkovMap, i: usize, at_low: bool) -> (usize, bool) {
    let path = m.path(i);
    let st = if at_low { path[0] } else { path[path.len() - 1].reversed() };
    (st.interval, st.dir == Dir::Forward)
}

/// Point at distance `d` from the `at_low` end of interval `i`.
pub(crate) fn point_from_end(m: &PLMarkovMap, i: usize, at_low: bool, d: &Rational) -> PointOnGraph {
    let b = m.partition().interval(i);
    let off = if at_low { &b.lo + d } else { &b.hi - d };
    m.partition().point_in(i, off)
}

/// Slowly escaping orbit along a cycle of intervals `(interval, at_low)`
/// hinged at cut points: each interval's image starts with the next one. The
/// returned points `w_0..w_{n-1}` satisfy `w_k` interior to interval
/// `k mod len` and `f(w_{n-1})` the far end of interval `n mod len`. Unless
/// `strict`, points may also sit at far ends.
pub(crate) fn slow_chain(m: &PLMarkovMap, cycle: &[(usize, bool)], n: usize, strict: bool) -> Result<Vec<PointOnGraph>> {
    let len = cycle.len();
    for k in 0..len {
        let (i, at_low) = cycle[k];
        if first_step_from(m, i, at_low) != cycle[(k + 1) % len] {
            return Err(Error::domain("intervals do not form a cycle of directions"));
        }
    }
    let p = m.partition();
    let mut d = p.interval(cycle[n % len].0).length();
    let mut dist = vec![Rational::zero(); n];
    for k in (0..n).rev() {
        let i = cycle[k % len].0;
        d /= m.slope(i);
        let full = p.interval(i).length();
        if d > full || strict && d == full {
            return Err(Error::domain(format!("slow orbit of length {n} leaves its interval at step {k}")));
        }
        dist[k] = d.clone();
    }
    Ok(dist.iter().enumerate().map(|(k, d)| {
        let (i, at_low) = cycle[k % len];
        point_from_end(m, i, at_low, d)
    }).collect())
}

/// Point of `[x, y]` at fraction `t` from `x`.
pub(crate) fn point_between(m: &PLMarkovMap, i: usize, x_low: bool, t: Rational) -> PointOnGraph {
    let d = m.partition().interval(i).length() * t;
    point_from_end(m, i, x_low, &d)
}

/// A name not yet used for a vertex of `g`.
pub(crate) fn fresh_vertex_name(g: &TopoGraph, base: &str) -> String {
    let mut name = base.to_string();
    while g.vertex_id(&name).is_some() {
        name.push('\'');
    }
    name
}

pub(crate) fn fresh_edge_id(g: &TopoGraph, base: &str) -> String {
    let mut name = base.to_string();
    while g.edge_id(&name).is_some() {
        name.push('\'');
    }
    name
}

pub(crate) fn fmt(r: &Rational) -> String {
    format_rational(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_separate() {
        let h = LogValue::of(3, 2);
        let eps = crate::rational::rat(1, 10);
        let (r, s, l) = choose_constants(&h, &h, &eps).unwrap();
        let lr = LogValue::new(r.clone(), 1);
        let ls = LogValue::new(s.clone(), 1);
        assert!(h < lr && lr < ls && ls.lt_plus(&h, &eps));
        assert!(int(3) * pow(&r, l) < pow(&s, l));
        assert!(int(3) * pow(&r, l - 1) >= pow(&s, l - 1));
    }
}
