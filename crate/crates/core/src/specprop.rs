//! Specification witnesses for primitive Markov maps. Requested itinerary
//! segments are joined by connecting walks of a fixed gap, the loop is closed
//! and the composed affine branch is solved for its fixed point.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::PointOnGraph;
use crate::plmap::periodic::{intervals_containing, solve_closed_walk};
use crate::plmap::{incidence_matrix, PLMarkovMap};

/// Least `N` with `A^N > 0`, or `None` when the incidence matrix is not
/// primitive.
pub fn primitivity_index(m: &PLMarkovMap) -> Option<usize> {
    let a = incidence_matrix(m);
    let n = a.dim();
    let words = n.div_ceil(64);
    let to_bits = |row: &[usize]| {
        let mut b = vec![0u64; words];
        for &j in row {
            b[j / 64] |= 1 << (j % 64);
        }
        b
    };
    let base: Vec<Vec<u64>> = a.rows().iter().map(|r| to_bits(r)).collect();
    let full = |row: &[u64]| (0..n).all(|j| row[j / 64] >> (j % 64) & 1 == 1);
    let cap = (n - 1) * (n - 1) + 1;
    let mut cur = base.clone();
    for k in 1..=cap {
        if cur.iter().all(|r| full(r)) {
            return Some(k);
        }
        cur = cur
            .iter()
            .map(|row| {
                let mut out = vec![0u64; words];
                for j in 0..n {
                    if row[j / 64] >> (j % 64) & 1 == 1 {
                        for (o, b) in out.iter_mut().zip(&base[j]) {
                            *o |= b;
                        }
                    }
                }
                out
            })
            .collect();
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShadowingRequest {
    /// Itineraries of basic interval indices.
    pub segments: Vec<Vec<usize>>,
    /// Number of steps from the end of one segment to the start of the next.
    pub gap: usize,
    pub period: usize,
}

impl ShadowingRequest {
    /// Smallest period the request allows.
    pub fn min_period(segments: &[Vec<usize>], gap: usize) -> usize {
        if segments.is_empty() {
            return gap.max(1);
        }
        segments.iter().map(Vec::len).sum::<usize>() + segments.len() * (gap - 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationRow {
    pub step: usize,
    pub interval: usize,
    /// Whether this step was requested, not filled in by a connecting walk.
    pub requested: bool,
    pub hit: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecWitness {
    pub point: PointOnGraph,
    pub itinerary: Vec<usize>,
    /// The loop fixes a whole segment; the point is its midpoint.
    pub non_unique: bool,
    pub verification: Vec<VerificationRow>,
    /// `f^p(x) = x` by direct evaluation.
    pub periodic: bool,
}

impl SpecWitness {
    pub fn verified(&self) -> bool {
        self.periodic && self.verification.iter().all(|r| r.hit)
    }
}

fn successors(m: &PLMarkovMap) -> Vec<Vec<usize>> {
    incidence_matrix(m)
        .rows()
        .iter()
        .map(|r| {
            let mut r = r.clone();
            r.sort_unstable();
            r.dedup();
            r
        })
        .collect()
}

/// Lexicographically least walk `a -> ... -> b` with exactly `t` steps,
/// without its end points.
fn least_walk(succ: &[Vec<usize>], a: usize, b: usize, t: usize) -> Option<Vec<usize>> {
    let n = succ.len();
    // reach[k][v]: v reaches b in exactly k steps.
    let mut reach = vec![vec![false; n]];
    reach[0][b] = true;
    for k in 1..=t {
        let prev = &reach[k - 1];
        let next = (0..n).map(|v| succ[v].iter().any(|&w| prev[w])).collect();
        reach.push(next);
    }
    let mut out = Vec::with_capacity(t.saturating_sub(1));
    let mut cur = a;
    for s in 1..t {
        cur = *succ[cur].iter().find(|&&w| reach[t - s][w])?;
        out.push(cur);
    }
    succ[cur].contains(&b).then_some(out)
}

/// Periodic point whose orbit follows every requested segment, with `gap`
/// steps between segments and period `period`.
pub fn spec_witness(m: &PLMarkovMap, req: &ShadowingRequest) -> Result<SpecWitness> {
    let n_prim = primitivity_index(m).ok_or_else(|| Error::domain("the incidence matrix is not primitive"))?;
    if req.gap < n_prim.max(1) {
        return Err(Error::domain(format!("gap {} is below the primitivity index {n_prim}", req.gap)));
    }
    let succ = successors(m);
    let n = succ.len();
    for (k, seg) in req.segments.iter().enumerate() {
        if seg.is_empty() {
            return Err(Error::domain(format!("segment {k} is empty")));
        }
        if let Some(&bad) = seg.iter().find(|&&i| i >= n) {
            return Err(Error::domain(format!("segment {k} names interval {bad}, but there are {n}")));
        }
        for w in seg.windows(2) {
            if !succ[w[0]].contains(&w[1]) {
                let p = m.partition();
                return Err(Error::domain(format!(
                    "segment {k} is inconsistent: {} does not cover {}",
                    p.interval(w[0]).id,
                    p.interval(w[1]).id
                )));
            }
        }
    }
    let need = ShadowingRequest::min_period(&req.segments, req.gap);
    if req.period < need {
        return Err(Error::domain(format!("period {} is below the minimum {need}", req.period)));
    }
    let mut itinerary = Vec::with_capacity(req.period);
    let mut requested = Vec::with_capacity(req.period);
    for (k, seg) in req.segments.iter().enumerate() {
        if k > 0 {
            let link = least_walk(&succ, *itinerary.last().unwrap(), seg[0], req.gap)
                .ok_or_else(|| Error::domain("no connecting walk of the requested gap"))?;
            requested.extend(std::iter::repeat_n(false, link.len()));
            itinerary.extend(link);
        }
        itinerary.extend(seg);
        requested.extend(std::iter::repeat_n(true, seg.len()));
    }
    let (from, to) = match (itinerary.last(), itinerary.first()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => (0, 0),
    };
    let closing = if itinerary.is_empty() {
        let mut w = least_walk(&succ, 0, 0, req.period).ok_or_else(|| Error::domain("no closed walk of the period"))?;
        w.insert(0, 0);
        requested.extend(std::iter::repeat_n(false, w.len()));
        itinerary = w;
        vec![]
    } else {
        least_walk(&succ, from, to, req.period - itinerary.len() + 1)
            .ok_or_else(|| Error::domain("no closing walk of the period"))?
    };
    requested.extend(std::iter::repeat_n(false, closing.len()));
    itinerary.extend(closing);
    debug_assert_eq!(itinerary.len(), req.period);

    let (x, non_unique) = solve_closed_walk(m, &itinerary).ok_or_else(|| {
        Error::domain("degenerate loop: the composed branch has slope 1 and no fixed point")
    })?;
    let point = m.partition().point_in(itinerary[0], x);
    let mut y = point.clone();
    let mut verification = Vec::with_capacity(req.period);
    for (step, (&i, &r)) in itinerary.iter().zip(&requested).enumerate() {
        verification.push(VerificationRow { step, interval: i, requested: r, hit: intervals_containing(m, &y).contains(&i) });
        y = m.evaluate(&y);
    }
    let periodic = y == point;
    Ok(SpecWitness { point, itinerary, non_unique, verification, periodic })
}

/// Random walk of `len` intervals in the Markov graph.
pub fn random_segment<R: Rng>(m: &PLMarkovMap, rng: &mut R, len: usize) -> Vec<usize> {
    let succ = successors(m);
    let mut cur = rng.gen_range(0..succ.len());
    let mut seg = vec![cur];
    while seg.len() < len {
        cur = succ[cur][rng.gen_range(0..succ[cur].len())];
        seg.push(cur);
    }
    seg
}

/// Random request with up to three segments of up to four intervals, at
/// the given gap and a period a little above the minimum.
pub fn random_request<R: Rng>(m: &PLMarkovMap, rng: &mut R, gap: usize) -> ShadowingRequest {
    let count = rng.gen_range(1..=3);
    let segments: Vec<Vec<usize>> = (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=4);
            random_segment(m, rng, len)
        })
        .collect();
    let period = ShadowingRequest::min_period(&segments, gap) + rng.gen_range(0..=3);
    ShadowingRequest { segments, gap, period }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{b1_base, tent3, totalize};
    use crate::rational::rat;

    #[test]
    fn indices() {
        assert_eq!(primitivity_index(&tent3()), Some(1));
        assert_eq!(primitivity_index(&b1_base()), None);
        let t = totalize(&b1_base(), &rat(1, 10)).unwrap();
        assert!(primitivity_index(&t.map).is_some());
    }

    #[test]
    fn tent_witnesses() {
        let m = tent3();
        let g = m.graph();
        let w = spec_witness(&m, &ShadowingRequest { segments: vec![vec![1]], gap: 1, period: 1 }).unwrap();
        assert_eq!(w.point, g.point(0, rat(1, 2)).unwrap());
        let w = spec_witness(&m, &ShadowingRequest { segments: vec![vec![0], vec![1]], gap: 1, period: 2 }).unwrap();
        assert_eq!(w.point, g.point(0, rat(1, 5)).unwrap());
        assert_eq!(m.evaluate(&w.point), g.point(0, rat(3, 5)).unwrap());
        assert!(w.verified());
    }

    #[test]
    fn empty_request_gives_a_periodic_point() {
        let m = tent3();
        let w = spec_witness(&m, &ShadowingRequest { segments: vec![], gap: 2, period: 2 }).unwrap();
        assert_eq!(w.itinerary.len(), 2);
        assert!(w.verified());
    }

    #[test]
    fn rejects_bad_requests() {
        let m = tent3();
        let gap0 = ShadowingRequest { segments: vec![vec![0]], gap: 0, period: 3 };
        assert!(spec_witness(&m, &gap0).is_err());
        let short = ShadowingRequest { segments: vec![vec![0, 1, 2]], gap: 1, period: 2 };
        assert!(spec_witness(&m, &short).is_err());
        assert!(spec_witness(&b1_base(), &ShadowingRequest { segments: vec![], gap: 2, period: 2 }).is_err());
    }
}
