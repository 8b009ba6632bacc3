//! Base maps of the interval and wedge powers.

use crate::error::{Error, Result};
use crate::graph::{catalog, Edge, PointOnGraph, TopoGraph};
use crate::plmap::PLMarkovMap;
use crate::rational::{int, rat, Rational};

use super::builder::{make_vertex, TreeMapBuilder};

fn interval_map(breaks: &[(Rational, Rational)]) -> PLMarkovMap {
    let g = catalog::arc();
    let mut b = TreeMapBuilder::new(g.clone());
    for (x, y) in breaks {
        b.set(g.point(0, x.clone()).unwrap(), g.point(0, y.clone()).unwrap());
    }
    b.build().expect("base map")
}

/// `x -> |1 - |1 - 3x||` on `[0, 1]`.
pub fn tent3() -> PLMarkovMap {
    interval_map(&[(int(0), int(0)), (rat(1, 3), int(1)), (rat(2, 3), int(0)), (int(1), int(1))])
}

/// Transitive map of `[0, 1]` with period two around the fixed point `1/2`
/// and entropy `log sqrt 3`.
pub fn b1_base() -> PLMarkovMap {
    interval_map(&[
        (int(0), int(1)),
        (rat(1, 6), rat(1, 2)),
        (rat(1, 3), int(1)),
        (rat(1, 2), rat(1, 2)),
        (int(1), int(0)),
    ])
}

/// `k` copies of the graph glued at the fixed cut point `x0`. Copy `i` goes
/// to copy `i + 1` by the identity and the last copy goes to copy `0` by `m`.
pub fn wedge_power(m: &PLMarkovMap, x0: &PointOnGraph, k: usize) -> Result<PLMarkovMap> {
    if k == 0 {
        return Err(Error::domain("wedge power needs k >= 1"));
    }
    let p = m.partition();
    let i0 = p.point_index(x0).ok_or_else(|| Error::domain("wedge point must be a cut point"))?;
    if m.point_image(i0) != i0 {
        return Err(Error::domain(format!("wedge point {} is not fixed", p.describe(x0))));
    }
    if k == 1 {
        return Ok(m.clone());
    }
    let (m, v0) = make_vertex(m, x0)?;
    let g = m.graph();
    let nv = g.num_vertices();
    let ne = g.num_edges();
    // Vertex v of copy c; the wedge point is shared.
    let mut vmap = vec![vec![0usize; nv]; k];
    let mut names = Vec::new();
    for (c, row) in vmap.iter_mut().enumerate() {
        for (v, slot) in row.iter_mut().enumerate() {
            if v == v0 {
                if c == 0 {
                    names.push(g.vertex_name(v).to_string());
                }
                *slot = v0;
            } else {
                names.push(format!("{}_{c}", g.vertex_name(v)));
                *slot = names.len() - 1;
            }
        }
    }
    let mut edges = Vec::with_capacity(k * ne);
    for (c, row) in vmap.iter().enumerate() {
        for e in g.edges() {
            edges.push(Edge {
                id: format!("{}_{c}", e.id),
                ends: (row[e.ends.0], row[e.ends.1]),
                length: e.length.clone(),
            });
        }
    }
    let wg = TopoGraph::from_parts(names, edges)?;
    let carry = |c: usize, x: &PointOnGraph| match x {
        PointOnGraph::Vertex(v) => PointOnGraph::Vertex(vmap[c][*v]),
        PointOnGraph::Interior { edge, offset } => PointOnGraph::Interior { edge: c * ne + edge, offset: offset.clone() },
    };
    let mut b = TreeMapBuilder::new(wg);
    let part = m.partition();
    for c in 0..k {
        for i in 0..part.num_points() {
            let x = part.point(i);
            let y = if c + 1 < k { carry(c + 1, x) } else { carry(0, part.point(m.point_image(i))) };
            let cx = carry(c, x);
            if matches!(x, PointOnGraph::Interior { .. }) {
                b.name(cx.clone(), format!("{}_{c}", part.point_id(i)));
            }
            b.set(cx, y);
        }
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logval::LogValue;
    use crate::plmap::{classify, entropy, incidence_matrix, period_decomposition, periodic_points, EntropyOptions};

    #[test]
    fn tent_matches_formula() {
        let m = tent3();
        assert_eq!(incidence_matrix(&m).to_dense(), vec![vec![1; 3]; 3]);
        let g = m.graph();
        for (x, y) in [(rat(1, 5), rat(3, 5)), (rat(1, 2), rat(1, 2)), (rat(5, 6), rat(1, 2))] {
            assert_eq!(m.evaluate(&g.point(0, x).unwrap()), g.point(0, y).unwrap());
        }
        assert!(classify(&m).exact);
    }

    #[test]
    fn b1_has_entropy_log_sqrt3_and_period_two() {
        let m = b1_base();
        let e = entropy(&m, &EntropyOptions::default());
        assert_eq!(e.lower.cmp(&LogValue::of(3, 2)), std::cmp::Ordering::Equal);
        assert_eq!(e.upper.cmp(&LogValue::of(3, 2)), std::cmp::Ordering::Equal);
        assert_eq!(period_decomposition(&m).unwrap().k, 2);
        let g = m.graph();
        let f = |x: Rational| m.evaluate(&g.point(0, x).unwrap());
        assert_eq!(f(rat(1, 12)), g.point(0, rat(3, 4)).unwrap());
        assert_eq!(f(rat(1, 4)), g.point(0, rat(3, 4)).unwrap());
        assert_eq!(f(rat(5, 12)), g.point(0, rat(3, 4)).unwrap());
        assert_eq!(f(rat(3, 4)), g.point(0, rat(1, 4)).unwrap());
    }

    #[test]
    fn wedge_of_tent_is_a_star_with_scaled_entropy() {
        let m = tent3();
        let a = PointOnGraph::Vertex(0);
        for n in 2..=4usize {
            let w = wedge_power(&m, &a, n).unwrap();
            assert_eq!(w.graph().valence(0), n);
            let e = entropy(&w, &EntropyOptions::default());
            assert_eq!(e.lower.cmp(&LogValue::of(3, n as u64)), std::cmp::Ordering::Equal);
            let fixed = periodic_points(&w, 1, 100_000).unwrap();
            assert_eq!(fixed.len(), 1);
            assert_eq!(fixed[0].point, a);
        }
    }

    #[test]
    fn wedge_at_interior_point() {
        let m = b1_base();
        let half = m.graph().point(0, rat(1, 2)).unwrap();
        let w = wedge_power(&m, &half, 2).unwrap();
        assert_eq!(w.graph().num_edges(), 4);
        assert!(w.graph().is_tree());
        assert_eq!(w.num_intervals(), 2 * m.num_intervals());
    }

    #[test]
    fn wedge_power_one_is_identity() {
        let m = tent3();
            assert_eq!(wedge_power(&m, &PointOnGraph::Vertex(0), 1).unwrap(), m);
    }
}
