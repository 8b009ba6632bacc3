//! Surgery on one basic interval: making a transitive map totally
//! transitive, and growing a new arc at a fixed point.


use crate::error::{Error, Result};
use crate::graph::{Edge, PointOnGraph, TopoGraph};
use crate::plmap::{classify, entropy, is_transitive, periodic_points, EntropyEnclosure, EntropyOptions, PLMarkovMap};
use crate::rational::{int, rat, Rational};

use super::builder::{make_vertex, TreePaths, TreeMapBuilder};
use super::{
    choose_constants, first_step_from, fmt, fresh_edge_id, fresh_vertex_name, point_between, slow_chain,
    Construction, ConstructionTrace, MAX_WINDOW,
};

/// Directions at cut point `pi`, as `(interval, pi is its low end)`.
fn directions(m: &PLMarkovMap, pi: usize) -> Vec<(usize, bool)> {
    m.partition().intervals_at(pi)
}

/// The cycle reached by following first path steps from `start`.
fn direction_cycle(m: &PLMarkovMap, start: (usize, bool)) -> Vec<(usize, bool)> {
    let mut seen = vec![start];
    let mut d = start;
    loop {
        d = first_step_from(m, d.0, d.1);
        if let Some(k) = seen.iter().position(|&s| s == d) {
            return seen.split_off(k);
        }
        seen.push(d);
    }
}

/// Smallest `L >= from` for which the slow chain exists, trying one full
/// turn of the cycle.
fn chain_at_least(m: &PLMarkovMap, cycle: &[(usize, bool)], from: u64) -> Result<(u64, Vec<PointOnGraph>)> {
    let mut last = None;
    for l in from..from + cycle.len() as u64 {
        match slow_chain(m, cycle, l as usize, true) {
            Ok(c) => return Ok((l, c)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap())
}

fn certify(
    m: &PLMarkovMap,
    base: &EntropyEnclosure,
    target_extra: &Rational,
) -> (EntropyEnclosure, bool) {
    let e = entropy(m, &EntropyOptions::default());
    let ok = e.upper.lt_plus(&base.lower, target_extra);
    (e, ok)
}

/// Totally transitive map with entropy below `h(m) + eps`, equal to `m` on
/// its cut points. `m` must be a transitive, not totally transitive, Markov
/// map of a tree.
pub fn totalize(m: &PLMarkovMap, eps: &Rational) -> Result<Construction> {
    if !m.graph().is_tree() {
        return Err(Error::domain("totalize needs a tree map"));
    }
    let cls = classify(m);
    if !cls.transitive {
        return Err(Error::domain("totalize needs a transitive map"));
    }
    if cls.totally_transitive {
        return Err(Error::domain("map is already totally transitive"));
    }
    let fixed = periodic_points(m, 1, 1_000_000)?;
    if fixed.len() != 1 {
        return Err(Error::domain(format!("expected a unique fixed point, found {}", fixed.len())));
    }
    let p_pt = fixed[0].point.clone();
    let m = if m.partition().point_index(&p_pt).is_none() { m.refine(std::slice::from_ref(&p_pt))? } else { m.clone() };
    let part = m.partition();
    let pi = part.point_index(&p_pt).unwrap();
    let dirs = directions(&m, pi);

    let q = (0..part.num_points())
        .find(|&i| i != pi && m.point_image(i) == pi)
        .ok_or_else(|| Error::domain("no cut point maps onto the fixed point"))?;
    let q_pt = part.point(q).clone();
    let tree = TreePaths::new(m.graph())?;
    let first = tree.geodesic(m.graph(), &p_pt, &q_pt).remove(0);
    let i0 = dirs
        .iter()
        .copied()
        .find(|&(i, low)| {
            let b = part.interval(i);
            b.edge == first.edge && if first.to > first.from { low && b.lo == first.from } else { !low && b.hi == first.from }
        })
        .ok_or_else(|| Error::domain("no interval at the fixed point towards q"))?;
    let cycle = direction_cycle(&m, i0);
    if cycle.len() != dirs.len() || cycle[0] != i0 {
        return Err(Error::domain("branches at the fixed point are not cyclically permuted"));
    }
    let (k, x_low) = directions(&m, q)[0];

    let h = entropy(&m, &EntropyOptions::default());
    let (r, s, lambda) = choose_constants(&h.lower, &h.upper, eps)?;
    let mut window = lambda.max(1);
    loop {
        let (l, chain) = chain_at_least(&m, &cycle, window)?;
        let mut b = TreeMapBuilder::from_map(&m, m.graph().clone(), |x| x.clone());
        let y1 = point_between(&m, k, x_low, rat(1, 3));
        let x1 = point_between(&m, k, x_low, rat(2, 3));
        b.set(y1.clone(), chain[0].clone()).name(y1, "y'");
        b.set(x1.clone(), p_pt.clone()).name(x1, "x'");
        for (j, w) in chain.iter().enumerate().rev() {
            b.name(w.clone(), format!("w{j}"));
        }
        let out = b.build()?;
        let exact = classify(&out).exact;
        let (e, ok) = certify(&out, &h, eps);
        if exact && ok {
            let op = out.partition();
            let mut trace = ConstructionTrace::new("totalize");
            trace.epsilon = Some(fmt(eps));
            trace.r = Some(fmt(&r));
            trace.s = Some(fmt(&s));
            trace.lambda = Some(lambda);
            trace.window = Some(l);
            trace.w_chain = chain.iter().map(|w| op.describe(w)).collect();
            trace.inserted = vec!["x'".into(), "y'".into()];
            trace.notes.push(format!("fixed point {}, surgery on {}", op.describe(&p_pt), op.describe(&q_pt)));
            return Ok(Construction::with_entropy(out, e, trace));
        }
        window = l * 2;
        if window > MAX_WINDOW {
            return Err(Error::Resource(format!(
                "no window up to {MAX_WINDOW} meets the entropy bound; last upper bound {}",
                e.upper
            )));
        }
    }
}

/// Attaches a new arc at the fixed cut point `z` and extends `m` to a
/// transitive map with entropy below `h(m) + eps` fixing both ends of the
/// arc. The free end is returned as the construction's root.
pub fn edge_add(m: &PLMarkovMap, z: &PointOnGraph, eps: &Rational) -> Result<Construction> {
    if !m.graph().is_tree() {
        return Err(Error::domain("edge_add needs a tree map"));
    }
    if !is_transitive(m).transitive {
        return Err(Error::domain("edge_add needs a transitive map"));
    }
    let zi = m.partition().point_index(z).ok_or_else(|| Error::domain("attachment point must be a cut point"))?;
    if m.point_image(zi) != zi {
        return Err(Error::domain("attachment point must be fixed"));
    }
    let (m, zv) = make_vertex(m, z)?;
    let part = m.partition();
    let z_pt = PointOnGraph::Vertex(zv);
    let zi = part.point_index(&z_pt).unwrap();
    let cycle = direction_cycle(&m, directions(&m, zi)[0]);
    let in_cycle = |i: usize| cycle.iter().any(|&(c, _)| c == i);
    let (k, x_low) = (0..part.num_points())
        .filter(|&x| m.point_image(x) == zi)
        .flat_map(|x| directions(&m, x))
        .find(|&(i, _)| !in_cycle(i))
        .ok_or_else(|| Error::domain("every interval mapped onto the attachment point lies in the cycle of directions"))?;

    let g = m.graph();
    let mut names = g.vertices().to_vec();
    let end_name = fresh_vertex_name(g, "e");
    names.push(end_name);
    let ev = names.len() - 1;
    let mut edges = g.edges().to_vec();
    let arc = edges.len();
    edges.push(Edge { id: fresh_edge_id(g, "s"), ends: (zv, ev), length: int(1) });
    let g2 = TopoGraph::from_parts(names, edges)?;
    let e_pt = PointOnGraph::Vertex(ev);

    let h = entropy(&m, &EntropyOptions::default());
    let (r, s, lambda) = choose_constants(&h.lower, &h.upper, eps)?;
    let mut window = lambda.max(2);
    loop {
        let (l, chain) = chain_at_least(&m, &cycle, window)?;
        let mut b = TreeMapBuilder::from_map(&m, g2.clone(), |x| x.clone());
        b.set(e_pt.clone(), e_pt.clone());
        let on_arc = |i: u64| g2.point(arc, Rational::new((i as i64).into(), (l as i64).into())).unwrap();
        let mut arc_ids = Vec::new();
        for i in 1..l {
            let y = if i == 1 { chain[0].clone() } else { on_arc(i - 1) };
            b.set(on_arc(i), y).name(on_arc(i), format!("n{i}"));
            arc_ids.push(format!("n{i}"));
        }
        let y1 = point_between(&m, k, x_low, rat(1, 3));
        let x1 = point_between(&m, k, x_low, rat(2, 3));
        b.set(y1.clone(), e_pt.clone()).name(y1, "y^");
        b.set(x1.clone(), z_pt.clone()).name(x1, "x^");
        for (j, w) in chain.iter().enumerate().rev() {
            b.name(w.clone(), format!("v{j}"));
        }
        let out = b.build()?;
        let transitive = is_transitive(&out).transitive;
        let (e, ok) = certify(&out, &h, eps);
        if transitive && ok {
            let op = out.partition();
            let mut trace = ConstructionTrace::new("edge_add");
            trace.epsilon = Some(fmt(eps));
            trace.r = Some(fmt(&r));
            trace.s = Some(fmt(&s));
            trace.lambda = Some(lambda);
            trace.window = Some(l);
            trace.w_chain = chain.iter().map(|w| op.describe(w)).collect();
            trace.inserted = vec!["x^".into(), "y^".into()];
            trace.schedules.insert("chain".into(), arc_ids);
            trace.notes.push(format!(
                "new arc {} from {} to {}",
                out.graph().edge(arc).id,
                out.graph().vertex_name(zv),
                out.graph().vertex_name(ev)
            ));
            let mut c = Construction::with_entropy(out, e, trace);
            c.root = Some(e_pt);
            return Ok(c);
        }
        window = l * 2;
        if window > MAX_WINDOW {
            return Err(Error::Resource(format!(
                "no window up to {MAX_WINDOW} meets the entropy bound; last upper bound {}",
                e.upper
            )));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::basic::{b1_base, tent3, wedge_power};
    use crate::logval::LogValue;
    use crate::plmap::{classify, validate};

    #[test]
    fn totalize_b1() {
        let m = b1_base();
        let eps = rat(1, 10);
        let c = totalize(&m, &eps).unwrap();
        assert!(validate(&c.map.to_raw()).is_valid());
        assert!(classify(&c.map).exact);
        assert!(c.entropy.upper.lt_plus(&LogValue::of(3, 2), &eps));
        assert!(c.entropy.lower >= LogValue::of(3, 2));
        let g = c.map.graph();
        let half = g.point(0, rat(1, 2)).unwrap();
        assert_eq!(c.map.evaluate(&half), half);
        assert_eq!(c.endpoint_cycle.len(), 2);
        for id in c.trace.point_ids() {
            assert!(c.map.partition().point_by_id(id).is_some(), "{id}");
        }
    }

    #[test]
    fn totalize_rejects_exact_maps() {
        assert!(totalize(&tent3(), &rat(1, 10)).is_err());
    }

    #[test]
    fn totalize_three_star() {
        let w = wedge_power(&tent3(), &PointOnGraph::Vertex(0), 3).unwrap();
        let eps = rat(1, 20);
        let c = totalize(&w, &eps).unwrap();
        assert!(classify(&c.map).exact);
        assert!(c.entropy.upper.lt_plus(&LogValue::of(3, 3), &eps));
        assert!(c.entropy.lower >= LogValue::of(3, 3));
        assert_eq!(c.endpoint_cycle.len(), 3);
    }

    #[test]
    fn edge_add_to_b1() {
        let m = b1_base();
        let half = m.graph().point(0, rat(1, 2)).unwrap();
        let eps = rat(1, 10);
        let c = edge_add(&m, &half, &eps).unwrap();
        let g = c.map.graph();
        assert_eq!(g.num_edges(), 3);
        assert!(is_transitive(&c.map).transitive);
        assert!(c.entropy.upper.lt_plus(&LogValue::of(3, 2), &eps));
        let e = c.root.clone().unwrap();
        assert_eq!(c.map.evaluate(&e), e);
        let z = PointOnGraph::Vertex(g.vertex_id("e@1/2").unwrap());
        assert_eq!(c.map.evaluate(&z), z);
        // the endpoint two-cycle survives
        let a = PointOnGraph::Vertex(0);
        let bv = PointOnGraph::Vertex(1);
        assert_eq!(c.map.evaluate(&a), bv);
        assert_eq!(c.map.evaluate(&bv), a);
    }
}
