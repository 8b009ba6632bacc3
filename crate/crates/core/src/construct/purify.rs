//! Finite stages of the pure mixing construction: an arc is attached at
//! each point of an endpoint cycle and a nested schedule of turning points
//! sends orbits near the new free ends back and forth, so that the free ends
//! become an inaccessible cycle in the limit.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Edge, PointOnGraph, TopoGraph};
use crate::logval::LogValue;
use crate::plmap::{classify, entropy, EntropyOptions, PLMarkovMap};
use crate::rational::{int, pow, rat, Rational};

use super::builder::TreeMapBuilder;
use super::{
    choose_constants, fmt, fresh_edge_id, fresh_vertex_name, point_between, slow_chain, Construction,
    ConstructionTrace, PeriodicOrbitSpec, MAX_WINDOW,
};

fn half_pow(i: usize) -> Rational {
    rat(1, 1) / pow(&int(2), i as u64)
}

/// Stage `j` of the construction for the endpoint cycle `orbit` of the exact
/// tree map `m`, started at a point of the cycle where the rerouting fits.
/// Arc `k` runs from its free end (offset 0) to `o_k`. The
/// free ends form a cycle and the entropy stays below
/// `max(h(m), log 3 / |orbit|) + eps`.
pub fn purify_stage(m: &PLMarkovMap, orbit: &PeriodicOrbitSpec, eps: &Rational, j: usize) -> Result<Construction> {
    if j == 0 {
        return Err(Error::domain("stages start at 1"));
    }
    if !m.graph().is_tree() {
        return Err(Error::domain("purify needs a tree map"));
    }
    if !classify(m).exact {
        return Err(Error::domain("purify needs an exact map"));
    }
    if !orbit.in_endpoints {
        return Err(Error::domain("the orbit must consist of endpoints"));
    }
    let mm = orbit.len();
    let part = m.partition();
    // Start the cycle at a point with a preimage other than its predecessor.
    let mut found = None;
    for rot in 0..mm {
        let pts: Vec<PointOnGraph> = (0..mm).map(|c| orbit.points[(c + rot) % mm].clone()).collect();
        let o_idx: Vec<usize> = pts.iter().map(|x| part.point_index(x).unwrap()).collect();
        let cycle: Vec<(usize, bool)> = o_idx.iter().map(|&i| part.intervals_at(i)[0]).collect();
        let k = (0..part.num_points())
            .filter(|&x| m.point_image(x) == o_idx[0] && x != o_idx[mm - 1])
            .flat_map(|x| part.intervals_at(x))
            .find(|&(i, _)| cycle.iter().all(|&(c, _)| c != i));
        if let Some(k) = k {
            found = Some((pts, cycle, k));
            break;
        }
    }
    let (points, cycle, (k, x_low)) =
        found.ok_or_else(|| Error::domain("no basic interval to reroute onto the orbit"))?;
    let o_vert: Vec<usize> = points
        .iter()
        .map(|x| match x {
            PointOnGraph::Vertex(v) => *v,
            PointOnGraph::Interior { .. } => unreachable!("endpoints are vertices"),
        })
        .collect();

    let g = m.graph();
    let nv = g.num_vertices();
    let ne = g.num_edges();
    let mut names = g.vertices().to_vec();
    let mut edges = g.edges().to_vec();
    let mut probe = g.clone();
    for (c, &ov) in o_vert.iter().enumerate() {
        let v = fresh_vertex_name(&probe, &format!("ainf{c}"));
        names.push(v);
        let id = fresh_edge_id(&probe, &format!("arc{c}"));
        edges.push(Edge { id, ends: (nv + c, ov), length: int(1) });
        probe = TopoGraph::from_parts(names.clone(), edges.clone())?;
    }
    let g2 = probe;
    let at = |arc: usize, t: Rational| g2.point(ne + arc, t).unwrap();
    let ainf = |c: usize| PointOnGraph::Vertex(nv + c);

    let h = entropy(m, &EntropyOptions::default());
    let floor = LogValue::of(3, mm as u64);
    let eta_lo = LogValue::max(h.lower.clone(), floor.clone());
    let eta_hi = LogValue::max(h.upper.clone(), floor);
    let (r, s, lambda) = choose_constants(&eta_lo, &eta_hi, eps)?;
    let last = mm - 1;
    let mut window = lambda.max(1);
    loop {
        let l = window;
        let seventh = |q: i64, i: usize| &half_pow(i) + &half_pow(i) * rat(q, 7);
        let tiny = rat(1, 1) / pow(&int(7), l);
        let u_chain = slow_chain(m, &cycle, mm * l as usize, false)?;
        let mut b = TreeMapBuilder::from_map(m, g2.clone(), |x| x.clone());
        for c in 0..mm {
            b.set(ainf(c), ainf((c + 1) % mm));
        }
        let mut sched: BTreeMap<&str, Vec<String>> = BTreeMap::new();
        let put = |b: &mut TreeMapBuilder, sched: &mut BTreeMap<&str, Vec<String>>, key: &'static str, id: String, x: PointOnGraph, y: PointOnGraph| {
            b.set(x.clone(), y).name(x, id.clone());
            sched.entry(key).or_default().push(id);
        };
        for i in 1..=j {
            let alpha = |i: usize| at(0, half_pow(i));
            let u_prev = if i == 1 { u_chain[0].clone() } else { at(0, &half_pow(i - 1) + &half_pow(i - 1) * &tiny) };
            let w_i = at(0, half_pow(i) - half_pow(i + 1) * &tiny);
            put(&mut b, &mut sched, "a", format!("a{i}"), at(last, half_pow(i)), alpha(i));
            put(&mut b, &mut sched, "c", format!("c{}", 2 * i - 1), at(last, seventh(1, i)), alpha(i - 1));
            put(&mut b, &mut sched, "b", format!("b{i}"), at(last, seventh(2, i)), u_prev.clone());
            put(&mut b, &mut sched, "c", format!("c{}", 2 * i), at(last, seventh(3, i)), alpha(i - 1));
            put(&mut b, &mut sched, "e", format!("e{}", 2 * i), at(last, seventh(4, i)), alpha(i));
            put(&mut b, &mut sched, "d", format!("d{i}"), at(last, seventh(5, i)), w_i.clone());
            put(&mut b, &mut sched, "e", format!("e{}", 2 * i - 1), at(last, seventh(6, i)), alpha(i));
            b.name(u_prev, format!("pu{}", i - 1));
            b.name(w_i, format!("pw{i}"));
            sched.entry("u").or_default().push(format!("pu{}", i - 1));
            sched.entry("w").or_default().push(format!("pw{i}"));
            if mm > 1 {
                b.name(alpha(i), format!("alpha{i}"));
                sched.entry("alpha").or_default().push(format!("alpha{i}"));
            }
        }
        let w0 = at(0, rat(1, 1) - rat(1, 2) * &tiny);
        b.name(w0.clone(), "pw0");
        sched.entry("w").or_default().insert(0, "pw0".into());
        let y1 = point_between(m, k, x_low, rat(1, 3));
        let x1 = point_between(m, k, x_low, rat(2, 3));
        b.set(y1.clone(), w0).name(y1, "y*");
        b.set(x1.clone(), points[0].clone()).name(x1, "x*");
        let out = b.build()?;
        let e = entropy(&out, &EntropyOptions::default());
        if e.upper.lt_plus(&eta_lo, eps) {
            let mut trace = ConstructionTrace::new("purify");
            trace.epsilon = Some(fmt(eps));
            trace.r = Some(fmt(&r));
            trace.s = Some(fmt(&s));
            trace.lambda = Some(lambda);
            trace.window = Some(l);
            trace.stage = Some(j);
            trace.orbit = o_vert.iter().map(|&v| out.graph().vertex_name(v).to_string()).collect();
            trace.inserted = vec!["x*".into(), "y*".into()];
            for (key, ids) in sched {
                trace.schedules.insert(key.to_string(), ids);
            }
            trace.schedules.insert("a_inf".into(), (0..mm).map(|c| out.graph().vertex_name(nv + c).to_string()).collect());
            let mut c = Construction::with_entropy(out, e, trace);
            c.endpoint_cycle = (0..mm).map(ainf).collect();
            return Ok(c);
        }
        window *= 2;
        if window > MAX_WINDOW {
            return Err(Error::Resource(format!(
                "no window up to {MAX_WINDOW} meets the entropy bound at stage {j}; last upper bound {}",
                e.upper
            )));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{endpoint_cycle, surgery::totalize, wedge_power};
    use crate::construct::basic::tent3;
    use crate::plmap::validate;

    #[test]
    fn first_stages_on_the_two_star() {
        let w = wedge_power(&tent3(), &PointOnGraph::Vertex(0), 2).unwrap();
        let star = totalize(&w, &rat(1, 20)).unwrap();
        let orbit = PeriodicOrbitSpec::new(&star.map, endpoint_cycle(&star.map).unwrap()).unwrap();
        let eps = rat(1, 20);
        let mut prev: Option<LogValue> = None;
        for j in 1..=3 {
            let c = purify_stage(&star.map, &orbit, &eps, j).unwrap();
            assert!(validate(&c.map.to_raw()).is_valid());
            let ends = &c.endpoint_cycle;
            for q in 0..ends.len() {
                assert_eq!(c.map.evaluate(&ends[q]), ends[(q + 1) % ends.len()]);
            }
            assert!(c.entropy.upper.lt_plus(&LogValue::max(star.entropy.lower.clone(), LogValue::of(3, 2)), &eps));
            if let Some(p) = &prev {
                assert!(c.entropy.upper >= *p);
            }
            prev = Some(c.entropy.lower.clone());
            for id in c.trace.point_ids() {
                assert!(c.map.partition().point_by_id(id).is_some(), "{id}");
            }
        }
    }
}
