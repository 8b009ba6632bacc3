//! Unfolding of inaccessible sides. Each declared side `(v, edge end)` is
//! cut off `v` and becomes a new endpoint, and the map is lifted through the
//! projection that glues the new endpoints back.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{kappa, Edge, EdgeEnd, PointOnGraph, TopoGraph};
use crate::plmap::{Dir, MarkovPartition, PLMarkovMap, Step};
use crate::rational::rat;

/// Germ of an edge at one of its ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Side {
    pub vertex: usize,
    pub edge: usize,
    pub end: EdgeEnd,
}

/// All sides at the vertices `vs`.
pub fn sides_at(g: &TopoGraph, vs: &[usize]) -> Vec<Side> {
    vs.iter()
        .flat_map(|&v| g.incidences(v).into_iter().map(move |(edge, end)| Side { vertex: v, edge, end }))
        .collect()
}

/// Side of the graph where `step` begins, if it begins at a vertex.
fn step_side(p: &MarkovPartition, step: Step) -> Option<Side> {
    let g = p.graph();
    let b = p.interval(step.interval);
    let e = g.edge(b.edge);
    let end = match step.dir {
        Dir::Forward if b.lo == rat(0, 1) => EdgeEnd::Start,
        Dir::Backward if b.hi == e.length => EdgeEnd::End,
        _ => return None,
    };
    Some(Side { vertex: e.vertex_at(end), edge: b.edge, end })
}

/// The step by which the image of basic interval `i` leaves `f(x)`, where
/// `x` is its lower end when `at_low` and its upper end otherwise.
fn germ(m: &PLMarkovMap, i: usize, at_low: bool) -> Step {
    let path = m.path(i);
    if at_low {
        path[0]
    } else {
        path[path.len() - 1].reversed()
    }
}

/// Image of a side under the map, when the image germ sits at a vertex.
pub fn side_image(m: &PLMarkovMap, s: Side) -> Option<Side> {
    let p = m.partition();
    let r = p.edge_intervals(s.edge);
    let (i, at_low) = match s.end {
        EdgeEnd::Start => (r.start, true),
        EdgeEnd::End => (r.end - 1, false),
    };
    step_side(p, germ(m, i, at_low))
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct UnfoldReport {
    pub detached: usize,
    pub kappa: i64,
    pub detached_below_kappa: bool,
    pub semiconjugacy_on_points: bool,
    pub samples: usize,
    pub semiconjugacy_on_samples: bool,
    /// Every new endpoint has exactly one preimage.
    pub unique_preimages: bool,
    pub failures: Vec<String>,
}

impl UnfoldReport {
    pub fn all_pass(&self) -> bool {
        self.detached_below_kappa && self.semiconjugacy_on_points && self.semiconjugacy_on_samples && self.unique_preimages
    }
}

#[derive(Clone, Debug)]
pub struct Unfolding {
    pub graph: TopoGraph,
    pub map: PLMarkovMap,
    /// Vertex of the unfolded graph to vertex of the original graph.
    pub projection: Vec<usize>,
    /// The new endpoints, one per detached side.
    pub endpoints: Vec<PointOnGraph>,
    pub report: UnfoldReport,
}

impl Unfolding {
    pub fn project(&self, x: &PointOnGraph) -> PointOnGraph {
        match x {
            PointOnGraph::Vertex(v) => PointOnGraph::Vertex(self.projection[*v]),
            other => other.clone(),
        }
    }
}

pub const UNFOLD_SAMPLES: usize = 1000;

/// Detaches the sides `nacc`, lifts `m` and checks the lift against `m`
/// on all cut points and on seeded random samples.
pub fn unfold(m: &PLMarkovMap, nacc: &[Side], seed: u64) -> Result<Unfolding> {
    let g = m.graph();
    let set: BTreeSet<Side> = nacc.iter().copied().collect();
    for s in &set {
        if s.edge >= g.num_edges() || g.edge(s.edge).vertex_at(s.end) != s.vertex {
            return Err(Error::domain(format!("side ({}, {}) is not at its vertex", s.vertex, s.edge)));
        }
    }
    let mut hit = BTreeSet::new();
    for s in &set {
        match side_image(m, *s) {
            Some(t) if set.contains(&t) => {
                hit.insert(t);
            }
            _ => {
                return Err(Error::domain(format!(
                    "sides are not a union of side cycles: the side of {} along {} leaves the set",
                    g.vertex_name(s.vertex),
                    g.edge(s.edge).id
                )))
            }
        }
    }
    if hit.len() != set.len() {
        return Err(Error::domain("sides are not a union of side cycles: two sides share an image"));
    }

    // Unfolded graph: surviving old vertices in order, then one new vertex per side.
    let mut uses = vec![0usize; g.num_vertices()];
    for e in g.edges() {
        uses[e.ends.0] += 1;
        uses[e.ends.1] += 1;
    }
    for s in &set {
        uses[s.vertex] -= 1;
    }
    let mut index = vec![usize::MAX; g.num_vertices()];
    let mut names = Vec::new();
    let mut projection = Vec::new();
    for v in 0..g.num_vertices() {
        if uses[v] > 0 {
            index[v] = names.len();
            names.push(g.vertex_name(v).to_string());
            projection.push(v);
        }
    }
    let mut edges: Vec<Edge> = g
        .edges()
        .iter()
        .map(|e| Edge { id: e.id.clone(), ends: (index[e.ends.0], index[e.ends.1]), length: e.length.clone() })
        .collect();
    let mut probe_names: BTreeSet<String> = g.vertices().iter().cloned().collect();
    let mut endpoints = Vec::new();
    for s in &set {
        let mut name = format!("{}~{}", g.vertex_name(s.vertex), g.edge(s.edge).id);
        while probe_names.contains(&name) {
            name.push('\'');
        }
        probe_names.insert(name.clone());
        let v = names.len();
        names.push(name);
        projection.push(s.vertex);
        match s.end {
            EdgeEnd::Start => edges[s.edge].ends.0 = v,
            EdgeEnd::End => edges[s.edge].ends.1 = v,
        }
        endpoints.push(PointOnGraph::Vertex(v));
    }
    let g2 = if set.is_empty() { g.clone() } else { TopoGraph::from_parts(names, edges)? };

    let p = m.partition();
    let p2 = MarkovPartition::new(g2.clone(), p.interior_cuts())?;
    let lift = |step: Step| -> PointOnGraph {
        match step_side(p, step) {
            Some(s) => PointOnGraph::Vertex(g2.edge(s.edge).vertex_at(s.end)),
            None => p.point(step.start(p)).clone(),
        }
    };
    for i in 0..m.num_intervals() {
        for w in m.path(i).windows(2) {
            if lift(w[0].reversed()) != lift(w[1]) {
                return Err(Error::domain(format!(
                    "lifted map is discontinuous: the image of {} crosses a detached side at {}",
                    p.interval(i).id,
                    p.describe(p.point(w[1].start(p)))
                )));
            }
        }
    }
    let mut images = Vec::with_capacity(p2.num_points());
    for x in 0..p2.num_points() {
        let mut y: Option<PointOnGraph> = None;
        for (i, at_low) in p2.intervals_at(x) {
            let z = lift(germ(m, i, at_low));
            match &y {
                Some(prev) if *prev != z => {
                    return Err(Error::domain(format!(
                        "lifted map is discontinuous at {}: {} and {}",
                        p2.describe(p2.point(x)),
                        p2.describe(prev),
                        p2.describe(&z)
                    )))
                }
                _ => y = Some(z),
            }
        }
        images.push(y.expect("every cut point bounds an interval"));
    }
    let map = PLMarkovMap::new(p2, images, m.paths().to_vec())?;

    let mut u = Unfolding { graph: g2, map, projection, endpoints, report: UnfoldReport::default() };
    u.report = check(m, &u, seed);
    Ok(u)
}

fn check(m: &PLMarkovMap, u: &Unfolding, seed: u64) -> UnfoldReport {
    let mut r = UnfoldReport { detached: u.endpoints.len(), kappa: kappa(m.graph()), ..Default::default() };
    r.detached_below_kappa = (r.detached as i64) < r.kappa;
    if !r.detached_below_kappa {
        r.failures.push(format!("{} detached sides, kappa {}", r.detached, r.kappa));
    }
    let agrees = |x: &PointOnGraph| m.evaluate(&u.project(x)) == u.project(&u.map.evaluate(x));
    let p2 = u.map.partition();
    r.semiconjugacy_on_points = true;
    for x in p2.points() {
        if !agrees(x) {
            r.semiconjugacy_on_points = false;
            r.failures.push(format!("semiconjugacy fails at {}", p2.describe(x)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    r.samples = UNFOLD_SAMPLES;
    r.semiconjugacy_on_samples = true;
    for _ in 0..UNFOLD_SAMPLES {
        let e = rng.gen_range(0..u.graph.num_edges());
        let den: i64 = rng.gen_range(2..1_000_000);
        let num: i64 = rng.gen_range(1..den);
        let x = u.graph.point(e, &u.graph.edge(e).length * rat(num, den)).expect("offset inside edge");
        if !agrees(&x) {
            r.semiconjugacy_on_samples = false;
            r.failures.push(format!("semiconjugacy fails at {}", u.graph.describe(&x)));
        }
    }
    // A new endpoint is never interior to an image path, so its preimages are cut points.
    let mut pre: BTreeMap<&PointOnGraph, usize> = u.endpoints.iter().map(|e| (e, 0)).collect();
    for x in 0..p2.num_points() {
        if let Some(c) = pre.get_mut(p2.point(u.map.point_image(x))) {
            *c += 1;
        }
    }
    r.unique_preimages = true;
    for (e, c) in pre {
        if c != 1 || u.graph.valence(vertex_of(e)) != 1 {
            r.unique_preimages = false;
            r.failures.push(format!("{} has {c} preimages", u.graph.describe(e)));
        }
    }
    r
}

fn vertex_of(x: &PointOnGraph) -> usize {
    match x {
        PointOnGraph::Vertex(v) => *v,
        PointOnGraph::Interior { .. } => unreachable!("new endpoints are vertices"),
    }
}

/// Whether `a` and `b` are the same map once vertices are matched through
/// the edges, which must agree in order, ids and lengths.
pub fn same_up_to_vertex_names(a: &PLMarkovMap, b: &PLMarkovMap) -> bool {
    let (ga, gb) = (a.graph(), b.graph());
    if ga.num_edges() != gb.num_edges() || ga.num_vertices() != gb.num_vertices() {
        return false;
    }
    let mut phi = vec![usize::MAX; ga.num_vertices()];
    for (ea, eb) in ga.edges().iter().zip(gb.edges()) {
        if ea.id != eb.id || ea.length != eb.length {
            return false;
        }
        for (va, vb) in [(ea.ends.0, eb.ends.0), (ea.ends.1, eb.ends.1)] {
            if phi[va] == usize::MAX {
                phi[va] = vb;
            } else if phi[va] != vb {
                return false;
            }
        }
    }
    let carry = |x: &PointOnGraph| match x {
        PointOnGraph::Vertex(v) => PointOnGraph::Vertex(phi[*v]),
        other => other.clone(),
    };
    let (pa, pb) = (a.partition(), b.partition());
    pa.num_points() == pb.num_points()
        && a.paths() == b.paths()
        && (0..pa.num_points()).all(|i| {
            pb.point_index(&carry(pa.point(i)))
                .is_some_and(|j| pb.point(b.point_image(j)) == &carry(pa.point(a.point_image(i))))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{b1_base, quotient_example, tent3, QuotientKind};

    #[test]
    fn empty_detachment_is_the_identity() {
        let m = tent3();
        let u = unfold(&m, &[], 0).unwrap();
        assert_eq!(u.graph, *m.graph());
        assert_eq!(u.map, m);
        assert!(u.report.all_pass());
    }

    #[test]
    fn sides_that_leave_the_set_are_rejected() {
        let m = b1_base();
        let s = sides_at(m.graph(), &[0]);
        assert!(unfold(&m, &s, 0).is_err());
        let both = sides_at(m.graph(), &[0, 1]);
        assert_eq!(side_image(&m, both[0]), Some(both[1]));
        assert!(unfold(&m, &both, 0).is_ok());
    }

    #[test]
    fn sigma_round_trip() {
        let ex = quotient_example(QuotientKind::Sigma, &rat(1, 10)).unwrap();
        let vs: Vec<usize> = ex.inaccessible.iter().map(vertex_of).collect();
        let sides = sides_at(&ex.graph, &vs);
        assert_eq!(sides.len(), 2);
        let u = unfold(&ex.map, &sides, 7).unwrap();
        assert!(u.report.all_pass(), "{:?}", u.report.failures);
        assert!(same_up_to_vertex_names(&u.map, &ex.tree.map));
    }

    #[test]
    fn dumbbell_round_trip() {
        let ex = quotient_example(QuotientKind::Dumbbell, &rat(1, 10)).unwrap();
        let vs: Vec<usize> = ex.inaccessible.iter().map(vertex_of).collect();
        let u = unfold(&ex.map, &sides_at(&ex.graph, &vs), 11).unwrap();
        assert_eq!(u.endpoints.len(), 4);
        assert!(u.report.all_pass(), "{:?}", u.report.failures);
        assert!(same_up_to_vertex_names(&u.map, &ex.tree.map));
    }
}
