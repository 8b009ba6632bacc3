//! Piecewise-linear tree maps from breakpoint data.
//!
//! A map is described by the images of finitely many breakpoints (every
//! vertex among them). Between consecutive breakpoints on an edge it is
//! linear onto the geodesic joining the two images. The cut-point set is the
//! forward orbit closure of the breakpoints, which must be finite.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{PointOnGraph, TopoGraph};
use crate::plmap::{Dir, MarkovPartition, PLMarkovMap, Step};
use crate::rational::Rational;

/// Straight piece of a geodesic: along `edge` from offset `from` to `to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seg {
    pub edge: usize,
    pub from: Rational,
    pub to: Rational,
}

impl Seg {
    fn length(&self) -> Rational {
        (&self.to - &self.from).abs()
    }
}

/// Rooted spanning structure of a tree for geodesic queries.
#[derive(Clone, Debug)]
pub struct TreePaths {
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
}

impl TreePaths {
    pub fn new(g: &TopoGraph) -> Result<Self> {
        if !g.is_tree() {
            return Err(Error::domain("construction needs a tree"));
        }
        let n = g.num_vertices();
        let mut adj = vec![Vec::new(); n];
        for (i, e) in g.edges().iter().enumerate() {
            adj[e.ends.0].push((i, e.ends.1));
            adj[e.ends.1].push((i, e.ends.0));
        }
        let mut parent = vec![None; n];
        let mut depth = vec![usize::MAX; n];
        depth[0] = 0;
        let mut q = VecDeque::from([0]);
        while let Some(v) = q.pop_front() {
            for &(e, w) in &adj[v] {
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    parent[w] = Some((e, v));
                    q.push_back(w);
                }
            }
        }
        Ok(TreePaths { parent, depth })
    }

    fn vertex_path(&self, g: &TopoGraph, mut u: usize, mut w: usize) -> Vec<Seg> {
        let mut head = Vec::new();
        let mut tail = Vec::new();
        let seg = |e: usize, from_v: usize| {
            let ed = g.edge(e);
            if ed.ends.0 == from_v {
                Seg { edge: e, from: Rational::zero(), to: ed.length.clone() }
            } else {
                Seg { edge: e, from: ed.length.clone(), to: Rational::zero() }
            }
        };
        while u != w {
            if self.depth[u] >= self.depth[w] {
                let (e, p) = self.parent[u].unwrap();
                head.push(seg(e, u));
                u = p;
            } else {
                let (e, p) = self.parent[w].unwrap();
                tail.push(seg(e, p));
                w = p;
            }
        }
        head.extend(tail.into_iter().rev());
        head
    }

    /// The arc from `p` to `q`.
    pub fn geodesic(&self, g: &TopoGraph, p: &PointOnGraph, q: &PointOnGraph) -> Vec<Seg> {
        if p == q {
            return Vec::new();
        }
        if let (
            PointOnGraph::Interior { edge: e1, offset: o1 },
            PointOnGraph::Interior { edge: e2, offset: o2 },
        ) = (p, q)
        {
            if e1 == e2 {
                return vec![Seg { edge: *e1, from: o1.clone(), to: o2.clone() }];
            }
        }
        let exits = |x: &PointOnGraph| -> Vec<(usize, Option<Seg>)> {
            match x {
                PointOnGraph::Vertex(v) => vec![(*v, None)],
                PointOnGraph::Interior { edge, offset } => {
                    let e = g.edge(*edge);
                    vec![
                        (e.ends.0, Some(Seg { edge: *edge, from: offset.clone(), to: Rational::zero() })),
                        (e.ends.1, Some(Seg { edge: *edge, from: offset.clone(), to: e.length.clone() })),
                    ]
                }
            }
        };
        let mut best: Option<(Rational, Vec<Seg>)> = None;
        for (u, s1) in exits(p) {
            for (w, s2) in exits(q) {
                let mut segs = Vec::new();
                segs.extend(s1.clone());
                segs.extend(self.vertex_path(g, u, w));
                if let Some(s) = &s2 {
                    segs.push(Seg { edge: s.edge, from: s.to.clone(), to: s.from.clone() });
                }
                let len: Rational = segs.iter().map(Seg::length).sum();
                if best.as_ref().is_none_or(|(b, _)| &len < b) {
                    best = Some((len, segs));
                }
            }
        }
        best.unwrap().1
    }
}

/// Point at arc length `s` along `segs`.
fn point_along(g: &TopoGraph, segs: &[Seg], s: &Rational) -> PointOnGraph {
    let mut rest = s.clone();
    for (k, seg) in segs.iter().enumerate() {
        let len = seg.length();
        if rest <= len || k + 1 == segs.len() {
            let off = if seg.to >= seg.from { &seg.from + &rest } else { &seg.from - &rest };
            return g.point(seg.edge, off).expect("point on geodesic");
        }
        rest -= len;
    }
    unreachable!("empty geodesic")
}

struct Piece {
    lo: Rational,
    hi: Rational,
    segs: Vec<Seg>,
    length: Rational,
}

/// Breakpoint data for a tree map.
#[derive(Clone, Debug)]
pub struct TreeMapBuilder {
    graph: TopoGraph,
    images: BTreeMap<PointOnGraph, PointOnGraph>,
    names: HashMap<PointOnGraph, String>,
    cuts: BTreeSet<PointOnGraph>,
    cap: usize,
}

impl TreeMapBuilder {
    pub fn new(graph: TopoGraph) -> Self {
        TreeMapBuilder { graph, images: BTreeMap::new(), names: HashMap::new(), cuts: BTreeSet::new(), cap: 200_000 }
    }

    /// Starts from the breakpoints of `m`, carried to `graph` by `carry`.
    pub fn from_map(m: &PLMarkovMap, graph: TopoGraph, carry: impl Fn(&PointOnGraph) -> PointOnGraph) -> Self {
        let mut b = TreeMapBuilder::new(graph);
        let p = m.partition();
        for i in 0..p.num_points() {
            let x = carry(p.point(i));
            b.set(x.clone(), carry(p.point(m.point_image(i))));
            if matches!(p.point(i), PointOnGraph::Interior { .. }) {
                b.name(x, p.point_id(i));
            }
        }
        b
    }

    pub fn graph(&self) -> &TopoGraph {
        &self.graph
    }

    pub fn set(&mut self, x: PointOnGraph, image: PointOnGraph) -> &mut Self {
        self.images.insert(x, image);
        self
    }

    pub fn image_of(&self, x: &PointOnGraph) -> Option<&PointOnGraph> {
        self.images.get(x)
    }

    /// Removes every breakpoint strictly inside `(lo, hi)` on `edge`.
    pub fn clear_inside(&mut self, edge: usize, lo: &Rational, hi: &Rational) {
        self.images.retain(|x, _| match x {
            PointOnGraph::Interior { edge: e, offset } => !(*e == edge && offset > lo && offset < hi),
            PointOnGraph::Vertex(_) => true,
        });
    }

    pub fn name(&mut self, x: PointOnGraph, id: impl Into<String>) -> &mut Self {
        if let PointOnGraph::Interior { .. } = x {
            self.names.insert(x, id.into());
        }
        self
    }

    /// Forces `x` into the cut-point set.
    pub fn cut(&mut self, x: PointOnGraph) -> &mut Self {
        self.cuts.insert(x);
        self
    }

    pub fn set_cap(&mut self, cap: usize) -> &mut Self {
        self.cap = cap;
        self
    }

    pub fn build(&self) -> Result<PLMarkovMap> {
        let g = &self.graph;
        let paths = TreePaths::new(g)?;
        for v in 0..g.num_vertices() {
            if !self.images.contains_key(&PointOnGraph::Vertex(v)) {
                return Err(Error::domain(format!("no image for vertex {:?}", g.vertex_name(v))));
            }
        }
        // Linear pieces per edge.
        let mut pieces: Vec<Vec<Piece>> = Vec::with_capacity(g.num_edges());
        for (ei, e) in g.edges().iter().enumerate() {
            let mut bps: Vec<(Rational, &PointOnGraph)> =
                vec![(Rational::zero(), &self.images[&PointOnGraph::Vertex(e.ends.0)])];
            for (x, y) in &self.images {
                if let PointOnGraph::Interior { edge, offset } = x {
                    if *edge == ei {
                        bps.push((offset.clone(), y));
                    }
                }
            }
            bps.push((e.length.clone(), &self.images[&PointOnGraph::Vertex(e.ends.1)]));
            bps.sort_by(|a, b| a.0.cmp(&b.0));
            let mut ps = Vec::with_capacity(bps.len() - 1);
            for w in bps.windows(2) {
                let segs = paths.geodesic(g, w[0].1, w[1].1);
                let length: Rational = segs.iter().map(Seg::length).sum();
                if length.is_zero() {
                    return Err(Error::domain(format!(
                        "map is constant on edge {:?} between offsets {} and {}",
                        e.id, w[0].0, w[1].0
                    )));
                }
                ps.push(Piece { lo: w[0].0.clone(), hi: w[1].0.clone(), segs, length });
            }
            pieces.push(ps);
        }
        let eval = |x: &PointOnGraph| -> PointOnGraph {
            if let Some(y) = self.images.get(x) {
                return y.clone();
            }
            let PointOnGraph::Interior { edge, offset } = x else { unreachable!() };
            let ps = &pieces[*edge];
            let k = ps.partition_point(|p| &p.hi <= offset);
            let p = &ps[k];
            let s = (offset - &p.lo) * &p.length / (&p.hi - &p.lo);
            point_along(g, &p.segs, &s)
        };

        let mut set: BTreeSet<PointOnGraph> = BTreeSet::new();
        let mut queue: VecDeque<PointOnGraph> = VecDeque::new();
        let seeds = self.images.iter().flat_map(|(x, y)| [x.clone(), y.clone()]).chain(self.cuts.iter().cloned());
        for x in seeds {
            if set.insert(x.clone()) {
                queue.push_back(x);
            }
        }
        while let Some(x) = queue.pop_front() {
            let y = eval(&x);
            if set.insert(y.clone()) {
                if set.len() > self.cap {
                    return Err(Error::Resource(format!("cut-point orbit closure exceeds {} points", self.cap)));
                }
                queue.push_back(y);
            }
        }

        let interior: Vec<(usize, Rational, Option<String>)> = set
            .iter()
            .filter_map(|x| match x {
                PointOnGraph::Interior { edge, offset } => Some((*edge, offset.clone(), self.names.get(x).cloned())),
                PointOnGraph::Vertex(_) => None,
            })
            .collect();
        let part = MarkovPartition::new(g.clone(), interior)?;
        let images: Vec<PointOnGraph> = part.points().iter().map(&eval).collect();
        let mut out_paths = Vec::with_capacity(part.num_intervals());
        for b in part.intervals() {
            let fa = &images[b.start];
            let fb = &images[b.end];
            let segs = paths.geodesic(g, fa, fb);
            let mut steps = Vec::new();
            for seg in &segs {
                let r = part.edge_intervals(seg.edge);
                if seg.from < seg.to {
                    for i in r {
                        let iv = part.interval(i);
                        if iv.lo >= seg.from && iv.hi <= seg.to {
                            steps.push(Step::new(i, Dir::Forward));
                        }
                    }
                } else {
                    for i in r.rev() {
                        let iv = part.interval(i);
                        if iv.lo >= seg.to && iv.hi <= seg.from {
                            steps.push(Step::new(i, Dir::Backward));
                        }
                    }
                }
            }
            out_paths.push(steps);
        }
        PLMarkovMap::new(part, images, out_paths)
    }
}

/// Carries points of `g` to the graph obtained by subdividing `edge` at
/// `offset` (see [`TopoGraph::subdivide`]).
pub fn subdivision_carry(edge: usize, offset: Rational, vertex: usize) -> impl Fn(&PointOnGraph) -> PointOnGraph {
    move |x| match x {
        PointOnGraph::Vertex(v) => PointOnGraph::Vertex(*v),
        PointOnGraph::Interior { edge: e, offset: o } => {
            if *e < edge {
                x.clone()
            } else if *e > edge {
                PointOnGraph::Interior { edge: e + 1, offset: o.clone() }
            } else if o < &offset {
                x.clone()
            } else if o == &offset {
                PointOnGraph::Vertex(vertex)
            } else {
                PointOnGraph::Interior { edge: e + 1, offset: o - &offset }
            }
        }
    }
}

/// The same map with the cut point `x` made a vertex. Returns the new map and
/// the vertex. Vertices are returned unchanged.
pub fn make_vertex(m: &PLMarkovMap, x: &PointOnGraph) -> Result<(PLMarkovMap, usize)> {
    match x {
        PointOnGraph::Vertex(v) => Ok((m.clone(), *v)),
        PointOnGraph::Interior { edge, offset } => {
            if m.partition().point_index(x).is_none() {
                return Err(Error::domain("subdivision point must be a cut point"));
            }
            let (g, v) = m.graph().subdivide(*edge, offset)?;
            let carry = subdivision_carry(*edge, offset.clone(), v);
            let b = TreeMapBuilder::from_map(m, g, &carry);
            Ok((b.build()?, v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::catalog;
    use crate::plmap::incidence_matrix;
    use crate::rational::{int, rat};

    #[test]
    fn geodesics_in_a_star() {
        let g = catalog::star(3);
        let t = TreePaths::new(&g).unwrap();
        let p = g.point(0, rat(1, 2)).unwrap();
        let q = g.point(2, rat(1, 4)).unwrap();
        let segs = t.geodesic(&g, &p, &q);
        let len: Rational = segs.iter().map(Seg::length).sum();
        assert_eq!(len, rat(3, 4));
        assert_eq!(point_along(&g, &segs, &rat(1, 2)), PointOnGraph::Vertex(0));
    }

    #[test]
    fn tent_from_breakpoints() {
        let g = catalog::arc();
        let pt = |x: Rational| g.point(0, x).unwrap();
        let mut b = TreeMapBuilder::new(g.clone());
        b.set(pt(int(0)), pt(int(0)))
            .set(pt(rat(1, 3)), pt(int(1)))
            .set(pt(rat(2, 3)), pt(int(0)))
            .set(pt(int(1)), pt(int(1)));
        let m = b.build().unwrap();
        assert_eq!(incidence_matrix(&m).to_dense(), vec![vec![1, 1, 1]; 3]);
        assert_eq!(m.evaluate(&pt(rat(1, 2))), pt(rat(1, 2)));
    }

    #[test]
    fn orbit_closure_adds_points() {
        let g = catalog::arc();
        let pt = |x: Rational| g.point(0, x).unwrap();
        let mut b = TreeMapBuilder::new(g.clone());
        b.set(pt(int(0)), pt(int(0))).set(pt(rat(1, 2)), pt(int(1))).set(pt(int(1)), pt(int(0)));
        b.cut(pt(rat(1, 8)));
        let m = b.build().unwrap();
        // 1/8 -> 1/4 -> 1/2 -> 1 -> 0
        assert!(m.partition().point_index(&pt(rat(1, 4))).is_some());
        assert_eq!(m.num_intervals(), 4);
    }

    #[test]
    fn subdividing_keeps_the_map() {
        let g = catalog::arc();
        let pt = |x: Rational| g.point(0, x).unwrap();
        let mut b = TreeMapBuilder::new(g.clone());
        b.set(pt(int(0)), pt(int(0)))
            .set(pt(rat(1, 3)), pt(int(1)))
            .set(pt(rat(2, 3)), pt(int(0)))
            .set(pt(int(1)), pt(int(1)));
        let m = b.build().unwrap();
        let (m2, v) = make_vertex(&m, &pt(rat(1, 3))).unwrap();
        assert_eq!(m2.graph().num_edges(), 2);
        assert_eq!(m2.num_intervals(), 3);
        assert_eq!(m2.evaluate(&PointOnGraph::Vertex(v)), PointOnGraph::Vertex(1));
    }
}
