//! Combinatorial topological graphs: finite metric multigraphs with rational
//! edge lengths, together with the Nadler invariants `Disc(G)` and
//! `kappa(G)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, int, Rational};

/// Which end of an edge. Offsets along an edge run from `Start` (offset 0)
/// to `End` (offset = length); loops keep this orientation too.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeEnd {
    Start,
    End,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub ends: (usize, usize),
    pub length: Rational,
}

impl Edge {
    pub fn vertex_at(&self, end: EdgeEnd) -> usize {
        match end {
            EdgeEnd::Start => self.ends.0,
            EdgeEnd::End => self.ends.1,
        }
    }

    pub fn is_loop(&self) -> bool {
        self.ends.0 == self.ends.1
    }
}

/// A validated topological graph. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopoGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
}

/// A point of a graph in canonical form: offsets 0 and `length` are always
/// reported as the corresponding vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointOnGraph {
    Vertex(usize),
    Interior { edge: usize, offset: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointCensus {
    pub valence: Vec<usize>,
    pub endpoints: Vec<usize>,
    pub branching: Vec<usize>,
}

impl TopoGraph {
    /// Builds a graph from vertex names and `(id, start, end, length)` edges.
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S, S, Rational)]) -> Result<Self> {
        let names: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        let mut index = HashMap::new();
        for (i, v) in names.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate vertex id {v:?}")));
            }
        }
        let mut es = Vec::with_capacity(edges.len());
        for (id, a, b, len) in edges {
            let look = |v: &S| {
                index.get(v.as_ref()).copied().ok_or_else(|| {
                    Error::InvalidGraph(format!(
                        "edge {:?} references unknown vertex {:?}",
                        id.as_ref(),
                        v.as_ref()
                    ))
                })
            };
            es.push(Edge { id: id.as_ref().to_string(), ends: (look(a)?, look(b)?), length: len.clone() });
        }
        Self::from_parts(names, es)
    }

    pub fn from_parts(vertices: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidGraph(m));
        if edges.is_empty() {
            return bad("a graph needs at least one edge".into());
        }
        let mut vertex_index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return bad(format!("duplicate vertex id {v:?}"));
            }
        }
        let mut edge_index = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            if edge_index.insert(e.id.clone(), i).is_some() {
                return bad(format!("duplicate edge id {:?}", e.id));
            }
            if e.ends.0 >= vertices.len() || e.ends.1 >= vertices.len() {
                return bad(format!("edge {:?} references a missing vertex", e.id));
            }
            if !e.length.is_positive() {
                return bad(format!("edge {:?} has non-positive length", e.id));
            }
        }
        let g = TopoGraph { vertices, edges, vertex_index, edge_index };
        let mut touched = vec![false; g.vertices.len()];
        for e in &g.edges {
            touched[e.ends.0] = true;
            touched[e.ends.1] = true;
        }
        if let Some(v) = touched.iter().position(|t| !t) {
            return bad(format!("vertex {:?} is isolated", g.vertices[v]));
        }
        if !g.is_connected() {
            return bad("graph is not connected".into());
        }
        Ok(g)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &Edge {
        &self.edges[i]
    }

    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_id(&self, name: &str) -> Option<usize> {
        self.vertex_index.get(name).copied()
    }

    pub fn edge_id(&self, id: &str) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn total_length(&self) -> Rational {
        self.edges.iter().map(|e| e.length.clone()).sum()
    }

    /// Incident edge-ends of `v`; a loop appears twice.
    pub fn incidences(&self, v: usize) -> Vec<(usize, EdgeEnd)> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.ends.0 == v {
                out.push((i, EdgeEnd::Start));
            }
            if e.ends.1 == v {
                out.push((i, EdgeEnd::End));
            }
        }
        out
    }

    pub fn valence(&self, v: usize) -> usize {
        self.incidences(v).len()
    }

    fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.vertices.len());
        for e in &self.edges {
            uf.union(e.ends.0, e.ends.1);
        }
        uf.count() == 1
    }

    pub fn is_tree(&self) -> bool {
        self.euler_characteristic() == 1
    }

    /// `|V| - |E|`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64
    }

    pub fn point_census(&self) -> PointCensus {
        let valence: Vec<usize> = (0..self.vertices.len()).map(|v| self.valence(v)).collect();
        let endpoints = (0..valence.len()).filter(|&v| valence[v] == 1).collect();
        let branching = (0..valence.len()).filter(|&v| valence[v] > 2).collect();
        PointCensus { valence, endpoints, branching }
    }

    /// Canonical point at `offset` along `edge`.
    pub fn point(&self, edge: usize, offset: Rational) -> Result<PointOnGraph> {
        let e = &self.edges[edge];
        if offset.is_negative() || offset > e.length {
            return Err(Error::Domain(format!(
                "offset {} outside edge {:?} of length {}",
                format_rational(&offset),
                e.id,
                format_rational(&e.length)
            )));
        }
        Ok(if offset.is_zero() {
            PointOnGraph::Vertex(e.ends.0)
        } else if offset == e.length {
            PointOnGraph::Vertex(e.ends.1)
        } else {
            PointOnGraph::Interior { edge, offset }
        })
    }

    pub fn describe(&self, p: &PointOnGraph) -> String {
        match p {
            PointOnGraph::Vertex(v) => self.vertices[*v].clone(),
            PointOnGraph::Interior { edge, offset } => {
                format!("{}@{}", self.edges[*edge].id, format_rational(offset))
            }
        }
    }

    /// Splits `edge` at an interior `offset`, producing edges `<id>.0` and
    /// `<id>.1` and a new vertex. Returns the new graph and the index of the
    /// new vertex.
    pub fn subdivide(&self, edge: usize, offset: &Rational) -> Result<(TopoGraph, usize)> {
        let e = &self.edges[edge];
        if !offset.is_positive() || offset >= &e.length {
            return Err(Error::domain("subdivision point must be interior to the edge"));
        }
        let mut vertices = self.vertices.clone();
        let name = format!("{}@{}", e.id, format_rational(offset));
        vertices.push(name);
        let nv = vertices.len() - 1;
        let mut edges = Vec::with_capacity(self.edges.len() + 1);
        for (i, f) in self.edges.iter().enumerate() {
            if i == edge {
                edges.push(Edge { id: format!("{}.0", f.id), ends: (f.ends.0, nv), length: offset.clone() });
                edges.push(Edge {
                    id: format!("{}.1", f.id),
                    ends: (nv, f.ends.1),
                    length: &f.length - offset,
                });
            } else {
                edges.push(f.clone());
            }
        }
        Ok((TopoGraph::from_parts(vertices, edges)?, nv))
    }

    /// Merges each class of vertices into one vertex (named after the first
    /// member). Edge ids and lengths are unchanged.
    pub fn identify_points(&self, classes: &[Vec<usize>]) -> Result<Quotient> {
        let mut rep: Vec<Option<usize>> = vec![None; self.vertices.len()];
        for (ci, class) in classes.iter().enumerate() {
            if class.is_empty() {
                return Err(Error::domain("empty identification class"));
            }
            for &v in class {
                if v >= self.vertices.len() {
                    return Err(Error::domain(format!("class {ci} contains a non-vertex")));
                }
                if rep[v].is_some() {
                    return Err(Error::domain(format!(
                        "vertex {:?} appears in more than one class",
                        self.vertices[v]
                    )));
                }
                rep[v] = Some(ci);
            }
        }
        let mut names = Vec::new();
        let mut vertex_map = vec![usize::MAX; self.vertices.len()];
        let mut class_slot: Vec<Option<usize>> = vec![None; classes.len()];
        for v in 0..self.vertices.len() {
            match rep[v] {
                Some(ci) => {
                    let slot = *class_slot[ci].get_or_insert_with(|| {
                        names.push(self.vertices[classes[ci][0]].clone());
                        names.len() - 1
                    });
                    vertex_map[v] = slot;
                }
                None => {
                    names.push(self.vertices[v].clone());
                    vertex_map[v] = names.len() - 1;
                }
            }
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                id: e.id.clone(),
                ends: (vertex_map[e.ends.0], vertex_map[e.ends.1]),
                length: e.length.clone(),
            })
            .collect();
        Ok(Quotient { graph: TopoGraph::from_parts(names, edges)?, vertex_map })
    }
}

impl fmt::Display for TopoGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "graph(V={}, E={})", self.vertices.len(), self.edges.len())
    }
}

/// Result of [`TopoGraph::identify_points`].
#[derive(Clone, Debug)]
pub struct Quotient {
    pub graph: TopoGraph,
    /// Old vertex index to new vertex index.
    pub vertex_map: Vec<usize>,
}

impl Quotient {
    /// The projection on points. Interior points keep their edge and offset.
    pub fn project(&self, p: &PointOnGraph) -> PointOnGraph {
        match p {
            PointOnGraph::Vertex(v) => PointOnGraph::Vertex(self.vertex_map[*v]),
            other => other.clone(),
        }
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    comps: usize,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), comps: n }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
            self.comps -= 1;
        }
    }

    pub(crate) fn count(&self) -> usize {
        self.comps
    }
}

// ---------------------------------------------------------------------------
// Disconnecting numbers
// ---------------------------------------------------------------------------

/// A finite point set in the normal form used by the disconnection search:
/// a set of vertices plus at most one interior marker per edge. Two interior
/// points on one edge always disconnect, so nothing is lost.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PointSet {
    pub vertices: BTreeSet<usize>,
    pub marked_edges: BTreeSet<usize>,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.vertices.len() + self.marked_edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Number of connected components of `G \ D`.
///
/// Each unmarked edge contributes one open piece joined to its surviving
/// endpoints; a marked edge contributes two half-open stubs, each joined to
/// its own endpoint if that survives. A piece with no surviving endpoint is
/// a component on its own.
pub fn complement_components(g: &TopoGraph, removed_vertices: &[bool], marked: &[bool]) -> usize {
    let nv = g.num_vertices();
    let mut nodes = nv;
    let mut links: Vec<(usize, usize)> = Vec::new();
    for (i, e) in g.edges().iter().enumerate() {
        if marked[i] {
            for v in [e.ends.0, e.ends.1] {
                let stub = nodes;
                nodes += 1;
                if !removed_vertices[v] {
                    links.push((stub, v));
                }
            }
        } else {
            let piece = nodes;
            nodes += 1;
            for v in [e.ends.0, e.ends.1] {
                if !removed_vertices[v] {
                    links.push((piece, v));
                }
            }
        }
    }
    let mut uf = UnionFind::new(nodes);
    for (a, b) in links {
        uf.union(a, b);
    }
    uf.count() - removed_vertices.iter().filter(|&&r| r).count()
}

pub fn disconnects(g: &TopoGraph, set: &PointSet) -> bool {
    let mut rv = vec![false; g.num_vertices()];
    for &v in &set.vertices {
        rv[v] = true;
    }
    let mut me = vec![false; g.num_edges()];
    for &e in &set.marked_edges {
        me[e] = true;
    }
    complement_components(g, &rv, &me) > 1
}

/// A maximum-cardinality non-disconnecting set, found by exhaustive
/// branch-and-bound over the vertex/edge-marker family. Disconnection is
/// monotone under adding points, so the family is downward closed.
pub fn max_nondisconnecting_set(g: &TopoGraph) -> PointSet {
    let nv = g.num_vertices();
    let total = nv + g.num_edges();
    let mut removed = vec![false; nv];
    let mut marked = vec![false; g.num_edges()];
    let mut current: Vec<usize> = Vec::new();
    let mut best: Vec<usize> = Vec::new();

    fn set(el: usize, nv: usize, on: bool, removed: &mut [bool], marked: &mut [bool]) {
        if el < nv {
            removed[el] = on;
        } else {
            marked[el - nv] = on;
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        g: &TopoGraph,
        next: usize,
        total: usize,
        nv: usize,
        removed: &mut Vec<bool>,
        marked: &mut Vec<bool>,
        current: &mut Vec<usize>,
        best: &mut Vec<usize>,
    ) {
        if current.len() > best.len() {
            *best = current.clone();
        }
        // Elements that keep the complement connected when added alone.
        let mut addable = Vec::new();
        for el in next..total {
            set(el, nv, true, removed, marked);
            if complement_components(g, removed, marked) == 1 {
                addable.push(el);
            }
            set(el, nv, false, removed, marked);
        }
        if current.len() + addable.len() <= best.len() {
            return;
        }
        for (k, &el) in addable.iter().enumerate() {
            if current.len() + (addable.len() - k) <= best.len() {
                return;
            }
            set(el, nv, true, removed, marked);
            current.push(el);
            search(g, el + 1, total, nv, removed, marked, current, best);
            current.pop();
            set(el, nv, false, removed, marked);
        }
    }

    search(g, 0, total, nv, &mut removed, &mut marked, &mut current, &mut best);
    let mut out = PointSet::default();
    for el in best {
        if el < nv {
            out.vertices.insert(el);
        } else {
            out.marked_edges.insert(el - nv);
        }
    }
    out
}

/// `Disc(G)`: one more than the largest non-disconnecting point set.
pub fn disconnection_number(g: &TopoGraph) -> usize {
    max_nondisconnecting_set(g).len() + 1
}

/// `kappa(G) = Disc(G) - chi(G) + 1`.
pub fn kappa(g: &TopoGraph) -> i64 {
    disconnection_number(g) as i64 - g.euler_characteristic() + 1
}

/// Combinatorial normal form of a subgraph: whole edges plus stubs (an
/// initial segment of an excluded edge hanging from an included vertex).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgraphModel {
    pub edges: BTreeSet<usize>,
    pub stubs: BTreeSet<(usize, EdgeEnd)>,
    pub vertices: BTreeSet<usize>,
}

impl SubgraphModel {
    /// Realizes the model as a graph; stub `k` of parent edge `e` has length
    /// `len(e) / resolution` and a fresh endpoint.
    pub fn realize(&self, g: &TopoGraph, resolution: u32) -> Result<TopoGraph> {
        let verts: Vec<usize> = self.vertices.iter().copied().collect();
        let mut names: Vec<String> = verts.iter().map(|&v| g.vertex_name(v).to_string()).collect();
        let pos: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut edges = Vec::new();
        for &e in &self.edges {
            let ed = g.edge(e);
            edges.push(Edge { id: ed.id.clone(), ends: (pos[&ed.ends.0], pos[&ed.ends.1]), length: ed.length.clone() });
        }
        for &(e, end) in &self.stubs {
            let ed = g.edge(e);
            names.push(format!("{}:{:?}:tip", ed.id, end));
            let tip = names.len() - 1;
            edges.push(Edge {
                id: format!("{}:{:?}", ed.id, end),
                ends: (pos[&ed.vertex_at(end)], tip),
                length: &ed.length / int(i64::from(resolution)),
            });
        }
        TopoGraph::from_parts(names, edges)
    }
}

/// Enumerates subgraph models (edge subsets with every stub pattern) and
/// returns the maximum disconnection number over them together with a
/// witness. `max_models` caps the enumeration.
pub fn kappa_by_subgraphs(g: &TopoGraph, resolution: u32, max_models: usize) -> Result<(usize, SubgraphModel)> {
    if resolution == 0 {
        return Err(Error::domain("resolution must be positive"));
    }
    let ne = g.num_edges();
    if ne > 24 {
        return Err(Error::Resource(format!("{ne} edges is beyond the subgraph enumeration limit")));
    }
    let mut count = 0usize;
    let mut best: Option<(usize, SubgraphModel)> = None;
    let mut consider = |model: SubgraphModel, count: &mut usize| -> Result<()> {
        *count += 1;
        if *count > max_models {
            return Err(Error::Resource(format!("more than {max_models} subgraph models")));
        }
        let h = model.realize(g, resolution)?;
        let d = disconnection_number(&h);
        if best.as_ref().is_none_or(|(b, _)| d > *b) {
            best = Some((d, model));
        }
        Ok(())
    };
    for mask in 0u32..(1u32 << ne) {
        let edges: BTreeSet<usize> = (0..ne).filter(|i| mask >> i & 1 == 1).collect();
        let vertex_choices: Vec<BTreeSet<usize>> = if edges.is_empty() {
            (0..g.num_vertices()).map(|v| BTreeSet::from([v])).collect()
        } else {
            let vs: BTreeSet<usize> = edges.iter().flat_map(|&e| [g.edge(e).ends.0, g.edge(e).ends.1]).collect();
            let idx: BTreeMap<usize, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let mut uf = UnionFind::new(vs.len());
            for &e in &edges {
                uf.union(idx[&g.edge(e).ends.0], idx[&g.edge(e).ends.1]);
            }
            if uf.count() != 1 {
                continue;
            }
            vec![vs]
        };
        for vertices in vertex_choices {
            let slots: Vec<(usize, EdgeEnd)> = vertices
                .iter()
                .flat_map(|&v| g.incidences(v))
                .filter(|(e, _)| !edges.contains(e))
                .collect();
            if slots.len() > 20 {
                return Err(Error::Resource("too many stub slots at one subgraph".into()));
            }
            for smask in 0u32..(1u32 << slots.len()) {
                let stubs: BTreeSet<(usize, EdgeEnd)> =
                    (0..slots.len()).filter(|i| smask >> i & 1 == 1).map(|i| slots[i]).collect();
                if edges.is_empty() && stubs.is_empty() {
                    continue;
                }
                consider(SubgraphModel { edges: edges.clone(), stubs, vertices: vertices.clone() }, &mut count)?;
            }
        }
    }
    let (d, model) = best.expect("at least one subgraph model");
    Ok((d, model))
}

/// The standard catalog used by tests and the acceptance harness. Every edge
/// has length 1.
pub mod catalog {
    use super::*;

    fn one() -> Rational {
        Rational::one()
    }

    fn build(vertices: &[&str], edges: &[(&str, &str, &str)]) -> TopoGraph {
        let es: Vec<(&str, &str, &str, Rational)> = edges.iter().map(|&(i, a, b)| (i, a, b, one())).collect();
        TopoGraph::new(vertices, &es).expect("catalog graph is valid")
    }

    pub fn arc() -> TopoGraph {
        build(&["a", "b"], &[("e", "a", "b")])
    }

    pub fn circle() -> TopoGraph {
        build(&["v"], &[("e", "v", "v")])
    }

    /// `n` arms of length 1 around the center `c`.
    pub fn star(n: usize) -> TopoGraph {
        let mut names = vec!["c".to_string()];
        names.extend((0..n).map(|i| format!("t{i}")));
        let edges: Vec<(String, String, String, Rational)> =
            (0..n).map(|i| (format!("e{i}"), "c".to_string(), format!("t{i}"), one())).collect();
        TopoGraph::new(&names, &edges).expect("star is valid")
    }

    /// Full binary tree with `2^n` endpoints.
    pub fn binary_tree(n: u32) -> TopoGraph {
        assert!(n >= 1);
        let mut names = vec!["r".to_string()];
        let mut edges: Vec<(String, String, String, Rational)> = Vec::new();
        fn grow(parent: &str, depth: u32, n: u32, names: &mut Vec<String>, edges: &mut Vec<(String, String, String, Rational)>) {
            for side in 0..2 {
                let child = format!("{parent}{side}");
                names.push(child.clone());
                edges.push((format!("e{child}"), parent.to_string(), child.clone(), Rational::one()));
                if depth + 1 < n {
                    grow(&child, depth + 1, n, names, edges);
                }
            }
        }
        grow("r", 0, n, &mut names, &mut edges);
        TopoGraph::new(&names, &edges).expect("binary tree is valid")
    }

    pub fn sigma() -> TopoGraph {
        build(&["b", "t"], &[("loop", "b", "b"), ("tail", "b", "t")])
    }

    pub fn theta() -> TopoGraph {
        build(&["u", "v"], &[("e0", "u", "v"), ("e1", "u", "v"), ("e2", "u", "v")])
    }

    pub fn figure_eight() -> TopoGraph {
        build(&["v"], &[("l0", "v", "v"), ("l1", "v", "v")])
    }

    pub fn dumbbell() -> TopoGraph {
        build(&["l", "r"], &[("cl", "l", "l"), ("bar", "l", "r"), ("cr", "r", "r")])
    }
}

#[cfg(test)]
mod tests {
    use super::catalog::*;
    use super::*;
    use crate::rational::rat;

    #[test]
    fn euler_characteristics() {
        assert_eq!(circle().euler_characteristic(), 0);
        assert_eq!(arc().euler_characteristic(), 1);
        assert_eq!(theta().euler_characteristic(), -1);
    }

    #[test]
    fn census() {
        let s = star(3);
        let c = s.point_census();
        assert_eq!(c.valence[0], 3);
        assert_eq!(c.branching, vec![0]);
        let a = arc().point_census();
        assert_eq!(a.endpoints, vec![0, 1]);
        let o = circle().point_census();
        assert_eq!(o.valence, vec![2]);
        assert!(o.endpoints.is_empty() && o.branching.is_empty());
    }

    #[test]
    fn rejects_bad_graphs() {
        let one = Rational::one();
        assert!(TopoGraph::new(&["a", "b", "c"], &[("e", "a", "b", one.clone())]).is_err());
        assert!(TopoGraph::new(&["a", "b"], &[("e", "a", "b", Rational::zero())]).is_err());
        assert!(TopoGraph::new(&["a", "a"], &[("e", "a", "a", one.clone())]).is_err());
        assert!(TopoGraph::new::<&str>(&["a"], &[]).is_err());
        assert!(TopoGraph::new(&["a", "b", "c", "d"], &[("e", "a", "b", one.clone()), ("f", "c", "d", one)]).is_err());
    }

    #[test]
    fn canonical_points() {
        let g = arc();
        assert_eq!(g.point(0, Rational::zero()).unwrap(), PointOnGraph::Vertex(0));
        assert_eq!(g.point(0, Rational::one()).unwrap(), PointOnGraph::Vertex(1));
        assert!(matches!(g.point(0, rat(1, 2)).unwrap(), PointOnGraph::Interior { .. }));
        assert!(g.point(0, rat(3, 2)).is_err());
    }

    #[test]
    fn disc_small_cases() {
        assert_eq!(disconnection_number(&circle()), 2);
        assert_eq!(disconnection_number(&arc()), 3);
        assert_eq!(disconnection_number(&theta()), 3);
        for n in 2..=6 {
            assert_eq!(disconnection_number(&star(n)), n + 1, "star {n}");
        }
    }

    #[test]
    fn kappa_small_cases() {
        assert_eq!(kappa(&circle()), 3);
        assert_eq!(kappa(&theta()), 5);
        assert_eq!(kappa(&sigma()), 4);
        for n in 2..=6 {
            assert_eq!(kappa(&star(n)), n as i64 + 1);
        }
    }

    #[test]
    fn theta_subgraph_witness_is_four_endpoint_tree() {
        let (d, w) = kappa_by_subgraphs(&theta(), 2, 100_000).unwrap();
        assert_eq!(d, 5);
        let h = w.realize(&theta(), 2).unwrap();
        assert!(h.is_tree());
        assert_eq!(h.point_census().endpoints.len(), 4);
    }

    #[test]
    fn identify_arc_endpoints_gives_circle() {
        let q = arc().identify_points(&[vec![0, 1]]).unwrap();
        assert_eq!(q.graph.num_vertices(), 1);
        assert_eq!(q.graph.euler_characteristic(), 0);
        assert!(arc().identify_points(&[vec![0], vec![0, 1]]).is_err());
        assert!(arc().identify_points(&[vec![5]]).is_err());
    }

    #[test]
    fn identify_star_endpoints() {
        let s3 = star(3);
        let sig = s3.identify_points(&[vec![1, 2]]).unwrap().graph;
        assert_eq!(sig.euler_characteristic(), 0);
        assert_eq!(kappa(&sig), kappa(&sigma()));
        let s4 = star(4);
        let eight = s4.identify_points(&[vec![1, 3], vec![2, 4]]).unwrap().graph;
        assert_eq!(eight.euler_characteristic(), -1);
        assert_eq!(disconnection_number(&eight), disconnection_number(&figure_eight()));
    }

    #[test]
    fn subdivision_keeps_euler() {
        let (g, v) = theta().subdivide(1, &rat(1, 3)).unwrap();
        assert_eq!(g.euler_characteristic(), -1);
        assert_eq!(g.valence(v), 2);
        assert_eq!(g.total_length(), theta().total_length());
    }
}
