//! Piecewise-linear Markov self-maps of graphs.
//!
//! A map is given by a [`MarkovPartition`], the image of every cut point and,
//! for every basic interval, the oriented edge path it is stretched over
//! linearly.

mod entropy;
mod horseshoe;
mod markov;
pub(crate) mod periodic;
mod refine;

pub use entropy::{entropy, BlockEnclosure, EntropyEnclosure, EntropyOptions};
pub use horseshoe::{loose_horseshoe_search, Horseshoe};
pub use markov::{
    bound_report, classify, incidence_matrix, is_transitive, period_decomposition, strongly_connected_components,
    BoundReport, Classification, IncidenceMatrix, PeriodDecomposition, TransitivityCertificate,
};
pub use periodic::{periodic_points, Affine, PeriodicPoint};
pub use refine::iterate;

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{PointOnGraph, TopoGraph};
use crate::rational::{format_rational, Rational};

/// Traversal direction of a basic interval inside an image path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dir {
    /// From lower to higher offset.
    Forward,
    Backward,
}

impl Dir {
    pub fn symbol(self) -> &'static str {
        match self {
            Dir::Forward => "+",
            Dir::Backward => "-",
        }
    }

    pub fn parse(s: &str) -> Option<Dir> {
        match s {
            "+" => Some(Dir::Forward),
            "-" => Some(Dir::Backward),
            _ => None,
        }
    }

    pub fn flip(self) -> Dir {
        match self {
            Dir::Forward => Dir::Backward,
            Dir::Backward => Dir::Forward,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub interval: usize,
    pub dir: Dir,
}

impl Step {
    pub fn new(interval: usize, dir: Dir) -> Self {
        Step { interval, dir }
    }

    pub fn reversed(self) -> Step {
        Step { interval: self.interval, dir: self.dir.flip() }
    }

    /// Cut point where the traversal begins.
    pub fn start(self, p: &MarkovPartition) -> usize {
        let i = &p.intervals[self.interval];
        match self.dir {
            Dir::Forward => i.start,
            Dir::Backward => i.end,
        }
    }

    pub fn end(self, p: &MarkovPartition) -> usize {
        self.reversed().start(p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicInterval {
    pub id: String,
    pub edge: usize,
    pub lo: Rational,
    pub hi: Rational,
    /// Cut point at `lo`.
    pub start: usize,
    /// Cut point at `hi`.
    pub end: usize,
}

impl BasicInterval {
    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains_offset(&self, offset: &Rational) -> bool {
        &self.lo <= offset && offset <= &self.hi
    }
}

/// Where a point sits relative to a partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    AtPoint(usize),
    /// Strictly inside a basic interval, `t` past its lower end.
    Inside { interval: usize, t: Rational },
}

/// Cut points (all vertices plus interior points) and the basic intervals
/// between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkovPartition {
    graph: TopoGraph,
    points: Vec<PointOnGraph>,
    point_ids: Vec<String>,
    point_lookup: HashMap<PointOnGraph, usize>,
    point_id_lookup: HashMap<String, usize>,
    intervals: Vec<BasicInterval>,
    interval_lookup: HashMap<String, usize>,
    edge_intervals: Vec<Range<usize>>,
}

impl MarkovPartition {
    /// Builds the partition of `graph` cut at every vertex and at the given
    /// interior points `(edge, offset, id)`. Missing ids default to
    /// `<edge>@p/q`. Points are listed vertices first, then interior points
    /// by edge and offset.
    pub fn new(graph: TopoGraph, interior: Vec<(usize, Rational, Option<String>)>) -> Result<Self> {
        let mut cuts: Vec<(usize, Rational, String)> = Vec::with_capacity(interior.len());
        for (edge, offset, id) in interior {
            if edge >= graph.num_edges() {
                return Err(Error::domain(format!("cut point on missing edge {edge}")));
            }
            let e = graph.edge(edge);
            if !offset.is_positive() || offset >= e.length {
                return Err(Error::domain(format!(
                    "cut point {} on edge {:?} is not interior",
                    format_rational(&offset),
                    e.id
                )));
            }
            let id = id.unwrap_or_else(|| format!("{}@{}", e.id, format_rational(&offset)));
            cuts.push((edge, offset, id));
        }
        cuts.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        for w in cuts.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::domain(format!("duplicate cut point {}", w[1].2)));
            }
        }

        let mut points: Vec<PointOnGraph> = (0..graph.num_vertices()).map(PointOnGraph::Vertex).collect();
        let mut point_ids: Vec<String> = graph.vertices().to_vec();
        for (edge, offset, id) in &cuts {
            points.push(PointOnGraph::Interior { edge: *edge, offset: offset.clone() });
            point_ids.push(id.clone());
        }
        let mut point_id_lookup = HashMap::new();
        for (i, id) in point_ids.iter().enumerate() {
            if point_id_lookup.insert(id.clone(), i).is_some() {
                return Err(Error::domain(format!("duplicate cut point id {id:?}")));
            }
        }
        let point_lookup: HashMap<PointOnGraph, usize> =
            points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();

        let mut intervals = Vec::new();
        let mut edge_intervals = Vec::with_capacity(graph.num_edges());
        let nv = graph.num_vertices();
        let mut next_cut = 0;
        for (ei, e) in graph.edges().iter().enumerate() {
            let first = intervals.len();
            let mut lo = Rational::zero();
            let mut start = e.ends.0;
            let mut k = 0;
            while next_cut < cuts.len() && cuts[next_cut].0 == ei {
                let hi = cuts[next_cut].1.clone();
                let end = nv + next_cut;
                intervals.push(BasicInterval { id: format!("{}#{k}", e.id), edge: ei, lo, hi: hi.clone(), start, end });
                lo = hi;
                start = end;
                k += 1;
                next_cut += 1;
            }
            intervals.push(BasicInterval { id: format!("{}#{k}", e.id), edge: ei, lo, hi: e.length.clone(), start, end: e.ends.1 });
            edge_intervals.push(first..intervals.len());
        }
        let interval_lookup = intervals.iter().enumerate().map(|(i, b)| (b.id.clone(), i)).collect();
        Ok(MarkovPartition {
            graph,
            points,
            point_ids,
            point_lookup,
            point_id_lookup,
            intervals,
            interval_lookup,
            edge_intervals,
        })
    }

    pub fn graph(&self) -> &TopoGraph {
        &self.graph
    }

    pub fn points(&self) -> &[PointOnGraph] {
        &self.points
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn point(&self, i: usize) -> &PointOnGraph {
        &self.points[i]
    }

    pub fn point_id(&self, i: usize) -> &str {
        &self.point_ids[i]
    }

    pub fn point_index(&self, p: &PointOnGraph) -> Option<usize> {
        self.point_lookup.get(p).copied()
    }

    pub fn point_by_id(&self, id: &str) -> Option<usize> {
        self.point_id_lookup.get(id).copied()
    }

    /// Interior cut points as `(edge, offset, id)`, the input form of
    /// [`MarkovPartition::new`].
    pub fn interior_cuts(&self) -> Vec<(usize, Rational, Option<String>)> {
        self.points
            .iter()
            .zip(&self.point_ids)
            .filter_map(|(p, id)| match p {
                PointOnGraph::Interior { edge, offset } => Some((*edge, offset.clone(), Some(id.clone()))),
                PointOnGraph::Vertex(_) => None,
            })
            .collect()
    }

    pub fn intervals(&self) -> &[BasicInterval] {
        &self.intervals
    }

    pub fn interval(&self, i: usize) -> &BasicInterval {
        &self.intervals[i]
    }

    pub fn num_intervals(&self) -> usize {
        self.intervals.len()
    }

    pub fn interval_by_id(&self, id: &str) -> Option<usize> {
        self.interval_lookup.get(id).copied()
    }

    /// Indices of the basic intervals of `edge`, by increasing offset.
    pub fn edge_intervals(&self, edge: usize) -> Range<usize> {
        self.edge_intervals[edge].clone()
    }

    /// Basic intervals having cut point `p` as an endpoint, with `true` when
    /// `p` is the interval's lower end. A loop interval at a vertex shows up
    /// twice.
    pub fn intervals_at(&self, p: usize) -> Vec<(usize, bool)> {
        let mut out = Vec::new();
        match &self.points[p] {
            PointOnGraph::Vertex(v) => {
                for (ei, e) in self.graph.edges().iter().enumerate() {
                    let r = self.edge_intervals(ei);
                    if e.ends.0 == *v {
                        out.push((r.start, true));
                    }
                    if e.ends.1 == *v {
                        out.push((r.end - 1, false));
                    }
                }
            }
            PointOnGraph::Interior { edge, offset } => {
                for i in self.edge_intervals(*edge) {
                    if &self.intervals[i].lo == offset {
                        out.push((i, true));
                    }
                    if &self.intervals[i].hi == offset {
                        out.push((i, false));
                    }
                }
            }
        }
        out
    }

    pub fn locate(&self, x: &PointOnGraph) -> Location {
        if let Some(i) = self.point_index(x) {
            return Location::AtPoint(i);
        }
        match x {
            PointOnGraph::Vertex(_) => unreachable!("every vertex is a cut point"),
            PointOnGraph::Interior { edge, offset } => {
                let r = self.edge_intervals(*edge);
                let slice = &self.intervals[r.clone()];
                let k = slice.partition_point(|b| &b.hi <= offset);
                let i = r.start + k;
                Location::Inside { interval: i, t: offset - &self.intervals[i].lo }
            }
        }
    }

    /// Canonical point at `offset` along the edge of basic interval `i`.
    pub fn point_in(&self, i: usize, offset: Rational) -> PointOnGraph {
        let b = &self.intervals[i];
        self.graph.point(b.edge, offset).expect("offset within edge")
    }

    pub fn describe(&self, x: &PointOnGraph) -> String {
        match self.point_index(x) {
            Some(i) => self.point_ids[i].clone(),
            None => self.graph.describe(x),
        }
    }
}

/// Unvalidated map data, as read from a file or assembled by a construction.
#[derive(Clone, Debug)]
pub struct RawMap {
    pub partition: MarkovPartition,
    /// Image of each cut point, indexed like `partition.points()`.
    pub point_images: Vec<PointOnGraph>,
    /// Image path of each basic interval.
    pub paths: Vec<Vec<Step>>,
}

/// One broken invariant of a [`RawMap`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    ImageCount { expected: usize, found: usize },
    PathCount { expected: usize, found: usize },
    /// Markov property: the image of a cut point is not a cut point.
    ImageNotInPartition { point: String, image: String },
    /// The image of a cut point names no point at all.
    UnknownImage { point: String, image: String },
    EmptyPath { interval: String },
    UnknownInterval { interval: String, position: usize },
    /// Monotonicity: the path visits a basic interval twice.
    RepeatedInterval { interval: String, repeated: String },
    /// Consecutive path entries do not share an endpoint.
    BrokenPath { interval: String, position: usize },
    /// Continuity at the lower end of the interval.
    StartMismatch { interval: String, expected: String, found: String },
    /// Continuity at the upper end of the interval.
    EndMismatch { interval: String, expected: String, found: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ImageCount { expected, found } => {
                write!(f, "expected {expected} cut point images, found {found}")
            }
            Violation::PathCount { expected, found } => {
                write!(f, "expected {expected} interval images, found {found}")
            }
            Violation::ImageNotInPartition { point, image } => {
                write!(f, "markov: image {image} of cut point {point} is not a cut point")
            }
            Violation::UnknownImage { point, image } => {
                write!(f, "markov: image {image:?} of cut point {point} is not a known point")
            }
            Violation::EmptyPath { interval } => write!(f, "interval {interval}: empty image path"),
            Violation::UnknownInterval { interval, position } => {
                write!(f, "interval {interval}: path entry {position} names no basic interval")
            }
            Violation::RepeatedInterval { interval, repeated } => {
                write!(f, "monotonicity: image path of {interval} visits {repeated} more than once")
            }
            Violation::BrokenPath { interval, position } => {
                write!(f, "interval {interval}: path entries {} and {position} are not adjacent", position - 1)
            }
            Violation::StartMismatch { interval, expected, found } => {
                write!(f, "continuity: path of {interval} starts at {found}, image of its lower end is {expected}")
            }
            Violation::EndMismatch { interval, expected, found } => {
                write!(f, "continuity: path of {interval} ends at {found}, image of its upper end is {expected}")
            }
        }
    }
}

/// All violations found by [`validate`]; empty means the map is valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  {v}")?;
        }
        Ok(())
    }
}

/// Checks the Markov, continuity and simple-path invariants, reporting every
/// violation.
pub fn validate(raw: &RawMap) -> ValidationReport {
    let p = &raw.partition;
    let mut out = Vec::new();
    if raw.point_images.len() != p.num_points() {
        out.push(Violation::ImageCount { expected: p.num_points(), found: raw.point_images.len() });
    }
    if raw.paths.len() != p.num_intervals() {
        out.push(Violation::PathCount { expected: p.num_intervals(), found: raw.paths.len() });
    }
    if !out.is_empty() {
        return ValidationReport { violations: out };
    }
    let mut images = Vec::with_capacity(p.num_points());
    for (i, img) in raw.point_images.iter().enumerate() {
        let idx = p.point_index(img);
        if idx.is_none() {
            out.push(Violation::ImageNotInPartition {
                point: p.point_id(i).to_string(),
                image: p.graph().describe(img),
            });
        }
        images.push(idx);
    }
    let n = p.num_intervals();
    for (i, path) in raw.paths.iter().enumerate() {
        let id = p.interval(i).id.clone();
        if path.is_empty() {
            out.push(Violation::EmptyPath { interval: id });
            continue;
        }
        if let Some(pos) = path.iter().position(|s| s.interval >= n) {
            out.push(Violation::UnknownInterval { interval: id, position: pos });
            continue;
        }
        let mut seen = vec![false; n];
        for s in path {
            if std::mem::replace(&mut seen[s.interval], true) {
                out.push(Violation::RepeatedInterval {
                    interval: id.clone(),
                    repeated: p.interval(s.interval).id.clone(),
                });
                break;
            }
        }
        for k in 1..path.len() {
            if path[k - 1].end(p) != path[k].start(p) {
                out.push(Violation::BrokenPath { interval: id.clone(), position: k });
            }
        }
        let b = p.interval(i);
        let first = path[0].start(p);
        let last = path[path.len() - 1].end(p);
        if let Some(expected) = images[b.start] {
            if expected != first {
                out.push(Violation::StartMismatch {
                    interval: id.clone(),
                    expected: p.point_id(expected).to_string(),
                    found: p.point_id(first).to_string(),
                });
            }
        }
        if let Some(expected) = images[b.end] {
            if expected != last {
                out.push(Violation::EndMismatch {
                    interval: id.clone(),
                    expected: p.point_id(expected).to_string(),
                    found: p.point_id(last).to_string(),
                });
            }
        }
    }
    ValidationReport { violations: out }
}

/// A validated piecewise-linear Markov map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLMarkovMap {
    partition: MarkovPartition,
    images: Vec<usize>,
    paths: Vec<Vec<Step>>,
    /// Start position of each path step, measured along the path.
    step_offsets: Vec<Vec<Rational>>,
    path_lengths: Vec<Rational>,
}

impl PLMarkovMap {
    pub fn from_raw(raw: RawMap) -> Result<Self> {
        let report = validate(&raw);
        if !report.is_valid() {
            return Err(Error::InvalidMap(report));
        }
        let RawMap { partition, point_images, paths } = raw;
        let images = point_images.iter().map(|x| partition.point_index(x).unwrap()).collect();
        let mut step_offsets = Vec::with_capacity(paths.len());
        let mut path_lengths = Vec::with_capacity(paths.len());
        for path in &paths {
            let mut acc = Rational::zero();
            let mut offs = Vec::with_capacity(path.len());
            for s in path {
                offs.push(acc.clone());
                acc += partition.interval(s.interval).length();
            }
            step_offsets.push(offs);
            path_lengths.push(acc);
        }
        Ok(PLMarkovMap { partition, images, paths, step_offsets, path_lengths })
    }

    /// Builds and validates a map from point images and interval paths.
    pub fn new(partition: MarkovPartition, point_images: Vec<PointOnGraph>, paths: Vec<Vec<Step>>) -> Result<Self> {
        Self::from_raw(RawMap { partition, point_images, paths })
    }

    pub fn to_raw(&self) -> RawMap {
        RawMap {
            partition: self.partition.clone(),
            point_images: self.images.iter().map(|&i| self.partition.point(i).clone()).collect(),
            paths: self.paths.clone(),
        }
    }

    pub fn partition(&self) -> &MarkovPartition {
        &self.partition
    }

    pub fn graph(&self) -> &TopoGraph {
        self.partition.graph()
    }

    pub fn num_intervals(&self) -> usize {
        self.partition.num_intervals()
    }

    /// Image of cut point `i`, as a cut point index.
    pub fn point_image(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn point_images(&self) -> &[usize] {
        &self.images
    }

    pub fn path(&self, i: usize) -> &[Step] {
        &self.paths[i]
    }

    pub fn paths(&self) -> &[Vec<Step>] {
        &self.paths
    }

    pub fn path_length(&self, i: usize) -> &Rational {
        &self.path_lengths[i]
    }

    /// Start position of each step of the path of interval `i`.
    pub fn step_offsets(&self, i: usize) -> &[Rational] {
        &self.step_offsets[i]
    }

    /// Expansion factor on basic interval `i`.
    pub fn slope(&self, i: usize) -> Rational {
        &self.path_lengths[i] / self.partition.interval(i).length()
    }

    /// Point at arc-length position `s` along the image path of interval `i`.
    pub fn point_on_path(&self, i: usize, s: &Rational) -> PointOnGraph {
        let offs = &self.step_offsets[i];
        let k = offs.partition_point(|o| o <= s).max(1) - 1;
        let step = self.paths[i][k];
        let b = self.partition.interval(step.interval);
        let u = s - &offs[k];
        let off = match step.dir {
            Dir::Forward => &b.lo + u,
            Dir::Backward => &b.hi - u,
        };
        self.partition.point_in(step.interval, off)
    }

    pub fn evaluate(&self, x: &PointOnGraph) -> PointOnGraph {
        match self.partition.locate(x) {
            Location::AtPoint(i) => self.partition.point(self.images[i]).clone(),
            Location::Inside { interval, t } => {
                let s = t * self.slope(interval);
                self.point_on_path(interval, &s)
            }
        }
    }

    /// `f^n(x)`.
    pub fn evaluate_n(&self, x: &PointOnGraph, n: usize) -> PointOnGraph {
        let mut y = x.clone();
        for _ in 0..n {
            y = self.evaluate(&y);
        }
        y
    }

    /// Fixed cut points.
    pub fn fixed_cut_points(&self) -> Vec<usize> {
        (0..self.images.len()).filter(|&i| self.images[i] == i).collect()
    }

    /// Whether the cut points `cycle` form one cycle, visited in order.
    pub fn is_cycle(&self, cycle: &[usize]) -> bool {
        if cycle.is_empty() {
            return false;
        }
        let mut seen = std::collections::HashSet::new();
        cycle.iter().all(|c| seen.insert(*c))
            && (0..cycle.len()).all(|k| self.images[cycle[k]] == cycle[(k + 1) % cycle.len()])
    }

    /// Largest slope magnitude; at least one for maps of interest.
    pub fn max_slope(&self) -> Rational {
        (0..self.num_intervals()).map(|i| self.slope(i)).max().unwrap_or_else(Rational::one)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::graph::catalog;
    use crate::rational::{int, rat};

    /// `x -> |1 - |1 - 3x||` on `[0, 1]`, written out by hand.
    pub(crate) fn tent3() -> PLMarkovMap {
        let g = catalog::arc();
        let p = MarkovPartition::new(g, vec![(0, rat(1, 3), None), (0, rat(2, 3), None)]).unwrap();
        let pt = |e: i64, d: i64| p.graph().point(0, rat(e, d)).unwrap();
        let images = vec![pt(0, 1), pt(1, 1), pt(1, 1), pt(0, 1)];
        let all_fwd = vec![Step::new(0, Dir::Forward), Step::new(1, Dir::Forward), Step::new(2, Dir::Forward)];
        let all_bwd: Vec<Step> = all_fwd.iter().rev().map(|s| s.reversed()).collect();
        PLMarkovMap::new(p, images, vec![all_fwd.clone(), all_bwd, all_fwd]).unwrap()
    }

    #[test]
    fn partition_layout() {
        let m = tent3();
        let p = m.partition();
        assert_eq!(p.num_points(), 4);
        assert_eq!(p.num_intervals(), 3);
        assert_eq!(p.interval(1).id, "e#1");
        assert_eq!(p.point_id(2), "e@1/3");
        assert_eq!(p.intervals_at(2), vec![(0, false), (1, true)]);
    }

    #[test]
    fn tent_values() {
        let m = tent3();
        let g = m.graph().clone();
        let at = |x: Rational| m.evaluate(&g.point(0, x).unwrap());
        assert_eq!(at(int(0)), g.point(0, int(0)).unwrap());
        assert_eq!(at(rat(1, 3)), g.point(0, int(1)).unwrap());
        assert_eq!(at(rat(1, 2)), g.point(0, rat(1, 2)).unwrap());
        assert_eq!(at(rat(1, 5)), g.point(0, rat(3, 5)).unwrap());
        assert_eq!(at(rat(3, 5)), g.point(0, rat(1, 5)).unwrap());
        assert_eq!(at(rat(9, 10)), g.point(0, rat(7, 10)).unwrap());
    }

    #[test]
    fn markov_violation_reported() {
        let mut raw = tent3().to_raw();
        raw.point_images[1] = raw.partition.graph().point(0, rat(1, 2)).unwrap();
        let r = validate(&raw);
        assert!(r.violations.iter().any(|v| matches!(v, Violation::ImageNotInPartition { .. })));
    }

    #[test]
    fn repeated_interval_reported() {
        let mut raw = tent3().to_raw();
        raw.paths[0].push(Step::new(1, Dir::Backward));
        let r = validate(&raw);
        assert!(r.violations.iter().any(|v| matches!(v, Violation::RepeatedInterval { .. })));
        assert!(PLMarkovMap::from_raw(raw).is_err());
    }

    #[test]
    fn continuity_reported() {
        let mut raw = tent3().to_raw();
        raw.paths[2] = vec![Step::new(0, Dir::Forward)];
        let r = validate(&raw);
        assert!(r.violations.iter().any(|v| matches!(v, Violation::EndMismatch { .. })));
    }
}
