//! JSON files for graphs, maps, shadowing requests and unfolding inputs,
//! plus DOT export. Rationals are "p/q" strings; parse errors carry the JSON
//! path of the offending value.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::construct::Side;
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeEnd, PointOnGraph, TopoGraph};
use crate::logval::LogRecord;
use crate::plmap::{incidence_matrix, Dir, EntropyEnclosure, MarkovPartition, PLMarkovMap, RawMap, Step};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::specprop::{ShadowingRequest, SpecWitness};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeFile {
    pub id: String,
    pub ends: [String; 2],
    pub length: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutFile {
    pub id: String,
    pub edge: String,
    pub offset: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepFile {
    pub interval: String,
    pub dir: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphRef {
    Inline(GraphFile),
    /// Path to a graph file, relative to the map file.
    File(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub graph: GraphRef,
    pub partition: Vec<CutFile>,
    pub vertex_images: BTreeMap<String, String>,
    pub interval_images: BTreeMap<String, Vec<StepFile>>,
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("{what}: line {} column {}: {e}", e.line(), e.column())))
}

fn rational_at(s: &str, path: &str) -> Result<Rational> {
    parse_rational(s).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

/// Canonical pretty JSON with a trailing newline.
pub fn to_canonical<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn graph_from_file(f: &GraphFile) -> Result<TopoGraph> {
    let index: BTreeMap<&str, usize> = f.vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut edges = Vec::with_capacity(f.edges.len());
    for (k, e) in f.edges.iter().enumerate() {
        let end = |j: usize| {
            index
                .get(e.ends[j].as_str())
                .copied()
                .ok_or_else(|| Error::Parse(format!("edges[{k}].ends[{j}]: unknown vertex {:?}", e.ends[j])))
        };
        edges.push(Edge { id: e.id.clone(), ends: (end(0)?, end(1)?), length: rational_at(&e.length, &format!("edges[{k}].length"))? });
    }
    TopoGraph::from_parts(f.vertices.clone(), edges)
}

pub fn graph_to_file(g: &TopoGraph) -> GraphFile {
    GraphFile {
        vertices: g.vertices().to_vec(),
        edges: g
            .edges()
            .iter()
            .map(|e| EdgeFile {
                id: e.id.clone(),
                ends: [g.vertex_name(e.ends.0).to_string(), g.vertex_name(e.ends.1).to_string()],
                length: format_rational(&e.length),
            })
            .collect(),
    }
}

pub fn parse_graph(text: &str) -> Result<TopoGraph> {
    graph_from_file(&parse_json(text, "graph")?)
}

pub fn write_graph(g: &TopoGraph) -> String {
    to_canonical(&graph_to_file(g))
}

/// Unvalidated map from a parsed file; graph references resolve against `base`.
pub fn raw_map_from_file(f: &MapFile, base: Option<&Path>) -> Result<RawMap> {
    let g = match &f.graph {
        GraphRef::Inline(g) => graph_from_file(g)?,
        GraphRef::File(name) => {
            let path = base.map_or_else(|| Path::new(name).to_path_buf(), |b| b.join(name));
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Parse(format!("graph: cannot read {}: {e}", path.display())))?;
            parse_graph(&text)?
        }
    };
    let mut cuts = Vec::with_capacity(f.partition.len());
    for (k, c) in f.partition.iter().enumerate() {
        let edge = g
            .edge_id(&c.edge)
            .ok_or_else(|| Error::Parse(format!("partition[{k}].edge: unknown edge {:?}", c.edge)))?;
        let offset = rational_at(&c.offset, &format!("partition[{k}].offset"))?;
        cuts.push((edge, offset, Some(c.id.clone())));
    }
    let part = MarkovPartition::new(g, cuts).map_err(|e| Error::Parse(format!("partition: {e}")))?;
    for key in f.vertex_images.keys() {
        if part.point_by_id(key).is_none() {
            return Err(Error::Parse(format!("vertex_images: unknown point {key:?}")));
        }
    }
    let mut point_images = Vec::with_capacity(part.num_points());
    for i in 0..part.num_points() {
        let id = part.point_id(i);
        let img = f
            .vertex_images
            .get(id)
            .ok_or_else(|| Error::Parse(format!("vertex_images: no image for point {id:?}")))?;
        let j = part
            .point_by_id(img)
            .ok_or_else(|| Error::Parse(format!("vertex_images.{id}: unknown point {img:?}")))?;
        point_images.push(part.point(j).clone());
    }
    for key in f.interval_images.keys() {
        if part.interval_by_id(key).is_none() {
            return Err(Error::Parse(format!("interval_images: unknown interval {key:?}")));
        }
    }
    let mut paths = Vec::with_capacity(part.num_intervals());
    for b in part.intervals() {
        let steps = f
            .interval_images
            .get(&b.id)
            .ok_or_else(|| Error::Parse(format!("interval_images: no image for interval {:?}", b.id)))?;
        let mut path = Vec::with_capacity(steps.len());
        for (k, s) in steps.iter().enumerate() {
            let at = format!("interval_images.{}[{k}]", b.id);
            let interval = part
                .interval_by_id(&s.interval)
                .ok_or_else(|| Error::Parse(format!("{at}.interval: unknown interval {:?}", s.interval)))?;
            let dir = Dir::parse(&s.dir).ok_or_else(|| Error::Parse(format!("{at}.dir: expected \"+\" or \"-\"")))?;
            path.push(Step::new(interval, dir));
        }
        paths.push(path);
    }
    Ok(RawMap { partition: part, point_images, paths })
}

pub fn parse_raw_map(text: &str, base: Option<&Path>) -> Result<RawMap> {
    raw_map_from_file(&parse_json(text, "map")?, base)
}

pub fn parse_map(text: &str, base: Option<&Path>) -> Result<PLMarkovMap> {
    PLMarkovMap::from_raw(parse_raw_map(text, base)?)
}

pub fn map_to_file(m: &PLMarkovMap) -> MapFile {
    let p = m.partition();
    let nv = p.graph().num_vertices();
    let partition = (nv..p.num_points())
        .map(|i| match p.point(i) {
            PointOnGraph::Interior { edge, offset } => CutFile {
                id: p.point_id(i).to_string(),
                edge: p.graph().edge(*edge).id.clone(),
                offset: format_rational(offset),
            },
            PointOnGraph::Vertex(_) => unreachable!("vertices come first"),
        })
        .collect();
    let vertex_images = (0..p.num_points()).map(|i| (p.point_id(i).to_string(), p.point_id(m.point_image(i)).to_string())).collect();
    let interval_images = (0..p.num_intervals())
        .map(|i| {
            let steps = m
                .path(i)
                .iter()
                .map(|s| StepFile { interval: p.interval(s.interval).id.clone(), dir: s.dir.symbol().to_string() })
                .collect();
            (p.interval(i).id.clone(), steps)
        })
        .collect();
    MapFile { graph: GraphRef::Inline(graph_to_file(p.graph())), partition, vertex_images, interval_images }
}

pub fn write_map(m: &PLMarkovMap) -> String {
    to_canonical(&map_to_file(m))
}

/// A point as `{"vertex": name}` or `{"edge": id, "offset": "p/q"}`.
pub fn point_json(g: &TopoGraph, x: &PointOnGraph) -> Value {
    match x {
        PointOnGraph::Vertex(v) => serde_json::json!({ "vertex": g.vertex_name(*v) }),
        PointOnGraph::Interior { edge, offset } => {
            serde_json::json!({ "edge": g.edge(*edge).id, "offset": format_rational(offset) })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnclosureRecord {
    pub lower: LogRecord,
    pub upper: LogRecord,
    pub depth: usize,
    pub converged: bool,
    /// Display only.
    pub width: String,
}

pub fn enclosure_record(e: &EntropyEnclosure) -> EnclosureRecord {
    EnclosureRecord {
        lower: e.lower.record(),
        upper: e.upper.record(),
        depth: e.depth,
        converged: e.converged,
        width: format!("{:.3e}", e.width_approx()),
    }
}


#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestFile {
    pub segments: Vec<Vec<String>>,
    pub gap: usize,
    pub period: usize,
}

pub fn parse_request(text: &str, m: &PLMarkovMap) -> Result<ShadowingRequest> {
    let f: RequestFile = parse_json(text, "request")?;
    let p = m.partition();
    let mut segments = Vec::with_capacity(f.segments.len());
    for (k, seg) in f.segments.iter().enumerate() {
        let mut out = Vec::with_capacity(seg.len());
        for (j, id) in seg.iter().enumerate() {
            out.push(
                p.interval_by_id(id)
                    .ok_or_else(|| Error::Parse(format!("segments[{k}][{j}]: unknown interval {id:?}")))?,
            );
        }
        segments.push(out);
    }
    Ok(ShadowingRequest { segments, gap: f.gap, period: f.period })
}

pub fn request_to_file(req: &ShadowingRequest, m: &PLMarkovMap) -> RequestFile {
    let p = m.partition();
    RequestFile {
        segments: req.segments.iter().map(|s| s.iter().map(|&i| p.interval(i).id.clone()).collect()).collect(),
        gap: req.gap,
        period: req.period,
    }
}

pub fn witness_json(m: &PLMarkovMap, w: &SpecWitness) -> Value {
    let p = m.partition();
    let mut y = w.point.clone();
    let mut rows = Vec::with_capacity(w.verification.len());
    for r in &w.verification {
        rows.push(serde_json::json!({
            "step": r.step,
            "interval": p.interval(r.interval).id,
            "requested": r.requested,
            "point": point_json(p.graph(), &y),
            "hit": r.hit,
        }));
        y = m.evaluate(&y);
    }
    serde_json::json!({
        "point": point_json(p.graph(), &w.point),
        "period": w.itinerary.len(),
        "itinerary": w.itinerary.iter().map(|&i| p.interval(i).id.clone()).collect::<Vec<_>>(),
        "non_unique": w.non_unique,
        "periodic": w.periodic,
        "verification": rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SideFile {
    pub vertex: String,
    pub edge: String,
    /// "start" or "end"; needed only for loops.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnfoldFile {
    pub map: MapFile,
    pub nacc: Vec<SideFile>,
}

/// Map and declared sides of an unfolding input.
pub fn parse_unfold(text: &str, base: Option<&Path>) -> Result<(PLMarkovMap, Vec<Side>)> {
    let f: UnfoldFile = parse_json(text, "unfold input")?;
    let m = PLMarkovMap::from_raw(raw_map_from_file(&f.map, base)?)?;
    let g = m.graph();
    let mut sides = Vec::with_capacity(f.nacc.len());
    for (k, s) in f.nacc.iter().enumerate() {
        let vertex = g
            .vertex_id(&s.vertex)
            .ok_or_else(|| Error::Parse(format!("nacc[{k}].vertex: unknown vertex {:?}", s.vertex)))?;
        let edge = g.edge_id(&s.edge).ok_or_else(|| Error::Parse(format!("nacc[{k}].edge: unknown edge {:?}", s.edge)))?;
        let e = g.edge(edge);
        let end = match s.end.as_deref() {
            Some("start") => EdgeEnd::Start,
            Some("end") => EdgeEnd::End,
            Some(other) => return Err(Error::Parse(format!("nacc[{k}].end: expected \"start\" or \"end\", got {other:?}"))),
            None if e.is_loop() => return Err(Error::Parse(format!("nacc[{k}].end: required for the loop {:?}", s.edge))),
            None if e.ends.0 == vertex => EdgeEnd::Start,
            None => EdgeEnd::End,
        };
        if e.vertex_at(end) != vertex {
            return Err(Error::Parse(format!("nacc[{k}]: edge {:?} does not end at {:?}", s.edge, s.vertex)));
        }
        sides.push(Side { vertex, edge, end });
    }
    Ok((m, sides))
}

pub fn write_unfold(m: &PLMarkovMap, sides: &[Side]) -> String {
    let g = m.graph();
    let nacc = sides
        .iter()
        .map(|s| SideFile {
            vertex: g.vertex_name(s.vertex).to_string(),
            edge: g.edge(s.edge).id.clone(),
            end: Some(match s.end {
                EdgeEnd::Start => "start".into(),
                EdgeEnd::End => "end".into(),
            }),
        })
        .collect();
    to_canonical(&UnfoldFile { map: map_to_file(m), nacc })
}

/// One node per basic interval and one arc per covering.
pub fn to_dot(m: &PLMarkovMap) -> String {
    let p = m.partition();
    let a = incidence_matrix(m);
    let mut s = String::from("digraph markov {\n");
    for b in p.intervals() {
        s.push_str(&format!("  \"{}\";\n", b.id));
    }
    for (i, row) in a.rows().iter().enumerate() {
        for &j in row {
            s.push_str(&format!("  \"{}\" -> \"{}\";\n", p.interval(i).id, p.interval(j).id));
        }
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{b1_base, tent3};

    #[test]
    fn map_round_trip_is_byte_identical() {
        for m in [tent3(), b1_base()] {
            let text = write_map(&m);
            let back = parse_map(&text, None).unwrap();
            assert_eq!(back, m);
            assert_eq!(write_map(&back), text);
        }
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad = r#"{"vertices": ["a", "b"], "edges": [{"id": "e", "ends": ["a", "b"], "length": "2/4"}]}"#;
        let e = parse_graph(bad).unwrap_err().to_string();
        assert!(e.contains("edges[0].length"), "{e}");
        let bad = r#"{"vertices": ["a", "b"], "edges": [{"id": "e", "ends": ["a", "c"], "length": "1/1"}]}"#;
        assert!(parse_graph(bad).unwrap_err().to_string().contains("edges[0].ends[1]"));
        let e = parse_graph("{\"vertices\": [").unwrap_err().to_string();
        assert!(e.contains("line 1"), "{e}");
    }

    #[test]
    fn dot_has_one_arc_per_covering() {
        let dot = to_dot(&tent3());
        assert_eq!(dot.matches("->").count(), 9);
    }
}
