use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use topent_core::acceptance;
use topent_core::construct::{
    b1_base, binary_exact, edge_add, purify_stage, quotient_example, star_exact, tent3, totalize, unfold,
    wedge_power, Construction, PeriodicOrbitSpec, QuotientKind,
};
use topent_core::error::{Error, Result};
use topent_core::graph::{disconnection_number, kappa, kappa_by_subgraphs, max_nondisconnecting_set, PointOnGraph, TopoGraph};
use topent_core::io::{
    enclosure_record, parse_graph, parse_map, parse_raw_map, parse_request, parse_unfold, point_json, to_canonical,
    to_dot, witness_json, write_map,
};
use topent_core::logval::LogRecord;
use topent_core::plmap::{
    bound_report, classify, entropy, is_transitive, loose_horseshoe_search, period_decomposition, periodic_points,
    validate, EntropyEnclosure, EntropyOptions, PLMarkovMap,
};
use topent_core::rational::{parse_rational, rat, Rational};
use topent_core::specprop::spec_witness;

#[derive(Parser)]
#[command(name = "topent", version, about = "Certified entropy and constructions for Markov graph maps")]
struct Cli {
    /// Accepted for harness compatibility; every algorithm is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write a JSON run report with input digests to this path.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print kappa(G) = disc(G) - euler(G) + 1.
    Kappa {
        graph: PathBuf,
        /// Also enumerate subgraph models and compare.
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = 1_000_000)]
        max_models: usize,
    },
    /// Print the disconnection number and a largest non-disconnecting set.
    Disc { graph: PathBuf },
    /// Certified entropy enclosure.
    Entropy {
        map: PathBuf,
        #[arg(long, default_value = "1/1000000000")]
        tol: String,
        #[arg(long, default_value_t = 4096)]
        depth_cap: usize,
    },
    /// Validate, classify and decompose a map.
    Check { map: PathBuf },
    /// Points with f^n(x) = x.
    Periodic {
        map: PathBuf,
        #[arg(long)]
        n: usize,
        /// Maximum number of closed walks to enumerate.
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
    },
    /// Search for an s-horseshoe and report whether it is loose.
    Horseshoe {
        map: PathBuf,
        #[arg(long)]
        s: usize,
    },
    /// Build a map.
    Construct(ConstructArgs),
    /// Unfold a graph map at the sides listed in a pair file.
    Unfold {
        pair: PathBuf,
        /// Write the unfolded map here.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Periodic point shadowing a specification request.
    Witness {
        map: PathBuf,
        #[arg(long)]
        request: PathBuf,
    },
    /// Entropy lower bounds for pure mixing maps on a graph.
    Bounds { graph: PathBuf },
    /// Markov graph in DOT format.
    Dot {
        map: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Run the acceptance suite.
    Acceptance {
        /// Print the detail lines of every criterion.
        #[arg(short, long)]
        verbose: bool,
    },
}

#[derive(Args)]
struct ConstructArgs {
    /// tent3, b1, star, binary, sigma, theta, figure8, dumbbell, wedge,
    /// edge-add, totalize or purify.
    kind: String,
    #[arg(short, long)]
    out: PathBuf,
    /// Where to write the construction trace; defaults to `<out>.trace.json`.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value = "1/10")]
    eps: String,
    /// Input map for wedge, edge-add, totalize and purify.
    #[arg(long)]
    map: Option<PathBuf>,
    /// Cut point id for wedge and edge-add.
    #[arg(long)]
    at: Option<String>,
    /// Number of copies for wedge.
    #[arg(long)]
    k: Option<usize>,
    /// Comma-separated cut point ids of the cycle for purify; defaults to
    /// the map's endpoint cycle.
    #[arg(long)]
    orbit: Option<String>,
    #[arg(long, default_value_t = 1)]
    stage: usize,
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunReport {
    command: Vec<String>,
    inputs: Vec<InputDigest>,
    results: Value,
    elapsed_ms: u128,
    versions: Value,
}

/// Reads input files and remembers their digests.
#[derive(Default)]
struct Inputs {
    seen: Vec<InputDigest>,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        self.seen.push(InputDigest { path: path.display().to_string(), sha256: hex(&Sha256::digest(&bytes)) });
        String::from_utf8(bytes).map_err(|_| Error::Parse(format!("{}: not UTF-8", path.display())))
    }

    fn graph(&mut self, path: &Path) -> Result<TopoGraph> {
        let text = self.read(path)?;
        parse_graph(&text).map_err(|e| in_file(path, e))
    }

    fn map(&mut self, path: &Path) -> Result<PLMarkovMap> {
        let text = self.read(path)?;
        parse_map(&text, path.parent()).map_err(|e| in_file(path, e))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)?;
    Ok(())
}

fn log_text(r: &LogRecord) -> String {
    match (r.radicand.trim_end_matches("/1"), r.root) {
        ("1", _) => "0".to_string(),
        (q, 1) => format!("log({q})"),
        (q, k) => format!("log({q})/{k}"),
    }
}

fn print_enclosure(e: &EntropyEnclosure) {
    let (lo, hi) = (e.lower.record(), e.upper.record());
    println!("lower  {}", log_text(&lo));
    println!("upper  {}", log_text(&hi));
    println!("display only: [{}, {}]", lo.approx, hi.approx);
    println!("depth {}{}", e.depth, if e.converged { "" } else { " (tolerance not reached)" });
}

fn eps_arg(s: &str) -> Result<Rational> {
    let r = parse_rational(s).map_err(|e| Error::Parse(format!("--eps: {e}")))?;
    if r <= rat(0, 1) {
        return Err(Error::domain("--eps must be positive"));
    }
    Ok(r)
}

fn cut_point(m: &PLMarkovMap, id: &str) -> Result<PointOnGraph> {
    let p = m.partition();
    let i = p.point_by_id(id).ok_or_else(|| Error::domain(format!("unknown cut point id {id:?}")))?;
    Ok(p.point(i).clone())
}

fn run(cli: &Cli, inputs: &mut Inputs) -> Result<Value> {
    match &cli.command {
        Command::Kappa { graph, check, max_models } => {
            let g = inputs.graph(graph)?;
            let k = kappa(&g);
            println!("{k}");
            let mut out = json!({ "kappa": k, "disc": disconnection_number(&g), "euler": g.euler_characteristic() });
            if *check {
                let (brute, _) = kappa_by_subgraphs(&g, 2, *max_models)?;
                println!("subgraph enumeration: {brute}");
                out["subgraph_enumeration"] = json!(brute);
                if brute as i64 != k {
                    return Err(Error::domain("formula and subgraph enumeration disagree"));
                }
            }
            Ok(out)
        }
        Command::Disc { graph } => {
            let g = inputs.graph(graph)?;
            let d = disconnection_number(&g);
            let set = max_nondisconnecting_set(&g);
            let vs: Vec<&str> = set.vertices.iter().map(|&v| g.vertex_name(v)).collect();
            let es: Vec<&str> = set.marked_edges.iter().map(|&e| g.edge(e).id.as_str()).collect();
            println!("{d}");
            println!("non-disconnecting set of size {}: vertices {vs:?}, edge interiors {es:?}", vs.len() + es.len());
            Ok(json!({ "disc": d, "vertices": vs, "edge_interiors": es }))
        }
        Command::Entropy { map, tol, depth_cap } => {
            let m = inputs.map(map)?;
            let tolerance = parse_rational(tol).map_err(|e| Error::Parse(format!("--tol: {e}")))?;
            let e = entropy(&m, &EntropyOptions { tolerance, depth_cap: *depth_cap });
            print_enclosure(&e);
            Ok(serde_json::to_value(enclosure_record(&e)).expect("serializable"))
        }
        Command::Check { map } => {
            let text = inputs.read(map)?;
            let raw = parse_raw_map(&text, map.parent()).map_err(|e| in_file(map, e))?;
            let report = validate(&raw);
            if !report.is_valid() {
                return Err(Error::InvalidMap(report));
            }
            let m = PLMarkovMap::from_raw(raw)?;
            let c = classify(&m);
            let cert = is_transitive(&m);
            println!("valid: {} cut points, {} basic intervals", m.partition().num_points(), m.num_intervals());
            println!("transitive: {}", c.transitive);
            println!("totally transitive: {}", c.totally_transitive);
            println!("exact: {}", c.exact);
            let mut out = json!({
                "valid": true,
                "transitive": c.transitive,
                "totally_transitive": c.totally_transitive,
                "exact": c.exact,
                "strongly_connected": cert.strongly_connected,
                "cyclic_permutation": cert.cyclic_permutation,
                "components": cert.components,
            });
            if c.heuristic {
                println!("note: entropy equals log of the spectral radius for Markov maps of graphs with cycles by standard practice");
            }
            if let Ok(d) = period_decomposition(&m) {
                let p = m.partition();
                let classes: Vec<Vec<&str>> =
                    d.classes.iter().map(|c| c.iter().map(|&i| p.interval(i).id.as_str()).collect()).collect();
                println!("period {}: {classes:?}", d.k);
                out["period"] = json!(d.k);
                out["classes"] = json!(classes);
            }
            Ok(out)
        }
        Command::Periodic { map, n, cap } => {
            let m = inputs.map(map)?;
            let pts = periodic_points(&m, *n, *cap)?;
            let g = m.graph();
            let p = m.partition();
            println!("{} points with f^{n}(x) = x", pts.len());
            let rows: Vec<Value> = pts
                .iter()
                .map(|q| {
                    let it: Vec<&str> = q.itinerary.iter().map(|&i| p.interval(i).id.as_str()).collect();
                    println!("  {}  {}{}", p.describe(&q.point), it.join(" "), if q.non_unique { "  (segment midpoint)" } else { "" });
                    json!({ "point": point_json(g, &q.point), "itinerary": it, "non_unique": q.non_unique })
                })
                .collect();
            Ok(json!({ "n": n, "points": rows }))
        }
        Command::Horseshoe { map, s } => {
            let m = inputs.map(map)?;
            let p = m.partition();
            match loose_horseshoe_search(&m, *s) {
                None => {
                    println!("no {s}-horseshoe found");
                    Ok(json!({ "found": false }))
                }
                Some(h) => {
                    let j: Vec<&str> = h.j.iter().map(|&i| p.interval(i).id.as_str()).collect();
                    let covers: Vec<Vec<&str>> =
                        h.covers.iter().map(|c| c.iter().map(|&i| p.interval(i).id.as_str()).collect()).collect();
                    println!("{} {s}-horseshoe on edge {}: J = {j:?}", if h.loose { "loose" } else { "tight" }, m.graph().edge(h.edge).id);
                    Ok(json!({ "found": true, "loose": h.loose, "edge": m.graph().edge(h.edge).id, "j": j, "covers": covers }))
                }
            }
        }
        Command::Construct(args) => construct(args, inputs),
        Command::Unfold { pair, out } => {
            let text = inputs.read(pair)?;
            let (m, sides) = parse_unfold(&text, pair.parent()).map_err(|e| in_file(pair, e))?;
            let u = unfold(&m, &sides, 0)?;
            let r = &u.report;
            println!("detached {} endpoints (kappa {})", r.detached, r.kappa);
            println!("semiconjugacy on cut points: {}", r.semiconjugacy_on_points);
            println!("semiconjugacy on {} samples: {}", r.samples, r.semiconjugacy_on_samples);
            println!("unique preimages: {}", r.unique_preimages);
            if let Some(out) = out {
                write_file(out, &write_map(&u.map))?;
            }
            if !r.all_pass() {
                return Err(Error::domain("unfolding checks failed"));
            }
            Ok(serde_json::to_value(r).expect("serializable"))
        }
        Command::Witness { map, request } => {
            let m = inputs.map(map)?;
            let text = inputs.read(request)?;
            let req = parse_request(&text, &m).map_err(|e| in_file(request, e))?;
            let w = spec_witness(&m, &req)?;
            let out = witness_json(&m, &w);
            print!("{}", to_canonical(&out));
            if !w.verified() {
                return Err(Error::domain("witness failed verification"));
            }
            Ok(out)
        }
        Command::Bounds { graph } => {
            let g = inputs.graph(graph)?;
            let r = bound_report(&g);
            let c = r.kappa_bound.record();
            println!("kappa {}", r.kappa);
            println!("lower bound {}  (display only: {})", log_text(&c), c.approx);
            let mut out = json!({ "kappa": r.kappa, "bound": c });
            if let Some(s) = &r.sharpened_bound {
                let s = s.record();
                println!("sharpened bound {}  (display only: {})", log_text(&s), s.approx);
                out["sharpened_bound"] = json!(s);
            }
            Ok(out)
        }
        Command::Dot { map, out } => {
            let m = inputs.map(map)?;
            write_file(out, &to_dot(&m))?;
            println!("wrote {}", out.display());
            Ok(json!({ "out": out.display().to_string() }))
        }
        Command::Acceptance { verbose } => {
            let results = acceptance::run_all();
            for r in &results {
                println!("{}", r.line());
                if *verbose || !r.pass {
                    for d in &r.details {
                        println!("      {d}");
                    }
                }
            }
            let passed = results.iter().filter(|r| r.pass).count();
            println!("{passed}/{} criteria passed", results.len());
            let out = serde_json::to_value(&results).expect("serializable");
            if passed != results.len() {
                return Err(Error::domain("acceptance suite failed"));
            }
            Ok(out)
        }
    }
}

fn construct(a: &ConstructArgs, inputs: &mut Inputs) -> Result<Value> {
    let eps = eps_arg(&a.eps)?;
    let need_n = || a.n.ok_or_else(|| Error::domain(format!("{} needs --n", a.kind)));
    let need_map = |inputs: &mut Inputs| match &a.map {
        Some(p) => inputs.map(p),
        None => Err(Error::domain(format!("{} needs --map", a.kind))),
    };
    let need_at = |m: &PLMarkovMap| match &a.at {
        Some(id) => cut_point(m, id),
        None => Err(Error::domain(format!("{} needs --at", a.kind))),
    };
    let built: Construction = match a.kind.as_str() {
        "tent3" | "b1" => {
            let m = if a.kind == "tent3" { tent3() } else { b1_base() };
            let e = entropy(&m, &EntropyOptions::default());
            plain(&a.kind, m, e)
        }
        "star" => star_exact(need_n()?, &eps)?,
        "binary" => binary_exact(need_n()?, &eps)?,
        "sigma" | "theta" | "figure8" | "dumbbell" => {
            let kind: QuotientKind = a.kind.parse()?;
            let ex = quotient_example(kind, &eps)?;
            let mut c = ex.tree.clone();
            c.map = ex.map;
            c.entropy = ex.entropy;
            c.endpoint_cycle = ex.inaccessible;
            c.root = None;
            c
        }
        "wedge" => {
            let m = need_map(inputs)?;
            let x0 = need_at(&m)?;
            let k = a.k.ok_or_else(|| Error::domain("wedge needs --k"))?;
            let w = wedge_power(&m, &x0, k)?;
            let e = entropy(&w, &EntropyOptions::default());
            plain("wedge", w, e)
        }
        "edge-add" => {
            let m = need_map(inputs)?;
            let z = need_at(&m)?;
            edge_add(&m, &z, &eps)?
        }
        "totalize" => totalize(&need_map(inputs)?, &eps)?,
        "purify" => {
            let m = need_map(inputs)?;
            let points = match &a.orbit {
                Some(ids) => ids.split(',').map(|id| cut_point(&m, id.trim())).collect::<Result<Vec<_>>>()?,
                None => topent_core::construct::endpoint_cycle(&m)
                    .ok_or_else(|| Error::domain("the map has no endpoint cycle; pass --orbit"))?,
            };
            let orbit = PeriodicOrbitSpec::new(&m, points)?;
            purify_stage(&m, &orbit, &eps, a.stage)?
        }
        other => return Err(Error::domain(format!("unknown construction {other:?}"))),
    };
    write_file(&a.out, &write_map(&built.map))?;
    let trace_path = a.trace.clone().unwrap_or_else(|| {
        let mut s = a.out.clone().into_os_string();
        s.push(".trace.json");
        PathBuf::from(s)
    });
    write_file(&trace_path, &to_canonical(&built.trace))?;
    println!("wrote {} and {}", a.out.display(), trace_path.display());
    print_enclosure(&built.entropy);
    let g = built.map.graph();
    let cycle: Vec<Value> = built.endpoint_cycle.iter().map(|x| point_json(g, x)).collect();
    Ok(json!({
        "kind": a.kind,
        "out": a.out.display().to_string(),
        "entropy": enclosure_record(&built.entropy),
        "endpoint_cycle": cycle,
    }))
}

/// A map with no construction history.
fn plain(kind: &str, m: PLMarkovMap, e: EntropyEnclosure) -> Construction {
    let mut trace = topent_core::construct::ConstructionTrace::new(kind);
    trace.entropy_lower = Some(e.lower.record());
    trace.entropy_upper = Some(e.upper.record());
    let endpoint_cycle = topent_core::construct::endpoint_cycle(&m).unwrap_or_default();
    Construction { map: m, entropy: e, trace, root: None, endpoint_cycle }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Resource(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let mut inputs = Inputs::default();
    let outcome = run(&cli, &mut inputs);
    let (code, results) = match outcome {
        Ok(v) => (0, v),
        Err(e) => {
            eprintln!("error: {e}");
            (exit_code(&e), json!({ "error": e.to_string() }))
        }
    };
    if let Some(path) = &cli.report {
        let report = RunReport {
            command: std::env::args().skip(1).collect(),
            inputs: inputs.seen,
            results,
            elapsed_ms: start.elapsed().as_millis(),
            versions: json!({ "topent": env!("CARGO_PKG_VERSION") }),
        };
        if let Err(e) = fs::write(path, to_canonical(&report)) {
            eprintln!("error: cannot write report {}: {e}", path.display());
            return ExitCode::from(1);
        }
    }
    ExitCode::from(code)
}
