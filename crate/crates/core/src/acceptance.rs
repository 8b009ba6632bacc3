//! The acceptance suite: eleven end-to-end criteria, each reporting pass or
//! fail with a few lines of detail. Deterministic and offline.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::construct::{
    b1_base, binary_exact, purify_stage, quotient_example, same_up_to_vertex_names, sides_at, star_exact, tent3,
    totalize, unfold, wedge_power, PeriodicOrbitSpec, QuotientKind,
};
use crate::error::Result;
use crate::graph::{catalog, kappa, kappa_by_subgraphs, PointOnGraph, TopoGraph};
use crate::io::{parse_map, write_map};
use crate::logval::LogValue;
use crate::plmap::{
    bound_report, classify, entropy, incidence_matrix, is_transitive, loose_horseshoe_search, period_decomposition,
    validate, EntropyEnclosure, EntropyOptions, PLMarkovMap,
};
use crate::rational::{rat, Rational};
use crate::specprop::{primitivity_index, random_request, spec_witness};

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub details: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2}. {} ({:.2}s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64()
        )
    }
}

pub const NAMES: [&str; 11] = [
    "entropy exactness",
    "wedge law",
    "star infima",
    "binary-tree infima",
    "kappa catalog",
    "bound consistency",
    "classification soundness",
    "horseshoe and entropy coupling",
    "unfolding round trips",
    "specification witnesses",
    "property suites",
];

/// Collects check outcomes for one criterion.
struct Sheet {
    pass: bool,
    details: Vec<String>,
}

impl Sheet {
    fn new() -> Self {
        Sheet { pass: true, details: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        self.details.push(format!("{} {what}", if ok { "ok  " } else { "FAIL" }));
        self.pass &= ok;
    }
}

pub fn run(id: usize) -> CriterionResult {
    let t = Instant::now();
    let mut s = Sheet::new();
    let outcome = match id {
        1 => entropy_exactness(&mut s),
        2 => wedge_law(&mut s),
        3 => star_infima(&mut s),
        4 => binary_infima(&mut s),
        5 => kappa_catalog(&mut s),
        6 => bound_consistency(&mut s),
        7 => classification(&mut s),
        8 => horseshoes(&mut s),
        9 => unfoldings(&mut s),
        10 => witnesses(&mut s),
        11 => properties(&mut s),
        _ => panic!("no criterion {id}"),
    };
    if let Err(e) = outcome {
        s.check(false, format!("error: {e}"));
    }
    CriterionResult { id, name: NAMES[id - 1], pass: s.pass, details: s.details, elapsed: t.elapsed() }
}

pub fn run_all() -> Vec<CriterionResult> {
    (1..=NAMES.len()).map(run).collect()
}

fn show(e: &EntropyEnclosure) -> String {
    format!("[{}, {}] ~ [{:.12}, {:.12}]", e.lower, e.upper, e.lower.approx(), e.upper.approx())
}

/// `a` and `b` meet once widened by `gap`.
fn within(a: (&LogValue, &LogValue), b: (&LogValue, &LogValue), gap: &Rational) -> bool {
    a.0.lt_plus(b.1, gap) && b.0.lt_plus(a.1, gap)
}

/// The enclosure is consistent with `[target, target + eps)`: it reaches
/// `target` and stays below `target + eps`.
fn in_band(e: &EntropyEnclosure, target: &LogValue, eps: &Rational) -> bool {
    e.upper >= *target && e.upper.lt_plus(target, eps)
}

fn entropy_exactness(s: &mut Sheet) -> Result<()> {
    let e = entropy(&tent3(), &EntropyOptions::default());
    let log3 = LogValue::of(3, 1);
    s.check(e.lower == log3 && e.upper == log3, format!("tent3 {}", show(&e)));
    let e = entropy(&b1_base(), &EntropyOptions::default());
    let target = LogValue::of(3, 2);
    let width_ok = e.upper.lt_plus(&e.lower, &rat(1, 1_000_000_000)) || e.upper == e.lower;
    s.check(e.lower <= target && target <= e.upper && width_ok, format!("b1 {} contains log(3)/2", show(&e)));
    Ok(())
}

fn wedge_law(s: &mut Sheet) -> Result<()> {
    let m = tent3();
    let base = entropy(&m, &EntropyOptions::default());
    for n in 2..=5u64 {
        let w = wedge_power(&m, &PointOnGraph::Vertex(0), n as usize)?;
        let e = entropy(&w, &EntropyOptions::default());
        let (lo, hi) = (e.lower.mul(n), e.upper.mul(n));
        let ok = within((&lo, &hi), (&base.lower, &base.upper), &rat(1, 100_000_000));
        s.check(ok, format!("{n} * h(wedge {n}) = [{lo}, {hi}] meets h(tent3)"));
    }
    Ok(())
}

fn star_infima(s: &mut Sheet) -> Result<()> {
    let eps = rat(1, 10);
    for n in 2..=5u64 {
        let c = star_exact(n as usize, &eps)?;
        let target = LogValue::of(3, n);
        s.check(classify(&c.map).exact, format!("star {n} is exact"));
        s.check(in_band(&c.entropy, &target, &eps), format!("star {n}: {} in [log 3/{n}, log 3/{n} + 1/10)", show(&c.entropy)));
        let orbit = PeriodicOrbitSpec::new(&c.map, c.endpoint_cycle.clone())?;
        let bound = LogValue::max(c.entropy.lower.clone(), LogValue::of(3, orbit.len() as u64));
        let mut prev: Option<EntropyEnclosure> = None;
        for j in 1..=5 {
            let st = purify_stage(&c.map, &orbit, &eps, j)?;
            let below = st.entropy.upper.lt_plus(&bound, &eps);
            let monotone = prev.as_ref().is_none_or(|p| p.lower <= st.entropy.upper);
            s.check(
                below && monotone && validate(&st.map.to_raw()).is_valid(),
                format!("star {n} stage {j}: {} below {bound} + 1/10, not below stage {}", show(&st.entropy), j - 1),
            );
            prev = Some(st.entropy);
        }
    }
    Ok(())
}

fn binary_infima(s: &mut Sheet) -> Result<()> {
    let eps = rat(1, 10);
    for n in 1..=3u32 {
        let c = binary_exact(n as usize, &eps)?;
        let ends = 1usize << n;
        let target = LogValue::of(3, ends as u64);
        s.check(in_band(&c.entropy, &target, &eps), format!("B_{n}: {} in [log 3/{ends}, + 1/10)", show(&c.entropy)));
        let g = c.map.graph();
        let cyc = &c.endpoint_cycle;
        let cycles = cyc.len() == ends
            && g.point_census().endpoints.len() == ends
            && (0..ends).all(|k| c.map.evaluate(&cyc[k]) == cyc[(k + 1) % ends]);
        s.check(cycles, format!("B_{n}: the {ends} endpoints form one cycle"));
    }
    Ok(())
}

fn kappa_catalog(s: &mut Sheet) -> Result<()> {
    let mut cases: Vec<(String, TopoGraph, Option<i64>)> = vec![
        ("arc".into(), catalog::arc(), Some(3)),
        ("circle".into(), catalog::circle(), Some(3)),
    ];
    for n in 3..=6 {
        cases.push((format!("T_{n}"), catalog::star(n), (n <= 5).then_some(n as i64 + 1)));
    }
    for n in 1..=3 {
        cases.push((format!("B_{n}"), catalog::binary_tree(n), None));
    }
    cases.push(("sigma".into(), catalog::sigma(), Some(4)));
    cases.push(("theta".into(), catalog::theta(), Some(5)));
    cases.push(("figure-eight".into(), catalog::figure_eight(), None));
    cases.push(("dumbbell".into(), catalog::dumbbell(), None));
    for (name, g, expected) in cases {
        let formula = kappa(&g);
        let (brute, _) = kappa_by_subgraphs(&g, 2, 1_000_000)?;
        let ok = formula == brute as i64 && expected.is_none_or(|k| k == formula);
        s.check(ok, format!("{name}: formula {formula}, subgraphs {brute}, expected {expected:?}"));
    }
    Ok(())
}

fn bound_consistency(s: &mut Sheet) -> Result<()> {
    let eps = rat(1, 10);
    let sigma = quotient_example(QuotientKind::Sigma, &eps)?;
    let r = bound_report(&catalog::sigma());
    s.check(r.kappa == 4 && kappa(&sigma.graph) == 4, "sigma example lives on a graph with kappa 4");
    s.check(
        r.kappa_bound <= sigma.entropy.lower,
        format!("log 3/kappa = {} <= sigma example {}", r.kappa_bound, show(&sigma.entropy)),
    );
    let theta = quotient_example(QuotientKind::ThetaCandidate, &eps)?;
    let r = bound_report(&catalog::theta());
    s.check(kappa(&theta.graph) == 5, "theta example lives on a graph with kappa 5");
    s.check(
        theta.entropy.upper.lt_plus(&LogValue::of(3, 3), &eps),
        format!("theta candidate {} < log 3/3 + 1/10", show(&theta.entropy)),
    );
    let sharp = r.sharpened_bound.clone().unwrap_or_else(LogValue::zero);
    s.check(sharp < theta.entropy.upper && sharp == LogValue::of(3, 4), format!("sharpened bound {sharp} < theta candidate"));
    Ok(())
}

fn classification(s: &mut Sheet) -> Result<()> {
    let b1 = b1_base();
    let c = classify(&b1);
    let d = period_decomposition(&b1)?;
    s.check(c.transitive && !c.totally_transitive && d.k == 2, format!("b1: transitive, period {}", d.k));
    let t = totalize(&b1, &rat(1, 10))?;
    let idx = primitivity_index(&t.map);
    s.check(idx.is_some(), format!("totalize(b1): primitive, index {idx:?}"));
    s.check(
        t.entropy.upper.lt_plus(&LogValue::of(3, 2), &rat(1, 10)),
        format!("totalize(b1): {} < log sqrt 3 + 1/10", show(&t.entropy)),
    );
    Ok(())
}

/// Maps small enough for exhaustive checks, with names.
pub fn catalog_maps() -> Result<Vec<(String, PLMarkovMap)>> {
    let eps = rat(1, 10);
    let mut out = vec![("tent3".to_string(), tent3()), ("b1".to_string(), b1_base())];
    out.push(("totalize(b1)".into(), totalize(&b1_base(), &eps)?.map));
    for n in 2..=5 {
        out.push((format!("wedge {n} of tent3"), wedge_power(&tent3(), &PointOnGraph::Vertex(0), n)?));
    }
    for n in 2..=3 {
        out.push((format!("star {n}"), star_exact(n, &eps)?.map));
    }
    out.push(("B_1".into(), binary_exact(1, &eps)?.map));
    Ok(out)
}

fn horseshoes(s: &mut Sheet) -> Result<()> {
    for (name, m) in catalog_maps()? {
        let e = entropy(&m, &EntropyOptions::default());
        for k in 2..=3i64 {
            if let Some(h) = loose_horseshoe_search(&m, k as usize) {
                if h.loose {
                    s.check(e.lower > LogValue::of(k, 1), format!("{name}: loose {k}-horseshoe, h >= {} > log {k}", e.lower));
                } else if name == "tent3" && k == 3 {
                    s.check(e.lower == LogValue::of(3, 1) && e.upper == LogValue::of(3, 1), "tent3: tight 3-horseshoe, h = log 3");
                }
            }
        }
    }
    let t = loose_horseshoe_search(&tent3(), 3);
    s.check(t.is_some_and(|h| !h.loose), "tent3 reports its 3-horseshoe as tight");
    Ok(())
}

fn unfoldings(s: &mut Sheet) -> Result<()> {
    for kind in [QuotientKind::Sigma, QuotientKind::Dumbbell] {
        let ex = quotient_example(kind, &rat(1, 10))?;
        let vs: Vec<usize> = ex
            .inaccessible
            .iter()
            .filter_map(|x| match x {
                PointOnGraph::Vertex(v) => Some(*v),
                PointOnGraph::Interior { .. } => None,
            })
            .collect();
        let u = unfold(&ex.map, &sides_at(&ex.graph, &vs), 2024)?;
        let r = &u.report;
        s.check(same_up_to_vertex_names(&u.map, &ex.tree.map), format!("{kind}: unfolding reproduces the tree map"));
        s.check(r.semiconjugacy_on_points && r.semiconjugacy_on_samples, format!("{kind}: semiconjugacy on cut points and {} samples", r.samples));
        s.check(r.detached_below_kappa, format!("{kind}: {} detached endpoints < kappa {}", r.detached, r.kappa));
        s.check(r.unique_preimages, format!("{kind}: each detached endpoint has one preimage"));
    }
    Ok(())
}

fn witnesses(s: &mut Sheet) -> Result<()> {
    let maps = vec![("tent3", tent3()), ("totalize(b1)", totalize(&b1_base(), &rat(1, 10))?.map)];
    for (name, m) in maps {
        let gap = primitivity_index(&m).unwrap_or(0);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut good = 0;
        let mut first_failure = None;
        for _ in 0..100 {
            let req = random_request(&m, &mut rng, gap.max(1));
            match spec_witness(&m, &req) {
                Ok(w) if w.verified() && m.evaluate_n(&w.point, req.period) == w.point => good += 1,
                Ok(_) => first_failure = first_failure.or(Some(format!("unverified witness for {req:?}"))),
                Err(e) => first_failure = first_failure.or(Some(format!("{e} for {req:?}"))),
            }
        }
        s.check(good == 100, format!("{name}: {good}/100 requests at gap {gap} give exact periodic witnesses"));
        if let Some(f) = first_failure {
            s.details.push(format!("     first failure: {f}"));
        }
    }
    Ok(())
}

/// Random Markov map of `[0, 1]` cut at `k/n`, sending each cut point to a
/// cut point with neighbours going to different points.
pub fn random_interval_map<R: Rng>(rng: &mut R, n: usize) -> PLMarkovMap {
    let g = catalog::arc();
    let mut b = crate::construct::TreeMapBuilder::new(g.clone());
    let mut prev = usize::MAX;
    for k in 0..=n {
        let mut img = rng.gen_range(0..=n);
        while img == prev {
            img = rng.gen_range(0..=n);
        }
        prev = img;
        let at = |j: usize| g.point(0, rat(j as i64, n as i64)).unwrap();
        b.set(at(k), at(img));
    }
    b.build().expect("random interval map")
}

/// Accuracy of the floating eigenvalue oracle.
pub const ORACLE_TOL: f64 = 1e-12;

/// Transitive closure of the incidence relation.
fn closure(m: &PLMarkovMap) -> Vec<Vec<bool>> {
    let a = incidence_matrix(m);
    let n = a.dim();
    let mut c = vec![vec![false; n]; n];
    for (i, row) in a.rows().iter().enumerate() {
        for &j in row {
            c[i][j] = true;
        }
    }
    for k in 0..n {
        let through = c[k].clone();
        for row in c.iter_mut().filter(|r| r[k]) {
            for (x, &y) in row.iter_mut().zip(&through) {
                *x |= y;
            }
        }
    }
    c
}

/// Spectral radius from a dense floating-point eigenvalue solver, taken
/// over the irreducible diagonal blocks so every Perron root is simple.
pub fn float_spectral_radius(m: &PLMarkovMap) -> f64 {
    let a = incidence_matrix(m);
    let c = closure(m);
    let n = a.dim();
    let mut seen = vec![false; n];
    let mut rho = 0.0f64;
    for i in 0..n {
        if seen[i] || !c[i][i] {
            continue;
        }
        let block: Vec<usize> = (0..n).filter(|&j| c[i][j] && c[j][i]).collect();
        let mut d = DMatrix::<f64>::zeros(block.len(), block.len());
        for (r, &u) in block.iter().enumerate() {
            seen[u] = true;
            for (s, &v) in block.iter().enumerate() {
                if a.get(u, v) {
                    d[(r, s)] = 1.0;
                }
            }
        }
        rho = d.complex_eigenvalues().iter().map(|z| z.norm()).fold(rho, f64::max);
    }
    rho
}

/// Transitivity from the transitive closure: irreducible and not a
/// permutation.
pub fn closure_transitive(m: &PLMarkovMap) -> bool {
    let a = incidence_matrix(m);
    closure(m).iter().all(|r| r.iter().all(|&x| x)) && a.rows().iter().any(|r| r.len() > 1)
}

fn properties(s: &mut Sheet) -> Result<()> {
    let mut instances = catalog_maps()?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..40 {
        let n = rng.gen_range(2..=12);
        instances.push((format!("random interval map {k} ({n} pieces)"), random_interval_map(&mut rng, n)));
    }
    let (mut idem, mut sound, mut trans, mut checked) = (0, 0, 0, 0);
    let mut failures = Vec::new();
    for (name, m) in &instances {
        if m.num_intervals() > 64 {
            continue;
        }
        checked += 1;
        let raw = m.to_raw();
        let text = write_map(m);
        let again = parse_map(&text, None).ok();
        if validate(&raw).is_valid()
            && validate(&again.as_ref().unwrap_or(m).to_raw()).is_valid()
            && again.as_ref() == Some(m)
            && again.map(|x| write_map(&x)) == Some(text)
        {
            idem += 1;
        } else {
            failures.push(format!("{name}: validate/serialize not idempotent"));
        }
        let e = entropy(m, &EntropyOptions::default());
        let rho = float_spectral_radius(m);
        let h = if rho > 1.0 { rho.ln() } else { 0.0 };
        let (lo, hi) = (e.lower.approx(), e.upper.approx());
        if lo - ORACLE_TOL <= h && h <= hi + ORACLE_TOL {
            sound += 1;
        } else {
            failures.push(format!("{name}: oracle {h:.12} outside {}", show(&e)));
        }
        if is_transitive(m).transitive == closure_transitive(m) {
            trans += 1;
        } else {
            failures.push(format!("{name}: transitivity disagrees with the closure oracle"));
        }
    }
    s.check(idem == checked, format!("validate and serialization idempotent on {idem}/{checked} maps"));
    s.check(sound == checked, format!("floating eigenvalue oracle inside the enclosure on {sound}/{checked} maps"));
    s.check(trans == checked, format!("transitivity matches the closure oracle on {trans}/{checked} maps"));
    for f in failures {
        s.details.push(format!("     {f}"));
    }
    Ok(())
}
