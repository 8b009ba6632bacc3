use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use topent_core::construct::{b1_base, tent3, totalize};
use topent_core::graph::PointOnGraph;
use topent_core::plmap::PLMarkovMap;
use topent_core::rational::rat;
use topent_core::specprop::{primitivity_index, random_request, spec_witness, ShadowingRequest};

fn totalized() -> &'static PLMarkovMap {
    static MAP: OnceLock<PLMarkovMap> = OnceLock::new();
    MAP.get_or_init(|| totalize(&b1_base(), &rat(1, 10)).unwrap().map)
}

fn lies_in(m: &PLMarkovMap, i: usize, y: &PointOnGraph) -> bool {
    let p = m.partition();
    let b = p.interval(i);
    match y {
        PointOnGraph::Interior { edge, offset } => *edge == b.edge && b.contains_offset(offset),
        PointOnGraph::Vertex(_) => p.point_index(y).is_some_and(|k| k == b.start || k == b.end),
    }
}

/// Steps at which each requested segment starts in the witness orbit.
fn segment_starts(req: &ShadowingRequest) -> Vec<usize> {
    let mut out = Vec::new();
    let mut t = 0;
    for seg in &req.segments {
        out.push(t);
        t += seg.len() + req.gap - 1;
    }
    out
}

fn check_orbit(m: &PLMarkovMap, seed: u64) -> Result<(), TestCaseError> {
    let gap = primitivity_index(m).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let req = random_request(m, &mut rng, gap);
    let w = spec_witness(m, &req).unwrap();
    prop_assert!(w.verified());
    prop_assert_eq!(w.itinerary.len(), req.period);
    let mut orbit = vec![w.point.clone()];
    for _ in 0..req.period {
        orbit.push(m.evaluate(orbit.last().unwrap()));
    }
    prop_assert_eq!(&orbit[req.period], &w.point);
    for (seg, start) in req.segments.iter().zip(segment_starts(&req)) {
        for (k, &i) in seg.iter().enumerate() {
            prop_assert!(lies_in(m, i, &orbit[start + k]), "step {} misses interval {}", start + k, i);
        }
    }
    Ok(())
}

#[test]
fn gaps_below_the_index_are_rejected() {
    let m = totalized();
    let n = primitivity_index(m).unwrap();
    let req = ShadowingRequest { segments: vec![vec![0], vec![0]], gap: n - 1, period: 4 * n };
    assert!(spec_witness(m, &req).is_err());
    let req = ShadowingRequest { gap: n, ..req };
    assert!(spec_witness(m, &req).unwrap().verified());
}

#[test]
fn inconsistent_segments_are_rejected() {
    let m = totalized();
    let n = m.num_intervals();
    let succ: Vec<usize> = m.path(0).iter().map(|s| s.interval).collect();
    let missing = (0..n).find(|j| !succ.contains(j)).unwrap();
    let gap = primitivity_index(m).unwrap();
    let req = ShadowingRequest { segments: vec![vec![0, missing]], gap, period: gap + 2 };
    assert!(spec_witness(m, &req).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tent_witnesses_shadow(seed in any::<u64>()) {
        check_orbit(&tent3(), seed)?;
    }

    #[test]
    fn totalized_witnesses_shadow(seed in any::<u64>()) {
        check_orbit(totalized(), seed)?;
    }
}
