use topent_core::construct::{
    b1_base, binary_exact, edge_add, purify_stage, quotient_example, quotient_map, same_up_to_vertex_names,
    star_exact, tent3, totalize, PeriodicOrbitSpec, QuotientKind,
};
use topent_core::graph::PointOnGraph;
use topent_core::logval::LogValue;
use topent_core::plmap::{classify, is_transitive, validate, PLMarkovMap};
use topent_core::rational::rat;
use topent_core::specprop::primitivity_index;

fn valid(m: &PLMarkovMap) -> bool {
    validate(&m.to_raw()).is_valid()
}

fn endpoint_count(m: &PLMarkovMap) -> usize {
    m.graph().point_census().endpoints.len()
}

#[test]
fn star_maps_cycle_their_endpoints() {
    for n in 2..=4 {
        let c = star_exact(n, &rat(1, 10)).unwrap();
        assert!(valid(&c.map));
        assert!(classify(&c.map).exact);
        assert!(primitivity_index(&c.map).is_some());
        assert_eq!(endpoint_count(&c.map), n);
        assert_eq!(c.endpoint_cycle.len(), n);
        assert!(PeriodicOrbitSpec::new(&c.map, c.endpoint_cycle.clone()).unwrap().in_endpoints);
        assert!(c.entropy.upper >= LogValue::of(3, n as u64));
        assert!(c.entropy.upper.lt_plus(&LogValue::of(3, n as u64), &rat(1, 10)));
    }
}

#[test]
fn binary_maps_fix_the_root_and_cycle_the_ends() {
    for n in 1..=2 {
        let c = binary_exact(n, &rat(1, 10)).unwrap();
        assert!(valid(&c.map));
        assert!(c.map.graph().is_tree());
        let root = c.root.clone().unwrap();
        assert_eq!(c.map.evaluate(&root), root);
        assert_eq!(c.endpoint_cycle.len(), 1 << n);
        assert_eq!(endpoint_count(&c.map), 1 << n);
    }
}

#[test]
fn totalize_is_primitive_and_keeps_cut_points() {
    let b1 = b1_base();
    let t = totalize(&b1, &rat(1, 10)).unwrap();
    assert!(valid(&t.map));
    assert!(classify(&t.map).totally_transitive);
    assert!(primitivity_index(&t.map).is_some());
    for x in b1.partition().points() {
        assert_eq!(t.map.evaluate(x), b1.evaluate(x));
    }
    assert!(totalize(&tent3(), &rat(1, 10)).is_err());
}

#[test]
fn edge_add_is_transitive_and_fixes_the_new_arc() {
    let m = tent3();
    let z = PointOnGraph::Vertex(0);
    let c = edge_add(&m, &z, &rat(1, 10)).unwrap();
    assert!(valid(&c.map));
    assert_eq!(c.map.graph().num_edges(), m.graph().num_edges() + 1);
    let cert = is_transitive(&c.map);
    assert!(cert.strongly_connected && cert.transitive);
    let end = c.root.clone().unwrap();
    assert_eq!(c.map.evaluate(&end), end);
    assert_eq!(c.map.evaluate(&z), z);
    assert!(c.entropy.upper.lt_plus(&LogValue::of(3, 1), &rat(1, 10)));
}

#[test]
fn purify_stages_stay_below_the_bound() {
    let eps = rat(1, 10);
    let c = star_exact(3, &eps).unwrap();
    let orbit = PeriodicOrbitSpec::new(&c.map, c.endpoint_cycle.clone()).unwrap();
    let bound = LogValue::max(c.entropy.lower.clone(), LogValue::of(3, 3));
    for j in 1..=3 {
        let s = purify_stage(&c.map, &orbit, &eps, j).unwrap();
        assert!(valid(&s.map));
        assert!(s.entropy.upper.lt_plus(&bound, &eps));
        assert_eq!(s.endpoint_cycle.len(), 3);
    }
    assert!(purify_stage(&c.map, &orbit, &eps, 0).is_err());
}

#[test]
fn quotients_are_well_defined() {
    for kind in [QuotientKind::Sigma, QuotientKind::Dumbbell] {
        let ex = quotient_example(kind, &rat(1, 10)).unwrap();
        assert!(valid(&ex.map));
        let (q, proj) = quotient_map(&ex.tree.map, &ex.classes).unwrap();
        assert!(same_up_to_vertex_names(&q, &ex.map));
        let tree = &ex.tree.map;
        for x in tree.partition().points() {
            assert_eq!(proj.project(&tree.evaluate(x)), q.evaluate(&proj.project(x)));
        }
        for e in 0..tree.graph().num_edges() {
            let x = tree.graph().point(e, tree.graph().edge(e).length.clone() * rat(3, 7)).unwrap();
            assert_eq!(proj.project(&tree.evaluate(&x)), q.evaluate(&proj.project(&x)));
        }
    }
}
