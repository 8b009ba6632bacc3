use proptest::prelude::*;
use topent_core::graph::{catalog, kappa, kappa_by_subgraphs, Edge, TopoGraph};
use topent_core::rational::rat;

/// Connected graph: a random tree on `n` vertices plus extra edges, loops
/// allowed.
fn connected_graph(n: usize, parents: &[usize], extra: &[(usize, usize)]) -> TopoGraph {
    let names = (0..n).map(|v| format!("v{v}")).collect();
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push(Edge { id: format!("t{v}"), ends: (parents[v - 1] % v, v), length: rat(1, 1) });
    }
    for (k, &(a, b)) in extra.iter().enumerate() {
        edges.push(Edge { id: format!("x{k}"), ends: (a % n, b % n), length: rat(1, 1) });
    }
    TopoGraph::from_parts(names, edges).unwrap()
}

#[test]
fn catalog_values() {
    let cases = [
        (catalog::arc(), 3),
        (catalog::circle(), 3),
        (catalog::star(3), 4),
        (catalog::star(4), 5),
        (catalog::star(5), 6),
        (catalog::sigma(), 4),
        (catalog::theta(), 5),
    ];
    for (g, k) in cases {
        assert_eq!(kappa(&g), k);
        assert_eq!(kappa_by_subgraphs(&g, 2, 1_000_000).unwrap().0 as i64, k);
    }
}

#[test]
fn euler_characteristic_of_the_catalog() {
    assert_eq!(catalog::theta().euler_characteristic(), -1);
    assert_eq!(catalog::figure_eight().euler_characteristic(), -1);
    assert_eq!(catalog::dumbbell().euler_characteristic(), -1);
    assert_eq!(catalog::circle().euler_characteristic(), 0);
    for n in 1..=3 {
        let g = catalog::binary_tree(n);
        assert!(g.is_tree());
        assert_eq!(g.point_census().endpoints.len(), 1 << n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn formula_matches_subgraph_enumeration(
        n in 2usize..5,
        parents in prop::collection::vec(0usize..8, 4),
        extra in prop::collection::vec((0usize..8, 0usize..8), 0..2),
    ) {
        let g = connected_graph(n, &parents, &extra);
        let (brute, _) = kappa_by_subgraphs(&g, 2, 2_000_000).unwrap();
        prop_assert_eq!(kappa(&g), brute as i64);
    }
}
