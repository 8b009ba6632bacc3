use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use topent_core::acceptance::{closure_transitive, float_spectral_radius, random_interval_map, ORACLE_TOL};
use topent_core::construct::{tent3, wedge_power};
use topent_core::graph::PointOnGraph;
use topent_core::io::{parse_map, write_map};
use topent_core::logval::LogValue;
use topent_core::plmap::{entropy, is_transitive, periodic_points, validate, EntropyOptions, PLMarkovMap};
use topent_core::rational::{rat, Rational};

fn map_from(seed: u64, n: usize) -> PLMarkovMap {
    random_interval_map(&mut ChaCha8Rng::seed_from_u64(seed), n)
}

/// Whether `y` lies in basic interval `i`, read off the edge offsets.
fn lies_in(m: &PLMarkovMap, i: usize, y: &PointOnGraph) -> bool {
    let p = m.partition();
    let b = p.interval(i);
    match y {
        PointOnGraph::Interior { edge, offset } => *edge == b.edge && b.contains_offset(offset),
        PointOnGraph::Vertex(_) => p.point_index(y).is_some_and(|k| k == b.start || k == b.end),
    }
}

#[test]
fn tent_has_three_to_the_n_points_of_period_n() {
    let m = tent3();
    for n in 1..=4u32 {
        let pts = periodic_points(&m, n as usize, 1_000_000).unwrap();
        assert_eq!(pts.len(), 3usize.pow(n));
        for p in &pts {
            assert_eq!(m.evaluate_n(&p.point, n as usize), p.point);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn validation_and_serialization_are_idempotent(seed in any::<u64>(), n in 2usize..10) {
        let m = map_from(seed, n);
        prop_assert!(validate(&m.to_raw()).is_valid());
        let text = write_map(&m);
        let back = parse_map(&text, None).unwrap();
        prop_assert!(validate(&back.to_raw()).is_valid());
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(write_map(&back), text);
    }

    #[test]
    fn enclosure_contains_the_eigenvalue_oracle(seed in any::<u64>(), n in 2usize..10) {
        let m = map_from(seed, n);
        let e = entropy(&m, &EntropyOptions::default());
        prop_assert!(e.lower <= e.upper);
        let rho = float_spectral_radius(&m);
        let h = if rho > 1.0 { rho.ln() } else { 0.0 };
        prop_assert!(e.lower.approx() - ORACLE_TOL <= h && h <= e.upper.approx() + ORACLE_TOL,
            "oracle {} outside [{}, {}]", h, e.lower.approx(), e.upper.approx());
    }

    #[test]
    fn transitivity_matches_the_closure_oracle(seed in any::<u64>(), n in 2usize..10) {
        let m = map_from(seed, n);
        prop_assert_eq!(is_transitive(&m).transitive, closure_transitive(&m));
    }

    #[test]
    fn images_follow_the_interval_paths(seed in any::<u64>(), n in 2usize..10, num in 0i64..=97) {
        let m = map_from(seed, n);
        let g = m.graph();
        let x = g.point(0, rat(num, 97)).unwrap();
        let y = m.evaluate(&x);
        let p = m.partition();
        let homes: Vec<usize> = (0..m.num_intervals()).filter(|&i| lies_in(&m, i, &x)).collect();
        prop_assert!(!homes.is_empty());
        for i in homes {
            prop_assert!(m.path(i).iter().any(|s| lies_in(&m, s.interval, &y)),
                "{} in {} maps outside its path", p.describe(&x), p.interval(i).id);
        }
    }

    #[test]
    fn periodic_points_return(seed in any::<u64>(), n in 2usize..7, period in 1usize..4) {
        let m = map_from(seed, n);
        for q in periodic_points(&m, period, 100_000).unwrap() {
            prop_assert_eq!(m.evaluate_n(&q.point, period), q.point.clone());
            let mut y = q.point.clone();
            for &i in &q.itinerary {
                prop_assert!(lies_in(&m, i, &y));
                y = m.evaluate(&y);
            }
        }
    }

    #[test]
    fn wedge_divides_entropy(seed in any::<u64>(), n in 2usize..7, k in 2u64..5) {
        let m = map_from(seed, n);
        let fixed = m.fixed_cut_points();
        prop_assume!(!fixed.is_empty());
        let x0 = m.partition().point(fixed[0]).clone();
        let w = wedge_power(&m, &x0, k as usize).unwrap();
        let base = entropy(&m, &EntropyOptions::default());
        let e = entropy(&w, &EntropyOptions::default());
        let tol: Rational = rat(1, 100_000_000);
        let (lo, hi) = (e.lower.mul(k), e.upper.mul(k));
        prop_assert!(lo.lt_plus(&base.upper, &tol) && base.lower.lt_plus(&hi, &tol),
            "k h(wedge) = [{}, {}] vs h = [{}, {}]", lo.approx(), hi.approx(), base.lower.approx(), base.upper.approx());
        prop_assert!(LogValue::zero() <= e.lower);
    }
}
