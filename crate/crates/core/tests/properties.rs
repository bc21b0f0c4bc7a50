use std::collections::BTreeSet;

use graphlap::{
    cutoff_function, delta_a, distances_from, gauge_to_schrodinger, inner_product_weighted, kernel_growth_probe,
    metric_ball, quadratic_form, solve_dirichlet, DirichletProblem, GraphBuilder, GraphFunction, GrowthVerdict,
    LaplacianSpec, PathFamily, SchrodingerOperator, VertexId, WeightedGraph,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn build_graph(n: usize, seed: u64) -> WeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new();
    for x in 0..n as VertexId {
        b.add_vertex(x, rng.random_range(0.2..5.0));
    }
    let mut edges = BTreeSet::new();
    for x in 1..n as VertexId {
        edges.insert((rng.random_range(0..x), x));
    }
    for _ in 0..n {
        let (x, y) = (rng.random_range(0..n as VertexId), rng.random_range(0..n as VertexId));
        if x != y {
            edges.insert((x.min(y), x.max(y)));
        }
    }
    for (x, y) in edges {
        b.add_edge(x, y, rng.random_range(0.1..10.0));
    }
    b.build().unwrap()
}

fn build_function(g: &WeightedGraph, seed: u64) -> GraphFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = GraphFunction::new();
    for x in g.vertices() {
        if rng.random_bool(0.6) {
            f.set(x, rng.random_range(-1.0..1.0));
        }
    }
    f
}

fn graph_strategy() -> impl Strategy<Value = WeightedGraph> {
    (2usize..16, any::<u64>()).prop_map(|(n, seed)| build_graph(n, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjacency_is_symmetric(g in graph_strategy()) {
        for x in g.vertices() {
            for y in g.neighbors(x).unwrap() {
                prop_assert!(g.neighbors(y).unwrap().contains(&x));
                prop_assert_eq!(g.conductance(x, y).unwrap(), g.conductance(y, x).unwrap());
            }
        }
    }

    #[test]
    fn combinatorial_balls_are_nested(g in graph_strategy(), r in 0usize..6) {
        let small = g.combinatorial_ball(0, r).unwrap().members;
        let large = g.combinatorial_ball(0, r + 1).unwrap().members;
        prop_assert!(small.is_subset(&large));
        prop_assert!(small.contains(&0));
    }

    #[test]
    fn regions_partition_and_are_idempotent(g in graph_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k: BTreeSet<VertexId> = g.vertices().filter(|_| rng.random_bool(0.5)).collect();
        let r = g.region(k.clone()).unwrap();
        prop_assert!(r.interior.is_disjoint(&r.boundary));
        prop_assert_eq!(r.interior.union(&r.boundary).copied().collect::<BTreeSet<_>>(), k.clone());
        prop_assert_eq!(g.region(k).unwrap(), r);
    }

    #[test]
    fn laplacian_is_symmetric_and_positive(g in graph_strategy(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let l = LaplacianSpec::new(g.clone());
        let (f, h) = (build_function(&g, s1), build_function(&g, s2));
        let lf = l.apply(&f).unwrap();
        let lh = l.apply(&h).unwrap();
        let a = inner_product_weighted(&lf, &h, &g).unwrap();
        let b = inner_product_weighted(&f, &lh, &g).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs().max(b.abs())));
        let q = quadratic_form(&l, &f).unwrap();
        prop_assert!(q >= 0.0);
        let via_inner = inner_product_weighted(&lf, &f, &g).unwrap();
        prop_assert!((q - via_inner).abs() <= 1e-10 * (1.0 + q));
    }

    #[test]
    fn laplacian_is_local(g in graph_strategy(), seed in any::<u64>()) {
        let l = LaplacianSpec::new(g.clone());
        let f = build_function(&g, seed);
        for x in g.vertices() {
            let mut near: BTreeSet<VertexId> = g.neighbors(x).unwrap().into_iter().collect();
            near.insert(x);
            let restricted = f.restrict(|y| near.contains(&y));
            prop_assert_eq!(l.apply_at(&f, x).unwrap(), l.apply_at(&restricted, x).unwrap());
        }
    }

    #[test]
    fn gauge_conjugation_holds(g in graph_strategy(), seed in any::<u64>()) {
        let l = LaplacianSpec::new(g.clone());
        let h = gauge_to_schrodinger(&l).unwrap();
        let f = build_function(&g, seed);
        let lifted = f.map(|x, v| v / g.omega(x).unwrap());
        for x in g.vertices() {
            let lhs = g.omega(x).unwrap() * l.apply_at(&lifted, x).unwrap();
            let rhs = h.apply_at(&f, x).unwrap();
            let scale = h.term_scale_at(&f, x).unwrap().max(f64::MIN_POSITIVE);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn distance_is_a_metric(g in graph_strategy()) {
        let ids: Vec<VertexId> = g.vertices().collect();
        let table: Vec<_> = ids.iter().map(|&x| distances_from(&g, x).unwrap()).collect();
        for (i, &x) in ids.iter().enumerate() {
            prop_assert_eq!(table[i][&x], 0.0);
            for (j, &y) in ids.iter().enumerate() {
                let d = table[i][&y];
                prop_assert!((d - table[j][&x]).abs() <= 1e-12 * d.max(1.0));
                if x != y {
                    prop_assert!(d > 0.0);
                }
                for &z in &ids {
                    prop_assert!(d <= table[i][&z] + table[j][&z] * (1.0 + 1e-12) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn cutoff_is_a_unit_lipschitz_sandwich(n in 60u64..120, radius in 0.5f64..20.0, scale in 0.5f64..3.0) {
        let g = PathFamily::Constant { omega: 1.0, cond: scale }.instantiate(n).unwrap();
        if let Ok(f) = cutoff_function(&g, 0, radius) {
            let inner = metric_ball(&g, 0, radius).unwrap();
            let outer = metric_ball(&g, 0, radius + 1.0).unwrap();
            prop_assert!(inner.members.is_subset(&outer.members));
            for x in g.vertices() {
                let v = f.get(x);
                prop_assert!((0.0..=1.0).contains(&v));
                if inner.members.contains(&x) { prop_assert_eq!(v, 1.0); }
                if !outer.members.contains(&x) { prop_assert_eq!(v, 0.0); }
            }
            for (x, y, _) in g.edges() {
                prop_assert!((f.get(x) - f.get(y)).abs() <= delta_a(&g, x, y).unwrap() * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn dirichlet_is_linear_in_boundary_data(n in 6u64..30, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = PathFamily::Constant { omega: 1.0, cond: rng.random_range(0.5..2.0) }.instantiate(n + 4).unwrap();
        let w: Vec<f64> = (0..=n + 4).map(|_| rng.random_range(0.0..1.0)).collect();
        let p = SchrodingerOperator::new(&g, |x| w[x as usize]).unwrap();
        let region = g.region(1..=n).unwrap();
        let solve = |u: &GraphFunction| solve_dirichlet(&DirichletProblem { operator: &p, region: &region, boundary: u }).unwrap().solution;
        let u1 = GraphFunction::from_iter([(1, rng.random_range(-1.0..1.0)), (n, rng.random_range(-1.0..1.0))]);
        let u2 = GraphFunction::from_iter([(1, rng.random_range(-1.0..1.0)), (n, rng.random_range(-1.0..1.0))]);
        let s = rng.random_range(-3.0..3.0);
        let lhs = solve(&u1.add(&u2.scaled(s)));
        let rhs = solve(&u1).add(&solve(&u2).scaled(s));
        for x in 1..=n {
            prop_assert!((lhs.get(x) - rhs.get(x)).abs() <= 1e-12 * (1.0 + lhs.get(x).abs()));
        }
        let again = solve(&u1);
        prop_assert_eq!(again, solve(&u1));
    }

    #[test]
    fn growth_persists_on_constant_weight_rays(omega in 0.2f64..5.0, cond in 0.2f64..5.0, n in 10u64..400) {
        let r = kernel_growth_probe(&PathFamily::Constant { omega, cond }, None, n).unwrap();
        prop_assert_eq!(r.verdict, GrowthVerdict::Grows);
        prop_assert!(r.growth_persists);
        prop_assert_eq!(r.monotone_from, Some(0));
        prop_assert!(r.max_relative_residual <= 1e-12);
    }
}
