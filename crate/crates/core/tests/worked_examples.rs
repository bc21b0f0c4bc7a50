use std::collections::BTreeSet;

use graphlap::{
    combinatorial_ball, form_lower_bound, form_lower_bound_on, kl_proxy_check, max_degree, neighbors,
    ray_completeness_diagnostic, region_from_vertexset, run_exhaustion, solve_dirichlet, Completeness,
    DirichletProblem, Error, GraphBuilder, GraphFunction, GraphSource, PathFamily, SchrodingerOperator, VertexId,
};

fn unit_path(first: VertexId, last: VertexId) -> graphlap::WeightedGraph {
    graphlap::WeightedGraph::path(first, last, |_| 1.0, |_| 1.0).unwrap()
}

#[test]
fn path_and_star_neighbors() {
    let p = unit_path(1, 3);
    assert_eq!(neighbors(&p, 2).unwrap(), vec![1, 3]);
    assert_eq!(neighbors(&p, 1).unwrap(), vec![2]);
    assert!(matches!(neighbors(&p, 9), Err(Error::UnknownVertex(9))));
    let mut b = GraphBuilder::new();
    b.add_vertex(0, 1.0);
    for leaf in 1..=4 {
        b.add_vertex(leaf, 1.0).add_edge(0, leaf, 1.0);
    }
    let star = b.build().unwrap();
    assert_eq!(neighbors(&star, 0).unwrap(), vec![1, 2, 3, 4]);
    assert_eq!(max_degree(&star).unwrap(), 4);
    assert_eq!(max_degree(&unit_path(0, 4)).unwrap(), 2);
    assert_eq!(max_degree(&PathFamily::NLogN.instantiate(100).unwrap()).unwrap(), 2);
}

#[test]
fn grid_ball() {
    let mut b = GraphBuilder::new();
    let id = |i: u64, j: u64| 3 * i + j;
    for i in 0..3 {
        for j in 0..3 {
            b.add_vertex(id(i, j), 1.0);
            if i > 0 {
                b.add_edge(id(i - 1, j), id(i, j), 1.0);
            }
            if j > 0 {
                b.add_edge(id(i, j - 1), id(i, j), 1.0);
            }
        }
    }
    let g = b.build().unwrap();
    assert_eq!(combinatorial_ball(&g, 4, 1).unwrap().members, BTreeSet::from([1, 3, 4, 5, 7]));
    assert_eq!(combinatorial_ball(&g, 4, 0).unwrap().members, BTreeSet::from([4]));
}

#[test]
fn region_inside_a_longer_path() {
    // vertex 1 is the end of the host path, so all of its neighbors lie in K
    let host = unit_path(1, 10);
    let r = region_from_vertexset(&host, 1..=5).unwrap();
    assert_eq!(r.interior, (1..=4).collect());
    assert_eq!(r.boundary, BTreeSet::from([5]));
    let whole = region_from_vertexset(&host, 1..=10).unwrap();
    assert!(whole.boundary.is_empty());
    let single = region_from_vertexset(&host, [4]).unwrap();
    assert!(single.interior.is_empty() && !single.has_interior());
}

#[test]
fn three_path_dirichlet_values() {
    let g = unit_path(0, 4);
    let p = SchrodingerOperator::new(&g, |_| 0.0).unwrap();
    let region = g.region([1, 2, 3]).unwrap();
    let solve = |u: GraphFunction| {
        solve_dirichlet(&DirichletProblem {
            operator: &p,
            region: &region,
            boundary: &u,
        })
        .unwrap()
        .solution
    };
    assert!((solve(GraphFunction::constant_on([1, 3], 1.0)).get(2) - 1.0).abs() < 1e-14);
    assert!((solve(GraphFunction::from_iter([(1, 1.0), (3, 0.0)])).get(2) - 0.5).abs() < 1e-14);
}

#[test]
fn exhaustion_without_potential_converges_immediately() {
    let p = PathFamily::Constant { omega: 1.0, cond: 1.0 }.conjugate_operator(60).unwrap();
    let zero = SchrodingerOperator::new(p.graph(), |_| 0.0).unwrap();
    let r = run_exhaustion(&zero, 0, 20, 1e-12, None).unwrap();
    assert_eq!(r.converged_at, Some(1));
    assert!(r.phi.iter().all(|(_, v)| (v - 1.0).abs() < 1e-12));
}

#[test]
fn truncations_mark_only_the_cut_vertex() {
    let fam = PathFamily::InverseShift;
    let g = fam.materialize(&(0..=20).collect()).unwrap();
    assert_eq!(g.frontier().collect::<Vec<_>>(), vec![20]);
}

#[test]
fn documented_completeness_cases() {
    let complete = ray_completeness_diagnostic(&PathFamily::Power { alpha: 1.0, beta: 0.0 }, 100_000);
    // marginal pair: alpha - beta/2 = 1 exactly, diverging like a harmonic series
    assert_eq!(complete.unwrap().verdict, Some(Completeness::Complete));
    let d = ray_completeness_diagnostic(&PathFamily::Power { alpha: 2.0, beta: 1.0 }, 100_000).unwrap();
    assert_eq!(d.verdict, Some(Completeness::Incomplete));
    assert!(d.agrees());
    let ray = ray_completeness_diagnostic(&PathFamily::RayPower { eps: 1.0, corrected: true }, 100_000).unwrap();
    assert_eq!(ray.verdict, Some(Completeness::Incomplete));
    let reversed_sign = ray_completeness_diagnostic(&PathFamily::RayPower { eps: 1.0, corrected: false }, 100_000).unwrap();
    assert_eq!(reversed_sign.verdict, Some(Completeness::Complete));
    let kl = kl_proxy_check(&PathFamily::SqrtShift, 100_000).unwrap();
    assert_eq!(kl.summable, Some(false));
}

#[test]
fn form_bounds_shrink_with_truncation() {
    let fam = PathFamily::NLogN;
    let small = form_lower_bound(&fam.conjugate_operator(50).unwrap()).unwrap().value;
    let large = form_lower_bound(&fam.conjugate_operator(400).unwrap()).unwrap().value;
    assert!(large <= small && large >= 0.0);
    // nonnegative potential bounds the form from below by zero
    let p = PathFamily::Constant { omega: 1.0, cond: 2.0 }.conjugate_operator(30).unwrap();
    assert!(form_lower_bound_on(&p, &(3..=20).collect()).unwrap().value >= 0.0);
}
