use abelian_walk::birkhoff::{subpolytope_membership, trajectory, transition_matrix};
use abelian_walk::measures::{entropy, gini, gini_pairwise, majorizes, tv_distance, tv_to_uniform};
use abelian_walk::polytope::{contains, full_polytope, is_subset, subgroup_polytope, CONTAINS_TOL};
use abelian_walk::{GroupSpec, ProbabilityVector, StepDistribution};
use proptest::prelude::*;

const SLACK: f64 = 1e-12;

fn groups() -> impl Strategy<Value = GroupSpec> {
    prop_oneof![
        Just(GroupSpec::cyclic(3).unwrap()),
        Just(GroupSpec::cyclic(5).unwrap()),
        Just(GroupSpec::cyclic(9).unwrap()),
        Just(GroupSpec::product(3).unwrap()),
    ]
}

/// Nonnegative weights with a fair chance of exact zeros, normalized to sum 1.
fn simplex_point(n: usize) -> impl Strategy<Value = ProbabilityVector> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.0..1.0f64], n).prop_filter_map(
        "all-zero weights",
        |w| {
            let s: f64 = w.iter().sum();
            (s > 1e-6).then(|| {
                ProbabilityVector::with_normalization(
                    w.iter().map(|x| x / s).collect(),
                    abelian_walk::Normalization::Renormalize,
                )
                .unwrap()
            })
        },
    )
}

fn walk_case() -> impl Strategy<Value = (GroupSpec, StepDistribution, ProbabilityVector)> {
    groups().prop_flat_map(|g| {
        let n = g.order();
        (Just(g), simplex_point(n), simplex_point(n))
            .prop_map(|(g, p, q)| (g, StepDistribution::new(g, p).unwrap(), q))
    })
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(256)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn monotone_along_walk((g, p, q0) in walk_case()) {
        let m = transition_matrix(g, &p).unwrap();
        let path = trajectory(&q0, &m, 6).unwrap();
        for pair in path.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            prop_assert!(majorizes(a, b).unwrap());
            prop_assert!(entropy(b) >= entropy(a) - SLACK);
            prop_assert!(gini(b) <= gini(a) + SLACK);
            prop_assert!(tv_to_uniform(b) <= tv_to_uniform(a) + SLACK);
        }
    }

    #[test]
    fn tv_contracts((g, p, x) in walk_case(), seed in 0usize..1000) {
        let m = transition_matrix(g, &p).unwrap();
        let n = g.order();
        let y = ProbabilityVector::delta(n, seed % n).unwrap();
        let before = tv_distance(&x, &y).unwrap();
        let after = tv_distance(&x.step(&m).unwrap(), &y.step(&m).unwrap()).unwrap();
        prop_assert!(after <= before + SLACK);
    }

    #[test]
    fn uniform_is_fixed((g, p, _q) in walk_case()) {
        let m = transition_matrix(g, &p).unwrap();
        let u = ProbabilityVector::uniform(g.order()).unwrap();
        prop_assert!(u.step(&m).unwrap().max_abs_diff(&u) < 1e-15);
    }

    #[test]
    fn products_stay_in_subpolytope((g, p, q) in walk_case()) {
        let r = StepDistribution::new(g, q).unwrap();
        let prod = transition_matrix(g, &p).unwrap().product(&transition_matrix(g, &r).unwrap()).unwrap();
        let cert = subpolytope_membership(g, &prod);
        prop_assert!(cert.is_some());
        // The certificate is the convolution of the two step laws.
        let cert = cert.unwrap();
        for h in g.elements() {
            let conv: f64 = g
                .elements()
                .map(|a| {
                    let b = g.add(g.inverse(a).unwrap(), h).unwrap();
                    p.weight(a.index()) * r.weight(b.index())
                })
                .sum();
            prop_assert!((cert.weight(h.index()) - conv).abs() < 1e-12);
        }
    }

    #[test]
    fn polytopes_shrink((g, p, q0) in walk_case()) {
        let m = transition_matrix(g, &p).unwrap();
        let path = trajectory(&q0, &m, 5).unwrap();
        let polys: Vec<_> = path.iter().map(|q| subgroup_polytope(q, g).unwrap()).collect();
        for pair in polys.windows(2) {
            prop_assert!(is_subset(&pair[1], &pair[0], CONTAINS_TOL).unwrap());
        }
    }

    #[test]
    fn tv_matches_sup_over_subsets(
        (x, y) in (2usize..=12).prop_flat_map(|n| (simplex_point(n), simplex_point(n)))
    ) {
        let (xs, ys) = (x.as_slice(), y.as_slice());
        let n = xs.len();
        let best = (0u32..(1 << n))
            .map(|mask| {
                (0..n)
                    .filter(|k| mask & (1 << k) != 0)
                    .map(|k| xs[k] - ys[k])
                    .sum::<f64>()
                    .abs()
            })
            .fold(0.0, f64::max);
        prop_assert!((tv_distance(&x, &y).unwrap() - best).abs() < 1e-12);
    }

    #[test]
    fn gini_forms_agree(x in (2usize..=12).prop_flat_map(simplex_point)) {
        prop_assert!((gini(&x) - gini_pairwise(&x)).abs() < 1e-12);
    }

    #[test]
    fn triangle_containment_matches_barycentric(x in simplex_point(3), y in simplex_point(3)) {
        let g = GroupSpec::cyclic(3).unwrap();
        let poly = subgroup_polytope(&x, g).unwrap();
        prop_assume!(poly.vertex_count() == 3);
        // Vertices are the cyclic shifts of x; barycentric weights solve V lambda = y.
        let v = nalgebra::Matrix3::from_fn(|k, i| poly.vertices()[i].as_slice()[k]);
        prop_assume!(v.determinant().abs() > 1e-6);
        let lambda = v.try_inverse().unwrap() * nalgebra::Vector3::from_column_slice(y.as_slice());
        let min = lambda.min();
        prop_assume!(min.abs() > 1e-6);
        prop_assert_eq!(contains(&poly, &y, CONTAINS_TOL).unwrap(), min > 0.0);
    }

    #[test]
    fn subgroup_polytope_inside_full(x in simplex_point(5)) {
        let g = GroupSpec::cyclic(5).unwrap();
        let small = subgroup_polytope(&x, g).unwrap();
        let full = full_polytope(&x).unwrap();
        prop_assert!(is_subset(&small, &full, CONTAINS_TOL).unwrap());
    }
}

fn deep_groups() -> impl Strategy<Value = GroupSpec> {
    prop_oneof![
        Just(GroupSpec::cyclic(16).unwrap()),
        Just(GroupSpec::product(4).unwrap()),
        Just(GroupSpec::product(7).unwrap()),
        Just(GroupSpec::cyclic(64).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // Late in a walk the polytopes are thin in some directions and wide in
    // others, which is where containment is numerically hardest.
    #[test]
    fn deep_walk_polytopes_nest(
        (g, p, q0) in deep_groups().prop_flat_map(|g| {
            let n = g.order();
            (Just(g), simplex_point(n), simplex_point(n))
        }),
        k in 0usize..60,
    ) {
        let p = StepDistribution::new(g, p).unwrap();
        let m = transition_matrix(g, &p).unwrap();
        let path = trajectory(&q0, &m, k + 1).unwrap();
        let outer = subgroup_polytope(&path[k], g).unwrap();
        let inner = subgroup_polytope(&path[k + 1], g).unwrap();
        prop_assert!(is_subset(&inner, &outer, CONTAINS_TOL).unwrap());
    }
}
