mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use pseudosplit::perm::{
    conjugacy_classes, coset_action, quotient_by_normal, Permutation, PermutationGroup,
};

fn group_strategy() -> impl Strategy<Value = PermutationGroup> {
    (2usize..=6).prop_flat_map(|n| {
        prop::collection::vec(Just((0..n).collect::<Vec<usize>>()).prop_shuffle(), 1..=3).prop_map(
            move |gens| {
                let gens = gens
                    .into_iter()
                    .map(|g| Permutation::new(g).unwrap())
                    .collect();
                PermutationGroup::new(n, gens).unwrap()
            },
        )
    })
}

/// Subgroup generated by every conjugate of `x`.
fn normal_closure(g: &PermutationGroup, x: &Permutation) -> pseudosplit::perm::Subgroup {
    let conj: BTreeSet<Permutation> = g.elements().iter().map(|y| x.conjugate(y)).collect();
    g.subgroup(conj.into_iter().collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_under_products_and_inverses(g in group_strategy()) {
        for a in g.elements() {
            prop_assert!(g.contains(&a.inverse()));
            for b in g.elements().iter().step_by(3) {
                prop_assert!(g.contains(&a.compose(b)));
            }
        }
    }

    #[test]
    fn lagrange(g in group_strategy(), pick in any::<prop::sample::Index>()) {
        let x = pick.get(g.elements()).clone();
        let h = g.subgroup(vec![x]).unwrap();
        prop_assert_eq!(g.order() % h.order(), 0);
        let cosets = coset_action(&g, &h).unwrap();
        prop_assert_eq!(cosets.set_size() * h.order(), g.order());
        prop_assert!(cosets.is_transitive());
    }

    #[test]
    fn classes_partition_the_group(g in group_strategy()) {
        let cls = conjugacy_classes(&g);
        let mut seen = BTreeSet::new();
        for c in cls.classes() {
            prop_assert_eq!(g.order() % c.size(), 0);
            prop_assert_eq!(&c.representative, c.elements.iter().min().unwrap());
            for e in &c.elements {
                prop_assert!(seen.insert(e.clone()));
                prop_assert_eq!(cls.class_of(e).unwrap().representative.clone(), c.representative.clone());
            }
        }
        prop_assert_eq!(seen.len(), g.order());
    }

    #[test]
    fn quotient_is_a_homomorphism(g in group_strategy(), pick in any::<prop::sample::Index>()) {
        let x = pick.get(g.elements()).clone();
        let n = normal_closure(&g, &x);
        prop_assert!(n.check_normal_in(&g).is_ok());
        let q = quotient_by_normal(&g, &n).unwrap();
        prop_assert_eq!(q.group().order() * n.order(), g.order());
        for a in g.elements() {
            prop_assert_eq!(q.project(a).unwrap().is_identity(), n.contains(a));
            for b in g.elements().iter().step_by(5) {
                let lhs = q.project(&a.compose(b)).unwrap().clone();
                let rhs = q.project(a).unwrap().compose(q.project(b).unwrap());
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn fixture_group_orders() {
    let orders: Vec<(String, usize)> = common::fixture_groups()
        .into_iter()
        .map(|(n, g)| (n, g.order()))
        .collect();
    for (name, order) in &orders {
        assert!(*order <= 24, "{name} has order {order}");
    }
    let get = |n: &str| orders.iter().find(|(m, _)| m == n).unwrap().1;
    assert_eq!(get("Q8"), 8);
    assert_eq!(get("S4"), 24);
    assert_eq!(get("C3xS3"), 18);
    assert_eq!(get("D6"), 12);
}
