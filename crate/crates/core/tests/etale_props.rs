mod common;

use proptest::prelude::*;
use pseudosplit::etale::{
    covered_by_conjugates, is_pseudo_split, is_split, EtaleAlgebraDescriptor,
};
use pseudosplit::perm::{coset_action, GroupAction, PermutationGroup, Subgroup};

fn fixture_cases() -> Vec<(String, PermutationGroup, Vec<Subgroup>)> {
    common::fixture_groups()
        .into_iter()
        .map(|(n, g)| {
            let subs = g.all_subgroups();
            (n, g, subs)
        })
        .collect()
}

fn case_strategy() -> impl Strategy<Value = (PermutationGroup, Vec<Subgroup>)> {
    let cases = fixture_cases();
    (
        0..cases.len(),
        prop::collection::vec(any::<prop::sample::Index>(), 1..=3),
    )
        .prop_map(move |(k, picks)| {
            let (_, g, subs) = &cases[k];
            (
                g.clone(),
                picks.iter().map(|i| i.get(subs).clone()).collect(),
            )
        })
}

#[test]
fn jordan_on_every_fixture_subgroup() {
    for (name, g, subs) in fixture_cases() {
        for h in subs.iter().filter(|h| h.order() < g.order()) {
            let d = EtaleAlgebraDescriptor::new(g.clone(), vec![h.clone()]).unwrap();
            assert!(d.point_action().is_transitive());
            assert!(
                !is_pseudo_split(&d).is_pseudo_split,
                "{name}: proper subgroup of order {}",
                h.order()
            );
        }
    }
}

#[test]
fn cyclic_subgroups_always_cover() {
    for (name, g, subs) in fixture_cases() {
        let cyclic: Vec<Subgroup> = subs
            .into_iter()
            .filter(|h| {
                h.elements()
                    .iter()
                    .any(|x| g.subgroup(vec![x.clone()]).unwrap().order() == h.order())
            })
            .collect();
        let d = EtaleAlgebraDescriptor::new(g, cyclic).unwrap();
        assert!(is_pseudo_split(&d).is_pseudo_split, "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn two_covering_routes_agree((g, comps) in case_strategy()) {
        let d = EtaleAlgebraDescriptor::new(g, comps).unwrap();
        let r = is_pseudo_split(&d);
        prop_assert_eq!(r.is_pseudo_split, covered_by_conjugates(&d));
        prop_assert_eq!(r.is_pseudo_split, r.uncovered.is_empty());
        if r.is_split {
            prop_assert!(r.is_pseudo_split);
        }
    }

    #[test]
    fn uncovered_set_is_conjugation_stable((g, comps) in case_strategy()) {
        let d = EtaleAlgebraDescriptor::new(g.clone(), comps).unwrap();
        let r = is_pseudo_split(&d);
        for u in &r.uncovered {
            for x in g.elements() {
                prop_assert!(r.uncovered.binary_search(&x.conjugate(u)).is_ok());
            }
        }
    }

    #[test]
    fn cyclic_groups_pseudo_split_only_when_split(n in 2usize..=12, picks in prop::collection::vec(any::<prop::sample::Index>(), 1..=3)) {
        let g = PermutationGroup::cyclic(n).unwrap();
        let subs = g.all_subgroups();
        let comps = picks.iter().map(|i| i.get(&subs).clone()).collect();
        let d = EtaleAlgebraDescriptor::new(g, comps).unwrap();
        prop_assert_eq!(is_pseudo_split(&d).is_pseudo_split, is_split(&d));
    }

    /// Over a subgroup `H` the algebra becomes the action restricted to
    /// `H`; pseudo-splitness and splitness both survive.
    #[test]
    fn base_change_to_a_subgroup((g, comps) in case_strategy(), pick in any::<prop::sample::Index>()) {
        let d = EtaleAlgebraDescriptor::new(g.clone(), comps.clone()).unwrap();
        let subs = g.all_subgroups();
        let h = pick.get(&subs);
        let restricted = d.point_action().restrict(h).unwrap();
        let before = is_pseudo_split(&d);
        let every_fixes = (0..h.order()).all(|i| restricted.image_at(i).has_fixed_point());
        if before.is_pseudo_split {
            prop_assert!(every_fixes);
        }
        if before.is_split {
            let common_point = (0..restricted.set_size())
                .any(|x| (0..h.order()).all(|i| restricted.image_at(i).apply(x) == x));
            prop_assert!(common_point);
        }
        // the restricted action decomposes into orbits, i.e. coset actions of H
        let blocks: Vec<GroupAction> = comps.iter().map(|c| coset_action(&g, c).unwrap()).collect();
        prop_assert_eq!(restricted.set_size(), blocks.iter().map(|b| b.set_size()).sum::<usize>());
    }
}
