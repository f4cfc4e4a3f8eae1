mod common;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use pseudosplit::frobenian::{
    delta, density_s_eq_1, is_pseudo_split_via_s, mean, s_lt_one_witness, s_profile, s_value,
    surjectivity_set, ClassFunction, GaloisSetup,
};
use pseudosplit::perm::{
    coset_action, quotient_by_normal, GroupAction, Permutation, PermutationGroup,
};
use pseudosplit::rational::Rational;

/// Everything needed to rebuild `s` by hand next to the setup itself.
#[derive(Debug, Clone)]
struct Case {
    setup: GaloisSetup,
    lambda: PermutationGroup,
    gamma: Vec<Permutation>,
    g: PermutationGroup,
    n_order: usize,
    /// (element of G, image in Λ, fixes a point)
    table: Vec<(Permutation, Permutation, bool)>,
}

fn pad(p: &Permutation, extra: &[usize]) -> Permutation {
    let d = p.degree();
    let mut v = p.images().to_vec();
    v.extend(extra.iter().map(|x| x + d));
    Permutation::new(v).unwrap()
}

fn build(g: PermutationGroup, closure_of: usize, widen: bool, fiber_subgroups: Vec<usize>) -> Case {
    let x = &g.elements()[closure_of % g.order()];
    let conj: BTreeSet<Permutation> = g.elements().iter().map(|y| y.conjugate(x)).collect();
    let n = g.subgroup(conj.into_iter().collect()).unwrap();
    let q = quotient_by_normal(&g, &n).unwrap();
    let qd = q.group().degree();
    // Λ = Q or Q × C2, Γ = Q inside it
    type Embed = Box<dyn Fn(&Permutation) -> Permutation>;
    let (lambda, embed): (PermutationGroup, Embed) = if widen {
        let mut gens: Vec<Permutation> = q
            .group()
            .generators()
            .iter()
            .map(|p| pad(p, &[0, 1]))
            .collect();
        gens.push(pad(&Permutation::identity(qd), &[1, 0]));
        (
            PermutationGroup::new(qd + 2, gens).unwrap(),
            Box::new(|p: &Permutation| pad(p, &[0, 1])),
        )
    } else {
        (q.group().clone(), Box::new(|p: &Permutation| p.clone()))
    };
    let gamma_elems: Vec<Permutation> = q.group().elements().iter().map(&embed).collect();
    let gamma = lambda.subgroup(gamma_elems.clone()).unwrap();
    let quot = g
        .generators()
        .iter()
        .map(|s| embed(q.project(s).unwrap()))
        .collect();

    let subs = g.all_subgroups();
    let blocks: Vec<GroupAction> = fiber_subgroups
        .iter()
        .map(|&k| coset_action(&g, &subs[k % subs.len()]).unwrap())
        .collect();
    let fiber = (!blocks.is_empty()).then(|| GroupAction::disjoint_union(&g, &blocks));
    let setup = GaloisSetup::new(
        lambda.clone(),
        gamma,
        g.clone(),
        n.clone(),
        quot,
        fiber.clone(),
    )
    .unwrap();
    let table = g
        .elements()
        .iter()
        .map(|e| {
            let fixed = fiber
                .as_ref()
                .is_some_and(|f| f.image(e).unwrap().has_fixed_point());
            (e.clone(), embed(q.project(e).unwrap()), fixed)
        })
        .collect();
    Case {
        setup,
        lambda,
        gamma: gamma_elems,
        g,
        n_order: n.order(),
        table,
    }
}

fn case_strategy() -> impl Strategy<Value = Case> {
    (2usize..=4)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(Just((0..n).collect::<Vec<usize>>()).prop_shuffle(), 1..=2),
                any::<usize>(),
                any::<bool>(),
                prop::collection::vec(any::<usize>(), 0..=2),
            )
                .prop_map(move |(gens, c, w, f)| {
                    let gens = gens
                        .into_iter()
                        .map(|g| Permutation::new(g).unwrap())
                        .collect();
                    (PermutationGroup::new(n, gens).unwrap(), c, w, f)
                })
        })
        .prop_map(|(g, c, w, f)| build(g, c, w, f))
}

/// `s` rebuilt from the definition: pick one element in each Γ-orbit of
/// `Z = (Λ-class of λ) ∩ Γ` and count fixing lifts of that element alone.
fn oracle_s(c: &Case, l: &Permutation) -> Rational {
    if c.table.iter().all(|(_, _, f)| !f) && c.setup.is_empty_fiber() {
        return Rational::zero();
    }
    let class: BTreeSet<Permutation> = c.lambda.elements().iter().map(|x| x.conjugate(l)).collect();
    let mut z: BTreeSet<Permutation> = c
        .gamma
        .iter()
        .filter(|x| class.contains(x))
        .cloned()
        .collect();
    if z.is_empty() {
        return Rational::one();
    }
    let mut total = Rational::zero();
    let mut orbits = 0i64;
    while let Some(rep) = z.pop_first() {
        for y in &c.gamma {
            z.remove(&y.conjugate(&rep));
        }
        let fixing = c.table.iter().filter(|(_, q, f)| *q == rep && *f).count();
        total += Rational::new(BigInt::from(fixing), BigInt::from(c.n_order));
        orbits += 1;
    }
    total / Rational::from_integer(BigInt::from(orbits))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn s_matches_the_definition(c in case_strategy()) {
        for l in c.lambda.elements() {
            prop_assert_eq!(s_value(&c.setup, l).unwrap(), oracle_s(&c, l), "at {}", l);
        }
    }

    #[test]
    fn s_is_a_class_function(c in case_strategy()) {
        for l in c.lambda.elements() {
            let v = s_value(&c.setup, l).unwrap();
            for x in c.lambda.elements() {
                prop_assert_eq!(&s_value(&c.setup, &x.conjugate(l)).unwrap(), &v);
            }
        }
    }

    #[test]
    fn mean_is_the_element_average(c in case_strategy()) {
        let prof = s_profile(&c.setup);
        let brute: Rational = c.lambda.elements().iter().map(|l| s_value(&c.setup, l).unwrap()).sum::<Rational>()
            / Rational::from_integer(BigInt::from(c.lambda.order()));
        prop_assert_eq!(mean(&prof.values), brute);
    }

    #[test]
    fn witness_exists_exactly_when_s_below_one(c in case_strategy()) {
        prop_assume!(!c.setup.is_empty_fiber());
        for l in c.lambda.elements() {
            let w = s_lt_one_witness(&c.setup, l).unwrap();
            let s = s_value(&c.setup, l).unwrap();
            prop_assert_eq!(w.is_some(), s < Rational::one());
            if let Some(w) = w {
                let row = c.table.iter().find(|(e, _, _)| *e == w).unwrap();
                prop_assert!(!row.2);
                let class: Vec<Permutation> = c.lambda.elements().iter().map(|x| x.conjugate(l)).collect();
                prop_assert!(class.contains(&row.1));
            }
        }
    }

    #[test]
    fn density_one_iff_pseudo_split(c in case_strategy()) {
        let all_fix = !c.setup.is_empty_fiber() && c.table.iter().all(|(_, _, f)| *f);
        prop_assert_eq!(density_s_eq_1(&c.setup).is_one(), all_fix);
        prop_assert_eq!(is_pseudo_split_via_s(&c.setup), all_fix);
        let ones = c.lambda.elements().iter().filter(|l| s_value(&c.setup, l).unwrap().is_one()).count();
        prop_assert_eq!(
            density_s_eq_1(&c.setup),
            if c.setup.is_empty_fiber() { Rational::zero() } else {
                Rational::new(BigInt::from(ones), BigInt::from(c.lambda.order()))
            }
        );
    }

    #[test]
    fn delta_comparison_when_lambda_is_gamma(
        g in (2usize..=4).prop_flat_map(|n| prop::collection::vec(Just((0..n).collect::<Vec<usize>>()).prop_shuffle(), 1..=2)),
        picks in prop::collection::vec(any::<usize>(), 1..=2),
    ) {
        let n = g[0].len();
        let grp = PermutationGroup::new(n, g.into_iter().map(|x| Permutation::new(x).unwrap()).collect()).unwrap();
        // element 0 is the identity, so N is trivial and Λ = Γ = G
        let c = build(grp.clone(), 0, false, picks);
        prop_assert_eq!(c.n_order, 1);
        prop_assert_eq!(mean(&s_profile(&c.setup).values), delta(&c.setup));
        let subs = grp.all_subgroups();
        let blocks: Vec<GroupAction> = subs.iter().take(2).map(|h| coset_action(&grp, h).unwrap()).collect();
        let setup = GaloisSetup::geometric(GroupAction::disjoint_union(&grp, &blocks)).unwrap();
        prop_assert_eq!(mean(&s_profile(&setup).values), delta(&setup));
    }

    #[test]
    fn surjectivity_density_is_mean_of_the_product(a in case_strategy(), k in any::<usize>()) {
        // a second stratum over the same Λ: same groups, a different fiber
        let subs = a.g.all_subgroups();
        let h = &subs[k % subs.len()];
        let fiber = coset_action(&a.g, h).unwrap();
        let b = GaloisSetup::new(
            a.lambda.clone(),
            a.setup.gamma().clone(),
            a.g.clone(),
            a.setup.n().clone(),
            a.g.generators().iter().map(|s| a.setup.project(s).unwrap().clone()).collect(),
            Some(fiber),
        ).unwrap();
        let strata = [a.setup.clone(), b.clone()];
        let set = surjectivity_set(&a.lambda, &strata).unwrap();
        let product = ClassFunction::from_fn(&a.lambda, |l| {
            let both = s_value(&a.setup, l).unwrap().is_one() && s_value(&b, l).unwrap().is_one();
            if both { Rational::one() } else { Rational::zero() }
        });
        prop_assert_eq!(set.density, mean(&product));
    }
}
