//! A conic bundle over a base whose fibres only split over a quadratic
//! extension: Λ is the Klein four-group, the fibre lives over the
//! subgroup Γ = <b>, and G = C2 swaps the two geometric components.

use pseudosplit::frobenian::{
    delta, density_s_eq_1, mean, s_lt_one_witness, s_profile, GaloisSetup,
};
use pseudosplit::perm::{GroupAction, Permutation, PermutationGroup};
use pseudosplit::rational::format;

fn main() {
    let a = Permutation::new(vec![1, 0, 3, 2]).unwrap();
    let b = Permutation::new(vec![2, 3, 0, 1]).unwrap();
    let lambda = PermutationGroup::new(4, vec![a, b.clone()]).unwrap();
    let gamma = lambda.subgroup(vec![b.clone()]).unwrap();
    let swap = Permutation::new(vec![1, 0]).unwrap();
    let g = PermutationGroup::new(2, vec![swap.clone()]).unwrap();
    let n = g.trivial_subgroup();
    let fiber = GroupAction::new(g.clone(), 2, vec![swap]).unwrap();
    let setup = GaloisSetup::new(lambda, gamma, g, n, vec![b], Some(fiber)).unwrap();

    let profile = s_profile(&setup);
    println!("class            size  s");
    for (class, value) in profile.values.iter() {
        println!(
            "{:<16} {:>4}  {}",
            class.representative.to_string(),
            class.size(),
            format(value)
        );
        if let Some(w) = s_lt_one_witness(&setup, &class.representative).unwrap() {
            println!("{:<16}       witness without fixed point: {w}", "");
        }
    }
    println!("mean(s)          {}", format(&mean(&profile.values)));
    println!("density(s = 1)   {}", format(&density_s_eq_1(&setup)));
    println!("delta            {}", format(&delta(&setup)));
}
