//! Combining strata: a class of Λ is predicted surjective only when every
//! stratum has s = 1 there.

use pseudosplit::frobenian::{predict_surjectivity, surjectivity_set, GaloisSetup};
use pseudosplit::perm::{GroupAction, Permutation, PermutationGroup};
use pseudosplit::rational::format;

fn stratum(lambda: &PermutationGroup, over: &Permutation) -> GaloisSetup {
    let swap = Permutation::new(vec![1, 0]).unwrap();
    let g = PermutationGroup::new(2, vec![swap.clone()]).unwrap();
    let fiber = GroupAction::new(g.clone(), 2, vec![swap]).unwrap();
    let gamma = lambda.subgroup(vec![over.clone()]).unwrap();
    let n = g.trivial_subgroup();
    GaloisSetup::new(lambda.clone(), gamma, g, n, vec![over.clone()], Some(fiber)).unwrap()
}

fn main() {
    let a = Permutation::new(vec![1, 0, 3, 2]).unwrap();
    let b = Permutation::new(vec![2, 3, 0, 1]).unwrap();
    let lambda = PermutationGroup::new(4, vec![a.clone(), b.clone()]).unwrap();
    let strata = [stratum(&lambda, &b), stratum(&lambda, &a)];

    for x in lambda.elements() {
        println!(
            "{:<14} surjective: {}",
            x.to_string(),
            predict_surjectivity(&strata, x).unwrap()
        );
    }
    let set = surjectivity_set(&lambda, &strata).unwrap();
    let reps: Vec<String> = set.classes.iter().map(|c| c.to_string()).collect();
    println!("classes with s = 1 on every stratum: {}", reps.join(", "));
    println!("density: {}", format(&set.density));
}
