//! The cubic field Q(2^{1/3}) together with Q(sqrt(-3)): neither summand
//! is Q, yet every Frobenius fixes a point, so the product has a root in
//! every Q_p outside the bad primes 2 and 3.

use pseudosplit::etale::{
    component_degrees, covered_by_conjugates, is_pseudo_split, EtaleAlgebraDescriptor,
};
use pseudosplit::oracle::{has_qp_root, primes_in, IntPoly, PolynomialFamily};
use pseudosplit::perm::{Permutation, PermutationGroup};

fn main() {
    let rot = Permutation::new(vec![1, 2, 0]).unwrap();
    let flip = Permutation::new(vec![1, 0, 2]).unwrap();
    let s3 = PermutationGroup::new(3, vec![rot.clone(), flip.clone()]).unwrap();
    let a3 = s3.subgroup(vec![rot]).unwrap();
    let stab = s3.subgroup(vec![flip]).unwrap();
    let d = EtaleAlgebraDescriptor::new(s3, vec![a3, stab]).unwrap();

    let report = is_pseudo_split(&d);
    println!(
        "component degrees: {:?} (dimension {})",
        component_degrees(&d),
        d.dimension()
    );
    println!("split:        {}", report.is_split);
    println!("pseudo-split: {}", report.is_pseudo_split);
    println!(
        "covered by conjugates of the components: {}",
        covered_by_conjugates(&d)
    );

    let fam = PolynomialFamily::new(vec![
        IntPoly::new(vec![3, 0, 1]),
        IntPoly::new(vec![-2, 0, 0, 1]),
    ])
    .unwrap();
    println!("bad primes: {:?}", fam.bad_primes());
    let primes = primes_in(5, 10_000);
    let failures: Vec<u64> = primes
        .iter()
        .copied()
        .filter(|&p| !has_qp_root(&fam, p).unwrap())
        .collect();
    println!(
        "{} primes in [5, 10000], {} without a Q_p-root",
        primes.len(),
        failures.len()
    );
}
