//! Primes with a root of x^2 + 1 or of x^3 - 2, counted against the mean
//! of the s-profile of the corresponding Galois action.

use pseudosplit::frobenian::{mean, s_profile, GaloisSetup};
use pseudosplit::oracle::{compare_with_prediction, IntPoly, PolynomialFamily};
use pseudosplit::perm::{GroupAction, Permutation, PermutationGroup};
use pseudosplit::rational::format;

fn predicted(group: PermutationGroup) -> pseudosplit::rational::Rational {
    let setup = GaloisSetup::geometric(GroupAction::natural(&group)).unwrap();
    mean(&s_profile(&setup).values)
}

fn main() {
    let c2 = PermutationGroup::new(2, vec![Permutation::new(vec![1, 0]).unwrap()]).unwrap();
    let s3 = PermutationGroup::symmetric(3).unwrap();
    let cases = [
        ("x^2 + 1", vec![1, 0, 1], c2),
        ("x^3 - 2", vec![-2, 0, 0, 1], s3),
    ];
    for (name, coeffs, group) in cases {
        let fam = PolynomialFamily::new(vec![IntPoly::new(coeffs)]).unwrap();
        let q = predicted(group);
        let r = compare_with_prediction(&fam, &q, 5, 200_000, 0.02).unwrap();
        println!(
            "{name}: {}/{} good primes have a root ({:.4}); predicted {} ; deviation {} ; pass {}",
            r.estimate.successes,
            r.estimate.good_primes,
            r.estimate.ratio_f64(),
            format(&q),
            r.deviation_decimal,
            r.pass
        );
    }
}
