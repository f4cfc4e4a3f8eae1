//! s-invariants of a finite étale scheme over a function field, in purely
//! group-theoretic form.
//!
//! A place `v` enters only through the conjugacy class of its Frobenius in
//! `Λ = Gal(k_L/k)`. Ramified places are outside the model, so every
//! function here is a class function on `Λ`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::etale::EtaleAlgebraDescriptor;
use crate::perm::{
    conjugacy_classes, extend_homomorphism, ConjugacyClass, ConjugacyClasses, GroupAction,
    PermError, Permutation, PermutationGroup, Subgroup,
};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrobenianError {
    #[error("{context}: {source}")]
    Perm {
        context: &'static str,
        #[source]
        source: PermError,
    },
    #[error("Γ is not a subgroup of Λ")]
    GammaNotInLambda,
    #[error("N is not a subgroup of G")]
    NNotInG,
    #[error("kernel of the quotient map is not N (element {0} disagrees)")]
    KernelMismatch(Permutation),
    #[error("image of the quotient map is not Γ")]
    ImageMismatch,
    #[error("fiber action is not an action of G")]
    FiberGroupMismatch,
    #[error("{0} is not an element of Λ")]
    NotInLambda(Permutation),
    #[error("{0} is not an element of the group")]
    NotInGroup(Permutation),
    #[error("stratum {0} uses a different Λ")]
    LambdaMismatch(usize),
    #[error("operation requires a non-empty fiber")]
    EmptyFiber,
}

fn perm_err(context: &'static str) -> impl FnOnce(PermError) -> FrobenianError {
    move |source| FrobenianError::Perm { context, source }
}

/// The tower `k ⊂ K ⊂ L`, `k ⊂ k_K ⊂ k_L` reduced to its groups:
/// `G = Gal(L/K)`, `N ◁ G` acting trivially on `k_L`, `Γ = G/N ⊂ Λ`, and
/// the action of `G` on the geometric components `I(L)`.
#[derive(Clone, Debug)]
pub struct GaloisSetup {
    lambda: PermutationGroup,
    lambda_classes: ConjugacyClasses,
    gamma: Subgroup,
    gamma_classes: ConjugacyClasses,
    g: PermutationGroup,
    n: Subgroup,
    /// image in Λ of each element of G, canonical order
    quotient: Vec<Permutation>,
    fiber: Option<GroupAction>,
    /// whether each element of G fixes a point of I(L)
    fixed: Vec<bool>,
}

impl GaloisSetup {
    /// `quotient_images[i]` is the image in `Λ` of the `i`-th generator of
    /// `G`. A fiber of size zero, or `None`, is the empty-fiber case.
    pub fn new(
        lambda: PermutationGroup,
        gamma: Subgroup,
        g: PermutationGroup,
        n: Subgroup,
        quotient_images: Vec<Permutation>,
        fiber: Option<GroupAction>,
    ) -> Result<Self, FrobenianError> {
        if !lambda.is_subgroup(&gamma) {
            return Err(FrobenianError::GammaNotInLambda);
        }
        if !g.is_subgroup(&n) {
            return Err(FrobenianError::NNotInG);
        }
        n.check_normal_in(&g)
            .map_err(perm_err("N is not normal in G"))?;
        for img in &quotient_images {
            if !lambda.contains(img) {
                return Err(FrobenianError::NotInLambda(img.clone()));
            }
        }
        let quotient = extend_homomorphism(&g, lambda.degree(), &quotient_images)
            .map_err(perm_err("quotient map"))?;
        for (x, qx) in g.elements().iter().zip(&quotient) {
            if qx.is_identity() != n.contains(x) {
                return Err(FrobenianError::KernelMismatch(x.clone()));
            }
        }
        let mut image: Vec<Permutation> = quotient.clone();
        image.sort();
        image.dedup();
        if image != gamma.elements() {
            return Err(FrobenianError::ImageMismatch);
        }
        let fiber = fiber.filter(|f| f.set_size() > 0);
        if let Some(f) = &fiber {
            if f.group() != &g {
                return Err(FrobenianError::FiberGroupMismatch);
            }
        }
        let fixed = (0..g.order())
            .map(|i| {
                fiber
                    .as_ref()
                    .is_some_and(|f| f.image_at(i).has_fixed_point())
            })
            .collect();
        let lambda_classes = conjugacy_classes(&lambda);
        let gamma_classes = conjugacy_classes(gamma.as_group());
        Ok(GaloisSetup {
            lambda,
            lambda_classes,
            gamma,
            gamma_classes,
            g,
            n,
            quotient,
            fiber,
            fixed,
        })
    }

    /// `k = k_K` and `N` trivial: `Λ = Γ = G`, and `G` acts on `I(L)` by `action`.
    pub fn geometric(action: GroupAction) -> Result<Self, FrobenianError> {
        let g = action.group().clone();
        let gens = g.generators().to_vec();
        let n = g.trivial_subgroup();
        GaloisSetup::new(g.clone(), g.whole(), g, n, gens, Some(action))
    }

    /// The setup whose fiber is the point set of an étale algebra.
    pub fn from_descriptor(d: &EtaleAlgebraDescriptor) -> Result<Self, FrobenianError> {
        Self::geometric(d.point_action().clone())
    }

    pub fn lambda(&self) -> &PermutationGroup {
        &self.lambda
    }

    pub fn lambda_classes(&self) -> &ConjugacyClasses {
        &self.lambda_classes
    }

    pub fn gamma(&self) -> &Subgroup {
        &self.gamma
    }

    pub fn g(&self) -> &PermutationGroup {
        &self.g
    }

    pub fn n(&self) -> &Subgroup {
        &self.n
    }

    pub fn fiber(&self) -> Option<&GroupAction> {
        self.fiber.as_ref()
    }

    pub fn is_empty_fiber(&self) -> bool {
        self.fiber.is_none()
    }

    /// Image of `g ∈ G` in `Γ ⊂ Λ`.
    pub fn project(&self, g: &Permutation) -> Result<&Permutation, FrobenianError> {
        self.g
            .index_of(g)
            .map(|i| &self.quotient[i])
            .ok_or_else(|| FrobenianError::NotInGroup(g.clone()))
    }

    fn lambda_class_index(&self, lambda: &Permutation) -> Result<usize, FrobenianError> {
        self.lambda_classes
            .class_index(lambda)
            .ok_or_else(|| FrobenianError::NotInLambda(lambda.clone()))
    }

    /// `(g, g mod N, g has a fixed point on I(L))` over all of `G`.
    fn elements_with_projection(&self) -> impl Iterator<Item = (&Permutation, &Permutation, bool)> {
        self.g
            .elements()
            .iter()
            .zip(&self.quotient)
            .zip(&self.fixed)
            .map(|((g, q), &f)| (g, q, f))
    }
}

/// A function on a finite group that is constant on conjugacy classes.
#[derive(Clone, Debug)]
pub struct ClassFunction {
    classes: ConjugacyClasses,
    values: Vec<Rational>,
}

impl ClassFunction {
    /// `values` are given per class, in the order of `classes`.
    pub fn new(classes: ConjugacyClasses, values: Vec<Rational>) -> Self {
        assert_eq!(classes.len(), values.len(), "one value per class");
        ClassFunction { classes, values }
    }

    pub fn from_fn(group: &PermutationGroup, f: impl Fn(&Permutation) -> Rational) -> Self {
        let classes = conjugacy_classes(group);
        let values = classes
            .classes()
            .iter()
            .map(|c| f(&c.representative))
            .collect();
        ClassFunction { classes, values }
    }

    pub fn group(&self) -> &PermutationGroup {
        self.classes.group()
    }

    pub fn classes(&self) -> &[ConjugacyClass] {
        self.classes.classes()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn eval(&self, g: &Permutation) -> Option<&Rational> {
        self.classes.class_index(g).map(|c| &self.values[c])
    }

    /// `(class, value)` pairs in class order.
    pub fn iter(&self) -> impl Iterator<Item = (&ConjugacyClass, &Rational)> {
        self.classes.classes().iter().zip(&self.values)
    }
}

/// Group average `(1/|H|) Σ_h f(h)`.
pub fn mean(f: &ClassFunction) -> Rational {
    let total: Rational = f
        .iter()
        .map(|(c, v)| v * Rational::from_integer(BigInt::from(c.size())))
        .sum();
    total / Rational::from_integer(BigInt::from(f.group().order()))
}

/// `C_H(Z)`, the smallest conjugation-stable subset containing `Z`, and
/// `Cl_H(Z)`, its conjugacy classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Saturation {
    pub elements: Vec<Permutation>,
    pub classes: Vec<ConjugacyClass>,
}

pub fn conjugacy_saturation(
    h: &PermutationGroup,
    z: &[Permutation],
) -> Result<Saturation, FrobenianError> {
    let classes = conjugacy_classes(h);
    let mut hit = vec![false; classes.len()];
    for x in z {
        let c = classes
            .class_index(x)
            .ok_or_else(|| FrobenianError::NotInGroup(x.clone()))?;
        hit[c] = true;
    }
    let chosen: Vec<ConjugacyClass> = classes
        .classes()
        .iter()
        .zip(hit)
        .filter(|(_, h)| *h)
        .map(|(c, _)| c.clone())
        .collect();
    let mut elements: Vec<Permutation> = chosen.iter().flat_map(|c| c.elements.clone()).collect();
    elements.sort();
    Ok(Saturation {
        elements,
        classes: chosen,
    })
}

/// `s_I(v)` for a place whose Frobenius lies in the class of `lambda`.
///
/// With `Z = C_Λ(λ) ∩ Γ` split into `Γ`-conjugacy classes `C`:
/// `s = (Σ_C #{g ∈ G : g mod N ∈ C, g fixes a point} / (|C|·|N|)) / #Cl_Γ(Z)`,
/// and `s = 1` when `Z` is empty. An empty fiber gives `0`.
pub fn s_value(setup: &GaloisSetup, lambda: &Permutation) -> Result<Rational, FrobenianError> {
    let lambda_class = setup.lambda_class_index(lambda)?;
    if setup.is_empty_fiber() {
        return Ok(Rational::zero());
    }
    // C_Λ(λ) ∩ Γ is a union of Γ-classes.
    let gamma_classes: Vec<(usize, &ConjugacyClass)> = setup
        .gamma_classes
        .classes()
        .iter()
        .enumerate()
        .filter(|(_, c)| setup.lambda_classes.class_index(&c.representative) == Some(lambda_class))
        .collect();
    if gamma_classes.is_empty() {
        return Ok(Rational::one());
    }
    let n_order = BigInt::from(setup.n.order());
    let mut fixed_counts = vec![0usize; setup.gamma_classes.len()];
    for (_, q, fixed) in setup.elements_with_projection() {
        if fixed {
            let c = setup.gamma_classes.class_index(q).expect("image lies in Γ");
            fixed_counts[c] += 1;
        }
    }
    let sum: Rational = gamma_classes
        .iter()
        .map(|(idx, c)| {
            Rational::new(
                BigInt::from(fixed_counts[*idx]),
                BigInt::from(c.size()) * &n_order,
            )
        })
        .sum();
    Ok(sum / Rational::from_integer(BigInt::from(gamma_classes.len())))
}

#[derive(Clone, Debug)]
pub struct SInvariantProfile {
    pub values: ClassFunction,
    pub empty_fiber: bool,
}

impl SInvariantProfile {
    pub fn is_constant_one(&self) -> bool {
        self.values.values().iter().all(|v| v.is_one())
    }
}

/// `s_value` on every conjugacy class of `Λ`. Classes are evaluated in
/// parallel; the result is ordered by class.
pub fn s_profile(setup: &GaloisSetup) -> SInvariantProfile {
    let values = setup
        .lambda_classes
        .classes()
        .par_iter()
        .map(|c| s_value(setup, &c.representative).expect("representative lies in Λ"))
        .collect();
    SInvariantProfile {
        values: ClassFunction::new(setup.lambda_classes.clone(), values),
        empty_fiber: setup.is_empty_fiber(),
    }
}

/// Least `g ∈ G` without a fixed point on `I(L)` whose image lies in
/// `C_Λ(λ) ∩ Γ`. Exists iff `s_value < 1`.
pub fn s_lt_one_witness(
    setup: &GaloisSetup,
    lambda: &Permutation,
) -> Result<Option<Permutation>, FrobenianError> {
    let class = setup.lambda_class_index(lambda)?;
    if setup.is_empty_fiber() {
        return Err(FrobenianError::EmptyFiber);
    }
    Ok(setup
        .elements_with_projection()
        .find(|(_, q, fixed)| !fixed && setup.lambda_classes.class_index(q) == Some(class))
        .map(|(g, _, _)| g.clone()))
}

/// Density of `{v : s_I(v) = 1}`: the proportion of `λ ∈ Λ` such that every
/// `g ∈ G` with `g mod N ∈ C_Λ(λ) ∩ Γ` fixes a point. `0` for an empty fiber.
pub fn density_s_eq_1(setup: &GaloisSetup) -> Rational {
    if setup.is_empty_fiber() {
        return Rational::zero();
    }
    let mut spoiled = vec![false; setup.lambda_classes.len()];
    for (_, q, fixed) in setup.elements_with_projection() {
        if !fixed {
            spoiled[setup.lambda_classes.class_index(q).expect("Γ ⊂ Λ")] = true;
        }
    }
    let good = setup
        .lambda
        .elements()
        .iter()
        .filter(|l| !spoiled[setup.lambda_classes.class_index(l).expect("member")])
        .count();
    Rational::new(BigInt::from(good), BigInt::from(setup.lambda.order()))
}

/// Proportion of `g ∈ G` with a fixed point on `I(L)`.
pub fn delta(setup: &GaloisSetup) -> Rational {
    let fixed = setup.fixed.iter().filter(|&&f| f).count();
    Rational::new(BigInt::from(fixed), BigInt::from(setup.g.order()))
}

/// Pseudo-splitness read off the s-profile, cross-checked against the
/// direct test that every element of `G` fixes a point.
pub fn is_pseudo_split_via_s(setup: &GaloisSetup) -> bool {
    let by_profile = s_profile(setup).is_constant_one();
    let direct = !setup.is_empty_fiber() && setup.fixed.iter().all(|&f| f);
    assert_eq!(
        by_profile, direct,
        "s-profile and fixed-point routes disagree on pseudo-splitness"
    );
    direct
}

fn check_common_lambda(
    lambda: Option<&PermutationGroup>,
    strata: &[GaloisSetup],
) -> Result<(), FrobenianError> {
    let Some(lambda) = lambda.or_else(|| strata.first().map(|s| &s.lambda)) else {
        return Ok(());
    };
    match strata.iter().position(|s| &s.lambda != lambda) {
        Some(i) => Err(FrobenianError::LambdaMismatch(i)),
        None => Ok(()),
    }
}

/// True iff every stratum has `s = 1` at the class of `lambda`.
pub fn predict_surjectivity(
    strata: &[GaloisSetup],
    lambda: &Permutation,
) -> Result<bool, FrobenianError> {
    check_common_lambda(None, strata)?;
    for s in strata {
        if !s_value(s, lambda)?.is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurjectivitySet {
    /// Representatives of the classes of `Λ` where every stratum has `s = 1`.
    pub classes: Vec<Permutation>,
    pub density: Rational,
}

pub fn surjectivity_set(
    lambda: &PermutationGroup,
    strata: &[GaloisSetup],
) -> Result<SurjectivitySet, FrobenianError> {
    check_common_lambda(Some(lambda), strata)?;
    let profiles: Vec<SInvariantProfile> = strata.iter().map(s_profile).collect();
    let classes = conjugacy_classes(lambda);
    let mut reps = vec![];
    let mut count = 0usize;
    for (k, c) in classes.classes().iter().enumerate() {
        if profiles.iter().all(|p| p.values.values()[k].is_one()) {
            reps.push(c.representative.clone());
            count += c.size();
        }
    }
    Ok(SurjectivitySet {
        classes: reps,
        density: Rational::new(BigInt::from(count), BigInt::from(lambda.order())),
    })
}
