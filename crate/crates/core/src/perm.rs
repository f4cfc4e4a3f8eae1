//! Finite permutation groups by explicit element enumeration.
//!
//! Groups are small (the default cap is 10^5 elements), so every group keeps
//! its full sorted element list. Sorting is lexicographic on image arrays,
//! which makes element order, class representatives and coset numbering
//! independent of the order in which generators were supplied.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default upper bound on the order of an enumerated group.
pub const DEFAULT_GROUP_ORDER_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("permutation {0:?} is not a bijection of 0..{1}")]
    NotABijection(Vec<usize>, usize),
    #[error("degree mismatch: expected {expected}, got {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("group too large: more than {cap} elements")]
    GroupTooLarge { cap: usize },
    #[error("degree must be positive")]
    ZeroDegree,
    #[error("element {0} is not in the group")]
    NotInGroup(Permutation),
    #[error("subgroup is not normal: {conjugator} * {element} * {conjugator}^-1 = {result} is not in it")]
    NotNormal {
        conjugator: Permutation,
        element: Permutation,
        result: Permutation,
    },
    #[error("generator images do not extend to a homomorphism (conflict at element {0})")]
    NotAHomomorphism(Permutation),
    #[error("expected {expected} generator images, got {found}")]
    ImageCountMismatch { expected: usize, found: usize },
}

/// A bijection of `{0, .., degree-1}`, stored as its image array.
///
/// Products compose right to left: `a.compose(&b)` maps `x` to `a(b(x))`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(PermError::NotABijection(images, n));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(degree: usize) -> Self {
        Permutation((0..degree).collect())
    }

    /// Builds a permutation from disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..degree).collect();
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                if x >= degree {
                    return Err(PermError::NotABijection(images, degree));
                }
                images[x] = cycle[(k + 1) % cycle.len()];
            }
        }
        Permutation::new(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.0[point]
    }

    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    /// `self * g * self^-1`.
    pub fn conjugate(&self, g: &Permutation) -> Permutation {
        self.compose(g).compose(&self.inverse())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn has_fixed_point(&self) -> bool {
        self.0.iter().enumerate().any(|(i, &j)| i == j)
    }

    pub fn fixed_points(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(i, &j)| *i == j)
            .map(|(i, _)| i)
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = PermError;
    fn try_from(v: Vec<usize>) -> Result<Self, PermError> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.0
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Cycle notation, `()` for the identity.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.0.len()];
        let mut wrote = false;
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] == start {
                continue;
            }
            write!(f, "(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
                first = false;
                x = self.0[x];
            }
            write!(f, ")")?;
            wrote = true;
        }
        if !wrote {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// Closure of `generators` under composition, sorted lexicographically.
pub fn generate_elements(
    degree: usize,
    generators: &[Permutation],
    cap: usize,
) -> Result<Vec<Permutation>, PermError> {
    if degree == 0 {
        return Err(PermError::ZeroDegree);
    }
    for g in generators {
        if g.degree() != degree {
            return Err(PermError::DegreeMismatch {
                expected: degree,
                found: g.degree(),
            });
        }
    }
    let id = Permutation::identity(degree);
    let mut seen: HashSet<Permutation> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = x.compose(g);
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return Err(PermError::GroupTooLarge { cap });
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    let mut elements: Vec<Permutation> = seen.into_iter().collect();
    elements.sort();
    Ok(elements)
}

/// A finite group of permutations together with its enumerated elements.
#[derive(Clone)]
pub struct PermutationGroup {
    degree: usize,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
}

impl PermutationGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self, PermError> {
        Self::with_cap(degree, generators, DEFAULT_GROUP_ORDER_CAP)
    }

    pub fn with_cap(
        degree: usize,
        generators: Vec<Permutation>,
        cap: usize,
    ) -> Result<Self, PermError> {
        let elements = generate_elements(degree, &generators, cap)?;
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        Ok(PermutationGroup {
            degree,
            generators,
            elements,
            index,
        })
    }

    pub fn trivial(degree: usize) -> Result<Self, PermError> {
        Self::new(degree, vec![])
    }

    /// Symmetric group on `degree` points.
    pub fn symmetric(degree: usize) -> Result<Self, PermError> {
        let mut gens = vec![];
        if degree >= 2 {
            gens.push(Permutation::from_cycles(degree, &[&[0, 1]])?);
            let cycle: Vec<usize> = (0..degree).collect();
            gens.push(Permutation::from_cycles(degree, &[&cycle])?);
        }
        Self::new(degree, gens)
    }

    /// Cyclic group of order `n` acting regularly on `n` points.
    pub fn cyclic(n: usize) -> Result<Self, PermError> {
        let cycle: Vec<usize> = (0..n).collect();
        Self::new(n, vec![Permutation::from_cycles(n, &[&cycle])?])
    }

    /// Dihedral group of order `2n` acting on the vertices of an `n`-gon (`n >= 3`).
    pub fn dihedral(n: usize) -> Result<Self, PermError> {
        let rot = Permutation::new((0..n).map(|i| (i + 1) % n).collect())?;
        let refl = Permutation::new((0..n).map(|i| (n - i) % n).collect())?;
        Self::new(n, vec![rot, refl])
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.degree)
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.index.contains_key(g)
    }

    /// Position of `g` in the canonical element order.
    pub fn index_of(&self, g: &Permutation) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn is_abelian(&self) -> bool {
        self.generators
            .iter()
            .all(|a| self.generators.iter().all(|b| a.compose(b) == b.compose(a)))
    }

    pub fn subgroup(&self, generators: Vec<Permutation>) -> Result<Subgroup, PermError> {
        for g in &generators {
            if !self.contains(g) {
                return Err(PermError::NotInGroup(g.clone()));
            }
        }
        let group = PermutationGroup::with_cap(self.degree, generators, self.order().max(1))?;
        Ok(Subgroup { group })
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup {
            group: self.clone(),
        }
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup {
            group: PermutationGroup::with_cap(self.degree, vec![], 1).expect("trivial group"),
        }
    }

    pub fn is_subgroup(&self, h: &Subgroup) -> bool {
        h.degree() == self.degree && h.elements().iter().all(|x| self.contains(x))
    }

    /// Every subgroup, found by repeatedly adjoining one element to known
    /// subgroups starting from the trivial one. Sorted by order, then by
    /// element list. Meant for small groups (exhaustive tests).
    pub fn all_subgroups(&self) -> Vec<Subgroup> {
        let mut seen: HashSet<Vec<Permutation>> = HashSet::new();
        let trivial = self.trivial_subgroup();
        seen.insert(trivial.elements().to_vec());
        let mut out = vec![trivial];
        let mut next = 0;
        while next < out.len() {
            let h = out[next].clone();
            next += 1;
            for g in &self.elements {
                if h.contains(g) {
                    continue;
                }
                let mut gens = h.generators().to_vec();
                gens.push(g.clone());
                let k = self.subgroup(gens).expect("elements of the group");
                if seen.insert(k.elements().to_vec()) {
                    out.push(k);
                }
            }
        }
        out.sort_by(|a, b| {
            a.order()
                .cmp(&b.order())
                .then_with(|| a.elements().cmp(b.elements()))
        });
        out
    }

    /// Left multiplication `x -> g x` as a permutation of the element indices.
    pub fn left_regular_image(&self, g: &Permutation) -> Permutation {
        Permutation(
            self.elements
                .iter()
                .map(|x| self.index[&g.compose(x)])
                .collect(),
        )
    }
}

impl PartialEq for PermutationGroup {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.elements == other.elements
    }
}

impl Eq for PermutationGroup {}

impl fmt::Debug for PermutationGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermutationGroup")
            .field("degree", &self.degree)
            .field("order", &self.order())
            .field("generators", &self.generators)
            .finish()
    }
}

/// A subgroup of some parent group, checked against the parent on creation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subgroup {
    group: PermutationGroup,
}

impl Subgroup {
    pub fn as_group(&self) -> &PermutationGroup {
        &self.group
    }

    pub fn generators(&self) -> &[Permutation] {
        self.group.generators()
    }

    pub fn elements(&self) -> &[Permutation] {
        self.group.elements()
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn degree(&self) -> usize {
        self.group.degree()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.group.contains(g)
    }

    /// Checks normality in `parent` by conjugating generators.
    pub fn check_normal_in(&self, parent: &PermutationGroup) -> Result<(), PermError> {
        for c in parent.generators() {
            for h in self.generators() {
                let r = c.conjugate(h);
                if !self.contains(&r) {
                    return Err(PermError::NotNormal {
                        conjugator: c.clone(),
                        element: h.clone(),
                        result: r,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Extends generator images to every element of `group`.
///
/// Walks the Cayley graph from the identity; every edge `x -> x g` is
/// checked, so a successful return certifies a homomorphism. The result is
/// indexed like `group.elements()`.
pub fn extend_homomorphism(
    group: &PermutationGroup,
    target_degree: usize,
    generator_images: &[Permutation],
) -> Result<Vec<Permutation>, PermError> {
    if generator_images.len() != group.generators().len() {
        return Err(PermError::ImageCountMismatch {
            expected: group.generators().len(),
            found: generator_images.len(),
        });
    }
    for img in generator_images {
        if img.degree() != target_degree {
            return Err(PermError::DegreeMismatch {
                expected: target_degree,
                found: img.degree(),
            });
        }
    }
    let mut images: Vec<Option<Permutation>> = vec![None; group.order()];
    let id_idx = group.index_of(&group.identity()).expect("identity");
    images[id_idx] = Some(Permutation::identity(target_degree));
    let mut queue = VecDeque::from([id_idx]);
    while let Some(i) = queue.pop_front() {
        let x = &group.elements()[i];
        let xi = images[i].clone().expect("visited");
        for (g, gi) in group.generators().iter().zip(generator_images) {
            let y = group.index_of(&x.compose(g)).expect("closed");
            let yi = xi.compose(gi);
            match &images[y] {
                Some(existing) if *existing != yi => {
                    return Err(PermError::NotAHomomorphism(group.elements()[y].clone()))
                }
                Some(_) => {}
                None => {
                    images[y] = Some(yi);
                    queue.push_back(y);
                }
            }
        }
    }
    Ok(images.into_iter().map(|o| o.expect("connected")).collect())
}

/// A homomorphism from a group to the symmetric group of `0..set_size`.
#[derive(Clone, Debug)]
pub struct GroupAction {
    group: PermutationGroup,
    set_size: usize,
    generator_images: Vec<Permutation>,
    element_images: Vec<Permutation>,
}

impl GroupAction {
    pub fn new(
        group: PermutationGroup,
        set_size: usize,
        generator_images: Vec<Permutation>,
    ) -> Result<Self, PermError> {
        let element_images = extend_homomorphism(&group, set_size, &generator_images)?;
        Ok(GroupAction {
            group,
            set_size,
            generator_images,
            element_images,
        })
    }

    /// The group acting on `0..degree` through its own permutations.
    pub fn natural(group: &PermutationGroup) -> Self {
        GroupAction {
            group: group.clone(),
            set_size: group.degree(),
            generator_images: group.generators().to_vec(),
            element_images: group.elements().to_vec(),
        }
    }

    pub fn group(&self) -> &PermutationGroup {
        &self.group
    }

    pub fn set_size(&self) -> usize {
        self.set_size
    }

    pub fn generator_images(&self) -> &[Permutation] {
        &self.generator_images
    }

    pub fn image(&self, g: &Permutation) -> Result<&Permutation, PermError> {
        self.group
            .index_of(g)
            .map(|i| &self.element_images[i])
            .ok_or_else(|| PermError::NotInGroup(g.clone()))
    }

    /// Image of the `i`-th element in canonical order.
    pub fn image_at(&self, i: usize) -> &Permutation {
        &self.element_images[i]
    }

    pub fn is_transitive(&self) -> bool {
        if self.set_size == 0 {
            return true;
        }
        let mut seen = vec![false; self.set_size];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for g in &self.generator_images {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Concatenates actions of the same group on disjoint sets.
    pub fn disjoint_union(group: &PermutationGroup, actions: &[GroupAction]) -> Self {
        let set_size = actions.iter().map(|a| a.set_size).sum();
        let shifted = |imgs: &dyn Fn(&GroupAction) -> &Permutation| {
            let mut v = Vec::with_capacity(set_size);
            let mut offset = 0;
            for a in actions {
                v.extend(imgs(a).images().iter().map(|&x| x + offset));
                offset += a.set_size;
            }
            Permutation(v)
        };
        let generator_images = (0..group.generators().len())
            .map(|k| shifted(&|a: &GroupAction| &a.generator_images[k]))
            .collect();
        let element_images = (0..group.order())
            .map(|k| shifted(&|a: &GroupAction| &a.element_images[k]))
            .collect();
        GroupAction {
            group: group.clone(),
            set_size,
            generator_images,
            element_images,
        }
    }

    /// The same action restricted to a subgroup.
    pub fn restrict(&self, sub: &Subgroup) -> Result<GroupAction, PermError> {
        let imgs = sub
            .generators()
            .iter()
            .map(|g| self.image(g).cloned())
            .collect::<Result<Vec<_>, _>>()?;
        GroupAction::new(sub.as_group().clone(), self.set_size, imgs)
    }
}

/// True iff the image of `g` under `action` fixes some point.
pub fn has_fixed_point(g: &Permutation, action: &GroupAction) -> Result<bool, PermError> {
    Ok(action.image(g)?.has_fixed_point())
}

/// Left-translation action of `group` on the left cosets of `h`.
///
/// Cosets are numbered by their lexicographically least member, so the
/// coset `h` itself is point 0.
pub fn coset_action(group: &PermutationGroup, h: &Subgroup) -> Result<GroupAction, PermError> {
    let (cosets, coset_of) = left_cosets(group, h)?;
    let generator_images = group
        .generators()
        .iter()
        .map(|g| {
            Permutation(
                cosets
                    .iter()
                    .map(|rep| coset_of[group.index_of(&g.compose(rep)).expect("closed")])
                    .collect(),
            )
        })
        .collect();
    GroupAction::new(group.clone(), cosets.len(), generator_images)
}

/// Left cosets of `h`: canonical representatives, and for every element
/// (by index) the number of its coset.
fn left_cosets(
    group: &PermutationGroup,
    h: &Subgroup,
) -> Result<(Vec<Permutation>, Vec<usize>), PermError> {
    if !group.is_subgroup(h) {
        let bad = h
            .elements()
            .iter()
            .find(|x| !group.contains(x))
            .cloned()
            .unwrap_or_else(|| group.identity());
        return Err(PermError::NotInGroup(bad));
    }
    let mut coset_of = vec![usize::MAX; group.order()];
    let mut reps = vec![];
    // Elements are sorted, so the first unassigned one is its coset's least member.
    for (i, x) in group.elements().iter().enumerate() {
        if coset_of[i] != usize::MAX {
            continue;
        }
        let c = reps.len();
        reps.push(x.clone());
        for y in h.elements() {
            coset_of[group.index_of(&x.compose(y)).expect("closed")] = c;
        }
    }
    Ok((reps, coset_of))
}

/// `G/N` realised as a permutation group on the cosets of `N`.
#[derive(Clone, Debug)]
pub struct Quotient {
    group: PermutationGroup,
    projection: Vec<Permutation>,
    parent: PermutationGroup,
}

impl Quotient {
    pub fn group(&self) -> &PermutationGroup {
        &self.group
    }

    pub fn project(&self, g: &Permutation) -> Result<&Permutation, PermError> {
        self.parent
            .index_of(g)
            .map(|i| &self.projection[i])
            .ok_or_else(|| PermError::NotInGroup(g.clone()))
    }

    /// Projection of every parent element, in the parent's canonical order.
    pub fn projections(&self) -> &[Permutation] {
        &self.projection
    }
}

pub fn quotient_by_normal(group: &PermutationGroup, n: &Subgroup) -> Result<Quotient, PermError> {
    if !group.is_subgroup(n) {
        return Err(PermError::NotInGroup(
            n.elements()
                .iter()
                .find(|x| !group.contains(x))
                .cloned()
                .unwrap_or_else(|| group.identity()),
        ));
    }
    n.check_normal_in(group)?;
    let action = coset_action(group, n)?;
    let quotient = PermutationGroup::with_cap(
        action.set_size(),
        action.generator_images().to_vec(),
        group.order(),
    )?;
    let projection = action.element_images.clone();
    Ok(Quotient {
        group: quotient,
        projection,
        parent: group.clone(),
    })
}

/// One conjugacy class; `elements` is sorted and `representative` is its least member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyClass {
    pub representative: Permutation,
    pub elements: Vec<Permutation>,
}

impl ConjugacyClass {
    pub fn size(&self) -> usize {
        self.elements.len()
    }
}

/// The conjugacy classes of a group, ordered by representative.
#[derive(Clone, Debug)]
pub struct ConjugacyClasses {
    classes: Vec<ConjugacyClass>,
    /// class number per element index of the group
    class_of: Vec<usize>,
    group: PermutationGroup,
}

impl ConjugacyClasses {
    pub fn classes(&self) -> &[ConjugacyClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_index(&self, g: &Permutation) -> Option<usize> {
        self.group.index_of(g).map(|i| self.class_of[i])
    }

    pub fn class_of(&self, g: &Permutation) -> Option<&ConjugacyClass> {
        self.class_index(g).map(|c| &self.classes[c])
    }

    pub fn group(&self) -> &PermutationGroup {
        &self.group
    }
}

pub fn conjugacy_classes(group: &PermutationGroup) -> ConjugacyClasses {
    let mut class_of = vec![usize::MAX; group.order()];
    let mut classes = vec![];
    let gens: Vec<(Permutation, Permutation)> = group
        .generators()
        .iter()
        .map(|g| (g.clone(), g.inverse()))
        .collect();
    for (i, x) in group.elements().iter().enumerate() {
        if class_of[i] != usize::MAX {
            continue;
        }
        let c = classes.len();
        class_of[i] = c;
        let mut members = vec![x.clone()];
        let mut stack = vec![x.clone()];
        while let Some(y) = stack.pop() {
            for (g, gi) in &gens {
                let z = g.compose(&y).compose(gi);
                let k = group.index_of(&z).expect("closed");
                if class_of[k] == usize::MAX {
                    class_of[k] = c;
                    members.push(z.clone());
                    stack.push(z);
                }
            }
        }
        members.sort();
        classes.push(ConjugacyClass {
            representative: members[0].clone(),
            elements: members,
        });
    }
    ConjugacyClasses {
        classes,
        class_of,
        group: group.clone(),
    }
}
